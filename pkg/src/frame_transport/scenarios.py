"""Built-in transport experiments.

* :func:`su2_cone` -- spin-1/2 frame whose axis precesses on a cone; its
  geometric phases are known in closed form.
* :func:`random_horizontal` -- seeded smooth random generator paths in su(n).
* :func:`holonomy` and :func:`nonlinearity_defect` -- loop phases and the
  basis dependence of quantum parallel transport.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lie_algebra import GeneratorBasis, build_basis
from .transport import (
    GeneratorPath,
    NonUnitaryError,
    TransportState,
    aligned_dt,
    moving_diagonal,
    unitarity_defect,
    unitary_exp,
)

# Loop phases of the two cone eigenstates, as multiples of half the solid
# angle. Column 0 of U0 is the +n eigenstate. Pinned by the fine-step oracle
# (scripts/holonomy_oracle.py).
CONE_PHASE_SIGNS = (-1, +1)


@dataclass(frozen=True)
class Scenario:
    name: str
    basis: GeneratorBasis
    U0: np.ndarray
    path: GeneratorPath
    loop_flag: bool
    seed: int | None = None
    dt: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if unitarity_defect(self.U0) > 1e-12:
            raise NonUnitaryError(f"{self.name}: U0 is not unitary")


@dataclass(frozen=True)
class HolonomyResult:
    phases: np.ndarray
    off_diagonal_leak: float


def wrap_phase(x):
    """Map angles into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    w = np.angle(np.exp(1j * x))
    return np.where(w <= -np.pi, np.pi, w)


def cone_solid_angle(theta):
    return 2 * np.pi * (1 - np.cos(theta))


def cone_geometric_phases(theta):
    """Closed-form loop phases of :func:`su2_cone`, wrapped."""
    half = 0.5 * cone_solid_angle(theta)
    return wrap_phase([s * half for s in CONE_PHASE_SIGNS])


def su2_cone(theta: float, omega: float = 1.0, dt: float | None = None) -> Scenario:
    """Frame tilted by ``theta`` from z, carried once around the z axis.

    ``U0 = exp(-i theta sigma_y / 2)`` and ``H(t) = (omega/2) sigma_z`` for
    one period ``T = 2 pi / omega``.  If given, ``dt`` is shrunk so that it
    divides ``T``.
    """
    if not 0 < theta < np.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta!r}")
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    basis = build_basis(2)
    sx, sy, sz = basis.generators
    U0 = unitary_exp(sy, 0.5 * theta)
    T = 2 * np.pi / omega
    H = 0.5 * omega * sz
    path = GeneratorPath(lambda t: H, T, f"su2 cone theta={theta!r} omega={omega!r}")
    return Scenario(
        name="su2_cone",
        basis=basis,
        U0=U0,
        path=path,
        loop_flag=True,
        dt=None if dt is None else aligned_dt(T, dt),
        params={"theta": theta, "omega": omega, "T": T},
    )


def random_traceless_hermitian(rng, n):
    """Hermitian traceless matrix, real and imaginary parts in ``[-1, 1]``."""
    re = rng.uniform(-1, 1, (n, n))
    im = rng.uniform(-1, 1, (n, n))
    M = np.triu(re, 1) + 1j * np.triu(im, 1)
    M = M + M.conj().T + np.diag(np.diag(re))
    return M - np.trace(M) / n * np.eye(n)


class FourierPath:
    """``sum_k A_k cos(2 pi k t / T) + B_k sin(2 pi k t / T)``."""

    def __init__(self, A, B, T):
        self.A = np.asarray(A)
        self.B = np.asarray(B)
        self.T = T
        self.k = np.arange(1, len(A) + 1)

    def __call__(self, t):
        w = 2 * np.pi * self.k * t / self.T
        return (np.tensordot(np.cos(w), self.A, axes=1)
                + np.tensordot(np.sin(w), self.B, axes=1))


def random_horizontal(n: int, seed: int, K: int = 3, T: float = 10.0,
                      dt: float | None = None) -> Scenario:
    """Seeded smooth random candidate path in su(n), started at ``U0 = I``."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K!r}")
    if not T > 0:
        raise ValueError(f"T must be positive, got {T!r}")
    basis = build_basis(n)
    rng = np.random.default_rng(seed)
    A = np.stack([random_traceless_hermitian(rng, n) for _ in range(K)])
    B = np.stack([random_traceless_hermitian(rng, n) for _ in range(K)])
    path = GeneratorPath(FourierPath(A, B, T), T, f"random su({n}) seed={seed} K={K}")
    return Scenario(
        name="random_horizontal",
        basis=basis,
        U0=np.eye(n, dtype=complex),
        path=path,
        loop_flag=False,
        seed=seed,
        dt=None if dt is None else aligned_dt(T, dt),
        params={"n": n, "seed": seed, "K": K, "T": T},
    )


def holonomy(scenario: Scenario, run: list[TransportState]) -> HolonomyResult:
    """Diagonal phases and off-diagonal leak of ``U0^dag U(T)``."""
    if not scenario.loop_flag:
        raise ValueError(f"scenario {scenario.name!r} is not a loop")
    V = scenario.U0.conj().T @ run[-1].U
    off = np.abs(V[~np.eye(len(V), dtype=bool)])
    return HolonomyResult(
        phases=wrap_phase(np.angle(np.diag(V))),
        off_diagonal_leak=float(np.max(off, initial=0.0)),
    )


def nonlinearity_defect(basis: GeneratorBasis, run: list[TransportState], u_mix) -> float:
    """Largest moving-diagonal element of ``h`` in the remixed frame ``U u_mix``.

    Zero when ``u_mix`` is diagonal; generically positive otherwise.
    """
    u_mix = np.asarray(basis.check_dims(u_mix, "u_mix"), dtype=complex)
    if unitarity_defect(u_mix) > 1e-10:
        raise NonUnitaryError("u_mix is not unitary")
    return float(max(np.max(np.abs(moving_diagonal(s.h, s.U @ u_mix))) for s in run))
