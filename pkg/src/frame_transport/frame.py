"""Adjoint frame vectors and classical-transport defects.

For a unitary ``U`` the frame vector of generator ``a`` has components
``e_a^j = Tr[U l_a U^dag l_j] / N``.  The defect ``de_a/dt . e_b`` is
computed two ways: from the commutator identity

    de_a/dt . e_b = -i Tr[h [l_a(t), l_b(t)]] / N,

and by finite differences of the stored frame history.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_algebra import GeneratorBasis, commutator
from .transport import (
    NonUnitaryError,
    TransportState,
    moving_diagonal,
    unitarity_defect,
)

REAL_TOL = 1e-12
HORIZONTAL_TOL = 1e-10


class NotHorizontalError(ValueError):
    pass


@dataclass(frozen=True)
class FrameVector:
    a: int
    t: float
    e: np.ndarray


@dataclass(frozen=True)
class DefectSeries:
    """Both defect routes for one generator pair along a run.

    ``edge`` marks grid points where the finite difference is one-sided.
    """

    pair: tuple
    times: np.ndarray
    defect_commutator: np.ndarray
    defect_fd: np.ndarray
    edge: np.ndarray

    @property
    def max_abs_commutator(self) -> float:
        return float(np.max(np.abs(self.defect_commutator)))

    @property
    def max_abs_fd(self) -> float:
        return float(np.max(np.abs(self.defect_fd)))

    @property
    def discrepancy(self) -> np.ndarray:
        return self.defect_fd - self.defect_commutator

    @property
    def max_discrepancy(self) -> float:
        return float(np.max(np.abs(self.discrepancy)))


def _real(x, what):
    x = np.asarray(x)
    resid = np.max(np.abs(x.imag), initial=0.0)
    if resid > REAL_TOL:
        raise ValueError(f"{what} has imaginary residue {resid:.3e}")
    return x.real.copy()


def _require_unitary(U, tol=1e-10):
    if unitarity_defect(U) > tol:
        raise NonUnitaryError(f"U is not unitary (defect {unitarity_defect(U):.3e})")


def transported_generators(basis: GeneratorBasis, U):
    """``l_a(t) = U l_a U^dag`` for every ``a``, shape ``(d, n, n)``."""
    U = np.asarray(U, dtype=complex)
    return np.einsum("ij,ajk,lk->ail", U, basis.generators, U.conj())


def adjoint_matrix(basis: GeneratorBasis, U) -> np.ndarray:
    """Real ``d x d`` matrix whose row ``a`` is the frame vector ``e_a``."""
    U = basis.check_dims(U, "U")
    _require_unitary(U)
    lam_t = transported_generators(basis, U)
    R = np.einsum("aij,kji->ak", lam_t, basis.generators) / basis.norm_factor
    return _real(R, "frame vectors")


def adjoint_frame(basis: GeneratorBasis, U, t: float = 0.0) -> list[FrameVector]:
    R = adjoint_matrix(basis, U)
    return [FrameVector(a=a, t=t, e=R[a]) for a in range(basis.d)]


def orthogonality_defect(R) -> float:
    R = np.asarray(R)
    return float(np.max(np.abs(R @ R.T - np.eye(len(R)))))


def defect_commutator(basis: GeneratorBasis, U, h, a: int, b: int) -> float:
    """``de_a/dt . e_b`` from the commutator trace for a horizontal ``h``.

    Raises ``NotHorizontalError`` if ``h`` has a moving-basis diagonal
    above ``1e-10``.
    """
    U = np.asarray(basis.check_dims(U, "U"), dtype=complex)
    h = np.asarray(basis.check_dims(h, "h"), dtype=complex)
    _require_unitary(U)
    resid = np.max(np.abs(moving_diagonal(h, U)))
    if resid > HORIZONTAL_TOL:
        raise NotHorizontalError(f"h is not horizontal (residual {resid:.3e})")
    la = U @ basis.generators[a] @ U.conj().T
    lb = U @ basis.generators[b] @ U.conj().T
    val = -1j * np.trace(h @ commutator(la, lb)) / basis.norm_factor
    return float(_real(val, "commutator defect"))


def frame_history(basis: GeneratorBasis, run) -> np.ndarray:
    """Frame matrices along a run, shape ``(len(run), d, d)``."""
    return np.stack([adjoint_matrix(basis, s.U) for s in run])


def defect_table(basis: GeneratorBasis, run: list[TransportState], pairs,
                 frames=None) -> list[DefectSeries]:
    """:func:`defect_series` for several pairs sharing one frame history."""
    if len(run) < 3:
        raise ValueError(f"need at least 3 grid points, got {len(run)}")
    times = np.array([s.t for s in run])
    steps = np.diff(times)
    if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
        raise ValueError("run is not on a uniform grid")
    if frames is None:
        frames = frame_history(basis, run)
    resid = max(s.horizontal_residual for s in run)
    if resid > HORIZONTAL_TOL:
        raise NotHorizontalError(f"run is not horizontal (residual {resid:.3e})")
    U = np.stack([s.U for s in run])
    h = np.stack([s.h for s in run])
    pairs = [tuple(p) for p in pairs]
    used = sorted({i for p in pairs for i in p})
    slot = {a: k for k, a in enumerate(used)}
    # l_a(t) for the generators in use, shape (steps, len(used), n, n)
    lam_t = np.einsum("tij,ajk,tlk->tail", U, basis.generators[used], U.conj())
    edot = np.gradient(frames, times, axis=0, edge_order=2)
    edge = np.zeros(len(run), dtype=bool)
    edge[[0, -1]] = True
    out = []
    for a, b in pairs:
        la, lb = lam_t[:, slot[a]], lam_t[:, slot[b]]
        comm = la @ lb - lb @ la
        dc = -1j * np.einsum("tij,tji->t", h, comm) / basis.norm_factor
        dfd = np.einsum("tj,tj->t", edot[:, a], frames[:, b])
        out.append(DefectSeries(
            pair=(a, b),
            times=times,
            defect_commutator=_real(dc, f"commutator defect {(a, b)}"),
            defect_fd=dfd,
            edge=edge,
        ))
    return out


def defect_series(basis: GeneratorBasis, run: list[TransportState], pair) -> DefectSeries:
    """Defect of pair ``(a, b)`` at every grid point of ``run``.

    The finite-difference route uses central differences inside the grid
    and second-order one-sided stencils at the two ends (``edge``).
    """
    return defect_table(basis, run, [tuple(pair)])[0]


def matrix_element_invariance(basis: GeneratorBasis, U, a: int) -> float:
    """``max |<n(t)|l_a(t)|m(t)> - <n|l_a|m>|``; zero up to roundoff."""
    U = np.asarray(basis.check_dims(U, "U"), dtype=complex)
    _require_unitary(U)
    lam = basis.generators[a]
    lam_t = U @ lam @ U.conj().T
    return float(np.max(np.abs(U.conj().T @ lam_t @ U - lam)))
