"""Horizontal (parallel-transported) unitary paths.

A candidate hermitian generator ``H(t)`` is projected onto the part with zero
diagonal in the moving basis, ``h = H - sum_n <n(t)|H|n(t)> |n(t)><n(t)|``,
and ``dU/dt = -i h(t) U`` is integrated with an exponential midpoint rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
GRID_TOL = 1e-9


class TransportError(RuntimeError):
    """An integration step failed; ``t`` is the start time of that step."""

    def __init__(self, t, msg):
        super().__init__(f"at t={t!r}: {msg}")
        self.t = t


class NonUnitaryError(ValueError):
    pass


def unitarity_defect(U) -> float:
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(len(U)))))


def moving_diagonal(h, U):
    """Diagonal of ``h`` in the moving basis, ``<n(t)|h|n(t)>``."""
    return np.einsum("in,ij,jn->n", U.conj(), h, U)


def horizontal_project(H, U, tol: float = UNITARY_TOL):
    """Remove the moving-basis diagonal of ``H``.

    Parameters
    ----------
    H : array_like, shape (n, n)
        Hermitian candidate generator; a nonzero trace is allowed.
    U : array_like, shape (n, n)
        Unitary whose columns are the moving basis states.

    Returns
    -------
    h : ndarray
        Hermitian, traceless, with ``<n(t)|h|n(t)> = 0`` for every column.
    """
    H = np.asarray(H, dtype=complex)
    U = np.asarray(U, dtype=complex)
    if H.shape != U.shape or H.ndim != 2:
        raise ValueError(f"shape mismatch: H {H.shape}, U {U.shape}")
    if unitarity_defect(U) > tol:
        raise NonUnitaryError(f"U is not unitary (defect {unitarity_defect(U):.3e})")
    d = moving_diagonal(H, U).real
    h = H - (U * d) @ U.conj().T
    return 0.5 * (h + h.conj().T)


def unitary_exp(h, tau):
    """``exp(-i h tau)`` for hermitian ``h``, via its eigendecomposition."""
    w, V = np.linalg.eigh(h)
    return (V * np.exp(-1j * tau * w)) @ V.conj().T


@dataclass(frozen=True)
class GeneratorPath:
    """Time-dependent hermitian candidate ``H(t)`` on ``[0, T]``."""

    evaluator: Callable[[float], np.ndarray]
    T: float
    description: str = ""

    def __call__(self, t):
        H = np.asarray(self.evaluator(t), dtype=complex)
        if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOL * (1.0 + np.max(np.abs(H))):
            raise ValueError(f"candidate generator is not hermitian at t={t!r}")
        return H


def zero_path(n, T, description="zero"):
    Z = np.zeros((n, n), dtype=complex)
    return GeneratorPath(lambda t: Z, T, description)


def constant_path(H, T, description="constant"):
    H = np.array(H, dtype=complex)
    return GeneratorPath(lambda t: H, T, description)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    corrector_iterations: int = 2
    scheme: str = "exp-midpoint"

    def __post_init__(self):
        if not self.dt > 0 or not np.isfinite(self.dt):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.corrector_iterations < 1:
            raise ValueError("corrector_iterations must be >= 1")
        if self.scheme != "exp-midpoint":
            raise ValueError(f"unknown scheme {self.scheme!r}")

    def n_steps(self, T):
        """Number of steps covering ``[0, T]``; ``dt`` must divide ``T``."""
        steps = int(round(T / self.dt))
        if abs(steps * self.dt - T) > GRID_TOL * max(T, self.dt):
            raise ValueError(f"dt={self.dt!r} does not divide T={T!r}")
        return steps


def aligned_dt(T, dt):
    """Largest step not exceeding ~``dt`` that divides ``T`` exactly."""
    if T == 0:
        return dt
    return T / max(1, int(np.ceil(T / dt - GRID_TOL)))


@dataclass(frozen=True)
class TransportState:
    """Point on a horizontal path.

    ``h`` is the projected generator at ``t``; ``U`` holds the moving basis
    as columns.
    """

    t: float
    U: np.ndarray
    h: np.ndarray = field(repr=False)
    unitarity_defect: float
    horizontal_residual: float


def make_state(t, U, path: GeneratorPath) -> TransportState:
    h = horizontal_project(path(t), U)
    return TransportState(
        t=t,
        U=U,
        h=h,
        unitarity_defect=unitarity_defect(U),
        horizontal_residual=float(np.max(np.abs(moving_diagonal(h, U)))),
    )


def step(state: TransportState, path: GeneratorPath, cfg: IntegratorConfig,
         t_next=None) -> TransportState:
    """Advance one exponential-midpoint step of length ``cfg.dt``.

    The midpoint generator is found by fixed-point iteration, starting from
    the generator at the current state.
    """
    if t_next is None:
        t_next = state.t + cfg.dt
    dt = t_next - state.t
    if t_next > path.T + 1e-12 * max(1.0, path.T):
        raise TransportError(state.t, f"step beyond T={path.T!r}")
    t_mid = state.t + 0.5 * dt
    try:
        H_mid = path(t_mid)
        h_mid = state.h
        for _ in range(cfg.corrector_iterations):
            U_mid = unitary_exp(h_mid, 0.5 * dt) @ state.U
            h_mid = horizontal_project(H_mid, U_mid)
        U_next = unitary_exp(h_mid, dt) @ state.U
        if not np.all(np.isfinite(U_next)):
            raise FloatingPointError("non-finite matrix exponential")
        return make_state(t_next, U_next, path)
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise TransportError(state.t, str(exc)) from exc


def evolve(U0, path: GeneratorPath, cfg: IntegratorConfig) -> list[TransportState]:
    """States at ``t = 0, dt, ..., T`` starting from ``U0``."""
    U0 = np.array(U0, dtype=complex)
    if unitarity_defect(U0) > 1e-12:
        raise NonUnitaryError(f"U0 is not unitary (defect {unitarity_defect(U0):.3e})")
    steps = cfg.n_steps(path.T)
    try:
        states = [make_state(0.0, U0, path)]
    except ValueError as exc:
        raise TransportError(0.0, str(exc)) from exc
    for k in range(1, steps + 1):
        # grid times as k*dt, not accumulated sums; last point pinned to T
        t_next = path.T if k == steps else k * cfg.dt
        states.append(step(states[-1], path, cfg, t_next=t_next))
    return states
