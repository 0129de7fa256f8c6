"""Generalized Gell-Mann bases of su(n), structure constants and Cartan pairs.

Generators are stored as a read-only ``(d, n, n)`` complex array with
``d = n**2 - 1`` and trace normalization ``Tr(l_a l_b) = 2 delta_ab``.
Indices are zero-based throughout the Python API.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

NORM_FACTOR = 2.0
BASIS_TOL = 1e-12
DIAGONAL_FLOOR = 1e-14

# Generic construction order -> conventional ordering, keyed by n.
# n=3 generic: s01 a01 s02 a02 s12 a12 d1 d2; Gell-Mann: l1..l8.
_ORDER_TABLE = {3: (0, 1, 6, 2, 3, 4, 5, 7)}


def _frozen(arr):
    arr = np.array(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GeneratorBasis:
    """Ordered hermitian traceless basis of su(n).

    Attributes
    ----------
    n : int
        Matrix dimension.
    generators : ndarray, shape (d, n, n)
        The generators ``l_a``; read-only.
    norm_factor : float
        ``N`` in ``Tr(l_a l_b) = N delta_ab``.
    cartan_indices : tuple of int
        Positions of the diagonal generators.
    """

    n: int
    generators: np.ndarray
    norm_factor: float
    cartan_indices: tuple

    @property
    def d(self) -> int:
        return len(self.generators)

    def __len__(self):
        return self.d

    def __getitem__(self, a):
        return self.generators[a]

    def is_cartan(self, a: int) -> bool:
        return a in self.cartan_indices

    def check_dims(self, M, name="matrix"):
        M = np.asarray(M)
        if M.shape != (self.n, self.n):
            raise ValueError(
                f"{name} has shape {M.shape}, basis needs ({self.n}, {self.n})"
            )
        return M

    def validate(self, tol: float = BASIS_TOL) -> None:
        """Raise ``ValueError`` if any basis invariant is violated."""
        g = self.generators
        if len(g) != self.n**2 - 1:
            raise ValueError(f"expected {self.n**2 - 1} generators, got {len(g)}")
        if np.max(np.abs(g - g.conj().transpose(0, 2, 1))) > tol:
            raise ValueError("generators are not hermitian")
        if np.max(np.abs(np.trace(g, axis1=1, axis2=2))) > tol:
            raise ValueError("generators are not traceless")
        gram = np.einsum("aij,bji->ab", g, g)
        if np.max(np.abs(gram - self.norm_factor * np.eye(len(g)))) > tol:
            raise ValueError("generators are not trace-orthonormal")
        off = ~np.eye(self.n, dtype=bool)
        for a in range(len(g)):
            offmax = np.max(np.abs(g[a][off]))
            if a in self.cartan_indices and offmax > DIAGONAL_FLOOR:
                raise ValueError(f"Cartan generator {a} is not diagonal")
            if a not in self.cartan_indices and offmax == 0.0:
                raise ValueError(f"non-Cartan generator {a} is diagonal")
        for i, j in combinations(self.cartan_indices, 2):
            if np.max(np.abs(commutator(g[i], g[j]))) > tol:
                raise ValueError(f"Cartan generators {i}, {j} do not commute")


@dataclass(frozen=True)
class AlgebraElement:
    """Hermitian matrix with its coefficients in a generator basis."""

    matrix: np.ndarray
    coeffs: np.ndarray
    trace_part: float


@dataclass(frozen=True)
class StructureConstants:
    """Real tensor ``f`` with ``[l_a, l_b] = i sum_c f[a, b, c] l_c``."""

    f: np.ndarray

    def commutator(self, basis: GeneratorBasis, a: int, b: int) -> np.ndarray:
        """Rebuild ``[l_a, l_b]`` from the tabulated constants."""
        return 1j * np.einsum("c,cij->ij", self.f[a, b], basis.generators)


@dataclass(frozen=True)
class CartanPair:
    """Pair with diagonal commutator; ``trivial`` when the generators commute."""

    a: int
    b: int
    trivial: bool

    @property
    def pair(self):
        return (self.a, self.b)


def commutator(A, B):
    return A @ B - B @ A


def _generic_generators(n):
    gens = []
    for i, j in combinations(range(n), 2):
        sym = np.zeros((n, n), dtype=complex)
        sym[i, j] = sym[j, i] = 1.0
        anti = np.zeros((n, n), dtype=complex)
        anti[i, j] = -1j
        anti[j, i] = 1j
        gens += [sym, anti]
    for k in range(1, n):
        diag = np.zeros(n)
        diag[:k] = 1.0
        diag[k] = -k
        gens.append(np.diag(np.sqrt(2.0 / (k * (k + 1))) * diag).astype(complex))
    return gens


def build_basis(n: int) -> GeneratorBasis:
    """Generalized Gell-Mann basis of su(n) with ``N = 2``.

    Off-diagonal generators come first, a real-symmetric and an
    imaginary-antisymmetric one for every ``i < j`` in lexicographic order,
    followed by the ``n - 1`` diagonal generators.  For ``n = 2`` this gives
    ``(sigma_x, sigma_y, sigma_z)``; for ``n = 3`` the result is reordered to
    the standard Gell-Mann ``l1 .. l8``.

    >>> b = build_basis(3)
    >>> b.d, b.cartan_indices
    (8, (2, 7))
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"n must be an integer, got {type(n).__name__}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    n = int(n)
    gens = _generic_generators(n)
    n_off = n * (n - 1)
    cartan = list(range(n_off, n_off + n - 1))
    order = _ORDER_TABLE.get(n)
    if order is not None:
        gens = [gens[k] for k in order]
        cartan = sorted(order.index(c) for c in cartan)
    basis = GeneratorBasis(
        n=n,
        generators=_frozen(gens),
        norm_factor=NORM_FACTOR,
        cartan_indices=tuple(cartan),
    )
    basis.validate()
    return basis


def expand(basis: GeneratorBasis, M, tol: float = BASIS_TOL) -> AlgebraElement:
    """Expand a hermitian matrix as ``M = sum_j c_j l_j + (Tr M / n) I``.

    The coefficients are ``c_j = Tr(M l_j) / N``.  ``trace_part`` is
    ``Tr(M) / n`` and vanishes for elements of the algebra.
    """
    M = np.asarray(basis.check_dims(M, "M"), dtype=complex)
    scale = 1.0 + np.max(np.abs(M))
    if np.max(np.abs(M - M.conj().T)) > tol * scale:
        raise ValueError("M is not hermitian")
    c = np.einsum("ij,aji->a", M, basis.generators) / basis.norm_factor
    if np.max(np.abs(c.imag), initial=0.0) > tol * scale:
        raise ValueError("expansion coefficients are not real")
    trace_part = np.trace(M).real / basis.n
    return AlgebraElement(matrix=_frozen(M), coeffs=_frozen(c.real), trace_part=trace_part)


def structure_constants(basis: GeneratorBasis) -> StructureConstants:
    g = basis.generators
    d = basis.d
    f = np.zeros((d, d, d))
    for a, b in combinations(range(d), 2):
        comm = commutator(g[a], g[b])
        fc = np.einsum("ij,cji->c", comm, g) / (1j * basis.norm_factor)
        if np.max(np.abs(fc.imag)) > BASIS_TOL:
            raise ValueError(f"structure constants for ({a}, {b}) are not real")
        f[a, b] = fc.real
        f[b, a] = -fc.real
    return StructureConstants(f=_frozen(f))


def is_diagonal(basis: GeneratorBasis, M, tol: float = 1e-10) -> bool:
    """True when every off-diagonal entry is below ``tol * (1 + max|M|)``."""
    M = basis.check_dims(M, "M")
    off = np.abs(M[~np.eye(basis.n, dtype=bool)])
    bound = max(tol * (1.0 + np.max(np.abs(M))), DIAGONAL_FLOOR)
    return bool(np.max(off, initial=0.0) <= bound)


def cartan_pairs(basis: GeneratorBasis, tol: float = 1e-10) -> list[CartanPair]:
    """All pairs ``a < b`` whose commutator ``[l_a, l_b]`` is diagonal.

    Pairs whose commutator vanishes are flagged ``trivial``.  These are all
    Cartan-Cartan pairs but also pairs such as ``(l1, l8)`` in su(3).
    """
    g = basis.generators
    out = []
    for a, b in combinations(range(basis.d), 2):
        comm = commutator(g[a], g[b])
        if is_diagonal(basis, comm, tol):
            trivial = bool(np.max(np.abs(comm)) <= tol)
            out.append(CartanPair(a, b, trivial))
    return out


def non_cartan_pairs(basis: GeneratorBasis, tol: float = 1e-10) -> list[tuple]:
    """Complement of :func:`cartan_pairs` among all pairs ``a < b``."""
    found = {p.pair for p in cartan_pairs(basis, tol)}
    return [p for p in combinations(range(basis.d), 2) if p not in found]
