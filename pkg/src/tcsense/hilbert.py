"""Finite-dimensional operator algebra: truncated Fock space, collective-spin space,
tensor products, Hermitian eigendecomposition and matrix exponentials.

Everything here is dense numpy. Joint spaces are capped at MAX_TENSOR_DIM to keep
dense matrices at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
# full unitarity verification is O(dim^3); above this dimension fall back to
# a fixed-seed random-vector probe
UNITARY_FULL_CHECK_DIM = 512
MAX_TENSOR_DIM = 8192


class DimensionOverflowError(ValueError):
    """Product space would exceed the configured dense-matrix limit."""


@dataclass(frozen=True)
class FockSpace:
    """Bosonic mode truncated at Fock index `cutoff` (dimension cutoff + 1)."""

    cutoff: int

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError(f"Fock cutoff must be >= 1, got {self.cutoff}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1


@dataclass(frozen=True)
class DickeSpace:
    """Symmetric collective-spin space of N two-level atoms, j = N/2.

    Basis ordering is |j, m> with m = j, j-1, ..., -j, so index p maps to
    m = j - p.  This convention is fixed repo-wide.
    """

    n_atoms: int

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError(f"atom count must be >= 1, got {self.n_atoms}")

    @property
    def j(self) -> float:
        return self.n_atoms / 2.0

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    def m_values(self) -> np.ndarray:
        return self.j - np.arange(self.dim)


@dataclass(frozen=True)
class ProductSpace:
    """Tensor product fock (x) dicke with the Fock index slow (outer)."""

    fock: FockSpace
    dicke: DickeSpace

    @property
    def dim(self) -> int:
        return self.fock.dim * self.dicke.dim


Space = FockSpace | DickeSpace | ProductSpace


@dataclass
class OperatorMatrix:
    """Dense operator on a declared space with Hermiticity/unitarity metadata.

    Declared flags are verified at construction: hermitian to HERMITIAN_TOL
    always, unitary to UNITARY_TOL (full check up to UNITARY_FULL_CHECK_DIM,
    fixed-seed vector probe above; `verify_unitary()` runs the full check on
    demand).
    """

    space: Space
    elements: np.ndarray
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        m = np.asarray(self.elements)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if m.shape[0] != self.space.dim:
            raise ValueError(
                f"operator dimension {m.shape[0]} does not match space dimension {self.space.dim}"
            )
        self.elements = m
        if self.hermitian:
            dev = float(np.max(np.abs(m - m.conj().T)))
            if dev > HERMITIAN_TOL:
                raise ValueError(f"declared hermitian but max |M - M^dag| = {dev:.3e}")
        if self.unitary:
            if m.shape[0] <= UNITARY_FULL_CHECK_DIM:
                dev = self.unitarity_defect()
            else:
                rng = np.random.default_rng(0)
                x = rng.standard_normal(m.shape[0]) + 1j * rng.standard_normal(m.shape[0])
                x /= np.linalg.norm(x)
                dev = float(np.max(np.abs(m.conj().T @ (m @ x) - x)))
            if dev > UNITARY_TOL:
                raise ValueError(f"declared unitary but unitarity defect = {dev:.3e}")

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def unitarity_defect(self) -> float:
        m = self.elements
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.elements.conj().T,
                              hermitian=self.hermitian, unitary=self.unitary)


def identity(space: Space) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.dim, dtype=complex), hermitian=True, unitary=True)


def fock_operators(space: FockSpace) -> dict[str, OperatorMatrix]:
    """Annihilation, creation and number operators on the truncated space.

    a|n> = sqrt(n)|n-1>; the row of a^dag that would populate |cutoff+1> is
    zeroed by truncation, so [a, a^dag] = I only below the top level.
    """
    nc = space.cutoff
    a = np.zeros((nc + 1, nc + 1), dtype=complex)
    n = np.arange(1, nc + 1)
    a[n - 1, n] = np.sqrt(n)
    number = np.diag(np.arange(nc + 1).astype(complex))
    return {
        "a": OperatorMatrix(space, a),
        "a_dagger": OperatorMatrix(space, a.conj().T),
        "number": OperatorMatrix(space, number, hermitian=True),
    }


def spin_operators(space: DickeSpace) -> dict[str, OperatorMatrix]:
    """Collective spin matrices for j = N/2 in the |j, m>, m descending basis."""
    j = space.j
    m = space.m_values()
    jz = np.diag(m.astype(complex))
    # J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>; m+1 sits one index above (p-1)
    jp = np.zeros((space.dim, space.dim), dtype=complex)
    lower_m = m[1:]  # states that can be raised
    jp[np.arange(space.dim - 1), np.arange(1, space.dim)] = np.sqrt(
        j * (j + 1) - lower_m * (lower_m + 1)
    )
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = -0.5j * (jp - jm)
    return {
        "jx": OperatorMatrix(space, jx, hermitian=True),
        "jy": OperatorMatrix(space, jy, hermitian=True),
        "jz": OperatorMatrix(space, jz, hermitian=True),
        "jp": OperatorMatrix(space, jp),
        "jm": OperatorMatrix(space, jm),
    }


def tensor(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product with the first factor as the slow (outer) index.

    The repo-wide convention is fock (x) dicke, i.e. `a` lives on the Fock
    space and `b` on the Dicke space; any square factors are accepted.
    """
    if not isinstance(a.space, FockSpace) or not isinstance(b.space, DickeSpace):
        # still allow generic products, but the canonical joint space needs
        # fock-slow ordering
        raise ValueError("tensor expects (Fock-space op, Dicke-space op) in that order")
    dim = a.dim * b.dim
    if dim > MAX_TENSOR_DIM:
        raise DimensionOverflowError(
            f"product dimension {dim} exceeds MAX_TENSOR_DIM = {MAX_TENSOR_DIM}"
        )
    return OperatorMatrix(
        ProductSpace(a.space, b.space),
        np.kron(a.elements, b.elements),
        hermitian=a.hermitian and b.hermitian,
        unitary=a.unitary and b.unitary,
    )


def eigh(op: OperatorMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a declared-Hermitian operator.

    Returns (eigenvalues ascending, orthonormal eigenvector columns).
    """
    if not op.hermitian:
        raise ValueError("eigh requires an operator with the hermitian flag set")
    w, v = np.linalg.eigh(op.elements)
    return w, v


def expm_i(op: OperatorMatrix, t: float) -> OperatorMatrix:
    """exp(-i H t) for Hermitian H, via eigendecomposition (exactly unitary)."""
    w, v = eigh(op)
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    return OperatorMatrix(op.space, u, unitary=True)


def apply_expm_i(op: OperatorMatrix, t: float, vecs: np.ndarray) -> np.ndarray:
    """exp(-i H t) applied to one vector or a column stack, without forming
    the full exponential."""
    w, v = eigh(op)
    cols = vecs if vecs.ndim == 2 else vecs[:, None]
    out = v @ (np.exp(-1j * w * t)[:, None] * (v.conj().T @ cols))
    return out if vecs.ndim == 2 else out[:, 0]
