"""Hamiltonians of the coupled cavity-ensemble system and their validation.

Three model levels: the full resonant-exchange Hamiltonian, the dispersive
effective Hamiltonian that keeps the collective J+J- shift, and the reduced
effective Hamiltonian with only the density-density coupling.  Both effective
Hamiltonians are diagonal in the product number basis, so their propagators
are pure phases; the full model is propagated exactly block-by-block over the
conserved total-excitation sectors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .hilbert import (
    DickeSpace,
    FockSpace,
    OperatorMatrix,
    ProductSpace,
    fock_operators,
    spin_operators,
    tensor,
)

TWO_PI = 2 * np.pi


class ZeroDetuningError(ValueError):
    """Effective models require a nonzero detuning."""


@dataclass(frozen=True)
class SystemParams:
    """Physical constants in angular units (rad/s) plus the evolution time (s).

    omega0: bare spin transition; omega_a: cavity frequency; g: coupling
    (half the single-photon Rabi frequency); h: the weak field under
    estimation, entering both the spin splitting and the detuning.
    """

    omega0: float
    omega_a: float
    g: float
    h: float
    t: float

    @classmethod
    def from_frequencies(cls, omega0_hz, omega_a_hz, g_hz, h_hz, t_s) -> "SystemParams":
        """Build from plain-Hz inputs; the 2*pi conversion happens exactly once here."""
        return cls(
            omega0=TWO_PI * omega0_hz,
            omega_a=TWO_PI * omega_a_hz,
            g=TWO_PI * g_hz,
            h=TWO_PI * h_hz,
            t=t_s,
        )

    def omega(self) -> float:
        return self.omega0 + self.h

    def delta(self) -> float:
        return self.omega0 - self.omega_a + self.h

    def large_detuning_ratio(self, n_atoms: int) -> float:
        return abs(self.delta()) / (self.g * np.sqrt(n_atoms))

    def coupling_shift(self) -> float:
        """The dimensionless per-photon dispersive pull 2 g^2 / delta^2."""
        return 2 * self.g**2 / self.delta() ** 2

    def with_h(self, h: float) -> "SystemParams":
        return replace(self, h=h)


class ModelKind(Enum):
    FULL_TC = "full"
    EFFECTIVE_S = "effective_s"  # keeps the J+J- collective shift
    EFFECTIVE = "effective"


def _require_detuned(params: SystemParams):
    if params.delta() == 0.0:
        raise ZeroDetuningError("zero detuning: effective model undefined at delta = 0")


def hamiltonian(
    kind: ModelKind, params: SystemParams, fock: FockSpace, dicke: DickeSpace
) -> OperatorMatrix:
    """Hermitian Hamiltonian on the joint fock (x) dicke space."""
    f_ops = fock_operators(fock)
    s_ops = spin_operators(dicke)
    ident_f = OperatorMatrix(fock, np.eye(fock.dim, dtype=complex), hermitian=True, unitary=True)
    ident_s = OperatorMatrix(dicke, np.eye(dicke.dim, dtype=complex), hermitian=True, unitary=True)
    n_jz = tensor(f_ops["number"], s_ops["jz"]).elements
    jz = tensor(ident_f, s_ops["jz"]).elements
    num = tensor(f_ops["number"], ident_s).elements
    if kind is ModelKind.FULL_TC:
        coupling = (
            tensor(f_ops["a_dagger"], s_ops["jm"]).elements
            + tensor(f_ops["a"], s_ops["jp"]).elements
        )
        m = (params.h + params.omega0) * jz + params.omega_a * num + params.g * coupling
    elif kind in (ModelKind.EFFECTIVE_S, ModelKind.EFFECTIVE):
        _require_detuned(params)
        chi = params.g**2 / params.delta()
        m = params.omega() * jz + params.omega_a * num + 2 * chi * n_jz
        if kind is ModelKind.EFFECTIVE_S:
            jpjm = s_ops["jp"].elements @ s_ops["jm"].elements
            m = m + chi * tensor(ident_f, OperatorMatrix(dicke, jpjm, hermitian=True)).elements
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    return OperatorMatrix(ProductSpace(fock, dicke), m, hermitian=True)


def generator(params: SystemParams, fock: FockSpace, dicke: DickeSpace) -> OperatorMatrix:
    """Sensing generator (2 g^2 a^dag a / delta^2 - 1) t Jz, diagonal in the
    product basis."""
    _require_detuned(params)
    diag = generator_diagonal(params, fock, dicke)
    return OperatorMatrix(
        ProductSpace(fock, dicke), np.diag(diag.astype(complex)), hermitian=True
    )


def generator_diagonal(params: SystemParams, fock: FockSpace, dicke: DickeSpace) -> np.ndarray:
    _require_detuned(params)
    n = np.arange(fock.dim, dtype=float)
    m = dicke.m_values()
    c = params.coupling_shift()
    return ((c * n - 1.0)[:, None] * (params.t * m)[None, :]).ravel()


def effective_diagonal(
    kind: ModelKind, params: SystemParams, fock: FockSpace, dicke: DickeSpace
) -> np.ndarray:
    """Diagonal of the (diagonal) effective Hamiltonians in the product basis."""
    if kind is ModelKind.FULL_TC:
        raise ValueError("the full model is not diagonal; use excitation_blocks")
    _require_detuned(params)
    n = np.arange(fock.dim, dtype=float)
    j = dicke.j
    m = dicke.m_values()
    chi = params.g**2 / params.delta()
    diag = (
        params.omega() * m[None, :]
        + params.omega_a * n[:, None]
        + 2 * chi * n[:, None] * m[None, :]
    )
    if kind is ModelKind.EFFECTIVE_S:
        diag = diag + chi * (j * (j + 1) - m * (m - 1))[None, :]
    return diag.ravel()


def excitation_blocks(
    params: SystemParams, fock: FockSpace, dicke: DickeSpace
) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """Decompose the full model into conserved total-excitation sectors.

    Sector label k counts n + m + N/2 = n + N - p.  Returns, per sector,
    (k, block matrix, flat joint-space indices with Fock slow) covering the
    whole truncated space.
    """
    n_atoms = dicke.n_atoms
    j = dicke.j
    blocks = []
    for k in range(0, fock.cutoff + n_atoms + 1):
        entries = []
        for p in range(n_atoms + 1):
            n = k - n_atoms + p
            if 0 <= n <= fock.cutoff:
                entries.append((n, p))
        if not entries:
            continue
        dim = len(entries)
        mat = np.zeros((dim, dim), dtype=complex)
        for i, (n, p) in enumerate(entries):
            m = j - p
            mat[i, i] = (params.h + params.omega0) * m + params.omega_a * n
            # a^dag J- couples (n, p) -> (n+1, p+1)
            if i + 1 < dim and entries[i + 1] == (n + 1, p + 1):
                amp = params.g * np.sqrt(n + 1) * np.sqrt(j * (j + 1) - m * (m - 1))
                mat[i + 1, i] = amp
                mat[i, i + 1] = amp
        idx = np.array([n * (n_atoms + 1) + p for n, p in entries])
        blocks.append((k, mat, idx))
    return blocks


def propagate_full(
    params: SystemParams,
    fock: FockSpace,
    dicke: DickeSpace,
    psi0: np.ndarray,
    t_grid: np.ndarray,
) -> np.ndarray:
    """Exact evolution under the full model via per-sector eigendecomposition.

    Returns a (len(t_grid), dim) array of states.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.zeros((len(t_grid), psi0.size), dtype=complex)
    for _, mat, idx in excitation_blocks(params, fock, dicke):
        w, v = np.linalg.eigh(mat)
        coeff = v.conj().T @ psi0[idx]
        phases = np.exp(-1j * np.outer(t_grid, w))
        out[:, idx] = (phases * coeff[None, :]) @ v.T
    return out


def propagate_diagonal(diag: np.ndarray, psi0: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float)
    return np.exp(-1j * np.outer(t_grid, diag)) * psi0[None, :]


def validate_effective(
    params: SystemParams,
    initial: np.ndarray,
    fock: FockSpace,
    dicke: DickeSpace,
    t_grid: np.ndarray,
) -> dict[str, np.ndarray]:
    """Fidelity |<psi_full(t)|psi_eff(t)>|^2 for both effective models."""
    nrm = np.linalg.norm(initial)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"initial state norm {nrm} != 1")
    full = propagate_full(params, fock, dicke, initial, t_grid)
    out = {"t": np.asarray(t_grid, dtype=float)}
    for kind, key in ((ModelKind.EFFECTIVE_S, "effective_s"), (ModelKind.EFFECTIVE, "effective")):
        diag = effective_diagonal(kind, params, fock, dicke)
        eff = propagate_diagonal(diag, initial, t_grid)
        overlap = np.sum(full.conj() * eff, axis=1)
        out[key] = np.abs(overlap) ** 2
    return out
