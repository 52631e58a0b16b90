"""Quantum Fisher information for weak-field estimation.

Two independent routes are kept side by side on purpose:

* `qfi_spectral` — brute-force evaluation of the spectral QFI formula on the
  truncated joint space, from explicit eigenpairs and a generator matrix.
* `qfi_dsts_closed_form` and the scenario formulas — the analytic results,
  built from closed-form photon and spin moments only.

The scenario helpers also report the asymptotic/bound expressions used for
scaling analysis and reference lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import OperatorMatrix
from .model import SystemParams, ZeroDetuningError
from .states import (
    GaussianSpec,
    MixedStateEigen,
    SpinCoherent,
    SpinStateSpec,
    optical_moments,
    spin_moments,
)

SUPPORT_NORM_ALLOWANCE = 1e-6


@dataclass
class QfiReport:
    """A QFI value (units s^2, i.e. 1/h^2 for h in rad/s) with provenance.

    `notes` carries secondary reported quantities (asymptotes, bounds) keyed
    by name; `inputs` echoes the defining parameters.
    """

    value: float
    method: str
    inputs: dict = field(default_factory=dict)
    cutoff_used: int | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < -1e-9 * max(1.0, abs(self.value)):
            raise ValueError(f"QFI must be non-negative, got {self.value}")
        self.value = max(self.value, 0.0)

    def delta_h_bound(self) -> float:
        """Cramer-Rao precision bound 1/sqrt(F) for a single measurement."""
        return float(self.value) ** -0.5 if self.value > 0 else np.inf


def qfi_spectral(
    optical: MixedStateEigen,
    spin_vec: np.ndarray,
    gen: OperatorMatrix,
    support_tol: float = 1e-12,
) -> QfiReport:
    """Spectral QFI on the truncated joint space.

    F = sum_i 4 p_i <Psi_i|G^2|Psi_i> - sum_ij 8 p_i p_j/(p_i+p_j)
    |<Psi_i|G|Psi_j>|^2 with Psi_i = v_i (x) spin and sums over the support.
    The G^2 term is evaluated as |G Psi_i|^2, so transitions out of the
    support are included exactly as the formula requires.
    """
    p = np.asarray(optical.weights, dtype=float)
    keep = p > support_tol
    p = p[keep]
    total = float(np.sum(p))
    if not (1 - SUPPORT_NORM_ALLOWANCE <= total <= 1 + 1e-9):
        raise ValueError(
            f"support weights sum to {total}, outside the truncation allowance"
        )
    vecs = optical.vectors[:, keep]
    spin_vec = np.asarray(spin_vec, dtype=complex)
    d_f, k = vecs.shape
    d_s = spin_vec.size
    if gen.dim != d_f * d_s:
        raise ValueError(
            f"generator dimension {gen.dim} != joint dimension {d_f * d_s}"
        )
    if not gen.hermitian:
        raise ValueError("generator must be declared Hermitian")
    # joint support vectors, Fock slow
    joint = (vecs[:, None, :] * spin_vec[None, :, None]).reshape(d_f * d_s, k)
    gv = gen.elements @ joint
    h2 = np.real(np.sum(gv.conj() * gv, axis=0))  # <Psi_i|G^2|Psi_i>
    g_ij = joint.conj().T @ gv
    denom = p[:, None] + p[None, :]
    coupling = 8 * np.outer(p, p) / denom
    f = float(4 * np.dot(p, h2) - np.sum(coupling * np.abs(g_ij) ** 2))
    return QfiReport(
        value=f,
        method="spectral_oracle",
        inputs={"support_size": int(k), "support_tol": support_tol},
        cutoff_used=optical.space.cutoff,
    )


def _prefactors(params: SystemParams) -> tuple[float, float]:
    delta = params.delta()
    if delta == 0.0:
        raise ZeroDetuningError("zero detuning: QFI closed forms undefined at delta = 0")
    c = 2 * params.g**2 / delta**2
    return c, c * c  # c and 4 g^4 / delta^4


def qfi_dsts_closed_form(
    gauss: GaussianSpec,
    spin: SpinStateSpec,
    n_atoms: int,
    params: SystemParams,
) -> QfiReport:
    """Analytic QFI for a DSTS optical probe and a product spin probe.

    F = 4 t^2 { (1 - c nbar)^2 Var(Jz) + c^2 Var(n) <Jz^2>
    - c^2 n_th (n_th + 1) <Jz>^2 [ (cosh 4r (2 n_th + 1)^2 + 1)
    / (4 n_th (n_th + 1) + 2) + 4 |alpha|^2 / (2 n_th + 1)
    * (1 + 2 sinh^2 r - sinh 2r cos(2 zeta - theta)) ] },  c = 2 g^2 / delta^2.
    """
    c, c2 = _prefactors(params)
    t = params.t
    om = optical_moments(gauss)
    sm = spin_moments(spin, n_atoms)
    nth = gauss.n_th
    a2 = gauss.alpha_mag**2
    bracket = (np.cosh(4 * gauss.r) * (2 * nth + 1) ** 2 + 1) / (4 * nth * (nth + 1) + 2)
    bracket += (
        4 * a2 / (2 * nth + 1)
        * (1 + 2 * np.sinh(gauss.r) ** 2 - np.sinh(2 * gauss.r) * np.cos(2 * gauss.zeta - gauss.theta_sq))
    )
    f = 4 * t**2 * (
        (1 - c * om["n_bar"]) ** 2 * sm["var_jz"]
        + c2 * om["var_n"] * sm["jz2_mean"]
        - c2 * nth * (nth + 1) * sm["jz_mean"] ** 2 * bracket
    )
    return QfiReport(
        value=f,
        method="dsts_closed_form",
        inputs={"gauss": gauss, "spin": spin, "n_atoms": n_atoms, "params": params},
    )


def qfi_cs(theta: float, n_bar: float, n_atoms: int, params: SystemParams) -> QfiReport:
    """Coherent light with a spin-coherent probe.

    F = 4 t^2 [ (1 - c nbar)^2 (N/4) sin^2(theta)
    + (g^4/delta^4) nbar N (sin^2(theta) + N cos^2(theta)) ];
    notes carry the large-nbar asymptote (4 g^4/delta^4) t^2 N nbar^2 sin^2.
    """
    if n_bar < 0:
        raise ValueError("n_bar must be >= 0")
    c, c2 = _prefactors(params)
    t, n = params.t, n_atoms
    s2, co2 = np.sin(theta) ** 2, np.cos(theta) ** 2
    f = 4 * t**2 * (
        (1 - c * n_bar) ** 2 * 0.25 * n * s2 + 0.25 * c2 * n_bar * n * (s2 + n * co2)
    )
    asym = c2 * t**2 * n * n_bar**2 * s2
    return QfiReport(
        value=f,
        method="cs_closed_form",
        inputs={"theta": theta, "n_bar": n_bar, "n_atoms": n, "params": params},
        notes={"asymptote": float(asym)},
    )


def qfi_svs(r: float, n_atoms: int, params: SystemParams) -> QfiReport:
    """Squeezed vacuum with the polar (theta = 0) spin-coherent probe.

    F = 2 (g^4/delta^4) t^2 N^2 sinh^2(2r); the reported bound is
    8 (g^4/delta^4) t^2 N^2 nbar^2 with nbar = sinh^2 r.
    """
    if r < 0:
        raise ValueError("squeezing amplitude r must be >= 0")
    _, c2 = _prefactors(params)
    t, n = params.t, n_atoms
    f = 0.5 * c2 * t**2 * n**2 * np.sinh(2 * r) ** 2
    n_bar = np.sinh(r) ** 2
    bound = 2 * c2 * t**2 * n**2 * n_bar**2
    return QfiReport(
        value=f,
        method="svs_closed_form",
        inputs={"r": r, "n_atoms": n, "params": params},
        notes={"double_hs_bound": float(bound), "n_bar": float(n_bar)},
    )


def dsvs_var_bounds(beta: float, tau: float, n_bar: float) -> dict[str, float]:
    """Photon-variance lower bounds for displaced squeezed vacuum.

    var_plus applies (strictly) for tau >= 0, var_minus for tau < 0;
    `asymptotic` is the large-beta scaling 2 beta^2 nbar^2 / (1+beta)^2.
    """
    if beta < 0 or not -1.0 <= tau <= 1.0 or n_bar <= 0:
        raise ValueError("need beta >= 0, tau in [-1, 1], n_bar > 0")
    lead = n_bar / (1 + beta)
    core = (2 * beta * n_bar / (1 + beta)) * (beta + 1 - tau)
    return {
        "var_plus": float(lead * (core + 1 - tau)),
        "var_minus": float(lead * (core + 1)),
        "asymptotic": float(2 * beta**2 * n_bar**2 / (1 + beta) ** 2),
    }


def qfi_dsvs(gauss: GaussianSpec, n_atoms: int, params: SystemParams) -> QfiReport:
    """Displaced squeezed vacuum with theta = 0 spin probe: F = 4 (g^4/delta^4)
    t^2 N^2 Var(a^dag a)."""
    if gauss.n_th != 0:
        raise ValueError("qfi_dsvs requires n_th = 0")
    _, c2 = _prefactors(params)
    t, n = params.t, n_atoms
    om = optical_moments(gauss)
    f = c2 * t**2 * n**2 * om["var_n"]
    notes = {}
    if gauss.alpha_mag > 0:
        beta = gauss.beta()
        notes["double_hs_bound"] = float(
            2 * c2 * (beta**2 / (1 + beta) ** 2) * t**2 * n**2 * om["n_bar"] ** 2
        )
        notes["beta"] = float(beta)
    return QfiReport(
        value=f,
        method="dsvs_closed_form",
        inputs={"gauss": gauss, "n_atoms": n, "params": params},
        notes=notes,
    )


def dsvs_qfi_derivative(
    sinh2r: float, tau: float, n_bar: float, n_atoms: int, params: SystemParams
) -> float:
    """Analytic d F / d sinh^2(r) at fixed nbar for the theta = 0 DSVS probe.

    F = A Var(s) with A = 4 (g^4/delta^4) t^2 N^2 and, writing s = sinh^2 r,
    Var(s) = 2 s (s+1) + (nbar - s) (1 + 2s - 2 tau sqrt(s(s+1))).
    """
    if not 0 < sinh2r < n_bar:
        raise ValueError("need 0 < sinh2r < n_bar")
    _, c2 = _prefactors(params)
    a = c2 * params.t**2 * n_atoms**2
    s = sinh2r
    e = np.sqrt(s * (s + 1))
    dvar = (2 * s + 1) + 2 * tau * e + (n_bar - s) * (2 - tau * (2 * s + 1) / e)
    return float(a * dvar)


def qfi_oat_cs(chi: float, n_atoms: int, n_bar: float, params: SystemParams) -> QfiReport:
    """Coherent light with a one-axis-twisted spin probe.

    F = 4 t^2 [ (1 - c nbar)^2 Var(Jz) + c^2 nbar <Jz^2> ] with twisted-state
    moments; notes report the double-HS reference c^2 t^2 N^2 nbar^2
    (approached at chi = pi, even N, c nbar >> 1).
    """
    from .states import OneAxisTwisted

    c, c2 = _prefactors(params)
    t, n = params.t, n_atoms
    sm = spin_moments(OneAxisTwisted(chi=chi), n)
    f = 4 * t**2 * ((1 - c * n_bar) ** 2 * sm["var_jz"] + c2 * n_bar * sm["jz2_mean"])
    bound = c2 * t**2 * n**2 * n_bar**2
    return QfiReport(
        value=f,
        method="oat_cs_closed_form",
        inputs={"chi": chi, "n_atoms": n, "n_bar": n_bar, "params": params},
        notes={"double_hs_bound": float(bound)},
    )


def reference_lines(n_bar: float, n_atoms: int, params: SystemParams) -> dict[str, float]:
    """SQL and HL reference lines, normalized to the coherent-probe asymptote
    prefactor 4 g^4 t^2 N / delta^4 and anchored to coincide at nbar = 1."""
    _, c2 = _prefactors(params)
    base = c2 * params.t**2 * n_atoms
    return {"sql": float(base * n_bar), "hl": float(base * n_bar**2)}
