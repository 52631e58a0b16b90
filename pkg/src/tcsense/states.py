"""Optical and collective-spin probe states.

Optical side: displaced squeezed thermal states D(alpha) S(xi) rho_th S^dag D^dag,
their exact eigenstructure on a truncated Fock space, and closed-form photon
moments.  Spin side: spin-coherent and one-axis-twisted states with closed-form
Jz moments.

Operators D and S are built as matrix exponentials via eigendecomposition, so
they are exactly unitary on the truncated space; truncation error shows up as
amplitude piling against the top Fock levels, which `dsts_eigen` measures and
rejects.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .hilbert import DickeSpace, FockSpace, OperatorMatrix, eigh as _eigh, expm_i, fock_operators, spin_operators

SUPPORT_TOL_DEFAULT = 1e-12
# per-vector truncation budgets enforced by dsts_eigen: mass in the guard band
# near the cutoff, absolute and weighted by the thermal probability
EDGE_TAIL_TOL = 1e-6
WEIGHTED_EDGE_TAIL_TOL = 1e-12
MAX_AUTO_CUTOFF = 6500


class TruncationError(ValueError):
    """Fock cutoff too small for the requested state."""


@dataclass(frozen=True)
class GaussianSpec:
    """Single-mode Gaussian state parameters (|alpha|, zeta, r, theta_sq, n_th).

    alpha = |alpha| e^{i zeta} is the displacement, xi = r e^{i theta_sq} the
    squeezing, n_th the thermal occupation. Angles in radians.
    """

    alpha_mag: float
    zeta: float = 0.0
    r: float = 0.0
    theta_sq: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        if self.alpha_mag < 0:
            raise ValueError("alpha_mag must be >= 0")
        if self.r < 0:
            raise ValueError("squeezing amplitude r must be >= 0")
        if self.n_th < 0:
            raise ValueError("thermal photon number must be >= 0")

    @property
    def alpha(self) -> complex:
        return self.alpha_mag * np.exp(1j * self.zeta)

    @property
    def xi(self) -> complex:
        return self.r * np.exp(1j * self.theta_sq)

    def mean_photons(self) -> float:
        sh2 = np.sinh(self.r) ** 2
        return self.alpha_mag**2 + sh2 + self.n_th * (1 + 2 * sh2)

    def tau(self) -> float:
        return float(np.cos(2 * self.zeta - self.theta_sq))

    def beta(self) -> float:
        if self.alpha_mag == 0:
            raise ValueError("beta = sinh^2(r)/|alpha|^2 undefined at |alpha| = 0")
        return float(np.sinh(self.r) ** 2 / self.alpha_mag**2)

    @classmethod
    def from_beta_tau(cls, beta: float, tau: float, n_bar: float) -> "GaussianSpec":
        """Pure displaced squeezed state with given squeezing fraction and phase.

        Picks zeta = 0, theta_sq = arccos(tau); n_th = 0.
        """
        if not -1.0 <= tau <= 1.0:
            raise ValueError("tau must lie in [-1, 1]")
        if beta < 0 or n_bar <= 0:
            raise ValueError("need beta >= 0 and n_bar > 0")
        s = beta * n_bar / (1 + beta)
        alpha_sq = n_bar / (1 + beta)
        return cls(
            alpha_mag=float(np.sqrt(alpha_sq)),
            zeta=0.0,
            r=float(np.arcsinh(np.sqrt(s))),
            theta_sq=float(np.arccos(tau)),
            n_th=0.0,
        )


@dataclass(frozen=True)
class SpinCoherent:
    """Product of identically rotated qubits, mu = e^{i phi} tan(theta/2)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta < np.pi:
            raise ValueError("theta must lie in [0, pi)")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError("phi must lie in [0, 2*pi)")


@dataclass(frozen=True)
class OneAxisTwisted:
    """exp(-i chi/2 Jx^2) applied to the collective ground state |j, -j>."""

    chi: float


@dataclass(frozen=True)
class DickeLevel:
    """Bare Jz eigenstate |j, j - p>."""

    p: int


SpinStateSpec = SpinCoherent | OneAxisTwisted | DickeLevel


@dataclass
class MixedStateEigen:
    """Eigendecomposition of a mixed optical state on a truncated Fock space."""

    weights: np.ndarray
    vectors: np.ndarray  # columns, one per weight
    space: FockSpace

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights < 0):
            raise ValueError("eigenvalues must be non-negative")
        total = float(np.sum(self.weights))
        if total > 1 + 1e-9:
            raise ValueError(f"eigenvalues sum to {total} > 1 + 1e-9")
        gram = self.vectors.conj().T @ self.vectors
        dev = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
        if dev > 1e-10:
            raise ValueError(f"eigenvectors not orthonormal: Gram deviation {dev:.3e}")


def _poisson_tail_mass(mean: float, cutoff: int) -> float:
    """Mass of Poisson(mean) above `cutoff`, stable in log space."""
    if mean == 0:
        return 0.0
    k = np.arange(0, cutoff + 1)
    logp = k * np.log(mean) - mean - gammaln(k + 1)
    return float(max(0.0, 1.0 - np.exp(logp).sum()))


def _svs_tail_mass(r: float, cutoff: int) -> float:
    """Mass of the squeezed-vacuum photon distribution above `cutoff`."""
    if r == 0:
        return 0.0
    k = np.arange(0, cutoff // 2 + 1)
    # P(2k) = (2k)! / (2^k k!)^2 tanh^{2k} r / cosh r
    logp = (
        gammaln(2 * k + 1)
        - 2 * k * np.log(2.0)
        - 2 * gammaln(k + 1)
        + 2 * k * np.log(np.tanh(r))
        - np.log(np.cosh(r))
    )
    return float(max(0.0, 1.0 - np.exp(logp).sum()))


def displacement_op(alpha: complex, space: FockSpace) -> OperatorMatrix:
    """D(alpha) = exp(alpha a^dag - alpha* a) on the truncated space."""
    if abs(alpha) ** 2 > space.cutoff / 4:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha)**2:.3g} close to cutoff {space.cutoff}; truncation suspect",
            stacklevel=2,
        )
    tail = _poisson_tail_mass(abs(alpha) ** 2, space.cutoff)
    if tail > 1e-10:
        raise TruncationError(
            f"D(alpha)|0> tail mass {tail:.2e} beyond cutoff {space.cutoff} exceeds 1e-10"
        )
    ops = fock_operators(space)
    a, ad = ops["a"].elements, ops["a_dagger"].elements
    h = OperatorMatrix(space, 1j * (alpha * ad - np.conj(alpha) * a), hermitian=True)
    return expm_i(h, 1.0)


def squeeze_op(xi: complex, space: FockSpace) -> OperatorMatrix:
    """S(xi) = exp(-xi a^dag^2/2 + xi* a^2/2) on the truncated space."""
    r = abs(xi)
    if np.sinh(r) ** 2 > space.cutoff / 6:
        warnings.warn(
            f"sinh^2(r) = {np.sinh(r)**2:.3g} close to cutoff {space.cutoff}; truncation suspect",
            stacklevel=2,
        )
    tail = _svs_tail_mass(r, space.cutoff)
    if tail > 1e-10:
        raise TruncationError(
            f"S(xi)|0> tail mass {tail:.2e} beyond cutoff {space.cutoff} exceeds 1e-10"
        )
    ops = fock_operators(space)
    a, ad = ops["a"].elements, ops["a_dagger"].elements
    h = OperatorMatrix(space, 1j * (-xi * (ad @ ad) / 2 + np.conj(xi) * (a @ a) / 2), hermitian=True)
    return expm_i(h, 1.0)


def thermal_weights(n_th: float, support_tol: float) -> np.ndarray:
    """Thermal eigenvalues p_n = n_th^n / (1 + n_th)^(n+1) down to support_tol."""
    if n_th <= 0:
        return np.array([1.0])
    q = n_th / (1 + n_th)
    n_max = int(np.floor(np.log(support_tol * (1 + n_th)) / np.log(q)))
    n = np.arange(max(n_max, 0) + 1)
    p = np.exp(n * np.log(q) - np.log(1 + n_th))
    return p[p > support_tol] if np.any(p > support_tol) else p[:1]


def auto_fock_cutoff(spec: GaussianSpec, support_tol: float = SUPPORT_TOL_DEFAULT) -> FockSpace:
    """Cutoff estimate covering every retained eigenvector of the DSTS.

    Squeezed number states reach the classical edge (n + 1/2) e^{2r} and then
    decay exponentially at rate -ln tanh(r) per photon, so a Gaussian
    mean + k*sigma rule undershoots badly; the estimate below tracks the edge
    plus a decay margin per vector and is verified (and, if necessary,
    corrected) by `dsts_eigen`.
    """
    p = thermal_weights(spec.n_th, support_tol)
    n_sup = np.arange(len(p))
    e2r = np.exp(2 * spec.r)
    # per-vector tail target: keep p_n * tail_n below the weighted budget
    eps = np.minimum(EDGE_TAIL_TOL, WEIGHTED_EDGE_TAIL_TOL / np.maximum(p, 1e-300))
    eps = np.maximum(eps, 1e-14)
    if spec.r > 1e-12:
        k0 = -1.0 / np.log(np.tanh(spec.r))
    else:
        k0 = 0.5
    edge = 1.2 * (n_sup + 0.5) * e2r
    disp = spec.alpha_mag**2 + 4 * spec.alpha_mag * np.exp(spec.r) * np.sqrt(n_sup + 1.0)
    need = edge + k0 * np.log(1.0 / eps) + disp + 30
    # floor: mean + 8 sigma + 10 of the DSTS itself
    moments = optical_moments(spec)
    floor = moments["n_bar"] + 8 * np.sqrt(moments["var_n"]) + 10
    cutoff = int(np.ceil(max(float(np.max(need)), floor)))
    if cutoff > MAX_AUTO_CUTOFF:
        raise TruncationError(
            f"required cutoff ~{cutoff} exceeds MAX_AUTO_CUTOFF = {MAX_AUTO_CUTOFF}"
        )
    return FockSpace(cutoff)


def dsts_eigen(
    spec: GaussianSpec,
    space: FockSpace,
    support_tol: float = SUPPORT_TOL_DEFAULT,
) -> MixedStateEigen:
    """Exact eigenpairs (p_n, D S |n>) of the DSTS, support-thresholded.

    Raises TruncationError (naming the required cutoff) if the retained
    thermal mass on the space is below 1 - 1e-10 or if any retained vector
    leaks into the guard band near the cutoff.
    """
    p = thermal_weights(spec.n_th, support_tol)
    k = len(p)
    if k > space.dim:
        raise TruncationError(
            f"support extends to n = {k - 1} but cutoff is {space.cutoff}; "
            f"required cutoff >= {auto_fock_cutoff(spec, support_tol).cutoff}"
        )
    # retained thermal mass on the whole space (support_tol aside)
    if spec.n_th > 0:
        q = spec.n_th / (1 + spec.n_th)
        retained = 1.0 - q ** (space.cutoff + 1)
        if retained < 1 - 1e-10:
            raise TruncationError(
                f"retained thermal mass {retained} < 1 - 1e-10; "
                f"required cutoff >= {auto_fock_cutoff(spec, support_tol).cutoff}"
            )
    try:
        d_op = displacement_op(spec.alpha, space)
        s_op = squeeze_op(spec.xi, space)
    except TruncationError as exc:
        raise TruncationError(
            f"{exc}; required cutoff ~{auto_fock_cutoff(spec, support_tol).cutoff}"
        ) from exc
    basis = np.zeros((space.dim, k), dtype=complex)
    basis[np.arange(k), np.arange(k)] = 1.0
    vectors = d_op.elements @ (s_op.elements @ basis)
    # truncation check: mass piled against the top of the space
    buffer = max(8, space.dim // 20)
    edge_mass = np.sum(np.abs(vectors[space.dim - buffer :, :]) ** 2, axis=0)
    bad = (edge_mass > EDGE_TAIL_TOL) | (p * edge_mass > WEIGHTED_EDGE_TAIL_TOL)
    if np.any(bad):
        required = auto_fock_cutoff(spec, support_tol).cutoff
        required = max(required, int(space.cutoff * 1.3))
        raise TruncationError(
            f"vector tails at the cutoff: worst edge mass {float(np.max(edge_mass)):.2e} "
            f"(weighted {float(np.max(p * edge_mass)):.2e}); required cutoff ~{required}"
        )
    return MixedStateEigen(weights=p, vectors=vectors, space=space)


def build_dsts(
    spec: GaussianSpec,
    support_tol: float = SUPPORT_TOL_DEFAULT,
    space: FockSpace | None = None,
) -> MixedStateEigen:
    """dsts_eigen with automatic, verified cutoff selection."""
    trial = space or auto_fock_cutoff(spec, support_tol)
    for _ in range(4):
        try:
            return dsts_eigen(spec, trial, support_tol)
        except TruncationError:
            grown = min(int(trial.cutoff * 1.35) + 10, MAX_AUTO_CUTOFF)
            if grown == trial.cutoff:
                raise
            trial = FockSpace(grown)
    return dsts_eigen(spec, trial, support_tol)


def optical_moments(spec: GaussianSpec) -> dict[str, float]:
    """Mean photon number and photon-number variance of the DSTS, closed form."""
    nth = spec.n_th
    a2 = spec.alpha_mag**2
    c2r, s2r = np.cosh(2 * spec.r), np.sinh(2 * spec.r)
    sh2 = np.sinh(spec.r) ** 2
    w = c2r - s2r * np.cos(2 * spec.zeta - spec.theta_sq)
    var_n = (
        0.5 * s2r**2 * (2 * nth**2 + 2 * nth + 1)
        + a2 * (2 * nth + 1) * w
        + (1 + 2 * sh2) ** 2 * nth * (nth + 1)
    )
    return {"n_bar": float(spec.mean_photons()), "var_n": float(var_n)}


def spin_coherent(spec: SpinCoherent, space: DickeSpace) -> np.ndarray:
    """Spin-coherent state amplitudes ~ sqrt(C(2j, p)) mu^p, normalized."""
    n = space.n_atoms
    p = np.arange(n + 1)
    half = spec.theta / 2
    # amplitude = sqrt(C(N,p)) cos^{N-p}(theta/2) sin^p(theta/2) e^{i p phi}
    log_binom = gammaln(n + 1) - gammaln(p + 1) - gammaln(n - p + 1)
    with np.errstate(divide="ignore"):
        log_mag = 0.5 * log_binom + (n - p) * np.log(np.maximum(np.cos(half), 1e-300)) + p * np.log(
            np.maximum(np.sin(half), 1e-300)
        )
    amp = np.exp(log_mag) * np.exp(1j * p * spec.phi)
    if spec.theta == 0.0:
        amp = np.zeros(n + 1, dtype=complex)
        amp[0] = 1.0
    nrm = np.linalg.norm(amp)
    return amp / nrm


def oat_state(spec: OneAxisTwisted, space: DickeSpace) -> np.ndarray:
    """exp(-i chi/2 Jx^2) |j, -j>, built with the eigendecomposition route."""
    ops = spin_operators(space)
    jx = ops["jx"].elements
    jx2 = OperatorMatrix(space, jx @ jx, hermitian=True)
    w, v = _eigh(jx2)
    ground = np.zeros(space.dim, dtype=complex)
    ground[-1] = 1.0  # p = N  <->  m = -j
    out = v @ (np.exp(-1j * w * spec.chi / 2) * (v.conj().T @ ground))
    return out / np.linalg.norm(out)


def spin_state(spec: SpinStateSpec, space: DickeSpace) -> np.ndarray:
    if isinstance(spec, SpinCoherent):
        return spin_coherent(spec, space)
    if isinstance(spec, OneAxisTwisted):
        return oat_state(spec, space)
    if isinstance(spec, DickeLevel):
        if not 0 <= spec.p <= space.n_atoms:
            raise ValueError(f"Dicke index p = {spec.p} outside 0..{space.n_atoms}")
        vec = np.zeros(space.dim, dtype=complex)
        vec[spec.p] = 1.0
        return vec
    raise TypeError(f"unknown spin state spec {spec!r}")


def spin_moments(spec: SpinStateSpec, n_atoms: int) -> dict[str, float]:
    """Closed-form <Jz>, <Jz^2> and Var(Jz) for the supported probe states.

    One-axis twisting: Var(Jz) = N/8 [(N-1) cos^{N-2} chi
    - 2N cos^{2N-2}(chi/2) + N + 1]; <Jz> = -(N/2) cos^{N-1}(chi/2).
    """
    n = n_atoms
    if isinstance(spec, SpinCoherent):
        jz = 0.5 * n * np.cos(spec.theta)
        var = 0.25 * n * np.sin(spec.theta) ** 2
    elif isinstance(spec, OneAxisTwisted):
        chi = spec.chi
        first = 0.0 if n == 1 else (n - 1) * np.cos(chi) ** (n - 2)
        var = 0.125 * n * (first - 2 * n * np.cos(chi / 2) ** (2 * n - 2) + n + 1)
        jz = -0.5 * n * np.cos(chi / 2) ** (n - 1)
    elif isinstance(spec, DickeLevel):
        jz = 0.5 * n - spec.p
        var = 0.0
    else:
        raise TypeError(f"unknown spin state spec {spec!r}")
    var = float(max(var, 0.0))
    return {"jz_mean": float(jz), "jz2_mean": float(var + jz**2), "var_jz": var}
