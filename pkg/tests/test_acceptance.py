"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line through the terminal-summary hook in conftest.py.

Criterion 8's bound clause is implemented exactly as stated and marked as a
strict expected failure: at the reference (dispersive-regime) parameters the
exact QFI approaches the double-HS reference from below with a deficit of
order 2 delta^2/(2 g^2 nbar), so the unqualified inequality cannot hold; see
the decisions ledger for the full analysis.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from tcsense.hilbert import DickeSpace, spin_operators
from tcsense.measurement import mean_field_parameter
from tcsense.qfi import qfi_cs, qfi_dsts_closed_form, qfi_oat_cs, qfi_svs
from tcsense.scan import GridAxis, cmd_fig2, cmd_fig4a, fig2_defaults, fig4a_defaults
from tcsense.states import (
    GaussianSpec,
    OneAxisTwisted,
    SpinCoherent,
    oat_state,
    optical_moments,
    spin_moments,
)
from tcsense.qfi import dsvs_var_bounds
from tcsense.validation import (
    effective_fidelity_suite,
    fig2_system_params,
    moments_suite,
    qfi_oracle_suite,
)

SEED = 20260808


def test_criterion_01_oracle_equivalence():
    """Closed-form DSTS QFI (with its thermal term) vs the spectral oracle."""
    params = fig2_system_params(t_s=1e-6)
    start = time.time()
    rows = qfi_oracle_suite(params, n_specs=50, seed=SEED)
    elapsed = time.time() - start
    assert len(rows) == 50
    worst = max(r["rel_diff"] for r in rows)
    pure = [r["rel_diff"] for r in rows if r["n_th"] == 0.0]
    mixed = [r["rel_diff"] for r in rows if r["n_th"] > 0.0]
    assert pure and mixed, "draws must cover both pure and thermal specs"
    assert max(pure) <= 1e-8, f"pure subset rel diff {max(pure):.2e} > 1e-8"
    assert worst <= 1e-6, f"worst rel diff {worst:.2e} > 1e-6"
    assert elapsed <= 120.0, f"runtime {elapsed:.1f}s > 2 min"


def test_criterion_02_photon_variance_formula():
    start = time.time()
    rows = moments_suite(n_specs=200, seed=SEED)
    elapsed = time.time() - start
    assert len(rows) == 200
    worst = max(r["rel_diff_var"] for r in rows)
    assert worst <= 1e-6, f"worst variance rel diff {worst:.2e} > 1e-6"
    assert elapsed <= 30.0, f"runtime {elapsed:.1f}s > 30 s"


def test_criterion_03_cs_asymptote_ratio():
    params = fig2_system_params(t_s=1e-6)
    c = params.coupling_shift()
    for cn in np.geomspace(100.0, 1e4, 13):
        rep = qfi_cs(np.pi / 2, float(cn / c), 4, params)
        ratio = rep.value / rep.notes["asymptote"]
        assert 0.95 <= ratio <= 1.05


@pytest.mark.xfail(
    strict=True,
    reason=(
        "spec defect: the exact coherent-probe QFI at theta = pi/2 is "
        "t^2 N [(c nbar - 1)^2 + c^2 nbar], a parabola shifted by 1/c, whose "
        "log-log slope 2u/(u-1) + O(c/u) (u = c nbar) exceeds 2 everywhere on "
        "the stated window and approaches 2 from above (measured 2.0034); the "
        "interval [1.95, 2.0] presumes approach from below, which holds for "
        "the squeezed-vacuum case but not here (decisions ledger, criterion 3)"
    ),
)
def test_criterion_03_cs_loglog_slope():
    params = fig2_system_params(t_s=1e-6)
    c = params.coupling_shift()
    cns = np.geomspace(100.0, 1e4, 17)
    f = np.array([qfi_cs(np.pi / 2, float(cn / c), 4, params).value for cn in cns])
    slope = np.polyfit(np.log(cns / c), np.log(f), 1)[0]
    assert 1.95 <= slope <= 2.0, f"log-log slope {slope:.6f} outside [1.95, 2.0]"


def test_criterion_04_fig2_reproduction():
    cfg = fig2_defaults()
    cfg.plot = False
    table = cmd_fig2(cfg)
    params = cfg.system_params()
    t = cfg.params_hz["t_s"]
    c = table.columns
    qcrb_product = (c["delta_h_numeric_per_t"] / t) * np.sqrt(c["qfi_cs_s2"])
    assert np.all(qcrb_product >= 1 - 1e-9), "QCRB violated on the fig2 grid"
    in_window = np.array(
        [mean_field_parameter(params, nb) <= 0.01 for nb in c["n_bar"]]
    )
    assert in_window.any()
    rel = np.abs(c["delta_h_numeric_per_t"] - c["delta_h_analytic_per_t"]) / c["delta_h_analytic_per_t"]
    assert np.all(rel[in_window] <= 1e-3), f"mean-field window mismatch {rel[in_window].max():.2e}"


def test_criterion_05_svs_double_heisenberg():
    params = fig2_system_params(t_s=1e-6)
    pref = params.g**4 / params.delta() ** 4
    for r in np.linspace(0.1, 4.0, 27):
        rep = qfi_svs(float(r), 4, params)
        explicit = 2 * pref * params.t**2 * 16 * np.sinh(2 * r) ** 2
        assert abs(rep.value - explicit) <= 1e-12 * explicit
        via_general = qfi_dsts_closed_form(
            GaussianSpec(alpha_mag=0.0, r=float(r)), SpinCoherent(theta=0.0), 4, params
        ).value
        assert abs(rep.value - via_general) <= 1e-12 * explicit
        n_bar = np.sinh(r) ** 2
        bound = 8 * pref * params.t**2 * 16 * n_bar**2
        assert rep.value >= bound


def test_criterion_06_dsvs_variance_bounds():
    rng = np.random.default_rng(SEED)
    checked_asym = 0
    for _ in range(200):
        n_bar = float(10 ** rng.uniform(0.0, 3.3))
        beta = float(10 ** rng.uniform(-3.5, 1.5))
        tau = float(rng.uniform(-1.0, 1.0))
        spec = GaussianSpec.from_beta_tau(beta, tau, n_bar)
        var = optical_moments(spec)["var_n"]
        bounds = dsvs_var_bounds(beta, tau, n_bar)
        if tau >= 0:
            assert var > bounds["var_plus"], (beta, tau, n_bar)
        else:
            assert var >= bounds["var_minus"] * (1 - 1e-12), (beta, tau, n_bar)
        if beta >= 10 / (2 * n_bar):
            checked_asym += 1
            assert bounds["asymptotic"] <= var * 1.05, (beta, tau, n_bar)
    assert checked_asym > 20


def test_criterion_07_fig4a_monotonicity():
    cfg = fig4a_defaults()
    cfg.plot = False
    grid, boundary = cmd_fig4a(cfg)
    c = grid.columns
    neg = c["tau"] < 0
    assert np.all(c["sign_dqfi_dsinh2r"][neg] > 0), "tau < 0 region must be monotone increasing"
    # zero contour: at most one sign change per tau >= 0 row, and the rows
    # owning a root form a contiguous band that reaches tau = 1
    tau_axis = np.unique(c["tau"])
    s_points = len(np.unique(c["sinh2r"]))
    signs = c["sign_dqfi_dsinh2r"].reshape(len(tau_axis), s_points)
    rows_with_root = []
    for i, tau in enumerate(tau_axis):
        if tau < 0:
            continue
        changes = int(np.sum(np.sign(signs[i, :-1]) != np.sign(signs[i, 1:])))
        assert changes <= 1, f"row tau={tau} has {changes} sign changes"
        if changes == 1:
            rows_with_root.append(tau)
    assert rows_with_root, "zero contour must exist on the scanned window"
    assert rows_with_root[-1] == pytest.approx(1.0)
    np.testing.assert_allclose(np.diff(rows_with_root), rows_with_root[1] - rows_with_root[0])
    b = boundary.columns
    assert len(np.unique(b["tau"])) == len(b["tau"]), "boundary must be single-valued per row"


def test_criterion_08_oat_parity_cases():
    for n in range(2, 13, 2):
        mom = spin_moments(OneAxisTwisted(chi=np.pi), n)
        assert abs(mom["var_jz"] - n**2 / 4) <= 1e-10
    for n in range(3, 12, 2):
        mom = spin_moments(OneAxisTwisted(chi=np.pi), n)
        assert abs(mom["var_jz"] - n / 4) <= 1e-10
    # matrix oracle side
    for n in list(range(2, 13, 2)) + list(range(3, 12, 2)):
        space = DickeSpace(n)
        vec = oat_state(OneAxisTwisted(chi=np.pi), space)
        jz = spin_operators(space)["jz"].elements
        jz1 = float(np.real(vec.conj() @ jz @ vec))
        jz2 = float(np.real(vec.conj() @ jz @ jz @ vec))
        expected = n**2 / 4 if n % 2 == 0 else n / 4
        assert abs((jz2 - jz1**2) - expected) <= 1e-10


@pytest.mark.xfail(
    strict=True,
    reason=(
        "spec defect: at 2 g^2 nbar/delta^2 = 100 with the reference dispersive "
        "parameters the exact QFI is (1 - 1/100)^2 + 1/nbar ~ 0.9803 of the "
        "double-HS reference, i.e. the asymptote is approached from below; the "
        "unqualified inequality F >= 4 (g^4/delta^4) t^2 N^2 nbar^2 cannot hold "
        "(decisions ledger, criterion 8)"
    ),
)
def test_criterion_08_oat_bound_clause():
    params = fig2_system_params(t_s=1e-6)
    c = params.coupling_shift()
    n_bar = 100.0 / c
    rep = qfi_oat_cs(np.pi, 4, n_bar, params)
    assert rep.value >= rep.notes["double_hs_bound"], (
        f"F/bound = {rep.value / rep.notes['double_hs_bound']:.6f}"
    )


def test_criterion_09_effective_model_validity():
    start = time.time()
    rows = effective_fidelity_suite(ratios=(5, 10, 20, 40), cutoff=48)
    elapsed = time.time() - start
    for key in ("infidelity_effective_s", "infidelity_effective"):
        infid = [r[key] for r in rows]
        assert all(b < a for a, b in zip(infid, infid[1:])), f"{key} not monotone: {infid}"
    assert elapsed <= 120.0, f"runtime {elapsed:.1f}s > 2 min"


def test_criterion_10_validate_determinism(tmp_path):
    args = [
        sys.executable, "-m", "tcsense.cli", "validate",
        "--seed", "20260808",
        "--fixed.n-qfi-specs", "8", "--fixed.n-moment-specs", "16",
        "--fixed.n-spin-specs", "10",
    ]
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    r1 = subprocess.run([*args, "--out", str(out1)], cwd=tmp_path, capture_output=True, timeout=600)
    r2 = subprocess.run([*args, "--out", str(out2)], cwd=tmp_path, capture_output=True, timeout=600)
    assert r1.returncode == 0, r1.stderr.decode()
    assert r2.returncode == 0, r2.stderr.decode()
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2, "validate reports differ between identical runs"
    assert json.loads(b1)["passed"] is True
