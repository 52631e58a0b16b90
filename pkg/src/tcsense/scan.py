"""Configuration ingestion, parameter sweeps and figure-data tables.

A scan is described by a single JSON document (or the per-command defaults):
scenario, physical parameters in plain Hz, atom count, grid axes, fixed
values and output settings.  Grid evaluation runs on a work pool whose
results are merged in grid order, so output never depends on scheduling.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .measurement import MeasurementSpec, delta_h, optimize_quadrature
from .model import SystemParams
from .qfi import (
    dsvs_qfi_derivative,
    dsvs_var_bounds,
    qfi_cs,
    qfi_dsts_closed_form,
    qfi_dsvs,
    qfi_oat_cs,
    qfi_svs,
    reference_lines,
)
from .states import GaussianSpec, OneAxisTwisted, SpinCoherent, optical_moments
from .validation import FIG2_PARAMS_HZ, run_validation

SCENARIOS = ("CS", "SVS", "DSVS", "OAT", "DSTS-general")
GRID_VARIABLES = ("n_bar", "alpha_sq", "sinh2r", "tau", "chi", "theta", "t")


class ConfigError(ValueError):
    """Invalid scan configuration."""


class NonFiniteResultError(RuntimeError):
    """A grid point produced NaN/Inf."""


@dataclass
class GridAxis:
    name: str
    min: float
    max: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in GRID_VARIABLES:
            raise ConfigError(
                f"unknown grid variable {self.name!r}; recognized: {GRID_VARIABLES}"
            )
        if self.points < 2:
            raise ConfigError(f"grid axis {self.name}: points must be >= 2")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"grid axis {self.name}: scale must be linear|log")
        if self.scale == "log" and (self.min <= 0 or self.max <= 0):
            raise ConfigError(f"grid axis {self.name}: log scale needs positive bounds")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.points)
        return np.linspace(self.min, self.max, self.points)


@dataclass
class ScanConfig:
    scenario: str = "CS"
    params_hz: dict = field(default_factory=lambda: dict(FIG2_PARAMS_HZ, t_s=1e-6))
    n_atoms: int = 4
    grid: list[GridAxis] = field(default_factory=list)
    fixed: dict = field(default_factory=dict)
    seed: int = 20260808
    threads: int = 1
    plot: bool = True

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.n_atoms < 1:
            raise ConfigError("n_atoms must be >= 1")
        for key in ("omega0_hz", "omega_a_hz", "g_hz", "h_hz", "t_s"):
            if key not in self.params_hz:
                raise ConfigError(f"params missing field {key}")

    def system_params(self, t_s: float | None = None) -> SystemParams:
        p = self.params_hz
        return SystemParams.from_frequencies(
            p["omega0_hz"], p["omega_a_hz"], p["g_hz"], p["h_hz"],
            p["t_s"] if t_s is None else t_s,
        )

    def echo(self) -> dict:
        return {
            "scenario": self.scenario,
            "params": dict(self.params_hz),
            "n_atoms": self.n_atoms,
            "grid": {
                a.name: {"min": a.min, "max": a.max, "points": a.points, "scale": a.scale}
                for a in self.grid
            },
            "fixed": dict(self.fixed),
            "seed": self.seed,
            "threads": self.threads,
        }


def parse_config(doc: dict, defaults: ScanConfig | None = None) -> ScanConfig:
    """Build a ScanConfig from a JSON document, on top of per-command defaults."""
    base = defaults.echo() if defaults is not None else ScanConfig().echo()
    merged_params = dict(base["params"])
    merged_params.update(doc.get("params", {}))
    grid_doc = doc.get("grid", None)
    if grid_doc is None:
        grid_axes = [GridAxis(name=k, **g) for k, g in base["grid"].items()]
    else:
        if not isinstance(grid_doc, dict):
            raise ConfigError("grid must be an object mapping variable -> axis")
        grid_axes = []
        for name, axis in grid_doc.items():
            try:
                grid_axes.append(
                    GridAxis(
                        name=name,
                        min=float(axis["min"]),
                        max=float(axis["max"]),
                        points=int(axis["points"]),
                        scale=axis.get("scale", "linear"),
                    )
                )
            except KeyError as exc:
                raise ConfigError(f"grid axis {name}: missing field {exc}") from exc
    fixed = dict(base["fixed"])
    fixed.update(doc.get("fixed", {}))
    try:
        return ScanConfig(
            scenario=doc.get("scenario", base["scenario"]),
            params_hz=merged_params,
            n_atoms=int(doc.get("n_atoms", base["n_atoms"])),
            grid=grid_axes,
            fixed=fixed,
            seed=int(doc.get("seed", base["seed"])),
            threads=int(doc.get("threads", base["threads"])),
            plot=bool(doc.get("plot", defaults.plot if defaults else True)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


@dataclass
class ResultTable:
    """Named columns plus the metadata needed to re-run the job."""

    name: str
    columns: dict  # str -> np.ndarray, insertion-ordered
    metadata: dict

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: {lengths}")
        for col, vals in self.columns.items():
            vals = np.asarray(vals)
            if np.issubdtype(vals.dtype, np.number):
                bad = ~np.isfinite(vals)
                if bad.any():
                    i = int(np.argmax(bad))
                    point = {k: (np.asarray(v)[i]).item() for k, v in self.columns.items()
                             if np.issubdtype(np.asarray(v).dtype, np.number)}
                    raise NonFiniteResultError(
                        f"non-finite value in column {col!r} at row {i}: {point}"
                    )
            self.columns[col] = vals

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def write_csv(self, path) -> None:
        """RFC-4180 CSV (CRLF, header row, '.' decimal); metadata goes to a
        JSON sidecar `<path>.meta.json`."""
        cols = list(self.columns)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(cols)
            for i in range(self.n_rows):
                writer.writerow([_format_cell(self.columns[c][i]) for c in cols])
        with open(f"{path}.meta.json", "w", encoding="utf-8") as fh:
            json.dump(self.metadata, fh, indent=2)
            fh.write("\n")

    def write_json(self, path) -> None:
        doc = {
            "metadata": self.metadata,
            "columns": {c: [_jsonify(x) for x in v] for c, v in self.columns.items()},
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def _format_cell(x):
    if isinstance(x, (np.floating, float)):
        return repr(float(x))
    if isinstance(x, (np.integer, int)):
        return str(int(x))
    return str(x)


def _jsonify(x):
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    return x


def _metadata(cfg: ScanConfig, command: str) -> dict:
    return {"command": command, "config": cfg.echo(), "version": __version__, "seed": cfg.seed}


def _pool_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# scenario QFI evaluation shared by `qfi` and `scan`

def _scenario_point(cfg: ScanConfig, values: dict) -> dict:
    """QFI (plus reported extras) at one grid/fixed-value assignment."""
    merged = dict(cfg.fixed)
    merged.update(values)
    t_s = merged.get("t", cfg.params_hz["t_s"])
    params = cfg.system_params(t_s=t_s)
    n = cfg.n_atoms
    out = dict(values)
    scenario = cfg.scenario
    if scenario == "CS":
        theta = merged.get("theta", np.pi / 2)
        n_bar = merged.get("n_bar")
        if n_bar is None:
            raise ConfigError("CS scenario needs n_bar (grid axis or fixed)")
        rep = qfi_cs(theta, n_bar, n, params)
        out["qfi_asymptote_s2"] = rep.notes["asymptote"]
    elif scenario == "SVS":
        s = merged.get("sinh2r")
        if s is None:
            raise ConfigError("SVS scenario needs sinh2r (grid axis or fixed)")
        rep = qfi_svs(float(np.arcsinh(np.sqrt(s))), n, params)
        out["qfi_double_hs_bound_s2"] = rep.notes["double_hs_bound"]
    elif scenario == "DSVS":
        s = merged.get("sinh2r")
        tau = merged.get("tau", 1.0)
        if s is None:
            raise ConfigError("DSVS scenario needs sinh2r (grid axis or fixed)")
        if "alpha_sq" in merged:
            alpha_sq = merged["alpha_sq"]
        elif "n_bar" in merged:
            alpha_sq = merged["n_bar"] - s
            if alpha_sq < 0:
                raise ConfigError("DSVS: sinh2r exceeds n_bar")
        else:
            raise ConfigError("DSVS scenario needs alpha_sq or n_bar")
        gauss = _dsvs_spec(alpha_sq, s, tau)
        rep = qfi_dsvs(gauss, n, params)
    elif scenario == "OAT":
        chi = merged.get("chi")
        n_bar = merged.get("n_bar")
        if chi is None or n_bar is None:
            raise ConfigError("OAT scenario needs chi and n_bar")
        rep = qfi_oat_cs(chi, n, n_bar, params)
        out["qfi_double_hs_bound_s2"] = rep.notes["double_hs_bound"]
    elif scenario == "DSTS-general":
        gauss = GaussianSpec(
            alpha_mag=float(np.sqrt(merged.get("alpha_sq", 0.0))),
            zeta=merged.get("zeta", 0.0),
            r=float(np.arcsinh(np.sqrt(merged.get("sinh2r", 0.0)))),
            theta_sq=merged.get("theta_sq", 0.0),
            n_th=merged.get("n_th", 0.0),
        )
        if "chi" in merged:
            spin = OneAxisTwisted(chi=merged["chi"])
        else:
            spin = SpinCoherent(theta=merged.get("theta", 0.0), phi=merged.get("phi", 0.0))
        rep = qfi_dsts_closed_form(gauss, spin, n, params)
    else:  # pragma: no cover - guarded by ScanConfig
        raise ConfigError(f"unknown scenario {scenario}")
    out["qfi_s2"] = rep.value
    out["delta_h_bound_per_t"] = rep.delta_h_bound() * t_s
    return out


def _dsvs_spec(alpha_sq: float, sinh2r: float, tau: float) -> GaussianSpec:
    return GaussianSpec(
        alpha_mag=float(np.sqrt(alpha_sq)),
        zeta=0.0,
        r=float(np.arcsinh(np.sqrt(sinh2r))),
        theta_sq=float(np.arccos(np.clip(tau, -1.0, 1.0))),
        n_th=0.0,
    )


def _grid_points(cfg: ScanConfig) -> list[dict]:
    if not cfg.grid:
        return [{}]
    axes = [a.values() for a in cfg.grid]
    names = [a.name for a in cfg.grid]
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = [m.ravel() for m in mesh]
    return [
        {name: float(flat[k][i]) for k, name in enumerate(names)}
        for i in range(flat[0].size)
    ]


def cmd_scan(cfg: ScanConfig, command: str = "scan") -> ResultTable:
    points = _grid_points(cfg)
    rows = _pool_map(lambda v: _scenario_point(cfg, v), points, cfg.threads)
    cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    return ResultTable(name=command, columns=cols, metadata=_metadata(cfg, command))


def cmd_qfi(cfg: ScanConfig) -> ResultTable:
    return cmd_scan(cfg, command="qfi")


def cmd_precision(cfg: ScanConfig) -> ResultTable:
    """Error-propagation precision sweep (coherent light, spin-coherent probe)."""
    if cfg.scenario != "CS":
        raise ConfigError("precision sweeps are defined for the CS scenario only")
    points = _grid_points(cfg)

    def evaluate(values: dict) -> dict:
        merged = dict(cfg.fixed)
        merged.update(values)
        t_s = merged.get("t", cfg.params_hz["t_s"])
        params = cfg.system_params(t_s=t_s)
        n_bar = merged.get("n_bar")
        if n_bar is None:
            raise ConfigError("precision sweep needs n_bar")
        theta = merged.get("theta", np.pi / 2)
        phi = merged.get("phi", 0.0)
        base = MeasurementSpec(varphi=0.0, theta=theta, phi=phi)
        varphi = merged.get("varphi")
        if varphi is None:
            varphi = optimize_quadrature(base, cfg.n_atoms, n_bar, params)
        spec = MeasurementSpec(varphi=float(varphi), theta=theta, phi=phi)
        rep_n = delta_h(spec, cfg.n_atoms, n_bar, params, numeric=True)
        rep_a = delta_h(spec, cfg.n_atoms, n_bar, params, numeric=False)
        out = dict(values)
        out["varphi_rad"] = float(varphi)
        out["delta_h_numeric_per_t"] = rep_n.delta_h * t_s
        out["delta_h_analytic_per_t"] = rep_a.delta_h * t_s
        out["qcrb_per_t"] = rep_n.qcrb * t_s
        return out

    rows = _pool_map(evaluate, points, cfg.threads)
    cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    return ResultTable(name="precision", columns=cols, metadata=_metadata(cfg, "precision"))


# ---------------------------------------------------------------------------
# figure-data commands

def fig2_defaults() -> ScanConfig:
    cfg = ScanConfig(scenario="CS", params_hz=dict(FIG2_PARAMS_HZ, t_s=1e-11))
    c = cfg.system_params().coupling_shift()
    cfg.grid = [GridAxis("n_bar", 0.1 / c, 1e4 / c, 49, "log")]
    cfg.fixed = {"theta": np.pi / 2, "phi": 0.0}
    return cfg


def cmd_fig2(cfg: ScanConfig) -> ResultTable:
    """QFI, numeric/analytic precision and SQL/HL lines vs mean photon number."""
    if cfg.scenario != "CS":
        raise ConfigError("fig2 requires the CS scenario")
    axes = [a for a in cfg.grid if a.name == "n_bar"]
    if len(cfg.grid) != 1 or not axes:
        raise ConfigError("fig2 sweeps exactly one axis: n_bar")
    t_s = cfg.fixed.get("t", cfg.params_hz["t_s"])
    params = cfg.system_params(t_s=t_s)
    theta = cfg.fixed.get("theta", np.pi / 2)
    phi = cfg.fixed.get("phi", 0.0)
    n = cfg.n_atoms

    def evaluate(n_bar: float) -> dict:
        rep = qfi_cs(theta, n_bar, n, params)
        base = MeasurementSpec(varphi=0.0, theta=theta, phi=phi)
        varphi = optimize_quadrature(base, n, n_bar, params)
        spec = MeasurementSpec(varphi=varphi, theta=theta, phi=phi)
        rep_num = delta_h(spec, n, n_bar, params, numeric=True)
        rep_ana = delta_h(spec, n, n_bar, params, numeric=False)
        refs = reference_lines(n_bar, n, params)
        return {
            "n_bar": n_bar,
            "qfi_cs_s2": rep.value,
            "qfi_asymptote_s2": rep.notes["asymptote"],
            "delta_h_numeric_per_t": rep_num.delta_h * t_s,
            "delta_h_analytic_per_t": rep_ana.delta_h * t_s,
            "qcrb_per_t": rep_num.qcrb * t_s,
            "sql_s2": refs["sql"],
            "hl_s2": refs["hl"],
        }

    values = [float(v) for v in axes[0].values()]
    rows = _pool_map(evaluate, values, cfg.threads)
    cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    return ResultTable(name="fig2", columns=cols, metadata=_metadata(cfg, "fig2"))


def fig3_defaults() -> ScanConfig:
    cfg = ScanConfig(scenario="DSVS", params_hz=dict(FIG2_PARAMS_HZ, t_s=1e-6))
    cfg.grid = [
        GridAxis("alpha_sq", 1.0, 1000.0, 100, "linear"),
        GridAxis("sinh2r", 0.0, 6.0, 61, "linear"),
    ]
    cfg.fixed = {"tau": 1.0, "n_bar_list": [200.0, 400.0, 600.0, 800.0, 1000.0]}
    return cfg


def cmd_fig3(cfg: ScanConfig) -> tuple[ResultTable, ResultTable]:
    """Rescaled QFI over (displacement, squeezing) at fixed tau, plus the
    fixed-n_bar minimum curve."""
    if cfg.scenario != "DSVS":
        raise ConfigError("fig3 requires the DSVS scenario")
    names = sorted(a.name for a in cfg.grid)
    if names != ["alpha_sq", "sinh2r"]:
        raise ConfigError("fig3 sweeps exactly alpha_sq and sinh2r")
    tau = float(cfg.fixed.get("tau", 1.0))
    params = cfg.system_params()
    n = cfg.n_atoms

    def evaluate(point: dict) -> dict:
        alpha_sq, s = point["alpha_sq"], point["sinh2r"]
        rep = qfi_dsvs(_dsvs_spec(alpha_sq, s, tau), n, params)
        with np.errstate(divide="ignore"):
            # F = 0 yields -inf here; the table's non-finite guard reports it
            ln_f = float(np.log(rep.value / params.t**2))
        return {
            "alpha_sq": alpha_sq,
            "sinh2r": s,
            "n_bar": alpha_sq + s,
            "ln_qfi_over_t2": ln_f,
        }

    rows = _pool_map(evaluate, _grid_points(cfg), cfg.threads)
    cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    grid_table = ResultTable(name="fig3", columns=cols, metadata=_metadata(cfg, "fig3"))

    n_bar_list = [float(x) for x in cfg.fixed.get("n_bar_list", [200, 400, 600, 800, 1000])]
    min_rows = [_fig3_minimum(n_bar, tau, n, params) for n_bar in n_bar_list]
    min_cols = {k: np.array([r[k] for r in min_rows]) for k in min_rows[0]}
    min_table = ResultTable(
        name="fig3_min_curve", columns=min_cols, metadata=_metadata(cfg, "fig3_min_curve")
    )
    return grid_table, min_table


def _fig3_qfi_at(s: float, n_bar: float, tau: float, n: int, params: SystemParams) -> float:
    return qfi_dsvs(_dsvs_spec(n_bar - s, s, tau), n, params).value


def _fig3_minimum(n_bar: float, tau: float, n: int, params: SystemParams) -> dict:
    """Coarse grid + golden-section refinement of min_s F(s) at fixed n_bar."""
    s_grid = np.geomspace(1e-3, min(n_bar * 0.9, 50.0), 200)
    vals = np.array([_fig3_qfi_at(s, n_bar, tau, n, params) for s in s_grid])
    i = int(np.argmin(vals))
    a = s_grid[max(i - 1, 0)]
    b = s_grid[min(i + 1, len(s_grid) - 1)]
    invphi = (np.sqrt(5) - 1) / 2
    c_pt = b - invphi * (b - a)
    d_pt = a + invphi * (b - a)
    fc = _fig3_qfi_at(c_pt, n_bar, tau, n, params)
    fd = _fig3_qfi_at(d_pt, n_bar, tau, n, params)
    for _ in range(200):
        if (b - a) < 1e-10 * max(1.0, abs(b)):
            break
        if fc < fd:
            b, d_pt, fd = d_pt, c_pt, fc
            c_pt = b - invphi * (b - a)
            fc = _fig3_qfi_at(c_pt, n_bar, tau, n, params)
        else:
            a, c_pt, fc = c_pt, d_pt, fd
            d_pt = a + invphi * (b - a)
            fd = _fig3_qfi_at(d_pt, n_bar, tau, n, params)
    s_min = float((a + b) / 2)
    f_min = _fig3_qfi_at(s_min, n_bar, tau, n, params)
    return {
        "n_bar": n_bar,
        "sinh2r_min": s_min,
        "alpha_sq": n_bar - s_min,
        "ln_qfi_over_t2_min": float(np.log(f_min / params.t**2)),
    }


def fig4a_defaults() -> ScanConfig:
    cfg = ScanConfig(scenario="DSVS", params_hz=dict(FIG2_PARAMS_HZ, t_s=1e-6))
    cfg.grid = [
        GridAxis("tau", -1.0, 1.0, 81, "linear"),
        GridAxis("sinh2r", 1e-3, 30.0, 121, "log"),
    ]
    cfg.fixed = {"n_bar": 1000.0}
    return cfg


def cmd_fig4a(cfg: ScanConfig) -> tuple[ResultTable, ResultTable]:
    """Monotonicity map of dF/d sinh^2(r) over (tau, sinh2r) at fixed n_bar,
    plus the zero contour found by bisection along each tau >= 0 row."""
    if cfg.scenario != "DSVS":
        raise ConfigError("fig4a requires the DSVS scenario")
    names = sorted(a.name for a in cfg.grid)
    if names != ["sinh2r", "tau"]:
        raise ConfigError("fig4a sweeps exactly tau and sinh2r")
    n_bar = float(cfg.fixed.get("n_bar", 1000.0))
    params = cfg.system_params()
    n = cfg.n_atoms

    def evaluate(point: dict) -> dict:
        tau, s = point["tau"], point["sinh2r"]
        d = dsvs_qfi_derivative(s, tau, n_bar, n, params)
        return {
            "tau": tau,
            "sinh2r": s,
            "dqfi_dsinh2r_s2": d,
            "sign_dqfi_dsinh2r": int(np.sign(d)),
        }

    rows = _pool_map(evaluate, _grid_points(cfg), cfg.threads)
    cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    grid_table = ResultTable(name="fig4a", columns=cols, metadata=_metadata(cfg, "fig4a"))

    s_axis = next(a for a in cfg.grid if a.name == "sinh2r").values()
    tau_axis = next(a for a in cfg.grid if a.name == "tau").values()
    boundary_rows = []
    for tau in tau_axis:
        if tau < 0:
            continue
        root = _fig4a_zero(float(tau), s_axis, n_bar, n, params)
        if root is not None:
            s0, resid = root
            boundary_rows.append(
                {"tau": float(tau), "sinh2r_zero": s0, "derivative_residual_s2": resid}
            )
    if boundary_rows:
        b_cols = {k: np.array([r[k] for r in boundary_rows]) for k in boundary_rows[0]}
    else:
        b_cols = {"tau": np.array([]), "sinh2r_zero": np.array([]), "derivative_residual_s2": np.array([])}
    boundary = ResultTable(
        name="fig4a_boundary", columns=b_cols, metadata=_metadata(cfg, "fig4a_boundary")
    )
    return grid_table, boundary


def _fig4a_zero(tau, s_axis, n_bar, n, params, max_iter: int = 60):
    """Bisection for dF/d sinh^2 r = 0 along one tau row, or None if the sign
    never changes on the scanned window."""
    f = lambda s: dsvs_qfi_derivative(s, tau, n_bar, n, params)
    vals = np.array([f(s) for s in s_axis])
    sign_change = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if sign_change.size == 0:
        return None
    i = int(sign_change[0])
    a, b = float(s_axis[i]), float(s_axis[i + 1])
    fa = f(a)
    target = 1e-8 * _fig3_qfi_at(b, n_bar, tau, n, params) / n_bar
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if abs(fm) <= target:
            return mid, abs(fm)
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    mid = 0.5 * (a + b)
    return mid, abs(f(mid))


def fig4b_defaults() -> ScanConfig:
    cfg = ScanConfig(scenario="DSVS", params_hz=dict(FIG2_PARAMS_HZ, t_s=1e-6))
    cfg.grid = [GridAxis("sinh2r", 0.1, 999.0, 121, "log")]
    cfg.fixed = {"n_bar": 1000.0}
    return cfg


def cmd_fig4b(cfg: ScanConfig) -> ResultTable:
    """Photon-number variance vs squeezing at fixed n_bar for tau = -1, 0, 1,
    with the closed-form lower bounds and the 2 n_bar^2 ceiling."""
    if cfg.scenario != "DSVS":
        raise ConfigError("fig4b requires the DSVS scenario")
    if len(cfg.grid) != 1 or cfg.grid[0].name != "sinh2r":
        raise ConfigError("fig4b sweeps exactly one axis: sinh2r")
    n_bar = float(cfg.fixed.get("n_bar", 1000.0))

    def evaluate(s: float) -> dict:
        if s >= n_bar:
            raise ConfigError(f"sinh2r = {s} must stay below n_bar = {n_bar}")
        beta = s / (n_bar - s)
        bounds = dsvs_var_bounds(beta, -1.0, n_bar)
        bounds_p = dsvs_var_bounds(beta, 1.0, n_bar)
        row = {"sinh2r": s, "beta": beta}
        for tau, label in ((-1.0, "var_n_tau_minus1"), (0.0, "var_n_tau0"), (1.0, "var_n_tau_plus1")):
            row[label] = optical_moments(_dsvs_spec(n_bar - s, s, tau))["var_n"]
        row["var_minus_tau_minus1"] = bounds["var_minus"]
        row["var_plus_tau_plus1"] = bounds_p["var_plus"]
        row["two_nbar_sq"] = 2 * n_bar**2
        return row

    values = [float(v) for v in cfg.grid[0].values()]
    rows = _pool_map(evaluate, values, cfg.threads)
    cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    return ResultTable(name="fig4b", columns=cols, metadata=_metadata(cfg, "fig4b"))


def cmd_validate(cfg: ScanConfig) -> tuple[ResultTable, dict]:
    """Oracle-equivalence suite as a pass/fail table plus the raw report."""
    params = cfg.system_params()
    report = run_validation(
        params=params,
        seed=cfg.seed,
        n_qfi_specs=int(cfg.fixed.get("n_qfi_specs", 50)),
        n_moment_specs=int(cfg.fixed.get("n_moment_specs", 200)),
        n_spin_specs=int(cfg.fixed.get("n_spin_specs", 100)),
    )
    checks = report["checks"]
    cols = {
        "name": np.array([c["name"] for c in checks]),
        "residual": np.array([c["residual"] for c in checks]),
        "tolerance": np.array([c["tolerance"] for c in checks]),
        "passed": np.array([int(c["passed"]) for c in checks]),
    }
    table = ResultTable(name="validate", columns=cols, metadata=_metadata(cfg, "validate"))
    report_doc = {"metadata": table.metadata, **report}
    return table, report_doc
