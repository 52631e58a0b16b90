"""Figure rendering for the report commands.

Each figure-data command can drop a PNG next to its CSV so a sweep is
immediately inspectable; the tables stay the authoritative output.  Uses the
Agg backend only.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render(kind: str, tables, path) -> str | None:
    """Render the table(s) of one command to `path` (PNG). Returns the path,
    or None if this kind has no renderer."""
    fn = _RENDERERS.get(kind)
    if fn is None:
        return None
    fig = fn(tables)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return str(path)


def _fig2(tables):
    (table,) = tables
    c = table.columns
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 7), sharex=True)
    ax1.loglog(c["n_bar"], c["qfi_cs_s2"], "-", color="tab:cyan", label="QFI")
    ax1.loglog(c["n_bar"], c["sql_s2"], "-.", color="black", label="SQL")
    ax1.loglog(c["n_bar"], c["hl_s2"], "-", color="black", label="HL")
    ax1.set_ylabel(r"$F_h$ (s$^2$)")
    ax1.legend(loc="best")
    ax2.loglog(c["n_bar"], c["delta_h_numeric_per_t"], "o", ms=3,
               color="tab:red", label=r"$\delta h$ numeric")
    ax2.loglog(c["n_bar"], c["qcrb_per_t"], "-", color="tab:blue", label="QCRB")
    ax2.set_xlabel(r"$\bar{n}$")
    ax2.set_ylabel(r"$\delta h$ (units of $1/t$)")
    ax2.legend(loc="best")
    fig.tight_layout()
    return fig


def _fig3(tables):
    grid, min_curve = tables
    c = grid.columns
    a_vals = np.unique(c["alpha_sq"])
    s_vals = np.unique(c["sinh2r"])
    z = c["ln_qfi_over_t2"].reshape(len(a_vals), len(s_vals))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    pcm = ax.pcolormesh(a_vals, s_vals, z.T, shading="auto", cmap="viridis")
    fig.colorbar(pcm, ax=ax, label=r"$\ln(F_h/t^2)$")
    m = min_curve.columns
    ax.plot(m["alpha_sq"], m["sinh2r_min"], "w--", lw=1.5, label="minimum")
    for n_bar in m["n_bar"]:
        aa = np.linspace(max(a_vals[0], n_bar - s_vals[-1]), min(n_bar, a_vals[-1]), 64)
        ax.plot(aa, n_bar - aa, color="0.7", ls="-.", lw=0.8)
    ax.set_xlabel(r"$|\alpha|^2$")
    ax.set_ylabel(r"$\sinh^2 r$")
    ax.set_ylim(s_vals[0], s_vals[-1])
    ax.legend(loc="upper right")
    fig.tight_layout()
    return fig


def _fig4a(tables):
    grid, boundary = tables
    c = grid.columns
    tau_vals = np.unique(c["tau"])
    s_vals = np.unique(c["sinh2r"])
    z = c["sign_dqfi_dsinh2r"].reshape(len(tau_vals), len(s_vals))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.pcolormesh(s_vals, tau_vals, z, shading="auto", cmap="cool_r", vmin=-1, vmax=1)
    b = boundary.columns
    if b["tau"].size:
        ax.plot(b["sinh2r_zero"], b["tau"], "k-", lw=1.5, label="derivative zeros")
        top = b["sinh2r_zero"][np.argmax(b["tau"])]
        ax.axvline(top, color="black", ls="--", lw=1.0, label=r"$\sinh^2 r_{\min}$")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\sinh^2 r$")
    ax.set_ylabel(r"$\tau$")
    ax.legend(loc="lower right")
    fig.tight_layout()
    return fig


def _fig4b(tables):
    (table,) = tables
    c = table.columns
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(c["sinh2r"], c["var_n_tau_minus1"], "-", color="0.4", label=r"$\tau=-1$")
    ax.loglog(c["sinh2r"], c["var_n_tau0"], "-", color="tab:orange", label=r"$\tau=0$")
    ax.loglog(c["sinh2r"], c["var_n_tau_plus1"], "-", color="tab:green", label=r"$\tau=1$")
    ax.loglog(c["sinh2r"], c["var_minus_tau_minus1"], "s", ms=3, mfc="none",
              color="tab:blue", label=r"Var$_-|_{\tau=-1}$")
    ax.loglog(c["sinh2r"], c["var_plus_tau_plus1"], "^", ms=3, mfc="none",
              color="tab:red", label=r"Var$_+|_{\tau=1}$")
    ax.loglog(c["sinh2r"], c["two_nbar_sq"], "k:", label=r"$2\bar{n}^2$")
    ax.set_xlabel(r"$\sinh^2 r$")
    ax.set_ylabel(r"Var$(a^\dagger a)$")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    return fig


def _line_sweep(tables):
    (table,) = tables
    c = table.columns
    numeric = [k for k, v in c.items() if np.issubdtype(np.asarray(v).dtype, np.number)]
    if not numeric:
        return plt.figure()
    x_key = numeric[0]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for key in numeric[1:]:
        ax.plot(c[x_key], c[key], label=key)
    ax.set_xlabel(x_key)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4a": _fig4a,
    "fig4b": _fig4b,
    "qfi": _line_sweep,
    "precision": _line_sweep,
    "scan": _line_sweep,
}
