"""Figure rendering for CLI reports.

Each helper draws one small matplotlib figure summarizing a report and saves
it under the requested directory.  matplotlib is imported lazily with the
Agg backend so report generation itself never needs a display.
"""

from __future__ import annotations

import os
import re


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_") or "unnamed"


def _finish(fig, directory: str, filename: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, filename)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    _plt().close(fig)
    return path


def render_entropy_figure(report: dict, directory: str) -> str:
    """W spectrum plus the inequality slacks for an entropy report."""
    plt = _plt()
    fig, (ax_w, ax_ineq) = plt.subplots(1, 2, figsize=(8, 3))
    eigenvalues = report["w_eigenvalues"]
    ax_w.bar(range(len(eigenvalues)), eigenvalues, color="tab:blue")
    ax_w.set_xlabel("branch")
    ax_w.set_ylabel("W eigenvalue")
    ax_w.set_title(
        f"F_e = {report['entanglement_fidelity']:.4f}, "
        f"S_e = {report['entropy_exchange']:.4f}"
    )
    checks = list(report["subadditivity"]["checks"]) + [report_fano_as_check(report)]
    names = [c["name"] for c in checks]
    slacks = [c["slack"] for c in checks]
    colors = ["tab:green" if c["holds"] else "tab:red" for c in checks]
    ax_ineq.barh(range(len(names)), slacks, color=colors)
    ax_ineq.set_yticks(range(len(names)))
    ax_ineq.set_yticklabels(names, fontsize=7)
    ax_ineq.axvline(0.0, color="black", linewidth=0.8)
    ax_ineq.set_xlabel("slack (bits)")
    ax_ineq.set_title("inequality slack")
    name = f"entropy_{_slug(report['operation'])}_{_slug(report['state'])}.png"
    return _finish(fig, directory, name)


def report_fano_as_check(report: dict) -> dict:
    fano = report["fano"]
    return {"name": "fano", "slack": fano["slack"], "holds": fano["holds"]}


def render_reversal_figure(report: dict, directory: str) -> str:
    """Weight spectrum d_j of the reversal construction."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(4.5, 3))
    weights = report["weights"]
    ax.bar(range(len(weights)), weights, color="tab:purple")
    ax.set_xlabel("syndrome")
    ax.set_ylabel("weight d_j")
    degenerate = " (degenerate)" if report["degenerate"] else ""
    ax.set_title(f"mu^2 = {report['mu_squared']:.4f}{degenerate}")
    name = f"reversal_{_slug(report['operation'])}_{_slug(report['code'])}.png"
    return _finish(fig, directory, name)


def render_demon_figure(report: dict, directory: str) -> str:
    """Ledger bars for the Second-Law chain of one correction cycle."""
    plt = _plt()
    ledger = report["ledger"]
    fig, ax = plt.subplots(figsize=(5, 3))
    labels = ["avg record", "H(p)", "S_e", "-dS_c"]
    values = [
        ledger["avg_record_length"],
        ledger["shannon_h"],
        ledger["entropy_exchange_reversal"],
        -ledger["delta_s_c"],
    ]
    ax.bar(labels, values, color=["tab:gray", "tab:blue", "tab:orange", "tab:green"])
    ax.set_ylabel("bits")
    closed = "closed" if ledger["cycle_closed"] else "NOT closed"
    holds = "chain holds" if ledger["chain_holds"] else "chain VIOLATED"
    ax.set_title(f"cycle {closed}, {holds}", fontsize=9)
    name = f"demon_{_slug(report['noise'])}_{_slug(report['scheme'])}.png"
    return _finish(fig, directory, name)
