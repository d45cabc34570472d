"""Report files for harness runs: JSON, TSV summary, JSONL findings and figures."""

from __future__ import annotations

import csv
import io
import json
import os

from .io import atomic_write

SUMMARY_COLUMNS = [
    "pattern", "case", "in_scope", "q_condition", "forms_total", "forms_examined",
    "coverage", "det_buckets", "buckets_examined", "classes_escalated",
    "isospectral_pairs", "non_isometric", "undecided", "adjoint_checks", "adjoint_failures",
]


def summary_rows(report):
    rows = []
    for r in report.records:
        rows.append({
            "pattern": ",".join(map(str, r.pattern)),
            "case": r.case or "-",
            "in_scope": int(r.in_scope),
            "q_condition": "-" if r.q_condition is None else r.q_condition,
            "forms_total": r.forms_total,
            "forms_examined": r.forms_examined,
            "coverage": f"{r.coverage:.6f}",
            "det_buckets": r.det_buckets,
            "buckets_examined": r.buckets_examined,
            "classes_escalated": r.classes_escalated,
            "isospectral_pairs": r.isospectral_pairs,
            "non_isometric": len(r.non_isometric_isospectral),
            "undecided": len(r.undecided),
            "adjoint_checks": r.adjoint_checks,
            "adjoint_failures": len(r.adjoint_failures),
        })
    return rows


def summary_tsv(report) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, SUMMARY_COLUMNS, delimiter="\t", lineterminator="\n")
    w.writeheader()
    w.writerows(summary_rows(report))
    return buf.getvalue()


def timing_tsv(report) -> str:
    lines = ["pattern\tseconds"]
    for mu, s in report.timings.items():
        lines.append(f"{','.join(map(str, mu))}\t{s:.3f}")
    return "\n".join(lines) + "\n"


def plot_report(report, path):
    """Bar charts of forms examined and isospectral pairs per pattern, plus the
    bounds at which escalation separated colliding classes."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    recs = report.records
    labels = [",".join(map(str, r.pattern)) for r in recs]
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    ax = axes[0]
    x = range(len(recs))
    ax.bar(x, [max(r.forms_examined, 1) for r in recs], color=["C0" if r.in_scope else "C7" for r in recs])
    ax.set_yscale("log")
    ax.set_xticks(list(x), labels, rotation=60, fontsize=7)
    ax.set_ylabel("forms examined")
    ax.set_title(f"q={report.q}, rank {report.rank} (grey: outside scope)")
    for i, r in enumerate(recs):
        if r.non_isometric_isospectral:
            ax.annotate(str(len(r.non_isometric_isospectral)), (i, r.forms_examined), color="C3",
                        ha="center", va="bottom", fontsize=8)
    ax = axes[1]
    seps = {}
    for r in recs:
        for b, v in r.separation_bounds.items():
            seps[int(b)] = seps.get(int(b), 0) + v
    if seps:
        ks = sorted(seps)
        ax.bar(ks, [seps[k] for k in ks], color="C1")
        ax.set_xticks(ks)
    else:
        ax.text(0.5, 0.5, "no escalations needed", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("spectrum bound")
    ax.set_ylabel("classes separated")
    ax.set_title("escalation")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_report(report, outdir, figures=True):
    """Write report.json, summary.tsv, findings.jsonl, timing.tsv and report.png.

    Everything except timing.tsv is a function of the config alone."""
    os.makedirs(outdir, exist_ok=True)
    paths = {
        "json": os.path.join(outdir, "report.json"),
        "summary": os.path.join(outdir, "summary.tsv"),
        "findings": os.path.join(outdir, "findings.jsonl"),
        "timing": os.path.join(outdir, "timing.tsv"),
    }
    atomic_write(paths["json"], json.dumps(report.to_json(), sort_keys=True, indent=1) + "\n")
    atomic_write(paths["summary"], summary_tsv(report))
    atomic_write(paths["findings"], report.findings_jsonl())
    atomic_write(paths["timing"], timing_tsv(report))
    if figures:
        paths["figure"] = os.path.join(outdir, "report.png")
        plot_report(report, paths["figure"])
    return paths
