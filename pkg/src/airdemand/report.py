"""Plain-text tables, SVG scatter plots, CSV and JSON dumps of a run."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .data import RPK_UNIT
from .pipeline import SCOPES, ComparisonReport, EvaluationReport, ModelEvaluation
from .stats import AnovaTable, FitLine, PairwiseMatrix, pct_of_reference

ALL_FORMATS = ("text", "svg", "csv", "json")


def fixed(x: float, digits: int = 3) -> str:
    """Fixed-point formatting that never prints a negative zero."""
    s = f"{x:.{digits}f}"
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def format_p(p: float, alpha: float) -> str:
    """Three decimals, ``<0.001`` below that, ``*`` appended when p < alpha."""
    body = "<0.001" if p < 0.001 else f"{p:.3f}"
    return body + ("*" if p < alpha else "")


def _grid(rows: Sequence[Sequence[str]], first_width: int | None = None) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    if first_width:
        widths[0] = max(widths[0], first_width)
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def ranked(report: EvaluationReport) -> list[ModelEvaluation]:
    return sorted(report.evaluations, key=lambda ev: ev.rmse["all"])


# --- tables ------------------------------------------------------------------------


def render_rmse_table(report: EvaluationReport) -> str:
    order = ranked(report)
    n = report.dataset.n
    out = [
        f"RMSE by model in {RPK_UNIT}, over all {n} rows, best to worst",
        "",
        _grid(
            [
                ["", *(ev.label for ev in order)],
                ["RMSE", *(f"{ev.rmse['all']:.6g}" for ev in order)],
                ["% of ref", *(fixed(pct_of_reference(ev.rmse["all"], report.reference_total), 2) for ev in order)],
            ]
        ),
        f"reference total: {report.reference_total!r}",
        "",
        "RMSE by subset",
        "",
    ]
    rows = [["model", *SCOPES, "beta", "alpha", "R2"]]
    for ev in order:
        rows.append(
            [
                ev.label,
                *("-" if ev.rmse[s] is None else f"{ev.rmse[s]:.6g}" for s in SCOPES),
                fixed(ev.fit.beta),
                fixed(ev.fit.alpha),
                fixed(ev.fit.r2),
            ]
        )
    out.append(_grid(rows))
    return "\n".join(out)


def render_anova(table: AnovaTable, k: int, n: int) -> str:
    rows = [
        ["", "SS", "df", "MS", "F", "p"],
        ["Between", repr(table.ss_between), str(table.df_between), repr(table.ms_between), repr(table.f_stat), repr(table.p_value)],
        ["Within", repr(table.ss_within), str(table.df_within), repr(table.ms_within), "", ""],
        ["Total", repr(table.ss_total), str(table.df_total), "", "", ""],
    ]
    head = f"One-way ANOVA on per-row squared errors ({k} models x {n} rows)\n\n"
    return head + _grid(rows)


def posthoc_triangle(pw: PairwiseMatrix) -> list[list[str]]:
    """Upper-triangular grid of directional p-values with row/column headers."""
    names = pw.names
    k = len(names)
    rows = [["", *names[1:]]]
    for i in range(k - 1):
        row = [names[i]]
        for j in range(1, k):
            row.append(format_p(pw.directional(i, j)[0], pw.alpha) if j > i else "-")
        rows.append(row)
    return rows


def render_posthoc(pw: PairwiseMatrix) -> str:
    names, k = pw.names, len(pw.names)
    out = [
        f"Post hoc one-sided two-sample t-tests ({pw.variant}) on per-row squared errors, p-values",
        f"Each cell tests the pair in the direction of the observed difference; * marks p < {pw.alpha}",
        "",
        _grid(posthoc_triangle(pw)),
        "Lower mean squared error in each pair",
        "",
    ]
    rows = [["", *names[1:]]]
    for i in range(k - 1):
        rows.append([names[i], *(names[pw.directional(i, j)[1]] if j > i else "-" for j in range(1, k))])
    out.append(_grid(rows))

    out += [
        "Extension: full ordered matrix, p-value for 'row has smaller squared errors than column'",
        "",
    ]
    rows = [["", *names]]
    for i in range(k):
        rows.append([names[i], *("-" if i == j else format_p(pw.p[i, j], pw.alpha) for j in range(k))])
    out.append(_grid(rows))

    out += [f"Extension: Bonferroni-adjusted directional p-values ({k * (k - 1) // 2} comparisons)", ""]
    rows = [["", *names[1:]]]
    for i in range(k - 1):
        rows.append(
            [names[i], *(format_p(pw.bonferroni(pw.directional(i, j)[0]), pw.alpha) if j > i else "-" for j in range(1, k))]
        )
    out.append(_grid(rows))
    return "\n".join(out)


# --- scatter plots -----------------------------------------------------------------


def fit_annotation(fit: FitLine) -> str:
    return f"β={fixed(fit.beta)}, α={fixed(fit.alpha)}, R²={fixed(fit.r2)}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks, t = [], first
    while t <= hi + 1e-9 * span:
        ticks.append(t)
        t += step
    return ticks


def render_scatter(ev: ModelEvaluation, actual: np.ndarray, size: int = 480) -> str:
    pred = ev.predictions
    lo = float(min(actual.min(), pred.min()))
    hi = float(max(actual.max(), pred.max()))
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    lo, hi = lo - pad, hi + pad
    left, right, top, bottom = 70, 20, 40, 55
    w, h = size - left - right, size - top - bottom

    def sx(v):
        return left + (v - lo) / (hi - lo) * w

    def sy(v):
        return top + h - (v - lo) / (hi - lo) * h

    def num(v):
        return f"{v:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<text x="{size / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="14">'
        f"{escape(ev.label)} results for all {actual.size} rows</text>",
        f'<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(lo, hi):
        x, y = sx(t), sy(t)
        label = f"{t:.6g}"
        parts.append(f'<line x1="{num(x)}" y1="{top + h}" x2="{num(x)}" y2="{top + h + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{num(x)}" y="{top + h + 18}" text-anchor="middle" font-family="sans-serif" font-size="10">{label}</text>'
        )
        parts.append(f'<line x1="{left - 5}" y1="{num(y)}" x2="{left}" y2="{num(y)}" stroke="black"/>')
        parts.append(
            f'<text x="{left - 8}" y="{num(y + 3)}" text-anchor="end" font-family="sans-serif" font-size="10">{label}</text>'
        )
    parts.append(
        f'<text x="{left + w / 2:.1f}" y="{size - 12}" text-anchor="middle" font-family="sans-serif" font-size="12">'
        f"actual ({escape(RPK_UNIT)})</text>"
    )
    parts.append(
        f'<text x="16" y="{top + h / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {top + h / 2:.1f})">predicted ({escape(RPK_UNIT)})</text>'
    )
    # ideal line y = x, then the fitted line
    parts.append(
        f'<line x1="{num(sx(lo))}" y1="{num(sy(lo))}" x2="{num(sx(hi))}" y2="{num(sy(hi))}" '
        'stroke="grey" stroke-dasharray="4 3"/>'
    )
    a0, a1 = float(actual.min()), float(actual.max())
    f0, f1 = ev.fit.beta * a0 + ev.fit.alpha, ev.fit.beta * a1 + ev.fit.alpha
    parts.append(
        f'<line x1="{num(sx(a0))}" y1="{num(sy(f0))}" x2="{num(sx(a1))}" y2="{num(sy(f1))}" stroke="crimson" stroke-width="1.5"/>'
    )
    for a, p in zip(actual, pred):
        parts.append(f'<circle cx="{num(sx(a))}" cy="{num(sy(p))}" r="3" fill="steelblue"/>')
    parts.append(
        f'<text x="{left + 10}" y="{top + 18}" font-family="sans-serif" font-size="12">{escape(fit_annotation(ev.fit))}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- machine-readable dumps ----------------------------------------------------------


def render_predictions_csv(report: EvaluationReport) -> str:
    plan = report.plan
    subset = {}
    for scope in ("train", "test", "valid"):
        for i in plan.subset(scope):
            subset[i] = scope
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quarter", "subset", "actual", *report.labels])
    for i, q in enumerate(report.dataset.quarters):
        w.writerow([q, subset[i], repr(float(report.dataset.target[i])), *(repr(float(ev.predictions[i])) for ev in report.evaluations)])
    return buf.getvalue()


def _finite(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def render_json(report: EvaluationReport, comparison: ComparisonReport) -> str:
    doc = {
        "metadata": dict(report.metadata),
        "unit": RPK_UNIT,
        "reference_total": report.reference_total,
        "models": [
            {
                "key": ev.key,
                "label": ev.label,
                "rmse": dict(ev.rmse),
                "pct_of_reference": pct_of_reference(ev.rmse["all"], report.reference_total),
                "fit_line": {"beta": ev.fit.beta, "alpha": ev.fit.alpha, "r2": ev.fit.r2},
            }
            for ev in report.evaluations
        ],
    }
    c = comparison.comparison
    if c is None:
        doc["comparison"] = {"notice": comparison.notice}
    else:
        a = c.anova
        doc["comparison"] = {
            "anova": {
                "ss": [a.ss_between, a.ss_within, a.ss_total],
                "df": [a.df_between, a.df_within, a.df_total],
                "ms": [a.ms_between, a.ms_within],
                "f": _finite(a.f_stat),
                "p": a.p_value,
            },
            "variant": c.pairwise.variant,
            "alpha": c.pairwise.alpha,
            "names": list(c.pairwise.names),
            "p_ordered": [[_finite(v) for v in row] for row in c.pairwise.p],
        }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# --- entry point ---------------------------------------------------------------------


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def render_report(
    report: EvaluationReport,
    comparison: ComparisonReport | None,
    out_dir: str | Path,
    formats: Iterable[str] = ALL_FORMATS,
) -> list[Path]:
    """Write every artifact under ``out_dir``; returns the paths written.

    With ``comparison=None`` the ANOVA and post hoc files are skipped."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    formats = set(formats)
    files: dict[str, str] = {}
    if "text" in formats:
        files["rmse_table.txt"] = render_rmse_table(report)
        if comparison is None:
            pass
        elif comparison.comparison is None:
            files["anova.txt"] = comparison.notice + "\n"
            files["posthoc.txt"] = comparison.notice + "\n"
        else:
            c = comparison.comparison
            files["anova.txt"] = render_anova(c.anova, len(report.evaluations), report.dataset.n)
            files["posthoc.txt"] = render_posthoc(c.pairwise)
        for ev in report.evaluations:
            files[f"model_{ev.key}.txt"] = ev.model.to_record()
    if "svg" in formats:
        for ev in report.evaluations:
            files[f"scatter_{ev.key}.svg"] = render_scatter(ev, report.dataset.target)
    if "csv" in formats:
        files["predictions.csv"] = render_predictions_csv(report)
    if "json" in formats:
        files["report.json"] = render_json(report, comparison or ComparisonReport(None, "comparison not requested"))
    written = []
    for name, text in files.items():
        _write(out / name, text)
        written.append(out / name)
    return written
