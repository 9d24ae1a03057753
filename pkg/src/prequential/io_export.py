"""Results CSV, summary JSON, config files and SVG figures.

Numbers are written with 17 significant digits so every float64 survives a
write/read round trip and repeated runs can be compared byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from typing import Any, Iterable, Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .exceptions import ConfigError, EmptyResultsError
from .experiment import (
    ClassificationSummary,
    Contamination,
    ExperimentConfig,
    ReplicationResult,
    outcome_category,
)
from .models import ProcessModel
from .scoring import Decision

__all__ = [
    "CSV_HEADER",
    "CONFIG_KEYS",
    "config_from_mapping",
    "config_to_dict",
    "dumps_config",
    "load_config",
    "read_results_csv",
    "render_scatter_svg",
    "render_series_svg",
    "results_to_csv",
    "write_results_csv",
    "write_summary_json",
]

CSV_HEADER = ("rep_id", "delta_log", "delta_hyv", "decision_log", "decision_hyv")

_MODEL_FIELDS = ("mean", "phi", "innovation_variance")
CONFIG_KEYS = (
    "replications",
    "series_length",
    *(f"model_p.{f}" for f in _MODEL_FIELDS),
    *(f"model_q.{f}" for f in _MODEL_FIELDS),
    "generator",
    "contamination.index",
    "contamination.shift",
    "seed",
    "cutoff",
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def results_to_csv(results: Iterable[ReplicationResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in results:
        writer.writerow(
            [
                r.rep_id,
                _fmt(r.cumulative_log),
                _fmt(r.cumulative_hyv),
                r.decision_log.value,
                r.decision_hyv.value,
            ]
        )
    return buf.getvalue()


def write_results_csv(results: Iterable[ReplicationResult], destination) -> None:
    """Write one row per replication; ``destination`` is a path or text file."""
    text = results_to_csv(results)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_results_csv(source) -> list[ReplicationResult]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"results CSV must start with header {','.join(CSV_HEADER)}")
    return [
        ReplicationResult(int(a), float(b), float(c), Decision(d), Decision(e))
        for a, b, c, d, e in rows[1:]
    ]


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    """Nested plain-dict form, the same layout ``load_config`` accepts."""

    def model(m: ProcessModel) -> dict[str, float]:
        return {f: float(getattr(m, f)) for f in _MODEL_FIELDS}

    c = config.contamination
    return {
        "replications": config.replications,
        "series_length": config.series_length,
        "model_p": model(config.model_p),
        "model_q": model(config.model_q),
        "generator": config.generator,
        "contamination": None if c is None else {"index": c.index, "shift": float(c.shift)},
        "seed": config.seed,
        "cutoff": float(config.cutoff),
    }


def dumps_config(config: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2) + "\n"


def _flatten(mapping: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in mapping.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat


def _number(flat, key, kind):
    value = flat[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}", key)
    if kind is int:
        if isinstance(value, float):
            if not value.is_integer():
                raise ConfigError(f"{key} must be an integer, got {value!r}", key)
            value = int(value)
        return value
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite", key)
    return value


def config_from_mapping(
    mapping: Mapping[str, Any], base: ExperimentConfig | None = None
) -> ExperimentConfig:
    """Build a config from nested and/or dotted keys.

    Keys absent from ``mapping`` keep their value in ``base`` (paper
    defaults when omitted). Unknown keys raise :class:`ConfigError`.
    ``"contamination": null`` switches contamination off.
    """
    base = base if base is not None else ExperimentConfig()
    raw = dict(mapping)
    no_contamination = "contamination" in raw and raw["contamination"] is None
    if no_contamination:
        del raw["contamination"]
    flat = _flatten(raw)
    unknown = sorted(set(flat) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key {unknown[0]!r}", unknown[0])

    values = config_to_dict(base)
    values = _flatten({k: v for k, v in values.items() if v is not None})
    values.update(flat)

    models = {}
    for name in ("model_p", "model_q"):
        kwargs = {f: _number(values, f"{name}.{f}", float) for f in _MODEL_FIELDS}
        try:
            models[name] = ProcessModel(**kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc), f"{name}.innovation_variance") from None

    contamination = None
    has_index = "contamination.index" in values
    has_shift = "contamination.shift" in values
    if not no_contamination and (has_index or has_shift):
        if not (has_index and has_shift):
            missing = "contamination.shift" if has_index else "contamination.index"
            raise ConfigError(f"{missing} is required with contamination", missing)
        contamination = Contamination(
            _number(values, "contamination.index", int),
            _number(values, "contamination.shift", float),
        )

    generator = values["generator"]
    if generator not in ("P", "Q"):
        raise ConfigError(f"generator must be 'P' or 'Q', got {generator!r}", "generator")

    return ExperimentConfig(
        replications=_number(values, "replications", int),
        series_length=_number(values, "series_length", int),
        model_p=models["model_p"],
        model_q=models["model_q"],
        generator=generator,
        contamination=contamination,
        seed=_number(values, "seed", int),
        cutoff=_number(values, "cutoff", float),
    )


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_mapping(data, base)


# ---------------------------------------------------------------------------
# Summary JSON
# ---------------------------------------------------------------------------


def summary_document(summary: ClassificationSummary, config: ExperimentConfig) -> dict:
    doc: dict[str, Any] = dict(summary.as_dict())
    doc["replications"] = summary.total
    doc["config"] = config_to_dict(config)
    doc["version"] = __version__
    return doc


def write_summary_json(summary: ClassificationSummary, config: ExperimentConfig, destination) -> None:
    """Counts at top level, ``config`` echo (loadable by ``load_config``) and version."""
    text = json.dumps(summary_document(summary, config), indent=2) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

CATEGORY_COLORS = {
    "both_correct": "#9e9e9e",
    "both_wrong": "#1f77b4",
    "only_hyv_wrong": "#ff7f0e",
    "only_log_wrong": "#2ca02c",
    "any_tie": "#000000",
}
CATEGORY_LABELS = {
    "both_correct": "both correct",
    "both_wrong": "both wrong",
    "only_hyv_wrong": "Hyvarinen only wrong",
    "only_log_wrong": "log only wrong",
    "any_tie": "tie",
}
OUTLIER_COLOR = "#ff0000"

_W, _H = 480, 400
_MARGIN = dict(left=70, right=20, top=30, bottom=55)


class _Axes:
    def __init__(self, xlim, ylim, width=_W, height=_H, margin=_MARGIN):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.left = margin["left"]
        self.right = width - margin["right"]
        self.top = margin["top"]
        self.bottom = height - margin["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _limits(values, include_zero=False):
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if include_zero:
        lo, hi = min(lo, 0.0), max(hi, 0.0)
    scale = max(abs(lo), abs(hi), 1.0)
    if hi - lo <= 1e-9 * scale:
        pad = max(scale * 0.1, 1.0)
    else:
        pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _num(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo, hi, count=5):
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


def _frame(ax: _Axes, xlabel: str, ylabel: str, title: str) -> list[str]:
    parts = [
        f'<rect x="{_num(ax.left)}" y="{_num(ax.top)}" width="{_num(ax.right - ax.left)}" '
        f'height="{_num(ax.bottom - ax.top)}" fill="none" stroke="#000"/>',
        f'<text x="{_num((ax.left + ax.right) / 2)}" y="{_H - 12}" text-anchor="middle" '
        f'font-size="13">{escape(xlabel)}</text>',
        f'<text x="16" y="{_num((ax.top + ax.bottom) / 2)}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {_num((ax.top + ax.bottom) / 2)})">{escape(ylabel)}</text>',
        f'<text x="{_num((ax.left + ax.right) / 2)}" y="18" text-anchor="middle" '
        f'font-size="14">{escape(title)}</text>',
    ]
    for t in _ticks(ax.x0, ax.x1):
        x = ax.px(t)
        parts.append(
            f'<line x1="{_num(x)}" y1="{_num(ax.bottom)}" x2="{_num(x)}" '
            f'y2="{_num(ax.bottom + 5)}" stroke="#000"/>'
            f'<text x="{_num(x)}" y="{_num(ax.bottom + 18)}" text-anchor="middle" '
            f'font-size="10">{t:g}</text>'
        )
    for t in _ticks(ax.y0, ax.y1):
        y = ax.py(t)
        parts.append(
            f'<line x1="{_num(ax.left - 5)}" y1="{_num(y)}" x2="{_num(ax.left)}" '
            f'y2="{_num(y)}" stroke="#000"/>'
            f'<text x="{_num(ax.left - 8)}" y="{_num(y + 3)}" text-anchor="end" '
            f'font-size="10">{t:g}</text>'
        )
    return parts


def _document(parts: Sequence[str]) -> str:
    body = "\n".join(parts)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" '
        f'height="{_H}" viewBox="0 0 {_W} {_H}">\n'
        f'<rect width="{_W}" height="{_H}" fill="#fff"/>\n{body}\n</svg>\n'
    )


def _write_text(text: str, destination) -> None:
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def scatter_svg(
    results: Sequence[ReplicationResult],
    truth: str,
    highlight: Iterable[int] = (),
    title: str = "Cumulative delta scores",
) -> str:
    """Hyvarinen vs log cumulative deltas, one circle per replication.

    Circles carry ``class="point <category>"``; replications listed in
    ``highlight`` get a black centre dot.
    """
    results = list(results)
    if not results:
        raise EmptyResultsError("scatter plot needs at least one result")
    xs = [r.cumulative_log for r in results]
    ys = [r.cumulative_hyv for r in results]
    ax = _Axes(_limits(xs, True), _limits(ys, True))
    parts = _frame(ax, "cumulative delta log-score", "cumulative delta Hyvarinen score", title)
    zx, zy = ax.px(0.0), ax.py(0.0)
    parts.append(
        f'<line class="zero" x1="{_num(zx)}" y1="{_num(ax.top)}" x2="{_num(zx)}" '
        f'y2="{_num(ax.bottom)}" stroke="#555" stroke-dasharray="4 3"/>'
    )
    parts.append(
        f'<line class="zero" x1="{_num(ax.left)}" y1="{_num(zy)}" x2="{_num(ax.right)}" '
        f'y2="{_num(zy)}" stroke="#555" stroke-dasharray="4 3"/>'
    )
    marked = set(highlight)
    centres = []
    seen = []
    for r in results:
        cat = outcome_category(r, truth)
        if cat not in seen:
            seen.append(cat)
        x, y = ax.px(r.cumulative_log), ax.py(r.cumulative_hyv)
        parts.append(
            f'<circle class="point {cat}" data-rep="{r.rep_id}" cx="{_num(x)}" cy="{_num(y)}" '
            f'r="3.5" fill="{CATEGORY_COLORS[cat]}" fill-opacity="0.8"/>'
        )
        if r.rep_id in marked:
            centres.append(
                f'<circle class="highlight" cx="{_num(x)}" cy="{_num(y)}" r="1.5" fill="#000"/>'
            )
    parts.extend(centres)
    for k, cat in enumerate(c for c in CATEGORY_COLORS if c in seen):
        y = ax.top + 12 + 14 * k
        parts.append(
            f'<circle class="legend" cx="{_num(ax.left + 10)}" cy="{_num(y)}" r="4" '
            f'fill="{CATEGORY_COLORS[cat]}"/>'
            f'<text x="{_num(ax.left + 18)}" y="{_num(y + 4)}" font-size="11">'
            f"{escape(CATEGORY_LABELS[cat])}</text>"
        )
    return _document(parts)


def render_scatter_svg(results, truth, destination, highlight: Iterable[int] = (), title=None) -> None:
    kwargs = {} if title is None else {"title": title}
    _write_text(scatter_svg(results, truth, highlight, **kwargs), destination)


def series_svg(series, contamination_index: int | None = None, title: str = "Series") -> str:
    """Polyline of the series against its 1-based index.

    The contaminated observation, when given, is a red ``class="outlier"``
    circle.
    """
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("series must be a non-empty 1-D sequence")
    idx = np.arange(1, y.size + 1, dtype=np.float64)
    ax = _Axes(_limits(idx), _limits(y))
    parts = _frame(ax, "observation index", "value", title)
    points = " ".join(f"{_num(ax.px(i))},{_num(ax.py(v))}" for i, v in zip(idx, y))
    parts.append(f'<polyline class="series" points="{points}" fill="none" stroke="#333"/>')
    if contamination_index is not None:
        if not 1 <= contamination_index <= y.size:
            raise IndexError(f"contamination index {contamination_index} outside 1..{y.size}")
        i = contamination_index
        parts.append(
            f'<circle class="outlier" data-index="{i}" cx="{_num(ax.px(i))}" '
            f'cy="{_num(ax.py(y[i - 1]))}" r="4" fill="{OUTLIER_COLOR}"/>'
        )
    return _document(parts)


def render_series_svg(series, contamination_index, destination, title: str = "Series") -> None:
    _write_text(series_svg(series, contamination_index, title), destination)


def ensure_dir(path) -> None:
    os.makedirs(path, exist_ok=True)
