"""Seeded Monte Carlo comparison of two AR(1) models.

Each replication ``r`` draws its standard normals from ``make_rng(seed, r)``,
so results depend only on the config and never on how replications are
split across worker threads. Contamination is applied after simulation:
a contaminated run and a clean run with the same seed score the same
underlying series.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal, Sequence

import numpy as np

from . import kernels
from .exceptions import ConfigError, EmptyResultsError, ReplicationError
from .models import ProcessModel, contaminate, make_rng
from .scoring import Decision, classify

__all__ = [
    "DEFAULT_SEED",
    "ClassificationSummary",
    "Contamination",
    "ExperimentConfig",
    "ReplicationResult",
    "paper_default_config",
    "replication_series",
    "run_experiment",
    "summarize",
]

DEFAULT_SEED = 1
_CHUNK = 64

Truth = Literal["P", "Q"]


@dataclass(frozen=True)
class Contamination:
    """Additive outlier: ``shift`` added to observation ``index`` (1-based)."""

    index: int
    shift: float


@dataclass(frozen=True)
class ExperimentConfig:
    replications: int = 100
    series_length: int = 101
    model_p: ProcessModel = field(default_factory=lambda: ProcessModel(0.0, 0.5, 1.0))
    model_q: ProcessModel = field(default_factory=lambda: ProcessModel(0.0, 0.1, 4.0))
    generator: Truth = "P"
    contamination: Contamination | None = None
    seed: int = DEFAULT_SEED
    cutoff: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.replications, int) or self.replications < 1:
            raise ConfigError("replications must be an integer >= 1", "replications")
        if not isinstance(self.series_length, int) or self.series_length < 2:
            raise ConfigError("series_length must be an integer >= 2", "series_length")
        if self.generator not in ("P", "Q"):
            raise ConfigError("generator must be 'P' or 'Q'", "generator")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer", "seed")
        if not math.isfinite(self.cutoff):
            raise ConfigError("cutoff must be finite", "cutoff")
        c = self.contamination
        if c is not None:
            if not 1 <= c.index <= self.series_length:
                raise ConfigError(
                    f"contamination index {c.index} outside 1..{self.series_length}",
                    "contamination.index",
                )
            if not math.isfinite(c.shift):
                raise ConfigError("contamination shift must be finite", "contamination.shift")

    @property
    def generating_model(self) -> ProcessModel:
        return self.model_p if self.generator == "P" else self.model_q

    def with_contamination(self, index: int, shift: float) -> "ExperimentConfig":
        return replace(self, contamination=Contamination(index, shift))


def paper_default_config(seed: int = DEFAULT_SEED) -> ExperimentConfig:
    """100 series of length 101 from P = AR(1)(phi=0.5, var=1) vs Q = AR(1)(phi=0.1, var=4)."""
    return ExperimentConfig(seed=seed)


@dataclass(frozen=True)
class ReplicationResult:
    rep_id: int
    cumulative_log: float
    cumulative_hyv: float
    decision_log: Decision
    decision_hyv: Decision


@dataclass(frozen=True)
class ClassificationSummary:
    both_correct: int = 0
    both_wrong: int = 0
    only_hyv_wrong: int = 0
    only_log_wrong: int = 0
    any_tie: int = 0

    @property
    def total(self) -> int:
        return (
            self.both_correct
            + self.both_wrong
            + self.only_hyv_wrong
            + self.only_log_wrong
            + self.any_tie
        )

    @property
    def hyv_wrong(self) -> int:
        return self.both_wrong + self.only_hyv_wrong

    @property
    def log_wrong(self) -> int:
        return self.both_wrong + self.only_log_wrong

    def as_dict(self) -> dict[str, int]:
        return {
            "both_correct": self.both_correct,
            "both_wrong": self.both_wrong,
            "only_hyv_wrong": self.only_hyv_wrong,
            "only_log_wrong": self.only_log_wrong,
            "any_tie": self.any_tie,
        }

    def __add__(self, other: "ClassificationSummary") -> "ClassificationSummary":
        a, b = self.as_dict(), other.as_dict()
        return ClassificationSummary(**{k: a[k] + b[k] for k in a})


def _simulate_block(config: ExperimentConfig, rep_ids: Sequence[int]) -> np.ndarray:
    model = config.generating_model
    n = config.series_length
    z = np.empty((len(rep_ids), n))
    for row, rep in enumerate(rep_ids):
        z[row] = make_rng(config.seed, rep).standard_normal(n)
    xs = kernels.ar1_paths(z, model.mean, model.phi, model.innovation_variance)
    if config.contamination is not None:
        xs[:, config.contamination.index - 1] += config.contamination.shift
    return xs


def replication_series(config: ExperimentConfig, rep_id: int) -> np.ndarray:
    """The exact (possibly contaminated) series scored in replication ``rep_id``."""
    config.generating_model.require_stationary()
    model = config.generating_model
    z = make_rng(config.seed, rep_id).standard_normal((1, config.series_length))
    x = kernels.ar1_paths(z, model.mean, model.phi, model.innovation_variance)[0]
    if config.contamination is not None:
        x = contaminate(x, config.contamination.index, config.contamination.shift)
    return x


def _score_block(config: ExperimentConfig, rep_ids: Sequence[int]):
    xs = _simulate_block(config, rep_ids)
    p, q = config.model_p, config.model_q
    c_log, c_hyv = kernels.cumulative_deltas(
        xs,
        p.mean, p.phi, p.innovation_variance,
        q.mean, q.phi, q.innovation_variance,
    )
    bad = ~(np.isfinite(c_log) & np.isfinite(c_hyv))
    if bad.any():
        rep = rep_ids[int(np.argmax(bad))]
        raise ReplicationError(rep, FloatingPointError("non-finite cumulative delta"))
    return c_log, c_hyv


def _run_block(config: ExperimentConfig, rep_ids: Sequence[int]) -> list[ReplicationResult]:
    try:
        c_log, c_hyv = _score_block(config, rep_ids)
    except ReplicationError:
        raise
    except Exception as exc:
        if len(rep_ids) == 1:
            raise ReplicationError(rep_ids[0], exc) from exc
        # rerun singly so the error names the failing replication
        for rep in rep_ids:
            _run_block(config, [rep])
        raise
    cutoff = config.cutoff
    return [
        ReplicationResult(
            rep,
            float(cl),
            float(ch),
            classify(float(cl), cutoff),
            classify(float(ch), cutoff),
        )
        for rep, cl, ch in zip(rep_ids, c_log, c_hyv)
    ]


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[ReplicationResult]:
    """Run every replication and return results ordered by ``rep_id``.

    ``workers > 1`` spreads blocks of replications over a thread pool; the
    kernels release the GIL under numba. Output is identical for any
    ``workers`` value.
    """
    try:
        config.generating_model.require_stationary()
    except Exception as exc:
        raise ReplicationError(0, exc) from exc
    ids = list(range(config.replications))
    blocks = [ids[i : i + _CHUNK] for i in range(0, len(ids), _CHUNK)]
    if workers <= 1 or len(blocks) == 1:
        parts = [_run_block(config, b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_block(config, b), blocks))
    return [r for part in parts for r in part]


def _is_correct(decision: Decision, truth: Truth) -> bool:
    return decision.value == truth


def summarize(results: Iterable[ReplicationResult], truth: Truth) -> ClassificationSummary:
    """Cross-tabulate both rules' decisions against the generating model.

    A tie under either rule puts the replication in ``any_tie``.
    """
    if truth not in ("P", "Q"):
        raise ValueError("truth must be 'P' or 'Q'")
    counts = dict.fromkeys(ClassificationSummary().as_dict(), 0)
    n = 0
    for res in results:
        n += 1
        if Decision.TIE in (res.decision_log, res.decision_hyv):
            counts["any_tie"] += 1
            continue
        log_ok = _is_correct(res.decision_log, truth)
        hyv_ok = _is_correct(res.decision_hyv, truth)
        if log_ok and hyv_ok:
            counts["both_correct"] += 1
        elif not log_ok and not hyv_ok:
            counts["both_wrong"] += 1
        elif log_ok:
            counts["only_hyv_wrong"] += 1
        else:
            counts["only_log_wrong"] += 1
    if n == 0:
        raise EmptyResultsError("cannot summarize an empty result list")
    return ClassificationSummary(**counts)


def outcome_category(result: ReplicationResult, truth: Truth) -> str:
    """Name of the summary cell a single result falls in."""
    return next(k for k, v in summarize([result], truth).as_dict().items() if v)
