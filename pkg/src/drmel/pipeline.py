"""CSV ingestion and with-replacement resampling studies on real data.

Yearly (or otherwise grouped) observations are read from a CSV file,
optionally log-transformed, and treated as fixed populations. Repeated
subsamples drawn with replacement feed the same estimators as the
synthetic Monte Carlo engine, with the full-data empirical quantiles of
each target population taken as the truth.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec
from .errors import (
    CsvParseError,
    DrmError,
    EmptyGroupError,
    InvalidArgumentError,
    InvalidLevelError,
)
from .estimators import drm_quantile, estimate_g1
from .fit import TwoSampleData, fit_mele
from .nonparametric import Ecdf, empirical_quantile
from .parametric import EXPONENTIAL, NORMAL_COMMON, NORMAL_FREE, fit_parametric, _target_quantile
from .simulate import SimulationRow, SimulationTable, replicate_rng

__all__ = [
    "ColumnSpec",
    "IngestReport",
    "ResampleStudy",
    "ingest_csv",
    "run_resample_study",
    "STUDY_METHODS",
]

_DRM_METHODS = {
    "drm-linear": "linear",
    "drm-quadratic": "quadratic",
    "drm-linear-log": "linear-log",
}
_PARAMETRIC_METHODS = {
    "parametric-normal": NORMAL_FREE,
    "parametric-normal-common": NORMAL_COMMON,
    "parametric-exponential": EXPONENTIAL,
}
STUDY_METHODS = tuple(_DRM_METHODS) + tuple(_PARAMETRIC_METHODS) + ("empirical",)


@dataclass(frozen=True)
class ColumnSpec:
    value_column: str
    group_column: str
    transform: str = "none"  # "none" | "log"

    def __post_init__(self):
        if self.transform not in ("none", "log"):
            raise InvalidArgumentError(f"unknown transform {self.transform!r}")


@dataclass(frozen=True)
class IngestReport:
    rows_in: int
    rows_used: int
    rows_dropped: int


def ingest_csv(path, spec: ColumnSpec):
    """Read per-group value vectors from a CSV file.

    Rows with an empty value cell, or a nonpositive value under the log
    transform, are dropped and counted. A malformed (nonempty,
    non-numeric) cell raises :class:`CsvParseError` with its row number.

    Returns (populations, report) where populations maps group label to a
    float array.
    """
    groups: dict[str, list[float]] = {}
    rows_in = dropped = 0
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or spec.value_column not in reader.fieldnames:
            raise CsvParseError(f"missing column {spec.value_column!r}")
        if spec.group_column not in reader.fieldnames:
            raise CsvParseError(f"missing column {spec.group_column!r}")
        for i, row in enumerate(reader, start=2):  # row 1 is the header
            rows_in += 1
            raw = (row.get(spec.value_column) or "").strip()
            if not raw:
                dropped += 1
                continue
            try:
                value = float(raw)
            except ValueError:
                raise CsvParseError(
                    f"malformed numeric value {raw!r} in row {i}", row=i
                ) from None
            if not math.isfinite(value):
                dropped += 1
                continue
            if spec.transform == "log":
                if value <= 0:
                    dropped += 1
                    continue
                value = math.log(value)
            groups.setdefault((row.get(spec.group_column) or "").strip(), []).append(value)

    populations = {g: np.asarray(v, dtype=float) for g, v in groups.items() if v}
    if not populations:
        raise EmptyGroupError("no usable rows in any group")
    return populations, IngestReport(rows_in, rows_in - dropped, dropped)


@dataclass(frozen=True)
class ResampleStudy:
    base: str
    targets: tuple
    n0_grid: tuple
    n_grid: tuple
    levels: tuple
    methods: tuple = ("drm-quadratic", "parametric-normal", "empirical")
    reps: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.reps < 1:
            raise InvalidArgumentError("reps must be >= 1")
        if not self.targets:
            raise InvalidArgumentError("at least one target population required")
        for p in self.levels:
            if not 0.0 < p < 1.0:
                raise InvalidLevelError(f"quantile level must be in (0,1), got {p}")
        for m in self.methods:
            if m not in STUDY_METHODS:
                raise InvalidArgumentError(f"unknown method {m!r}")
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "n0_grid", tuple(int(v) for v in self.n0_grid))
        object.__setattr__(self, "n_grid", tuple(int(v) for v in self.n_grid))
        object.__setattr__(self, "levels", tuple(float(p) for p in self.levels))
        object.__setattr__(self, "methods", tuple(self.methods))


def _method_estimates(method: str, x0, x1, levels):
    """Quantile estimates for one method on one drawn sample pair."""
    if method in _DRM_METHODS:
        spec = BasisSpec.from_name(_DRM_METHODS[method])
        data = TwoSampleData(x0=x0, x1=x1)
        fit = fit_mele(data, spec)
        cdf = estimate_g1(fit, data, spec)
        return {p: drm_quantile(cdf, p) for p in levels}
    if method in _PARAMETRIC_METHODS:
        family = fit_parametric(TwoSampleData(x0=x0, x1=x1), _PARAMETRIC_METHODS[method])
        return {p: _target_quantile(family, p) for p in levels}
    if method == "empirical":
        ecdf = Ecdf.from_sample(x1)
        return {p: empirical_quantile(ecdf, p) for p in levels}
    raise InvalidArgumentError(f"unknown method {method!r}")


def _study_replicate(args):
    """One replicate of one (n0, n) combination across all targets."""
    study, base_pop, target_pops, n0, n, stream_index, r = args
    rng = replicate_rng(study.seed, stream_index * study.reps + r)
    x0 = base_pop[rng.integers(0, base_pop.size, n0)]
    out: dict[tuple[str, float, str], float] = {}
    failed: set[tuple[str, str]] = set()
    for target, pop in target_pops.items():
        x1 = pop[rng.integers(0, pop.size, n)]
        for method in study.methods:
            try:
                for p, est in _method_estimates(method, x0, x1, study.levels).items():
                    out[(target, p, method)] = est
            except DrmError:
                failed.add((target, method))
    return out, failed


def run_resample_study(
    study: ResampleStudy, populations: dict, workers: int = 1
) -> SimulationTable:
    """Resampling study over every (n0, n) grid combination.

    Scaled measures use the target sample size n, and each (level, method)
    row averages the per-target aggregates unweighted. Output is
    deterministic in the seed regardless of worker count.
    """
    for label in (study.base, *study.targets):
        if label not in populations:
            raise EmptyGroupError(f"population {label!r} not found in the data")
    base_pop = populations[study.base]
    target_pops = {t: populations[t] for t in study.targets}
    truths = {
        (t, p): empirical_quantile(Ecdf.from_sample(pop), p)
        for t, pop in target_pops.items()
        for p in study.levels
    }

    rows = []
    for stream_index, (n0, n) in enumerate(
        (a, b) for a in study.n0_grid for b in study.n_grid
    ):
        tasks = [
            (study, base_pop, target_pops, n0, n, stream_index, r)
            for r in range(study.reps)
        ]
        if workers <= 1:
            results = [_study_replicate(t) for t in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_study_replicate, tasks, chunksize=8))

        values: dict[tuple[str, float, str], list[float]] = {
            (t, p, m): []
            for t in study.targets
            for p in study.levels
            for m in study.methods
        }
        fail_counts = {(t, m): 0 for t in study.targets for m in study.methods}
        for out, failed in results:
            for key in failed:
                fail_counts[key] += 1
            for key, v in out.items():
                values[key].append(v)

        scenario_id = f"n0={n0},n={n}"
        for p in study.levels:
            for m in study.methods:
                per_target = []
                for t in study.targets:
                    v = np.asarray(values[(t, p, m)], dtype=float)
                    if v.size == 0:
                        per_target.append((math.nan,) * 4 + (1.0,))
                        continue
                    err = v - truths[(t, p)]
                    per_target.append(
                        (
                            math.sqrt(n) * float(np.mean(err)),
                            math.sqrt(n) * float(np.mean(np.abs(err))),
                            n * float(np.var(err)),
                            n * float(np.mean(err**2)),
                            fail_counts[(t, m)] / study.reps,
                        )
                    )
                agg = [float(np.mean(col)) for col in zip(*per_target)]
                rows.append(SimulationRow(scenario_id, p, m, *agg))
    return SimulationTable(rows=tuple(rows))
