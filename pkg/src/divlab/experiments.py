"""Numerical experiments: the D(n) vs mu1[W(n)] sweep, the Kubilius frequency
test, residue uniformity, the fit of the fractional-part constant and the
S(n)-vs-R(n) factor probe.  Also CSV/JSON persistence of sweep output.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from .numkernel import EULER_GAMMA, ScaleLimitError, compensated_sum, harmonic_table
from .stochastic import MU1W_DEFAULT_C

SWEEP_LIMIT = 10**7
CHUNK = 1 << 13

RECORD_COLUMNS = ("n", "d", "r", "abs_r", "s_centered", "mu1w", "dev_w", "abs_dev_w")
AGGREGATE_COLUMNS = ("n_max", "delta_r", "delta_w", "d_r", "d_w")


@dataclass(frozen=True)
class SweepRecord:
    n: int
    d: int
    r: float
    abs_r: float
    s_centered: float
    mu1w: float
    dev_w: float
    abs_dev_w: float


@dataclass
class AggregateSeries:
    checkpoints: list[int] = field(default_factory=list)
    delta_r: list[float] = field(default_factory=list)
    delta_w: list[float] = field(default_factory=list)
    d_r: list[float] = field(default_factory=list)
    d_w: list[float] = field(default_factory=list)

    def rows(self):
        return list(zip(self.checkpoints, self.delta_r, self.delta_w, self.d_r, self.d_w))


def _chunk_columns(lo: int, hi: int, c: float) -> dict[str, np.ndarray]:
    """All per-n columns for ``lo <= n < hi``.

    Every entry depends on its own n only, so the split into chunks never
    changes a single bit of output.
    """
    n = np.arange(lo, hi, dtype=np.int64)
    s = np.sqrt(n.astype(np.float64)).astype(np.int64)
    # repair the float root to the exact integer root
    s -= s * s > n
    s += (s + 1) * (s + 1) <= n
    s_max = int(s[-1])

    half = np.zeros(len(n), dtype=np.int64)
    # Neumaier-compensated running sum of ({n/x} - 1/2), vectorised over n
    tot = np.zeros(len(n))
    comp = np.zeros(len(n))
    for x in range(1, s_max + 1):
        live = s >= x
        q, rem = np.divmod(n, x)
        half += np.where(live, q, 0)
        term = np.where(live, rem / x - 0.5, 0.0)
        t = tot + term
        comp += np.where(np.abs(tot) >= np.abs(term), (tot - t) + term, (term - t) + tot)
        tot = t
    d = 2 * half - s * s

    nf = n.astype(np.float64)
    r = d - nf * np.log(nf) - (2.0 * EULER_GAMMA - 1.0) * nf
    h = harmonic_table(s_max)[s]
    mu1w = (2 * nf + 1) * h - (s * s).astype(np.float64) - s + c
    dev_w = d - mu1w
    return {
        "n": n,
        "s": s,
        "d": d,
        "r": r,
        "abs_r": np.abs(r),
        "s_centered": tot + comp,
        "mu1w": mu1w,
        "dev_w": dev_w,
        "abs_dev_w": np.abs(dev_w),
    }


def _chunk_task(args):
    return _chunk_columns(*args)


def sweep_columns(
    n_max: int, c: float = MU1W_DEFAULT_C, workers: int = 1, n_min: int = 1
) -> dict[str, np.ndarray]:
    """Per-n columns for ``n_min <= n <= n_max`` in ascending n."""
    if not 1 <= n_min <= n_max:
        raise ValueError(f"need 1 <= n_min <= n_max, got {n_min}, {n_max}")
    if n_max > SWEEP_LIMIT:
        raise ScaleLimitError(f"sweep limited to n_max <= {SWEEP_LIMIT}, got {n_max}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    # chunk edges are fixed multiples of CHUNK, whatever the worker count
    edges = [n_min] + list(range((n_min // CHUNK + 1) * CHUNK, n_max + 1, CHUNK)) + [n_max + 1]
    tasks = [(a, b, c) for a, b in zip(edges, edges[1:]) if a < b]
    if workers == 1 or len(tasks) == 1:
        parts = [_chunk_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_task, tasks))
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def default_checkpoints(n_max: int) -> list[int]:
    points = []
    p = 1
    while p < n_max:
        points.append(p)
        p *= 10
    points.append(n_max)
    return points


def _prefix_sums(values: np.ndarray, checkpoints: list[int]) -> list[float]:
    # compensated sum of each segment, then of the running segment list
    out, segments, prev = [], [], 0
    for cp in checkpoints:
        segments.append(compensated_sum(values[prev:cp].tolist()))
        out.append(compensated_sum(segments))
        prev = cp
    return out


def aggregate(columns: dict[str, np.ndarray], checkpoints: list[int]) -> AggregateSeries:
    """Cumulative error sums at each checkpoint N (columns must start at n = 1)."""
    n_max = int(columns["n"][-1]) if len(columns["n"]) else 0
    cps = sorted(set(checkpoints))
    if cps and (cps[0] < 1 or cps[-1] > n_max):
        raise ValueError(f"checkpoints must lie in 1..{n_max}")
    return AggregateSeries(
        checkpoints=cps,
        delta_r=_prefix_sums(columns["abs_r"], cps),
        delta_w=_prefix_sums(columns["abs_dev_w"], cps),
        d_r=_prefix_sums(columns["r"], cps),
        d_w=_prefix_sums(columns["dev_w"], cps),
    )


@dataclass
class SweepResult:
    columns: dict[str, np.ndarray]
    aggregates: AggregateSeries

    def records(self):
        cols = [self.columns[k] for k in RECORD_COLUMNS]
        for row in zip(*cols):
            yield SweepRecord(int(row[0]), int(row[1]), *map(float, row[2:]))

    def __len__(self):
        return len(self.columns["n"])


def run_sweep(
    n_max: int,
    checkpoints: list[int] | None = None,
    mu1w_constant: float = MU1W_DEFAULT_C,
    workers: int = 1,
) -> SweepResult:
    """Per-n records for n = 1..n_max plus the cumulative Delta/d series."""
    cols = sweep_columns(n_max, mu1w_constant, workers)
    cps = default_checkpoints(n_max) if checkpoints is None else list(checkpoints)
    return SweepResult(cols, aggregate(cols, cps))


# -- Kubilius frequency -------------------------------------------------------


@dataclass(frozen=True)
class PsiSpec:
    """Slowly growing weight psi(n): ``loglog``, ``log`` or ``power`` (n**eps)."""

    kind: str = "loglog"
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in ("loglog", "log", "power"):
            raise ValueError(f"unknown psi kind {self.kind!r}")
        if self.kind == "power" and not self.eps > 0:
            raise ValueError("power psi needs eps > 0")

    @classmethod
    def parse(cls, text: str) -> "PsiSpec":
        if text.startswith("power:"):
            return cls("power", float(text.split(":", 1)[1]))
        return cls(text.replace("-", ""))

    def __str__(self):
        return f"power:{self.eps:g}" if self.kind == "power" else self.kind

    def __call__(self, n):
        n = np.asarray(n, dtype=np.float64)
        if self.kind == "loglog":
            return np.log(np.log(n + math.e))
        if self.kind == "log":
            return np.log(n + 1.0)
        return n**self.eps


@dataclass
class FrequencyReport:
    n_max: int
    psi: PsiSpec
    count_within: int
    frequency: float
    count_within_uncentered: int
    frequency_uncentered: float
    decades: list[tuple[int, int, int, int]]  # (lo, hi, within, total)


def kubilius_frequency(n_max: int, psi: PsiSpec | None = None) -> FrequencyReport:
    """Share of n <= n_max with |R(n) - mu1| <= psi(n) * sqrt(isqrt(n)/4).

    mu1 = -H_s/2 is the model mean.  The uncentered variant (mu1 = 0) is
    reported next to it.
    """
    if n_max < 10:
        raise ValueError(f"kubilius_frequency needs n_max >= 10, got {n_max}")
    psi = psi or PsiSpec()
    cols = sweep_columns(n_max)
    n, s, r = cols["n"], cols["s"], cols["r"]
    mu1 = -0.5 * harmonic_table(int(s[-1]))[s]
    bound = psi(n) * np.sqrt(s / 4.0)
    ok = np.abs(r - mu1) <= bound
    ok_raw = np.abs(r) <= bound

    decades = []
    lo = 1
    while lo <= n_max:
        hi = min(10 * lo, n_max + 1)
        sl = slice(lo - 1, hi - 1)
        decades.append((lo, hi - 1, int(ok[sl].sum()), hi - lo))
        lo *= 10
    within, within_raw = int(ok.sum()), int(ok_raw.sum())
    return FrequencyReport(
        n_max, psi, within, within / n_max, within_raw, within_raw / n_max, decades
    )


# -- residue uniformity -------------------------------------------------------

CHI_SQUARE_QUANTILE = 0.99


def chi_square_critical(dof: int, q: float = CHI_SQUARE_QUANTILE) -> float:
    """Wilson-Hilferty approximation to the chi-square q-quantile."""
    z = NormalDist().inv_cdf(q)
    a = 2.0 / (9.0 * dof)
    return dof * (1.0 - a + z * math.sqrt(a)) ** 3


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    critical: float
    flagged: bool


def chi_square_uniform(counts) -> ChiSquareResult:
    """Pearson statistic of integer class counts against equal class mass."""
    counts = [int(c) for c in counts]
    k, total = len(counts), sum(counts)
    if k < 2 or total == 0:
        raise ValueError("need at least two classes and a positive total")
    # exact: sum (O - T/k)^2 / (T/k) = (k * sum O^2 - T^2) / T
    stat = float(Fraction(k * sum(c * c for c in counts) - total * total, total))
    crit = chi_square_critical(k - 1)
    return ChiSquareResult(stat, k - 1, crit, stat > crit)


def residue_counts(x: int, n_max: int) -> list[int]:
    """Occurrences of each residue of n mod x over n = 1..n_max."""
    q, rem = divmod(n_max, x)
    return [q + (1 if 1 <= k <= rem else 0) for k in range(x)]


def chi_square_residues(x: int, n_max: int) -> ChiSquareResult:
    if not 2 <= x <= 10**4:
        raise ValueError(f"x must lie in 2..10000, got {x}")
    if n_max < 10 * x:
        raise ValueError(f"n_max must be at least 10*x = {10 * x}, got {n_max}")
    return chi_square_uniform(residue_counts(x, n_max))


# -- the constant in sum {n/x} ~ C isqrt(n) -----------------------------------


@dataclass(frozen=True)
class ConstantFit:
    n_max: int
    c: float
    spread: float
    squares_only: float


def constant_c_fit(n_max: int) -> ConstantFit:
    """Average of F(n)/isqrt(n) over n in [n_max/2, n_max].

    ``spread`` is the standard deviation of the ratio, ``squares_only`` the
    same average restricted to perfect squares.
    """
    if n_max < 100:
        raise ValueError(f"constant_c_fit needs n_max >= 100, got {n_max}")
    cols = sweep_columns(n_max, n_min=n_max // 2)
    s = cols["s"]
    ratio = (cols["s_centered"] + 0.5 * s) / s
    squares = s * s == cols["n"]
    return ConstantFit(
        n_max,
        compensated_sum(ratio.tolist()) / len(ratio),
        float(np.std(ratio)),
        compensated_sum(ratio[squares].tolist()) / int(squares.sum()),
    )


# -- S(n) vs R(n) -------------------------------------------------------------


@dataclass(frozen=True)
class Eq2Probe:
    n_max: int
    slope: float
    intercept: float
    mean_abs_half: float  # mean |S + r/2|
    mean_abs_literal: float  # mean |S - r|

    @property
    def verdict(self) -> str:
        if abs(self.slope + 0.5) < abs(self.slope - 1.0):
            return "S(n) ~ -R(n)/2"
        return "S(n) ~ R(n)"


def eq2_factor_probe(n_max: int) -> Eq2Probe:
    """Least-squares slope of S(n) regressed on the signed remainder r(n)."""
    if n_max < 100:
        raise ValueError(f"eq2_factor_probe needs n_max >= 100, got {n_max}")
    cols = sweep_columns(n_max)
    r, sc = cols["r"], cols["s_centered"]
    slope, intercept = np.polyfit(r, sc, 1)
    return Eq2Probe(
        n_max,
        float(slope),
        float(intercept),
        float(np.mean(np.abs(sc + r / 2))),
        float(np.mean(np.abs(sc - r))),
    )


# -- persistence --------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _open_for_write(path):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _rows(data):
    if isinstance(data, AggregateSeries):
        return AGGREGATE_COLUMNS, data.rows()
    if isinstance(data, SweepResult):
        data = data.columns
    if isinstance(data, dict):
        cols = [data[k] for k in RECORD_COLUMNS]
        return RECORD_COLUMNS, zip(*cols)
    return RECORD_COLUMNS, ([getattr(rec, k) for k in RECORD_COLUMNS] for rec in data)


def write_csv(data, path) -> None:
    """Write records (SweepResult, column dict or SweepRecord list) or an
    AggregateSeries as CSV with 17 significant digits."""
    header, rows = _rows(data)
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_json(data, path) -> None:
    header, rows = _rows(data)
    out = []
    for row in rows:
        out.append({k: (int(v) if isinstance(v, (int, np.integer)) else float(v)) for k, v in zip(header, row)})
    with _open_for_write(path) as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")


def read_aggregates(path) -> AggregateSeries:
    """Parse an aggregates CSV; malformed input raises ValueError naming the line."""
    series = AggregateSeries()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}:1: empty file, expected header") from None
        if tuple(header) != AGGREGATE_COLUMNS:
            raise ValueError(f"{path}:1: bad header {','.join(header)!r}")
        for row in reader:
            line = reader.line_num
            if len(row) != len(AGGREGATE_COLUMNS):
                raise ValueError(f"{path}:{line}: expected 5 fields, got {len(row)}")
            try:
                cp = int(row[0])
                vals = [float(v) for v in row[1:]]
            except ValueError:
                raise ValueError(f"{path}:{line}: non-numeric field") from None
            if series.checkpoints and cp <= series.checkpoints[-1]:
                raise ValueError(f"{path}:{line}: n_max not ascending")
            series.checkpoints.append(cp)
            for name, v in zip(AGGREGATE_COLUMNS[1:], vals):
                getattr(series, name).append(v)
    return series


def summary_dict(obj) -> dict:
    d = asdict(obj)
    if "psi" in d:
        d["psi"] = str(obj.psi)
    return d


def output_dir(explicit: str | None) -> str:
    return explicit or os.environ.get("DIVLAB_OUT") or "."
