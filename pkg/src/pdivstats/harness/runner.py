"""Experiment specification and the sharded runner.

Monte-Carlo work is split into fixed-size blocks of trial indices and
exhaustive hyperelliptic work into index ranges that fix the top
coefficients.  Each block returns a histogram of invariant triples
(a, f_rank, d); histograms merge by addition, so the result does not depend
on the number of workers.
"""

from __future__ import annotations

import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, isqrt

from .. import predict
from ..errors import InvalidSpec
from ..ffq import field_create, is_prime
from .tables import ChiSquare, DistTable, Row, TooFewBuckets, chi_square, make_row

KINDS = ("constants", "model-sim", "model-exhaustive", "hyper-survey", "hyper-exhaustive",
         "plane-survey", "selftest")
STATS = ("a", "corank", "prank", "points", "joint", "moments")
FULL_STATS = frozenset(STATS) - {"a"}
THREADS_ENV = "PDIVSTATS_THREADS"
BLOCK = 2048
MOMENT_ORDERS = (1, 2)


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    p: int
    m: int = 1
    genus: int | None = None
    degree: int | None = None
    samples: int | None = None
    seed: int = 0
    threads: int | None = None
    stats: tuple[str, ...] = ("a",)
    fmt: str = "csv"
    degree_parity: str = "odd"
    tol: float = 1e-9
    budget: int = 10 ** 9
    backend: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "stats", tuple(dict.fromkeys(self.stats)))
        self.validate()

    @property
    def q(self) -> int:
        return self.p ** self.m

    def validate(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}")
        if not (isinstance(self.p, int) and is_prime(self.p)):
            raise InvalidSpec(f"p = {self.p} is not prime")
        if self.m < 1:
            raise InvalidSpec("m must be at least 1")
        for s in self.stats:
            if s not in STATS:
                raise InvalidSpec(f"unknown statistic {s!r}")
        if self.fmt not in ("csv", "json"):
            raise InvalidSpec(f"unknown format {self.fmt!r}")
        if self.degree_parity not in ("odd", "even"):
            raise InvalidSpec("degree parity must be 'odd' or 'even'")
        if self.seed < 0:
            raise InvalidSpec("seed must be nonnegative")
        if self.threads is not None and self.threads < 1:
            raise InvalidSpec("threads must be positive")
        if not self.tol > 0:
            raise InvalidSpec("tolerance must be positive")
        if self.kind in ("model-sim", "hyper-survey", "plane-survey"):
            if self.samples is None or self.samples < 1:
                raise InvalidSpec("Monte-Carlo kinds need samples >= 1")
        if self.kind in ("model-sim", "model-exhaustive"):
            if self.genus is None or self.genus < 1:
                raise InvalidSpec("model kinds need genus >= 1")
        if self.kind.startswith("hyper"):
            if self.p == 2:
                raise InvalidSpec("hyperelliptic models y^2 = f need odd characteristic")
            if self.curve_degree() < 3:
                raise InvalidSpec("hyperelliptic curves need genus >= 1")
        if self.kind == "plane-survey" and self.curve_degree() < 3:
            raise InvalidSpec("plane curves need degree >= 3")

    def curve_degree(self) -> int:
        """Degree of f (hyperelliptic) or of the plane form."""
        if self.degree is not None:
            return self.degree
        if self.genus is None:
            raise InvalidSpec("give a genus or a degree")
        if self.kind.startswith("hyper"):
            return 2 * self.genus + (1 if self.degree_parity == "odd" else 2)
        # plane: solve (d - 1)(d - 2) / 2 = g
        d = (3 + isqrt(1 + 8 * self.genus)) // 2
        if (d - 1) * (d - 2) // 2 != self.genus:
            raise InvalidSpec(f"no plane curve degree has genus {self.genus}")
        return d

    def curve_genus(self) -> int:
        if self.kind in ("model-sim", "model-exhaustive"):
            return self.genus
        d = self.curve_degree()
        if self.kind.startswith("hyper"):
            return (d - 1) // 2
        return (d - 1) * (d - 2) // 2

    def echo(self) -> dict:
        out = asdict(self)
        out["stats"] = list(self.stats)
        return out


def thread_count(spec: ExperimentSpec) -> int:
    if spec.threads is not None:
        return spec.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise InvalidSpec(f"{THREADS_ENV} must be an integer") from None
        if n < 1:
            raise InvalidSpec(f"{THREADS_ENV} must be positive")
        return n
    return os.cpu_count() or 1


# ---------------------------------------------------------------- work units


def _work(job) -> Counter:
    kind, p, m, param, seed, start, stop, full, backend = job
    from .. import curves, model
    F = field_create(p, m)
    if kind == "hyper-exhaustive":
        return Counter(curves.hyper_exhaustive(F, param, start, stop, full, backend))
    count = stop - start
    if kind == "model-sim":
        arr = model.model_block(F, param, seed, start, count, full, backend)
    elif kind == "hyper-survey":
        arr = curves.hyper_block(F, param, seed, start, count, full, backend)
    elif kind == "plane-survey":
        arr = curves.plane_block(F, param, seed, start, count, full, backend)
    else:  # pragma: no cover
        raise InvalidSpec(kind)
    hist: Counter = Counter()
    for a, s, x in map(tuple, arr[:, :3].tolist()):
        hist[(a, None if s < 0 else s, None if x < 0 else x)] += 1
    return hist


def _ranges(total: int, size: int):
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def _exhaustive_ranges(q: int, d: int, workers: int):
    """Index ranges that fix the top k coefficients, with q^k >= 4 * workers shards."""
    k = 1
    while q ** k < 4 * workers and k < d:
        k += 1
    size = q ** (d - k)
    return _ranges(q ** d, size)


def _run_jobs(jobs, workers: int) -> Counter:
    total: Counter = Counter()
    if workers <= 1 or len(jobs) <= 1:
        for j in jobs:
            total.update(_work(j))
        return total
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
        for h in ex.map(_work, jobs):
            total.update(h)
    return total


def histogram(spec: ExperimentSpec) -> Counter:
    """Merged invariant histogram for the simulation and exhaustive kinds."""
    full = bool(FULL_STATS & set(spec.stats))
    workers = thread_count(spec)
    if spec.kind == "model-exhaustive":
        from ..model import SymplecticSpace, exhaustive_counts
        space = SymplecticSpace(field_create(spec.p, spec.m), spec.genus)
        raw = exhaustive_counts(space, budget=min(spec.budget, 10 ** 7), full=full)
        out: Counter = Counter()
        for (a, s, x), c in raw.items():
            out[(a, None if s < 0 else s, None if x < 0 else x)] += c
        return out
    if spec.kind == "hyper-exhaustive":
        d = spec.curve_degree()
        total = spec.q ** d
        if total > spec.budget:
            from ..errors import BudgetExceeded
            raise BudgetExceeded(f"{total} polynomials exceed the budget {spec.budget}")
        jobs = [(spec.kind, spec.p, spec.m, d, spec.seed, s, e, full, spec.backend)
                for s, e in _exhaustive_ranges(spec.q, d, workers)]
        return _run_jobs(jobs, workers)
    param = spec.genus if spec.kind == "model-sim" else spec.curve_degree()
    jobs = [(spec.kind, spec.p, spec.m, param, spec.seed, s, e, full, spec.backend)
            for s, e in _ranges(spec.samples, BLOCK)]
    return _run_jobs(jobs, workers)


# ---------------------------------------------------------------- statistics


def _limit_prediction(spec: ExperimentSpec, stat: str, key):
    q, tol = spec.q, spec.tol
    if spec.kind == "model-exhaustive":
        if stat == "a":
            return predict.finite_g_anumber_prob(q, spec.genus, key)
        return None
    if stat == "a":
        return float(predict.mg(q, key, tol).value)
    if stat == "corank":
        return float(predict.corank_prob(q, key, tol).value)
    if stat == "prank":
        return float(predict.corank_prob(q, spec.curve_genus() - key, tol).value)
    if stat == "points":
        return float(predict.point_dim_prob(spec.p, key, tol).value)
    if stat == "joint":
        r, s = key
        if r > s:
            return 0.0
        return float(predict.corank_joint_prob(q, r, s, tol).value)
    raise InvalidSpec(stat)  # pragma: no cover


def _label(key) -> str:
    if isinstance(key, tuple):
        return ":".join(str(k) for k in key)
    return str(key)


def _moment_rows(spec: ExperimentSpec, hist: Counter, n: int) -> list[Row]:
    from ..model import injection_count, surjection_count
    rows = []
    series = [(f"inj_m{mm}", lambda k, mm=mm: injection_count(k[0], mm, spec.q),
               predict.moment_prediction(spec.q, mm).value) for mm in MOMENT_ORDERS]
    series.append(("surj_d1", lambda k: surjection_count(k[2], 1, spec.p),
                   predict.surjection_moment_prediction(spec.p, 1).value))
    for name, fn, pred in series:
        s1 = sum(fn(k) * c for k, c in hist.items())
        s2 = sum(fn(k) ** 2 * c for k, c in hist.items())
        mean = Fraction(s1, n)
        var = Fraction(s2, n) - mean ** 2
        if n > 1:
            var = var * n / (n - 1)
        se = float(var) ** 0.5 / n ** 0.5
        z = (float(mean) - pred) / se if se > 0 else None
        rows.append(Row("moments", name, None, mean, pred, se, z))
    return rows


def summarize(spec: ExperimentSpec, hist: Counter) -> tuple[list[Row], int]:
    n = sum(hist.values())
    g = spec.curve_genus()
    rows: list[Row] = []
    projections = {
        "a": lambda k: k[0],
        "corank": lambda k: g - k[1],
        "prank": lambda k: k[1],
        "points": lambda k: k[2],
        "joint": lambda k: (k[0], g - k[1]),
    }
    for stat in spec.stats:
        if stat == "moments":
            rows.extend(_moment_rows(spec, hist, n))
            continue
        proj = projections[stat]
        agg: Counter = Counter()
        for k, c in hist.items():
            agg[proj(k)] += c
        for key in sorted(agg):
            rows.append(make_row(stat, _label(key), agg[key], n,
                                 _limit_prediction(spec, stat, key)))
    return rows, n


def _constant_rows(spec: ExperimentSpec) -> list[Row]:
    q, p, tol = spec.q, spec.p, spec.tol
    rows = []
    for r in range(5):
        rows.append(Row(f"MG_a{r}", str(r), None, None, float(predict.mg(q, r, tol).value), None, None))
    for b in range(4):
        rows.append(Row(f"TMG_b{b}", str(b), None, None, predict.tmg(q, b).exact, None, None))
    for d in range(4):
        rows.append(Row(f"PD_d{d}", str(d), None, None,
                        float(predict.point_dim_prob(p, d, tol).value), None, None))
    for d in range(4):
        rows.append(Row(f"CL_d{d}", str(d), None, None,
                        float(predict.cl_group_prob(p, d, tol).value), None, None))
    return rows


def _selftest_rows(spec: ExperimentSpec) -> list[Row]:
    from .selftest import run_checks
    return [Row("selftest", name, int(ok), None, None, None, None) for name, ok in run_checks()]


def run(spec: ExperimentSpec) -> DistTable:
    t0 = time.perf_counter()
    gd = None
    if spec.kind in ("model-sim", "model-exhaustive"):
        gd = spec.genus
    elif spec.kind.startswith("hyper"):
        gd = spec.curve_genus()
    elif spec.kind == "plane-survey":
        gd = spec.curve_degree()
    chis: list[ChiSquare] = []
    if spec.kind == "constants":
        rows, n = _constant_rows(spec), 0
    elif spec.kind == "selftest":
        rows = _selftest_rows(spec)
        n = len(rows)
    else:
        hist = histogram(spec)
        rows, n = summarize(spec, hist)
    table = DistTable(spec.kind, spec.q, spec.p, spec.m, gd, spec.seed, n, tuple(rows),
                      spec=spec.echo())
    if spec.kind not in ("constants", "selftest"):
        for stat in spec.stats:
            if stat == "moments":
                continue
            try:
                chis.append(chi_square(table, stat))
            except TooFewBuckets:
                pass
    return DistTable(spec.kind, spec.q, spec.p, spec.m, gd, spec.seed, n, tuple(rows),
                     tuple(chis), spec.echo(), time.perf_counter() - t0)
