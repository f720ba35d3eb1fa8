"""Distribution tables: rows, goodness of fit, and CSV/JSON emission."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any

from scipy.stats import chi2

from ..errors import PdivError

CSV_COLUMNS = ("q", "p", "m", "genus_or_degree", "kind", "statistic", "value", "count",
               "proportion", "predicted", "stderr", "z", "seed", "samples")
MERGE_BELOW = 5


class TooFewBuckets(PdivError, ValueError):
    pass


Number = int | float | Fraction


@dataclass(frozen=True)
class Row:
    """One line of a table.

    For distribution statistics ``proportion`` is count / samples; for the
    moment statistics it holds the sample mean and ``count`` is None.
    """

    statistic: str
    value: str
    count: int | None
    proportion: Number | None
    predicted: Number | None
    stderr: float | None
    z: float | None


@dataclass(frozen=True)
class ChiSquare:
    statistic: str
    value: Number
    dof: int
    p_value: float


@dataclass(frozen=True)
class DistTable:
    kind: str
    q: int
    p: int
    m: int
    genus_or_degree: int | None
    seed: int
    samples: int
    rows: tuple[Row, ...] = ()
    chi: tuple[ChiSquare, ...] = ()
    spec: dict = field(default_factory=dict)
    wall_time: float = field(default=0.0, compare=False)

    def select(self, statistic: str) -> list[Row]:
        return [r for r in self.rows if r.statistic == statistic]

    def row(self, statistic: str, value) -> Row | None:
        value = str(value)
        for r in self.rows:
            if r.statistic == statistic and r.value == value:
                return r
        return None

    def statistics(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.statistic not in seen:
                seen.append(r.statistic)
        return seen


def make_row(statistic: str, value, count: int, samples: int, predicted) -> Row:
    prop = Fraction(count, samples)
    if predicted is not None:
        pf = float(predicted)
        se = math.sqrt(max(pf * (1 - pf), 0.0) / samples)
    else:
        pf = float(prop)
        se = math.sqrt(pf * (1 - pf) / samples)
    z = (float(prop) - float(predicted)) / se if predicted is not None and se > 0 else None
    return Row(statistic, str(value), count, prop, predicted, se, z)


def chi_square(table: DistTable, statistic: str | None = None,
               merge: bool | None = None) -> ChiSquare:
    """Pearson statistic against the predicted column.

    Buckets are the observed values plus a tail holding the unobserved
    predicted mass.  With ``merge`` on, buckets expecting fewer than five are
    pooled into the tail and a tail still below five is folded into the
    smallest remaining bucket.  ``merge`` defaults to on unless every
    prediction is exact; exact predictions give an exact (Fraction)
    statistic, and pooling would only hide the exact comparison.
    """
    if statistic is None:
        cands = [s for s in table.statistics()
                 if all(r.count is not None and r.predicted is not None for r in table.select(s))]
        if not cands:
            raise TooFewBuckets("no statistic with a predicted column")
        statistic = cands[0]
    rows = table.select(statistic)
    if not rows or any(r.count is None or r.predicted is None for r in rows):
        raise TooFewBuckets(f"statistic {statistic!r} has no predicted distribution")
    n = sum(r.count for r in rows)
    exact = all(isinstance(r.predicted, (int, Fraction)) for r in rows)
    conv = Fraction if exact else float
    if merge is None:
        merge = not exact
    buckets = [(r.count, conv(r.predicted) * n) for r in rows]
    tail_mass = 1 - sum(conv(r.predicted) for r in rows)
    tail_obs, tail_exp = 0, max(tail_mass, 0) * n
    keep = []
    for o, e in buckets:
        if merge and e < MERGE_BELOW:
            tail_obs += o
            tail_exp += e
        else:
            keep.append([o, e])
    if tail_obs or tail_exp:
        if merge and tail_exp < MERGE_BELOW and keep:
            k = min(range(len(keep)), key=lambda i: keep[i][1])
            keep[k][0] += tail_obs
            keep[k][1] += tail_exp
        else:
            keep.append([tail_obs, tail_exp])
    keep = [b for b in keep if b[0] or b[1]]
    if len(keep) < 2:
        raise TooFewBuckets(f"only {len(keep)} bucket(s) left after merging")
    stat = conv(0)
    for o, e in keep:
        if e == 0:
            if o:
                return ChiSquare(statistic, math.inf, len(keep) - 1, 0.0)
            continue
        stat += (o - e) ** 2 / e
    dof = len(keep) - 1
    return ChiSquare(statistic, stat, dof, float(chi2.sf(float(stat), dof)))


# ---------------------------------------------------------------- emission


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.6g}"


def to_csv(table: DistTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in table.rows:
        w.writerow([table.q, table.p, table.m, _fmt(table.genus_or_degree), table.kind,
                    r.statistic, r.value, _fmt(r.count), _fmt(r.proportion), _fmt(r.predicted),
                    _fmt(r.stderr), _fmt(r.z), table.seed, table.samples])
    return buf.getvalue()


def _enc(x):
    if isinstance(x, Fraction):
        return {"fraction": f"{x.numerator}/{x.denominator}"}
    if isinstance(x, float) and not math.isfinite(x):
        return {"float": repr(x)}
    return x


def _dec(x):
    if isinstance(x, dict) and "fraction" in x:
        return Fraction(x["fraction"])
    if isinstance(x, dict) and "float" in x:
        return float(x["float"])
    return x


def to_json(table: DistTable) -> str:
    rows = [{f.name: _enc(getattr(r, f.name)) for f in fields(Row)} for r in table.rows]
    chis = [{f.name: _enc(getattr(c, f.name)) for f in fields(ChiSquare)} for c in table.chi]
    doc: dict[str, Any] = {k: getattr(table, k) for k in
                           ("kind", "q", "p", "m", "genus_or_degree", "seed", "samples")}
    doc.update(rows=rows, chi=chis, spec=table.spec, wall_time=table.wall_time)
    return json.dumps(doc, indent=1)


def from_json(text: str) -> DistTable:
    doc = json.loads(text)
    rows = tuple(Row(**{k: _dec(v) for k, v in r.items()}) for r in doc.pop("rows"))
    chis = tuple(ChiSquare(**{k: _dec(v) for k, v in c.items()}) for c in doc.pop("chi"))
    return DistTable(rows=rows, chi=chis, **doc)


def emit(table: DistTable, fmt: str = "csv", destination=None) -> str:
    """Render the table; write it to ``destination`` (path or file object) if given."""
    if fmt == "csv":
        text = to_csv(table)
    elif fmt == "json":
        text = to_json(table)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def parse(text: str, fmt: str = "json") -> DistTable:
    if fmt != "json":
        raise ValueError("only JSON tables can be parsed back losslessly")
    return from_json(text)
