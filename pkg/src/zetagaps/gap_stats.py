"""Normalized gaps between consecutive zeros and the branch inequality chain.

g_n uses log(t_n) / 2 pi and g'_n uses log(t_n / 2 pi e) / 2 pi, with the
lower ordinate in the logarithm.  A record is checked against

    g'_n < 1 - (a(t_{n+1}) - a(t_n)) / pi          (gpb1)
    g'_n <= 3 + max(0, b_n - b_{n+1})              (gpb2, local form)
    b_{n+1} - b_n <= 1                             (bup)

and |b_{n+1} - b_n| <= 1 is monitored as hyp2 (branch changes of either sign are at most one).
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math

from .errors import DomainError, GapInIndices, MalformedLine

TWO_PI = 2.0 * math.pi
LOG_2PI_E = math.log(TWO_PI) + 1.0
BIN_WIDTH = 0.05
N_BINS = 120            # [0, 6) in steps of 0.05, plus one overflow bin
SIG_DIGITS = 15
CSV_FIELDS = ("n", "t_n", "t_next", "g", "g_prime", "a_n", "a_next",
              "b_n", "b_next", "db", "slack_gpb1")
# Fixed-point scale making every double an exact integer.
_EXACT_SHIFT = 1074


def q15(x):
    """Round to 15 significant digits (the CSV precision)."""
    return float(format(x, ".15g"))


@dataclasses.dataclass(frozen=True)
class GapRecord:
    n: int
    t_n: float
    t_next: float
    g: float
    g_prime: float
    a_n: float
    a_next: float
    b_n: int
    b_next: int
    db: int
    slack_gpb1: float

    def __post_init__(self):
        if not self.t_next > self.t_n:
            raise DomainError(f"n = {self.n}: ordinates not strictly increasing")

    def quantized(self):
        """Copy with every float rounded to the CSV precision."""
        return dataclasses.replace(self, **{f: q15(getattr(self, f)) for f in
                                            ("t_n", "t_next", "g", "g_prime", "a_n",
                                             "a_next", "slack_gpb1")})

    def csv_row(self):
        return [str(getattr(self, f)) if isinstance(getattr(self, f), int)
                else format(getattr(self, f), ".15g") for f in CSV_FIELDS]


def normalized(t_n, t_next):
    """(g, g') for one pair of ordinates."""
    d = t_next - t_n
    lt = math.log(t_n)
    return d * lt / TWO_PI, d * (lt - LOG_2PI_E) / TWO_PI


def make_gap(n, t_n, t_next, a_n, a_next, b_n, b_next):
    g, gp = normalized(t_n, t_next)
    return GapRecord(n=int(n), t_n=float(t_n), t_next=float(t_next), g=g, g_prime=gp,
                     a_n=float(a_n), a_next=float(a_next), b_n=int(b_n), b_next=int(b_next),
                     db=int(b_next) - int(b_n),
                     slack_gpb1=1.0 - (a_next - a_n) / math.pi - gp)


def gap(z_lo, z_hi, arg_lo, arg_hi):
    """GapRecord for consecutive zeros given their ArgRecords."""
    if z_hi.n != z_lo.n + 1:
        raise DomainError(f"zeros {z_lo.n} and {z_hi.n} are not consecutive")
    return make_gap(z_lo.n, z_lo.t, z_hi.t, arg_lo.a, arg_hi.a, arg_lo.b, arg_hi.b)


@dataclasses.dataclass(frozen=True)
class ChainVerdict:
    gpb1: bool
    gpb2: bool
    bup: bool
    hyp2: bool
    slack_gpb1: float
    slack_gpb2: float

    @property
    def ok(self):
        return self.gpb1 and self.gpb2 and self.bup


def verify_chain(rec: GapRecord) -> ChainVerdict:
    """Evaluate each inequality of the chain for one record; failures are reported, not raised."""
    s2 = 3.0 + max(0, -rec.db) - rec.g_prime
    return ChainVerdict(gpb1=rec.slack_gpb1 > 0, gpb2=s2 >= 0, bup=rec.db <= 1,
                        hyp2=abs(rec.db) <= 1, slack_gpb1=rec.slack_gpb1, slack_gpb2=s2)


def _exact(x):
    p, q = x.as_integer_ratio()
    return p * ((1 << _EXACT_SHIFT) // q)


@dataclasses.dataclass(frozen=True)
class SweepSummary:
    """Single-pass summary over a contiguous run of gap records.

    ``sum_exact`` holds the sum of g' as an integer multiple of 2^-1074, so
    merging partial summaries is exactly associative.
    """
    n_lo: int | None = None
    n_hi: int | None = None
    count: int = 0
    max_g_prime: float = -math.inf
    argmax_n: int | None = None
    max_g: float = -math.inf
    sum_exact: int = 0
    db_max: int | None = None
    min_slack_gpb1: float = math.inf
    count_gpb1_violations: int = 0
    count_gpb2_violations: int = 0
    count_bup_violations: int = 0
    count_bound3_violations: int = 0
    count_hyp2_violations: int = 0
    histogram: tuple = (0,) * (N_BINS + 1)

    @property
    def mean_g_prime(self):
        if self.count == 0:
            return math.nan
        # int / int is correctly rounded
        return self.sum_exact / (self.count << _EXACT_SHIFT)

    @property
    def range(self):
        return [self.n_lo, self.n_hi]

    def to_json(self):
        """Dictionary in the published summary schema (numbers at 15 digits)."""
        def num(x):
            return None if x is None or not math.isfinite(x) else q15(x)
        return {
            "range": self.range,
            "max_g_prime": num(self.max_g_prime),
            "argmax_n": self.argmax_n,
            "max_g": num(self.max_g),
            "mean_g_prime": num(self.mean_g_prime),
            "db_max": self.db_max,
            "violations": {"gpb1": self.count_gpb1_violations,
                           "bound3": self.count_bound3_violations,
                           "hyp2": self.count_hyp2_violations},
            "histogram": list(self.histogram),
        }

    def to_state(self):
        """Lossless dictionary for checkpoints (floats as hex)."""
        d = dataclasses.asdict(self)
        for k in ("max_g_prime", "max_g", "min_slack_gpb1"):
            d[k] = float.hex(d[k])
        d["sum_exact"] = hex(self.sum_exact)
        d["histogram"] = list(self.histogram)
        return d

    @classmethod
    def from_state(cls, d):
        d = dict(d)
        for k in ("max_g_prime", "max_g", "min_slack_gpb1"):
            d[k] = float.fromhex(d[k])
        d["sum_exact"] = int(d["sum_exact"], 16)
        d["histogram"] = tuple(d["histogram"])
        return cls(**d)


def _bin(gp):
    k = math.floor(gp / BIN_WIDTH)
    return min(max(k, 0), N_BINS)


def _single(rec: GapRecord) -> SweepSummary:
    v = verify_chain(rec)
    hist = [0] * (N_BINS + 1)
    hist[_bin(rec.g_prime)] = 1
    return SweepSummary(
        n_lo=rec.n, n_hi=rec.n, count=1, max_g_prime=rec.g_prime, argmax_n=rec.n,
        max_g=rec.g, sum_exact=_exact(rec.g_prime), db_max=-rec.db,
        min_slack_gpb1=rec.slack_gpb1,
        count_gpb1_violations=int(not v.gpb1), count_gpb2_violations=int(not v.gpb2),
        count_bup_violations=int(not v.bup), count_bound3_violations=int(rec.g_prime >= 3),
        count_hyp2_violations=int(not v.hyp2), histogram=tuple(hist))


def merge(left: SweepSummary, right: SweepSummary) -> SweepSummary:
    """Combine summaries of adjacent ranges (left immediately precedes right)."""
    if left.count == 0:
        return right
    if right.count == 0:
        return left
    if right.n_lo != left.n_hi + 1:
        raise GapInIndices(f"cannot merge ranges ending at {left.n_hi} and starting at {right.n_lo}")
    # ties keep the lower index
    if right.max_g_prime > left.max_g_prime:
        mgp, arg = right.max_g_prime, right.argmax_n
    else:
        mgp, arg = left.max_g_prime, left.argmax_n
    return SweepSummary(
        n_lo=left.n_lo, n_hi=right.n_hi, count=left.count + right.count,
        max_g_prime=mgp, argmax_n=arg, max_g=max(left.max_g, right.max_g),
        sum_exact=left.sum_exact + right.sum_exact,
        db_max=max(left.db_max, right.db_max),
        min_slack_gpb1=min(left.min_slack_gpb1, right.min_slack_gpb1),
        count_gpb1_violations=left.count_gpb1_violations + right.count_gpb1_violations,
        count_gpb2_violations=left.count_gpb2_violations + right.count_gpb2_violations,
        count_bup_violations=left.count_bup_violations + right.count_bup_violations,
        count_bound3_violations=left.count_bound3_violations + right.count_bound3_violations,
        count_hyp2_violations=left.count_hyp2_violations + right.count_hyp2_violations,
        histogram=tuple(a + b for a, b in zip(left.histogram, right.histogram)))


def summarize(records, initial: SweepSummary | None = None) -> SweepSummary:
    """Fold an ordered stream of records into a summary.

    Raises
    ------
    GapInIndices
        If the stream skips or repeats an index.
    """
    acc = initial if initial is not None else SweepSummary()
    for rec in records:
        if acc.count and rec.n != acc.n_hi + 1:
            raise GapInIndices(f"expected n = {acc.n_hi + 1}, got {rec.n}")
        acc = merge(acc, _single(rec))
    return acc


def write_csv(records, fh, header=True):
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(CSV_FIELDS)
    for rec in records:
        w.writerow(rec.csv_row())


def parse_row(row, lineno=0):
    if len(row) != len(CSV_FIELDS):
        raise MalformedLine(lineno, ",".join(row))
    try:
        vals = {}
        for f, x in zip(CSV_FIELDS, row):
            vals[f] = int(x) if f in ("n", "b_n", "b_next", "db") else float(x)
        return GapRecord(**vals)
    except (ValueError, DomainError) as exc:
        raise MalformedLine(lineno, ",".join(row)) from exc


def read_csv(fh):
    """Yield GapRecords from a CSV stream written by ``write_csv``."""
    reader = csv.reader(fh)
    for lineno, row in enumerate(reader, start=1):
        if lineno == 1 and row and row[0] == "n":
            continue
        if not row:
            continue
        yield parse_row(row, lineno)


def records_to_csv_text(records):
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


__all__ = ["GapRecord", "ChainVerdict", "SweepSummary", "CSV_FIELDS",
           "gap", "make_gap", "normalized", "verify_chain", "summarize", "merge",
           "write_csv", "read_csv", "q15"]
