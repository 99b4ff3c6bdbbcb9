"""Deterministic sharded sweeps over zero indices with checkpoint and resume.

Shards are fixed blocks of ``SHARD_SIZE`` indices counted from ``n_lo``, so
every zero is always computed inside the same window no matter how the run
was split up, resumed or parallelised.  Shard results are written by a single
writer in index order.
"""

from __future__ import annotations

import concurrent.futures as cf
import dataclasses
import enum
import hashlib
import json
import logging
import math
import os
from pathlib import Path

import numpy as np

from .arg_tracker import DEFAULT_LADDER, arg_limit_at_zeros
from .errors import CheckpointMismatch, ConfigError, NoConvergence
from .gap_stats import SweepSummary, make_gap, summarize, write_csv, CSV_FIELDS
from .lfunc import FamilyKind, LFamily
from .special_fn import theta
from .zero_solver import AGREEMENT_TOL, RESIDUAL_TOL, seed_ordinate, solve_many
from .zeta_engine import average_gap, scan_zeros

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
SHARD_SIZE = 1000
TWO_PI = 2.0 * math.pi


class Route(enum.Enum):
    SCAN = "scan"
    TRANS = "trans"
    BOTH = "both"


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    n_lo: int
    n_hi: int
    route: Route = Route.BOTH
    family: LFamily = LFamily(FamilyKind.ZETA)
    ladder: tuple = DEFAULT_LADDER
    parallelism: int = 1
    checkpoint_every: int = 1000
    out: str = "sweep"
    fmt: str = "csv"
    precision: str = "double"

    def __post_init__(self):
        if self.n_lo < 1:
            raise ConfigError("n_lo must be at least 1")
        if self.n_hi <= self.n_lo:
            raise ConfigError("n_hi must exceed n_lo")
        if self.parallelism < 1 or self.checkpoint_every < 1:
            raise ConfigError("parallelism and checkpoint interval must be positive")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        if self.precision not in ("double", "extended"):
            raise ConfigError(f"unknown precision {self.precision!r}")
        if self.family.kind is not FamilyKind.ZETA:
            raise ConfigError("index sweeps are implemented for zeta; use lgaps for other families")
        if any(not 0 < d <= 0.5 for d in self.ladder) or len(self.ladder) < 3:
            raise ConfigError("delta ladder needs at least three values in (0, 1/2]")

    def digest(self):
        """Hash of everything that affects the output (parallelism excluded)."""
        d = {"n_lo": self.n_lo, "n_hi": self.n_hi, "route": self.route.value,
             "family": self.family.label, "ladder": [float.hex(float(x)) for x in self.ladder],
             "checkpoint_every": self.checkpoint_every, "fmt": self.fmt,
             "precision": self.precision, "shard": SHARD_SIZE, "version": FORMAT_VERSION}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    @property
    def paths(self):
        base = Path(self.out)
        ext = ".csv" if self.fmt == "csv" else ".jsonl"
        return {"data": base.with_name(base.name + ext),
                "summary": base.with_name(base.name + ".summary.json"),
                "checkpoint": base.with_name(base.name + ".ckpt.json"),
                "monitor": base.with_name(base.name + ".monitor.json")}


@dataclasses.dataclass
class Monitor:
    """Running record of hypothesis monitors and route diagnostics."""
    h1_events: list = dataclasses.field(default_factory=list)
    h2_events: list = dataclasses.field(default_factory=list)
    route_disagreements: list = dataclasses.field(default_factory=list)
    residual_failures: list = dataclasses.field(default_factory=list)
    max_abs_residual: float = 0.0
    max_route_diff: float = 0.0
    max_seed_error_gaps: float = 0.0
    oscillations: int = 0
    zeros_checked: int = 0

    def add_zero(self, d):
        """Fold the diagnostics of one zero (see ``compute_shard``)."""
        n = d["n"]
        self.zeros_checked += 1
        self.max_abs_residual = max(self.max_abs_residual, abs(d["residual"]))
        if abs(d["residual"]) >= RESIDUAL_TOL:
            self.residual_failures.append({"n": n, "residual": d["residual"]})
        if "route_diff" in d:
            self.max_route_diff = max(self.max_route_diff, d["route_diff"])
            if d["route_diff"] >= AGREEMENT_TOL:
                self.route_disagreements.append({"n": n, "diff": d["route_diff"]})
        if d.get("candidates", 1) != 1:
            self.h1_events.append({"n": n, "t": d["t"], "candidates": d["candidates"]})
        if "seed_error_gaps" in d:
            self.max_seed_error_gaps = max(self.max_seed_error_gaps, d["seed_error_gaps"])
        self.oscillations += int(d.get("oscillated", False))

    def add_record(self, rec):
        if abs(rec.db) > 1:
            self.h2_events.append({"n": rec.n, "t_n": rec.t_n, "db": rec.db,
                                   "a_n": rec.a_n, "a_next": rec.a_next})

    def to_json(self):
        d = dataclasses.asdict(self)
        for k in ("max_abs_residual", "max_route_diff", "max_seed_error_gaps"):
            d[k] = float.hex(d[k])
        return d

    @classmethod
    def from_json(cls, d):
        d = dict(d)
        for k in ("max_abs_residual", "max_route_diff", "max_seed_error_gaps"):
            d[k] = float.fromhex(d[k])
        return cls(**d)

    def report(self):
        return {"h1_multiple_candidates": len(self.h1_events), "h1_events": self.h1_events,
                "h2_events": self.h2_events, "route_disagreements": self.route_disagreements,
                "residual_failures": self.residual_failures,
                "max_abs_residual": float(format(self.max_abs_residual, ".15g")),
                "max_route_diff": float(format(self.max_route_diff, ".15g")),
                "max_seed_error_gaps": float(format(self.max_seed_error_gaps, ".15g")),
                "oscillations": self.oscillations, "zeros_checked": self.zeros_checked}


# ---------------------------------------------------------------- shard work

def _scan_indices(m0, m1):
    """Scan zeros with indices m0..m1 (plus neighbours), as (n, t) arrays."""
    lo = 10.0 if m0 < 3 else float(seed_ordinate(m0)) - 2.0 * float(average_gap(seed_ordinate(m0)))
    hi = float(seed_ordinate(max(m1, 2))) + 2.0 * float(average_gap(seed_ordinate(max(m1, 2))))
    for _ in range(6):
        zs = scan_zeros(max(lo, 10.0), hi)
        ns = np.array([z.n for z in zs])
        ts = np.array([z.t for z in zs])
        if ns.size and ns[0] <= m0 and ns[-1] >= m1:
            return ns, ts
        if not ns.size or ns[0] > m0:
            lo -= 2.0 * float(average_gap(max(lo, 20.0)))
        if not ns.size or ns[-1] < m1:
            hi += 2.0 * float(average_gap(hi))
    raise NoConvergence(f"could not place a scan window around indices {m0}..{m1}")


def _h1_count(n, t, scan_n, scan_t, scan_res):
    """Scan zeros in [t - 2pi/log t, t + 2pi/log t] solving the equation for index n."""
    w = TWO_PI / math.log(t)
    sel = (scan_t >= t - w) & (scan_t <= t + w)
    fn = scan_res[sel] + (scan_n[sel] - n) * math.pi
    return int(np.count_nonzero(np.abs(fn) < math.pi / 2))


def compute_shard(cfg: SweepConfig, m0: int, m1: int):
    """Zeros m0..m1+1 (the data for gaps n = m0..m1) with per-zero diagnostics.

    Returns
    -------
    zeros : list of (n, t, a, b) tuples
    diags : list of dict, one per zero m0..m1+1, keys ``n``, ``t``,
        ``residual`` and, depending on the route, ``route_diff``,
        ``candidates`` (uniqueness monitor), ``seed_error_gaps``, ``oscillated``.
    """
    zeros = np.arange(m0, m1 + 2)
    diags = [{"n": int(n)} for n in zeros]
    if cfg.route in (Route.SCAN, Route.BOTH):
        scan_n, scan_t = _scan_indices(m0, m1 + 1)
        scan_recs = _arg_limits(scan_t, cfg.ladder, cfg.precision)
        scan_a = np.array([r.a for r in scan_recs])
        scan_b = np.array([r.b for r in scan_recs])
        scan_res = np.asarray(theta(scan_t)) + scan_a - (scan_n - 1.5) * math.pi
        idx = np.searchsorted(scan_n, zeros)
        t, a, b, res = scan_t[idx], scan_a[idx], scan_b[idx], scan_res[idx]
    if cfg.route in (Route.TRANS, Route.BOTH):
        trans_n = zeros[zeros >= 2]
        reps = solve_many(trans_n, cfg.ladder)
        tt = np.array([r.t for r in reps])
        ta = np.array([r.a for r in reps])
        tb = np.array([r.b for r in reps])
        tres = np.array([r.residual for r in reps])
        off = zeros.size - trans_n.size
        for r, d in zip(reps, diags[off:]):
            d["oscillated"] = r.oscillated
            if r.n >= 10:
                d["seed_error_gaps"] = abs(r.seed - r.t) / float(average_gap(r.t))
        if off:
            # the first zero always comes from the scan route
            _, t1 = _scan_indices(1, 1)
            r1 = _arg_limits(t1[:1], cfg.ladder, cfg.precision)[0]
            tt = np.concatenate([t1[:1], tt])
            ta = np.concatenate([[r1.a], ta])
            tb = np.concatenate([[r1.b], tb])
            tres = np.concatenate([[float(theta(t1[0])) + r1.a + 0.5 * math.pi], tres])
        if cfg.route is Route.BOTH:
            for k, d in enumerate(diags):
                d["route_diff"] = float(abs(tt[k] - t[k]))
                if d["n"] >= 2:
                    d["candidates"] = _h1_count(d["n"], float(tt[k]), scan_n, scan_t, scan_res)
        t, a, b, res = tt, ta, tb, tres
    for k, d in enumerate(diags):
        d["t"] = float(t[k])
        d["residual"] = float(res[k])
    out = [(int(zeros[k]), float(t[k]), float(a[k]), int(b[k])) for k in range(zeros.size)]
    return out, diags


def _record(z0, z1):
    return make_gap(z0[0], z0[1], z1[1], z0[2], z1[2], z0[3], z1[3]).quantized()


def _arg_limits(t, ladder, precision="double"):
    """Batch limits, retrying individual zeros in extended precision on failure."""
    if precision == "extended":
        return arg_limit_at_zeros(t, ladder, "extended")
    try:
        return arg_limit_at_zeros(t, ladder)
    except NoConvergence:
        out = []
        for x in t:
            try:
                out.append(arg_limit_at_zeros([x], ladder)[0])
            except NoConvergence:
                log.warning("extended-precision retry at t = %r", x)
                out.append(arg_limit_at_zeros([x], ladder, "extended")[0])
        return out


def _shard_job(args):
    cfg, m0, m1 = args
    return compute_shard(cfg, m0, m1)


# ---------------------------------------------------------------- driver

def _atomic_json(path, obj):
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")
    os.replace(tmp, path)


def _shards(cfg, start):
    """Absolute shard blocks of gap indices covering [start, n_hi - 1]."""
    last = cfg.n_hi - 1
    k = (start - cfg.n_lo) // SHARD_SIZE
    while True:
        m0 = cfg.n_lo + k * SHARD_SIZE
        if m0 > last:
            return
        yield max(m0, start), min(m0 + SHARD_SIZE - 1, last), m0
        k += 1


def _write_records(records, fh, fmt):
    if fmt == "csv":
        write_csv(records, fh, header=False)
    else:
        for rec in records:
            row = dict(zip(CSV_FIELDS, rec.csv_row()))
            fh.write(json.dumps({k: (int(v) if k in ("n", "b_n", "b_next", "db") else float(v))
                                 for k, v in row.items()}) + "\n")


def load_checkpoint(cfg: SweepConfig):
    path = cfg.paths["checkpoint"]
    if not path.exists():
        return None
    ck = json.loads(path.read_text())
    if ck.get("version") != FORMAT_VERSION or ck.get("digest") != cfg.digest():
        raise CheckpointMismatch(f"{path} was written by a different configuration; "
                                 "use --fresh to start over")
    return ck


def run_sweep(cfg: SweepConfig, fresh=False, stop_after=None):
    """Run (or resume) a sweep; returns (summary, monitor).

    ``stop_after`` interrupts the run after that many new records have been
    checkpointed, emulating a kill for resume tests.
    """
    paths = cfg.paths
    ck = None if fresh else load_checkpoint(cfg)
    if ck is None:
        summary, mon, next_n = SweepSummary(), Monitor(), cfg.n_lo
        with open(paths["data"], "w", newline="") as fh:
            if cfg.fmt == "csv":
                fh.write(",".join(CSV_FIELDS) + "\n")
    else:
        summary = SweepSummary.from_state(ck["summary"])
        mon = Monitor.from_json(ck["monitor"])
        next_n = ck["last_n"] + 1
        with open(paths["data"], "r+b") as fh:
            fh.truncate(ck["offset"])
    written = 0
    since_ckpt = 0
    # whole absolute blocks, so a resumed shard sees the same scan window
    jobs = [(cfg, b0, m1) for _, m1, b0 in _shards(cfg, next_n)]
    with open(paths["data"], "a", newline="") as fh:
        # Each zero is owned by the block containing its index. Batched
        # evaluation is not bit-identical across batches, so the gap that
        # straddles a block boundary waits for the next block's first zero.
        carry = carry_diag = None
        for zs, diags in _map_shards(jobs, cfg.parallelism):
            pairs = [] if carry is None else [(carry, zs[0], carry_diag)]
            last = zs[-1][0] == cfg.n_hi
            stop = len(zs) - 1 if last else len(zs) - 2
            pairs += [(zs[k], zs[k + 1], diags[k]) for k in range(stop)]
            carry, carry_diag = zs[-2], diags[-2]
            for z0, z1, diag in pairs:
                if z0[0] < next_n:
                    continue
                rec = _record(z0, z1)
                _write_records([rec], fh, cfg.fmt)
                summary = summarize([rec], summary)
                mon.add_zero(diag)
                mon.add_record(rec)
                if rec.n == cfg.n_hi - 1:
                    mon.add_zero(diags[-1])
                written += 1
                since_ckpt += 1
                if since_ckpt >= cfg.checkpoint_every or rec.n == cfg.n_hi - 1:
                    fh.flush()
                    _atomic_json(paths["checkpoint"], {
                        "version": FORMAT_VERSION, "digest": cfg.digest(), "last_n": rec.n,
                        "offset": fh.tell(), "summary": summary.to_state(),
                        "monitor": mon.to_json()})
                    since_ckpt = 0
                    if stop_after is not None and written >= stop_after:
                        return summary, mon
    _atomic_json(paths["summary"], summary.to_json())
    _atomic_json(paths["monitor"], mon.report())
    return summary, mon


def _map_shards(jobs, parallelism):
    if parallelism == 1 or len(jobs) <= 1:
        for job in jobs:
            yield _shard_job(job)
        return
    with cf.ProcessPoolExecutor(max_workers=parallelism) as ex:
        yield from ex.map(_shard_job, jobs)
