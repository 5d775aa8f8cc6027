"""Threshold sweeps: generate sets on a parameter grid, measure lA, write CSV.

Config files are flat ``key = value`` lines; repeating a key builds a grid
axis.  Grid points run in the order n, generator, l, card (outermost first)
and each point draws from its own stream ``SeedSequence([seed, index])`` of
the named bit generator, so a record depends only on the config and its
index, never on the worker that ran it.

The ``ap_len`` column is the longest AP in lA for the generated set.  For the
extremal generators this is an upper bound on the extremal function
f(|A|, l, n) (a minimum over all sets of that size), not f itself.
"""
from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing as mp
import multiprocessing.connection as mp_connection
import os
import re
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .constructions import build_general, build_mod, build_planar, is_prime
from .core import IntSet
from .errors import CapExceeded, PreconditionError
from .gap import gap_scale
from .structure import find_proper_gap, longest_ap, longest_ap_in_gap
from .sumsets import SumCap, iterated_sumset

CSV_VERSION = "sumsetlab-sweep v1"
COLUMNS = ("n", "l", "m", "card", "generator", "ap_len", "gap_rank", "gap_vol", "ms", "status")
BIT_GENERATORS = {
    "pcg64": np.random.PCG64,
    "philox": np.random.Philox,
    "sfc64": np.random.SFC64,
    "mt19937": np.random.MT19937,
}
GRID_KEYS = ("n", "l", "generator", "card")
SCALAR_DEFAULTS = {
    "seed": "0",
    "rng": "pcg64",
    "timing": "off",
    "max_universe": str(1 << 28),
    "ap_work_cap": str(5 * 10**8),
    "mod_ap_work_cap": str(2 * 10**9),
    "gap_budget": "2000000",
    "delta": "0.1",
    "memory_mb": "auto",
}
# measured peak memory of a point at n = 10^6 grows by about this much per doubling of l
MB_PER_DOUBLING = 650
MOD_BYTES_PER_RESIDUE = 64
BASE_MB = 200
# planar parameters count as admissible (AP bound l m expected) when l <= n / (4.1 m^2)
PLANAR_RATIO = 4.1

_GEN_RE = re.compile(r"^(interval|random|planar|general|mod)(?:\((\d+)\))?$")
_CARD_RE = re.compile(r"^(?:([0-9.]+)\*)?n/l(?:\^(\d+))?$")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    grid: dict            # axis name -> list of raw values
    scalars: dict

    @property
    def seed(self) -> int:
        return int(self.scalars["seed"])

    @property
    def timing(self) -> bool:
        return self.scalars["timing"] == "on"

    @property
    def memory_mb(self) -> int:
        v = self.scalars["memory_mb"]
        if v != "auto":
            return int(v)
        return int(0.8 * _available_mb())

    def points(self):
        """Grid points in config order: (index, n, generator, l, card spec)."""
        axes = [self.grid[k] for k in ("n", "generator", "l", "card")]
        for i, (n, g, l, c) in enumerate(product(*axes)):
            yield i, int(n), g, int(l), c


def parse_config(text: str) -> SweepConfig:
    grid = {k: [] for k in GRID_KEYS}
    scalars = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        if key in grid:
            grid[key].append(value)
        elif key in SCALAR_DEFAULTS:
            if key in scalars:
                raise ConfigError(f"line {lineno}: {key} given twice")
            scalars[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    for k, vals in grid.items():
        if not vals:
            raise ConfigError(f"config needs at least one {k} value")
    for g in grid["generator"]:
        if not _GEN_RE.match(g):
            raise ConfigError(f"unknown generator {g!r}")
    for c in grid["card"]:
        if not (c.isdigit() or _CARD_RE.match(c)):
            raise ConfigError(f"card must be an integer or [x*]n/l[^e], got {c!r}")
    merged = dict(SCALAR_DEFAULTS)
    merged.update(scalars)
    if merged["rng"] not in BIT_GENERATORS:
        raise ConfigError(f"rng must be one of {sorted(BIT_GENERATORS)}")
    if merged["timing"] not in ("on", "off"):
        raise ConfigError("timing must be on or off")
    if merged["memory_mb"] != "auto" and not merged["memory_mb"].isdigit():
        raise ConfigError("memory_mb must be auto or a whole number of megabytes")
    return SweepConfig(grid, merged)


def read_config(path) -> SweepConfig:
    return parse_config(Path(path).read_text())


def resolve_card(spec: str, n: int, l: int) -> int:
    if spec.isdigit():
        return int(spec)
    mult, e = _CARD_RE.match(spec).groups()
    value = float(mult or 1) * n / l ** int(e or 1)
    return max(1, int(round(value)))


@dataclass(frozen=True)
class SweepRecord:
    index: int
    n: int
    l: int
    generator: str
    d: int | None           # rank of the generator's shape (interval: 1)
    m: int | None           # side length
    card: int | None        # |A|
    ap_len: int | None      # longest AP in lA
    gap_rank: int | None    # best certified proper GAP in lA
    gap_vol: int | None
    ms: float | None
    status: str             # ok, cap, precondition, error
    detail: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def predicted(self) -> float | None:
        """l |A|^(1/d), the order of the longest AP for the extremal generators."""
        if self.card is None or self.d is None:
            return None
        return self.l * self.card ** (1 / self.d)

    def row(self, timing: bool) -> list[str]:
        def f(x):
            return "NA" if x is None else str(x)
        ms = f"{self.ms:.1f}" if timing and self.ms is not None else "NA"
        return [str(self.n), str(self.l), f(self.m), f(self.card), self.generator,
                f(self.ap_len), f(self.gap_rank), f(self.gap_vol), ms, self.status]

    def to_json(self) -> dict:
        out = asdict(self)
        out["predicted"] = self.predicted
        return out


def _largest_prime_at_most(n):
    p = n
    while p >= 2 and not is_prime(p):
        p -= 1
    if p < 2:
        raise PreconditionError(f"no prime <= {n}")
    return p


def _side(card, d):
    m = int(round(card ** (1 / d)))
    while (m + 1) ** d <= card:
        m += 1
    while m > 1 and m ** d > card:
        m -= 1
    return max(m, 1)


def run_point(cfg: SweepConfig, index: int, n: int, gen: str, l: int, card_spec: str) -> SweepRecord:
    """Measure one grid point; failures become the record's status."""
    t0 = time.perf_counter()
    kind, darg = _GEN_RE.match(gen).groups()
    state = {"d": None, "m": None, "card": None, "extra": {}}
    try:
        rec = _measure(cfg, index, n, kind, int(darg) if darg else None, l,
                       resolve_card(card_spec, n, l), state)
        status, detail = "ok", ""
    except CapExceeded as e:
        rec, status, detail = {}, "cap", str(e)
    except PreconditionError as e:
        rec, status, detail = {}, "precondition", str(e)
    except (MemoryError, ArithmeticError, ValueError) as e:
        rec, status, detail = {}, "error", f"{type(e).__name__}: {e}"
    ms = (time.perf_counter() - t0) * 1000 if cfg.timing else None
    return SweepRecord(index, n, l, gen, state["d"], state["m"], state["card"],
                       rec.get("ap_len"), rec.get("gap_rank"), rec.get("gap_vol"), ms,
                       status, detail, state["extra"])


def _measure(cfg, index, n, kind, d, l, card, state):
    cap = SumCap(max_universe=int(cfg.scalars["max_universe"]))
    work_cap = int(cfg.scalars["ap_work_cap"])
    budget = int(cfg.scalars["gap_budget"])
    delta = float(cfg.scalars["delta"])
    if kind == "interval":
        state.update(d=1, m=card, card=card)
        return _engine_measure(IntSet.interval(1, card), l, cap, work_cap, budget)
    if kind == "random":
        if card > n:
            raise PreconditionError(f"card {card} exceeds n = {n}")
        bitgen = BIT_GENERATORS[cfg.scalars["rng"]](np.random.SeedSequence([cfg.seed, index]))
        rng = np.random.Generator(bitgen)
        A = IntSet(np.sort(rng.choice(n, size=card, replace=False)) + 1)
        state.update(d=None, m=None, card=card)
        return _engine_measure(A, l, cap, work_cap, budget)
    if kind == "planar":
        m = _side(card, 2)
        A, params = build_planar(n, m)
        state.update(d=2, m=m, card=len(A), extra={"primes": list(params.primes),
                                                   "admissible": l <= n / (PLANAR_RATIO * m * m)})
        return _gap_measure(A, params, l, cap, work_cap, budget)
    if kind == "general":
        d = d or 3
        m = _side(card, d)
        A, params = build_general(d, n, m, delta=delta)
        state.update(d=d, m=m, card=len(A), extra={"diffs": list(params.diffs)})
        return _gap_measure(A, params, l, cap, work_cap, budget)
    # modular
    d = d or 2
    p = _largest_prime_at_most(n)
    m = _side(card, d)
    state.update(d=d, m=m, extra={"modulus": p})
    R, params = build_mod(d, p, m, l, delta=delta, check=False)
    state["card"] = len(R)
    state["extra"]["admissible"] = params.extra["admissible"]
    lA = iterated_sumset(R, l, SumCap(max_universe=cap.max_universe, modulus=p))
    ap = longest_ap(lA, work_cap=int(cfg.scalars["mod_ap_work_cap"]))
    # GAP search works on integer sets; residue rows leave the GAP columns empty
    return {"ap_len": ap.length}


def _engine_measure(A, l, cap, work_cap, budget):
    lA = iterated_sumset(A, l, cap)
    ap = longest_ap(lA, work_cap=work_cap)
    G = find_proper_gap(lA, max_rank=2, budget=budget, ap=ap)
    return {"ap_len": ap.length, "gap_rank": G.rank if G else 1, "gap_vol": G.volume if G else 0}


def _gap_measure(A, params, l, cap, work_cap, budget):
    # lA of a GAP-shaped set is the scaled GAP; when its doubled box has no
    # vanishing vector the longest AP and a proper GAP (lA itself) are exact
    lG = gap_scale(params.gap, l)
    try:
        ap = longest_ap_in_gap(lG)
    except CapExceeded:
        ap = None
    if ap is not None:
        return {"ap_len": ap.length, "gap_rank": lG.rank, "gap_vol": lG.volume}
    return _engine_measure(A, l, cap, work_cap, budget)


def _run_star(args):
    return run_point(*args)


def point_memory_mb(n: int, gen: str, l: int, card: int) -> int:
    """Rough peak memory of one grid point in MB (a fit to measured peaks)."""
    kind = _GEN_RE.match(gen).group(1)
    if kind == "interval":
        return BASE_MB
    if kind == "mod":
        return BASE_MB + MOD_BYTES_PER_RESIDUE * n // 2**20
    return BASE_MB + int(MB_PER_DOUBLING * max(1.0, math.log2(l)) * n / 10**6)


def _available_mb() -> int:
    try:
        with open("/proc/meminfo") as f:
            for line in f:
                if line.startswith("MemAvailable:"):
                    return int(line.split()[1]) // 1024
    except OSError:
        pass
    return os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES") // 2**20


def _lost_record(job, why):
    _, index, n, gen, l, _ = job
    return SweepRecord(index, n, l, gen, None, None, None, None, None, None, None, "error", why)


def _child(conn, job):
    try:
        conn.send(_run_star(job))
    finally:
        conn.close()


def _run_processes(jobs, weight, workers, budget):
    # one process per point, so memory is returned to the system after each
    # point and a process killed for memory only loses its own point
    ctx = mp.get_context()
    out = [None] * len(jobs)
    queue = deque(range(len(jobs)))
    alone = set()
    running = {}
    used = 0
    while queue or running:
        while queue and (not running or (len(running) < workers and queue[0] not in alone
                                         and not any(r[0] in alone for r in running.values())
                                         and used + weight[queue[0]] <= budget)):
            i = queue.popleft()
            recv, send = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_child, args=(send, jobs[i]), daemon=True)
            proc.start()
            send.close()
            running[recv] = (i, proc, not running)
            used += weight[i]
        for recv in mp_connection.wait(list(running)):
            i, proc, solo = running.pop(recv)
            try:
                out[i] = recv.recv()
            except EOFError:
                if solo:
                    out[i] = _lost_record(jobs[i], f"worker process died (exit {proc.exitcode})")
                else:
                    # retry once with nothing else running
                    alone.add(i)
                    queue.appendleft(i)
            recv.close()
            proc.join()
            used -= weight[i]
    return out


def threshold_sweep(cfg: SweepConfig, workers: int = 1) -> list[SweepRecord]:
    """All grid points, in config order whatever the completion order.

    Each point runs in its own process (``workers`` at a time), started only
    while the estimated memory of the points in flight stays under
    ``memory_mb``; a point over budget runs alone.  A point whose process
    dies is retried alone once, then becomes an error row.  ``workers=0``
    runs everything in the calling process.
    """
    jobs = [(cfg, *pt) for pt in cfg.points()]
    if workers <= 0:
        return [_run_star(j) for j in jobs]
    weight = [point_memory_mb(n, g, l, resolve_card(c, n, l)) for _, _, n, g, l, c in jobs]
    return _run_processes(jobs, weight, workers, cfg.memory_mb)


def format_csv(records, timing: bool = False) -> str:
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow(r.row(timing))
    return buf.getvalue()


def write_csv(records, path, timing: bool = False) -> None:
    Path(path).write_text(format_csv(records, timing))


def format_json(records) -> str:
    return json.dumps({"version": CSV_VERSION, "records": [r.to_json() for r in records]},
                      indent=1, sort_keys=True)


def regime_violations(records) -> list[str]:
    """Interval rows must have ap_len = l |A| - l + 1; admissible planar rows ap_len <= l m."""
    bad = []
    for r in records:
        if r.status != "ok":
            continue
        if r.generator == "interval" and r.ap_len != r.l * r.card - r.l + 1:
            bad.append(f"point {r.index}: interval ap_len {r.ap_len} != {r.l * r.card - r.l + 1}")
        if r.generator == "planar" and r.extra.get("admissible") and r.ap_len > r.l * r.m:
            bad.append(f"point {r.index}: planar ap_len {r.ap_len} > l m = {r.l * r.m}")
    return bad
