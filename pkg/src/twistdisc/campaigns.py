"""Seeded verification campaigns over subsets of the qudit lattice basis."""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .discrimination import DiscriminationInstance, Verdict, solve
from .linalg import NUMERIC_TOL
from .operators import factorize, lattice_basis, smallest_prime_power

SCHEMA_VERSION = 1
EXHAUSTIVE_LIMIT = 10_000
#: dimensions below 91 that the four-state membership argument does not cover
FOUR_STATE_EXCEPTIONS = frozenset({2, 3, 4, 5, 6, 10, 12, 15, 18, 20, 30, 50, 60, 90})


class CampaignPreconditionError(ValueError):
    """The requested campaign lies outside the range its guarantee covers."""


@dataclass(frozen=True)
class SamplingPlan:
    """``auto`` is exhaustive up to :data:`EXHAUSTIVE_LIMIT` subsets, else sampled.

    ``stratified`` cycles through the possible numbers of distinct members
    of the non-leading factors and samples uniformly within each stratum.
    """

    kind: str = "auto"
    samples: int | None = None

    def __post_init__(self):
        if self.kind not in ("auto", "exhaustive", "sampled", "stratified"):
            raise ValueError(f"unknown sampling plan {self.kind!r}")
        if self.kind in ("sampled", "stratified") and not self.samples:
            raise ValueError(f"{self.kind} plan needs a positive sample count")

    def resolve(self, d: int, l: int) -> "SamplingPlan":
        if self.kind != "auto":
            return self
        if math.comb(d * d, l) <= EXHAUSTIVE_LIMIT:
            return SamplingPlan("exhaustive")
        return SamplingPlan("sampled", self.samples or 1000)


@dataclass
class CampaignReport:
    campaign_id: str
    dims: list
    l: int
    plan: dict
    seed: int
    counts: dict
    asserted: bool
    failures: list = field(default_factory=list)
    routes: dict = field(default_factory=dict)
    max_yes_residual: float = 0.0
    per_dim: list = field(default_factory=list)
    records: list | None = None
    wall_clock: float = 0.0
    budget: int = 64
    schema_version: int = SCHEMA_VERSION
    version: str = __version__

    @property
    def attempted(self) -> int:
        return sum(self.counts.values())

    @property
    def passed(self) -> bool:
        return not self.asserted or (not self.failures and self.counts.get("YES", 0) == self.attempted)

    def to_dict(self, include_timing: bool = True, full: bool = True) -> dict:
        out = asdict(self)
        if not include_timing:
            out.pop("wall_clock")
        if not full:
            out.pop("records")
        return out


def instance_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def lattice_instance(d: int, members) -> DiscriminationInstance:
    us, labels = lattice_basis(d)
    return DiscriminationInstance(tuple(us[i] for i in members), tuple(labels[i] for i in members),
                                  "lattice")


def _strata(d: int, l: int) -> list[int]:
    fac = factorize(d)
    if len(fac) < 2:
        return []
    n1 = smallest_prime_power(d) ** 2
    n_rest = (d // smallest_prime_power(d)) ** 2
    return [k for k in range(1, l + 1) if k <= n_rest and l <= n1 * k]


def _stratified_subset(rng, d: int, l: int, k: int) -> tuple[int, ...]:
    q1 = smallest_prime_power(d)
    n1, n_rest = q1 * q1, (d // q1) ** 2
    rests = rng.choice(n_rest, k, replace=False)
    while True:
        cells = rng.choice(n1 * k, l, replace=False)
        if len(set((cells % k).tolist())) == k:
            break
    return tuple(sorted(int(c // k) * n_rest + int(rests[c % k]) for c in cells))


def enumerate_subsets(d: int, l: int, plan: SamplingPlan, seed: int) -> list[tuple[int, ...]]:
    plan = plan.resolve(d, l)
    n = d * d
    if plan.kind == "exhaustive":
        return list(itertools.combinations(range(n), l))
    rng = np.random.default_rng(seed)
    if plan.kind == "stratified":
        strata = _strata(d, l)
        if strata:
            return [_stratified_subset(rng, d, l, strata[i % len(strata)]) for i in range(plan.samples)]
    return [tuple(sorted(int(x) for x in rng.choice(n, l, replace=False))) for _ in range(plan.samples)]


def _solve_one(args):
    d, members, seed, budget = args
    inst = lattice_instance(d, members)
    cert = solve(inst, budget, seed)
    return {
        "members": list(members),
        "labels": [str(lb) for lb in inst.labels],
        "verdict": cert.verdict.value,
        "proof_tag": None if cert.proof_tag is None else cert.proof_tag.value,
        "residual": cert.residual,
    }


def run_instances(d: int, subsets, seed: int, budget: int = 64, workers: int = 1) -> list[dict]:
    """Solve every subset; per-instance seeds depend only on ``(seed, index)``."""
    jobs = [(d, s, instance_seed(seed, k), budget) for k, s in enumerate(subsets)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_solve_one, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        records = [_solve_one(j) for j in jobs]
    for k, r in enumerate(records):
        r["index"] = k
    return records


def _summarise(records, asserted: bool):
    counts = {v.value: 0 for v in Verdict}
    routes: Counter = Counter()
    max_res = 0.0
    failures = []
    for r in records:
        counts[r["verdict"]] += 1
        if r["verdict"] == "YES":
            routes[r["proof_tag"]] += 1
            max_res = max(max_res, r["residual"])
            if r["residual"] >= NUMERIC_TOL and asserted:
                failures.append({k: r[k] for k in ("index", "labels", "verdict", "residual")})
        elif asserted:
            failures.append({k: r[k] for k in ("index", "labels", "verdict", "proof_tag")})
    return counts, dict(sorted(routes.items())), max_res, failures


def _campaign(campaign_id, d, l, plan, seed, asserted, budget, workers) -> CampaignReport:
    start = time.perf_counter()
    resolved = plan.resolve(d, l)
    subsets = enumerate_subsets(d, l, resolved, seed)
    records = run_instances(d, subsets, seed, budget, workers)
    counts, routes, max_res, failures = _summarise(records, asserted)
    return CampaignReport(campaign_id, [d], l, asdict(resolved), seed, counts, asserted, failures,
                          routes, max_res, records=records, wall_clock=time.perf_counter() - start,
                          budget=budget)


def verify_size_bound(d: int, l: int, plan: SamplingPlan = SamplingPlan(), seed: int = 0,
                    budget: int = 64, workers: int = 1) -> CampaignReport:
    """Every ``l``-subset must be distinguishable when ``l(l-1) <= 2 * q1``.

    ``q1`` is the smallest prime-power factor of ``d``.
    """
    q1 = smallest_prime_power(d)
    if l < 2 or l * (l - 1) > 2 * q1:
        raise CampaignPreconditionError(
            f"l={l} violates l(l-1) <= 2*{q1} for d={d}; the bound says nothing there")
    return _campaign("theorem3", d, l, plan, seed, True, budget, workers)


def verify_three_states(d: int, plan: SamplingPlan = SamplingPlan(samples=2000), seed: int = 0,
                        budget: int = 64, workers: int = 1) -> CampaignReport:
    """All 3-subsets at ``d >= 3`` must be distinguishable."""
    if d < 3:
        raise CampaignPreconditionError("three-state campaign needs d >= 3")
    return _campaign("theorem4", d, 3, plan, seed, True, budget, workers)


def verify_four_states(d: int, plan: SamplingPlan | None = None, seed: int = 0,
                       budget: int = 64, workers: int = 1) -> CampaignReport:
    """4-subsets; asserted only outside :data:`FOUR_STATE_EXCEPTIONS`.

    The default plan is stratified by the number of distinct non-leading
    factors (so every branch of the case analysis is exercised), falling
    back to uniform sampling for prime-power ``d``.
    """
    if d < 2:
        raise CampaignPreconditionError("dimension must be >= 2")
    if plan is None:
        plan = SamplingPlan("stratified", 300)
    return _campaign("theorem5", d, 4, plan, seed, d not in FOUR_STATE_EXCEPTIONS, budget, workers)


def scan_pl(l: int, dims, plan: SamplingPlan = SamplingPlan(samples=200), seed: int = 0,
            budget: int = 64, workers: int = 1) -> CampaignReport:
    """Fraction of YES/NO/UNKNOWN over ``l``-subsets per dimension; asserts nothing."""
    if l < 2:
        raise CampaignPreconditionError("l must be >= 2")
    start = time.perf_counter()
    rows, total = [], {v.value: 0 for v in Verdict}
    all_records = []
    for d in dims:
        if d < 2 or d * d < l:
            continue
        resolved = plan.resolve(d, l)
        subsets = enumerate_subsets(d, l, resolved, instance_seed(seed, d))
        records = run_instances(d, subsets, instance_seed(seed, d), budget, workers)
        counts, routes, _, _ = _summarise(records, False)
        n = len(records)
        rows.append({"dim": d, "plan": asdict(resolved), "counts": counts, "routes": routes,
                     "fractions": {k: v / n for k, v in counts.items()}})
        for k, v in counts.items():
            total[k] += v
        all_records += [{"dim": d, **r} for r in records]
    return CampaignReport("scan_pl", list(dims), l, asdict(plan), seed, total, False,
                          per_dim=rows, records=all_records,
                          wall_clock=time.perf_counter() - start, budget=budget)


class ReportCache:
    """Directory of reports keyed by a content hash of the campaign request."""

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root or os.environ.get("TWISTDISC_CACHE", ".twistdisc"))

    @staticmethod
    def key(request: dict) -> str:
        blob = json.dumps({**request, "version": __version__}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def get(self, request: dict) -> dict | None:
        path = self.root / f"{self.key(request)}.json"
        if path.exists():
            return json.loads(path.read_text())
        return None

    def put(self, request: dict, report: dict) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / f"{self.key(request)}.json"
        path.write_text(json.dumps(report, sort_keys=True))
        return path
