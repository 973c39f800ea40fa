import json
import math

import pytest

from twistdisc.campaigns import (
    CampaignPreconditionError,
    ReportCache,
    SamplingPlan,
    enumerate_subsets,
    instance_seed,
    scan_pl,
    verify_four_states,
    verify_size_bound,
    verify_three_states,
)
from twistdisc.operators import lattice_basis


class TestSamplingPlan:
    def test_auto_exhaustive(self):
        assert SamplingPlan().resolve(3, 3).kind == "exhaustive"

    def test_auto_sampled(self):
        plan = SamplingPlan(samples=50).resolve(7, 4)
        assert plan.kind == "sampled" and plan.samples == 50

    def test_requires_samples(self):
        with pytest.raises(ValueError):
            SamplingPlan("sampled")
        with pytest.raises(ValueError):
            SamplingPlan("random", 3)

    def test_exhaustive_count(self):
        subsets = enumerate_subsets(4, 3, SamplingPlan(), seed=0)
        assert len(subsets) == math.comb(16, 3) == len(set(subsets))

    def test_sampled_subsets_valid(self):
        for s in enumerate_subsets(7, 4, SamplingPlan("sampled", 40), seed=1):
            assert len(set(s)) == 4 and all(0 <= i < 49 for i in s)

    def test_stratified_covers_strata(self):
        _, labels = lattice_basis(14)
        subsets = enumerate_subsets(14, 4, SamplingPlan("stratified", 40), seed=2)
        distinct = {len({labels[i].local_indices[1] for i in s}) for s in subsets}
        assert distinct == {1, 2, 3, 4}
        assert all(len(set(s)) == 4 for s in subsets)

    def test_seeds_differ_by_index(self):
        assert instance_seed(0, 1) != instance_seed(0, 2)
        assert instance_seed(5, 1) == instance_seed(5, 1)


class TestCampaigns:
    def test_pairs_at_six(self):
        rep = verify_size_bound(6, 2, SamplingPlan("sampled", 200), seed=0)
        assert rep.counts["YES"] == 200 and rep.passed and rep.attempted == 200

    def test_size_bound_precondition(self):
        with pytest.raises(CampaignPreconditionError):
            verify_size_bound(6, 3)

    def test_three_states_qutrit(self):
        rep = verify_three_states(3, SamplingPlan(), seed=0)
        assert rep.counts == {"YES": 84, "NO": 0, "UNKNOWN": 0}
        assert rep.max_yes_residual < 1e-9 and not rep.failures

    def test_three_states_precondition(self):
        with pytest.raises(CampaignPreconditionError):
            verify_three_states(2)

    def test_four_states_exceptional_not_asserted(self):
        rep = verify_four_states(6, SamplingPlan("sampled", 20), seed=0, budget=8)
        assert not rep.asserted and rep.passed and not rep.failures
        assert rep.attempted == 20

    def test_four_states_prime(self):
        rep = verify_four_states(7, SamplingPlan("sampled", 30), seed=3)
        assert rep.asserted and rep.passed

    def test_counts_sum(self):
        rep = verify_four_states(4, SamplingPlan("sampled", 15), seed=0, budget=8)
        assert sum(rep.counts.values()) == rep.attempted == len(rep.records) == 15

    def test_deterministic(self):
        a = verify_size_bound(5, 3, SamplingPlan("sampled", 30), seed=11)
        b = verify_size_bound(5, 3, SamplingPlan("sampled", 30), seed=11)
        assert json.dumps(a.to_dict(include_timing=False)) == json.dumps(b.to_dict(include_timing=False))

    def test_workers_match_serial(self):
        plan = SamplingPlan("sampled", 12)
        a = verify_size_bound(5, 3, plan, seed=2, workers=1)
        b = verify_size_bound(5, 3, plan, seed=2, workers=2)
        assert a.to_dict(include_timing=False) == b.to_dict(include_timing=False)

    def test_summary_omits_records(self):
        d = verify_size_bound(5, 2, SamplingPlan("sampled", 5)).to_dict(full=False)
        assert "records" not in d and d["schema_version"] == 1 and "version" in d


class TestScan:
    def test_pairs_everywhere(self):
        rep = scan_pl(2, range(2, 9), SamplingPlan("sampled", 30), seed=0)
        assert [row["dim"] for row in rep.per_dim] == list(range(2, 9))
        assert all(row["fractions"]["YES"] == 1.0 for row in rep.per_dim)
        assert not rep.asserted

    def test_bell_triples(self):
        rep = scan_pl(3, [2])
        assert rep.per_dim[0]["counts"] == {"YES": 0, "NO": 4, "UNKNOWN": 0}

    def test_precondition(self):
        with pytest.raises(CampaignPreconditionError):
            scan_pl(1, [3])


class TestCache:
    def test_round_trip(self, tmp_path):
        cache = ReportCache(tmp_path)
        req = {"theorem": 3, "dim": 5, "l": 2}
        assert cache.get(req) is None
        cache.put(req, {"counts": {"YES": 1}})
        assert cache.get(req) == {"counts": {"YES": 1}}
        assert cache.get({**req, "l": 3}) is None

    def test_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TWISTDISC_CACHE", str(tmp_path / "c"))
        assert ReportCache().root == tmp_path / "c"
