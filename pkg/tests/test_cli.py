import json

import numpy as np
import pytest

from twistdisc.cli import parse_and_dispatch
from twistdisc.operators import gbs_basis
from twistdisc.serialize import matrix_from_json, vector_to_json


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("TWISTDISC_CACHE", str(tmp_path / "cache"))


def run(tmp_path, *argv):
    out = tmp_path / "out.json"
    code = parse_and_dispatch([*argv, "--out", str(out), "--json-only"])
    return code, (json.loads(out.read_text()) if out.exists() else None)


class TestGenBasis:
    def test_round_trip_bit_identical(self, tmp_path):
        code, doc = run(tmp_path, "gen-basis", "--family", "gbs", "--dim", "3")
        assert code == 0 and len(doc["matrices"]) == 9
        for m, u in zip(doc["matrices"], gbs_basis(3)[0]):
            assert np.array_equal(matrix_from_json(m), u.data)

    def test_envelope(self, tmp_path):
        _, doc = run(tmp_path, "gen-basis", "--family", "lattice", "--dim", "6")
        assert doc["schema_version"] == 1 and doc["version"]
        assert doc["config"]["dim"] == 6 and doc["config"]["family"] == "lattice"
        assert doc["labels"][0] == "2^1:[0]/[0]*3^1:[0]/[0]"

    def test_pipe_into_check_twist(self, tmp_path):
        basis = tmp_path / "basis.json"
        assert parse_and_dispatch(["gen-basis", "--family", "gbs", "--dim", "3",
                                   "--out", str(basis), "--json-only"]) == 0
        code, doc = run(tmp_path, "check-twist", "--in", str(basis))
        assert code == 0 and doc["is_twist"] is True


class TestTeleport:
    def test_uniform_branches(self, tmp_path):
        state = tmp_path / "psi.json"
        state.write_text(json.dumps(vector_to_json(np.array([1, 0], complex))))
        code, doc = run(tmp_path, "teleport", "--dim", "2", "--resource", "0", "--state", str(state),
                        "--shots", "100", "--seed", "3")
        assert code == 0
        probs = [b["probability"] for b in doc["branch_table"]["branches"]]
        assert np.allclose(probs, 0.25) and len(probs) == 4
        assert sum(doc["histogram"]) == 100 and doc["config"]["seed"] == 3

    def test_state_dimension(self, tmp_path):
        state = tmp_path / "psi.json"
        state.write_text(json.dumps(vector_to_json(np.array([1, 0, 0], complex))))
        code, _ = run(tmp_path, "teleport", "--dim", "2", "--resource", "0", "--state", str(state))
        assert code == 65


class TestDiscriminate:
    def test_bell_triple(self, tmp_path):
        code, doc = run(tmp_path, "discriminate", "--dim", "2", "--family", "gbs",
                        "--labels", "(0,0);(1,0);(0,1)")
        assert code == 1
        assert doc["certificate"]["verdict"] == "NO"
        assert doc["certificate"]["proof_tag"] == "bloch_qubit"

    def test_yes(self, tmp_path):
        code, doc = run(tmp_path, "discriminate", "--dim", "3", "--labels", "(0,0);(1,0);(0,1)")
        assert code == 0 and doc["certificate"]["residual"] < 1e-9
        assert doc["config"]["seed"] == 0 and doc["config"]["budget"] == 64

    def test_lattice_labels(self, tmp_path):
        code, doc = run(tmp_path, "discriminate", "--family", "lattice",
                        "--labels", "2^1:[0]/[0]*3^1:[0]/[0];2^1:[1]/[0]*3^1:[0]/[0]")
        assert code == 0

    def test_matrix_file(self, tmp_path):
        f = tmp_path / "m.json"
        perm = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
        f.write_text(json.dumps([
            {"rows": 3, "cols": 3, "re": np.eye(3).ravel().tolist(), "im": [0.0] * 9},
            {"rows": 3, "cols": 3, "re": np.ravel(perm).astype(float).tolist(), "im": [0.0] * 9},
        ]))
        code, doc = run(tmp_path, "discriminate", "--in", str(f))
        assert code == 0 and doc["certificate"]["verdict"] == "YES"

    def test_unknown_exit(self, tmp_path):
        f = tmp_path / "m.json"
        f.write_text(json.dumps([
            {"rows": 3, "cols": 3, "re": np.eye(3).ravel().tolist(), "im": [0.0] * 9},
            {"rows": 3, "cols": 3, "re": [1, 0, 0, 0, 0, 0, 0, 0, 0], "im": [0, 0, 0, 0, 1, 0, 0, 0, 1]},
        ]))
        code, doc = run(tmp_path, "discriminate", "--in", str(f), "--budget", "2")
        assert code == 2 and doc["certificate"]["verdict"] == "UNKNOWN"

    def test_malformed_json(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text("{not json")
        assert run(tmp_path, "discriminate", "--in", str(f))[0] == 65

    def test_non_unitary_payload(self, tmp_path):
        f = tmp_path / "m.json"
        f.write_text(json.dumps([{"rows": 2, "cols": 2, "re": [1, 1, 1, 1], "im": [0, 0, 0, 0]}] * 2))
        assert run(tmp_path, "discriminate", "--in", str(f))[0] == 65

    def test_missing_input(self, tmp_path):
        assert run(tmp_path, "discriminate", "--dim", "3")[0] == 64


class TestVerify:
    def test_size_bound_and_cache(self, tmp_path):
        argv = ("verify", "--theorem", "3", "--dim", "5", "--l", "2", "--plan", "sampled", "--samples", "10")
        code, doc = run(tmp_path, *argv)
        assert code == 0 and doc["cached"] is False and doc["report"]["counts"]["YES"] == 10
        assert "records" not in doc["report"]
        code, doc = run(tmp_path, *argv)
        assert code == 0 and doc["cached"] is True

    def test_precondition_is_usage_error(self, tmp_path):
        assert run(tmp_path, "verify", "--theorem", "3", "--dim", "6", "--l", "4")[0] == 64

    def test_full_records(self, tmp_path):
        code, doc = run(tmp_path, "verify", "--theorem", "4", "--dim", "3", "--full", "--no-cache")
        assert code == 0 and len(doc["report"]["records"]) == 84

    def test_scan(self, tmp_path):
        code, doc = run(tmp_path, "scan-pl", "--l", "3", "--dims", "2..3", "--samples", "5")
        assert code == 0
        rows = doc["report"]["per_dim"]
        assert rows[0]["counts"]["NO"] == rows[0]["plan"]["samples"] == 5


class TestUsage:
    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            parse_and_dispatch(["frobnicate"])
        assert exc.value.code == 64

    def test_bad_flag_value(self):
        with pytest.raises(SystemExit) as exc:
            parse_and_dispatch(["gen-basis", "--family", "weird", "--dim", "3"])
        assert exc.value.code == 64
