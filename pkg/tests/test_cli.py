import json

import numpy as np
import pytest

from psicomplete.cli import main
from psicomplete.constructions import TETRAHEDRON, RankOneConstructionParams, build_rank_one_3dm2
from psicomplete.objects import probabilities, random_pure_state
from psicomplete.reconstruction import invert_rank_one_3dm2
from psicomplete.serialization import SCHEMA_VERSION, povm_from_json, state_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


class TestBuild:
    def test_tetrahedral(self, capsys):
        code, doc = run_json(capsys, "build", "--family", "tetrahedral")
        assert code == 0
        povm = povm_from_json(doc)
        assert len(povm) == 4
        for op, n in zip(povm, TETRAHEDRON):
            # E = (I + n.sigma)/4 so the Bloch vector reads off the matrix entries
            m = op.matrix
            np.testing.assert_allclose([4 * m[0, 1].real, -4 * m[0, 1].imag, 2 * (m[0, 0] - m[1, 1]).real], n, atol=1e-12)
        assert doc["metadata"]["schema_version"] == SCHEMA_VERSION
        assert doc["validation"]["completeness_residual"] < 1e-10

    def test_psic_2d_labels(self, capsys):
        code, doc = run_json(capsys, "build", "--family", "psic2d", "--dim", "5")
        labels = [e["label"] for e in doc["elements"]]
        assert code == 0
        assert labels == ["E0"] + [f"x,{j}" for j in range(1, 5)] + [f"y,{j}" for j in range(1, 5)] + ["T"]

    def test_rank_one_tetra(self, capsys):
        code, doc = run_json(capsys, "build", "--family", "rank1-3dm2", "--dim", "4", "--theta", "tetra")
        assert code == 0 and len(doc["elements"]) == 10

    def test_throwaway_not_positive(self, capsys):
        code, out, err = run(capsys, "build", "--family", "psic2d", "--dim", "3", "--a", "0.4", "--b", "0.4")
        assert code == 2 and "psic:" in err and out == ""

    def test_missing_dim(self, capsys):
        code, _, _ = run(capsys, "build", "--family", "psic2d")
        assert code == 2

    def test_deterministic_output(self, capsys):
        _, a, _ = run(capsys, "build", "--family", "comp-bases-2dm1", "--dim", "3")
        _, b, _ = run(capsys, "build", "--family", "comp-bases-2dm1", "--dim", "3")
        assert a == b


class TestPipeline:
    def test_probs_of_basis_state(self, capsys, tmp_path):
        state = tmp_path / "zero.json"
        state.write_text(json.dumps({"dim": 2, "amplitudes": [[1, 0], [0, 0]]}))
        code, doc = run_json(capsys, "probs", "--family", "tetrahedral", "--state", str(state))
        assert code == 0
        np.testing.assert_allclose(doc["values"], [0.5, 1 / 6, 1 / 6, 1 / 6], atol=1e-15)

    def test_build_probs_reconstruct(self, capsys, tmp_path):
        povm_file, probs_file = tmp_path / "povm.json", tmp_path / "probs.json"
        assert main(["build", "--family", "rank1-3dm2", "--dim", "3", "-o", str(povm_file)]) == 0
        assert main(["probs", "--povm", str(povm_file), "--seed", "12", "-o", str(probs_file)]) == 0
        code, doc = run_json(
            capsys, "reconstruct", "--family", "rank1-3dm2", "--dim", "3",
            "--probs", str(probs_file), "--truth", str(probs_file),
        )
        assert code == 0
        assert doc["fidelity"] >= 1 - 1e-9
        # the shell pipeline reproduces the library round trip exactly
        params = RankOneConstructionParams(3)
        direct = invert_rank_one_3dm2(probabilities(build_rank_one_3dm2(params), random_pure_state(3, 12)), params)
        assert doc["state"] == state_to_json(direct.state)

    def test_reconstruction_failure_exit_3(self, capsys, tmp_path):
        state, probs_file = tmp_path / "one.json", tmp_path / "probs.json"
        state.write_text(json.dumps({"dim": 2, "amplitudes": [[0, 0], [1, 0]]}))
        main(["probs", "--family", "psic2d", "--dim", "2", "--state", str(state), "-o", str(probs_file)])
        code, doc = run_json(capsys, "reconstruct", "--family", "psic2d", "--dim", "2", "--probs", str(probs_file))
        assert code == 3
        assert doc["failure"] == "ZeroAnchorAmplitude" and doc["state"] is None

    def test_missing_file_exit_1(self, capsys, tmp_path):
        code, _, err = run(capsys, "reconstruct", "--family", "psic2d", "--dim", "2",
                           "--probs", str(tmp_path / "nope.json"))
        assert code == 1 and "cannot read" in err

    def test_schema_error_exit_1(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"dim": 2, "elements": [{"label": "a", "matrix": [[1, 0]]}]}))
        code, _, _ = run(capsys, "check", "--povm", str(bad))
        assert code == 1


class TestAnalysisCommands:
    def test_check_trine(self, capsys):
        code, doc = run_json(capsys, "check", "--family", "trine")
        assert code == 0
        assert doc["frame"]["frame_rank"] == 3 and doc["frame"]["is_ic"] is False

    def test_check_certifies(self, capsys):
        code, doc = run_json(capsys, "check", "--family", "psic2d", "--dim", "3", "--trials", "100")
        assert code == 0 and doc["certification"]["passed"] is True

    def test_ambiguity_trine(self, capsys, tmp_path):
        state = tmp_path / "s.json"
        state.write_text(json.dumps({"dim": 2, "amplitudes": [[0.9**0.5, 0], [0.1**0.5, 0]]}))
        code, doc = run_json(capsys, "ambiguity", "--family", "trine", "--state", str(state))
        assert code == 0 and doc["found"] is True
        assert doc["prob_gap"] <= 1e-8 and doc["infidelity"] >= 1e-3

    def test_ambiguity_not_found(self, capsys):
        code, doc = run_json(capsys, "ambiguity", "--family", "tetrahedral", "--restarts", "5")
        assert code == 0 and doc["found"] is False


class TestTomo:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, "tomo", "--family", "psic2d", "--dim", "3", "--shots", "1000,100", "--seeds", "5")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# schema_version")
        header = [ln for ln in lines if not ln.startswith("#")]
        assert header[0] == "shots,median_infidelity,iqr_low,iqr_high,failures"
        assert [int(r.split(",")[0]) for r in header[1:]] == [100, 1000]

    def test_non_invertible_family(self, capsys):
        code, _, _ = run(capsys, "tomo", "--family", "trine", "--shots", "100")
        assert code == 2

    def test_unparsable_shots(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["tomo", "--family", "psic2d", "--dim", "2", "--shots", "abc"])
        assert exc.value.code == 2

    def test_negative_shots(self, capsys):
        code, _, err = run(capsys, "tomo", "--family", "psic2d", "--dim", "2", "--shots", "10,-5")
        assert code == 2 and "positive" in err
