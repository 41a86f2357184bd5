"""The command-line surface: exit codes, output formats, file loading."""

import json
import os

import pytest

from abspres.cli import main
from abspres.kripke import load_model
from abspres.errors import ValidationError

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fx(name):
    return os.path.join(FIXTURES, name)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestLoading:
    def test_load_fixture_models(self):
        for name in ("tl", "k5", "kf2", "k3"):
            model = load_model(fx(f"{name}.json"))
            assert model.is_total()

    def test_dangling_target_names_the_state(self):
        with pytest.raises(ValidationError, match="'zz'"):
            load_model(fx("bad_target.json"))

    def test_non_total_model_rejected(self):
        with pytest.raises(ValidationError, match="'2'"):
            load_model(fx("stuck.json"))

    def test_cli_maps_load_errors_to_exit_2(self, capsys):
        code, _, err = run(capsys, "eval", "--model", fx("bad_target.json"), "--formula", "p")
        assert code == 2
        assert "zz" in err
        code, _, _ = run(capsys, "eval", "--model", fx("missing.json"), "--formula", "p")
        assert code == 2


class TestEval:
    def test_bounded_reach(self, capsys):
        code, out, _ = run(
            capsys, "eval", "--model", fx("k5.json"), "--formula", "EF[0,2] q"
        )
        assert code == 0
        assert out.strip() == "{3,4,5}"

    def test_json_format_matches_text(self, capsys):
        code, out, _ = run(
            capsys,
            "--format",
            "json",
            "eval",
            "--model",
            fx("k5.json"),
            "--formula",
            "EF[0,2] q",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc == {"command": "eval", "result": ["3", "4", "5"]}

    def test_syntax_error_is_usage_error(self, capsys):
        code, _, err = run(
            capsys, "eval", "--model", fx("k5.json"), "--formula", "EF[0,2"
        )
        assert code == 2 and "position" in err

    def test_builtin_model_names(self, capsys):
        code, out, _ = run(
            capsys, "eval", "--model", "traffic_light", "--lang", "semaforo",
            "--formula", "AXX(go)",
        )
        assert code == 0 and out.strip() == "{R,RY}"


class TestSpCommands:
    def test_sp_partition(self, capsys):
        code, out, _ = run(
            capsys, "sp-partition", "--model", fx("k5.json"), "--lang", "exef"
        )
        assert code == 0
        assert out.split() == ["{5}", "{3,4}", "{1,2}"]

    def test_sp_domain(self, capsys):
        code, out, _ = run(
            capsys,
            "--format",
            "json",
            "sp-domain",
            "--model",
            fx("k5.json"),
            "--lang",
            "exef",
        )
        assert code == 0
        doc = json.loads(out)
        got = {tuple(s) for s in doc["result"]}
        assert got == {
            (),
            ("5",),
            ("3", "4"),
            ("3", "4", "5"),
            ("1", "2", "3", "4"),
            ("1", "2", "3", "4", "5"),
        }

    def test_abs_eval_on_computed_domain(self, capsys):
        # the s.p. domain of the language evaluates formulas exactly
        code, out, _ = run(
            capsys,
            "abs-eval",
            "--model",
            fx("k5.json"),
            "--lang",
            "exef",
            "--formula",
            "p & EF[0,2] q",
            "--domain",
            "computed",
        )
        assert code == 0 and out.strip() == "{3,4}"

    def test_abs_eval_on_family_file(self, capsys):
        code, out, _ = run(
            capsys,
            "abs-eval",
            "--model",
            fx("kf2.json"),
            "--formula",
            "EX r",
            "--domain",
            fx("seven_family.json"),
        )
        assert code == 0 and out.strip() == "{1,2,3,4,5}"

    def test_shell_command_with_trace(self, capsys):
        code, out, _ = run(
            capsys,
            "--format",
            "json",
            "shell",
            "--model",
            fx("k5.json"),
            "--lang",
            "exef",
            "--seed",
            "labels",
            "--trace",
        )
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"command", "result", "trace"}
        assert len(doc["trace"]) >= 2
        assert doc["trace"][-1] == doc["trace"][-2]
        assert ["3", "4", "5"] in doc["result"]


class TestChecks:
    def test_partitioning_property(self, capsys):
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("kf2.json"),
            "--property",
            "partitioning",
            "--domain",
            fx("seven_family.json"),
        )
        assert code == 1 and out.strip().startswith("false")
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("k5.json"),
            "--property",
            "partitioning",
            "--domain",
            "adp:1,2/3/4/5",
        )
        assert code == 0 and out.strip() == "true"

    def test_bisim_property(self, capsys):
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("k5.json"),
            "--property",
            "bisim",
            "--partition",
            "1,2/3/4/5",
        )
        assert code == 0 and out.strip() == "true"
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("k5.json"),
            "--property",
            "bisim",
            "--partition",
            "labels",
        )
        assert code == 1 and out.strip() == "false"

    def test_dbs_property(self, capsys):
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("k5.json"),
            "--property",
            "dbs",
            "--partition",
            "labels",
        )
        assert code == 0 and out.strip() == "true"
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("k5.json"),
            "--property",
            "dbs",
            "--partition",
            "1,2,3,4,5",
        )
        assert code == 1 and out.strip() == "false"

    def test_disjunctive_property(self, capsys):
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("kf2.json"),
            "--property",
            "disjunctive",
            "--domain",
            fx("seven_family.json"),
        )
        assert code == 1 and out.strip() == "false"

    def test_sp_property(self, capsys):
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("k5.json"),
            "--lang",
            "exef",
            "--property",
            "sp",
            "--domain",
            "computed",
        )
        assert code == 0
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("k5.json"),
            "--lang",
            "exef",
            "--property",
            "sp",
            "--domain",
            "adp:labels",
        )
        assert code == 1

    def test_fwd_complete_property_with_witness(self, capsys):
        code, out, _ = run(
            capsys,
            "--format",
            "json",
            "check",
            "--model",
            fx("k3.json"),
            "--property",
            "fwd-complete",
            "--domain",
            "adp:1,2/3",
            "--ops",
            "pre",
        )
        assert code == 1
        doc = json.loads(out)
        assert doc["result"] is False
        assert doc["witness"]["operator"] == "pre"
        assert doc["witness"]["args"] == [["3"]]

    def test_sim_property(self, capsys):
        code, out, _ = run(
            capsys,
            "check",
            "--model",
            fx("k5.json"),
            "--property",
            "sim",
            "--relation",
            "1,1;2,2;3,3;4,4;5,5;1,2",
        )
        assert code == 0 and out.strip() == "true"


class TestSearchAndQuotient:
    def test_search_reports_emptiness(self, capsys):
        code, out, _ = run(
            capsys,
            "search-abstract-kripke",
            "--model",
            fx("tl.json"),
            "--lang",
            "semaforo",
            "--partition",
            "computed",
        )
        assert code == 1
        assert "no strongly preserving abstract relation exists" in out

    def test_search_finds_unique_relation(self, capsys):
        code, out, _ = run(
            capsys,
            "--format",
            "json",
            "search-abstract-kripke",
            "--model",
            fx("k5.json"),
            "--lang",
            "L1",
            "--partition",
            "1,2/3/4/5",
        )
        assert code == 0
        doc = json.loads(out)
        assert len(doc["result"]["relations"]) == 1
        assert len(doc["result"]["blocks"]) == 4

    def test_quotient(self, capsys):
        code, out, _ = run(
            capsys,
            "--format",
            "json",
            "quotient",
            "--model",
            fx("k5.json"),
            "--kind",
            "ee",
            "--partition",
            "1,2/3/4/5",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["total"] is True
        assert sorted(map(tuple, doc["result"]["model"]["transitions"])) == sorted(
            [
                ("[1,2]", "[1,2]"),
                ("[1,2]", "[3]"),
                ("[3]", "[4]"),
                ("[4]", "[5]"),
                ("[5]", "[4]"),
            ]
        )

    def test_quotient_ae_flags_non_total(self, capsys):
        code, out, _ = run(
            capsys,
            "--format",
            "json",
            "quotient",
            "--model",
            fx("k5.json"),
            "--kind",
            "ae",
            "--partition",
            "labels",
        )
        assert code == 0
        assert json.loads(out)["result"]["total"] is False


class TestEquivAndVerify:
    def test_equiv_bisim(self, capsys):
        code, out, _ = run(
            capsys, "--format", "json", "equiv", "--model", fx("k5.json"),
            "--kind", "bisim",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["consistent"] is True
        assert sorted(map(tuple, doc["result"]["partition"])) == [
            ("1", "2"),
            ("3",),
            ("4",),
            ("5",),
        ]

    def test_custom_language_file(self, capsys):
        code, out, _ = run(
            capsys,
            "sp-partition",
            "--model",
            fx("tl.json"),
            "--lang",
            fx("axx_lang.json"),
        )
        assert code == 0
        assert out.split() == ["{G,Y}", "{R,RY}"]

    def test_verify_paper_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "paper")
        assert code == 0
        assert "FAIL" not in out
        lines = [l for l in out.splitlines() if l.startswith("PASS")]
        assert len(lines) >= 40
        # deterministic and idempotent
        code2, out2, _ = run(capsys, "verify", "--suite", "paper")
        assert (code2, out2) == (code, out)

    def test_verify_unknown_suite(self, capsys):
        code, _, err = run(capsys, "verify", "--suite", "nightly")
        assert code == 2

    def test_usage_error_on_missing_args(self, capsys):
        code, _, _ = run(capsys, "eval", "--model", fx("k5.json"))
        assert code == 2

    def test_check_reports_missing_inputs(self, capsys):
        code, _, err = run(
            capsys, "check", "--model", fx("k5.json"), "--property", "bisim"
        )
        assert code == 2 and "--partition" in err
        code, _, err = run(
            capsys, "check", "--model", fx("k5.json"), "--property", "partitioning"
        )
        assert code == 2 and "--domain" in err
