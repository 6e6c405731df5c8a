import json

import pytest

from fsl.cli import main
from fsl.hn import HNType
from fsl.numerics import BundleNumerics
from fsl.symplectic import AdmissiblePair, ObstructionSet, SymplecticSpace, check_pair


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_slopes_push(capsys):
    code, out = run(capsys, "slopes", "push", "--g", "2", "--p", "2", "--rank", "1", "--degree", "0")
    assert code == 0
    assert out.strip() == '{"rank":2,"degree":1,"slope":"1/2"}'
    assert BundleNumerics.from_json(json.loads(out)) == BundleNumerics(2, 1)


def test_slopes_reduce(capsys):
    code, obj = run_json(capsys, "slopes", "reduce", "--g", "2", "--p", "3", "--rank", "2", "--degree", "5")
    assert code == 0
    assert obj["covering_degree"] == 6 and obj["twist_degree"] == -3
    assert obj["pushed"]["slope"] == "6"


def test_slopes_bounds(capsys):
    _, obj = run_json(capsys, "slopes", "bounds", "--g", "2", "--p", "3", "--rank", "1", "--degree", "1")
    assert obj["width"] == "4"


@pytest.mark.parametrize("argv", [
    ["slopes", "push", "--g", "1", "--p", "2", "--rank", "1", "--degree", "0"],
    ["slopes", "pull", "--g", "2", "--p", "6", "--rank", "1", "--degree", "0"],
    ["slopes", "push", "--g", "2", "--p", "2", "--rank", "0", "--degree", "0"],
])
def test_slopes_invariant_violation(capsys, argv):
    code, obj = run_json(capsys, *argv)
    assert code == 2
    assert obj["error"]["type"] == "InvariantViolation"


def test_slopes_misc(capsys):
    _, obj = run_json(capsys, "slopes", "etale", "--g", "2", "--p", "2", "--rank", "1", "--degree", "1", "--n", "4")
    assert obj["degree"] == 4 and obj["covered_genus"] == 5
    _, obj = run_json(capsys, "slopes", "twist", "--g", "2", "--p", "2", "--rank", "3", "--degree", "2", "--line-degree", "2")
    assert obj["degree"] == 8
    _, obj = run_json(capsys, "slopes", "rank-bound", "--g", "3", "--p", "2", "--rank", "4")
    assert obj["bound"] == 9


def test_hn_enumerate(capsys):
    code, obj = run_json(capsys, "hn", "enumerate", "--g", "2", "--p", "2", "--d", "0")
    assert code == 0
    assert [HNType.from_json(t) for t in obj["survivors"]] == [HNType.of([(1, 3), (1, 1)])]
    assert obj["examined"] >= 1


def test_hn_canonical(capsys):
    _, obj = run_json(capsys, "hn", "canonical", "--g", "2", "--p", "3", "--rank", "1", "--degree", "0")
    assert obj == {"parts": [[1, 4], [1, 2], [1, 0]]}
    assert HNType.from_json(obj).parts == ((1, 4), (1, 2), (1, 0))


def test_hn_nu_and_errors(capsys):
    code, out = run(capsys, "hn", "nu", "--parts", "[[1,3],[1,1]]")
    assert code == 0 and json.loads(out) == "2"
    code, obj = run_json(capsys, "hn", "nu", "--parts", "[[1,1],[1,3]]")
    assert code == 2
    code, _ = run_json(capsys, "hn", "nu", "--parts", "[[1,1],")
    assert code == 2


def test_hn_trace_and_search(capsys):
    _, obj = run_json(capsys, "hn", "trace", "--g", "2", "--p", "3", "--parts", "[[1,5],[1,4],[1,1]]", "--mu-e", "2")
    assert obj["forward"]["k"] == 2 and obj["forward"]["prefix_slope"] == "9/2"
    assert obj["dual"]["destabilizes"] is True
    _, obj = run_json(capsys, "hn", "search", "--g", "2", "--p", "2", "--r", "2", "--d", "0")
    assert {"parts": [[2, 6], [2, 2]]} in obj["survivors"]
    _, obj = run_json(capsys, "hn", "delta", "--g", "2", "--p", "3", "--parts", "[[1,5],[2,4]]")
    assert obj == ["-1"]


def test_symp_count_and_threshold(capsys):
    _, obj = run_json(capsys, "symp", "count-planes", "--l", "2", "--g", "2")
    assert obj["planes"] == 15 == obj["closed_form"]
    _, obj = run_json(capsys, "symp", "threshold", "--g", "2", "--p", "2", "--l", "3")
    assert obj == {"lhs": 18, "rhs": 20, "contradiction": True}


def test_symp_through(capsys):
    _, obj = run_json(capsys, "symp", "through", "--l", "3", "--g", "2", "--x", "[1,0,2,0]")
    assert obj["planes"] == 4
    _, obj = run_json(capsys, "symp", "through", "--l", "2", "--g", "2")
    assert obj["distinct_counts"] == [3] and obj["closed_form"] == 3


def test_symp_pair_find_empty(capsys, tmp_path):
    sp = SymplecticSpace(3, 2)
    path = tmp_path / "empty.json"
    path.write_text(json.dumps(ObstructionSet.empty(sp).to_json()))
    code, obj = run_json(capsys, "symp", "pair-find", "--l", "3", "--g", "2", "--sigma", str(path))
    assert code == 0
    pair = AdmissiblePair.from_json(sp, obj)
    assert check_pair(sp, ObstructionSet.empty(sp), pair.alpha, pair.beta).ok
    code, obj = run_json(capsys, "symp", "check-pair", "--l", "3", "--g", "2", "--sigma", str(path),
                         "--alpha", json.dumps(obj["alpha"]), "--beta", json.dumps(obj["beta"]))
    assert obj["ok"] is True


def test_symp_sigma_loader_rejects_zero(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"l": 3, "g": 2, "points": [[0, 0, 0, 0]]}))
    code, obj = run_json(capsys, "symp", "pair-find", "--l", "3", "--g", "2", "--sigma", str(path))
    assert code == 2


def test_symp_incidence(capsys):
    _, obj = run_json(capsys, "symp", "incidence", "--l", "3", "--g", "2", "--random-size", "20", "--seed", "4")
    assert obj["plane_major"] == obj["point_major"] and obj["sigma_size"] == 20


def test_symp_budget_exit(capsys, monkeypatch):
    code, obj = run_json(capsys, "symp", "count-planes", "--l", "3", "--g", "2", "--budget", "5")
    assert code == 3
    monkeypatch.setenv("FSL_BUDGET", "5")
    code, _ = run_json(capsys, "symp", "incidence", "--l", "3", "--g", "2")
    assert code == 3


def test_symp_pair_failure_exit(capsys):
    code, obj = run_json(capsys, "symp", "pair-find", "--l", "2", "--g", "2", "--random-size", "14")
    assert code == 4
    assert "incidences" in obj["error"]["diagnostics"]


def test_campaign_csv(capsys, tmp_path):
    out = tmp_path / "c.csv"
    code, _ = run(capsys, "symp", "campaign", "--g", "2", "--p", "2", "--l", "3", "--trials", "4",
                  "--format", "csv", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "trial,success,method,alpha,beta"
    assert len(lines) == 5 and all(line.split(",")[1] == "1" for line in lines[1:])


def test_campaign_out_of_regime_reported(capsys):
    code, obj = run_json(capsys, "symp", "campaign", "--g", "2", "--p", "3", "--l", "3", "--trials", "5")
    assert code == 0
    assert obj["in_regime"] is False and obj["size"] == 36
