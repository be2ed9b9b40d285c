from __future__ import annotations

import json
import subprocess
import sys

import pytest

from voak import bundles, cli, zhu
from voak.axioms import AxiomReport
from voak.kernel import GradedElement, mat, mono_from_json
from voak.voa import heisenberg


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture()
def bundle_file(tmp_path, capsys):
    _, data = run_json(capsys, "bundle", "fixture", "--seed", "5")
    path = tmp_path / "E.json"
    path.write_text(json.dumps(data["bundle"]))
    return str(path)


def test_dim(capsys):
    code, data = run_json(capsys, "dim", "--weights", "0:10")
    assert code == 0
    assert [data["dims"][str(w)] for w in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    code, data = run_json(capsys, "dim", "--rank", "2", "--weights", "0:6")
    assert [data["dims"][str(w)] for w in range(7)] == [1, 2, 5, 10, 20, 36, 65]
    _, data = run_json(capsys, "dim", "--weights", "0:0")
    assert data["dims"] == {"0": 1}


def test_dim_table_format(capsys):
    code, out, _ = run(capsys, "dim", "--weights", "0:3", "--format", "table")
    assert code == 0
    assert out.splitlines()[0].split() == ["weight", "dim"]
    assert out.splitlines()[-1].split() == ["3", "3"]


def test_mode_and_lop(capsys):
    _, data = run_json(capsys, "mode", "--u", "[[1,1]]", "--n", "1", "--v", "[[1,1]]")
    assert GradedElement.from_json(data["result"]) == GradedElement.basis(())
    _, data = run_json(capsys, "lop", "--n", "0", "--v", "omega")
    assert GradedElement.from_json(data["result"]) == GradedElement.from_json(data["v"]).scale(2)
    _, data = run_json(capsys, "mode", "--u", "vacuum", "--n", "-1", "--v", "[[1,2],[1,1]]")
    assert GradedElement.from_json(data["result"]) == GradedElement.basis(mono_from_json([[1, 2], [1, 1]]))


def test_axioms_exit_codes(capsys):
    code, data = run_json(capsys, "axioms")
    assert code == 0 and data["pass"]
    for rep in data["reports"]:
        assert AxiomReport.from_json(rep).passed
    code, data = run_json(capsys, "axioms", "--corrupt", "virasoro", "--which", "virasoro")
    assert code == 1 and not data["pass"]
    code, _ = run_json(capsys, "axioms", "--instance", "commutative")
    assert code == 0


def test_zhu_commands(capsys):
    _, data = run_json(capsys, "zhu", "table")
    keys = [tuple(map(tuple, k)) for k in data["coset_basis"]]
    one = keys.index(())
    row = data["rows"][one]
    assert all(row[j] == ["1" if i == j else "0" for i in range(data["dim"])] for j in range(len(keys)))
    _, data = run_json(capsys, "zhu", "phi", "--a", "omega")
    assert data["result"] == data["a"]
    _, data = run_json(capsys, "zhu", "omega-space")
    assert data["dims"]["0"] == 1 and sum(data["dims"].values()) == 1
    _, data = run_json(capsys, "zhu", "product", "--a", "[[1,2]]", "--b", "vacuum")
    c = zhu.ZhuClass.from_json(data["result"])
    Z = zhu.build_zhu(heisenberg(1), 6)
    assert c == Z.reduce(-GradedElement.basis(((1, 1),)))
    _, data = run_json(capsys, "zhu", "o-matrix", "--a", "omega")
    assert data["matrices"] == {"0": [["0"]]}
    _, data = run_json(capsys, "zhu", "stabilization", "--cutoffs", "6,7,8")
    assert data["dims"] == {"6": 4, "7": 4, "8": 4} and data["stabilized"]
    code, data = run_json(capsys, "zhu", "check", "--cutoff", "6")
    assert code == 0 and data["pass"]
    _, data = run_json(capsys, "zhu", "basis", "--cutoff", "0")
    assert data["dim"] == 1


def test_bundle_commands(capsys, bundle_file):
    code, data = run_json(capsys, "bundle", "check", bundle_file)
    assert code == 0 and AxiomReport.from_json(data["report"]).passed
    _, data = run_json(capsys, "bundle", "sum", bundle_file, bundle_file)
    assert bundles.check_cocycle(bundles.BundleCocycle.from_json(data["bundle"])).passed
    code, data = run_json(capsys, "bundle", "dual", bundle_file)
    assert code == 0 and data["pairing"]["pass"]
    _, data = run_json(capsys, "bundle", "omega", bundle_file)
    assert bundles.BundleCocycle.from_json(data["bundle"]).table.labels == ("Omega(M1)", "Omega(M2)")
    code, data = run_json(capsys, "bundle", "split", bundle_file)
    assert code == 0 and data["reassembled_identical"]
    _, data = run_json(capsys, "bundle", "homotopy", "--f", "[[2]]", "--s", "0")
    assert bundles.HomotopyFrame.from_json(data["frame"]).blocks[0] == mat([[2, 0], [0, "1/2"]])
    _, data = run_json(capsys, "bundle", "homotopy", "--f", "[[2]]", "--s", "1")
    assert data["frame"]["F"]["0"] == [["1", "0"], ["0", "1"]]


def test_bundle_check_failure_exit(capsys, tmp_path, bundle_file):
    data = json.loads(open(bundle_file).read())
    data["transitions"]["b|a"] = data["transitions"]["a|b"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out = run_json(capsys, "bundle", "check", str(bad))
    assert code == 1 and not out["pass"]


def test_bundle_complement(capsys, tmp_path):
    cov = bundles.CoverComplex.make(["a", "b"], [("a", "b")],
                                    points={"x": ["a"], "y": {"a": "3/5", "b": "4/5"}, "z": ["b"]})
    E = bundles.BundleCocycle.build(cov, bundles.IrrepTable.of("M"), {"M": 1}, {"a|b": {"M": [[-1]]}})
    blob = E.to_json() | {"forms": {"M": [["1"]]}}
    path = tmp_path / "E.json"
    path.write_text(json.dumps(blob))
    code, data = run_json(capsys, "bundle", "complement", str(path))
    assert code == 0 and data["pass"]
    assert bundles.BundleCocycle.from_json(data["result"]["complement"]).fiber == (1,)


def test_kgroup_commands(capsys):
    _, data = run_json(capsys, "kgroup", "add", "--a", '{"M1": 1}', "--b", '{"M1": -1, "M2": 2}')
    assert bundles.KClass.from_json(data["result"]).positive == {"M2": 2}
    _, data = run_json(capsys, "kgroup", "eq", "--a", '{"M1": 1}', "--b", '{"positive": {"M1": 1}}')
    assert data["equal"]
    _, data = run_json(capsys, "kgroup", "grassmannian", "--n", "2,3", "--k", "1,1")
    assert data["dimension"] == 3
    _, data = run_json(capsys, "kgroup", "grassmannian", "--n", "1", "--k", "2")
    assert data["empty"]


def test_usage_and_input_errors(capsys, tmp_path):
    assert run(capsys, "nosuch")[0] == 2
    assert run(capsys, "dim", "--cutoff", "-1")[0] == 2
    assert run(capsys, "mode", "--u", "not json", "--n", "0", "--v", "vacuum")[0] == 2
    assert run(capsys, "mode", "--u", "[[2,1]]", "--n", "0", "--v", "vacuum")[0] == 2
    assert run(capsys, "bundle", "check", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "zhu", "product", "--a", "[[1,6]]", "--b", "[[1,3]]")[0] == 2
    code, _, err = run(capsys, "kgroup", "add", "--a", '{"X": 1}')
    assert code == 2 and "not in table" in err


ALL_COMMANDS = [
    ["dim", "--weights", "0:8"],
    ["mode", "--u", "omega", "--n", "1", "--v", "[[1,2]]"],
    ["lop", "--n", "-2", "--v", "vacuum"],
    ["axioms", "--which", "vacuum,virasoro"],
    ["zhu", "table", "--cutoff", "4"],
    ["zhu", "check", "--cutoff", "6", "--seed", "11", "--samples", "5"],
    ["bundle", "fixture", "--seed", "3"],
    ["bundle", "homotopy", "--f", '{"M": [[1, 2], [0, 1]]}', "--s", "1/3"],
    ["kgroup", "grassmannian", "--n", "4", "--k", "2"],
]


@pytest.mark.parametrize("argv", ALL_COMMANDS, ids=lambda a: " ".join(a[:2]))
def test_determinism(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    json.loads(first[1])


def test_module_entry_point_is_byte_stable():
    cmd = [sys.executable, "-m", "voak", "bundle", "fixture", "--seed", "9"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.returncode == 0
    bad = subprocess.run([sys.executable, "-m", "voak", "dim", "--format", "xml"], capture_output=True)
    assert bad.returncode == 2
