import json
import subprocess
import sys
from pathlib import Path

import pytest

from typeramsey import io, structures
from typeramsey.cli import main, run_command
from typeramsey.fixtures import complete_graph
from typeramsey.weaktypes import PlusEmbedding

DATA = Path(__file__).resolve().parent.parent / "data"


def d(name):
    return str(DATA / name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_struct_validate_prints_canonical_document(capsys):
    code, out, _ = run(capsys, "struct", "validate", d("k3.json"))
    assert code == 0
    assert out == (DATA / "k3.json").read_text()


def test_embedding_list(capsys):
    code, out, _ = run(capsys, "emb", "list", d("k1.json"), d("p3.json"))
    assert code == 0 and out.splitlines() == ["3 embeddings", "[0]", "[1]", "[2]"]


def test_types_tree(capsys):
    code, out, _ = run(capsys, "types", "tree", d("p3.json"))
    assert code == 0
    assert out.splitlines() == ["level 0: [0, 1, 2]", "level 1: [1]", "level 1: [2]", "level 2: [2]"]


def test_weak_type_of_tuple(capsys):
    code, out, _ = run(capsys, "--json", "weaktypes", "of-tuple", d("p3.json"), "--level", "1", "--tuple", "1,2")
    assert code == 0
    mixed = json.loads(out)["result"]["mixed"]
    assert mixed == {"E": [["0", "t0"], ["t0", "0"]]}


def test_plus_vertex_count(capsys):
    code, out, _ = run(capsys, "--json", "plus", d("k1.json"))
    assert code == 0 and json.loads(out)["result"]["vertex_count"] == 5


def test_counterexample_exit_codes(capsys):
    code, out, _ = run(capsys, "amalg", "counterexample")
    assert code == 1 and out.startswith("FAILS")
    code, _, err = run(capsys, "amalg", "counterexample", "--literal")
    assert code == 64 and "f' is K-type-respecting" in err


def test_instance_file_check(capsys):
    code, out, _ = run(capsys, "amalg", "check", d("counterexample_instance.json"), "--json")
    assert code == 1 and json.loads(out)["verdict"] == "FAILS"


def test_family_check_from_map_document(tmp_path, capsys):
    h = PlusEmbedding(complete_graph(1), complete_graph(2), (0,))
    full = frozenset(h.extra_universe(1))
    h = h.with_overrides({(1, N): full for N in [frozenset(), frozenset({("E", (0, -1))}),
                                                 frozenset({("E", (-1, 0))}),
                                                 frozenset({("E", (0, -1)), ("E", (-1, 0))})]})
    path = tmp_path / "map.json"
    path.write_text(io.dumps(io.plus_map_doc(h)))
    code, out, _ = run(capsys, "respect", "family-check", str(path), "--forbid", d("k3.json"), "--depth", "2")
    assert code == 1 and out.startswith("FAILS")
    code, out, _ = run(capsys, "respect", "family-check", str(path), "--family", d("triangle_free.json"))
    assert code == 1
    code, _, err = run(capsys, "respect", "family-check", str(path))
    assert code == 64 and "--forbid" in err


def test_arrows(capsys):
    code, out, _ = run(capsys, "arrows", "C=" + d("k6.json"), "B=" + d("k3.json"), "A=" + d("k2.json"),
                       "-k", "2", "-l", "1")
    assert code == 0
    code, out, _ = run(capsys, "--json", "arrows", "C=" + d("k5.json"), "B=" + d("k3.json"), "A=" + d("k2.json"),
                       "-k", "2", "-l", "1")
    assert code == 1
    assert json.loads(out)["result"]["witness_coloring"]["assignment"] == [0, 0, 1, 1, 1, 0, 1, 1, 0, 0]
    code, out, _ = run(capsys, "arrows", "C=" + d("k6.json"), "B=" + d("k3.json"), "A=" + d("k2.json"),
                       "-k", "2", "-l", "1", "--budget", "10")
    assert code == 2 and out.startswith("refused")


def test_degree(capsys):
    code, out, _ = run(capsys, "degree", d("k3.json"), d("k1.json"), "-k", "3")
    assert code == 0 and out.strip() == "3"


def test_dot_export(tmp_path, capsys):
    target = tmp_path / "plus.dot"
    code, _, _ = run(capsys, "export", "dot", "plus", d("k1.json"), "-o", str(target))
    assert code == 0 and target.read_text().startswith("digraph")


@pytest.mark.parametrize("argv", [
    ["struct", "validate", "/nonexistent.json"],
    ["struct", "validate"],
    ["arrows", "C=x", "-k", "2"],
    ["bogus"],
    ["degree", d("k3.json"), d("k1.json"), "-k", "notanumber"],
])
def test_input_errors_exit_64(argv):
    assert run_command(argv)[0] == 64


def test_bad_document_names_the_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"language": [{"name": "E", "arity": 2}], "size": 2, "relations": {"E": [[0, 5]]}}')
    code, _, err = run(capsys, "struct", "validate", str(bad))
    assert code == 64 and "relations.E[0]" in err


def test_common_flags_anywhere():
    a = run_command(["--json", "degree", d("k3.json"), d("k1.json"), "-k", "3"])
    b = run_command(["degree", d("k3.json"), d("k1.json"), "-k", "3", "--json"])
    assert a[1]["config"]["json"] and b[1]["config"]["json"]


def test_irreducibility_switch_does_not_leak():
    run_command(["--irreducible-distinct-only", "emb", "list", d("k1.json"), d("k2.json")])
    assert structures.IRREDUCIBLE_DISTINCT_ONLY is False


def strip_timing(report):
    report = dict(report)
    report.pop("timing", None)
    return report


def test_json_reports_are_deterministic():
    for argv in (["amalg", "counterexample", "--json"],
                 ["arrows", "C=" + d("k5.json"), "B=" + d("k3.json"), "A=" + d("k2.json"), "-k", "2", "-l", "1"]):
        first = run_command(argv)
        second = run_command(argv)
        assert first[0] == second[0]
        assert io.dumps(strip_timing(first[1])) == io.dumps(strip_timing(second[1]))


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "typeramsey", "degree", d("k3.json"), d("k1.json"), "-k", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "3"
