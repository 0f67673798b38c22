import json

import pytest

from effkan.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


@pytest.fixture
def broken_file(tmp_path, capsys):
    path = tmp_path / "z2.json"
    assert main(["validate", "--generator", "nerve:Z2", "--truncation", "2", "--emit", str(path)]) == 0
    capsys.readouterr()
    doc = json.loads(path.read_text())
    doc["levels"][1]["degeneracies"][0][1] = "(1,1)"
    bad = tmp_path / "broken.json"
    bad.write_text(json.dumps(doc))
    return bad


@pytest.mark.parametrize("gen", ["nerve:Z2", "constant:heyting2", "constant:S3", "nerve-proj:Z2,Z2"])
def test_validate_builtins(capsys, gen):
    code, out, _ = run(capsys, "validate", "--generator", gen, "--truncation", "3")
    assert code == 0 and "valid" in out


def test_validate_broken_file(capsys, broken_file):
    code, out, _ = run(capsys, "validate", str(broken_file))
    assert code == 1
    assert "INVALID" in out and "d" in out


def test_emitted_file_round_trips(capsys, tmp_path):
    path = tmp_path / "h.json"
    assert main(["validate", "--generator", "constant:heyting2", "--truncation", "2", "--emit", str(path)]) == 0
    capsys.readouterr()
    code, out, _ = run(capsys, "lift", "--horn", "2,0", "--facet", "1=1", "--facet", "2=1", f"file:{path}")
    assert code == 0 and out.strip() == "filler: 1"


def test_bad_input_exit_two(capsys, tmp_path):
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run(capsys, "validate", str(junk))[0] == 2
    assert run(capsys, "validate", "--generator", "nerve:S3")[0] == 2
    assert run(capsys, "validate")[0] == 2
    assert run(capsys, "check", "kan", "--generator", "nerve:Z2", "--maxdim", "5")[0] == 2
    assert run(capsys, "check", "symmetric", "--generator", "nerve:Z2", "--truncation", "3", "--maxdim", "3")[0] == 2


def test_lift_example(capsys):
    code, out, _ = run(capsys, "lift", "--generator", "nerve:Z2", "--horn", "2,1",
                       "--facet", "0=(1)", "--facet", "2=(1)", "--trace")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "filler: (1,1)"
    assert lines[1].startswith("  w_-1 = ")


def test_lift_json_trace(capsys):
    code, doc = run_json(capsys, "lift", "--generator", "constant:S3", "--horn", "3,2", "--facet", "0=102",
                         "--facet", "1=102", "--facet", "3=102", "--trace")
    assert code == 0 and doc["filler"] == "102" and doc["solves"]
    assert doc["trace"][0]["k"] == -1


def test_lift_non_commuting_exit_one(capsys):
    code, _, err = run(capsys, "lift", "--generator", "nerve-proj:Z2,Z2", "--truncation", "3", "--horn", "2,1",
                       "--facet", "0=(0:1)", "--facet", "2=(1:0)", "--y", "(0,0)")
    assert code == 1 and "commute" in err


def test_lift_usage_errors(capsys):
    assert run(capsys, "lift", "--generator", "nerve:Z2", "--horn", "2,1", "--facet", "0=(1)")[0] == 2
    assert run(capsys, "lift", "--generator", "nerve:Z2", "--horn", "2,3", "--facet", "0=(1)")[0] == 2
    assert run(capsys, "lift", "--generator", "nerve:Z2", "--horn", "1,0", "--facet", "1=zz")[0] == 2


@pytest.mark.parametrize("prop,count", [("kan", 46), ("dp", 46), ("symmetric", 214), ("effective", 310),
                                        ("dsquares", 93), ("facesquares", 212)])
def test_check_counts_match_enumeration(capsys, prop, count):
    code, doc = run_json(capsys, "check", prop, "--generator", "nerve:Z2", "--maxdim", "3")
    assert code == 0 and doc["ok"]
    assert doc["instances"] == doc["expected_instances"] == count


def test_check_dp_lift_option(capsys):
    code, doc = run_json(capsys, "check", "effective", "--generator", "constant:heyting2",
                         "--maxdim", "2", "--lift", "dp")
    assert code == 0 and doc["instances"] == doc["expected_instances"]


def test_check_output_is_byte_stable(capsys):
    argv = ("check", "symmetric", "--generator", "nerve:Z3", "--maxdim", "2", "--format", "json")
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv, "--jobs", "3")[1] == first


def test_cap_refusal_and_seeded_sampling(capsys):
    code, _, err = run(capsys, "check", "kan", "--generator", "nerve:Z2", "--cap", "10")
    assert code == 2 and "refusing" in err
    a = run_json(capsys, "check", "kan", "--generator", "nerve:Z2", "--cap", "10", "--seed", "7")
    b = run_json(capsys, "check", "kan", "--generator", "nerve:Z2", "--cap", "10", "--seed", "7")
    assert a == b and a[1]["sampled"] and a[1]["sample_size"] == 10


def test_report(capsys):
    code, doc = run_json(capsys, "report", "--generator", "nerve-proj:Z2,Z2", "--truncation", "3",
                         "--maxdim", "2")
    assert code == 0 and doc["ok"]
    assert "skipped" not in doc["results"]["kan"]


def test_decompose_square_document(capsys, tmp_path):
    from effkan.awfs import HornPushoutSequence, Generator, Step, squares_over
    from effkan.delta import MonotoneMap, identity
    from effkan.sieve import HornSpec, generated, mask_of
    target = HornPushoutSequence(generated(1, [mask_of([0])]), [Step(Generator(HornSpec(1, 0)), identity(1))])
    [sq] = squares_over(MonotoneMap(1, 1, (0, 0)), target)
    path = tmp_path / "sq.json"
    path.write_text(json.dumps(sq.to_json()))
    code, doc = run_json(capsys, "awfs-decompose", str(path))
    assert code == 0 and doc["status"] == "found" and len(doc["squares"]) == 2
    path.write_text(json.dumps({"f": 3}))
    assert run(capsys, "awfs-decompose", str(path))[0] == 2
    assert run(capsys, "awfs-decompose")[0] == 2


def test_decompose_probe(capsys):
    code, doc = run_json(capsys, "awfs-decompose", "--probe", "--maxdim", "2")
    assert code == 0 and (doc["decomposed"], doc["not_found"]) == (566, 36)
