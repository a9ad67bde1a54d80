import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from strongsim import haar_random_unitary, slos_full
from strongsim.cli import main
from strongsim.unitary import beamsplitter, save_unitary


@pytest.fixture
def unitary_file(tmp_path):
    def make(U, name="u.json"):
        path = tmp_path / name
        save_unitary(path, U)
        return str(path)

    return make


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_full_jsonl(capsys, unitary_file):
    U = haar_random_unitary(4, 3)
    code, out, _ = run(capsys, "full", "--unitary", unitary_file(U), "--input", "1,0,1,0")
    assert code == 0
    rows = records(out)
    dist = slos_full((1, 0, 1, 0), U)
    assert len(rows) == len(dist)
    for row, (state, amp, prob) in zip(rows, dist):
        assert tuple(row["state"]) == state
        assert complex(row["re"], row["im"]) == amp
        assert row["prob"] == pytest.approx(prob)


def test_full_csv_and_min_prob(capsys, unitary_file):
    code, out, _ = run(
        capsys, "full", "--unitary", unitary_file(beamsplitter()), "--input", "1,1",
        "--format", "csv", "--min-prob", "0.1",
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert sorted(r["state"] for r in rows) == ["0,2", "2,0"]


def test_gen_outputs_and_mask(capsys, unitary_file):
    path = unitary_file(haar_random_unitary(4, 1))
    code, out, _ = run(
        capsys, "gen", "--unitary", path, "--input", "1,1,0,0", "--input", "0,1,1,0",
        "--output", "0,0,1,1", "--output", "1,0,0,1",
    )
    assert code == 0
    assert len(records(out)) == 4
    code, out, _ = run(capsys, "gen", "--unitary", path, "--input", "1,1,0,0", "--mask", "1,1,*,0")
    assert code == 0
    assert {tuple(r["state"]) for r in records(out)} == {
        (1, 1, 0, 0), (1, 0, 1, 0), (0, 1, 1, 0), (0, 0, 2, 0)
    }
    code, _, err = run(capsys, "gen", "--unitary", path, "--input", "1,1,0,0")
    assert code == 2 and "--output" in err


def test_sample_and_histogram(capsys, unitary_file):
    path = unitary_file(beamsplitter())
    code, out, _ = run(capsys, "sample", "--unitary", path, "--input", "1,1", "--count", "500", "--seed", "4")
    assert code == 0
    rows = records(out)
    assert len(rows) == 500 and all(r["state"] != [1, 1] for r in rows)
    code, out, _ = run(
        capsys, "sample", "--unitary", path, "--input", "1,1", "--count", "500", "--seed", "4", "--histogram"
    )
    assert sum(r["count"] for r in records(out)) == 500


def test_threshold(capsys, unitary_file):
    code, out, err = run(
        capsys, "threshold", "--unitary", unitary_file(haar_random_unitary(5, 2)),
        "--input", "1,1,1,0,0", "--eta", "0.5",
    )
    assert code == 0
    assert sum(r["prob"] for r in records(out)) > 0.5
    assert "cumulative probability" in err


def test_precompute_then_full_is_bitwise_equal(capsys, tmp_path, unitary_file):
    U = haar_random_unitary(5, 8)
    path = unitary_file(U)
    code, out, _ = run(capsys, "precompute", "--m", "5", "--n", "3", "--precompute-dir", str(tmp_path))
    assert code == 0
    assert len(out.split()) == 7  # bases for layers 0..3, index maps for 1..3
    _, fresh, _ = run(capsys, "full", "--unitary", path, "--input", "0,1,1,0,1")
    code, stored, _ = run(
        capsys, "full", "--unitary", path, "--input", "0,1,1,0,1",
        "--use-precomputed", "--precompute-dir", str(tmp_path),
    )
    assert code == 0
    assert stored == fresh


def test_missing_precomputed_files(capsys, tmp_path, unitary_file):
    code, _, err = run(
        capsys, "full", "--unitary", unitary_file(np.eye(3)), "--input", "1,0,0",
        "--use-precomputed", "--precompute-dir", str(tmp_path / "nowhere"),
    )
    assert code == 2 and err.startswith("error:")


def test_exit_codes(capsys, tmp_path, unitary_file):
    bad = unitary_file(np.array([[1.0, 0.5], [0.0, 1.0]]), "bad.json")
    assert run(capsys, "full", "--unitary", bad, "--input", "1,0")[0] == 3
    assert run(capsys, "full", "--unitary", bad, "--input", "1,0", "--no-unitarity-check")[0] == 0
    good = unitary_file(np.eye(2))
    assert run(capsys, "full", "--unitary", good, "--input", "1,0,0")[0] == 2
    assert run(capsys, "full", "--unitary", good, "--input", "x,y")[0] == 2
    assert run(capsys, "full", "--unitary", str(tmp_path / "missing.json"), "--input", "1,0")[0] == 2
    (tmp_path / "garbage.json").write_text("{not json")
    assert run(capsys, "full", "--unitary", str(tmp_path / "garbage.json"), "--input", "1,0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["full", "--input", "1,0"])
    assert exc.value.code == 2


def test_bench_counts(capsys):
    code, out, _ = run(capsys, "bench", "--n-min", "9", "--n-max", "10", "--repeats", "1")
    assert code == 0
    rows = records(out)
    assert [r["slos_mults"] for r in rows] == [9 * 2**8, 10 * 2**9]
    assert all(r["glynn_mults"] == r["formula_mults"] for r in rows)
    assert all(r["max_abs_diff"] < 1e-9 for r in rows)


def test_estimate_command(capsys):
    code, out, _ = run(capsys, "estimate", "--m", "12", "--n", "12")
    assert code == 0
    assert json.loads(out)["state_count"] == 1_352_078


def test_unitary_command_and_module_entry(tmp_path):
    target = tmp_path / "h.json"
    assert main(["unitary", "--m", "3", "--seed", "5", "--out", str(target)]) == 0
    proc = subprocess.run(
        [sys.executable, "-m", "strongsim", "full", "--unitary", str(target), "--input", "1,1,0"],
        capture_output=True, text=True, check=True,
    )
    assert len(proc.stdout.splitlines()) == 6
