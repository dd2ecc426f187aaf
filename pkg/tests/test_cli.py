import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from aidct.cli import main
from aidct.io import InputFormatError, read_block_csv, read_pgm, write_pgm
from aidct.transform import dct2d_ai_direct


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def block_csv(tmp_path, rng):
    block = rng.integers(0, 256, size=(8, 8))
    path = tmp_path / "block.csv"
    path.write_text("\n".join(",".join(str(v) for v in row) for row in block) + "\n")
    return path, block


def test_transform_exact(capsys, block_csv):
    path, block = block_csv
    code, out, _ = run(capsys, "transform", "--input", str(path), "--mode", "exact")
    assert code == 0
    payload = json.loads(out)
    assert np.array_equal(np.array(payload["blocks"]), dct2d_ai_direct(block[None]))
    assert payload["components"] == ["1", "z1", "z2", "z1z2"]


def test_transform_paths_agree(capsys, block_csv):
    path, _ = block_csv
    _, direct, _ = run(capsys, "transform", "--input", str(path), "--path", "direct")
    _, decomposed, _ = run(capsys, "transform", "--input", str(path), "--path", "decomposed")
    assert json.loads(direct)["blocks"] == json.loads(decomposed)["blocks"]


def test_transform_decoded_and_frs(capsys, block_csv, tmp_path):
    path, _ = block_csv
    code, out, _ = run(capsys, "--precision", "40", "transform", "--input", str(path), "--mode", "decoded")
    assert code == 0 and json.loads(out)["precision"] == 40
    target = tmp_path / "frs.json"
    code, out, _ = run(
        capsys,
        "transform",
        "--input",
        str(path),
        "--mode",
        "frs",
        "--set",
        "12,5,13",
        "--frac-bits",
        "8",
        "--output",
        str(target),
    )
    payload = json.loads(target.read_text())
    assert code == 0 and payload == json.loads(out)
    assert payload["set"] == "12,5,13" and payload["frac_bits"] == 8


def test_transform_pgm(capsys, tmp_path, rng):
    image = rng.integers(0, 256, size=(16, 24)).astype(np.uint8)
    path = tmp_path / "img.pgm"
    write_pgm(path, image)
    blocks = read_pgm(path)
    assert blocks.shape == (6, 8, 8)
    assert np.array_equal(blocks[1], image[:8, 8:16])
    assert np.array_equal(blocks[3], image[8:, :8])
    code, out, _ = run(capsys, "transform", "--input", str(path))
    assert code == 0 and len(json.loads(out)["blocks"]) == 6


@pytest.mark.parametrize(
    "content",
    ["1,2,3\n", "\n".join(["1,2,3,4,5,6,7,x"] * 8), "\n".join(["1,2,3,4,5,6,7,8"] * 7)],
)
def test_malformed_csv(capsys, tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    code, _, err = run(capsys, "transform", "--input", str(path))
    assert code == 1 and "bad.csv" in err
    with pytest.raises(InputFormatError):
        read_block_csv(path)


def test_malformed_pgm(capsys, tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P5\n10 8\n255\n" + bytes(80))
    code, _, err = run(capsys, "transform", "--input", str(path))
    assert code == 1 and "multiples of 8" in err
    path.write_bytes(b"P2\n8 8\n255\n" + bytes(64))
    assert run(capsys, "transform", "--input", str(path))[0] == 1
    path.write_bytes(b"P5\n8 8\n255\n" + bytes(10))
    assert run(capsys, "transform", "--input", str(path))[0] == 1


def test_missing_input(capsys, tmp_path):
    code, _, err = run(capsys, "transform", "--input", str(tmp_path / "nope.csv"))
    assert code == 1 and "no such file" in err


def test_bad_flags(capsys, block_csv):
    path, _ = block_csv
    with pytest.raises(SystemExit) as info:
        main(["transform", "--input", str(path), "--mode", "fuzzy"])
    assert info.value.code != 0
    with pytest.raises(SystemExit):
        main(["--precision", "5", "audit"])
    with pytest.raises(SystemExit):
        main(["simulate", "--blocks", "0"])
    code, _, err = run(capsys, "transform", "--input", str(path), "--mode", "frs", "--set", "1,2,3")
    assert code == 1 and "unknown expansion set" in err
    code, _, err = run(capsys, "success-rate", "--L", "20", "--trials", "10")
    assert code == 1


def test_success_rate_json_and_csv(capsys, tmp_path):
    table = tmp_path / "table.csv"
    argv = ["success-rate", "--L", "8", "--set", "437,181,473", "--trials", "300", "--seed", "1", "--csv", str(table)]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    report = json.loads(out)
    assert report["set"] == "437,181,473" and report["word_length"] == 8 and report["seed"] == 1
    assert report["total_coefficients"] == 300 * 64
    assert list(report["success_percent"]) == ["10", "5", "1", "0.1", "0.05", "0.01", "0.005"]
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["set", "L", "10%", "5%", "1%", "0.1%", "0.05%", "0.01%", "0.005%"]
    assert rows[1][:2] == ["437,181,473", "8"]
    # deterministic for a fixed seed
    assert run(capsys, *argv)[1] == out


def test_success_rate_multiple(capsys):
    code, out, _ = run(capsys, "success-rate", "--L", "4", "8", "--trials", "100", "--tolerances", "1", "0.1")
    reports = json.loads(out)
    assert code == 0 and len(reports) == 4
    assert {(r["set"], r["word_length"]) for r in reports} == {
        (s, L) for s in ("12,5,13", "437,181,473") for L in (4, 8)
    }


def test_simulate(capsys, tmp_path):
    trace = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "simulate", "--blocks", "12", "--seed", "4", "--trace", str(trace))
    summary = json.loads(out)
    assert code == 0 and summary["matches_batch"]
    assert summary["latency"] == summary["first_output_cycle"] == 14
    assert summary["cycles_per_block"] == 8.0
    assert summary["storage"] == {"fast_words": 24, "slow_words": 32, "mux_count": 32}
    rows = list(csv.DictReader(trace.open()))
    assert list(rows[0]) == ["cycle", "phase", "load", "occupied_words", "emitted_block", "emitted_row"]
    assert len(rows) == summary["cycles"]
    assert all(int(r["phase"]) % 4 == 0 for r in rows if r["load"] == "1")
    assert run(capsys, "simulate", "--blocks", "12", "--seed", "4")[1] == out


def test_simulate_without_frs(capsys):
    code, out, _ = run(capsys, "simulate", "--blocks", "3", "--no-frs", "--gap", "2")
    assert code == 0 and json.loads(out)["frs"] is None


def test_calibrate_reports_failure(capsys):
    code, out, err = run(capsys, "calibrate")
    payload = json.loads(out)
    assert code == 1 and payload["consistent"] is False
    assert payload["resolved"]["0,0"]["frequency"] == [0, 0]
    assert "not a scaled DCT-II" in err


def test_audit(capsys):
    code, out, _ = run(capsys, "audit")
    assert code == 0 and json.loads(out)["forward_a_additions"] == 20


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aidct", "audit"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["mux_count"] == 32
