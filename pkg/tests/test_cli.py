import json
import subprocess
import sys

import pytest

from pedigrad.cli import main
from pedigrad.io import data_path

Z3 = ["--diploid", "ACCACTAGCTTCGTATGC/ACCACTAGGTTCATATTC",
      "--diploid", "AGCATTAGCTACCTATTC / AACATTAGGTTCTTATAC"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_bundled_files(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == 0
    assert "18 genotypes" in out and "recombination scheme yes" in out


@pytest.mark.parametrize(
    "cone, left, right, expected",
    [
        ("rho", "b,c", "p4,p6", 0),
        ("rho", "a,b,c", "p4,p5,p6", 1),
        ("rho_prime", "b,c", "p4,p5,p6", 0),
    ],
)
def test_equal(capsys, cone, left, right, expected):
    code, out, _ = run(capsys, "equal", "--cone", cone, left, right)
    assert code == expected
    assert out.strip() == ("true" if expected == 0 else "false")


def test_haplotype_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "haplotype", "--cone", "rho_prime", "--sum", "a")
    assert code == 0
    assert json.loads(out)["haplotype"] == [["ACCACT", "ACCATT"], ["AGC"], ["TACATATGC", "TACCTATAC"]]


def test_localize(capsys):
    code, out, _ = run(capsys, "localize", "--max-black", "3")
    assert code == 0
    rows = [line.split("\t")[0] for line in out.splitlines()]
    assert "2,5,13" in rows and "2,5" not in rows


def test_separate(capsys):
    code, out, _ = run(capsys, "separate", "--target", "(1:0)(1:1)(2:0)(1:1)(13:0)")
    assert code == 1 and "conflict c p5" in out
    code, _, _ = run(capsys, "separate", "--target", "(1:0)(1:1)(2:0)(1:1)(7:0)(1:1)(5:0)")
    assert code == 0


def test_predict_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "predict", "--cone", "rho", *Z3)
    assert code == 0
    data = json.loads(out)
    assert data["step2"]["pass"]
    sums = {tuple(m["sum"]) for m in data["fiber"]}
    assert ("p4", "p5", "p6") in sums and ("b", "c", "p5") in sums


def test_fibers_text(capsys):
    code, out, _ = run(capsys, "fibers", "--cone", "rho", "--sum", "b,c")
    assert code == 0
    assert "components 2" in out and "  b+c" in out and "  p4+p6" in out


@pytest.mark.parametrize(
    "argv, code",
    [
        (["equal", "--cone", "nope", "a", "b"], 3),
        (["haplotype", "--cone", "rho", "--sum", "zz"], 3),
        (["predict", "--cone", "rho", "--diploid", "ACGT"], 2),
        (["predict", "--cone", "rho", "--diploid", "ACGT/ACGT"], 3),
        (["--budget", "2", "predict", "--cone", "rho", *Z3], 4),
        (["--budget", "0", "validate"], 3),
        (["no-such-command"], 2),
        (["fibers", "--cone", "rho", "--sum", "b,c", "--bogus"], 2),
    ],
)
def test_error_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert out == ""  # no partial report on failure
    assert err


def test_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("PEDIGRAD_BUDGET", "2")
    assert run(capsys, "predict", "--cone", "rho", *Z3)[0] == 4
    monkeypatch.setenv("PEDIGRAD_BUDGET", "many")
    assert run(capsys, "validate")[0] == 2


def _alignment_with(tmp_path, mutate):
    text = data_path("corpus_alignment.tsv").read_text()
    path = tmp_path / "alignment.tsv"
    path.write_text(mutate(text))
    return str(path)


def test_short_allele_is_invalid(tmp_path, capsys):
    path = _alignment_with(
        tmp_path, lambda t: t.replace("ACCATTAGCTACCTATAC\tACCACTAGCTACATATGC", "ACCATTAGCTACCTATA\tACCACTAGCTACATATGC")
    )
    code, _, err = run(capsys, "--alignment", path, "validate")
    assert code == 3
    assert "row 'a'" in err and "length 17" in err and "alignment.tsv:6" in err


def test_leg_out_of_range_is_invalid(tmp_path, capsys):
    chrom = tmp_path / "chrom.json"
    chrom.write_text(json.dumps({"cones": [{"id": "r", "peak": "(6:1)(6:1)(6:1)", "legs": [[1], [4]]}]}))
    code, _, err = run(capsys, "--chromology", str(chrom), "validate")
    assert code == 3 and "patch index 4" in err


def test_malformed_files_are_parse_errors(tmp_path, capsys):
    chrom = tmp_path / "chrom.json"
    chrom.write_text("{not json")
    assert run(capsys, "--chromology", str(chrom), "validate")[0] == 2
    path = _alignment_with(tmp_path, lambda t: t.replace("#alphabet A,C,G,T gap=e\n", ""))
    assert run(capsys, "--alignment", path, "validate")[0] == 2
    assert run(capsys, "--alignment", str(tmp_path / "missing.tsv"), "validate")[0] == 2


def test_non_scheme_chromology_fails_validation(tmp_path, capsys):
    chrom = tmp_path / "chrom.json"
    chrom.write_text(json.dumps({"cones": [
        {"id": "split", "peak": "(9:1)(9:1)", "legs": [[1], [2]]},
        {"id": "whole", "peak": "(18:1)", "legs": [[1]]},
    ]}))
    code, _, err = run(capsys, "--chromology", str(chrom), "validate")
    assert code == 3 and "leg 1 of cone 'whole'" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["--format", "json", "predict", "--cone", "rho", *Z3],
        ["fibers", "--cone", "rho", "--sum", "b,c"],
        ["localize", "--max-black", "2"],
    ],
)
def test_output_is_deterministic(argv):
    cmd = [sys.executable, "-m", "pedigrad.cli", *argv]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
