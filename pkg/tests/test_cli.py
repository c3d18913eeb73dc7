"""Command-line interface, run in process through main(argv)."""

import json

import pytest

from singmoduli.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr().out
    return rc, out


def test_partition_three_routes_agree(capsys):
    rc, out = run(capsys, "partition", "--n", "10")
    assert rc == 0
    report = json.loads(out)
    assert report["ok"] is True
    row = report["rows"][0]
    assert row["p"] == row["recurrence"] == row["series"] == "42"
    assert row["agree"] is True
    assert row["forms"] == 15


def test_partition_range_and_determinism(capsys):
    rc1, out1 = run(capsys, "partition", "--range", "1..5")
    rc2, out2 = run(capsys, "partition", "--range", "1..5")
    assert rc1 == rc2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert [row["p"] for row in report["rows"]] == ["1", "2", "3", "5", "7"]


def test_partition_requires_target(capsys):
    with pytest.raises(SystemExit):
        main(["partition"])


def test_bad_range_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["partition", "--range", "5..2"])
    assert exc.value.code == 2


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_hd_check_certifies_n1(capsys):
    rc, out = run(capsys, "hd", "check", "--n", "1")
    assert rc == 0
    report = json.loads(out)
    assert report["ok"] is True
    row = report["rows"][0]
    assert row["degree"] == 3
    assert row["irreducible"] is True
    assert row["power"] == 1


def test_hd_build_emits_scaled_integers(capsys):
    rc, out = run(capsys, "hd", "build", "--n", "1")
    assert rc == 0
    report = json.loads(out)
    row = report["rows"][0]
    assert row["D"] == -23
    assert row["hhat_scaled"] == ["1", "-529", "82616", "-5097973"]


def test_bounds_kappa(capsys):
    rc, out = run(capsys, "bounds", "kappa")
    assert rc == 0
    report = json.loads(out)
    assert report["ok"] is True
    assert float(report["kappa_upper"]) <= float(report["kappa_claimed"])


def test_bounds_separation_single_and_failing(capsys):
    rc, out = run(capsys, "bounds", "separation", "--n", "54")
    assert rc == 0
    assert json.loads(out)["ok"] is True
    rc, out = run(capsys, "bounds", "separation", "--n", "53")
    assert rc == 1
    assert json.loads(out)["ok"] is False


def test_bounds_separation_range(capsys):
    rc, out = run(capsys, "bounds", "separation", "--range", "54..80")
    assert rc == 0
    report = json.loads(out)
    assert report["checked"] == 27
    assert report["failures"] == []


def test_tables_command(capsys):
    rc, out = run(capsys, "tables", "--n", "54")
    assert rc == 0
    assert json.loads(out)["ok"] is True


def test_masser_verify(capsys):
    rc, out = run(capsys, "masser", "verify")
    assert rc == 0
    report = json.loads(out)
    assert report["ok"] is True
    assert float(report["worst_gap"]) < 1e-15


def test_text_and_csv_formats(capsys):
    rc, out = run(capsys, "partition", "--n", "10", "--format", "text")
    assert rc == 0
    assert "42" in out and "{" not in out
    rc, out = run(capsys, "partition", "--n", "10", "--format", "csv")
    assert rc == 0
    header = out.splitlines()[0]
    assert "p" in header.split(",")


def test_env_override_for_format(capsys, monkeypatch):
    monkeypatch.setenv("SINGMODULI_FORMAT", "csv")
    rc, out = run(capsys, "partition", "--n", "3")
    assert rc == 0
    assert out.splitlines()[0].count(",") > 2


def test_crosscheck_round_trip(tmp_path, capsys):
    rc, out = run(capsys, "hd", "build", "--range", "1..3")
    rows = json.loads(out)["rows"]
    lines = []
    for row in rows:
        lines.append("%d: %s" % (row["n"], ", ".join(row["hhat_scaled"])))
    path = tmp_path / "table.txt"
    path.write_text("# external table\n\n" + "\n".join(lines) + "\n")
    rc, out = run(capsys, "crosscheck", "--file", str(path))
    assert rc == 0
    assert json.loads(out)["ok"] is True
    # corrupt one digit and expect a failing verdict
    bad = tmp_path / "bad.txt"
    bad.write_text(lines[0][:-1] + "8\n")
    rc, out = run(capsys, "crosscheck", "--file", str(bad))
    assert rc == 1
    assert json.loads(out)["ok"] is False


def test_prec_floor_is_enforced(capsys):
    rc = main(["partition", "--n", "2", "--prec", "32"])
    captured = capsys.readouterr()
    assert rc == 1
    assert "error" in captured.err
