import json

import pytest

import cdscover as cc
from cdscover.cli import main


def _write_fixture(tmp_path, kind, name):
    path = tmp_path / f"{name}.json"
    if kind == "instance":
        path.write_text(cc.catalog.instance_text(name), encoding="utf-8")
    else:
        path.write_text(cc.catalog.scheme_text(name), encoding="utf-8")
    return str(path)


def test_bound_prints_reduced_fraction(tmp_path, capsys):
    fig2 = _write_fixture(tmp_path, "instance", "fig2")
    assert main(["bound", fig2]) == 0
    assert capsys.readouterr().out.strip() == "2/5"


def test_rho_prints_witness(capsys):
    assert main(["rho", "fig2"]) == 0
    out = capsys.readouterr().out
    assert "rho = 5" in out and "A1-B1" in out


def test_rho_json_schema(capsys):
    assert main(["--json", "rho", "fig5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["rho"] == 6
    assert payload["witness"]["size"] == 6


def test_classify_flags_open(capsys):
    assert main(["classify", "fig9"]) == 0
    assert "(open)" in capsys.readouterr().out


def test_synth_verify_pipeline(tmp_path, capsys):
    fig5 = _write_fixture(tmp_path, "instance", "fig5")
    out = str(tmp_path / "scheme.json")
    assert main(["synth", fig5, "-o", out]) == 0
    capsys.readouterr()
    assert main(["verify", fig5, out]) == 0
    capsys.readouterr()
    # emitted scheme round-trips through the documented format
    scheme = cc.parse_scheme((tmp_path / "scheme.json").read_text(encoding="utf-8"))
    assert cc.rate(scheme).numerator == 5


def test_synth_render(capsys):
    assert main(["synth", "fig5", "--render"]) == 0
    out = capsys.readouterr().out
    assert "component 1 (path)" in out and "A1: (" in out


def test_synth_refuses_non_path_cycle(capsys):
    assert main(["synth", "fig2"]) == 1
    assert "neither a path nor a cycle" in capsys.readouterr().err


def test_verify_broken_fixture_names_edge(tmp_path, capsys):
    fig5 = _write_fixture(tmp_path, "instance", "fig5")
    broken = _write_fixture(tmp_path, "scheme", "broken-fig5-leaky")
    assert main(["verify", fig5, broken]) == 1
    out = capsys.readouterr().out
    assert "A1-B2" in out and "FAIL" in out


def test_verify_entropic_flag(capsys):
    assert main(["verify", "fig2", "fig2-rate-2-5", "--entropic"]) == 0
    out = capsys.readouterr().out
    assert "entropic oracle: no failures" in out
    assert main(["verify", "fig2", "broken-leaky", "--entropic"]) == 1


def test_verify_json_roundtrip(capsys):
    assert main(["--json", "verify", "fig2", "fig2-rate-2-5", "--entropic"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["overall"] is True
    assert payload["rate"] == "2/5"
    assert all(r["status"] == "pass" for r in payload["entropic"])


def test_search_cli_success(tmp_path, capsys):
    out = str(tmp_path / "found.json")
    code = main(
        ["search", "fig2", "--p", "3", "--L", "4", "--N", "5", "--Lz", "9", "--seed", "0", "--budget", "2000", "-o", out]
    )
    assert code == 0
    scheme = cc.parse_scheme((tmp_path / "found.json").read_text(encoding="utf-8"))
    assert cc.verify_linear(cc.catalog.builtin_instance("fig2"), scheme).overall


def test_search_cli_failure_exit(capsys):
    code = main(["search", "fig2", "--p", "3", "--L", "1", "--N", "1", "--Lz", "2", "--budget", "50"])
    assert code == 1


def test_simulate_cli(capsys):
    assert main(["simulate", "fig2", "fig2-rate-2-5", "--trials", "200", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "decode frequency 1.000000" in out


def test_catalog_list_and_export(tmp_path, capsys):
    assert main(["catalog", "list"]) == 0
    out = capsys.readouterr().out
    assert "fig8" in out and "broken-leaky" in out
    target = str(tmp_path / "fig8.json")
    assert main(["catalog", "export", "fig8", "-o", target]) == 0
    exported = cc.parse_instance((tmp_path / "fig8.json").read_text(encoding="utf-8"))
    assert exported == cc.catalog.builtin_instance("fig8")


def test_usage_errors_exit_2(capsys):
    assert main(["bogus"]) == 2
    assert main(["catalog", "export", "doesnotexist"]) == 2
    assert main(["bound", "missing-file.json"]) == 2
    assert main(["--threads", "0", "catalog", "list"]) == 2


def test_malformed_instance_file_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["bound", str(bad)]) == 2
    assert "error" in capsys.readouterr().err
