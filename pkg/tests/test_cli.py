"""Command-line surface: subcommands, exit codes, manifests, replay."""

import json
import math

import pytest

from qaoatune.cli import argv_from_manifest, main
from qaoatune.metrics import approximation_ratio
from qaoatune.problems import gen_labs, gen_random_weighted_maxcut, load_problem, spectrum
from qaoatune.schedules import ScheduleSpec, to_parameters
from qaoatune.simulator import energy, evolve, ground_state_overlap


def _run(argv):
    return main([str(a) for a in argv])


def _gen_labs_file(tmp_path, n=8):
    path = tmp_path / f"labs{n}.json"
    assert _run(["gen", "labs", "--n", n, "--out", path]) == 0
    return path


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def test_gen_labs_round_trip(tmp_path):
    path = _gen_labs_file(tmp_path, 8)
    poly = load_problem(path)
    assert poly == gen_labs(8)
    manifest = json.loads(path.read_text())["manifest"]
    assert manifest["subcommand"] == "gen"
    assert manifest["config"] == {"generator": "labs", "n": 8}
    assert manifest["inputs"] == {}


def test_gen_regular_round_trip(tmp_path):
    path = tmp_path / "reg.json"
    assert _run([
        "gen", "regular", "--n", 10, "--degree", 3,
        "--weights", "gauss01", "--seed", 5, "--out", path,
    ]) == 0
    assert load_problem(path) == gen_random_weighted_maxcut(10, 3, "gauss01", 5)
    manifest = json.loads(path.read_text())["manifest"]
    assert manifest["seeds"] == {"seed": 5}


def test_gen_maxcut_from_edge_file(tmp_path):
    edges = tmp_path / "edges.json"
    edges.write_text(json.dumps([[0, 1, 1.0], [1, 2, 2.0]]))
    out = tmp_path / "cut.json"
    assert _run(["gen", "maxcut", "--n", 3, "--edges", edges, "--out", out]) == 0
    poly = load_problem(out)
    assert poly.num_variables == 3
    assert len(poly.terms) == 2
    manifest = json.loads(out.read_text())["manifest"]
    assert "edges" in manifest["inputs"]
    assert len(manifest["inputs"]["edges"]) == 64  # sha256 hex digest


def test_gen_maxcut_requires_edges(tmp_path):
    assert _run(["gen", "maxcut", "--n", 3, "--out", tmp_path / "x.json"]) == 1


def test_gen_writes_to_stdout_not_supported():
    # --out is mandatory for gen: a problem is a file, not a log line
    assert _run(["gen", "labs", "--n", 6]) == 1


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

def test_evolve_schedule_matches_library(tmp_path, capsys):
    problem = _gen_labs_file(tmp_path, 8)
    assert _run(["evolve", "--problem", problem, "--p", 8, "--schedule", "linear:0.6"]) == 0
    record = json.loads(capsys.readouterr().out)

    poly = gen_labs(8)
    spec = spectrum(poly)
    state = evolve(poly, to_parameters(ScheduleSpec.linear(0.6, 8)))
    assert record["energy"] == pytest.approx(energy(state, spec), abs=1e-12)
    assert record["ar"] == pytest.approx(
        approximation_ratio(record["energy"], spec.f_min, spec.f_max), abs=1e-12
    )
    assert record["overlap"] == pytest.approx(ground_state_overlap(state, spec), abs=1e-12)
    assert record["num_optima"] == 16
    # a ramped schedule concentrates far beyond the uniform baseline
    assert record["overlap"] > record["num_optima"] / 2**8


def test_evolve_explicit_params_file(tmp_path, capsys):
    problem = _gen_labs_file(tmp_path, 6)
    pfile = tmp_path / "params.json"
    pfile.write_text(json.dumps({"gammas": [0.2, 0.4], "betas": [0.5, 0.25]}))
    assert _run(["evolve", "--problem", problem, "--p", 2, "--params", pfile]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["gammas"] == [0.2, 0.4]
    assert record["schedule"] is None
    assert "params" in record["manifest"]["inputs"]


def test_evolve_fourier_schedule_file(tmp_path, capsys):
    problem = _gen_labs_file(tmp_path, 6)
    ffile = tmp_path / "fourier.json"
    ffile.write_text(json.dumps({"u": [0.5], "v": [0.5]}))
    assert _run([
        "evolve", "--problem", problem, "--p", 4, "--schedule", f"fourier:{ffile}",
    ]) == 0
    record = json.loads(capsys.readouterr().out)
    expected = to_parameters(ScheduleSpec.fourier([0.5], [0.5], 4))
    assert record["gammas"] == pytest.approx(list(expected.gammas), abs=1e-15)
    assert "fourier" in record["manifest"]["inputs"]


def test_evolve_shots_adds_estimate(tmp_path, capsys):
    problem = _gen_labs_file(tmp_path, 6)
    assert _run([
        "evolve", "--problem", problem, "--p", 2, "--schedule", "linear:0.6",
        "--shots", 4000, "--seed", 3,
    ]) == 0
    record = json.loads(capsys.readouterr().out)
    spec = spectrum(gen_labs(6))
    spread = spec.f_max - spec.f_min
    assert abs(record["estimated_energy"] - record["energy"]) < 5 * spread / math.sqrt(4000)


def test_evolve_needs_exactly_one_parameter_source(tmp_path):
    problem = _gen_labs_file(tmp_path, 6)
    pfile = tmp_path / "params.json"
    pfile.write_text(json.dumps({"gammas": [0.1], "betas": [0.1]}))
    assert _run(["evolve", "--problem", problem, "--p", 1]) == 1
    assert _run([
        "evolve", "--problem", problem, "--p", 1,
        "--schedule", "linear:0.6", "--params", pfile,
    ]) == 1


def test_evolve_wrong_depth_params_is_runtime_error(tmp_path):
    problem = _gen_labs_file(tmp_path, 6)
    pfile = tmp_path / "params.json"
    pfile.write_text(json.dumps({"gammas": [0.1], "betas": [0.1]}))
    assert _run(["evolve", "--problem", problem, "--p", 3, "--params", pfile]) == 2


# ---------------------------------------------------------------------------
# tune
# ---------------------------------------------------------------------------

def test_tune_deterministic_and_improving(tmp_path):
    problem = tmp_path / "reg.json"
    _run(["gen", "regular", "--n", 10, "--seed", 4, "--out", problem])
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    for out in outs:
        assert _run([
            "tune", "--problem", problem, "--p", 2, "--budget", 8000,
            "--model", "quadratic", "--rhobeg", 0.02, "--seed", 11, "--out", out,
        ]) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes()
    report = json.loads(outs[0].read_text())
    assert report["init_source"] == "transfer:maxcut-3reg-uniform01"
    assert report["final"]["estimated_energy"] <= report["initial"]["estimated_energy"]
    assert sum(r["shots"] for r in report["ledger"]["records"]) == 8000


def test_tune_schedule_init(tmp_path, capsys):
    problem = _gen_labs_file(tmp_path, 6)
    assert _run([
        "tune", "--problem", problem, "--p", 2, "--budget", 4000,
        "--init", "linear:0.45", "--seed", 1,
    ]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["init_source"] == "schedule:linear"


# ---------------------------------------------------------------------------
# scale-study / bench-depth file shapes
# ---------------------------------------------------------------------------

def test_scale_study_outputs(tmp_path):
    csv_path, json_path = tmp_path / "s.csv", tmp_path / "s.json"
    assert _run([
        "scale-study", "--family", "labs", "--n-min", 6, "--n-max", 10,
        "--p", 4, "--schedule", "linear:0.45", "--resamples", 200,
        "--seed", 0, "--out-csv", csv_path, "--out-json", json_path,
    ]) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("# manifest: ")
    assert lines[1] == "n,p,overlap,tts,energy,ar"
    assert len(lines) == 2 + 5  # manifest + header + one row per size
    # every data cell must round-trip through float() exactly (17 sig digits)
    for line in lines[2:]:
        cells = line.split(",")
        assert int(cells[0]) in range(6, 11)
        overlap = float(cells[2])
        assert f"{overlap:.17g}" == cells[2]
        assert float(cells[3]) == pytest.approx(1.0 / overlap, rel=1e-15)
    fit = json.loads(json_path.read_text())
    assert fit["ci_low"] <= fit["alpha"] <= fit["ci_high"]
    assert fit["n_values"] == [6, 7, 8, 9, 10]
    embedded = json.loads(lines[0][len("# manifest: "):])
    assert embedded == fit["manifest"]


def test_bench_depth_outputs(tmp_path):
    problem = tmp_path / "reg.json"
    _run(["gen", "regular", "--n", 8, "--seed", 7, "--out", problem])
    csv_path, json_path = tmp_path / "d.csv", tmp_path / "d.json"
    assert _run([
        "bench-depth", "--problem", problem, "--p-max", 6, "--delta", 0.6,
        "--out-csv", csv_path, "--out-json", json_path,
    ]) == 0
    payload = json.loads(json_path.read_text())
    assert payload["best_p"] >= 1
    assert payload["product"] == 8 * payload["best_p"]
    energies = payload["energies"]
    assert all(a > b for a, b in zip(energies[: payload["best_p"] + 1], energies[1:]))
    lines = csv_path.read_text().splitlines()
    assert lines[1] == "p,energy"
    assert len(lines) == 2 + len(energies)


# ---------------------------------------------------------------------------
# exit codes / version
# ---------------------------------------------------------------------------

def test_exit_code_matrix(tmp_path):
    assert _run(["evolve", "--problem", "missing.json", "--p", 1, "--schedule", "linear:0.6"]) == 2
    assert _run(["evolve", "--frobnicate"]) == 1
    assert _run(["no-such-subcommand"]) == 1
    problem = _gen_labs_file(tmp_path, 6)
    assert _run(["evolve", "--problem", problem, "--p", 0, "--schedule", "linear:0.6"]) == 2
    assert _run(["evolve", "--problem", problem, "--p", 2, "--schedule", "linear:zero"]) == 2


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("qaoatune ")


# ---------------------------------------------------------------------------
# manifest replay
# ---------------------------------------------------------------------------

def _replay_json(tmp_path, argv, out_name):
    first = tmp_path / f"{out_name}.json"
    assert _run(argv + ["--out", first]) == 0
    manifest = json.loads(first.read_text())["manifest"]
    second = tmp_path / f"{out_name}-replay.json"
    assert _run(argv_from_manifest(manifest, out=second)) == 0
    assert first.read_bytes() == second.read_bytes()


def test_replay_gen(tmp_path):
    _replay_json(tmp_path, ["gen", "regular", "--n", 10, "--degree", 3, "--seed", 2], "gen")


def test_replay_evolve(tmp_path):
    problem = _gen_labs_file(tmp_path, 7)
    _replay_json(
        tmp_path,
        ["evolve", "--problem", problem, "--p", 3, "--schedule", "linear:0.6",
         "--shots", 500, "--seed", 9],
        "evolve",
    )


def test_replay_tune(tmp_path):
    problem = tmp_path / "reg.json"
    _run(["gen", "regular", "--n", 8, "--seed", 3, "--out", problem])
    _replay_json(
        tmp_path,
        ["tune", "--problem", problem, "--p", 2, "--budget", 3000, "--seed", 5],
        "tune",
    )


def test_replay_scale_study(tmp_path):
    argv = [
        "scale-study", "--family", "labs", "--n-min", 5, "--n-max", 8,
        "--p", 3, "--schedule", "linear:0.45", "--resamples", 100, "--seed", 1,
    ]
    csv1, json1 = tmp_path / "s1.csv", tmp_path / "s1.json"
    assert _run(argv + ["--out-csv", csv1, "--out-json", json1]) == 0
    manifest = json.loads(json1.read_text())["manifest"]
    csv2, json2 = tmp_path / "s2.csv", tmp_path / "s2.json"
    assert _run(argv_from_manifest(manifest, out_csv=csv2, out_json=json2)) == 0
    assert csv1.read_bytes() == csv2.read_bytes()
    assert json1.read_bytes() == json2.read_bytes()


def test_replay_bench_depth(tmp_path):
    problem = tmp_path / "reg.json"
    _run(["gen", "regular", "--n", 8, "--seed", 7, "--out", problem])
    argv = ["bench-depth", "--problem", problem, "--p-max", 5, "--shots", 2000, "--seed", 4]
    csv1, json1 = tmp_path / "d1.csv", tmp_path / "d1.json"
    assert _run(argv + ["--out-csv", csv1, "--out-json", json1]) == 0
    manifest = json.loads(json1.read_text())["manifest"]
    csv2, json2 = tmp_path / "d2.csv", tmp_path / "d2.json"
    assert _run(argv_from_manifest(manifest, out_csv=csv2, out_json=json2)) == 0
    assert csv1.read_bytes() == csv2.read_bytes()
    assert json1.read_bytes() == json2.read_bytes()
