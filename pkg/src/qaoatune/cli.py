"""Command-line surface: `gen | evolve | tune | scale-study | bench-depth`.

Every emitted file carries the run's manifest — subcommand, resolved flags,
seeds, sha256 digests of input files, tool version, and the active kernel
backend. ``argv_from_manifest`` turns a manifest back into an argv vector, so
any result can be regenerated byte-for-byte (JSON payloads are emitted with
sorted keys and shortest-round-trip floats; CSV floats use 17 significant
digits). Output-path flags are deliberately not part of the manifest: where a
result lives should not change its bytes.

Exit codes: 0 success, 1 usage error (bad flags/arguments), 2 runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .kernels import BACKEND
from .metrics import (
    approximation_ratio,
    depth_progression_benchmark,
    exact_energy_executor,
    fit_exponential,
    ramp_family,
    sampling_executor,
    time_to_solution,
)
from .problems import (
    gen_labs,
    gen_maxcut,
    gen_random_weighted_maxcut,
    load_problem,
    problem_to_dict,
    rescale,
    spectrum,
)
from .schedules import ScheduleSpec, parse_schedule, to_parameters
from .simulator import QaoaParameters, energy, estimate_energy, evolve, ground_state_overlap, sample
from .tuner import OptimizerConfig, run_protocol


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the contract here is 1 (2 is
    # reserved for runtime failures)
    def error(self, message):  # noqa: D102 - argparse override
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# manifest plumbing
# ---------------------------------------------------------------------------

def _sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def make_manifest(
    subcommand: str,
    config: dict,
    seeds: dict,
    input_paths: dict[str, str],
) -> dict:
    return {
        "subcommand": subcommand,
        "tool_version": __version__,
        "kernel_backend": BACKEND,
        "config": config,
        "seeds": seeds,
        "inputs": {name: _sha256(path) for name, path in input_paths.items()},
    }


def argv_from_manifest(manifest: dict, **outputs: str) -> list[str]:
    """Rebuild the argv vector that reproduces a manifest's run.

    Output destinations are supplied by the caller (``out="report.json"``,
    ``out_csv=...``, ``out_json=...``) since they are not recorded.
    """
    sub = manifest["subcommand"]
    argv = [sub]
    config = manifest["config"]
    if sub == "gen":
        argv.append(config["generator"])
    merged = {k: v for k, v in config.items() if k != "generator"}
    merged.update(manifest.get("seeds", {}))
    for key in sorted(merged):
        value = merged[key]
        if value is None:
            continue
        argv += [f"--{key.replace('_', '-')}", str(value)]
    for key, path in outputs.items():
        argv += [f"--{key.replace('_', '-')}", str(path)]
    return argv


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _emit_csv(header: list[str], rows: list[list], manifest: dict, out: str) -> None:
    lines = ["# manifest: " + json.dumps(manifest, sort_keys=True)]
    lines.append(",".join(header))
    lines.extend(",".join(_csv_cell(v) for v in row) for row in rows)
    Path(out).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# shared argument helpers
# ---------------------------------------------------------------------------

def _load_params_file(path: str, p: int) -> QaoaParameters:
    data = json.loads(Path(path).read_text())
    params = QaoaParameters(
        tuple(float(g) for g in data["gammas"]),
        tuple(float(b) for b in data["betas"]),
    )
    if params.p != p:
        raise ValueError(f"parameter file has p={params.p}, --p is {p}")
    return params


def _resolve_schedule(text: str, p: int, inputs: dict[str, str]) -> ScheduleSpec:
    # fourier amplitudes come from a file; everything else is inline syntax
    if text.startswith("fourier:"):
        path = text[len("fourier:"):]
        inputs["fourier"] = path
        data = json.loads(Path(path).read_text())
        return ScheduleSpec.fourier(data["u"], data["v"], p)
    return parse_schedule(text, p)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    if args.generator == "labs":
        poly = gen_labs(args.n)
        config = {"generator": "labs", "n": args.n}
        seeds: dict = {}
        inputs: dict[str, str] = {}
    elif args.generator == "regular":
        poly = gen_random_weighted_maxcut(args.n, args.degree, args.weights, args.seed)
        config = {
            "generator": "regular",
            "n": args.n,
            "degree": args.degree,
            "weights": args.weights,
        }
        seeds = {"seed": args.seed}
        inputs = {}
    else:  # maxcut from an explicit edge list
        edges = [
            (int(u), int(v), float(w))
            for u, v, w in json.loads(Path(args.edges).read_text())
        ]
        label = args.label or f"maxcut-custom-n{args.n}"
        poly = gen_maxcut(edges, args.n, label=label)
        config = {"generator": "maxcut", "n": args.n, "edges": args.edges, "label": label}
        seeds = {}
        inputs = {"edges": args.edges}

    payload = problem_to_dict(poly)
    payload["manifest"] = make_manifest("gen", config, seeds, inputs)
    _emit_json(payload, args.out)
    return 0


def _cmd_evolve(args) -> int:
    inputs = {"problem": args.problem}
    poly = load_problem(args.problem)
    if args.params is not None:
        inputs["params"] = args.params
        params = _load_params_file(args.params, args.p)
        schedule_text = None
    else:
        spec = _resolve_schedule(args.schedule, args.p, inputs)
        params = to_parameters(spec)
        schedule_text = args.schedule

    state = evolve(poly, params)
    spect = spectrum(poly)
    value = energy(state, spect)
    payload = {
        "problem": {"label": poly.label, "n": poly.num_variables},
        "p": args.p,
        "schedule": schedule_text,
        "gammas": list(params.gammas),
        "betas": list(params.betas),
        "energy": value,
        "ar": approximation_ratio(value, spect.f_min, spect.f_max),
        "overlap": ground_state_overlap(state, spect),
        "num_optima": spect.num_optima,
    }
    if args.shots > 0:
        payload["estimated_energy"] = estimate_energy(
            sample(state, args.shots, args.seed), poly
        )
    config = {
        "problem": args.problem,
        "p": args.p,
        "schedule": args.schedule,
        "params": args.params,
        "shots": args.shots,
    }
    payload["manifest"] = make_manifest("evolve", config, {"seed": args.seed}, inputs)
    _emit_json(payload, args.out)
    return 0


def _cmd_tune(args) -> int:
    inputs = {"problem": args.problem}
    poly = load_problem(args.problem)
    if args.params is not None:
        inputs["params"] = args.params
        init: str | ScheduleSpec | QaoaParameters = _load_params_file(args.params, args.p)
    elif args.init == "transfer":
        init = "transfer"
    else:
        init = _resolve_schedule(args.init, args.p, inputs)

    config = OptimizerConfig(
        total_shot_budget=args.budget,
        model=args.model,
        initial_step=args.rhobeg,
        final_step=args.final_step,
        post_stencil_steps=args.steps,
        seed=args.seed,
    )
    report = run_protocol(poly, init, config, p=args.p)
    cli_config = {
        "problem": args.problem,
        "p": args.p,
        "budget": args.budget,
        "steps": args.steps,
        "init": args.init,
        "params": args.params,
        "rhobeg": args.rhobeg,
        "final_step": args.final_step,
        "model": args.model,
    }
    report["manifest"] = make_manifest("tune", cli_config, {"seed": args.seed}, inputs)
    _emit_json(report, args.out)
    return 0


def _cmd_scale_study(args) -> int:
    inputs: dict[str, str] = {}
    rows = []
    points = []
    for n in range(args.n_min, args.n_max + 1):
        if args.family == "labs":
            poly = gen_labs(n)
        else:
            poly = gen_random_weighted_maxcut(n, args.degree, args.weights, args.seed + n)
        scaled, factor = rescale(poly)
        spec = _resolve_schedule(args.schedule, args.p, inputs)
        state = evolve(scaled, to_parameters(spec))
        spect = spectrum(scaled)
        value = energy(state, spect)
        overlap = ground_state_overlap(state, spect)
        tts = time_to_solution(overlap)
        rows.append(
            [
                n,
                args.p,
                overlap,
                tts,
                value * factor,
                approximation_ratio(value, spect.f_min, spect.f_max),
            ]
        )
        points.append((n, tts))

    fit = fit_exponential(points, seed=args.seed, resamples=args.resamples)
    config = {
        "family": args.family,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "p": args.p,
        "schedule": args.schedule,
        "resamples": args.resamples,
    }
    if args.family == "regular":
        config["degree"] = args.degree
        config["weights"] = args.weights
    manifest = make_manifest("scale-study", config, {"seed": args.seed}, inputs)
    _emit_csv(["n", "p", "overlap", "tts", "energy", "ar"], rows, manifest, args.out_csv)
    fit_payload = {
        "alpha": fit.alpha,
        "offset_c": fit.offset_c,
        "ci_low": fit.ci_low,
        "ci_high": fit.ci_high,
        "n_values": list(fit.n_values),
        "resamples": fit.resamples,
        "bootstrap_seed": fit.seed,
        "manifest": manifest,
    }
    _emit_json(fit_payload, args.out_json)
    return 0


def _cmd_bench_depth(args) -> int:
    inputs = {"problem": args.problem}
    poly = load_problem(args.problem)
    scaled, factor = rescale(poly)
    executor = exact_energy_executor if args.shots == 0 else sampling_executor
    result = depth_progression_benchmark(
        executor,
        scaled,
        ramp_family(args.delta),
        args.p_max,
        max(args.shots, 1),  # exact executor ignores the count but the contract wants >= 1
        seed=args.seed,
    )
    config = {
        "problem": args.problem,
        "p_max": args.p_max,
        "delta": args.delta,
        "shots": args.shots,
    }
    manifest = make_manifest("bench-depth", config, {"seed": args.seed}, inputs)
    rows = [[p, e * factor] for p, e in enumerate(result.energies)]
    _emit_csv(["p", "energy"], rows, manifest, args.out_csv)
    payload = {
        "n_qubits": result.n_qubits,
        "best_p": result.best_p,
        "product": result.product,
        "rescale_factor": factor,
        "energies": [e * factor for e in result.energies],
        "manifest": manifest,
    }
    _emit_json(payload, args.out_json)
    return 0


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qaoatune", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qaoatune {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a problem file")
    gen.add_argument("generator", choices=["labs", "regular", "maxcut"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--degree", type=int, default=3)
    gen.add_argument("--weights", choices=["uniform01", "gauss01"], default="uniform01")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--edges", help="JSON file of [u, v, weight] triples (maxcut)")
    gen.add_argument("--label", help="problem label override (maxcut)")
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=_cmd_gen)

    ev = sub.add_parser("evolve", help="run the circuit and report energy/ar/overlap")
    ev.add_argument("--problem", required=True)
    ev.add_argument("--p", type=int, required=True)
    ev.add_argument("--schedule", help="linear:D | extended:G1:G2:B1:B2 | root:D | tangent:D[:C] | fourier:FILE")
    ev.add_argument("--params", help="JSON file with explicit gammas/betas lists")
    ev.add_argument("--shots", type=int, default=0, help="also report a sampled estimate")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--out", help="write the JSON record here instead of stdout")
    ev.set_defaults(handler=_cmd_evolve)

    tune = sub.add_parser("tune", help="shot-frugal fine-tuning from a transferred start")
    tune.add_argument("--problem", required=True)
    tune.add_argument("--p", type=int, required=True)
    tune.add_argument("--budget", type=int, required=True)
    tune.add_argument("--steps", type=int, default=2)
    tune.add_argument("--init", default="transfer", help='"transfer" or a schedule spec')
    tune.add_argument("--params", help="explicit initial parameters (JSON file)")
    tune.add_argument("--rhobeg", type=float, default=0.1)
    tune.add_argument("--final-step", type=float, default=1e-3)
    tune.add_argument("--model", choices=["linear", "quadratic"], default="linear")
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--out", help="write the report here instead of stdout")
    tune.set_defaults(handler=_cmd_tune)

    scale = sub.add_parser("scale-study", help="overlap/TTS vs N with an exponential fit")
    scale.add_argument("--family", choices=["labs", "regular"], default="labs")
    scale.add_argument("--n-min", type=int, required=True)
    scale.add_argument("--n-max", type=int, required=True)
    scale.add_argument("--p", type=int, required=True)
    scale.add_argument("--schedule", required=True)
    scale.add_argument("--degree", type=int, default=3)
    scale.add_argument("--weights", choices=["uniform01", "gauss01"], default="uniform01")
    scale.add_argument("--resamples", type=int, default=1000)
    scale.add_argument("--seed", type=int, default=0)
    scale.add_argument("--out-csv", required=True)
    scale.add_argument("--out-json", required=True)
    scale.set_defaults(handler=_cmd_scale_study)

    bench = sub.add_parser("bench-depth", help="depth progression: largest p that still improves")
    bench.add_argument("--problem", required=True)
    bench.add_argument("--p-max", type=int, required=True)
    bench.add_argument("--delta", type=float, default=0.6, help="ramp slope per depth")
    bench.add_argument("--shots", type=int, default=0, help="0 = exact statevector executor")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out-csv", required=True)
    bench.add_argument("--out-json", required=True)
    bench.set_defaults(handler=_cmd_bench_depth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand == "evolve" and (args.schedule is None) == (args.params is None):
            parser.error("evolve needs exactly one of --schedule / --params")
        if args.subcommand == "gen" and args.generator == "maxcut" and not args.edges:
            parser.error("gen maxcut requires --edges")
    except SystemExit as exc:  # argparse exits; fold into the int contract
        return int(exc.code) if exc.code else 0
    try:
        return args.handler(args)
    except Exception as exc:  # runtime failures map to exit 2
        print(f"qaoatune: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
