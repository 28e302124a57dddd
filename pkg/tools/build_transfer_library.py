#!/usr/bin/env python3
"""Regenerate src/qaoatune/data/transfer_library.json.

Per (problem class, depth): optimize exact rescaled energy on a handful of
training instances, all started from the same linear ramp so every run stays
in one parameter branch, then average the optima (parameter concentration is
what makes the average transferable). Nelder-Mead is deliberate — the shipped
trust-region method is the *shot-frugal* tuner; library construction is an
offline, noiseless job where a stock simplex search is the right tool.

Training sets are small and sizes modest (N <= 10) so a rebuild takes seconds;
entries record their own provenance. Run from the repo root:

    python3 tools/build_transfer_library.py [--out src/qaoatune/data/transfer_library.json]
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qaoatune.problems import gen_labs, gen_random_weighted_maxcut, rescale, spectrum
from qaoatune.schedules import ScheduleSpec, to_parameters
from qaoatune.simulator import QaoaParameters, energy, evolve
from qaoatune.tuner import FALLBACK_RAMP_DELTA, transfer_parameters

MAXCUT_TRAIN_N = 10
MAXCUT_TRAIN_SEEDS = list(range(100, 110))
LABS_TRAIN_SIZES = [8, 9, 10]
DEPTHS = [1, 2, 3]


def optimize_instance(poly, p: int) -> QaoaParameters:
    scaled, _ = rescale(poly)
    spec = spectrum(scaled)
    start = to_parameters(ScheduleSpec.linear(FALLBACK_RAMP_DELTA, p))

    def objective(vector: np.ndarray) -> float:
        return energy(evolve(scaled, QaoaParameters.from_vector(vector)), spec)

    result = minimize(
        objective,
        np.asarray(start.to_vector()),
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000, "maxfev": 4000},
    )
    return QaoaParameters.from_vector(result.x)


def build_entries() -> list[dict]:
    entries = []
    for p in DEPTHS:
        train = [
            gen_random_weighted_maxcut(MAXCUT_TRAIN_N, 3, "uniform01", seed=s)
            for s in MAXCUT_TRAIN_SEEDS
        ]
        averaged = transfer_parameters([optimize_instance(poly, p) for poly in train])
        entries.append(
            {
                "problem_class": "maxcut-3reg-uniform01",
                "p": p,
                "gammas": list(averaged.gammas),
                "betas": list(averaged.betas),
                "training": {
                    "n": MAXCUT_TRAIN_N,
                    "instance_seeds": MAXCUT_TRAIN_SEEDS,
                    "objective": "exact rescaled energy",
                    "optimizer": "nelder-mead",
                    "init": f"linear ramp delta={FALLBACK_RAMP_DELTA}",
                },
            }
        )
    for p in DEPTHS:
        averaged = transfer_parameters(
            [optimize_instance(gen_labs(n), p) for n in LABS_TRAIN_SIZES]
        )
        entries.append(
            {
                "problem_class": "labs",
                "p": p,
                "gammas": list(averaged.gammas),
                "betas": list(averaged.betas),
                "training": {
                    "sizes": LABS_TRAIN_SIZES,
                    "objective": "exact rescaled energy",
                    "optimizer": "nelder-mead",
                    "init": f"linear ramp delta={FALLBACK_RAMP_DELTA}",
                },
            }
        )
    return entries


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default_out = (
        Path(__file__).resolve().parent.parent
        / "src"
        / "qaoatune"
        / "data"
        / "transfer_library.json"
    )
    parser.add_argument("--out", type=Path, default=default_out)
    args = parser.parse_args()

    library = {"version": 1, "entries": build_entries()}
    args.out.write_text(json.dumps(library, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out} ({len(library['entries'])} entries)")


if __name__ == "__main__":
    main()
