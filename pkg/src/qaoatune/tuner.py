"""Shot-frugal parameter fine-tuning: rescale, transfer, trust-region descent.

The optimizer here is deliberately small: a derivative-free trust-region
method whose internal model is an interpolation over a minimal stencil
(2p+1 points: center plus one displacement per coordinate). With a linear
model this is the classic simplex-interpolation scheme; the quadratic
variant adds a diagonal curvature estimate from secant information. The
entire run is budgeted up front — a fixed number of evaluations, each a
fixed number of shots — and the best-so-far point wins, not the last one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .problems import SpinPolynomial, brute_force_limit, rescale, spectrum
from .schedules import ScheduleSpec, to_parameters
from .simulator import (
    QaoaParameters,
    energy,
    estimate_energy,
    evolve,
    sample,
)
from .metrics import approximation_ratio

__all__ = [
    "OptimizerConfig",
    "ShotPlan",
    "EvaluationRecord",
    "EvaluationLedger",
    "allocate_shots",
    "transfer_parameters",
    "trust_region_minimize",
    "run_protocol",
    "load_transfer_library",
    "lookup_transfer",
    "resolve_initial_parameters",
    "problem_class_of",
    "FALLBACK_RAMP_DELTA",
]

# library lookup misses fall back to a plain ramp with this slope constant
FALLBACK_RAMP_DELTA = 0.6

_MODELS = ("linear", "quadratic")


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs of one budgeted fine-tuning run.

    initial_step doubles as the stencil displacement and the starting trust
    radius (smaller is better when the initial point is already good);
    final_step is the floor the radius shrinks toward on rejected steps.
    """

    total_shot_budget: int
    model: str = "linear"
    initial_step: float = 0.1
    final_step: float = 1e-3
    post_stencil_steps: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.model not in _MODELS:
            raise ValueError(f"model must be one of {_MODELS}, got {self.model!r}")
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        if not self.final_step > 0:
            raise ValueError("final_step must be positive")
        if not self.final_step < self.initial_step:
            raise ValueError("final_step must be smaller than initial_step")
        if self.post_stencil_steps < 0:
            raise ValueError("post_stencil_steps must be >= 0")
        if self.total_shot_budget < 1:
            raise ValueError("total_shot_budget must be >= 1")


@dataclass(frozen=True)
class ShotPlan:
    """Evaluation-count and shots-per-evaluation split of a fixed budget."""

    stencil_size: int
    total_evaluations: int
    shots_per_evaluation: int
    final_evaluation_shots: int
    total_shot_budget: int

    def shots_for(self, index: int) -> int:
        """Shots of evaluation ``index`` (0-based); the last absorbs the remainder."""
        if index == self.total_evaluations - 1:
            return self.final_evaluation_shots
        return self.shots_per_evaluation


def allocate_shots(config: OptimizerConfig, p: int) -> ShotPlan:
    """Split the budget evenly across stencil + post-stencil evaluations.

    The stencil needs 2p+1 points to pin down a linear model in 2p parameter
    coordinates; the floor remainder goes to the final evaluation so the
    budget is spent exactly.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    stencil = 2 * p + 1
    total_evals = stencil + config.post_stencil_steps
    per_eval = config.total_shot_budget // total_evals
    if per_eval < 1:
        raise ValueError(
            f"budget {config.total_shot_budget} cannot cover {total_evals} evaluations"
        )
    remainder = config.total_shot_budget - per_eval * total_evals
    return ShotPlan(
        stencil_size=stencil,
        total_evaluations=total_evals,
        shots_per_evaluation=per_eval,
        final_evaluation_shots=per_eval + remainder,
        total_shot_budget=config.total_shot_budget,
    )


# ---------------------------------------------------------------------------
# evaluation ledger
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvaluationRecord:
    parameters: QaoaParameters
    estimated_energy: float
    shots: int
    cumulative_shots: int


@dataclass
class EvaluationLedger:
    """Append-only trace of every objective evaluation in a run."""

    records: list[EvaluationRecord] = field(default_factory=list)

    def append(self, params: QaoaParameters, value: float, shots: int) -> None:
        cumulative = self.total_shots + shots
        self.records.append(
            EvaluationRecord(params, float(value), int(shots), cumulative)
        )

    @property
    def total_shots(self) -> int:
        return self.records[-1].cumulative_shots if self.records else 0

    @property
    def best_index(self) -> int:
        if not self.records:
            raise ValueError("empty ledger has no best evaluation")
        values = [r.estimated_energy for r in self.records]
        return int(np.argmin(values))

    @property
    def best(self) -> EvaluationRecord:
        return self.records[self.best_index]

    def to_dict(self) -> dict:
        return {
            "best_index": self.best_index,
            "records": [
                {
                    "gammas": list(r.parameters.gammas),
                    "betas": list(r.parameters.betas),
                    "estimated_energy": r.estimated_energy,
                    "shots": r.shots,
                    "cumulative_shots": r.cumulative_shots,
                }
                for r in self.records
            ],
        }


def transfer_parameters(optimized_sets: Sequence[QaoaParameters]) -> QaoaParameters:
    """Elementwise mean of per-instance optimized parameter sets.

    Parameter concentration makes this average a strong initial point on
    unseen instances of the same problem class.
    """
    sets = list(optimized_sets)
    if not sets:
        raise ValueError("need at least one parameter set to average")
    p = sets[0].p
    if any(s.p != p for s in sets):
        raise ValueError("all parameter sets must share the same depth")
    gammas = np.mean([s.gammas for s in sets], axis=0)
    betas = np.mean([s.betas for s in sets], axis=0)
    return QaoaParameters(tuple(gammas), tuple(betas))


# ---------------------------------------------------------------------------
# trust-region optimizer
# ---------------------------------------------------------------------------

# objective contract: (params, shots, seed) -> estimated energy
Objective = Callable[[QaoaParameters, int, int], float]


def _fit_linear_model(
    points: np.ndarray, values: np.ndarray, old_gradient: np.ndarray
) -> np.ndarray:
    """Affine interpolation gradient through the current point set.

    Least squares on [1, x] rows; a rank-deficient set (possible after vertex
    replacement) keeps the previous gradient rather than inventing one.
    """
    rows = np.hstack([np.ones((len(points), 1)), points])
    try:
        coef, *_ = np.linalg.lstsq(rows, values, rcond=None)
    except np.linalg.LinAlgError:
        return old_gradient
    gradient = coef[1:]
    if not np.all(np.isfinite(gradient)):
        return old_gradient
    return gradient


def trust_region_minimize(
    objective: Objective,
    start: QaoaParameters,
    config: OptimizerConfig,
) -> tuple[QaoaParameters, EvaluationLedger]:
    """Budgeted descent with an interpolation model over a minimal stencil.

    Phase one spends 2p+1 evaluations on the stencil (center + one positive
    displacement of size initial_step per coordinate) and fits the model.
    Phase two takes ``post_stencil_steps`` trust-region steps from the
    best-so-far point; a step that fails to improve halves the radius (down
    to final_step) and the tried point replaces the worst stencil vertex
    before refitting. Returns the best-so-far parameters, never the last
    iterate, with the full evaluation ledger. Deterministic given the seed.

    Every evaluation in a run passes the same seed to the objective (common
    random numbers): with the sampler's inversion scheme, estimates at
    nearby points then share most of their shot noise, so point-to-point
    comparisons — all the optimizer ever consumes — are far less noisy than
    the absolute estimates. Independent noise across runs comes from
    distinct config seeds.
    """
    p = start.p
    if p < 1:
        raise ValueError("optimization needs p >= 1")
    plan = allocate_shots(config, p)
    dim = 2 * p
    ledger = EvaluationLedger()

    def eval_at(vector: np.ndarray) -> float:
        index = len(ledger.records)
        shots = plan.shots_for(index)
        params = QaoaParameters.from_vector(vector)
        value = float(objective(params, shots, config.seed))
        ledger.append(params, value, shots)
        return value

    center = np.asarray(start.to_vector(), dtype=np.float64)
    points = [center.copy()]
    values = [eval_at(center)]
    for i in range(dim):
        x = center.copy()
        x[i] += config.initial_step
        points.append(x)
        values.append(eval_at(x))

    pts = np.array(points)
    vals = np.array(values)
    # scalar curvature: the quadratic variant models the objective as
    # c + g.(x-b) + lambda/2 |x-b|^2 — the coarsest diagonal Hessian, but one
    # secant sample pins it down, which is all a two-step budget affords.
    # Removing the quadratic part before the affine fit also cleans the
    # forward-stencil bias (+lambda*h/2 in every coordinate) out of g.
    curvature = 0.0

    def fit_gradient(base: np.ndarray, old: np.ndarray) -> np.ndarray:
        if config.model == "quadratic" and curvature > 0:
            quad = 0.5 * curvature * np.sum((pts - base) ** 2, axis=1)
            return _fit_linear_model(pts, vals - quad, old)
        return _fit_linear_model(pts, vals, old)

    radius = config.initial_step
    gradient = fit_gradient(center, np.zeros(dim))
    for _ in range(config.post_stencil_steps):
        best = ledger.best
        best_vec = np.asarray(best.parameters.to_vector(), dtype=np.float64)
        norm = float(np.linalg.norm(gradient))
        if norm > 0:
            length = radius
            if config.model == "quadratic" and curvature > 0:
                # model minimizer along -g, pulled back to the trust region
                length = min(norm / curvature, radius)
            step = -(length / norm) * gradient
        else:
            # flat model: nudge along the first coordinate to buy information
            step = np.zeros(dim)
            step[0] = radius
        trial = best_vec + step
        trial_value = eval_at(trial)

        actual = trial_value - best.estimated_energy
        step_sq = float(step @ step)
        if step_sq > 0:
            secant = 2.0 * (actual - float(gradient @ step)) / step_sq
            if math.isfinite(secant):
                curvature = secant
        if actual >= 0:
            radius = max(radius / 2.0, config.final_step)

        worst = int(np.argmax(vals))
        pts[worst] = trial
        vals[worst] = trial_value
        gradient = fit_gradient(
            np.asarray(ledger.best.parameters.to_vector(), dtype=np.float64),
            gradient,
        )

    return ledger.best.parameters, ledger


# ---------------------------------------------------------------------------
# transfer library
# ---------------------------------------------------------------------------

def load_transfer_library() -> dict:
    """Parsed copy of the packaged transfer-library JSON."""
    text = resources.files("qaoatune.data").joinpath("transfer_library.json").read_text()
    return json.loads(text)


def problem_class_of(poly: SpinPolynomial) -> str:
    """Instance label with the size/seed suffix stripped → library key.

    Labels follow ``<class>-n<N>[-seed<k>]`` (e.g. maxcut-3reg-uniform01-n12-seed5
    → maxcut-3reg-uniform01, labs-n8 → labs). A label without the -n<N> marker
    is returned whole.
    """
    label = poly.label
    for i in range(len(label) - 1):
        if label.startswith("-n", i) and i + 2 < len(label) and label[i + 2].isdigit():
            return label[:i]
    return label


def lookup_transfer(
    problem_class: str, p: int, library: dict | None = None
) -> QaoaParameters | None:
    """Library entry for (problem_class, p), or None when absent."""
    lib = load_transfer_library() if library is None else library
    for entry in lib.get("entries", []):
        if entry["problem_class"] == problem_class and entry["p"] == p:
            return QaoaParameters(tuple(entry["gammas"]), tuple(entry["betas"]))
    return None


def resolve_initial_parameters(
    init: str | ScheduleSpec | QaoaParameters,
    poly: SpinPolynomial,
    p: int,
    library: dict | None = None,
) -> tuple[QaoaParameters, str]:
    """Initial point plus a short provenance tag for the report.

    ``init`` is either the string "transfer" (library lookup by problem
    class, falling back to a linear ramp with the default slope), a
    ScheduleSpec, or explicit QaoaParameters.
    """
    if isinstance(init, QaoaParameters):
        if init.p != p:
            raise ValueError(f"explicit parameters have p={init.p}, expected {p}")
        return init, "explicit"
    if isinstance(init, ScheduleSpec):
        if init.p != p:
            raise ValueError(f"schedule has p={init.p}, expected {p}")
        return to_parameters(init), f"schedule:{init.variant}"
    if init == "transfer":
        cls = problem_class_of(poly)
        params = lookup_transfer(cls, p, library)
        if params is not None:
            return params, f"transfer:{cls}"
        fallback = to_parameters(ScheduleSpec.linear(FALLBACK_RAMP_DELTA, p))
        return fallback, f"fallback-ramp:{FALLBACK_RAMP_DELTA}"
    raise ValueError(f"unrecognized init {init!r}")


# ---------------------------------------------------------------------------
# end-to-end protocol
# ---------------------------------------------------------------------------

def make_energy_objective(poly: SpinPolynomial) -> Objective:
    """Shot-estimated energy objective with cost-ordered sample inversion.

    Each call draws ``shots`` measurements of the evolved state — an exact
    multinomial sample, identical in distribution to simulator.sample — but
    the inversion walks the outcome distribution in ascending-cost order.
    Under common random numbers (one seed per run) this makes the noise of
    nearby evaluations cancel almost perfectly in comparisons: a uniform
    that crosses a bin boundary lands on a neighboring cost value instead of
    an arbitrary one. Comparisons are what the optimizer consumes, so this
    is a large variance reduction at zero shot cost. Requires N within the
    simulator limit (the protocol is statevector-based already).
    """
    from .problems import cost_values

    costs = np.asarray(cost_values(poly))
    order = np.argsort(costs, kind="stable")
    costs_sorted = costs[order]

    def objective(params: QaoaParameters, shots: int, seed: int) -> float:
        state = evolve(poly, params)
        probs = state.probabilities()[order]
        cum = np.cumsum(probs / probs.sum())
        cum[-1] = 1.0
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
        drawn = np.searchsorted(cum, rng.random(shots), side="right")
        return float(np.mean(costs_sorted[drawn]))

    return objective


def run_protocol(
    poly: SpinPolynomial,
    init: str | ScheduleSpec | QaoaParameters,
    config: OptimizerConfig,
    *,
    p: int | None = None,
    library: dict | None = None,
) -> dict:
    """Rescale → initialize → budget → fine-tune → report.

    The optimizer works on the rescaled problem throughout (that is the
    coordinate system transferred parameters live in). Exact energies and
    approximation ratios are attached when the instance is small enough to
    brute force; energies are reported in rescaled units together with the
    scaling factor, and in original units as ``*_original``.
    """
    if p is None:
        if isinstance(init, (ScheduleSpec, QaoaParameters)):
            p = init.p
        else:
            raise ValueError("p is required when init is a library lookup")
    scaled, factor = rescale(poly)
    params0, init_source = resolve_initial_parameters(init, poly, p, library)
    plan = allocate_shots(config, p)
    objective = make_energy_objective(scaled)
    best_params, ledger = trust_region_minimize(objective, params0, config)
    initial_record = ledger.records[0]
    best_record = ledger.best

    report: dict = {
        "problem": {
            "label": poly.label,
            "num_variables": poly.num_variables,
            "num_terms": len(poly.terms),
        },
        "p": p,
        "init_source": init_source,
        "rescale_factor": factor,
        "config": {
            "model": config.model,
            "initial_step": config.initial_step,
            "final_step": config.final_step,
            "total_shot_budget": config.total_shot_budget,
            "post_stencil_steps": config.post_stencil_steps,
            "seed": config.seed,
        },
        "shot_plan": {
            "stencil_size": plan.stencil_size,
            "total_evaluations": plan.total_evaluations,
            "shots_per_evaluation": plan.shots_per_evaluation,
            "final_evaluation_shots": plan.final_evaluation_shots,
        },
        "initial": {
            "gammas": list(params0.gammas),
            "betas": list(params0.betas),
            "estimated_energy": initial_record.estimated_energy,
        },
        "final": {
            "gammas": list(best_params.gammas),
            "betas": list(best_params.betas),
            "estimated_energy": best_record.estimated_energy,
        },
        "ledger": ledger.to_dict(),
    }

    if poly.num_variables <= brute_force_limit():
        spec = spectrum(scaled)
        e0 = energy(evolve(scaled, params0), spec)
        e1 = energy(evolve(scaled, best_params), spec)
        report["initial"]["exact_energy"] = e0
        report["initial"]["exact_energy_original"] = e0 * factor
        report["initial"]["ar"] = approximation_ratio(e0, spec.f_min, spec.f_max)
        report["final"]["exact_energy"] = e1
        report["final"]["exact_energy_original"] = e1 * factor
        report["final"]["ar"] = approximation_ratio(e1, spec.f_min, spec.f_max)
        report["improvement_found"] = bool(e1 < e0)
    return report
