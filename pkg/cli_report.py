"""
Experiment Runner and Reports

Command-line entry point: loads a JSON experiment config, dispatches to the
named experiment and writes results.jsonl (one record per check or
quantity), tables.csv (one row per check) and series/*.csv (plot-ready
(x, value) pairs).

Usage:
    python cli_report.py run --config configs/constants.json [--out DIR] [--seed N] [--verbose]
    python cli_report.py list

Exit status: 0 when every verdict passes, 1 when one fails, 2 for an
invalid config, 3 when an experiment raises.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from experiment_config import (
    EXPERIMENT_DESCRIPTIONS,
    ExperimentConfig,
    ExperimentName,
    FamilyKind,
    load_config,
)
from fourier import (
    SmoothProfile,
    UniformGrid,
    commutation_check,
    fourier_transform,
    hilbert_identity_report,
    hypothesis_integral_21,
    hypothesis_integrals_g,
    hypothesis_integrals_phi,
    kernel_decay_probe,
)
from grid_core import DomainError, HausdorffError, LogGrid, make_log_grid
from hardy_space import (
    MaximalConfig,
    dilation_invariance_check,
    equivalence_band,
    exponent_relation_probe,
    gaussian,
    gaussian_derivative,
    hardy_quasi_norm,
    hermite_family,
    required_order,
    weak_hardy_quasi_norm,
)
from hausdorff_operator import ClosedForm, ExponentSet, FunctionLike, apply_at, apply_on_grid
from inequalities import (
    DEFAULT_A_GRID,
    hardy_inequality_check,
    near_extremal_family,
    power_weight_bound_check,
    seeded_young_pairs,
    verify_sandwich_decreasing,
    verify_sandwich_increasing,
    weight_growth_check,
    young_mult_check,
)
from kernels import GaussianHat, Kernel, KernelBounds, kernel_from_spec
from norms import A_constant, B_constant, k_constant, k_general, weak_lp_norm, weighted_lp_norm
from reports import VerificationReport, _jsonable
from weights import (
    ConstantWeight,
    Direction,
    PowerWeight,
    Weight,
    a1_characteristic,
    ap_characteristic,
    default_balls,
    is_ap_power,
    origin_balls,
    weight_from_spec,
)

logger = logging.getLogger(__name__)

# Offset added to gamma by the scaling experiment to show the relation is necessary.
GAMMA_SHIFT = 0.1


# ============================================================================
# RESULTS LOG
# ============================================================================

class ResultsLogger:
    """Write experiment records as JSON lines and summarize them."""

    def __init__(self, log_file: str = "results.jsonl", fresh: bool = True):
        self.log_file = Path(log_file)
        self.log_file.parent.mkdir(parents=True, exist_ok=True)
        if fresh:
            self.log_file.write_text("")

    def log_record(self, record: Dict[str, Any]) -> None:
        """Append one record; keys are sorted so identical runs give identical files."""
        with open(self.log_file, "a") as f:
            f.write(json.dumps(_jsonable(record), sort_keys=True) + "\n")

    def get_result_stats(self) -> Dict[str, Any]:
        """Totals by verdict, by experiment and by provenance."""
        if not self.log_file.exists():
            return {}

        stats = {
            "total_records": 0,
            "by_verdict": {"pass": 0, "fail": 0, "quantity": 0},
            "by_experiment": {},
            "by_provenance": {},
        }

        with open(self.log_file, "r") as f:
            for line in f:
                entry = json.loads(line)
                stats["total_records"] += 1

                if entry["kind"] == "quantity":
                    verdict = "quantity"
                else:
                    verdict = "pass" if entry["passed"] else "fail"
                stats["by_verdict"][verdict] += 1

                experiment = entry["experiment"]
                stats["by_experiment"][experiment] = stats["by_experiment"].get(experiment, 0) + 1

                provenance = entry["provenance"]
                stats["by_provenance"][provenance] = stats["by_provenance"].get(provenance, 0) + 1

        return stats


# ============================================================================
# REPORT BUNDLE
# ============================================================================

@dataclass
class ReportBundle:
    """Every report of one run plus its plot-ready series."""
    experiment: str
    seed: int
    reports: List[VerificationReport] = field(default_factory=list)
    series: Dict[str, pd.DataFrame] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def records(self) -> List[Dict[str, Any]]:
        records = []
        for report in self.reports:
            for record in report.to_records():
                records.append({"experiment": self.experiment, "seed": self.seed, "kind": "check", **record})
            for name in sorted(report.quantities):
                records.append({
                    "experiment": self.experiment,
                    "seed": self.seed,
                    "kind": "quantity",
                    "report": report.title,
                    "provenance": report.provenance,
                    "name": name,
                    "value": report.quantities[name],
                })
        return records

    def table(self) -> pd.DataFrame:
        rows = [
            {
                "report": report.title,
                "check": check.name,
                "empirical": check.empirical,
                "bound": check.bound,
                "tolerance": check.tolerance,
                "passed": check.passed,
                "provenance": report.provenance,
            }
            for report in self.reports
            for check in report.checks
        ]
        return pd.DataFrame(rows, columns=["report", "check", "empirical", "bound", "tolerance", "passed",
                                           "provenance"])

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        results = ResultsLogger(str(out / "results.jsonl"))
        for record in self.records():
            results.log_record(record)
        self.table().to_csv(out / "tables.csv", index=False, float_format="%.12g")
        series_dir = out / "series"
        series_dir.mkdir(exist_ok=True)
        for name, frame in sorted(self.series.items()):
            frame.to_csv(series_dir / f"{name}.csv", index=False, float_format="%.12g")
        return out


def _series(x, values) -> pd.DataFrame:
    return pd.DataFrame({"x": np.asarray(x, dtype=float), "value": np.asarray(values, dtype=float)})


# ============================================================================
# CONFIG HELPERS
# ============================================================================

def _kernel(config: ExperimentConfig) -> Kernel:
    return kernel_from_spec(config.kernel.as_dict())


def _weight(spec) -> Weight:
    return ConstantWeight() if spec is None else weight_from_spec(spec.as_dict())


def _exps(config: ExperimentConfig) -> ExponentSet:
    return config.exponents.to_exponent_set()


def _beta(config: ExperimentConfig) -> float:
    if config.exponents is not None:
        return config.exponents.beta
    if config.kernel is not None and config.kernel.beta is not None:
        return config.kernel.beta
    return 0.0


def _log_grid(config: ExperimentConfig) -> LogGrid:
    return make_log_grid(config.grid.r_min, config.grid.r_max, config.grid.n_per_side)


def _uniform_grid(config: ExperimentConfig) -> UniformGrid:
    return UniformGrid(config.grid.half_width, config.grid.n_uniform)


def _zero(x):
    return np.zeros_like(x)


def _indicator(width: float) -> ClosedForm:
    return ClosedForm(lambda x: (np.abs(x) <= width).astype(float), (width,), "indicator", (("width", width),))


def _family(config: ExperimentConfig, direction: Direction = Direction.INCREASING) -> List[FunctionLike]:
    spec = config.family
    if spec.kind is FamilyKind.EXTREMAL:
        if config.exponents is None:
            raise DomainError("extremal families need exponents")
        return list(near_extremal_family(_exps(config), spec.epsilons, direction))
    if spec.kind is FamilyKind.GAUSSIAN:
        return [gaussian(w) for w in spec.widths]
    if spec.kind is FamilyKind.ODD_GAUSSIAN:
        return [gaussian_derivative(1, w) for w in spec.widths]
    if spec.kind is FamilyKind.INDICATOR:
        return [_indicator(w) for w in spec.widths]
    return [ClosedForm(_zero, (), "zero")]


def _hardy_family(config: ExperimentConfig) -> List[FunctionLike]:
    """Hardy-space experiments need vanishing moments; extremal families fall back to Gaussian derivatives."""
    if config.family.kind is FamilyKind.EXTREMAL:
        return hermite_family()
    return _family(config)


def _a_grid(config: ExperimentConfig) -> Sequence[float]:
    return tuple(config.family.a_grid) if config.family.a_grid else DEFAULT_A_GRID


def _maximal_config(config: ExperimentConfig) -> MaximalConfig:
    return MaximalConfig(grid=_uniform_grid(config))


ExperimentResult = Tuple[List[VerificationReport], Dict[str, pd.DataFrame]]


# ============================================================================
# EXPERIMENTS
# ============================================================================

def run_apply(config: ExperimentConfig) -> ExperimentResult:
    k, beta = _kernel(config), _beta(config)
    f = _family(config)[0]
    grid = _log_grid(config)
    image = apply_on_grid(k, beta, f, grid, config.tolerances.empirical)
    report = VerificationReport("apply", "definition of the fractional Hausdorff operator")
    report.quantities.update({"beta": beta, "function": f.describe() if hasattr(f, "describe") else "f",
                              **k.describe()})
    report.add("divergent_nodes", float(image.divergent.sum()), bound=0.0)
    if config.points:
        points = apply_at(k, beta, f, config.points, config.tolerances.empirical)
        report.quantities["points"] = list(config.points)
        report.quantities["values"] = points.values.tolist()
    return [report], {"image": _series(grid.nodes, image.values)}


def run_norms(config: ExperimentConfig) -> ExperimentResult:
    exps = _exps(config)
    w = _weight(config.v)
    report = VerificationReport("norms", "weighted strong and weak Lebesgue norms")
    strong_values, weak_values = [], []
    for i, f in enumerate(_family(config)):
        strong = weighted_lp_norm(f, w, exps.p, config.tolerances.quadrature)
        weak = weak_lp_norm(f, w, exps.p)
        strong_values.append(strong.value)
        weak_values.append(weak.value)
        report.add(f"chebyshev[{i}]", weak.value, bound=strong.value,
                   tolerance=config.tolerances.verdict * strong.value, divergent=strong.divergent)
    index = np.arange(len(strong_values))
    return [report], {"strong": _series(index, strong_values), "weak": _series(index, weak_values)}


def run_constants(config: ExperimentConfig) -> ExperimentResult:
    exps, k = _exps(config), _kernel(config)
    u, v = _weight(config.u), _weight(config.v)
    report = VerificationReport("constants", "two-weight constants A, B and the kernel constant K")
    report.quantities.update(exps.describe())
    for name, compute in (("A", A_constant), ("B", B_constant)):
        try:
            value, maximizer = compute(u, v, exps)
        except DomainError as exc:
            report.quantities[f"{name}_skipped"] = str(exc)
            continue
        report.add(name, value.value, passed=not value.divergent, maximizer=maximizer,
                   divergent=value.divergent)
    try:
        kernel_k = k_constant(k, exps.beta, exps.q)
        report.add("K", kernel_k.value, passed=not kernel_k.divergent, divergent=kernel_k.divergent,
                   tail_dominates=kernel_k.detail.get("tail_dominates", False))
    except DomainError as exc:
        report.quantities["K_skipped"] = str(exc)
    try:
        general = k_general(k, exps.s, exps.q, exps.gamma)
        report.add("K_general", general.value, passed=not general.divergent, s=exps.s,
                   divergent=general.divergent)
    except DomainError as exc:
        report.quantities["K_general_skipped"] = str(exc)
    return [report], {}


def _sandwich(config: ExperimentConfig, direction: Direction) -> ExperimentResult:
    exps, k = _exps(config), _kernel(config)
    u, v = _weight(config.u), _weight(config.v)
    bounds = KernelBounds(**config.bounds)
    family = _family(config, direction)
    if direction is Direction.INCREASING:
        sandwich = verify_sandwich_increasing(k, bounds, exps.beta, u, v, exps, family, _a_grid(config),
                                              config.tolerances.verdict)
        report = sandwich.to_report("verify_increasing", "two-weight theorem for increasing weights")
    else:
        sandwich = verify_sandwich_decreasing(k, bounds, exps.beta, u, v, exps, family, _a_grid(config),
                                              config.tolerances.verdict)
        report = sandwich.to_report("verify_decreasing", "two-weight theorem for decreasing weights")
    report.quantities.update({"lower": sandwich.lower, "empirical": sandwich.empirical, "upper": sandwich.upper})
    growth = weight_growth_check(u, v, exps, direction, tol=config.tolerances.verdict)
    return [report, growth], {}


def run_verify_increasing(config: ExperimentConfig) -> ExperimentResult:
    return _sandwich(config, Direction.INCREASING)


def run_verify_decreasing(config: ExperimentConfig) -> ExperimentResult:
    return _sandwich(config, Direction.DECREASING)


def run_hardy_ineq(config: ExperimentConfig) -> ExperimentResult:
    exps = _exps(config)
    direction = Direction.INCREASING if config.direction == "inner" else Direction.DECREASING
    sandwich = hardy_inequality_check(_weight(config.u), _weight(config.v), exps, config.direction,
                                      _family(config, direction), _a_grid(config), config.tolerances.verdict)
    report = sandwich.to_report(f"hardy_{config.direction}", "two-weight Hardy inequality")
    report.quantities.update({"lower": sandwich.lower, "empirical": sandwich.empirical, "upper": sandwich.upper})
    return [report], {}


def run_young(config: ExperimentConfig) -> ExperimentResult:
    grid = _log_grid(config)
    reports = []
    for i, (f, g, p, q, s) in enumerate(seeded_young_pairs(config.seed, config.family.count, grid)):
        report = young_mult_check(f, g, p, q, s, tol=1e-6)
        report.title = f"young_mult[{i}]"
        reports.append(report)
    return reports, {}


def run_commute(config: ExperimentConfig) -> ExperimentResult:
    k = _kernel(config)
    grid = _uniform_grid(config)
    f = _family(config)[0]
    betas = config.betas or [_beta(config)]
    reports = [commutation_check(k, beta, f, grid, tol=config.tolerances.verdict, check_refinement=True)
               for beta in betas]
    for report, beta in zip(reports, betas):
        report.title = f"commutation[beta={beta:g}]"
    odd = gaussian_derivative(1)(grid.nodes)
    reports.append(hilbert_identity_report(grid, odd))
    return reports, {}


def _phi_profile(k: Kernel, grid: UniformGrid) -> SmoothProfile:
    if isinstance(k, GaussianHat):
        return SmoothProfile.from_kernel(k)
    x = grid.nodes
    samples = k.values(np.where(x == 0, grid.step, x))
    spectrum = np.real(fourier_transform(grid, samples, check_decay=False))
    frequency_grid = UniformGrid(grid.n / (4 * grid.half_width), grid.n)
    return SmoothProfile.spectral(frequency_grid, spectrum, f"spectral[{k.name}]")


def run_hypotheses(config: ExperimentConfig) -> ExperimentResult:
    k = _kernel(config)
    m = config.m
    phi = hypothesis_integrals_phi(_phi_profile(k, _uniform_grid(config)), m)
    reports = [phi.to_report("integrability of the derivatives of Phi^")]
    if isinstance(k, GaussianHat):
        g = hypothesis_integrals_g(SmoothProfile.radial_of_kernel(k), m)
        reports.append(g.to_report("integrability of the radial profile of Phi^"))
    if config.p0 is not None and config.exponents is not None:
        condition = hypothesis_integral_21(k, _exps(config), config.p0)
        reports.append(condition.to_report("power-weighted integrability of Phi"))
    return reports, {}


def run_decay(config: ExperimentConfig) -> ExperimentResult:
    k = _kernel(config)
    if not isinstance(k, GaussianHat):
        raise DomainError("the decay probe needs an analytic transform (gaussian_hat kernel)")
    report = kernel_decay_probe(SmoothProfile.from_kernel(k), _beta(config), m=config.m)
    x = report.quantities["x"]
    return [report], {"decay": _series(x, report.quantities["sup"])}


def run_scaling(config: ExperimentConfig) -> ExperimentResult:
    exps, k = _exps(config), _kernel(config)
    f = _family(config)[0]
    scales = config.scales or [0.5, 1.0, 2.0, 4.0]
    report = exponent_relation_probe(k, exps.beta, exps.p, exps.q, exps.alpha, exps.gamma, f, scales)

    # gamma + 0.1 moves the residual by -0.1/q and must fail the relation check.
    moved = exponent_relation_probe(k, exps.beta, exps.p, exps.q, exps.alpha, exps.gamma + GAMMA_SHIFT, f, scales)
    residual = moved.quantities["residual"]
    shifted = report.quantities["residual"] - GAMMA_SHIFT / exps.q
    perturbed = VerificationReport("scaling_perturbed", moved.provenance)
    perturbed.quantities.update(moved.quantities)
    perturbed.quantities["gamma_shift"] = GAMMA_SHIFT
    perturbed.add("relation_rejected", abs(residual), bound=1e-3, passed=not moved.passed)
    perturbed.add("residual_shift", abs(residual - shifted), bound=1e-3, signed=residual, expected=shifted)
    return [report, perturbed], {}


def run_dilation(config: ExperimentConfig) -> ExperimentResult:
    cfg = _maximal_config(config)
    reports = []
    for p in config.p_values or [1.0]:
        for a in config.a_values or [0.0]:
            # Enough vanishing moments for |M f|^p |x|^a to be integrable with room to spare.
            if config.family.kind is FamilyKind.EXTREMAL:
                f = gaussian_derivative(required_order(p, a))
            else:
                f = _family(config)[0]
            for s in config.scales or [0.25, 4.0]:
                report = dilation_invariance_check(f, s, p, a, cfg, config.tolerances.verdict)
                report.title = f"dilation[s={s:g},p={p:g},a={a:g}]"
                reports.append(report)
    return reports, {}


def run_ap(config: ExperimentConfig) -> ExperimentResult:
    w = _weight(config.v)
    reports = []
    for p in config.p_values or [2.0]:
        balls = default_balls()
        result = a1_characteristic(w, balls) if p == 1 else ap_characteristic(w, p, balls)
        report = VerificationReport(f"ap[p={p:g}]", "Muckenhoupt characteristic")
        report.quantities.update({"p": p, "balls_probed": result.balls_probed, "worst_ball": result.worst_ball,
                                  **w.describe()})
        # For power weights the verdict is agreement with the closed-form membership.
        expected = is_ap_power(w.a, p) if isinstance(w, PowerWeight) else True
        report.add("characteristic", result.characteristic, passed=(not result.divergent) == expected,
                   divergent=result.divergent, member=expected)
        if isinstance(w, PowerWeight) and not result.divergent:
            near = _origin_characteristic(w, p, origin_balls(1e-3, 1e3))
            far = _origin_characteristic(w, p, origin_balls(1e-2, 1e4))
            report.add("dilation_invariance", abs(far - near) / near, bound=1e-4)
        reports.append(report)
    return reports, {}


def _origin_characteristic(w: Weight, p: float, balls) -> float:
    result = a1_characteristic(w, balls) if p == 1 else ap_characteristic(w, p, balls)
    return result.characteristic


def run_power_bound(config: ExperimentConfig) -> ExperimentResult:
    exps, k = _exps(config), _kernel(config)
    report = power_weight_bound_check(k, exps.beta, exps, _family(config), config.tolerances.verdict)
    return [report], {}


def run_weak_hardy(config: ExperimentConfig) -> ExperimentResult:
    cfg = _maximal_config(config)
    family = _hardy_family(config)
    reports, series = [], {}
    for p in config.p_values or [1.0]:
        for a in config.a_values or [0.0]:
            report = VerificationReport(f"weak_hardy[p={p:g},a={a:g}]", "weak and strong weighted Hardy quasi-norms")
            strong = hardy_quasi_norm(family[0], a, p, cfg)
            weak = weak_hardy_quasi_norm(family[0], a, p, cfg)
            report.quantities.update({"strong": strong.value, "weak": weak.value})
            report.add("weak_below_strong", weak.value, bound=strong.value,
                       tolerance=config.tolerances.verdict * strong.value)
            band = equivalence_band(family, a, p, cfg)
            band.title = f"equivalence_band[p={p:g},a={a:g}]"
            reports.extend([report, band])
            ratios = band.quantities["ratios"]
            series[f"equivalence_p{p:g}_a{a:g}"] = _series(np.arange(len(ratios)), ratios)
    return reports, series


EXPERIMENTS: Dict[ExperimentName, Callable[[ExperimentConfig], ExperimentResult]] = {
    ExperimentName.APPLY: run_apply,
    ExperimentName.NORMS: run_norms,
    ExperimentName.CONSTANTS: run_constants,
    ExperimentName.VERIFY_INCREASING: run_verify_increasing,
    ExperimentName.VERIFY_DECREASING: run_verify_decreasing,
    ExperimentName.HARDY_INEQ: run_hardy_ineq,
    ExperimentName.YOUNG: run_young,
    ExperimentName.COMMUTE: run_commute,
    ExperimentName.HYPOTHESES: run_hypotheses,
    ExperimentName.DECAY: run_decay,
    ExperimentName.SCALING: run_scaling,
    ExperimentName.DILATION: run_dilation,
    ExperimentName.AP: run_ap,
    ExperimentName.POWER_BOUND: run_power_bound,
    ExperimentName.WEAK_HARDY: run_weak_hardy,
}


def run(config: ExperimentConfig, write: bool = True) -> ReportBundle:
    """
    Dispatch to the configured experiment and, unless ``write`` is False,
    write its outputs under ``config.output_dir``.

    Raises:
        HausdorffError: surfaced unchanged from the numerical modules
    """
    logger.info("running experiment '%s' (seed %d)", config.experiment.value, config.seed)
    reports, series = EXPERIMENTS[config.experiment](config)
    bundle = ReportBundle(config.experiment.value, config.seed, reports, series)
    if write:
        bundle.write(config.output_dir)
    return bundle


# ============================================================================
# COMMAND LINE
# ============================================================================

def _print_bundle(bundle: ReportBundle, out_dir: Optional[str]) -> None:
    print("\n" + "=" * 80)
    print(f"EXPERIMENT: {bundle.experiment}")
    print("=" * 80)
    for report in bundle.reports:
        print(f"\n{report.title}  ({report.provenance})")
        for check in report.checks:
            mark = "✓" if check.passed else "✗"
            bound = "" if check.bound is None else f"  (bound {check.bound:.6g})"
            print(f"  {mark} {check.name}: {check.empirical:.6g}{bound}")
    print("\n" + "-" * 80)
    print(f"{'ALL CHECKS PASSED' if bundle.passed else 'SOME CHECKS FAILED'}")
    if out_dir:
        print(f"Results written to {out_dir}")


def _print_validation_error(exc: ValidationError) -> None:
    print("\n✗ Invalid experiment config")
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "<config>"
        print(f"  {location}: {error['msg']}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Numerical experiments for fractional Hausdorff operators")
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="Run one experiment config")
    run_cmd.add_argument("--config", type=Path, required=True)
    run_cmd.add_argument("--out", type=str, default=None, help="Output directory (overrides the config)")
    run_cmd.add_argument("--seed", type=int, default=None, help="Seed for randomized families")
    run_cmd.add_argument("--verbose", action="store_true")

    sub.add_parser("list", help="List experiment names")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "list":
        for name in ExperimentName:
            print(f"{name.value:24s} {EXPERIMENT_DESCRIPTIONS[name]}")
        return 0

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)

    try:
        config = load_config(args.config, seed=args.seed, output_dir=args.out)
    except ValidationError as exc:
        _print_validation_error(exc)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"\n✗ Cannot read config {args.config}: {exc}")
        return 2

    try:
        bundle = run(config)
    except HausdorffError as exc:
        print(f"\n✗ Experiment '{config.experiment.value}' failed: {type(exc).__name__}: {exc}")
        return 3

    _print_bundle(bundle, config.output_dir)
    return 0 if bundle.passed else 1


if __name__ == "__main__":
    sys.exit(main())
