"""Command-line interface: simulate / fit / study / tf-limit / gnz-check.

Exit codes: 0 success, 2 usage or validation error (message names the
offending flag), 1 runtime failure. All randomness flows from --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .core import RngStream, UNIT_SQUARE, Window, load_pattern, save_pattern
from .estimation import (
    CvConfig,
    LossSpec,
    ParamGrid,
    TestFunctionSpec,
    WeightScheme,
    build_quadrature,
    fit_ppl,
    fit_tf,
    hardcore_adaptive_grid,
    innovation,
    loss as loss_value,
    ppl_error_table,
    tf_limit_experiment,
    draw_cv_round,
)
from .experiments import StudyConfig, gnz_check, run_study, scenario_config
from .models import MODEL_FAMILIES, PoissonModel, model_from_json
from .sampling import McmcConfig, sample_model

SCENARIOS = ("poisson", "hardcore", "strauss", "geyer")

_JSON_ERRORS = False


class _CliError(Exception):
    """Validation failure; carries the message shown at exit code 2."""


def _fail(message: str) -> None:
    raise _CliError(message)


def _report(message: str) -> None:
    if _JSON_ERRORS:
        print(json.dumps({"error": message}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 2 with a single diagnostic line
        _report(message)
        sys.exit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gibbscv")
    parser.add_argument(
        "--version", action="version", version=f"gibbscv {__version__}"
    )
    parser.add_argument("--json-errors", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate model realizations")
    sim.add_argument("--model", required=True, help="model JSON")
    sim.add_argument("--window", default=None, help="window JSON")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--mcmc-steps", type=int, default=100_000)
    sim.add_argument("--burn-in", type=int, default=50_000)
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--json-errors", action="store_true")

    fit = sub.add_parser("fit", help="fit a model to a pattern CSV")
    fit.add_argument("--pattern", required=True)
    fit.add_argument("--family", required=True, choices=sorted(MODEL_FAMILIES))
    fit.add_argument("--method", required=True, choices=("ppl", "tf"))
    fit.add_argument("--p", type=float, default=0.5)
    fit.add_argument("--k", type=int, default=25)
    fit.add_argument(
        "--weight", default="p", choices=("p", "p-over-1mp", "estimate")
    )
    fit.add_argument("--loss", default="l1", choices=("l1", "l2", "l3"))
    fit.add_argument("--alpha", type=float, default=1.0)
    fit.add_argument("--grid", required=True, help="grid JSON or 'adaptive'")
    fit.add_argument("--seed", type=int, required=True)
    fit.add_argument("--json-errors", action="store_true")

    study = sub.add_parser("study", help="run a simulation study")
    study.add_argument("--scenario", required=True)
    study.add_argument("--n", type=int, default=None)
    study.add_argument("--k", type=int, default=None)
    study.add_argument("--workers", type=int, default=1)
    study.add_argument("--seed", type=int, required=True)
    study.add_argument("--out", required=True)
    study.add_argument("--json-errors", action="store_true")

    lim = sub.add_parser("tf-limit", help="leave-one-out limit experiment")
    lim.add_argument("--scenario", required=True, choices=SCENARIOS)
    lim.add_argument("--k-list", required=True, help="comma-separated k values")
    lim.add_argument("--mode", required=True, choices=("mc", "block"))
    lim.add_argument("--reps", type=int, default=100)
    lim.add_argument("--seed", type=int, required=True)
    lim.add_argument("--out", required=True)
    lim.add_argument("--json-errors", action="store_true")

    gnz = sub.add_parser("gnz-check", help="mean-zero check at the truth")
    gnz.add_argument("--scenario", required=True, choices=SCENARIOS)
    gnz.add_argument("--reps", type=int, default=500)
    gnz.add_argument("--seed", type=int, required=True)
    gnz.add_argument("--json-errors", action="store_true")

    return parser


def _parse_model(text: str):
    try:
        return model_from_json(text)
    except (ValueError, KeyError) as exc:
        _fail(f"--model is not a valid model JSON: {exc}")


def _parse_window(text: str | None) -> Window:
    if text is None:
        return UNIT_SQUARE
    try:
        return Window.from_dict(json.loads(text))
    except (ValueError, KeyError, TypeError) as exc:
        _fail(f"--window is not a valid window JSON: {exc}")


def _cmd_simulate(args) -> int:
    model = _parse_model(args.model)
    window = _parse_window(args.window)
    if args.n < 1:
        _fail("--n must be at least 1")
    if args.mcmc_steps < 1 or not 0 <= args.burn_in < args.mcmc_steps:
        _fail("--burn-in must satisfy 0 <= burn-in < --mcmc-steps")
    cfg = McmcConfig(n_steps=args.mcmc_steps, burn_in=args.burn_in)
    rng = RngStream(args.seed)

    patterns = [
        sample_model(model, window, cfg, rng.child(r)) for r in range(args.n)
    ]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for r, pattern in enumerate(patterns):
        name = f"pattern_{r:03d}.csv"
        save_pattern(pattern, out / name)
        files.append(name)
    manifest = {
        "model": json.loads(args.model),
        "window": window.to_dict(),
        "seed": args.seed,
        "n": args.n,
        "mcmc_steps": args.mcmc_steps,
        "burn_in": args.burn_in,
        "files": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return 0


def _cmd_fit(args) -> int:
    if args.method == "ppl" and not 0.0 < args.p < 1.0:
        _fail(f"--p {args.p} out of (0, 1)")
    if args.k < 1:
        _fail("--k must be at least 1")
    if args.alpha < 0:
        _fail("--alpha must be non-negative")
    path = Path(args.pattern)
    if not path.exists():
        _fail(f"--pattern file {path} does not exist")
    try:
        pattern = load_pattern(path)
    except (OSError, ValueError) as exc:
        _fail(f"--pattern could not be loaded: {exc}")

    family = MODEL_FAMILIES[args.family]
    truncation = 1e6 if args.family == "hardcore" else None
    tf_spec = TestFunctionSpec(args.alpha, truncation)
    rng = RngStream(args.seed)

    if args.grid == "adaptive":
        if args.family != "hardcore":
            _fail("--grid adaptive is only defined for the hardcore family")
        quad = build_quadrature(pattern.window, pattern, 32)
        grid = hardcore_adaptive_grid(pattern, 41, quad)
    else:
        try:
            grid = ParamGrid.from_dict(json.loads(args.grid))
            grid.check_family(family)
        except (ValueError, TypeError, AttributeError) as exc:
            _fail(f"--grid is invalid: {exc}")

    if args.method == "tf":
        model = fit_tf(pattern, family, grid, tf_spec)
        quad = build_quadrature(pattern.window, pattern, 32)
        objective = abs(innovation(model, tf_spec, pattern, quad))
    else:
        cv = CvConfig("monte_carlo", args.p, args.k)
        scheme = WeightScheme(args.weight)
        ls = LossSpec(args.loss)
        model = fit_ppl(
            pattern, family, grid, cv, scheme, tf_spec, ls, rng
        )
        # same streams as fit_ppl, so the reported objective is the fitted one
        cvround = draw_cv_round(pattern, cv, rng.child(0))
        single = ParamGrid(
            family.param_names,
            tuple([getattr(model, n)] for n in family.param_names),
        )
        _, errors, nonempty = ppl_error_table(
            pattern, family, single, cvround, cv.effective_p,
            scheme, tf_spec, rng.child(1),
        )
        objective = loss_value(ls, errors[0], nonempty)

    print(
        json.dumps(
            {
                "theta_hat": {
                    n: getattr(model, n) for n in family.param_names
                },
                "objective": objective,
                "method": args.method,
            }
        )
    )
    return 0


def _load_study_config(args) -> StudyConfig:
    if args.scenario in SCENARIOS:
        cfg = scenario_config(args.scenario)
    else:
        path = Path(args.scenario)
        if not path.exists():
            _fail(
                f"--scenario must be one of {SCENARIOS} or a config file; "
                f"{path} does not exist"
            )
        try:
            cfg = StudyConfig.from_dict(json.loads(path.read_text()))
        except (ValueError, KeyError, TypeError) as exc:
            _fail(f"--scenario config file is invalid: {exc}")
    overrides = {"seed": args.seed}
    if args.n is not None:
        if args.n < 2:
            _fail("--n must be at least 2")
        overrides["n_replications"] = args.n
    if getattr(args, "k", None) is not None:
        if args.k < 1:
            _fail("--k must be at least 1")
        overrides["k"] = args.k
    return replace(cfg, **overrides)


def _cmd_study(args) -> int:
    if args.workers < 1:
        _fail("--workers must be at least 1")
    cfg = _load_study_config(args)
    result = run_study(cfg, workers=args.workers)
    result.write_csv(args.out)
    return 0


def _cmd_tf_limit(args) -> int:
    try:
        k_values = [int(v) for v in args.k_list.split(",") if v.strip()]
    except ValueError:
        _fail(f"--k-list must be comma-separated integers, got {args.k_list!r}")
    if not k_values:
        _fail("--k-list is empty")
    if args.reps < 1:
        _fail("--reps must be at least 1")
    cfg = scenario_config(args.scenario)
    mode = "monte_carlo" if args.mode == "mc" else "block"
    # bounded test function: the convergence statements assume it
    tf_spec = TestFunctionSpec(alpha=0.0)
    rows = tf_limit_experiment(
        cfg.model,
        tf_spec,
        k_values,
        args.reps,
        mode,
        RngStream(args.seed),
        mcmc=cfg.mcmc,
        n_dummy=cfg.dummy_resolution,
    )
    lines = ["k,median_abs_deviation"]
    lines += [f"{k},{med!r}" for k, med in rows]
    Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def _cmd_gnz_check(args) -> int:
    if args.reps < 30:
        _fail("--reps must be at least 30")
    cfg = scenario_config(args.scenario)
    # the inverse test function is exact for Poisson; interaction models use
    # the raw one so hard-core zeros cannot blow up the point sums
    alpha = 1.0 if isinstance(cfg.model, PoissonModel) else 0.0
    mean, se = gnz_check(
        cfg.model,
        TestFunctionSpec(alpha=alpha),
        args.reps,
        RngStream(args.seed),
        mcmc=cfg.mcmc,
    )
    print(
        json.dumps(
            {
                "scenario": args.scenario,
                "alpha": alpha,
                "reps": args.reps,
                "mean": mean,
                "se": se,
                "z": mean / se if se > 0 else float("inf"),
            }
        )
    )
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "study": _cmd_study,
    "tf-limit": _cmd_tf_limit,
    "gnz-check": _cmd_gnz_check,
}


def main(argv: list[str] | None = None) -> int:
    global _JSON_ERRORS
    argv = list(sys.argv[1:] if argv is None else argv)
    _JSON_ERRORS = "--json-errors" in argv
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits for usage errors and --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _CliError as exc:
        _report(str(exc))
        return 2
    except Exception as exc:  # runtime failure
        _report(f"{type(exc).__name__}: {exc}")
        return 1


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
