"""Command-line front end.

    ecspade run --preset fig1 --out results/fig1
    ecspade run --scenario my.scenario --format both
    ecspade verify

Exit codes: 0 ok, 1 verification failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import verify as verify_mod
from .errors import ConfigError, ECSpadeError, NumericalError
from .evaluation import SUMMARY_PFAS, pd_at_pfa, roc, thin
from .sim import (DETECTOR_IDS, FIG_BETAS, PRESETS, Scenario, dump_scenario, iter_sweep,
                  load_scenario)
from .svg import roc_panel

log = logging.getLogger("ecspade")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class RunConfig:
    scenario: Scenario
    betas: list
    out_dir: Path
    formats: tuple = ("csv",)
    pfa_grid: tuple = SUMMARY_PFAS
    roc_points: int = 400
    log_pfa: bool = True
    source: str = field(default="inline")


def _num(v: float) -> str:
    return format(float(v), ".17g")


def _beta(v: float) -> str:
    return repr(float(v))


def _pfa_label(p: float) -> str:
    return f"pd@{p:.0e}".replace("e-0", "e-")


def cmd_run(config: RunConfig) -> int:
    sc = config.scenario
    out = config.out_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None

    roc_rows, summary_rows = [], []
    panels: dict[float, dict[str, list]] = {}
    for pairs in iter_sweep(sc, config.betas):
        log.info("beta=%g trial=%d done", pairs.beta, pairs.trial)
        for name in sc.detectors:
            curve = roc(pairs.h0[name], pairs.h1[name])
            summary_rows.append([name, _beta(pairs.beta), str(pairs.trial), _num(curve.auc)]
                                + [_num(pd_at_pfa(curve, p)) for p in config.pfa_grid])
            small = thin(curve, config.roc_points)
            for pfa, pd in zip(small.pfa, small.pd):
                roc_rows.append([name, _beta(pairs.beta), str(pairs.trial), _num(pfa), _num(pd)])
            if "svg" in config.formats:
                panels.setdefault(pairs.beta, {}).setdefault(name, []).append(thin(curve, 300))

    (out / "scenario.txt").write_text(dump_scenario(sc, config.betas), encoding="utf-8")
    if "csv" in config.formats:
        with open(out / "roc.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["detector", "beta", "trial", "pfa", "pd"])
            w.writerows(roc_rows)
        with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["detector", "beta", "trial", "auc"]
                       + [_pfa_label(p) for p in config.pfa_grid])
            w.writerows(summary_rows)
    for beta, curves in panels.items():
        title = f"alpha={sc.alpha:g}, beta={beta:g}, T={sc.target_T:g}, nu={sc.nu:g}"
        svg = roc_panel(curves, title=title, log_pfa=config.log_pfa,
                        pfa_min=max(1e-4, 1.0 / sc.n_pairs))
        (out / f"roc_beta{beta:.2f}.svg").write_text(svg, encoding="utf-8")
    return EXIT_OK


def cmd_verify(seed: int = 0, stream=None) -> int:
    stream = stream or sys.stdout
    checks = verify_mod.run_all(seed=seed)
    for c in checks:
        print(c.line(), file=stream)
    n_fail = sum(not c.passed for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed", file=stream)
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


def _float_list(text: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _name_list(text: str) -> tuple:
    names = tuple(v.strip() for v in text.split(",") if v.strip())
    bad = [n for n in names if n not in DETECTOR_IDS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown detector(s) {bad}; choose from {', '.join(DETECTOR_IDS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecspade", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte-Carlo ROC experiment")
    src = run.add_mutually_exclusive_group()
    src.add_argument("--scenario", type=Path, help="key = value scenario file")
    src.add_argument("--preset", choices=sorted(PRESETS), help="named scenario (fig1, fig2)")
    run.add_argument("--beta", type=_float_list, help="comma-separated beta values")
    run.add_argument("--n-pairs", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--d", type=int)
    run.add_argument("--nu", type=float)
    run.add_argument("--mu-fill", type=float)
    run.add_argument("--target-T", type=float)
    run.add_argument("--alpha", type=float)
    run.add_argument("--detectors", type=_name_list)
    run.add_argument("--constrained-alpha", action="store_true", default=None,
                     help="restrict abundance fits to alpha >= 0")
    run.add_argument("--out", type=Path, default=Path("results"))
    run.add_argument("--format", choices=("csv", "svg", "both"), default="csv")
    run.add_argument("--roc-points", type=int, default=400,
                     help="resample each ROC curve to this many points in roc.csv (0 = all)")
    run.add_argument("--linear-pfa", action="store_true", help="linear pFA axis in SVG panels")

    ver = sub.add_parser("verify", help="run the oracle and invariant checks")
    ver.add_argument("--seed", type=int, default=0)
    return parser


_FLAG_FIELDS = {"n_pairs": "n_pairs", "trials": "n_trials", "seed": "seed", "d": "d",
                "nu": "nu", "mu_fill": "mu_fill", "target_T": "target_T", "alpha": "alpha",
                "detectors": "detectors", "constrained_alpha": "constrained_alpha"}


def config_from_args(args) -> RunConfig:
    if args.scenario is not None:
        scenario, betas = load_scenario(args.scenario)
        source = str(args.scenario)
    elif args.preset is not None:
        scenario, betas = PRESETS[args.preset], None
        source = args.preset
    else:
        scenario, betas = Scenario(), None
        source = "inline"
    overrides = {f: getattr(args, a) for a, f in _FLAG_FIELDS.items()
                 if getattr(args, a) is not None}
    if args.beta is not None:
        betas = args.beta
    if betas is None:
        betas = list(FIG_BETAS) if args.preset else [scenario.beta]
    scenario = dataclasses.replace(scenario, beta=betas[0], **overrides)
    for b in betas[1:]:
        dataclasses.replace(scenario, beta=b)  # validates every beta
    formats = ("csv", "svg") if args.format == "both" else (args.format,)
    return RunConfig(scenario=scenario, betas=list(betas), out_dir=args.out, formats=formats,
                     roc_points=args.roc_points, log_pfa=not args.linear_pfa, source=source)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if args.command == "verify":
        return cmd_verify(seed=args.seed)
    try:
        config = config_from_args(args)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"ecspade: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return cmd_run(config)
    except NumericalError as exc:
        print(f"ecspade: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"ecspade: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ECSpadeError, FloatingPointError) as exc:
        print(f"ecspade: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
