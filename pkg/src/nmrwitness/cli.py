"""Command-line entry point.

Subcommands cover the three reference experiments (fig2, fig3, fig4), a custom
analysis mode, and a state-document validator.  Exit codes: 0 success,
2 validation failure, 3 optimizer failure, 4 cross-check failure.
"""

import argparse
import dataclasses
import json
import os
import sys

from .correlations import OptimizerConfig
from .errors import (
    BadDistribution,
    BadIndex,
    EpsilonMismatch,
    NotAState,
    OptimizerFailure,
    SequenceMismatch,
    UnknownKind,
)
from .harness import (
    DEFAULT_NOISE_LEVEL,
    CrossCheckFailure,
    ExperimentConfig,
    run_experiment,
    validate_state_doc,
)
from .nmr import SpinSystemParams

OUT_DIR_ENV = "NMRWITNESS_OUT"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_OPTIMIZER = 3
EXIT_CROSS_CHECK = 4

_VALIDATION_ERRORS = (NotAState, BadDistribution, EpsilonMismatch, BadIndex,
                      UnknownKind, SequenceMismatch, ValueError, KeyError)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epsilon", type=float, default=None,
                        help="override the high-temperature expansion parameter")
    parser.add_argument("--normalization", choices=("raw", "thermal"), default="thermal")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--config", default=None,
                        help="JSON file with config field overrides")
    parser.add_argument("--pulse-level", action="store_true",
                        help="simulate preparation and circuit at pulse level")
    parser.add_argument("--noise", nargs="?", type=float, const=DEFAULT_NOISE_LEVEL,
                        default=None, metavar="LEVEL",
                        help="enable preparation-noise injection (default level "
                             f"{DEFAULT_NOISE_LEVEL})")
    parser.add_argument("--timing", action="store_true",
                        help="also write wall-clock timing (non-deterministic)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmrwitness",
        description="Two-qubit correlation-witness and discord simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("fig2", "fig3", "fig4"):
        p = sub.add_parser(name, help=f"reproduce the {name} data tables")
        _add_common(p)
    p_custom = sub.add_parser("custom", help="analyze a user-supplied state")
    p_custom.add_argument("state", help="JSON file with a state document")
    _add_common(p_custom)
    p_val = sub.add_parser("validate", help="validate a state document")
    p_val.add_argument("state", help="JSON file with a state document")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)

    param_fields = {f.name for f in dataclasses.fields(SpinSystemParams)}
    param_overrides = {k: v for k, v in overrides.pop("params", {}).items()
                       if k in param_fields}
    if args.epsilon is not None:
        param_overrides["epsilon"] = args.epsilon
    params = dataclasses.replace(SpinSystemParams(), **param_overrides)

    opt_fields = {f.name for f in dataclasses.fields(OptimizerConfig)}
    opt_overrides = {k: v for k, v in overrides.pop("optimizer", {}).items()
                     if k in opt_fields}
    optimizer = dataclasses.replace(OptimizerConfig(), **opt_overrides)

    out_dir = args.out or os.environ.get(OUT_DIR_ENV)
    config = ExperimentConfig(
        experiment=args.command,
        seed=args.seed,
        normalization=args.normalization,
        noise_level=args.noise,
        pulse_level=args.pulse_level,
        optimizer=optimizer,
        params=params,
        out_dir=out_dir,
        write_timing=args.timing,
    )
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    extra = {k: v for k, v in overrides.items() if k in known}
    if "state_kinds" in extra:
        extra["state_kinds"] = tuple(extra["state_kinds"])
    if "direction_seeds" in extra:
        extra["direction_seeds"] = tuple(extra["direction_seeds"])
    return dataclasses.replace(config, **extra)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "validate":
        try:
            with open(args.state) as fh:
                doc = json.load(fh)
            info = validate_state_doc(doc)
        except _VALIDATION_ERRORS as exc:
            print(f"invalid state: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        print(json.dumps(info, indent=2, sort_keys=True))
        return EXIT_OK

    try:
        config = _config_from_args(args)
        state_doc = None
        if args.command == "custom":
            with open(args.state) as fh:
                state_doc = json.load(fh)
        report = run_experiment(config, state_doc)
    except OptimizerFailure as exc:
        print(f"optimizer failure: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER
    except CrossCheckFailure as exc:
        print(f"cross-check failure: {exc}", file=sys.stderr)
        return EXIT_CROSS_CHECK
    except _VALIDATION_ERRORS as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
