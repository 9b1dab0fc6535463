"""
Command-line entry point.

Every subcommand is a thin adapter over the library. Human-readable output
goes to stdout, logs to stderr, machine formats to ``--out`` files.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import orjson
from pydantic import ValidationError

from . import __version__
from .bond import TBill
from .circuit import Circuit, GateKind, count_two_qubit_gates
from .config import configure_logging, get_settings, load_config_file
from .errors import TbillQaeError
from .qae import QaeProblem, build_qae
from .qasm import qasm_export, qasm_import
from .router import route, routed_two_qubit_count
from .scaling import (
    BACKEND_NAMES,
    DEFAULT_BACKENDS,
    emit_csv,
    emit_plot,
    fit_records,
    parse_csv,
    run_scaling,
)
from .statevector import (
    distribution_to_csv,
    estimate_and_price,
    exact_distribution,
    sample_shots,
)
from .topology import ALL_TO_ALL, BUILTIN_DEVICES, builtin_coupling_map, load_coupling_map
from .transpiler import GATE_SETS, get_gate_set, transpile

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class UsageError(Exception):
    """Bad command-line input detected after parsing."""


class _Parser(argparse.ArgumentParser):
    """
    ArgumentParser that exits 1 on bad input and records config file keys.

    ``config_keys`` maps a key (dest or option name, dashes as underscores)
    to ``(dest, is_flag)`` for every argument declared on this parser.
    """

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        self.config_keys: Dict[str, Tuple[str, bool]] = {}
        super().__init__(*args, **kwargs)

    def add_argument(self, *args: Any, **kwargs: Any) -> argparse.Action:  # type: ignore[override]
        action = super().add_argument(*args, **kwargs)
        if kwargs.get("action") not in ("help", "version"):
            is_flag = kwargs.get("action") == "store_true"
            self.config_keys[action.dest] = (action.dest, is_flag)
            for option in action.option_strings:
                self.config_keys[option.lstrip("-").replace("-", "_")] = (action.dest, is_flag)
        return action

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability {value} outside [0, 1]")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be at least 1")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _backend_list(text: str) -> List[str]:
    names = [name.strip() for name in text.split(",") if name.strip()]
    unknown = [name for name in names if name not in BACKEND_NAMES]
    if not names or unknown:
        raise argparse.ArgumentTypeError(
            f"unknown backend(s) {unknown}; choose from {','.join(BACKEND_NAMES)}"
        )
    return names


def _write(path: Path, data: bytes) -> None:
    path.write_bytes(data)
    logger.info(f"Wrote {path}")


def _dump_json(obj) -> bytes:
    return orjson.dumps(obj, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS) + b"\n"


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _circuit_from_args(args: argparse.Namespace) -> Tuple[Circuit, str]:
    if args.input is not None:
        return qasm_import(_read_text(args.input)), str(args.input)
    problem = QaeProblem(p=args.p, eval_qubits=args.eval_qubits)
    return build_qae(problem), f"qae(p={args.p}, n={args.eval_qubits})"


def _cmd_build(args: argparse.Namespace) -> int:
    circuit = build_qae(
        QaeProblem(p=args.p, eval_qubits=args.eval_qubits), swapless=not args.textbook
    )
    text = qasm_export(circuit)
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    _write(args.out, text.encode("utf-8"))
    ops = ", ".join(f"{k}={v}" for k, v in sorted(circuit.count_ops().items()))
    print(f"width: {circuit.width}")
    print(f"gates: {len(circuit)} ({ops})")
    print(f"two_qubit_gates: {count_two_qubit_gates(circuit)}")
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.input is not None:
        circuit = qasm_import(_read_text(args.input))
        n = sum(1 for g in circuit.gates if g.kind is GateKind.MEASURE)
    else:
        n = args.eval_qubits
        circuit = build_qae(QaeProblem(p=args.p, eval_qubits=n))
    problem = QaeProblem(p=args.p, eval_qubits=n)

    header = [f"tbill-qae {__version__}", f"p={args.p} eval_qubits={n}"]
    if args.shots is None:
        dist = exact_distribution(circuit, problem)
        header.append(f"exact seed={args.seed}")
    else:
        dist = sample_shots(circuit, args.shots, args.seed)
        header.append(f"shots={args.shots} seed={args.seed}")
    text = distribution_to_csv(dist, header=header)

    tbill = TBill(face_value=args.face_value, v_low=args.v_low, v_high=args.v_high)
    estimate, price = estimate_and_price(dist, tbill)
    if args.out is not None:
        _write(args.out, text.encode("utf-8"))
    else:
        sys.stdout.write(text)
    print(f"# mode={estimate!r} price=${price:.3f}")
    return EXIT_OK


def _cmd_transpile(args: argparse.Namespace) -> int:
    circuit, source = _circuit_from_args(args)
    target = get_gate_set(args.target)
    native = transpile(circuit, target)
    if args.out is not None:
        _write(args.out, qasm_export(native).encode("utf-8"))
    ops = ", ".join(f"{k}={v}" for k, v in sorted(native.count_ops().items()))
    print(f"source: {source}")
    print(f"target: {target.name}")
    print(f"gates: {len(native)} ({ops})")
    print(f"two_qubit_gates: {count_two_qubit_gates(native)}")
    return EXIT_OK


def _cmd_route(args: argparse.Namespace) -> int:
    circuit, source = _circuit_from_args(args)
    if args.coupling_map is not None:
        device = load_coupling_map(args.coupling_map)
    else:
        device = builtin_coupling_map(args.device, qubit_count=circuit.width)
    target = get_gate_set(args.target)

    routed = route(circuit, device, seed=args.seed, trials=args.trials)
    total = routed_two_qubit_count(routed, target)
    print(f"source: {source}")
    print(f"device: {device.name}")
    print(f"seed: {routed.seed}")
    print(f"trials: {routed.trials}")
    print(f"swap_count: {routed.swap_count}")
    print(f"two_qubit_gates: {total} ({target.name})")
    print(f"trial_swaps: mean {routed.mean_swaps:.3f} std {routed.std_swaps:.3f}")
    print(f"initial_layout: {list(routed.initial_layout.mapping)}")

    if args.out is not None:
        report = {
            "device": device.name,
            "source": source,
            "seed": routed.seed,
            "trials": routed.trials,
            "target": target.name,
            "swap_count": routed.swap_count,
            "two_qubit_gates": total,
            "trial_swap_counts": list(routed.trial_swap_counts),
            "initial_layout": list(routed.initial_layout.mapping),
            "final_layout": list(routed.final_layout.mapping),
            "qasm": qasm_export(routed.circuit),
        }
        _write(args.out, _dump_json(report))
    return EXIT_OK


def _cmd_scale(args: argparse.Namespace) -> int:
    if args.max < args.min:
        raise UsageError(f"--max {args.max} is below --min {args.min}")
    run = run_scaling(
        args.backends,
        n_min=args.min,
        n_max=args.max,
        trials=args.trials,
        seed=args.seed,
        p=args.p,
        workers=args.workers,
    )
    meta = run.metadata()
    fits = fit_records(run.records)

    print(f"{'backend':<10} {'n':>3} {'mean':>10} {'sem':>8} {'min':>6} {'max':>6}")
    for r in run.records:
        print(
            f"{r.backend:<10} {r.n:>3} {r.mean:>10.2f} {r.sem:>8.3f} "
            f"{r.minimum:>6.0f} {r.maximum:>6.0f}"
        )
    for cell in run.skipped:
        print(f"skipped {cell.backend} n={cell.n}: {cell.reason}")
    for backend, fit in fits.items():
        print(f"fit {backend}: {fit.describe()}")

    if args.out is not None:
        _write(args.out, emit_csv(run.records, meta).encode("utf-8"))
    if args.plot is not None:
        _write(args.plot, emit_plot(run.records, fits, meta).encode("utf-8"))
    return EXIT_OK


def _cmd_fit(args: argparse.Namespace) -> int:
    if args.input is None:
        raise UsageError("fit needs --in <csv>")
    records = parse_csv(_read_text(args.input))
    fits = fit_records(records, weighted=args.weighted)
    for backend, fit in fits.items():
        print(f"{backend}: {fit.describe()}")
    if args.out is not None:
        _write(args.out, _dump_json({b: f.model_dump() for b, f in fits.items()}))
    return EXIT_OK


def _build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, _Parser]]:
    settings = get_settings()
    parser = _Parser(prog="tbill-qae", description="T-Bill pricing with amplitude estimation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="key=value file mirroring the flags")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=settings.LOG_LEVEL.upper(),
    )

    problem = _Parser(add_help=False)
    problem.add_argument("--p", type=_probability, default=settings.DEFAULT_P)
    problem.add_argument("--eval-qubits", type=_positive_int, default=3)

    source = _Parser(add_help=False)
    source.add_argument("--in", dest="input", type=Path, help="QASM input instead of building QAE")

    seeded = _Parser(add_help=False)
    seeded.add_argument("--seed", type=_seed, default=settings.DEFAULT_SEED)

    output = _Parser(add_help=False)
    output.add_argument("--out", type=Path)

    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands: Dict[str, _Parser] = {}

    def add(name: str, handler: Callable, parents: Sequence[_Parser], help_text: str) -> _Parser:
        cmd = sub.add_parser(name, parents=list(parents), help=help_text)
        cmd.set_defaults(handler=handler)
        for parent in parents:
            cmd.config_keys.update(parent.config_keys)
        commands[name] = cmd
        return cmd

    build = add("build", _cmd_build, [problem, output], "write the QAE circuit as QASM")
    build.add_argument("--textbook", action="store_true", help="keep the inverse-QFT SWAP layer")

    simulate = add(
        "simulate", _cmd_simulate, [problem, source, seeded, output], "estimate distribution and price"
    )
    simulate.add_argument("--shots", type=_positive_int)
    simulate.add_argument("--face-value", type=float, default=1.0)
    simulate.add_argument("--v-low", type=float, default=0.0)
    simulate.add_argument("--v-high", type=float, default=1.0)

    transpile_cmd = add(
        "transpile", _cmd_transpile, [problem, source, output], "lower to a native gate set"
    )
    transpile_cmd.add_argument("--target", choices=sorted(GATE_SETS), default="superconducting")

    route_cmd = add("route", _cmd_route, [problem, source, seeded, output], "insert SWAPs for a device")
    route_cmd.add_argument(
        "--device", choices=list(BUILTIN_DEVICES) + [ALL_TO_ALL], default="yorktown"
    )
    route_cmd.add_argument("--coupling-map", type=Path)
    route_cmd.add_argument("--trials", type=_positive_int, default=settings.ROUTE_TRIALS)
    route_cmd.add_argument("--target", choices=sorted(GATE_SETS), default="superconducting")

    scale = add("scale", _cmd_scale, [seeded, output], "two-qubit count versus n")
    scale.add_argument("--backends", type=_backend_list, default=list(DEFAULT_BACKENDS))
    scale.add_argument("--min", type=_positive_int, default=1)
    scale.add_argument("--max", type=_positive_int, default=19)
    scale.add_argument("--trials", type=_positive_int, default=settings.DEFAULT_TRIALS)
    scale.add_argument("--p", type=_probability, default=settings.DEFAULT_P)
    scale.add_argument("--workers", type=_positive_int, default=settings.SCALING_WORKERS)
    scale.add_argument("--plot", type=Path)

    fit = add("fit", _cmd_fit, [source, output], "fit quadratics to a scaling CSV")
    fit.add_argument("--weighted", action="store_true", help="weight points by 1/sem^2")

    return parser, commands


_TRUE = {"1", "true", "yes", "on"}


def _apply_config(commands: Dict[str, _Parser], command: str, path: Path) -> None:
    # Config entries become parser defaults, so explicit flags still win and
    # go through the same type checks.
    config = load_config_file(path)
    cmd = commands[command]
    defaults: Dict[str, Any] = {}
    for key, value in config.items():
        known = cmd.config_keys.get(key)
        if known is None:
            logger.debug(f"Ignoring config key {key!r} for {command}")
            continue
        dest, is_flag = known
        defaults[dest] = value.strip().lower() in _TRUE if is_flag else value
    cmd.set_defaults(**defaults)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        if args.config is not None:
            if not args.config.is_file():
                raise UsageError(f"config file {args.config} not found")
            _apply_config(commands, args.command, args.config)
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"tbill-qae: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"tbill-qae: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tbill-qae: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TbillQaeError, ValidationError) as exc:
        print(f"tbill-qae: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
