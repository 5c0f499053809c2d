"""Command line front end: one subcommand per check, a text report on stdout and an optional JSON report."""
import logging
import sys
from argparse import ArgumentParser, Namespace
from os.path import abspath, dirname, join, splitext
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from hydra import compose, initialize_config_dir
from hydra.errors import HydraException
from omegaconf import DictConfig
from omegaconf.errors import OmegaConfBaseException

from data_module.grids import box_grid, capped_count, neighbourhood_grid
from data_module.system_file import SystemFile, parse_matrix, parse_numbers, split_items
from dynamics import (
    ExprFeedback,
    GridFeedback,
    chattering,
    conjugacy_residual,
    difference_family,
    drift_family,
    integrate,
    orbit_dimension,
    smooth_feedback,
    verify_conjugacy_dynamic,
)
from dynamics.feedback import check_points, sup_distance
from expressions import ExprVec, SymbolTable
from geometry import VerdictParameters, build_flag, classify_point, drift_field, linearizability_verdict
from linear_systems import brunovsky, kronecker_data, layered_canonical_form, linearly_conjugate
from models import LinearPair
from utils.common import filter_warnings, format_vector, print_config, print_key_values, print_table
from utils.errors import InputError, NumericalFailure
from utils.reports import Report, input_digest

CONFIG_DIR = join(dirname(abspath(__file__)), "config")
CONFIG_NAME = "linearize"

logger = logging.getLogger("linearize")

SYSTEM_COMMANDS = (
    "classify",
    "flag",
    "verdict",
    "residual",
    "verify",
    "chatter",
    "orbit-dim",
    "simulate",
    "smooth-feedback",
)
PAIR_COMMANDS = ("indices", "brunovsky", "conjugate-linear")


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="relative rank tolerance")
    common.add_argument("--dt", type=float, help="integration step")
    common.add_argument("--grid", type=int, help="grid points per axis of a neighbourhood")
    common.add_argument("--radius", type=float, help="box-normalized neighbourhood radius")
    common.add_argument("--seed", type=int, help="seed of every random choice")
    common.add_argument("--json", metavar="PATH", help="write a machine-readable report")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], help="raw config override")
    common.add_argument("--point", help="base point x..., u... overriding the file")
    common.add_argument("--verbose", action="store_true", help="debug logging and config echo")
    common.add_argument("--progress", action="store_true", help="progress bars for grid sweeps")

    parser = ArgumentParser(prog="linearize", description="Feedback linearizability checks of control systems")
    commands = parser.add_subparsers(dest="command", required=True)
    for name in SYSTEM_COMMANDS:
        command = commands.add_parser(name, parents=[common])
        command.add_argument("system", help="system definition file")
    for name in PAIR_COMMANDS:
        command = commands.add_parser(name, parents=[common])
        command.add_argument("system", nargs="?", help="system definition file")
        command.add_argument("--A", help="matrix rows separated by ';', entries by ','")
        command.add_argument("--B")
    commands.choices["brunovsky"].add_argument("--layered", action="store_true", help="layered state ordering")
    commands.choices["conjugate-linear"].add_argument("--A2", required=True)
    commands.choices["conjugate-linear"].add_argument("--B2", required=True)
    commands.choices["chatter"].add_argument("--l", type=int, help="number of switching periods")
    commands.choices["chatter"].add_argument("--T", type=float, help="time horizon")
    commands.choices["orbit-dim"].add_argument("--family", choices=["difference", "drift"], default="difference")
    commands.choices["simulate"].add_argument("--T", type=float, help="time horizon")
    commands.choices["simulate"].add_argument("--control", help="controls as expressions in t separated by ';'")
    commands.choices["simulate"].add_argument("--feedback", help="feedback as expressions in the states")
    commands.choices["simulate"].add_argument("--csv", metavar="PATH", help="write the trajectory as CSV")
    commands.choices["simulate"].add_argument("--plot", metavar="PATH", help="write a gnuplot script for the CSV")
    commands.choices["smooth-feedback"].add_argument("--feedback", required=True, help="feedback to sample")
    commands.choices["smooth-feedback"].add_argument("--eps", type=float, help="sup-norm tolerance")
    commands.choices["smooth-feedback"].add_argument("--kernel-width", type=float, help="initial kernel width")
    return parser


def config_overrides(args: Namespace) -> List[str]:
    overrides = []
    for key in ("tol", "dt", "grid", "radius", "seed", "l", "T", "eps", "kernel_width"):
        value = getattr(args, key, None)
        if value is not None:
            overrides.append(f"{key}={value}")
    if args.progress:
        overrides.append("progress=true")
    return overrides + list(args.set)


def load_config(overrides: Sequence[str]) -> DictConfig:
    with initialize_config_dir(config_dir=CONFIG_DIR, version_base=None):
        return compose(config_name=CONFIG_NAME, overrides=list(overrides))


def base_point(args: Namespace, system_file: SystemFile) -> Tuple[List[float], List[float]]:
    if args.point is None:
        return system_file.base_point()
    point = parse_numbers(args.point)
    n, m = len(system_file.states), len(system_file.controls)
    if len(point) != n + m:
        raise InputError(f"--point needs {n + m} numbers, got {len(point)}")
    return point[:n], point[n:]


def linear_pair(args: Namespace, system_file: Optional[SystemFile]) -> LinearPair:
    if args.A is not None or args.B is not None:
        if args.A is None or args.B is None:
            raise InputError("--A and --B must be given together")
        return LinearPair(parse_matrix(args.A), parse_matrix(args.B))
    if system_file is None:
        raise InputError("Give a system file or a pair --A, --B")
    if system_file.A is not None:
        return system_file.pair()
    x, u = base_point(args, system_file)
    return system_file.system().linear_approximation(x, u)


def time_control(texts: str) -> Callable[[float], List[float]]:
    vector = ExprVec.parse(split_items(texts, ";"), SymbolTable(["t"]))
    return lambda t: [float(v) for v in vector.evaluate({"t": t})]


def constant_control(u: Sequence[float]) -> Callable[[float], List[float]]:
    def hold(t: float) -> List[float]:
        return list(u)

    return hold


def write_gnuplot(path: str, csv_path: str, columns: int):
    with open(path, "w", encoding="utf-8") as script:
        script.write('set datafile separator ","\n')
        script.write("set key autotitle columnhead\n")
        script.write('set xlabel "t"\n')
        script.write(f'plot for [i=2:{columns}] "{csv_path}" using 1:i with lines\n')


# ========== Subcommands ==========


def run_classify(args, config, system_file) -> Dict:
    system = system_file.system()
    x, u = base_point(args, system_file)
    point_class = classify_point(
        system, x, u, config.radius, config.grid, config.tol, config.hysteresis, config.progress
    )
    return point_class.to_dict()


def run_indices(args, config, system_file) -> Dict:
    return kronecker_data(linear_pair(args, system_file), config.tol).to_dict()


def run_brunovsky(args, config, system_file) -> Dict:
    pair = linear_pair(args, system_file)
    result = layered_canonical_form(pair, config.tol) if args.layered else brunovsky(pair, config.tol)
    a_residual, b_residual = result.residual(pair)
    return {**result.to_dict(), "residual_A": a_residual, "residual_B": b_residual}


def run_conjugate_linear(args, config, system_file) -> Dict:
    first = linear_pair(args, system_file)
    second = LinearPair(parse_matrix(args.A2), parse_matrix(args.B2))
    return {
        "conjugate": linearly_conjugate(first, second, config.tol),
        "kappa_first": kronecker_data(first, config.tol).kappa,
        "kappa_second": kronecker_data(second, config.tol).kappa,
    }


def run_flag(args, config, system_file) -> Dict:
    system = system_file.system()
    x, u = base_point(args, system_file)
    state_grid = neighbourhood_grid(system, system.states, x, config.radius, config.state_grid)
    return build_flag(system, x, u, state_grid, VerdictParameters.from_config(config)).to_dict()


def run_verdict(args, config, system_file) -> Dict:
    system = system_file.system()
    x, u = base_point(args, system_file)
    return linearizability_verdict(system, x, u, VerdictParameters.from_config(config)).to_dict()


def run_residual(args, config, system_file) -> Dict:
    system = system_file.system()
    dims = system.n + system.m
    grid = capped_count(config.residual_grid, dims, config.residual_samples)
    residual = conjugacy_residual(
        system, system_file.conjugation(system), system_file.pair(), grid=grid, max_samples=None
    )
    return {"residual": residual, "grid": grid, "samples": grid**dims}


def run_verify(args, config, system_file) -> Dict:
    system = system_file.system()
    x, _ = base_point(args, system_file)
    check = verify_conjugacy_dynamic(
        system, system_file.conjugation(system), system_file.pair(), x, t_span=(0.0, config.T), dt=config.dt
    )
    return check.to_dict()


def run_chatter(args, config, system_file) -> Dict:
    system = system_file.system()
    if system_file.switch is None:
        raise InputError(f"{system_file.name} defines no switch controls")
    x, _ = base_point(args, system_file)
    first, second = (drift_field(system, row.tolist()) for row in system_file.switch)
    result = chattering(first, second, x, config.l, (0.0, config.T), config.dt, system.state_in_box)
    return {**result.to_dict(), "l": config.l, "T": config.T}


def run_orbit_dim(args, config, system_file) -> Dict:
    system = system_file.system()
    x, u = base_point(args, system_file)
    family = difference_family(system, u) if args.family == "difference" else drift_family(system, u)
    dimension = orbit_dimension(
        family,
        x,
        probe_times=list(config.probe_times),
        rel_tol=config.orbit_tol,
        depth=config.orbit_depth,
        dt=config.flow_dt,
        inside=system.state_in_box,
        fd_step=config.fd_step,
        progress=config.progress,
    )
    return {"family": args.family, "fields": len(family), "orbit_dimension": dimension}


def run_simulate(args, config, system_file) -> Dict:
    system = system_file.system()
    x, u = base_point(args, system_file)
    if args.control is not None and args.feedback is not None:
        raise InputError("Give either --control or --feedback")
    if args.feedback is not None:
        control = ExprFeedback.parse(split_items(args.feedback, ";"), system.states)
    elif args.control is not None:
        control = time_control(args.control)
    else:
        control = constant_control(u)
    trajectory = integrate(system, x, control, (0.0, config.T), config.dt)
    csv_path = args.csv
    if args.plot is not None and csv_path is None:
        csv_path = splitext(args.plot)[0] + ".csv"
    if csv_path is not None:
        trajectory.to_csv(csv_path)
    if args.plot is not None:
        write_gnuplot(args.plot, csv_path, len(trajectory.header()))
    return trajectory.summary()


def run_smooth_feedback(args, config, system_file) -> Dict:
    system = system_file.system()
    expression = ExprFeedback.parse(split_items(args.feedback, ";"), system.states)
    if expression.m != system.m:
        raise InputError(f"Feedback has {expression.m} components for m = {system.m}")
    corners = box_grid(system, system.states, 2)
    lower, upper = corners[0], corners[-1]
    sampled = GridFeedback.sample(lambda point: expression(point).tolist(), lower, upper, config.feedback_nodes)
    smoothed = smooth_feedback(sampled, config.eps, config.kernel_width, config.check_density)
    error = sup_distance(sampled, smoothed, check_points(sampled, config.check_density))
    return {"kernel_width": getattr(smoothed, "width", 0.0), "sup_error": error, "eps": config.eps}


COMMANDS: Dict[str, Callable[[Namespace, DictConfig, Optional[SystemFile]], Dict]] = {
    "classify": run_classify,
    "indices": run_indices,
    "brunovsky": run_brunovsky,
    "conjugate-linear": run_conjugate_linear,
    "flag": run_flag,
    "verdict": run_verdict,
    "residual": run_residual,
    "verify": run_verify,
    "chatter": run_chatter,
    "orbit-dim": run_orbit_dim,
    "simulate": run_simulate,
    "smooth-feedback": run_smooth_feedback,
}


def print_report(command: str, payload: Dict):
    flat = {key: value for key, value in payload.items() if not isinstance(value, (dict, list))}
    flat.update({key: format_vector(value) for key, value in payload.items() if _is_vector(value)})
    print_key_values(flat)
    if command in ("flag", "verdict"):
        levels = payload["levels"]
        print_table(
            {
                "level": [str(level["level"]) for level in levels],
                "fields": [str(level["n_fields"]) for level in levels],
                "rank": [str(level["rank_at_point"]) for level in levels],
                "min rank": [str(level["min_rank"]) for level in levels],
                "max rank": [str(level["max_rank"]) for level in levels],
                "involutive": [str(level["involutive"]) for level in levels],
                "residual": [f"{level['worst_residual']:.3g}" for level in levels],
            }
        )
        print_key_values(payload["point_class"])
        for caveat in payload["caveats"]:
            print(f"caveat: {caveat}")


def _is_vector(value) -> bool:
    return isinstance(value, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)


def run(argv: Sequence[str]) -> int:
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as error:
        return 0 if error.code in (0, None) else 2
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
    if not args.verbose:
        filter_warnings()

    try:
        config = load_config(config_overrides(args))
        if args.verbose:
            print_config(config, ["hydra"])
        inputs: List = [" ".join(argv)]
        system_file = None
        if args.system is not None:
            system_file = SystemFile.read(args.system)
            with open(args.system, "rb") as raw:
                inputs.append(raw.read())
        report = Report(list(argv), input_digest(inputs), {}, Report.tolerances_of(config))
        report.payload = COMMANDS[args.command](args, config, system_file)
        report.finish()
    except (HydraException, OmegaConfBaseException) as error:
        print(f"error: invalid configuration: {error}", file=sys.stderr)
        return 2
    except InputError as error:
        print(f"error: {type(error).__name__}: {error}", file=sys.stderr)
        return 2
    except NumericalFailure as error:
        print(f"error: {type(error).__name__}: {error}", file=sys.stderr)
        return 3

    print_report(args.command, report.payload)
    if args.json is not None:
        report.write(args.json)
    logger.debug(f"{args.command} finished in {report.wall_time:.3f}s")
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
