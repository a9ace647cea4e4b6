"""Command-line front end.

Subcommands::

    twomode-jc figure1          Bell-state probabilities for the eight N=1 initial states
    twomode-jc single           single-step probability over a tau grid
    twomode-jc conditional      conditional scheme: state, success probability, overlaps
    twomode-jc nonconditional   weight table and target probabilities
    twomode-jc oracle           algebraic vs brute-force cross-check batch

Settings come from ``--config FILE`` (YAML mapping whose keys are the long
flag names, dashes or underscores) and are overridden by explicit flags.
"""

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np
import yaml

from . import __version__
from .fock import ModeFockLabel, TwoModeState
from .oracle import CROSSCHECK_TOL, crosscheck_batch
from .schemes import (
    BellTarget,
    TargetState,
    conditional_overlap,
    conditional_state,
    conditional_success_probability,
    nonconditional_probability,
    nonconditional_weights,
    run_conditional_sequence,
    single_step_probability,
)
from .wigner import CouplingConfig

SCHEMES = ("figure1", "single", "conditional", "nonconditional", "oracle")

FIGURE1_STATES = ("e;1,0", "e;0,1", "e;0,0", "g;1,0", "g;0,1", "g;2,0", "g;1,1", "g;0,2")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scheme: str = "figure1"
    g1_mag: float = 1.0
    g1_phase: float = 0.0
    g2_mag: float = 1.0
    g2_phase: float = 0.0
    n_photons: int = 1
    bell_sign: str = "+"
    target: list = None
    initial: str = "e;0,0"
    tau: float = None
    tau_list: list = None
    tau_max: float = 2 * math.pi
    steps: int = 201
    cutoff: int = None
    seed: int = 0
    draws: int = 50
    jobs: int = 1
    format: str = None
    out: str = None

    def couplings(self):
        return CouplingConfig.from_polar(self.g1_mag, self.g1_phase, self.g2_mag, self.g2_phase)

    def target_state(self):
        if self.target is None:
            return BellTarget(self.n_photons, self.bell_sign)
        coeffs = np.array([complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in self.target])
        return TargetState(len(coeffs) - 1, coeffs / np.linalg.norm(coeffs))

    def tau_grid(self):
        if self.tau is not None:
            return np.array([self.tau])
        return np.linspace(0.0, self.tau_max, self.steps)

    def schedule(self):
        """Explicit ``tau_list`` or the probability-one choice ``pi / (2 sqrt(l))``."""
        if self.tau_list is not None:
            return list(self.tau_list)
        return [math.pi / (2 * math.sqrt(ell)) for ell in range(1, self.n_photons + 1)]


_FIELD_TYPES = {
    "scheme": str,
    "g1_mag": float,
    "g1_phase": float,
    "g2_mag": float,
    "g2_phase": float,
    "n_photons": int,
    "bell_sign": str,
    "target": list,
    "initial": str,
    "tau": float,
    "tau_list": list,
    "tau_max": float,
    "steps": int,
    "cutoff": int,
    "seed": int,
    "draws": int,
    "jobs": int,
    "format": str,
    "out": str,
}


def _coerce(key, value):
    kind = _FIELD_TYPES[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{key} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"{key} must be an integer")
        return value
    if kind is str:
        return str(value)
    if not isinstance(value, list):
        raise ValueError(f"{key} must be a list")
    return value


def load_config(path):
    """Read a YAML config, reporting problems with their line numbers."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark else str(path)
        raise ConfigError(f"{where}: invalid YAML ({getattr(exc, 'problem', exc)})") from None
    if root is None:
        return {}
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"{path}:{root.start_mark.line + 1}: top level must be a mapping")
    loader = yaml.SafeLoader("")
    values = {}
    for key_node, value_node in root.value:
        line = key_node.start_mark.line + 1
        key = str(key_node.value).replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{line}: unknown setting {key_node.value!r}")
        try:
            values[key] = _coerce(key, loader.construct_object(value_node, deep=True))
        except ValueError as exc:
            raise ConfigError(f"{path}:{line}: {exc}") from None
    return values


def validate(config):
    if config.scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}")
    for name in ("g1_mag", "g1_phase", "g2_mag", "g2_phase", "tau_max"):
        if not math.isfinite(getattr(config, name)):
            raise ConfigError(f"{name} must be finite")
    if config.g1_mag < 0 or config.g2_mag < 0:
        raise ConfigError("coupling magnitudes must be non-negative")
    if config.g1_mag == 0 and config.g2_mag == 0:
        raise ConfigError("at least one coupling magnitude must be non-zero")
    if config.tau is not None and not math.isfinite(config.tau):
        raise ConfigError("tau must be finite")
    if config.tau_list is not None:
        try:
            taus = [float(t) for t in config.tau_list]
        except (TypeError, ValueError):
            raise ConfigError("tau_list entries must be numbers") from None
        if not all(math.isfinite(t) for t in taus):
            raise ConfigError("tau_list entries must be finite")
        config.tau_list = taus
    if config.steps < 2 and config.tau is None:
        raise ConfigError("steps must be at least 2")
    if config.n_photons < 1:
        raise ConfigError("n_photons must be at least 1")
    if config.bell_sign not in ("+", "-", "plus", "minus"):
        raise ConfigError("bell_sign must be '+' or '-'")
    if config.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    if config.format not in (None, "csv", "records"):
        raise ConfigError("format must be 'csv' or 'records'")
    if config.scheme == "oracle" and config.draws < 1:
        raise ConfigError("draws must be at least 1")
    if config.target is not None:
        try:
            target = config.target_state()
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid target coefficients: {exc}") from None
        config.n_photons = target.N
    if config.scheme == "single":
        if config.cutoff is not None and config.cutoff < config.n_photons + 1:
            raise ConfigError(f"cutoff must be at least n_photons + 1 = {config.n_photons + 1}")
        parse_initial(config.initial)
    return config


def parse_initial(text):
    """``'e;1,0'`` -> ``('e', ModeFockLabel(1, 0))``."""
    try:
        atom, photons = text.replace(" ", "").split(";")
        n1, n2 = (int(x) for x in photons.split(","))
        if atom not in ("e", "g"):
            raise ValueError
        return atom, ModeFockLabel(n1, n2)
    except ValueError:
        raise ConfigError(f"initial state must look like 'e;1,0', got {text!r}") from None


# -- output ------------------------------------------------------------------


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12e" % value
    return str(value)


def write_csv(rows, header, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row[h]) for h in header])


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_records(records, stream):
    for record in records:
        stream.write(json.dumps(_jsonable(record), sort_keys=True) + "\n")


# -- commands ----------------------------------------------------------------


def _figure1_column(args):
    initial, taus, g1, g2 = args
    atom, label = parse_initial(initial)
    couplings = CouplingConfig(g1, g2)
    field = TwoModeState.from_dict({(label.n1, label.n2): 1.0}, cutoff=max(2, label.total + 1))
    rows = []
    for tau in taus:
        rows.append(
            {
                "tau": float(tau),
                "initial_state": initial,
                "p_plus": single_step_probability(field, atom, BellTarget(1, "+"), tau, couplings),
                "p_minus": single_step_probability(field, atom, BellTarget(1, "-"), tau, couplings),
            }
        )
    return rows


def cmd_figure1(config):
    """Rows ``(tau, initial_state, p_plus, p_minus)`` for the eight N=1 initial states."""
    couplings = config.couplings()
    taus = config.tau_grid()
    tasks = [(state, taus, couplings.g1, couplings.g2) for state in FIGURE1_STATES]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            columns = list(pool.map(_figure1_column, tasks))
    else:
        columns = [_figure1_column(task) for task in tasks]
    order = {state: i for i, state in enumerate(FIGURE1_STATES)}
    rows = [row for column in columns for row in column]
    rows.sort(key=lambda r: (order[r["initial_state"]], r["tau"]))
    return rows, ["tau", "initial_state", "p_plus", "p_minus"]


def cmd_single(config):
    atom, label = parse_initial(config.initial)
    target = config.target_state()
    cutoff = config.cutoff if config.cutoff is not None else max(target.N + 1, label.total + 1)
    field = TwoModeState.from_dict({(label.n1, label.n2): 1.0}, cutoff=cutoff)
    couplings = config.couplings()
    rows = [
        {"tau": float(tau), "probability": single_step_probability(field, atom, target, tau, couplings)}
        for tau in config.tau_grid()
    ]
    return rows, ["tau", "probability"]


def cmd_conditional(config):
    couplings = config.couplings()
    taus = config.schedule()
    N = len(taus)
    if N < 1:
        raise ConfigError("the conditional scheme needs at least one interaction time")
    field, success = run_conditional_sequence(taus, couplings)
    record = {
        "scheme": "conditional",
        "n_photons": N,
        "tau_list": taus,
        "success_probability": success,
        "success_probability_closed_form": conditional_success_probability(taus),
        "bell_plus_overlap": conditional_overlap(BellTarget(N, "+"), N, couplings),
        "bell_minus_overlap": conditional_overlap(BellTarget(N, "-"), N, couplings),
        "coefficients": [complex(c) for c in conditional_state(N, couplings).block(N)],
        "simulated_coefficients": [complex(c) for c in field.block(N)],
    }
    if config.target is not None:
        target = config.target_state()
        if target.N == N:
            record["target_overlap"] = conditional_overlap(target, N, couplings)
    return record


def cmd_nonconditional(config):
    couplings = config.couplings()
    taus = config.schedule()
    weights = nonconditional_weights(taus)
    N = config.n_photons
    records = [
        {"quantity": "weight", "two_j": k, "value": float(w)} for k, w in enumerate(weights.weights)
    ]
    records.append({"quantity": "weight_sum", "two_j": -1, "value": float(weights.weights.sum())})
    if len(taus) >= N:
        records.append(
            {"quantity": "p_plus", "two_j": N, "value": nonconditional_probability(BellTarget(N, "+"), taus, couplings)}
        )
        records.append(
            {"quantity": "p_minus", "two_j": N, "value": nonconditional_probability(BellTarget(N, "-"), taus, couplings)}
        )
        if config.target is not None:
            value = nonconditional_probability(config.target_state(), taus, couplings)
            records.append({"quantity": "p_target", "two_j": N, "value": value})
    return records, ["quantity", "two_j", "value"]


def cmd_oracle(config):
    cutoff = 8 if config.cutoff is None else config.cutoff
    report = crosscheck_batch(config.draws, seed=config.seed, cutoff=cutoff)
    records = [dict(draw, deviation=dev) for draw, dev in zip(report.draws, report.deviations)]
    summary = {
        "summary": True,
        "draws": config.draws,
        "cutoff": cutoff,
        "seed": config.seed,
        "tolerance": CROSSCHECK_TOL,
        "max_deviation": report.max_deviation,
        "worst_draw": report.worst_draw,
        "passed": report.passed,
    }
    return records, summary


# -- entry point -------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML file with default settings")
    common.add_argument("--g1-mag", type=float)
    common.add_argument("--g1-phase", type=float, help="radians")
    common.add_argument("--g2-mag", type=float)
    common.add_argument("--g2-phase", type=float, help="radians")
    common.add_argument("--n-photons", type=int)
    common.add_argument("--bell-sign", choices=["+", "-", "plus", "minus"])
    common.add_argument("--tau", type=float, help="single interaction time instead of a grid")
    common.add_argument("--tau-list", type=lambda s: [float(x) for x in s.split(",")], help="comma separated")
    common.add_argument("--tau-max", type=float)
    common.add_argument("--steps", type=int)
    common.add_argument("--cutoff", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, help="worker processes for sweeps")
    common.add_argument("--format", choices=["csv", "records"])
    common.add_argument("--out", metavar="PATH")

    parser = argparse.ArgumentParser(prog="twomode-jc", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="scheme", required=True)
    sub.add_parser("figure1", parents=[common], help="N=1 Bell probabilities vs tau")
    single = sub.add_parser("single", parents=[common], help="single-step probability vs tau")
    single.add_argument("--initial", help="initial atom-field state, e.g. 'e;1,0'")
    sub.add_parser("conditional", parents=[common], help="conditional N-step scheme")
    sub.add_parser("nonconditional", parents=[common], help="non-conditional n-step scheme")
    oracle = sub.add_parser("oracle", parents=[common], help="brute-force cross-check")
    oracle.add_argument("--draws", type=int)
    return parser


def resolve_config(args):
    values = load_config(args.config) if args.config else {}
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    values["scheme"] = args.scheme
    return validate(RunConfig(**values))


def _emit(config, default_format, rows=None, header=None, records=None):
    fmt = config.format or default_format
    stream = io.StringIO()
    if fmt == "csv":
        write_csv(rows if rows is not None else records, header, stream)
    else:
        write_records(records if records is not None else rows, stream)
    text = stream.getvalue()
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        if config.scheme == "figure1":
            rows, header = cmd_figure1(config)
            _emit(config, "csv", rows=rows, header=header)
        elif config.scheme == "single":
            rows, header = cmd_single(config)
            _emit(config, "csv", rows=rows, header=header)
        elif config.scheme == "conditional":
            record = cmd_conditional(config)
            header = [k for k, v in record.items() if not isinstance(v, list)]
            _emit(config, "records", rows=[record], header=header, records=[record])
        elif config.scheme == "nonconditional":
            rows, header = cmd_nonconditional(config)
            _emit(config, "csv", rows=rows, header=header)
        else:
            records, summary = cmd_oracle(config)
            header = list(records[0].keys())
            _emit(config, "records", rows=records, header=header, records=records + [summary])
            verdict = "PASS" if summary["passed"] else "FAIL"
            print(
                f"oracle {verdict}: max deviation {summary['max_deviation']:.3e} "
                f"(tolerance {CROSSCHECK_TOL:.0e}) over {config.draws} draws",
                file=sys.stderr,
            )
            return 0 if summary["passed"] else 1
    except (ConfigError, ValueError, OSError) as exc:
        print(f"twomode-jc: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
