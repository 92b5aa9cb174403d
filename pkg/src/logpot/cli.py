"""Command-line interface.

Every subcommand prints its result on stdout (a bare number or a JSON
report) and optionally writes a CSV artifact with ``--out``.  Floats are
written with 17 significant digits.  Failures print ``error <CODE>: <message>``
on stderr and exit with 2 (invalid input) or 3 (solver failure); a failing
suite exits with 1.

``LOGPOT_THREADS`` caps the worker threads of the numerical libraries.
"""

from __future__ import annotations

import os

if os.environ.get("LOGPOT_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
        os.environ.setdefault(_var, os.environ["LOGPOT_THREADS"])

import argparse
import json
import math
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import LogPotError, ValidationError


class InputError(ValidationError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------
def fmt(x) -> str:
    """17 significant digits; integral values print without a fraction."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def to_json(obj) -> str:
    """JSON text with every float written by :func:`fmt` (non-finite values as null)."""
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, columns) -> str:
    rows = [",".join(header)]
    for row in zip(*columns):
        rows.append(",".join(fmt(v) for v in row))
    return "\n".join(rows) + "\n"


def emit(args, report, csv=None) -> None:
    if csv is not None and getattr(args, "out", None):
        write_atomic(args.out, csv_text(*csv))
    if getattr(args, "json_out", None):
        write_atomic(args.json_out, to_json(report) + "\n")
    print(report if isinstance(report, str) else to_json(report))


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------
def _load_text(value: str, code: str) -> str:
    """Inline JSON (starting with ``{`` or ``[``) or a path to a JSON file."""
    text = value.strip()
    if text.startswith(("{", "[")):
        return text
    try:
        return Path(value).read_text()
    except OSError as exc:
        raise InputError(code, f"cannot read {value!r}: {exc.strerror}") from exc


def load_set(value: str):
    from .setgeom import IntervalUnion

    try:
        return IntervalUnion.from_json(_load_text(value, "E_SET_PARSE"))
    except LogPotError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError("E_SET_PARSE", f"malformed set: {exc}") from exc


def load_jacobi(value: str):
    from .oprl import JacobiParams

    try:
        return JacobiParams.from_json(_load_text(value, "E_JACOBI_PARSE"))
    except LogPotError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError("E_JACOBI_PARSE", f"malformed Jacobi parameters: {exc}") from exc


def load_alpha(value: str):
    from .opuc import VerblunskyParams

    try:
        return VerblunskyParams.from_json(_load_text(value, "E_ALPHA_PARSE"))
    except LogPotError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError("E_ALPHA_PARSE", f"malformed Verblunsky coefficients: {exc}") from exc


def _complex_list(data):
    out = []
    for item in data:
        if isinstance(item, (int, float)):
            out.append(complex(item))
        elif isinstance(item, str):
            out.append(parse_complex(item))
        elif isinstance(item, (list, tuple)) and len(item) == 2:
            out.append(complex(float(item[0]), float(item[1])))
        else:
            raise ValueError(f"cannot read point {item!r}")
    return out


def load_points(value: str):
    try:
        data = json.loads(_load_text(value, "E_POINTS_PARSE"))
        if isinstance(data, dict):
            data = data.get("points", data.get("z"))
        return _complex_list(data)
    except LogPotError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError("E_POINTS_PARSE", f"malformed point list: {exc}") from exc


def load_measure(value: str):
    """``{"nodes": [...], "weights": [...]}``, ``{"nodes", "log_weights"}`` or
    ``{"kind": "dyadic_atoms", "y": y, "levels": L}``."""
    from .oprl import AtomicMeasure, dyadic_atom_measure

    try:
        data = json.loads(_load_text(value, "E_MEASURE_PARSE"))
        if not isinstance(data, dict):
            raise ValueError("expected a JSON object")
        if data.get("kind") == "dyadic_atoms":
            extra = set(data) - {"kind", "y", "levels"}
            if extra:
                raise ValueError(f"unknown keys {sorted(extra)}")
            return dyadic_atom_measure(float(data["y"]), int(data.get("levels", 12)))
        extra = set(data) - {"nodes", "weights", "log_weights"}
        if extra:
            raise ValueError(f"unknown keys {sorted(extra)}")
        nodes = np.asarray(data["nodes"], dtype=float)
        if "log_weights" in data:
            logw = np.asarray(data["log_weights"], dtype=float)
        else:
            w = np.asarray(data["weights"], dtype=float)
            if np.any(w <= 0):
                raise ValueError("weights must be positive")
            logw = np.log(w)
        if nodes.shape != logw.shape:
            raise ValueError("nodes and weights differ in length")
        return AtomicMeasure(nodes, logw)
    except LogPotError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError("E_MEASURE_PARSE", f"malformed measure: {exc}") from exc


def parse_complex(text: str) -> complex:
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError("E_BAD_COMPLEX", f"cannot read complex number {text!r}") from exc


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in str(text).strip("[] ").split(",") if v.strip()]
    except ValueError as exc:
        raise InputError("E_BAD_LIST", f"cannot read integer list {text!r}") from exc


def parse_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in str(text).split(","))
    except ValueError as exc:
        raise InputError("E_BAD_RANGE", f"expected lo,hi, got {text!r}") from exc
    return lo, hi


_FAMILY_ALIASES = {"am": "almost_mathieu", "almost-mathieu": "almost_mathieu",
                   "decaying": "decaying_random", "decaying-random": "decaying_random"}


def build_family(args):
    from .ergodic import GOLDEN_FREQUENCY, ErgodicFamily

    if args.family_config:
        try:
            cfg = json.loads(_load_text(args.family_config, "E_CONFIG"))
        except ValueError as exc:
            raise InputError("E_CONFIG", f"malformed family config: {exc}") from exc
        extra = set(cfg) - {"kind", "parameters", "seed"}
        if extra:
            raise InputError("E_CONFIG", f"unknown keys {sorted(extra)}")
        params = dict(cfg.get("parameters", {}))
        if "coupling" in params:
            params["coupling"] = tuple(params["coupling"])
        kind = _FAMILY_ALIASES.get(cfg.get("kind"), cfg.get("kind"))
        return ErgodicFamily(kind, params, int(cfg.get("seed", 0)))
    kind = _FAMILY_ALIASES.get(args.family, args.family)
    params = {}
    if kind == "almost_mathieu":
        if args.lam is not None:
            params["lam"] = args.lam
        if args.freq is not None:
            params["freq"] = GOLDEN_FREQUENCY if args.freq == "golden" else float(args.freq)
        if args.theta is not None:
            params["theta"] = args.theta
    elif kind == "anderson":
        if args.range is not None:
            params["coupling"] = parse_pair(args.range)
        if args.a is not None:
            params["a"] = args.a
    elif kind == "decaying_random":
        if args.lam is not None:
            params["lam"] = args.lam
        if args.gamma is not None:
            params["gamma"] = args.gamma
    return ErgodicFamily(kind, params, args.seed)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_capacity(args):
    from .potential import capacity

    emit(args, fmt(capacity(load_set(args.set))))


def cmd_equilibrium(args):
    from .potential import equilibrium

    E = load_set(args.set)
    eq = equilibrium(E)
    xs = []
    for a, b in E.intervals:
        k = np.arange(args.grid)
        xs.append(0.5 * (a + b) - 0.5 * (b - a) * np.cos((2 * k + 1) * np.pi / (2 * args.grid)))
    x = np.concatenate(xs)
    d = eq.density(x)
    report = {"capacity": eq.capacity, "gap_zeros": list(eq.gap_zeros),
              "interval_masses": list(eq.interval_masses), "residual": eq.residual}
    emit(args, report, (["x", "density"], [x, d]))


def cmd_green(args):
    from .potential import equilibrium

    eq = equilibrium(load_set(args.set))
    z = np.array(load_points(args.points), dtype=complex)
    g = np.atleast_1d(eq.green(z))
    emit(args, {"z": list(z), "green": list(g)}, (["re", "im", "green"], [z.real, z.imag, g]))


def cmd_chebyshev(args):
    from .chebfek import chebyshev

    r = chebyshev(load_set(args.set), args.degree, restricted=args.restricted)
    emit(args, {"degree": r.degree, "restricted": r.restricted, "sup_norm": r.sup_norm,
                "coefficients": list(r.coefficients), "roots": list(r.roots),
                "equioscillation_points": list(r.equioscillation_points)})


def cmd_fekete(args):
    from .chebfek import fekete

    f = fekete(load_set(args.set), args.n)
    emit(args, {"n": args.n, "points": list(f.points), "zeta": f.zeta, "grad_norm": f.grad_norm,
                "occupation": [int(c) for c in f.occupation]})


def cmd_bounds_chain(args):
    from .chebfek import bounds_chain

    b = bounds_chain(load_set(args.set), args.degree)
    emit(args, b.as_dict())


def cmd_regularity(args):
    from .oprl import regularity_diagnostic

    r = regularity_diagnostic(load_jacobi(args.jacobi), load_set(args.set), parse_int_list(args.n))
    emit(args, r.as_dict())


def cmd_zeros(args):
    from .oprl import zero_counting

    nu = zero_counting(load_jacobi(args.jacobi), args.n)
    w = np.full(nu.n, 1.0 / nu.n)
    emit(args, {"n": nu.n, "min": nu.points[0], "max": nu.points[-1]}, (["x", "weight"], [nu.points, w]))


def cmd_stahl_totik(args):
    from .oprl import stahl_totik_scan
    from .setgeom import normalize

    mu = load_measure(args.measure)
    E = load_set(args.set) if args.set else normalize([(float(mu.nodes.min()), float(mu.nodes.max()))])
    length = stahl_totik_scan(mu, E, args.m, args.eta)
    emit(args, {"m": args.m, "eta": args.eta, "bad_length": length})


def cmd_opuc_zeros(args):
    from .opuc import opuc_zeros

    z = opuc_zeros(load_alpha(args.alpha), args.n)
    emit(args, {"n": args.n, "zeros": list(z)}, (["re", "im"], [z.real, z.imag]))


def cmd_balayage(args):
    from .opuc import balayage, circle_moments, disk_moments, opuc_zeros

    z = opuc_zeros(load_alpha(args.alpha), args.n)
    theta, F = balayage(z, args.grid)
    cm, dm = circle_moments(F, 8), disk_moments(z, 8)
    emit(args, {"n": args.n, "grid": args.grid, "max_moment_error": float(np.max(np.abs(cm - dm))),
                "circle_moments": list(cm), "disk_moments": list(dm)},
         (["theta", "F"], [theta, F]))


def cmd_lyapunov(args):
    from .ergodic import lyapunov

    fam = build_family(args)
    z = parse_complex(args.z)
    g, se = lyapunov(fam, z, args.n, args.samples, args.eps)
    emit(args, {"family": fam.kind, "z": z, "n": args.n, "samples": args.samples,
                "gamma": g, "stderr": se})


def cmd_dos(args):
    from .ergodic import density_of_states

    dos = density_of_states(build_family(args), args.n, args.samples)
    emit(args, {"n": args.n, "samples": args.samples, "points": int(dos.nodes.size),
                "min": dos.nodes[0], "max": dos.nodes[-1]}, (["x", "weight"], [dos.nodes, dos.weights]))


def cmd_thouless(args):
    from .ergodic import thouless_check

    zs = load_points(args.z_file)
    r = thouless_check(build_family(args), zs, args.n, args.samples, args.dos_n, args.eps)
    emit(args, r.as_dict())


def cmd_suite(args):
    from .suite import run_acceptance, run_regression

    if args.name == "acceptance":
        only = set(parse_int_list(args.only)) if args.only else None
        results = run_acceptance(only)
        failed = [r.number for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
        return 1 if failed else 0
    return 0 if run_regression() else 1


COMMANDS = {
    "capacity": cmd_capacity, "equilibrium": cmd_equilibrium, "green": cmd_green,
    "chebyshev": cmd_chebyshev, "fekete": cmd_fekete, "bounds-chain": cmd_bounds_chain,
    "regularity": cmd_regularity, "zeros": cmd_zeros, "stahl-totik": cmd_stahl_totik,
    "opuc-zeros": cmd_opuc_zeros, "balayage": cmd_balayage, "lyapunov": cmd_lyapunov,
    "dos": cmd_dos, "thouless": cmd_thouless, "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logpot", description="Logarithmic potential theory toolkit.")
    p.add_argument("--config", help="JSON file with a command and its options (strict keys)")
    sub = p.add_subparsers(dest="command")

    def add(name, help_, out=False, json_out=False):
        sp = sub.add_parser(name, help=help_)
        if out:
            sp.add_argument("--out", help="CSV artifact path")
        if json_out:
            sp.add_argument("--json-out", help="also write the JSON report to this path")
        return sp

    sp = add("capacity", "logarithmic capacity of an interval union")
    sp.add_argument("--set", required=True, help='JSON {"intervals": [[a, b], ...]} or a file')
    sp = add("equilibrium", "equilibrium density on a Chebyshev grid", out=True, json_out=True)
    sp.add_argument("--set", required=True)
    sp.add_argument("--grid", type=int, default=512, help="points per interval (default 512)")
    sp = add("green", "Green's function at given points", out=True, json_out=True)
    sp.add_argument("--set", required=True)
    sp.add_argument("--points", required=True, help="JSON list of numbers or [re, im] pairs")
    sp = add("chebyshev", "Chebyshev polynomial of a set", json_out=True)
    sp.add_argument("--set", required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--restricted", action="store_true", help="all roots in the set")
    sp = add("fekete", "Fekete points of a set", json_out=True)
    sp.add_argument("--set", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp = add("bounds-chain", "capacity, Chebyshev and Fekete bounds", json_out=True)
    sp.add_argument("--set", required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp = add("regularity", "finite-n regularity diagnostic", json_out=True)
    sp.add_argument("--jacobi", required=True, help='JSON {"a": [...], "b": [...]} or a file')
    sp.add_argument("--set", required=True)
    sp.add_argument("--n", required=True, help="comma-separated list of n")
    sp = add("zeros", "zeros of P_n", out=True, json_out=True)
    sp.add_argument("--jacobi", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp = add("stahl-totik", "length of the set where windows carry tiny mass", json_out=True)
    sp.add_argument("--measure", required=True)
    sp.add_argument("--set", help="default: hull of the atoms")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--eta", type=float, required=True)
    sp = add("opuc-zeros", "zeros of Phi_n", out=True, json_out=True)
    sp.add_argument("--alpha", required=True, help='JSON {"alpha": [[re, im], ...]} or a file')
    sp.add_argument("--n", type=int, required=True)
    sp = add("balayage", "circle balayage of the zeros of Phi_n", out=True, json_out=True)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--grid", type=int, default=4096)

    def family_args(sp):
        sp.add_argument("--family", default="free",
                        help="free, anderson, am (almost_mathieu), decaying_random")
        sp.add_argument("--family-config", help="JSON {kind, parameters, seed}")
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--freq", help="'golden' or a number")
        sp.add_argument("--theta", type=float)
        sp.add_argument("--range", help="anderson coupling lo,hi")
        sp.add_argument("--a", type=float, help="anderson off-diagonal constant")
        sp.add_argument("--gamma", type=float, help="decay exponent")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=1)

    sp = add("lyapunov", "Lyapunov exponent", json_out=True)
    family_args(sp)
    sp.add_argument("--z", required=True, help="e.g. 0+0.0001i")
    sp.add_argument("--n", type=int, default=100_000)
    sp.add_argument("--eps", type=float, default=1e-4, help="shift for real z")
    sp = add("dos", "density of states", out=True, json_out=True)
    family_args(sp)
    sp.add_argument("--n", type=int, default=2000)
    sp = add("thouless", "Thouless formula residuals", json_out=True)
    family_args(sp)
    sp.add_argument("--z-file", required=True)
    sp.add_argument("--n", type=int, default=10_000)
    sp.add_argument("--dos-n", type=int)
    sp.add_argument("--eps", type=float, default=1e-4)
    sp = sub.add_parser("suite", help="run the acceptance or regression suite")
    sp.add_argument("name", choices=["acceptance", "regression"])
    sp.add_argument("--only", help="comma-separated criterion numbers")
    return p


def _subparser(parser, command) -> argparse.ArgumentParser:
    action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return action.choices[command]


def _apply_config(parser, path: str) -> argparse.Namespace:
    """Turn ``{"command": ..., <option>: <value>, ...}`` into parsed arguments.

    Keys are option names with ``_`` for ``-`` (``lambda`` for the AM
    coupling); unknown keys are rejected.
    """
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError("E_CONFIG", f"cannot read {path!r}: {exc.strerror}") from exc
    except ValueError as exc:
        raise InputError("E_CONFIG", f"malformed config: {exc}") from exc
    if not isinstance(cfg, dict) or cfg.get("command") not in COMMANDS:
        raise InputError("E_CONFIG", "config needs a known 'command'")
    cfg = dict(cfg)
    command = cfg.pop("command")
    sp = _subparser(parser, command)
    options = {}
    for a in sp._actions:
        for opt in a.option_strings:
            if opt.startswith("--"):
                options[opt[2:].replace("-", "_")] = (opt, a)
    argv = [command]
    if command == "suite":
        argv.append(str(cfg.pop("name", "acceptance")))
    unknown = sorted(set(cfg) - set(options) - {"help"}) + (["help"] if "help" in cfg else [])
    if unknown:
        raise InputError("E_CONFIG", f"unknown config keys {unknown}")
    for key, value in cfg.items():
        opt, action = options[key]
        if action.nargs == 0:
            if value is True:
                argv.append(opt)
            elif value is not False:
                raise InputError("E_CONFIG", f"{key} must be true or false")
            continue
        if isinstance(value, (dict, list)):
            value = json.dumps(value)
        argv += [f"{opt}={value}"]
    return parser.parse_args(argv)


_SIGNED_VALUE_OPTIONS = ("--range", "--z", "--freq")


def _join_signed_values(argv: list[str]) -> list[str]:
    """``--range -1,1`` becomes ``--range=-1,1`` so argparse does not read ``-1,1`` as an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _SIGNED_VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_signed_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        if args.config:
            if args.command:
                raise InputError("E_CONFIG", "give either --config or a subcommand, not both")
            args = _apply_config(parser, args.config)
            args.config = None
        if not args.command:
            parser.print_help(sys.stderr)
            return 2
        status = COMMANDS[args.command](args)
        return int(status or 0)
    except LogPotError as exc:
        print(f"error {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    except (ValueError, OverflowError, FloatingPointError) as exc:
        print(f"error E_NUMERICAL: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
