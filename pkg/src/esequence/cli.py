"""Command-line driver: ``esequence <command> [options]``.

Every command writes machine-readable records, either JSON lines (each with
``"schema": 1``) or CSV with a fixed header per command.  Big integers are
decimal strings and rationals are ``"p/q"`` strings.

Exit codes: 0 ok, 1 verification violation, 2 usage error, 3 bit-cap abort,
4 continued-fraction precision exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterator

from .core import BitCapExceeded, default_bit_cap, split_identity_check
from .criteria import (
    CriterionError,
    residue_product_sweep,
    shifted_product_bounds_check,
    sturmian_verdict,
    trajectory_diagnostics,
)
from .generators import GeneratorSpec
from .periodic import PeriodicSpec, decide, enumerate_specs
from .solver import DEFAULT_THRESHOLD, omega_limit, powers_of_two
from .theta import PrecisionExhausted, Theta
from .trajectory import descent_to_one, e_sequence_of, matthews_watts_check
from .verdict import Verdict

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BIT_CAP = 3
EXIT_PRECISION = 4

CSV_HEADERS = {
    "trajectory": ["k", "x", "a", "b", "B"],
    "omega": ["record", "n", "x0", "verdict", "witness", "depth", "converged_at", "generator"],
    "periodic": ["spec", "l", "r", "s", "B_r", "verdict", "witness", "criterion", "x_cycle", "x0_candidate"],
    "sweep-periodic": ["spec", "l", "r", "s", "B_r", "verdict", "witness", "criterion", "x_cycle", "x0_candidate"],
    "sturmian": ["record", "theta", "verdict", "criterion", "n", "value", "s", "r", "case"],
    "verify": ["suite", "n_max", "checked", "status", "counterexample"],
}


class UsageError(ValueError):
    pass


# configuration ---------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    generator: str | None = None
    max_n: int = 1024
    threshold: int = DEFAULT_THRESHOLD
    format: str = "json"
    output: str = "-"
    bit_cap: int = field(default_factory=default_bit_cap)
    stride: str = "pow2"
    seed: int = 0
    jobs: int = 1
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.max_n < 1:
            raise UsageError("max_n must be >= 1")
        if self.threshold < 1:
            raise UsageError("threshold must be >= 1")
        if self.bit_cap < 64:
            raise UsageError("bit_cap must be >= 64")
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        sampler(self.stride)


def parse_int(text) -> int:
    """Decimal, or ``2^k`` for powers of two."""
    if isinstance(text, int):
        return text
    text = str(text).strip()
    if text.startswith("2^"):
        return 1 << int(text[2:])
    return int(text)


def sampler(stride: str) -> Callable[[int], bool]:
    """``pow2`` samples n = 1, 2, 4, ...; an integer k samples every k-th n."""
    if stride == "pow2":
        return powers_of_two
    try:
        k = int(stride)
    except ValueError:
        raise UsageError(f"bad stride {stride!r}") from None
    if k < 1:
        raise UsageError("stride must be >= 1")
    return lambda n: n % k == 0


# output ----------------------------------------------------------------------


def encode(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    return value


class RecordWriter:
    """Write records as JSON lines or as CSV rows under a fixed header."""

    def __init__(self, command: str, fmt: str, stream):
        self.command = command
        self.fmt = fmt
        self.stream = stream
        self._csv = None
        if fmt == "csv":
            self._csv = csv.DictWriter(stream, CSV_HEADERS[command], extrasaction="ignore", restval="")
            self._csv.writeheader()

    def write(self, record: dict[str, Any]) -> None:
        if self._csv is not None:
            row = {}
            for k, v in record.items():
                v = encode(v)
                row[k] = ",".join(map(str, v)) if isinstance(v, list) else v
            self._csv.writerow(row)
        else:
            out = {"schema": SCHEMA_VERSION, "command": self.command}
            out.update({k: (v if k in _NATIVE else encode(v)) for k, v in record.items()})
            self.stream.write(json.dumps(out) + "\n")
        self.stream.flush()


# small counters stay JSON numbers; every other integer becomes a string
_NATIVE = {"k", "a", "b", "n", "l", "r", "s", "depth", "converged_at", "n_max", "checked", "index"}


def verdict_fields(v: Verdict) -> dict[str, Any]:
    return {"verdict": v.kind.value, "witness": v.witness, "criterion": v.criterion}


# commands --------------------------------------------------------------------


def cmd_trajectory(cfg: RunConfig, out: RecordWriter) -> int:
    if cfg.options.get("x") is None:
        raise UsageError("--x is required")
    x = parse_int(cfg.options["x"])
    n = int(cfg.options.get("n", cfg.max_n))
    if x < 1 or x % 2 == 0:
        raise UsageError(f"x must be odd and >= 1, got {x}")
    if n < 1:
        raise UsageError("n must be >= 1")
    traj = e_sequence_of(x, n, stop_at_one=bool(cfg.options.get("stop_at_one")))
    b = B = 0
    for k, (xk, a) in enumerate(zip(traj.values, traj.exponents), start=1):
        B = 3 * B + (1 << b)
        b += a
        if b > cfg.bit_cap:
            raise BitCapExceeded(b, cfg.bit_cap)
        out.write({"k": k, "x": xk, "a": a, "b": b, "B": B})
    return EXIT_OK


def _generator(cfg: RunConfig) -> GeneratorSpec:
    if not cfg.generator:
        raise UsageError("a generator descriptor is required")
    try:
        return GeneratorSpec.parse(cfg.generator, cfg.max_n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_omega(cfg: RunConfig, out: RecordWriter) -> int:
    gen = _generator(cfg)
    code = EXIT_OK
    try:
        report = omega_limit(gen, cfg.max_n, cfg.threshold, cfg.bit_cap, sample=sampler(cfg.stride))
    except BitCapExceeded as exc:
        report = exc.report
        code = EXIT_BIT_CAP
    for n, x0 in report.series:
        out.write({"record": "series", "n": n, "x0": x0})
    out.write(
        {
            "record": "summary",
            "generator": cfg.generator if gen.is_finite else gen.describe(),
            "n": report.depth,
            "x0": report.x0,
            "depth": report.depth,
            "converged_at": report.converged_at,
            **verdict_fields(report.verdict),
            **({"aborted": "bit-cap"} if code == EXIT_BIT_CAP else {}),
        }
    )
    return code


def periodic_record(spec: PeriodicSpec) -> dict[str, Any]:
    v = decide(spec)
    d = v.details
    return {
        "spec": d["spec"],
        "l": d["l"],
        "r": d["r"],
        "s": d["s"],
        "B_r": d["B_r"],
        **verdict_fields(v),
        "x_cycle": d.get("x_cycle"),
        "x0_candidate": d.get("x0_candidate"),
    }


def _spec_from_options(opts: dict[str, Any]) -> PeriodicSpec:
    try:
        if opts.get("spec"):
            return PeriodicSpec.parse(opts["spec"])
        if not opts.get("periodic"):
            raise UsageError("--periodic (or --spec) is required")
        return PeriodicSpec.parse(f"{opts.get('prefix') or ''};{opts['periodic']}")
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(f"malformed periodic spec: {exc}") from None


def cmd_periodic(cfg: RunConfig, out: RecordWriter) -> int:
    spec = _spec_from_options(cfg.options)
    if spec.b_l + 2 * spec.s > cfg.bit_cap:
        raise BitCapExceeded(spec.b_l + 2 * spec.s, cfg.bit_cap)
    out.write(periodic_record(spec))
    return EXIT_OK


def _sweep_one(args: tuple[PeriodicSpec, int]) -> dict[str, Any]:
    spec, cap = args
    if spec.b_l + 2 * spec.s > cap:
        return {"spec": spec.describe(), "l": spec.l, "r": spec.r, "s": spec.s, "verdict": "Aborted"}
    return periodic_record(spec)


def cmd_sweep_periodic(cfg: RunConfig, out: RecordWriter) -> int:
    opts = cfg.options
    l_max, r_max, t_max = (int(opts.get(k, 0)) for k in ("l_max", "r_max", "term_max"))
    if min(l_max, r_max, t_max) < 0:
        raise UsageError("sweep bounds must be >= 0")
    work = ((spec, cfg.bit_cap) for spec in enumerate_specs(l_max, r_max, t_max))
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            # map() yields in submission order, so the stream stays deterministic
            for rec in pool.map(_sweep_one, work, chunksize=64):
                out.write(rec)
    else:
        for rec in map(_sweep_one, work):
            out.write(rec)
    return EXIT_OK


def cmd_sturmian(cfg: RunConfig, out: RecordWriter) -> int:
    raw = cfg.options.get("theta") or (cfg.generator or "").removeprefix("sturmian:")
    if not raw:
        raise UsageError("--theta is required")
    try:
        theta = Theta.parse(raw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    v = sturmian_verdict(theta, cfg.max_n)
    terms = GeneratorSpec.sturmian(theta).prefix(cfg.max_n)
    name = theta.describe()
    out.write({"record": "verdict", "theta": name, **verdict_fields(v)})
    out.write({"record": "terms", "theta": name, "n": len(terms), "value": ",".join(map(str, terms))})
    cert = v.certificate
    witnesses = {w.depth: w for w in cert.parameters.get("witnesses", [])} if cert else {}
    for n, bound in cert.lower_bound_series if cert else []:
        rec = {"record": "bound", "theta": name, "n": n, "value": bound}
        w = witnesses.get(n)
        if w is not None:
            rec.update(s=w.s, r=w.r, case=w.case, x0=w.x0)
        out.write(rec)
    return EXIT_OK


# verification suites ---------------------------------------------------------


def verify_residue_product(n_max: int, seed: int) -> Iterator[tuple[bool, Any]]:
    for n, prod, bound, ok in residue_product_sweep(n_max):
        yield ok, {"n": n, "product": prod, "bound": bound}


def verify_shifted_products(n_max: int, seed: int) -> Iterator[tuple[bool, Any]]:
    for x in range(1, n_max + 1):
        for n in range(1, x + 1):
            yield shifted_product_bounds_check(x, n), {"x": x, "n": n}


def verify_positional(n_max: int, seed: int) -> Iterator[tuple[bool, Any]]:
    for x in range(1, n_max, 2):
        for rep in trajectory_diagnostics(descent_to_one(x)):
            yield not rep.contradictions, {"x": x, "n": rep.n, "failed": rep.contradictions}


def verify_split_identity(n_max: int, seed: int) -> Iterator[tuple[bool, Any]]:
    rng = random.Random(seed)
    for n in range(3, n_max + 1):
        terms = [rng.randint(1, 4) for _ in range(n)]
        for u in range(1, n - 1):
            for v in range(u, n - 1):
                yield split_identity_check(terms, u, v), {"terms": terms, "u": u, "v": v}


def verify_matthews_watts(n_max: int, seed: int, count: int = 500) -> Iterator[tuple[bool, Any]]:
    rng = random.Random(seed)
    for _ in range(count):
        x = rng.randrange(1, 1 << 60) | 1
        yield matthews_watts_check(e_sequence_of(x, n_max)), {"x": x, "n": n_max}
    for x in (7, 27):
        traj = descent_to_one(x)
        yield matthews_watts_check(traj), {"x": x, "n": len(traj)}


SUITES: dict[str, tuple[Callable, int]] = {
    "residue-product": (verify_residue_product, 2000),
    "shifted-products": (verify_shifted_products, 100),
    "positional": (verify_positional, 10_000),
    "split-identity": (verify_split_identity, 40),
    "matthews-watts": (verify_matthews_watts, 200),
}
SUITE_ALIASES = {
    "bounds45": "residue-product",
    "bounds48": "shifted-products",
    "diagnostics410": "positional",
    "split26": "split-identity",
    "mw41": "matthews-watts",
}


def cmd_verify(cfg: RunConfig, out: RecordWriter) -> int:
    name = cfg.options.get("suite")
    name = SUITE_ALIASES.get(name, name)
    if name not in SUITES:
        raise UsageError(f"unknown suite {cfg.options.get('suite')!r}; choose from {sorted(SUITES) + sorted(SUITE_ALIASES)}")
    fn, default_n = SUITES[name]
    n_max = int(cfg.options.get("n_max") or default_n)
    extra = {"count": int(cfg.options["count"])} if name == "matthews-watts" and cfg.options.get("count") else {}
    checked = 0
    for ok, case in fn(n_max, cfg.seed, **extra):
        checked += 1
        if not ok:
            out.write({"suite": name, "n_max": n_max, "checked": checked, "status": "fail",
                       "counterexample": json.dumps(encode_case(case))})
            return EXIT_VIOLATION
    out.write({"suite": name, "n_max": n_max, "checked": checked, "status": "pass", "counterexample": None})
    return EXIT_OK


def encode_case(case: dict[str, Any]) -> dict[str, Any]:
    return {k: encode(v) for k, v in case.items()}


COMMANDS = {
    "trajectory": cmd_trajectory,
    "omega": cmd_omega,
    "periodic": cmd_periodic,
    "sweep-periodic": cmd_sweep_periodic,
    "sturmian": cmd_sturmian,
    "verify": cmd_verify,
}


# argument handling -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config; command-line flags override it")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--bit-cap", dest="bit_cap", type=int, help="max b_n in bits (env ESEQ_BIT_CAP)")
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="esequence", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trajectory", parents=[common], help="odd trajectory records (k, x_k, a_k, b_k, B_k)")
    p.add_argument("--x", help="odd start")
    p.add_argument("--n", type=int, help="number of steps")
    p.add_argument("--stop-at-one", dest="stop_at_one", action="store_true", default=None)

    p = sub.add_parser("omega", parents=[common], help="track x_0^{1,n} for a generator")
    p.add_argument("--generator", help="explicit:..., periodic:..., sturmian:..., powers-of-two, squares, esequence:<x>")
    p.add_argument("--max-n", dest="max_n", type=int)
    p.add_argument("--threshold", help="divergence-evidence bound, e.g. 2^64")
    p.add_argument("--stride", help="'pow2' or an integer sampling stride")

    p = sub.add_parser("periodic", parents=[common], help="decide an eventually periodic E-sequence")
    p.add_argument("--prefix", help="non-periodic part, e.g. 1,4")
    p.add_argument("--periodic", help="repeating part, e.g. 2")
    p.add_argument("--spec", help="combined form 'prefix;period'")

    p = sub.add_parser("sweep-periodic", parents=[common], help="decide every canonical spec within bounds")
    p.add_argument("--l-max", dest="l_max", type=int)
    p.add_argument("--r-max", dest="r_max", type=int)
    p.add_argument("--term-max", dest="term_max", type=int)
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("sturmian", parents=[common], help="decide a Sturmian E-sequence")
    p.add_argument("--theta", help="log2_3, p/q, cf:1,2,2 or cf:1;2 (head;period)")
    p.add_argument("--max-n", dest="max_n", type=int)

    p = sub.add_parser("verify", parents=[common], help="run an exact verification sweep")
    p.add_argument("--suite", help=", ".join(list(SUITES) + list(SUITE_ALIASES)))
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--count", type=int, help="random starts for the matthews-watts suite")

    p = sub.add_parser("run", help="run the command named in a config file")
    p.add_argument("config_path")
    return parser


_CONFIG_FIELDS = {f.name for f in fields(RunConfig)} - {"command", "options"}


def make_config(ns: argparse.Namespace) -> RunConfig:
    """Merge a JSON config (if any) with explicitly given flags."""
    values: dict[str, Any] = {}
    cfg_path = getattr(ns, "config_path", None) or getattr(ns, "config", None)
    command = ns.command
    if cfg_path:
        try:
            raw = json.loads(Path(cfg_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {cfg_path}: {exc}") from None
        file_cmd = raw.pop("command", None)
        if command == "run":
            command = file_cmd
        elif file_cmd and file_cmd != command:
            raise UsageError(f"config is for {file_cmd!r}, not {command!r}")
        out = raw.pop("output", None)
        if isinstance(out, dict):
            raw.setdefault("format", out.get("format"))
            raw.setdefault("output", out.get("path"))
        elif out is not None:
            raw["output"] = out
        values.update({k: v for k, v in raw.items() if v is not None})
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    for k, v in vars(ns).items():
        if k not in ("command", "config", "config_path") and v is not None:
            values[k] = v
    if "threshold" in values:
        values["threshold"] = parse_int(values["threshold"])
    if "max_n" in values:
        values["max_n"] = int(values["max_n"])
    known = {k: values.pop(k) for k in list(values) if k in _CONFIG_FIELDS}
    known["stride"] = str(known.get("stride", "pow2"))
    return RunConfig(command=command, options=values, **known)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(ns)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"esequence: {exc}", file=sys.stderr)
        return EXIT_USAGE
    stream = sys.stdout if cfg.output in ("-", "") else open(cfg.output, "w", newline="")
    try:
        out = RecordWriter(cfg.command, cfg.format, stream)
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        print(f"esequence: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BitCapExceeded as exc:
        print(f"esequence: bit cap: {exc}", file=sys.stderr)
        return EXIT_BIT_CAP
    except PrecisionExhausted as exc:
        print(f"esequence: precision: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except CriterionError as exc:
        print(f"esequence: violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    finally:
        if stream is not sys.stdout:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
