"""
Command-line front end: ``hermpade <command> [options]``.

Every JSON document written embeds the validated run configuration and the
working precision, and contains no timestamps, so identical invocations
produce byte-identical files.  Exit status is 0 on success, 1 for usage,
schema and precondition errors, and 2 when a computation fails.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .approximants import (
    FromHermitePade,
    hermite_pade,
    incomplete_pade,
    pade,
    record_to_json,
    records_to_csv,
)
from .numerics import get_context
from .row_analysis import (
    RateFitError,
    SweepError,
    cluster_zeros,
    clusters_to_json,
    convergence_on_circle,
    denominator_rate,
    derivative_rates,
    inverse_diagnosis,
    sweep,
    sweep_to_csv,
    sweep_to_json,
)
from .series import SchemaError, SystemModel, system_from_json, system_to_json
from .system_poles import enumerate_system_poles, pole_set_to_json
from .testbed import examples, get_example

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2
COMMANDS = ("approx", "sweep", "system-poles", "rates", "diagnose", "examples")


class UsageError(Exception):
    """Invalid configuration, detected before any computation."""


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    example: str | None = None
    m: list | None = None
    n_min: int | None = None
    n_max: int | None = None
    precision_bits: int = 512
    jobs: int = 1
    out: str | None = None
    csv: str | None = None
    options: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def parse_n(text: str) -> tuple[int, int]:
    """``"20"`` or ``"2..60"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise UsageError(f"--n expects an integer or a range like 2..60, got {text!r}") from exc
    if lo < 0 or hi < lo:
        raise UsageError(f"invalid n range {text!r}")
    return lo, hi


def parse_m(text: str) -> list:
    try:
        m = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise UsageError(f"--m expects comma separated integers, got {text!r}") from exc
    if not m or any(x < 1 for x in m):
        raise UsageError("--m entries must be positive integers")
    return m


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hermpade", description="Row sequences of Hermite-Padé approximants.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, needs_n=True, default_n=None):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="system description (JSON)")
        src.add_argument("--example", help="builtin example id (E1..E6)")
        sp.add_argument("--m", help="multi-index, e.g. 1,1 (overrides the input)")
        if needs_n:
            sp.add_argument("--n", default=default_n, required=default_n is None,
                            help="n or a range lo..hi")
        sp.add_argument("--precision-bits", type=int, default=512)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--out", help="JSON output path (default: stdout)")
        sp.add_argument("--csv", help="optional CSV output path")

    sp = sub.add_parser("approx", help="one approximant")
    common(sp)
    sp.add_argument("--kind", choices=("hermite-pade", "pade", "incomplete"), default="hermite-pade")
    sp.add_argument("--component", type=int, default=1, help="1-based component for pade/incomplete")
    sp.add_argument("--m-star", type=int, help="defect count for --kind incomplete")
    sp.add_argument("--selection", choices=("minimal-norm", "from-hermite-pade"), default="minimal-norm")

    sp = sub.add_parser("sweep", help="a row of approximants")
    common(sp, default_n="2..60")
    sp.add_argument("--limit", choices=("system-poles", "final"), default="system-poles")
    sp.add_argument("--normalization", choices=("monic", "l1"), default="monic")

    sp = sub.add_parser("system-poles", help="system poles, radii and predicted rate")
    common(sp, needs_n=False)

    sp = sub.add_parser("rates", help="fitted rates along a row")
    common(sp, default_n="2..60")
    sp.add_argument("--window", help="fit window lo..hi (default: second half of the row)")
    sp.add_argument("--trailing", type=int, default=20, help="records used for zero clusters")
    sp.add_argument("--xi", help="point for derivative rates (complex, e.g. 1 or 0.5+0.25j)")
    sp.add_argument("--sbar", type=int, default=0, help="highest derivative order at --xi")
    sp.add_argument("--circle", type=float, help="radius for uniform convergence")
    sp.add_argument("--samples", type=int, default=256)
    sp.add_argument("--component", type=int, default=1, help="1-based component for --circle")
    sp.add_argument("--circle-precision", choices=("double", "mp"), default="double")

    sp = sub.add_parser("diagnose", help="inverse-type diagnosis of a scalar row")
    common(sp, default_n="2..60")
    sp.add_argument("--component", type=int, default=1)

    sp = sub.add_parser("examples", help="list the builtin examples")
    sp.add_argument("--out")
    sp.add_argument("--precision-bits", type=int, default=512)
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command, precision_bits=args.precision_bits, out=args.out)
    if cfg.precision_bits < 64:
        raise UsageError("--precision-bits must be at least 64")
    if args.command == "examples":
        return cfg
    cfg.input, cfg.example, cfg.csv = args.input, args.example, args.csv
    cfg.jobs = args.jobs
    if cfg.jobs < 1:
        raise UsageError("--jobs must be positive")
    if args.m:
        cfg.m = parse_m(args.m)
    if getattr(args, "n", None) is not None:
        cfg.n_min, cfg.n_max = parse_n(args.n)
    skip = {"command", "input", "example", "m", "n", "precision_bits", "jobs", "out", "csv"}
    cfg.options = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return cfg


def load_system(cfg: RunConfig) -> SystemModel:
    ctx = get_context(cfg.precision_bits)
    if cfg.example:
        try:
            system = get_example(cfg.example, ctx).system
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
    else:
        try:
            text = Path(cfg.input).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {cfg.input}: {exc}") from exc
        system = system_from_json(text, ctx)
    if cfg.m is not None:
        if len(cfg.m) != system.d:
            raise UsageError(f"--m has {len(cfg.m)} entries but the system has {system.d} components")
        system = system.with_m(cfg.m)
    return system


def _validate(cfg: RunConfig, system: SystemModel):
    if cfg.n_min is not None and cfg.n_min < max(system.m):
        raise UsageError(f"n={cfg.n_min} is below max(m)={max(system.m)}")
    comp = cfg.options.get("component")
    if comp is not None and not 1 <= comp <= system.d:
        raise UsageError(f"--component must lie in 1..{system.d}")


def _emit(cfg: RunConfig, result) -> None:
    doc = {"config": cfg.as_dict(), "precision_bits": cfg.precision_bits, "result": result}
    text = json.dumps(doc, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(cfg: RunConfig, text: str) -> None:
    if cfg.csv:
        Path(cfg.csv).write_text(text)


def _window(cfg: RunConfig, lo: int, hi: int):
    w = cfg.options.get("window")
    if w:
        return parse_n(w)
    return ((lo + hi) // 2, hi)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_examples(cfg: RunConfig) -> dict:
    ctx = get_context(cfg.precision_bits)
    return {"examples": [{"id": ex.id, "description": ex.description, "notes": ex.notes,
                          "system": ex.to_json()} for ex in examples(ctx)]}


def cmd_approx(cfg: RunConfig, system: SystemModel) -> dict:
    if cfg.n_min != cfg.n_max:
        raise UsageError("approx takes a single n")
    n = cfg.n_min
    kind = cfg.options["kind"]
    k = cfg.options["component"] - 1
    if kind == "hermite-pade":
        rec = hermite_pade(system, n)
    elif kind == "pade":
        rec = pade(system.components[k], n, system.m[k])
    else:
        m_star = cfg.options.get("m_star")
        if cfg.options["selection"] == "from-hermite-pade":
            rec = incomplete_pade(system, n, system.total, system.m[k], FromHermitePade(k))
        else:
            if m_star is None:
                raise UsageError("--kind incomplete needs --m-star")
            m_total = system.m[k]
            if not n >= m_total >= m_star >= 1:
                raise UsageError("need n >= m >= m_star >= 1")
            rec = incomplete_pade(system.components[k], n, m_total, m_star)
    _write_csv(cfg, records_to_csv([rec]))
    return {"record": record_to_json(rec)}


def cmd_sweep(cfg: RunConfig, system: SystemModel) -> dict:
    limit = "system_poles" if cfg.options["limit"] == "system-poles" else "final"
    sw = sweep(system, cfg.n_min, cfg.n_max, limit=limit, normalization=cfg.options["normalization"],
               jobs=cfg.jobs)
    _write_csv(cfg, sweep_to_csv(sw))
    return {"sweep": sweep_to_json(sw)}


def cmd_system_poles(cfg: RunConfig, system: SystemModel) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ps = enumerate_system_poles(system)
    return {"system": system_to_json(system), "system_poles": pole_set_to_json(ps, system)}


def cmd_rates(cfg: RunConfig, system: SystemModel) -> dict:
    ctx = system.ctx
    points = []
    if cfg.options.get("xi"):
        try:
            xi = ctx.mpc(complex(cfg.options["xi"].replace(" ", "")))
        except ValueError as exc:
            raise UsageError(f"bad --xi {cfg.options['xi']!r}") from exc
        points.append((xi, cfg.options["sbar"]))
    sw = sweep(system, cfg.n_min, cfg.n_max, derivative_points=points, jobs=cfg.jobs)
    window = _window(cfg, cfg.n_min, cfg.n_max)
    out = {"limit_source": sw.limit_source, "window": list(window)}
    out["denominator_rate"] = denominator_rate(sw, window).as_dict()
    out["clusters"] = clusters_to_json(cluster_zeros(sw, cfg.options["trailing"]))
    if points:
        dr = derivative_rates(sw, points[0][0], points[0][1], window)
        out["derivative_rates"] = {"xi": ctx.complex_to_pair(dr.xi), "rate": repr(dr.rate),
                                   "per_order": [e.as_dict() for e in dr.per_order]}
    if cfg.options.get("circle") is not None:
        est = convergence_on_circle(sw, system, cfg.options["component"] - 1, cfg.options["circle"],
                                    cfg.options["samples"], window,
                                    precision=cfg.options["circle_precision"])
        out["circle"] = est.as_dict()
    _write_csv(cfg, sweep_to_csv(sw))
    return out


def cmd_diagnose(cfg: RunConfig, system: SystemModel) -> dict:
    k = cfg.options["component"] - 1
    scalar = SystemModel((system.components[k],), (system.m[k],), system.name)
    sw = sweep(scalar, cfg.n_min, cfg.n_max, jobs=cfg.jobs)
    report = inverse_diagnosis(sw, scalar.components[0])
    _write_csv(cfg, sweep_to_csv(sw))
    return {"component": k + 1, "diagnosis": report.as_dict()}


HANDLERS = {
    "approx": cmd_approx,
    "sweep": cmd_sweep,
    "system-poles": cmd_system_poles,
    "rates": cmd_rates,
    "diagnose": cmd_diagnose,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        if cfg.command == "examples":
            _emit(cfg, cmd_examples(cfg))
            return EXIT_OK
        system = load_system(cfg)
        _validate(cfg, system)
    except (UsageError, SchemaError) as exc:
        sys.stderr.write(f"hermpade: error: {exc}\n")
        return EXIT_USAGE
    try:
        result = HANDLERS[cfg.command](cfg, system)
    except UsageError as exc:
        sys.stderr.write(f"hermpade: error: {exc}\n")
        return EXIT_USAGE
    except (SweepError, RateFitError, ArithmeticError, ValueError) as exc:
        sys.stderr.write(f"hermpade: computation failed: {exc}\n")
        return EXIT_COMPUTE
    _emit(cfg, result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
