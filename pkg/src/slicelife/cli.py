"""Command-line front end.

    slicelife validate|bound|iterate|solve|audit|sweep [--config FILE] [options]

Exit codes: 0 success, 1 validation or configuration failure, 2 numerical
failure, 3 theorem-consistency violation (a computed blow-up time beyond the
bound, or a failed inequality audit).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Iterable, List, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .auditor import audit
from .errors import (
    DegenerateExponentError,
    InputError,
    NumericalFailure,
    SlicelifeError,
)
from .exponents import ProblemParams, canonical, derived, validate
from .frames import DEFAULT_JMAX, IndexMode, frame_table
from .lifespan import bound
from .sweep import COLUMNS, default_amplitudes, run_sweep, scaling_fit
from .volterra import SolveSpec, solve, trace_rows

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_THEOREM = 0, 1, 2, 3

PARAM_KEYS = ("a", "b", "c", "x", "y", "z", "p", "A", "B", "R")


class ConfigError(InputError):
    pass


# ---------------------------------------------------------------------------
# config


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad config {path!r}: {exc}") from None


def _parse_assignments(items: Iterable[str]) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"expected KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"value for {key!r} is not a number: {value!r}") from None
    return out


def build_params(cfg: dict, overrides: dict) -> ProblemParams:
    section = dict(cfg.get("params", {}))
    preset = section.pop("preset", None)
    if preset is not None or not section:
        if preset not in (None, "canonical"):
            raise ConfigError(f"unknown preset {preset!r}")
        p = float(overrides.get("p", section.get("p", 2.0)))
        base = canonical(p=p).as_dict()
        base.update({k: v for k, v in section.items() if k in ("A", "B", "R")})
        for k in section:
            if k not in ("p", "A", "B", "R"):
                raise ConfigError(f"preset 'canonical' fixes exponent {k!r}")
        section = base
    section.update(overrides)
    missing = [k for k in PARAM_KEYS if k not in section]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)}")
    return ProblemParams.from_mapping(section)


def build_spec(cfg: dict, args) -> SolveSpec:
    s = dict(cfg.get("solve", {}))
    for key in ("h", "cap", "horizon", "sweeps"):
        v = getattr(args, key, None)
        if v is not None:
            s[key] = v
    unknown = set(s) - {"h", "cap", "horizon", "sweeps", "refinements"}
    if unknown:
        raise ConfigError(f"unknown [solve] key(s): {', '.join(sorted(unknown))}")
    return SolveSpec(
        h=float(s.get("h", 1e-3)),
        cap=None if s.get("cap") is None else float(s["cap"]),
        horizon=None if s.get("horizon") is None else float(s["horizon"]),
        sweeps=int(s.get("sweeps", 1)),
        mode=args.mode,
    )


def _mode(cfg: dict, args) -> IndexMode:
    if args.mode is not None:
        return IndexMode.parse(args.mode)
    return IndexMode.parse(cfg.get("mode", "as-printed"))


# ---------------------------------------------------------------------------
# output


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if isinstance(v, IndexMode):
        return v.value
    return str(v)


def _jsonable(v):
    if isinstance(v, IndexMode):
        return v.value
    if isinstance(v, float) and not math.isfinite(v):
        return fmt(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render_table(rows: List[dict], columns: List[str], fmt_kind: str) -> str:
    if fmt_kind == "json":
        return json.dumps([_jsonable({c: r[c] for c in columns}) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def render_mapping(d: dict, fmt_kind: str) -> str:
    if fmt_kind == "json":
        return json.dumps(_jsonable(d), indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in d.items():
        w.writerow([k, fmt(v)])
    return buf.getvalue()


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(params, cfg, args) -> int:
    rep = validate(params)
    d = {"status": "pass" if rep.ok else "fail", "theta": params.theta}
    for i, v in enumerate(rep.violations):
        d[f"violation_{i}"] = v
    for i, w in enumerate(rep.warnings):
        d[f"warning_{i}"] = w
    emit(render_mapping(d, args.format), args.out)
    if not rep.ok:
        for v in rep.violations:
            print(f"violated: {v}", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_CONFIG


def _require_valid(params) -> None:
    rep = validate(params)
    if not rep.ok:
        raise ConfigError("invalid parameters: " + "; ".join(rep.violations))


def cmd_bound(params, cfg, args) -> int:
    _require_valid(params)
    lb = bound(params, args.mode)
    dc = derived(params)
    d = {
        "branch": lb.branch,
        "tie": lb.tie,
        "theta": lb.theta,
        "C": dc.C,
        "D": dc.D,
        "R_infinity": dc.r_infinity,
        "log_T_bound": lb.log_T_bound,
        "T_bound": lb.T_bound,
        "lifespan_exponent": dc.lifespan_exponent,
        "mode": lb.mode,
    }
    emit(render_mapping(d, args.format), args.out)
    return EXIT_OK


def cmd_iterate(params, cfg, args) -> int:
    _require_valid(params)
    jmax = args.jmax if args.jmax is not None else int(cfg.get("frames", {}).get("jmax", DEFAULT_JMAX))
    rows = frame_table(params, jmax, args.mode)
    cols = ["j", "b_j", "c_j", "R_j", "log_A_exact", "log_A_closed"]
    emit(render_table(rows, cols, args.format), args.out)
    return EXIT_OK


def _solve_summary(sol, lb) -> dict:
    st = sol.status
    blew = sol.blew_up
    log_T = st.log_T_num if blew else None
    return {
        "status": "blew_up" if blew else "survived",
        "T_num": st.T_num if blew else None,
        "log_T_num": log_T,
        "log_T_bound": lb.log_T_bound,
        "branch": lb.branch,
        "margin": lb.log_T_bound - log_T if blew else None,
        "forcing_dominated": st.forcing_dominated if blew else False,
        "nodes": sol.diagnostics["nodes"],
        "h": sol.spec.h,
        "cap": sol.spec.cap,
        "horizon": sol.spec.horizon,
    }


def cmd_solve(params, cfg, args) -> int:
    spec = build_spec(cfg, args)
    sol = solve(params, spec)
    lb = bound(params, args.mode)
    summary = _solve_summary(sol, lb)
    if args.trace:
        emit(render_table(trace_rows(sol), ["t", "sigma", "F", "H", "I", "J"], args.format), args.out)
        sys.stderr.write(render_mapping(summary, "csv"))
    else:
        emit(render_mapping(summary, args.format), args.out)
    if summary["margin"] is not None and summary["margin"] < 0:
        print("theorem-consistency violation: T_num exceeds the lifespan bound", file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def cmd_audit(params, cfg, args) -> int:
    a = cfg.get("audit", {})
    spec = build_spec(cfg, args)
    sol = solve(params, spec)
    reports = audit(
        sol,
        params,
        mode=args.mode,
        dominate_jmax=int(a.get("dominate_jmax", 4)),
        step_jmax=int(a.get("step_jmax", 3)),
        rel_tol=float(a.get("rel_tol", 1e-6)),
        n_samples=int(a.get("samples", 20)),
    )
    rows = [
        {
            "check": r.check,
            "j": r.j,
            "passed": r.passed,
            "worst_margin": r.worst_margin,
            "checked": r.checked,
            "samples_skipped": r.skipped,
        }
        for r in reports
    ]
    cols = ["check", "j", "passed", "worst_margin", "checked", "samples_skipped"]
    emit(render_table(rows, cols, args.format), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_THEOREM


def cmd_sweep(params, cfg, args) -> int:
    s = cfg.get("sweep", {})
    _require_valid(params)
    if args.amplitudes:
        amps = [float(v) for v in args.amplitudes.split(",")]
    elif "amplitudes" in s:
        amps = [float(v) for v in s["amplitudes"]]
    else:
        amps = default_amplitudes(params, int(s.get("count", 4)))
    spec = build_spec(cfg, args)
    refinements = int(cfg.get("solve", {}).get("refinements", 3))
    records = run_sweep(params, amps, spec, refinements, workers=args.workers or int(s.get("workers", 1)))
    if args.format == "json":
        text = json.dumps([_jsonable({k: r.as_dict()[k] for k in COLUMNS}) for r in records], indent=2) + "\n"
    else:
        text = render_table([r.row() for r in records], COLUMNS, "csv")
    emit(text, args.out)
    for r in records:
        if r.note:
            print(f"A={fmt(r.A)}: {r.note}", file=sys.stderr)
    try:
        fit = scaling_fit(records)
        print(
            f"scaling fit: slope={fit.slope:.6g} intercept={fit.intercept:.6g} r2={fit.r_squared:.6g}",
            file=sys.stderr,
        )
    except InputError:
        pass
    if any(r.converged and r.margin is not None and r.margin < 0 for r in records):
        print("theorem-consistency violation: some T_num exceeds its bound", file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "bound": cmd_bound,
    "iterate": cmd_iterate,
    "solve": cmd_solve,
    "audit": cmd_audit,
    "sweep": cmd_sweep,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config with [params], [solve], [frames], [audit], [sweep]")
    common.add_argument("--param", "-P", action="append", metavar="KEY=VALUE", help="override a parameter")
    common.add_argument("--mode", choices=[m.value for m in IndexMode], default=None)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--trace", action="store_true", help="solve: emit the per-node trace")
    common.add_argument("--h", type=float, help="grid step in log(t/R)")
    common.add_argument("--cap", type=float, help="blow-up threshold on H")
    common.add_argument("--horizon", type=float, help="largest log(t/R) to march to")
    common.add_argument("--sweeps", type=int, help="corrector sweeps per node")
    common.add_argument("--jmax", type=int, help="iterate: last frame index")
    common.add_argument("--amplitudes", help="sweep: comma-separated amplitudes")
    common.add_argument("--workers", type=int, help="sweep: worker processes")

    parser = argparse.ArgumentParser(prog="slicelife", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def dispatch(argv: Optional[List[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        args.mode = _mode(cfg, args)
        params = build_params(cfg, _parse_assignments(args.param))
        return COMMANDS[args.command](params, cfg, args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, DegenerateExponentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SlicelifeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
