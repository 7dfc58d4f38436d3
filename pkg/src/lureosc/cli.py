"""Command-line front end.

Exit codes: 0 success, 1 input/parse error (or failed reproduction),
2 system fails a standing hypothesis, 3 exact mode unsupported.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .exact import ExactModeUnsupported, format_quadrat
from .lure import LureConfig, Tolerances, classify, random_x0_census, simulate
from .oracles import ExponentialSum, cayley_limit_check, limsup_probe
from .poly import Poly, PolyError
from .realization import InvalidSystemError, check_hypotheses, closed_loop, realize, validate
from .reproduce import EXAMPLES, all_passed, run_example
from .spectral import IllConditioned, NearDefective, NotFound, find_simple_unstable, modal_expansion
from .stability import crossings, default_grid, spr_sweep, unstable_root_census

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_EXACT = 0, 1, 2, 3

SPEC_KEYS = {"num", "den", "alpha", "x0", "horizon", "mode", "exact_d", "tolerances"}
TOLERANCE_KEYS = {"conv_tol", "window", "period_tol", "offX_tol", "osc_tol"}


class SpecError(ValueError):
    pass


@dataclass
class SystemSpec:
    num: list[float]
    den: list[float]
    alpha: float | None = None
    x0: list | None = None
    horizon: int | None = None
    mode: str = "float"
    exact_d: int | None = None
    tolerances: dict = field(default_factory=dict)


def _numbers(name: str, value) -> list[float]:
    if not isinstance(value, list) or not value:
        raise SpecError(f"{name!r} must be a nonempty list of numbers")
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SpecError(f"{name!r} entries must be numbers, got {v!r}")
    return [float(v) for v in value]


def parse_spec(doc) -> SystemSpec:
    if not isinstance(doc, dict):
        raise SpecError("system spec must be a JSON object")
    unknown = sorted(set(doc) - SPEC_KEYS)
    if unknown:
        raise SpecError(f"unknown key {unknown[0]!r}")
    for key in ("num", "den"):
        if key not in doc:
            raise SpecError(f"missing key {key!r}")
    spec = SystemSpec(_numbers("num", doc["num"]), _numbers("den", doc["den"]))
    if doc.get("alpha") is not None:
        a = doc["alpha"]
        if isinstance(a, bool) or not isinstance(a, (int, float)):
            raise SpecError("'alpha' must be a number")
        spec.alpha = float(a)
    if doc.get("x0") is not None:
        x0 = doc["x0"]
        if not isinstance(x0, list) or not all(isinstance(v, (int, float, str)) and not isinstance(v, bool) for v in x0):
            raise SpecError("'x0' must be a list of numbers or exact-value strings")
        spec.x0 = x0
    if doc.get("horizon") is not None:
        h = doc["horizon"]
        if not isinstance(h, int) or isinstance(h, bool) or h < 1:
            raise SpecError("'horizon' must be a positive integer")
        spec.horizon = h
    if "mode" in doc:
        if doc["mode"] not in ("float", "exact"):
            raise SpecError("'mode' must be 'float' or 'exact'")
        spec.mode = doc["mode"]
    if doc.get("exact_d") is not None:
        d = doc["exact_d"]
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise SpecError("'exact_d' must be a positive integer")
        spec.exact_d = d
    tol = doc.get("tolerances") or {}
    if not isinstance(tol, dict):
        raise SpecError("'tolerances' must be an object")
    bad = sorted(set(tol) - TOLERANCE_KEYS)
    if bad:
        raise SpecError(f"unknown key 'tolerances.{bad[0]}'")
    spec.tolerances = dict(tol)
    return spec


def load_spec(path: str) -> SystemSpec:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read system spec: {exc}") from exc
    return parse_spec(doc)


def _plain(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _dump(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, ensure_ascii=False) + "\n"


def _g(v: float) -> str:
    return f"{float(v):.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue())


def _emit(report: dict, out_dir: Path | None) -> None:
    text = _dump(report)
    sys.stdout.write(text)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(text)


def parse_alpha_range(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise SpecError(f"--alpha-range must be LO:HI:STEPS, got {text!r}") from None
    if steps < 1 or not lo <= hi:
        raise SpecError("--alpha-range needs LO <= HI and STEPS >= 1")
    return default_grid(lo, hi, steps)


def _system(spec: SystemSpec):
    G = validate(Poly(spec.num), Poly(spec.den))
    return G, realize(G)


def _config(spec: SystemSpec, args, ss) -> LureConfig:
    if spec.alpha is None:
        raise SpecError("this command needs 'alpha' in the system spec")
    horizon = args.horizon or spec.horizon
    mode = args.mode or spec.mode
    if horizon is None:
        horizon = 200 if mode == "exact" else 2000
    tol = Tolerances(**spec.tolerances)
    try:
        return LureConfig(ss, spec.alpha, tuple(spec.x0 or ()), horizon, tol, mode, spec.exact_d)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def _split(ss, alpha):
    try:
        return find_simple_unstable(closed_loop(ss, alpha), alpha), None
    except (NotFound, NearDefective) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _split_dict(split) -> dict | None:
    if split is None:
        return None
    return {
        "lambda": split.lam,
        "xi": [complex(v) for v in split.xi],
        "psi": [complex(v) for v in split.psi],
    }


def cmd_validate(args) -> int:
    spec = load_spec(args.input)
    try:
        report, _, _ = check_hypotheses(Poly(spec.num), Poly(spec.den))
    except PolyError as exc:
        raise SpecError(str(exc)) from exc
    for note in report.warnings:
        print(f"warning: {note}", file=sys.stderr)
    _emit(report.to_dict(), args.output)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_analyze(args) -> int:
    spec = load_spec(args.input)
    G, ss = _system(spec)
    cs = crossings(G)
    report = {
        "validation": G.validation.to_dict(),
        "n": G.n,
        "m": G.m,
        "crossings": cs.to_dict(),
    }
    if spec.alpha is not None:
        c = unstable_root_census(G, spec.alpha)
        report["census"] = {"alpha": spec.alpha, "count_outside": c.count_outside, "all_simple": c.all_simple}
    if args.alpha_range:
        grid = parse_alpha_range(args.alpha_range)
        sw = spr_sweep(G, grid, refine=True)
        stable = sw.alphas[sw.spr_values < 1.0]
        report["sweep"] = {
            "points": int(sw.alphas.size),
            "min_spr": float(np.min(sw.spr_values)),
            "spr_equals_one_at": list(sw.unit_crossings),
            "stable_intervals": _intervals(sw.alphas, sw.spr_values < 1.0),
            "stable_points": int(stable.size),
        }
        if args.output is not None:
            args.output.mkdir(parents=True, exist_ok=True)
            _write_csv(args.output / "sweep.csv", ["alpha", "spr"], ([_g(a), _g(s)] for a, s in zip(sw.alphas, sw.spr_values)))
            n = G.n
            header = ["alpha"] + [f"{p}_{i + 1}" for i in range(n) for p in ("re", "im")]
            rows = []
            for a, rs in zip(sw.alphas, sw.root_tracks):
                zs = sorted(rs.raw, key=lambda z: (round(z.real, 12), z.imag))
                rows.append([_g(a)] + [_g(v) for z in zs for v in (z.real, z.imag)])
            _write_csv(args.output / "rootlocus.csv", header, rows)
    _emit(report, args.output)
    return EXIT_OK


def _intervals(alphas: np.ndarray, mask: np.ndarray) -> list[list[float]]:
    out, start = [], None
    for a, m in zip(alphas, mask):
        if m and start is None:
            start = a
        if m:
            end = a
        if not m and start is not None:
            out.append([float(start), float(end)])
            start = None
    if start is not None:
        out.append([float(start), float(end)])
    return out


def trajectory_rows(traj):
    n = traj.x.shape[1]
    if traj.exact:
        header = ["k", "y", "y_exact", "nu", "nu_exact", "mode", "proj_norm", "proj_coord_exact"]
        header += [c for i in range(n) for c in (f"x_{i + 1}", f"x_{i + 1}_exact")]
    else:
        header = ["k", "y", "nu", "mode", "proj_norm"] + [f"x_{i + 1}" for i in range(n)]
    rows = []
    for k in range(traj.horizon + 1):
        proj = "" if traj.proj_norm is None else _g(traj.proj_norm[k])
        if traj.exact:
            pe = "" if traj.proj_exact is None else format_quadrat(traj.proj_exact[k])
            row = [str(k), _g(traj.y[k]), format_quadrat(traj.y_exact[k]), _g(traj.nu[k]),
                   format_quadrat(traj.nu_exact[k]), traj.modes[k].name, proj, pe]
            for i in range(n):
                row += [_g(traj.x[k, i]), format_quadrat(traj.x_exact[k][i])]
        else:
            row = [str(k), _g(traj.y[k]), _g(traj.nu[k]), traj.modes[k].name, proj]
            row += [_g(v) for v in traj.x[k]]
        rows.append(row)
    return header, rows


def cmd_simulate(args) -> int:
    spec = load_spec(args.input)
    G, ss = _system(spec)
    cfg = _config(spec, args, ss)
    split, why = _split(ss, cfg.alpha)
    traj = simulate(cfg, split)
    rep = classify(traj, cfg, split)
    report = {
        "alpha": cfg.alpha,
        "mode": cfg.mode,
        "horizon": traj.horizon,
        "field_d": traj.d,
        "split": _split_dict(split),
        "classification": rep.to_dict(),
        "transitions": [{"k": k, "from": a.name, "to": b.name} for k, a, b in traj.transitions],
    }
    if why:
        report["split_note"] = why
    if args.output is not None:
        args.output.mkdir(parents=True, exist_ok=True)
        header, rows = trajectory_rows(traj)
        _write_csv(args.output / "trajectory.csv", header, rows)
    _emit(report, args.output)
    return EXIT_OK


def cmd_census(args) -> int:
    spec = load_spec(args.input)
    G, ss = _system(spec)
    cfg = replace(_config(spec, args, ss), mode="float")
    res = random_x0_census(cfg, None, args.trials, args.seed, args.box)
    report = {
        "alpha": cfg.alpha,
        "trials": res.trials,
        "seed": args.seed,
        "box": args.box,
        "fraction_self_excited": res.fraction,
        "counts": res.counts,
        "simple_unstable_eigenvalue": res.has_simple_unstable,
    }
    _emit(report, args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    spec = load_spec(args.input)
    G, ss = _system(spec)
    cfg = _config(spec, argparse.Namespace(horizon=None, mode="float"), ss)
    Acl = closed_loop(ss, cfg.alpha)
    x0 = cfg.x0_float
    report: dict = {"alpha": cfg.alpha}
    try:
        terms = [(p, lam) for p, lam in modal_expansion(Acl, x0).terms(ss.C) if np.any(np.abs(p) > 1e-14)]
        if terms and max(abs(lam) for _, lam in terms) > 1.0:
            probe = limsup_probe(ExponentialSum.from_terms(terms), [10.0, 1e3, 1e6])
            report["limsup_probe"] = {
                "window": probe.window,
                "crossings": {f"{t:g}": k for t, k in probe.crossings.items()},
                "all_reached": probe.all_reached,
            }
        else:
            report["limsup_probe"] = {"skipped": "no excited mode outside the unit circle"}
    except IllConditioned as exc:
        report["limsup_probe"] = {"skipped": str(exc)}
    lim = cayley_limit_check(Acl, x0, ss.C[0])
    report["cayley_limit_check"] = {
        "verdict": lim.verdict,
        "t_K": lim.last,
        "chi_at_one": lim.chi_at_one,
        "recurrence_residual": lim.recurrence_residual,
    }
    _emit(report, args.output)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    results = run_example(args.example)
    for a in results:
        print(a.line())
    ok = all_passed(results)
    print(f"{args.example}: {'all assertions passed' if ok else 'FAILED'}")
    if args.output is not None:
        args.output.mkdir(parents=True, exist_ok=True)
        (args.output / "report.json").write_text(
            _dump({"example": args.example, "passed": ok, "assertions": [a.__dict__ for a in results]})
        )
    return EXIT_OK if ok else EXIT_PARSE


class _Parser(argparse.ArgumentParser):
    # usage errors are parse errors; exit code 2 means an invalid system
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lureosc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="system spec JSON path, or - for stdin")
        sp.add_argument("--output", type=Path, help="directory for report.json and CSV files")
        return sp

    common(sub.add_parser("validate", help="check the standing hypotheses on G"))
    a = common(sub.add_parser("analyze", help="unit-circle crossings, gain interval, spr sweep"))
    a.add_argument("--alpha-range", help="sweep grid LO:HI:STEPS")
    for name, helptext in (("simulate", "simulate and classify the saturated loop"),
                           ("census", "random initial-state census"),
                           ("oracle", "linear-loop limit oracles (debugging)")):
        s = common(sub.add_parser(name, help=helptext))
        s.add_argument("--mode", choices=("float", "exact"))
        s.add_argument("--horizon", type=int)
        s.add_argument("--seed", type=int, default=0)
        if name == "census":
            s.add_argument("--trials", type=int, default=100)
            s.add_argument("--box", type=float, default=10.0, help="half-width of the sampling box")
    r = common(sub.add_parser("reproduce", help="run a built-in fixture"), needs_input=False)
    r.add_argument("example", choices=EXAMPLES)
    return p


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "census": cmd_census,
    "oracle": cmd_oracle,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidSystemError as exc:
        sys.stdout.write(_dump(exc.report.to_dict()))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ExactModeUnsupported as exc:
        print(f"error: ExactModeUnsupported: {exc}", file=sys.stderr)
        return EXIT_EXACT
    except PolyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
