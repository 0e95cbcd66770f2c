"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 no factorization, 4 domain or
time-range error, 5 a produced curve failed verification.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .abel import (
    PoleCrossingError,
    abel_parametric,
    canonical_from_A,
    canonical_residual,
    fisher_parametric_verdict,
)
from .cases import fisher as fisher_mod
from .cases.isochronous import (
    IsochronousCase,
    PoleError,
    isochronous_A,
    isochronous_derivatives,
    isochronous_equation,
    isochronous_x,
)
from .cases.israel_stewart import DegenerateParameterError, abel_A, is_alphas, is_equation, is_particular, line_slope
from .factorizer import (
    FactorPair,
    MixedLienardEquation,
    NoFactorizationError,
    factorize,
    resolved_equation,
    with_branch,
)
from .powerexpr import DomainError
from .quadrature import SegmentError, SolutionCurve, TimeRangeError, first_order_rhs, quadrature_solve, write_csv
from .verify import (
    first_order_residual,
    period_estimate,
    residual_from_derivatives,
    residual_norm,
    rk_integrate,
    sup_norm_difference,
)

EXIT_OK, EXIT_INPUT, EXIT_NOFACT, EXIT_DOMAIN, EXIT_VERIFY = 0, 2, 3, 4, 5

RESIDUAL_TOL = 1e-6
ORACLE_TOL = 1e-6
MIN_CHECK_POINTS = 2001


class InputError(ValueError):
    pass


class VerificationFailed(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _clean(obj):
    """Replace non-finite floats so manifests stay strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(path: Path, data: dict) -> Path:
    text = json.dumps(_clean(data), indent=2, sort_keys=True, default=_json_default)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text + "\n")
    tmp.replace(path)
    return path


def _manifest(command: str, params: dict, derived: dict, residuals: dict, files: list[str], **extra) -> dict:
    out = {
        "command": command,
        "parameters": params,
        "derived": derived,
        "residuals": residuals,
        "files": sorted(files),
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    out.update(extra)
    return out


def _outdir(path: Optional[str]) -> Path:
    out = Path(path or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def load_equation(path: str) -> MixedLienardEquation:
    try:
        with open(path) as fh:
            data = json.load(fh)
        return MixedLienardEquation.from_json(data)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed equation file {path}: {exc}") from exc


# equation


def cmd_equation(args) -> int:
    if args.case == "fisher":
        eq = fisher_mod.fisher_equation(Fraction(args.m), Fraction(args.q), args.k)
    elif args.case == "israel-stewart":
        eq = is_equation(is_alphas(Fraction(args.omega), args.eps, args.xi0))
    else:
        m = int(Fraction(args.m))
        if m != Fraction(args.m) or m < 0:
            raise InputError("isochronous m must be a non-negative integer")
        eq = isochronous_equation(m)
    text = json.dumps(eq.to_json(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


# factorize


def _load_with_mu(args) -> MixedLienardEquation:
    eq = load_equation(args.equation)
    if getattr(args, "mu", None) is not None:
        eq = MixedLienardEquation(Fraction(args.mu), eq.F, eq.G, eq.free_F)
    return eq


def cmd_factorize(args) -> int:
    eq = _load_with_mu(args)
    pairs = [p for p in factorize(eq, args.split) if not p.is_complex]
    if not pairs:
        print("no factorization under this split", file=sys.stderr)
        return EXIT_NOFACT
    listing = []
    for i, p in enumerate(pairs):
        d = p.describe()
        d["index"] = i
        listing.append(d)
        cons = ", ".join(f"{k} = {v:.12g}" for k, v in p.constraints.items()) or "none"
        print(f"[{i}] branch {p.branch or '.'}  a1 = {p.a1:.12g}  split {p.split}")
        print(f"    phi1 = {p.phi1}")
        print(f"    phi2 = {p.phi2}")
        print(f"    constraints: {cons}")
    if args.out:
        out = _outdir(args.out)
        write_json(
            out / "manifest.json",
            _manifest("factorize", {"equation": args.equation, "split": args.split, "mu": str(eq.mu)}, {}, {}, [],
                      pairs=listing),
        )
    return EXIT_OK


# solve / verify


def _time_grid(t_range, dt) -> np.ndarray:
    lo, hi = t_range
    if not dt > 0:
        raise InputError("--dt must be positive")
    if not hi > lo:
        raise InputError("--t-range needs t_min < t_max")
    n = int(math.floor((hi - lo) / dt + 1e-9)) + 1
    t = lo + dt * np.arange(n)
    if hi - t[-1] > 1e-9 * max(1.0, abs(hi)):
        t = np.append(t, hi)
    return t


def _check_window(curve: SolutionCurve) -> SolutionCurve:
    """Part of the curve away from ``x = 0``, where the equation is singular."""
    keep = curve.x > 1e-3 * np.max(np.abs(curve.x))
    idx = np.nonzero(keep)[0]
    if idx.size == 0:
        return curve.window(1.0, 0.0)
    # longest contiguous run
    breaks = np.nonzero(np.diff(idx) > 1)[0]
    starts = np.r_[0, breaks + 1]
    ends = np.r_[breaks, idx.size - 1]
    j = int(np.argmax(ends - starts))
    return curve.window(curve.t[idx[starts[j]]], curve.t[idx[ends[j]]])


def _residual_reports(eq: MixedLienardEquation, pair: FactorPair, x0, t0, curve: SolutionCurve) -> tuple[dict, SolutionCurve]:
    t = curve.t
    if t.size < MIN_CHECK_POINTS:
        t = np.linspace(t[0], t[-1], MIN_CHECK_POINTS)
        dense = quadrature_solve(pair, x0, t0, t)
    else:
        dense = curve
    check = _check_window(dense)
    if check.t.size < 7:
        raise VerificationFailed("too few samples away from x = 0 to verify the curve")
    scale = float(np.max(np.abs(eq.G(check.x)))) + 1.0
    first = first_order_residual(first_order_rhs(pair), check)
    second = residual_norm(eq, check)
    tol = RESIDUAL_TOL * scale
    reports = {
        "tolerance": tol,
        "window": [float(check.t[0]), float(check.t[-1])],
        "first_order": {**first.as_dict(), "passed": first.passed(tol)},
        "second_order": {**second.as_dict(), "passed": second.passed(tol)},
    }
    return reports, check


def _oracle_run(eq, pair, check: SolutionCurve, backward: bool) -> dict:
    i = -1 if backward else 0
    x_start = float(check.x[i])
    v_start = float(first_order_rhs(pair)(x_start))
    t = check.t[::-1] if backward else check.t
    oracle = rk_integrate(eq, x_start, v_start, t, rel_tol=1e-11)
    reached = len(oracle) == len(check)
    err = sup_norm_difference(check.window(oracle.t[0], oracle.t[-1]), oracle) if len(oracle) > 1 else math.inf
    return {
        "start": float(check.t[i]),
        "event": oracle.metadata["event"],
        "samples_reached": len(oracle),
        "sup_norm_difference": err,
        "passed": bool(reached and err < ORACLE_TOL),
    }


def _oracle_report(eq, pair, check: SolutionCurve) -> dict:
    """Integrate the full equation from each end of the checked window.

    A particular solution often runs along the stable manifold of a saddle in
    one time direction, so the oracle is trusted when either direction
    reproduces the curve.
    """
    runs = {"forward": _oracle_run(eq, pair, check, False), "backward": _oracle_run(eq, pair, check, True)}
    return {**runs, "tolerance": ORACLE_TOL, "passed": any(r["passed"] for r in runs.values())}


def _solve(args, with_oracle: bool) -> int:
    eq = _load_with_mu(args)
    t = _time_grid(args.t_range, args.dt)
    pairs = [p for p in factorize(eq, args.split) if not p.is_complex]
    if not pairs:
        print("no factorization under this split", file=sys.stderr)
        return EXIT_NOFACT
    try:
        pair = with_branch(pairs, args.branch)
    except (LookupError, ValueError, IndexError) as exc:
        raise InputError(f"bad --branch {args.branch!r}: {exc}") from exc
    eq = resolved_equation(eq, pair)
    curve = quadrature_solve(pair, args.x0, args.t0, t)
    residuals, check = _residual_reports(eq, pair, args.x0, args.t0, curve)
    ok = residuals["first_order"]["passed"] and residuals["second_order"]["passed"]
    out = _outdir(args.out)
    files = [curve.to_csv(out / "curve.csv").name]
    extra = {}
    if with_oracle:
        extra["oracle"] = _oracle_report(eq, pair, check)
        ok = ok and extra["oracle"]["passed"]
    derived = {"a1": pair.a1, "branch": pair.branch, "split": pair.split, "constraints": pair.constraints,
               "phi1": str(pair.phi1), "phi2": str(pair.phi2)}
    params = {"equation": args.equation, "mu": str(eq.mu), "x0": args.x0, "t0": args.t0,
              "t_range": list(args.t_range), "dt": args.dt, "branch": args.branch, "split": args.split}
    write_json(out / "manifest.json", _manifest("verify" if with_oracle else "solve", params, derived, residuals,
                                                 files + ["manifest.json"], verified=ok, **extra))
    print(f"wrote {out / 'curve.csv'} ({len(curve)} samples); verification {'passed' if ok else 'FAILED'}")
    if not ok:
        print(json.dumps(_clean({"residuals": residuals, **extra}), indent=2, default=_json_default), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_solve(args) -> int:
    return _solve(args, with_oracle=False)


def cmd_verify(args) -> int:
    return _solve(args, with_oracle=True)


# figures


def figure_1(out: Path, C: Optional[float]) -> dict:
    files, derived, residuals = [], {}, {}
    for m in (1, 2):
        A0 = float(isochronous_A(m)[0])
        c = 1.25 * A0 if C is None else float(C)
        case = IsochronousCase(m, c, 0.0)
        t = np.linspace(0.0, 2.0 * math.pi, 2001)
        x = isochronous_x(case, t)
        name = f"fig1_m{m}.csv"
        write_csv(out / name, ["t", "x"], [t, x])
        files.append(name)
        t2 = np.linspace(0.5, 4.0 * math.pi + 1.0, 8001)
        period = period_estimate(SolutionCurve(t2, isochronous_x(case, t2), "closed-form"))
        derived[f"m{m}"] = {"C": c, "A_m0": A0, "t0": 0.0, "periodic": case.periodic, "period": period}
        # exact derivatives: the equation is singular where x = 0
        xs, vs, acc = isochronous_derivatives(case, t)
        keep = np.abs(xs) > 1e-12
        residuals[f"m{m}"] = residual_from_derivatives(
            isochronous_equation(m), t[keep], xs[keep], vs[keep], acc[keep]
        ).as_dict()
    return {"files": files, "derived": derived, "residuals": residuals,
            "notes": "integration constants default to t0 = 0, C = 1.25 A_m0"}


def figure_2(out: Path, C: Optional[float]) -> dict:
    case = fisher_mod.fisher_setup(Fraction(1, 4), 2, 1.0, "+")
    tau = np.round(np.arange(1, 2001) * 0.01, 12)
    curve = fisher_mod.fisher_kink(case, tau, 0.0)
    curve.to_csv(out / "fig2_kink.csv")
    meta = curve.metadata
    return {
        "files": ["fig2_kink.csv"],
        "derived": {**case.constants(), "v": case.speed, "tau0": 0.0, "form": meta["form"]},
        "residuals": meta["verdicts"],
    }


def figure_3(out: Path, C: Optional[float]) -> dict:
    files, derived = [], {}
    for w in [Fraction(k, 10) for k in range(1, 10)]:
        alphas = is_alphas(w, 0.75, 0.75)
        entry = {"alphas": alphas.as_dict(), "A": abel_A(alphas)}
        for branch in ("+", "-"):
            sol = is_particular(alphas, 1.0, 0.0, branch)
            t = sol.t_star + np.geomspace(0.1, 10.0, 400) * math.copysign(1.0, sol.A)
            t = np.sort(t)
            H = sol.H(t)
            a1p = float(1 + alphas.alpha1)
            wv = -(H**a1p) * sol.a1 * a1p * alphas.alpha3 * H / a1p
            eta = alphas.alpha2 / float(2 + alphas.alpha1) * H ** float(2 + alphas.alpha1)
            tag = "plus" if branch == "+" else "minus"
            name = f"fig3_omega{float(w):.1f}_{tag}.csv"
            write_csv(out / name, ["t", "H", "eta", "w"], [t, H, eta, wv])
            files.append(name)
            entry[tag] = {**sol.as_dict(), "slope": line_slope(alphas, branch)}
        derived[f"{float(w):.1f}"] = entry
    return {"files": files, "derived": derived, "residuals": {},
            "notes": "omega_eos = 0 is excluded: alpha1 = -1 there; epsilon = xi0 = 3/4"}


def figure_4(out: Path, C: Optional[float]) -> dict:
    A = 0.2
    can = canonical_from_A(A)
    lower, upper = can.line_slopes()
    files = []
    eta = np.linspace(0.0, 4.0, 401)
    for name, s in (("fig4_line_lower.csv", lower), ("fig4_line_upper.csv", upper)):
        write_csv(out / name, ["eta", "w"], [eta, s * eta])
        files.append(name)
    lo, hi = can.poles()
    tau = np.linspace(lo + 2e-3, hi - 2e-3, 2001)
    Cs = (0.5, 1.0, 2.0) if C is None else (float(C),)
    # residuals on a dense grid kept clear of the poles, where eta blows up
    check = np.linspace(lo + 0.02, hi - 0.02, 8001)
    residuals = {}
    for c in Cs:
        curve = abel_parametric(can, c, tau, tau_ref=0.5)
        name = f"fig4_parametric_C{c:g}.csv"
        curve.to_csv(out / name)
        files.append(name)
        residuals[f"C={c:g}"] = canonical_residual(abel_parametric(can, c, check, tau_ref=0.5), A).as_dict()
    return {
        "files": files,
        "derived": {"A": A, "slopes": {"lower": lower, "upper": upper}, "poles": [lo, hi], "C": list(Cs),
                    "tau_ref": 0.5, "denominator": "tau^2 - tau + A"},
        "residuals": residuals,
    }


FIGURES = {1: figure_1, 2: figure_2, 3: figure_3, 4: figure_4}


def cmd_figure(args) -> int:
    out = _outdir(args.out)
    result = FIGURES[args.n](out, args.C)
    files = result["files"] + ["manifest.json"]
    extra = {"notes": result["notes"]} if "notes" in result else {}
    write_json(out / "manifest.json",
               _manifest(f"figure {args.n}", {"n": args.n, "C": args.C}, result["derived"], result["residuals"],
                         files, **extra))
    print(f"wrote {len(result['files'])} data files to {out}")
    return EXIT_OK


def cmd_handbook(args) -> int:
    verdict = fisher_parametric_verdict(args.q, args.sign, args.C if args.C is not None else 1.0)
    print(json.dumps(_clean(verdict), indent=2, default=_json_default))
    return EXIT_OK


# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mixedlienard", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("equation", help="write the equation JSON of a worked case")
    e.add_argument("case", choices=["fisher", "israel-stewart", "isochronous"])
    e.add_argument("--m", default="1/4")
    e.add_argument("--q", default="2")
    e.add_argument("--k", type=float, default=1.0)
    e.add_argument("--omega", default="1/2", help="equation-of-state parameter (israel-stewart)")
    e.add_argument("--eps", type=float, default=0.75)
    e.add_argument("--xi0", type=float, default=0.75)
    e.add_argument("--out")
    e.set_defaults(func=cmd_equation)

    f = sub.add_parser("factorize", help="list real factor pairs")
    f.add_argument("equation")
    f.add_argument("--split", default="auto")
    f.add_argument("--mu", help="override mu from the file")
    f.add_argument("--out")
    f.set_defaults(func=cmd_factorize)

    for name, func in (("solve", cmd_solve), ("verify", cmd_verify)):
        s = sub.add_parser(name, help=f"{name} a particular solution by quadrature")
        s.add_argument("equation")
        s.add_argument("--branch", default="+", help="'+', '-' or a pair index")
        s.add_argument("--split", default="auto")
        s.add_argument("--mu")
        s.add_argument("--x0", type=float, required=True)
        s.add_argument("--t0", type=float, default=0.0)
        s.add_argument("--t-range", type=float, nargs=2, required=True, metavar=("T_MIN", "T_MAX"))
        s.add_argument("--dt", type=float, default=0.01)
        s.add_argument("--out", default=".")
        s.set_defaults(func=func)

    g = sub.add_parser("figure", help="emit figure data")
    g.add_argument("n", type=int, choices=sorted(FIGURES))
    g.add_argument("--C", type=float, help="integration constant (figures 1 and 4)")
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_figure)

    h = sub.add_parser("handbook", help="residual verdict of the Fisher handbook parametrization")
    h.add_argument("--q", type=float, default=2.0)
    h.add_argument("--sign", choices=["+", "-"], default="+")
    h.add_argument("--C", type=float)
    h.set_defaults(func=cmd_handbook)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoFactorizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOFACT
    except TimeRangeError as exc:
        lo, hi = exc.attainable
        print(f"error: {exc}", file=sys.stderr)
        print(f"attainable range: [{lo}, {hi}]", file=sys.stderr)
        return EXIT_DOMAIN
    except (DomainError, SegmentError, PoleError, PoleCrossingError, DegenerateParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except VerificationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
