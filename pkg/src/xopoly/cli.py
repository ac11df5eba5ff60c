"""The ``xopoly`` command line.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
configuration errors.  ``XOPOLY_PRECISION`` sets the working precision in
decimal digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import mpmath

from . import campaign as cp
from .exactalg import LaurentPoly, Poly
from .forms import (BILINEAR, COMPARE_TOL, HERMITE, HERMITIAN, QUAD_TOL, ContourError, DomainError,
                    default_contour, density_report, gram)
from .hermite import HermiteFamily, Partition
from .laurent import KappaSet, LaurentFamily, parse_gq
from .numerics import working_dps
from .quasi import ALL, SELECTIONS, quasi_basis
from .roots import RootIsolationError, complex_roots

ConfigError = cp.ConfigError

THEOREMS = ("horth", "lorth", "lorth-hermitian", "hdensity", "ldensity")


# -- argument parsing helpers ------------------------------------------------------

def parse_range(text: str) -> tuple:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise ConfigError(f"bad range {text!r}; use LO..HI")
    if lo > hi:
        raise ConfigError(f"empty range {text!r}")
    return lo, hi


def parse_lambda(text: str) -> Partition:
    try:
        return Partition.parse(text)
    except ValueError as exc:
        raise ConfigError(f"malformed lambda {text!r}: {exc}")


def parse_kappa(text: str) -> KappaSet:
    try:
        parts = [int(t) for t in text.strip().strip("{}()").replace(" ", "").split(",") if t]
        return KappaSet(tuple(parts))
    except ValueError as exc:
        raise ConfigError(f"malformed kappa {text!r}: {exc}")


def parse_params_a(text: str) -> list:
    items, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append(cur)
            cur = ""
        else:
            cur += ch
    items.append(cur)
    try:
        return [parse_gq(x) for x in items if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"malformed parameter list {text!r}: {exc}")


def build_family(kind: str, lam=None, kappa=None, a=None):
    if kind == "hermite":
        if lam is None:
            raise ConfigError("--lambda is required for the Hermite family")
        return HermiteFamily(parse_lambda(lam))
    if kind == "laurent":
        if kappa is None:
            raise ConfigError("--kappa is required for the Laurent family")
        k = parse_kappa(kappa)
        vals = parse_params_a(a) if a else []
        try:
            return LaurentFamily(k, vals)
        except ValueError as exc:
            raise ConfigError(str(exc))
    raise ConfigError(f"unknown family {kind!r}")


def emit(obj, out: str, csv_rows=None) -> None:
    """Write JSON (or CSV when asked and a table is available) to stdout or a file."""
    fmt = "json"
    path = None
    if out in ("json", "csv"):
        fmt = out
    elif out:
        path = Path(out)
        fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    if fmt == "csv":
        if csv_rows is None:
            raise ConfigError("this command has no tabular output; use json")
        text = cp.rows_to_csv(csv_rows)
    else:
        text = json.dumps(obj, indent=2, default=str) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _poly_rows(polys) -> list:
    return [{"l": l, "lo": p.lo if isinstance(p, LaurentPoly) else 0,
             "hi": p.hi if isinstance(p, LaurentPoly) else p.degree,
             "poly": json.dumps(p.to_json())} for l, p in polys]


def _verify_report(fam, checks, cfg) -> tuple:
    results = [cp.run_check(name, fam, cfg, {}) for name in checks]
    failed = any(r.status in (cp.FAIL, cp.UNDECIDED) for r in results)
    body = {"family": cp.family_label(fam),
            "checks": [{"name": r.name, "status": r.status, "residual": r.residual, "details": r.details}
                       for r in results]}
    return failed, body


def _checks(text: str) -> list:
    names = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in names if c not in cp.CHECKS]
    if bad:
        raise ConfigError(f"unknown checks {bad}; choose from {list(cp.CHECKS)}")
    return names


def _cfg_with_window(fam, window) -> cp.CampaignConfig:
    cfg = cp.CampaignConfig([])
    if window is not None:
        cfg.windows[cp.family_label(fam)] = window
    return cfg


# -- subcommands ------------------------------------------------------------------------

def cmd_hermite(args) -> int:
    fam = build_family("hermite", lam=args.lam)
    if args.action == "gen":
        lo, hi = parse_range(args.l or "0..8")
        levels = [l for l in range(max(lo, 0), hi + 1) if l not in fam.lam.k]
        polys = [(l, fam.H(l)) for l in levels]
        emit({"family": cp.family_label(fam), "lambda": list(fam.lam.parts), "k": list(fam.lam.k),
              "W": fam.W.to_json(), "polys": [{"l": l, "degree": p.degree, "poly": p.to_json()}
                                              for l, p in polys]},
             args.out, _poly_rows(polys))
        return 0
    window = (0, parse_range(args.l)[1]) if args.l else None
    failed, body = _verify_report(fam, _checks(args.checks), _cfg_with_window(fam, window))
    body["fixtures_scale_constant"] = cp.FAMILY_SCALE
    emit(body, args.out)
    return 1 if failed else 0


def cmd_laurent(args) -> int:
    fam = build_family("laurent", kappa=args.kappa, a=args.a)
    lo, hi = parse_range(args.l) if args.l else (-(fam.kappa.k[0] + 2), fam.kappa.k[0] + 2)
    if args.action == "gen":
        polys = [(l, fam.P(l)) for l in range(lo, hi + 1)]
        emit({"family": cp.family_label(fam), "kappa": list(fam.kappa.k),
              "a": [x.to_json() for x in fam.a], "W": fam.W.to_json(),
              "polys": [{"l": l, "poly": p.to_json()} for l, p in polys]},
             args.out, _poly_rows(polys))
        return 0
    failed, body = _verify_report(fam, _checks(args.checks), _cfg_with_window(fam, (lo, hi)))
    body["sigma"] = cp.SIGMA
    emit(body, args.out)
    return 1 if failed else 0


def cmd_roots(args) -> int:
    try:
        obj = json.loads(Path(args.poly).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read polynomial {args.poly}: {exc}")
    try:
        p = LaurentPoly.from_json(obj) if obj.get("lo", 0) != 0 else Poly.from_json(obj)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"malformed polynomial JSON: {exc}")
    try:
        rs = complex_roots(p, args.precision, args.policy)
    except ValueError as exc:
        raise ConfigError(str(exc))
    except RootIsolationError as exc:
        emit({"error": str(exc), "achieved_radius": str(exc.achieved_radius)}, args.out)
        return 1
    emit(rs.to_json(), args.out,
         [{"re": e["re"], "im": e["im"], "radius": e["radius"], "mult": e["mult"], "class": e["class"]}
          for e in rs.to_json()["entries"]])
    return 0


def cmd_quasi(args) -> int:
    fam = build_family(args.family, args.lam, args.kappa, args.a)
    args.selection = args.selection.upper()
    if args.selection not in SELECTIONS:
        raise ConfigError(f"selection must be one of {SELECTIONS}")
    window = parse_range(args.window) if args.window else None
    try:
        qb = quasi_basis(fam, args.selection, window)
    except ValueError as exc:
        raise ConfigError(str(exc))
    emit(qb.to_json(), args.out)
    return 1 if qb.status != "DECIDED" else 0


def _contour(fam, form, xi, mu, tol):
    x = None if xi in (None, "auto") else xi
    m = None if mu in (None, "auto") else mu
    try:
        return default_contour(form, fam, tol, xi=x, mu=m)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc))


def cmd_gram(args) -> int:
    fam = build_family(args.family, args.lam, args.kappa, args.a)
    form = args.form or (HERMITE if args.family == "hermite" else BILINEAR)
    if (form == HERMITE) != (args.family == "hermite"):
        raise ConfigError(f"form {form} does not match family {args.family}")
    if form == HERMITIAN and not fam.unimodular:
        raise ConfigError("the Hermitian Laurent form needs unimodular parameters")
    if args.window:
        window = parse_range(args.window)
    elif args.family == "hermite":
        window = (0, 8)
    else:
        window = (-(fam.kappa.k[0] + 2), fam.kappa.k[0] + 2)
    contour = _contour(fam, form, args.xi, args.mu, args.tol)
    rep = gram(form, fam, window, args.tol, contour)
    body = rep.to_json()
    body["law"] = "derived" if args.derived else "stated"
    ok = rep.passed(args.compare, corrected=args.derived)
    body["passed"] = ok
    emit(body, args.out)
    return 0 if ok else 1


def _theorem_params(items) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise ConfigError(f"parameter {it!r} must be KEY=VALUE")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_verify_theorem(args) -> int:
    params = _theorem_params(args.params)
    name = args.theorem
    hermite_side = name in ("horth", "hdensity")
    if hermite_side:
        fam = build_family("hermite", lam=params.get("lambda"))
    else:
        fam = build_family("laurent", kappa=params.get("kappa"), a=params.get("a"))
    window = parse_range(params["window"]) if "window" in params else None
    tol = float(params.get("tol", QUAD_TOL))
    body = {"theorem": name, "family": cp.family_label(fam)}
    if name in ("horth", "lorth", "lorth-hermitian"):
        form = {"horth": HERMITE, "lorth": BILINEAR, "lorth-hermitian": HERMITIAN}[name]
        if form == HERMITIAN and not fam.unimodular:
            raise ConfigError("lorth-hermitian needs unimodular parameters, e.g. a=u(2,1)")
        if window is None:
            window = (0, 8) if hermite_side else (-(fam.kappa.k[0] + 2), fam.kappa.k[0] + 2)
        rep = gram(form, fam, window, tol, _contour(fam, form, params.get("xi"), params.get("mu"), tol))
        signs = rep.diagonal_signs()
        expected = cp._expected_signs(rep)
        ok = rep.passed(COMPARE_TOL) and signs == expected
        body.update(rep.to_json())
        body["signs_match"] = signs == expected
    else:
        if not hermite_side and not fam.unimodular:
            raise ConfigError("ldensity needs unimodular parameters, e.g. a=u(2,1)")
        rep = density_report(fam, window, tol)
        ok = rep.full_rank and rep.rank.gap >= 1e4
        body.update(rep.to_json())
    body["passed"] = bool(ok)
    emit(body, args.out)
    return 0 if ok else 1


def cmd_campaign(args) -> int:
    if args.write_config:
        cp.default_config().save(args.write_config)
        return 0
    cfg = cp.CampaignConfig.load(args.config) if args.config else cp.default_config()
    if args.report:
        cfg.outputs["report"] = args.report
    if args.checks:
        cfg.checks = _checks(args.checks)

    def progress(label, res):
        if args.verbose:
            print(f"{res.status:9s} {res.name:10s} {label}", file=sys.stderr)

    code, report = cp.run_campaign(cfg, progress=progress)
    s = report["summary"]
    print(json.dumps({k: s[k] for k in (cp.PASS, cp.FAIL, cp.NA, cp.UNDECIDED, "exit_code")}))
    for f in s["failures"]:
        print(f"{f['status']}: {f['check']} on {f['family']}", file=sys.stderr)
    return code


def cmd_spectrum(args) -> int:
    lam = parse_lambda(args.lam)
    rows = cp.emit_spectrum(lam, parse_range(args.l))
    emit({"lambda": list(lam.parts), "rows": rows}, args.out, rows)
    return 0


# -- parser -----------------------------------------------------------------------------

def _family_args(p, kinds=("hermite", "laurent")):
    p.add_argument("--family", choices=kinds, default="hermite")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--kappa")
    p.add_argument("--a", help="comma separated parameters, e.g. 2+i,1/3 or u(2,1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xopoly", description="Complex exceptional orthogonal polynomials.")
    sub = ap.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hermite", help="exceptional Hermite families")
    h.add_argument("action", choices=("gen", "verify"))
    h.add_argument("--lambda", dest="lam", required=True)
    h.add_argument("--l", default=None, help="level range LO..HI")
    h.add_argument("--checks", default="eigen,monodromy,regularity")
    h.add_argument("--out", default="json")
    h.set_defaults(func=cmd_hermite)

    lp = sub.add_parser("laurent", help="exceptional Laurent families")
    lp.add_argument("action", choices=("gen", "verify"))
    lp.add_argument("--kappa", required=True)
    lp.add_argument("--a", required=True)
    lp.add_argument("--l", default=None)
    lp.add_argument("--checks", default="eigen,structure,monodromy")
    lp.add_argument("--out", default="json")
    lp.set_defaults(func=cmd_laurent)

    r = sub.add_parser("roots", help="certified roots of a polynomial in canonical JSON")
    r.add_argument("--poly", required=True)
    r.add_argument("--precision", type=float, default=1e-30)
    r.add_argument("--policy", choices=("real", "circle"), default="real")
    r.add_argument("--out", default="json")
    r.set_defaults(func=cmd_roots)

    q = sub.add_parser("quasi", help="quasi-invariant subspaces")
    q.add_argument("action", choices=("basis",))
    _family_args(q)
    q.add_argument("--selection", default=ALL)
    q.add_argument("--window")
    q.add_argument("--out", default="json")
    q.set_defaults(func=cmd_quasi)

    g = sub.add_parser("gram", help="Gram matrix of family members under a form")
    _family_args(g)
    g.add_argument("--form", choices=(HERMITE, BILINEAR, HERMITIAN))
    g.add_argument("--window")
    g.add_argument("--xi", default="auto")
    g.add_argument("--mu", default="auto")
    g.add_argument("--tol", type=float, default=QUAD_TOL)
    g.add_argument("--compare", type=float, default=COMPARE_TOL)
    g.add_argument("--derived", action="store_true", help="compare against the derived norm law")
    g.add_argument("--out", default="json")
    g.set_defaults(func=cmd_gram)

    v = sub.add_parser("verify-theorem", help="orthogonality and density theorems")
    v.add_argument("theorem", choices=THEOREMS)
    v.add_argument("--params", nargs="*", default=[], help="KEY=VALUE: lambda, kappa, a, window, xi, mu, tol")
    v.add_argument("--out", default="json")
    v.set_defaults(func=cmd_verify_theorem)

    c = sub.add_parser("campaign", help="run a verification campaign")
    c.add_argument("--config")
    c.add_argument("--write-config", help="write the default config to this path and exit")
    c.add_argument("--report")
    c.add_argument("--checks")
    c.add_argument("--verbose", "-v", action="store_true")
    c.set_defaults(func=cmd_campaign)

    s = sub.add_parser("spectrum", help="eigenvalue and regularity table")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--l", default="0..12")
    s.add_argument("--out", default="csv")
    s.set_defaults(func=cmd_spectrum)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        mpmath.mp.dps = working_dps()
    except ValueError as exc:
        print(f"xopoly: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, ContourError, DomainError) as exc:
        print(f"xopoly: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
