"""Verification campaigns: a JSON config naming families and checks, and a JSON report.

Every check name maps to one module operation.  A check that does not apply
to a family (fixtures for a family without an embedded table, say) is
reported with status ``N/A`` rather than dropped.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import mpmath

from . import fixtures
from .forms import (BILINEAR, COMPARE_TOL, HERMITE, HERMITIAN, QUAD_TOL, density_report, gram,
                    kernel_and_extension)
from .hermite import (HermiteFamily, Partition, cehp, conjugation_oracle_constant, dg_monodromy_check,
                      potential, real_regularity, spectrum_table, t_lambda_eigencheck, w_lambda)
from .laurent import (KappaSet, LaurentFamily, conjugation_oracle_constant as l_oracle,
                      kernel_relation_check, laurent_monodromy_check, leading_law, parse_gq,
                      stated_leading_law, t_kappa_eigencheck, top_coefficient)
from .quasi import ALL, codim_real, quasi_invariant_everywhere, span_vs_quasi
from .roots import REAL, complex_roots

CHECKS = ("eigen", "monodromy", "regularity", "quasi", "codim", "structure", "gram", "kernel",
          "extension", "density", "fixtures")

PASS, FAIL, NA, UNDECIDED = "PASS", "FAIL", "N/A", "UNDECIDED"

# Hermite fixture table vs the Wronskian definition, and the determinant-sign constant
# relating the kappa = {1} table to the D-Wronskian definition.
FAMILY_SCALE = "1/2"
SIGMA = -1


class ConfigError(ValueError):
    """Malformed campaign configuration or command-line parameters."""


# -- configuration -------------------------------------------------------------

@dataclass
class FamilySpec:
    kind: str  # "hermite" or "laurent"
    parts: tuple = ()
    a: tuple = ()  # strings accepted by parse_gq

    def build(self):
        try:
            if self.kind == "hermite":
                return HermiteFamily(Partition(tuple(self.parts)))
            if self.kind == "laurent":
                kappa = KappaSet(tuple(self.parts))
                return LaurentFamily(kappa, [parse_gq(x) for x in self.a])
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown family kind {self.kind!r}")

    def to_json(self) -> dict:
        if self.kind == "hermite":
            return {"kind": "hermite", "lambda": list(self.parts)}
        return {"kind": "laurent", "kappa": list(self.parts), "a": list(self.a)}

    @classmethod
    def from_json(cls, obj: dict) -> "FamilySpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ConfigError(f"family entry needs a 'kind': {obj!r}")
        kind = obj["kind"]
        try:
            if kind == "hermite":
                spec = cls("hermite", tuple(int(x) for x in obj.get("lambda", [])))
            elif kind == "laurent":
                spec = cls("laurent", tuple(int(x) for x in obj.get("kappa", [])),
                           tuple(str(x) for x in obj.get("a", [])))
            else:
                raise ConfigError(f"unknown family kind {kind!r}")
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad family entry {obj!r}: {exc}") from exc
        spec.build()  # validates
        return spec


@dataclass
class CampaignConfig:
    families: list
    checks: list = field(default_factory=lambda: list(CHECKS))
    tolerances: dict = field(default_factory=lambda: {"quad": QUAD_TOL, "compare": COMPARE_TOL})
    windows: dict = field(default_factory=dict)  # family label -> [lo, hi]
    outputs: dict = field(default_factory=lambda: {"report": "campaign_report.json"})

    def __post_init__(self):
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise ConfigError(f"unknown checks {bad}; choose from {list(CHECKS)}")
        for key in ("quad", "compare"):
            v = self.tolerances.get(key)
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"tolerance {key!r} must be a positive number")
        for k, w in self.windows.items():
            if not (isinstance(w, (list, tuple)) and len(w) == 2 and all(isinstance(x, int) for x in w)
                    and w[0] <= w[1]):
                raise ConfigError(f"window for {k} must be [lo, hi] integers")

    def to_json(self) -> dict:
        return {"families": [f.to_json() for f in self.families], "checks": list(self.checks),
                "tolerances": dict(self.tolerances), "windows": {k: list(v) for k, v in self.windows.items()},
                "outputs": dict(self.outputs)}

    @classmethod
    def from_json(cls, obj: dict) -> "CampaignConfig":
        if not isinstance(obj, dict) or "families" not in obj:
            raise ConfigError("config needs a 'families' list")
        fams = [FamilySpec.from_json(f) for f in obj["families"]]
        kw = {k: obj[k] for k in ("checks", "tolerances", "windows", "outputs") if k in obj}
        if "tolerances" in kw:
            kw["tolerances"] = {"quad": QUAD_TOL, "compare": COMPARE_TOL, **kw["tolerances"]}
        if "windows" in kw:
            kw["windows"] = {k: tuple(v) if isinstance(v, list) else v for k, v in kw["windows"].items()}
        return cls(fams, **kw)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def loads(cls, text: str) -> "CampaignConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_json(obj)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def load(cls, path) -> "CampaignConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.loads(text)

    def __eq__(self, other):
        return isinstance(other, CampaignConfig) and self.to_json() == other.to_json()


def default_config() -> CampaignConfig:
    """The acceptance families: six partitions, four kappa sets with generic and unimodular a."""
    fams = [FamilySpec("hermite", p) for p in [(1,), (2,), (1, 1), (2, 1), (2, 2), (1, 1, 1)]]
    generic = {(1,): ("2+i",), (2, 1): ("2+i", "1/3"), (3, 1): ("1+2i", "-3/2"),
               (3, 2, 1): ("2+i", "1/3", "-1+i")}
    unimod = {(1,): ("u(2,1)",), (2, 1): ("u(2,1)", "u(1,2)"), (3, 1): ("u(3,1)", "u(1,1)"),
              (3, 2, 1): ("u(2,1)", "u(1,3)", "u(3,2)")}
    for k in generic:
        fams.append(FamilySpec("laurent", k, generic[k]))
        fams.append(FamilySpec("laurent", k, unimod[k]))
    return CampaignConfig(fams)


# -- checks --------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    status: str
    residual: Optional[float] = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "residual": self.residual,
                "details": self.details}


def _status(ok) -> str:
    if ok == UNDECIDED:
        return UNDECIDED
    return PASS if ok else FAIL


def _f(x) -> float:
    return float(mpmath.mpf(abs(x))) if x is not None else None


def family_label(fam) -> str:
    if isinstance(fam, HermiteFamily):
        return f"hermite lambda={fam.lam}"
    return f"laurent {fam.label()}"


def _lrange(fam, window):
    if isinstance(fam, HermiteFamily):
        return fam.levels(window[1])
    return list(range(window[0], window[1] + 1))


def _gram_window(fam, cfg: CampaignConfig):
    w = cfg.windows.get(family_label(fam))
    if w:
        return tuple(w)
    if isinstance(fam, HermiteFamily):
        return (0, 8)
    k1 = fam.kappa.k[0]
    return (-(k1 + 2), k1 + 2)


def check_eigen(fam, cfg) -> CheckResult:
    window = _gram_window(fam, cfg)
    consts, flagged, ok = {}, [], True
    for l in _lrange(fam, window):
        if isinstance(fam, HermiteFamily):
            _, c = t_lambda_eigencheck(fam.lam, l)
            oracle = conjugation_oracle_constant(fam.lam, l)
            expected, stated = 2 * (l - fam.lam.n), 2 * l + 1
        else:
            _, c = t_kappa_eigencheck(fam, l)
            oracle = l_oracle(fam, l)
            expected, stated = -l * l, l * l
        consts[l] = str(c)
        ok = ok and c == oracle and c == expected
        if c != stated:
            flagged.append(l)
    law = "2(l-n)" if isinstance(fam, HermiteFamily) else "-l^2"
    stated_text = "2l+1" if isinstance(fam, HermiteFamily) else "l^2"
    return CheckResult("eigen", _status(ok), 0.0 if ok else None,
                       {"constants": consts, "law": law, "stated_law": stated_text,
                        "differs_from_stated_at": flagged})


def check_monodromy(fam, cfg) -> CheckResult:
    rep: list = []
    if isinstance(fam, HermiteFamily):
        ok = dg_monodromy_check(potential(fam.lam), report=rep)
    else:
        ok = laurent_monodromy_check(fam, report=rep)
    poles = [{k: (str(v) if isinstance(v, complex) else v) for k, v in r.items()} for r in rep]
    return CheckResult("monodromy", _status(ok), None, {"poles": poles})


def check_regularity(fam, cfg) -> CheckResult:
    if not isinstance(fam, HermiteFamily):
        return CheckResult("regularity", NA, None, {"reason": "real regularity concerns Hermite families"})
    lam = fam.lam
    W = w_lambda(lam)
    has_real = W.degree >= 1 and bool(complex_roots(W).of_class(REAL))
    krein_adler = has_real != lam.is_double()
    window = _gram_window(fam, cfg)
    regular = {l: real_regularity(lam, l) for l in fam.levels(window[1])}
    ok = krein_adler and (not lam.is_double() or all(regular.values()))
    details = {"double": lam.is_double(), "real_zeros": has_real,
               "regular_levels": [l for l, r in regular.items() if r]}
    if lam.parts == (1,):
        pat = fixtures.regularity_pattern(max(12, window[1]))
        ok = ok and pat["passed"]
        details["pattern_mismatches"] = pat["mismatches"]
    return CheckResult("regularity", _status(ok), None, details)


def check_quasi(fam, cfg) -> CheckResult:
    window = _gram_window(fam, cfg)
    bad = []
    for l in _lrange(fam, window):
        p = fam.H(l) if isinstance(fam, HermiteFamily) else fam.P(l)
        if not quasi_invariant_everywhere(p, fam, ALL):
            bad.append(l)
    return CheckResult("quasi", _status(not bad), None, {"failing_levels": bad})


def check_codim(fam, cfg) -> CheckResult:
    equal, defect, details = span_vs_quasi(fam)
    details = {k: (float(v) if isinstance(v, mpmath.mpf) else v) for k, v in details.items()}
    details["defect"] = defect
    if isinstance(fam, HermiteFamily):
        ok = equal and defect == 0
        try:
            details["codim_real"] = codim_real(fam)
        except Exception as exc:  # mismatch between root count and subspace dimensions
            details["codim_real_error"] = str(exc)
            ok = False
    else:
        ok = defect == fam.kappa.n and details["members_quasi_invariant"]
        details["expected_defect"] = fam.kappa.n
    if details.get("rank_status") == UNDECIDED:
        return CheckResult("codim", UNDECIDED, None, details)
    return CheckResult("codim", _status(ok), None, details)


def check_structure(fam, cfg) -> CheckResult:
    window = _gram_window(fam, cfg)
    if isinstance(fam, HermiteFamily):
        lam = fam.lam
        bad = [l for l in fam.levels(max(window[1], 12)) if cehp(lam, l).degree != l + lam.size - lam.n]
        return CheckResult("structure", _status(not bad), None,
                           {"law": "deg H = l + |lambda| - n", "failing_levels": bad})
    rel = all(kernel_relation_check(fam, j) for j in range(1, fam.kappa.n + 1))
    k1 = fam.kappa.k[0]
    ls = range(-(k1 + 3), k1 + 4)
    stated_bad = [l for l in ls if top_coefficient(fam, l) != SIGMA * stated_leading_law(fam, l)]
    derived_bad = [l for l in ls if top_coefficient(fam, l) != leading_law(fam, l)]
    ok = rel and not stated_bad
    return CheckResult("structure", _status(ok), None,
                       {"kernel_relations": rel, "sigma": SIGMA,
                        "stated_law": "sigma * detV(l,k) * prod k_j", "stated_law_failures": stated_bad,
                        "derived_law": "(-1)^n * detV(l,k) * prod a_j", "derived_law_failures": derived_bad})


def _gram_reports(fam, cfg, cache: dict):
    key = family_label(fam)
    if key not in cache:
        tol = cfg.tolerances["quad"]
        window = _gram_window(fam, cfg)
        if isinstance(fam, HermiteFamily):
            cache[key] = {HERMITE: gram(HERMITE, fam, window, tol)}
        else:
            reps = {BILINEAR: gram(BILINEAR, fam, window, tol)}
            if fam.unimodular:
                reps[HERMITIAN] = gram(HERMITIAN, fam, window, tol)
            cache[key] = reps
    return cache[key]


def _expected_signs(rep) -> dict:
    out = {}
    for a, j in enumerate(rep.indices):
        b = rep._partner(a)
        if b is not None:
            y = rep.predicted[a][b]
            out[j] = 0 if y == 0 else (1 if y > 0 else -1)
    return out


def check_gram(fam, cfg, cache) -> CheckResult:
    tol = cfg.tolerances["compare"]
    reps = _gram_reports(fam, cfg, cache)
    ok, worst, details = True, 0.0, {}
    for form, rep in reps.items():
        signs = rep.diagonal_signs()
        sign_ok = signs == _expected_signs(rep)
        passed = rep.passed(tol) and sign_ok
        worst = max(worst, _f(rep.residual))
        details[form] = {"residual": _f(rep.residual), "corrected_residual": _f(rep.corrected_residual),
                         "oracle_residual": _f(rep.oracle_residual), "signs_match": sign_ok,
                         "negative": [j for j, s in signs.items() if s < 0],
                         "zero": [j for j, s in signs.items() if s == 0], "passed": passed}
        ok = ok and passed
    return CheckResult("gram", _status(ok), worst, details)


def check_kernel(fam, cfg, cache) -> CheckResult:
    reps = _gram_reports(fam, cfg, cache)
    if isinstance(fam, HermiteFamily):
        rep = reps[HERMITE]
        from .forms import gram_kernel
        null, dec = gram_kernel(rep.matrix)
        return CheckResult("kernel", _status(not null and dec.status != UNDECIDED), None,
                           {"kernel_dim": len(null), "expected": 0})
    ext = kernel_and_extension(reps[BILINEAR], fam.kappa.n)
    ok = ext.kernel_dim == fam.kappa.n and ext.kernel_rank.status != UNDECIDED
    return CheckResult("kernel", _status(ok), None,
                       {"kernel_dim": ext.kernel_dim, "expected": fam.kappa.n,
                        "rank_gap": float(ext.kernel_rank.gap)})


def check_extension(fam, cfg, cache) -> CheckResult:
    if isinstance(fam, HermiteFamily):
        return CheckResult("extension", NA, None, {"reason": "the Hermite form is nondegenerate on the span"})
    tol = cfg.tolerances["compare"]
    reps = _gram_reports(fam, cfg, cache)
    ok, worst, details = True, 0.0, {}
    for form, rep in reps.items():
        ext = kernel_and_extension(rep, fam.kappa.n)
        passed = ext.passed(fam.kappa.n, tol)
        worst = max(worst, _f(ext.dual_residual))
        details[form] = {**ext.to_json(), "passed": passed}
        ok = ok and passed
    return CheckResult("extension", _status(ok), worst, details)


def check_density(fam, cfg) -> CheckResult:
    if not isinstance(fam, HermiteFamily) and not fam.unimodular:
        return CheckResult("density", NA, None, {"reason": "the Hermitian form needs unimodular a"})
    rep = density_report(fam, tol=cfg.tolerances["quad"])
    status = UNDECIDED if rep.rank.status == UNDECIDED else _status(rep.full_rank and rep.rank.gap >= 1e4)
    return CheckResult("density", status, None, rep.to_json())


def check_fixtures(fam, cfg) -> CheckResult:
    if isinstance(fam, HermiteFamily):
        if fam.lam.parts != (1,):
            return CheckResult("fixtures", NA, None, {"reason": "no embedded table"})
        rep = fixtures.hermite_fixture_report()
    else:
        if fam.kappa.k != (1,):
            return CheckResult("fixtures", NA, None, {"reason": "no embedded table"})
        rep = fixtures.laurent_fixture_report(fam.a[0])
    return CheckResult("fixtures", _status(rep.passed()), None, rep.to_json())


_SIMPLE = {"eigen": check_eigen, "monodromy": check_monodromy, "regularity": check_regularity,
           "quasi": check_quasi, "codim": check_codim, "structure": check_structure,
           "density": check_density, "fixtures": check_fixtures}
_GRAM = {"gram": check_gram, "kernel": check_kernel, "extension": check_extension}


def run_check(name: str, fam, cfg: CampaignConfig, cache: Optional[dict] = None) -> CheckResult:
    cache = {} if cache is None else cache
    t0 = time.perf_counter()
    try:
        if name in _SIMPLE:
            res = _SIMPLE[name](fam, cfg)
        else:
            res = _GRAM[name](fam, cfg, cache)
    except Exception as exc:  # a crashing check is a failure, never a silent skip
        res = CheckResult(name, FAIL, None, {"error": f"{type(exc).__name__}: {exc}"})
    res.details["seconds"] = round(time.perf_counter() - t0, 3)
    return res


# -- campaign --------------------------------------------------------------------

def _convention_constants() -> dict:
    return {"family_scale": FAMILY_SCALE, "sigma": SIGMA,
            "eigen_constants": {"T_lambda": "2(l-n)", "T_kappa": "-l^2"},
            "stated_eigen_constants": {"T_lambda": "2l+1", "T_kappa": "l^2"}}


def run_campaign(config: CampaignConfig, write: bool = True, progress=None) -> tuple:
    """Run every configured check on every family; returns (exit_code, report)."""
    families = []
    counts = {PASS: 0, FAIL: 0, NA: 0, UNDECIDED: 0}
    for spec in config.families:
        fam = spec.build()
        cache: dict = {}
        results = []
        for name in config.checks:
            res = run_check(name, fam, config, cache)
            counts[res.status] += 1
            results.append(res.to_json())
            if progress:
                progress(family_label(fam), res)
        families.append({"family": family_label(fam), "spec": spec.to_json(), "checks": results})
    failures = [{"family": f["family"], "check": c["name"], "status": c["status"]}
                for f in families for c in f["checks"] if c["status"] in (FAIL, UNDECIDED)]
    code = 0 if not failures else 1
    report = {"config": config.to_json(), "constants": _convention_constants(), "families": families,
              "summary": {**counts, "failures": failures, "exit_code": code}}
    if write and config.outputs.get("report"):
        Path(config.outputs["report"]).write_text(json.dumps(report, indent=2, default=str) + "\n")
    return code, report


# -- tables ------------------------------------------------------------------------

def emit_spectrum(lam: Partition, lrange) -> list:
    lo, hi = lrange
    return [r for r in spectrum_table(lam, hi) if r["l"] >= lo]


def rows_to_csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()
