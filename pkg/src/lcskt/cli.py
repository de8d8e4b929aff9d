"""``lcskt`` command line: checks, Hermitian invariants, sweeps and scenario replay."""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import linalg, sampling
from .almost_abelian import (
    AlmostAbelianData,
    IncompatibleJ1,
    build_almost_abelian,
    eigen_diagnostic,
    lattice_screen,
    lcskt_decide_nondegenerate,
    lee_form_almost_abelian,
    oracle_comparison,
    ricci_forms,
    skt_check_almost_abelian,
)
from .catalog import UnknownName, UnknownScenario, catalog_get, run_scenario, scenario_ids, solution_text
from .complexgeo import (
    ComplexStructure,
    InvalidParams,
    NonNilpotentFamilyParams,
    NotComplexStructure,
    to_complex_frame,
)
from .dsl import ParseError, UnboundParam, format_complex_dsl, parse_complex_dsl, parse_real_dsl, parse_scalar
from .exterior import (
    JacobiViolation,
    LieAlgebra,
    format_form,
    is_unimodular,
    lie_algebra_validate,
    lower_central_series,
    salamon_string,
)
from .hermitian import (
    Classification,
    HermitianStructure,
    NilpotentMetricParams,
    NotCompatible,
    NotIntegrable,
    NotPositiveDefinite,
    classify_metric,
    dH_closed_form_check,
    family_hermitian,
    lcskt_solve,
)
from .scalar import ONE, ZERO, Scalar, format_scalar

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_JACOBI = 3
EXIT_INTEGRABILITY = 4
EXIT_POSITIVITY = 5
EXIT_MISMATCH = 10
EXIT_SWEEP = 11

SWEEP_FAMILIES = ("nonnil", "nil-e0", "nil-e1", "almost-abelian")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


# -- inputs ------------------------------------------------------------------------

def _params(args) -> dict[str, Scalar]:
    out = {}
    for item in args.param or []:
        name, sep, value = item.partition("=")
        if not sep or not re.fullmatch(r"[A-Za-z_]\w*", name.strip()):
            raise CliError(EXIT_USAGE, f"--param expects NAME=VALUE, got {item!r}")
        out[name.strip()] = parse_scalar(value)
    return out


@dataclasses.dataclass
class Loaded:
    source: str
    algebra: LieAlgebra
    J: ComplexStructure | None
    metric: list | None
    complex_text: str | None = None
    data: AlmostAbelianData | None = None


def _read(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {source}: {exc.strerror}") from None


def _is_complex(text: str) -> bool:
    return re.search(r"(?m)^\s*d\d+\s*=", text) is not None


def load(source: str, params: dict, validate: bool = True) -> Loaded:
    """A file path, ``-`` for stdin, or ``catalog:NAME``."""
    if source.startswith("catalog:"):
        name = source.split(":", 1)[1]
        l8_params = {k: v.re for k, v in params.items() if k in ("p", "q", "s")} if name == "l8" else {}
        e = catalog_get(name, **l8_params)
        return Loaded(source, e.algebra, e.J, e.metric, e.complex_text, e.data)
    text = _read(source)
    if _is_complex(text):
        eqs = parse_complex_dsl(text, params)
        g, J = eqs.realify(validate=validate)
        return Loaded(source, g, J, None, format_complex_dsl(eqs.differentials))
    return Loaded(source, parse_real_dsl(text, params, validate=validate), None, None)


def _split_top(text: str) -> list[str]:
    """Split on commas outside parentheses."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def parse_pairs(text: str, dim: int) -> ComplexStructure:
    """``"1>2,3>4,5>6"`` meaning ``J e_1 = e_2`` and so on."""
    pairs = []
    for item in _split_top(text):
        m = re.fullmatch(r"(\d+)\s*>\s*(\d+)", item)
        if not m:
            raise CliError(EXIT_USAGE, f"--J expects pairs like 1>2, got {item!r}")
        pairs.append((int(m.group(1)), int(m.group(2))))
    return ComplexStructure.from_pairs(dim, pairs)


def parse_metric(text: str, dim: int, J: ComplexStructure) -> list:
    """``identity``, ``diag:a,b,...`` or ``nil:r=..,s=..,t=..[,u=..,v=..,z=..]``."""
    if text == "identity":
        return linalg.identity(dim, ONE, ZERO)
    kind, _, body = text.partition(":")
    if kind == "diag":
        vals = [parse_scalar(x) for x in _split_top(body)]
        if len(vals) != dim:
            raise CliError(EXIT_USAGE, f"diag metric needs {dim} entries")
        return [[vals[i] if i == j else ZERO for j in range(dim)] for i in range(dim)]
    if kind == "nil":
        if dim != 6:
            raise CliError(EXIT_USAGE, "nil metrics live on 6-dimensional coframes")
        kw = {}
        for item in _split_top(body):
            name, sep, value = item.partition("=")
            if not sep or name.strip() not in ("r", "s", "t", "u", "v", "z"):
                raise CliError(EXIT_USAGE, f"bad nil metric entry {item!r}")
            kw[name.strip()] = parse_scalar(value)
        half = Scalar(Fraction(1, 2))
        base = dict(r=half, s=half, t=half)
        return NilpotentMetricParams(**{**base, **kw}).metric(J)
    raise CliError(EXIT_USAGE, f"unknown metric {text!r}")


def hermitian_from_args(args, loaded: Loaded) -> HermitianStructure:
    g = loaded.algebra
    if args.J:
        J = parse_pairs(args.J, g.dim)
    elif loaded.J is not None:
        J = loaded.J
    else:
        raise CliError(EXIT_USAGE, "no complex structure: pass --J for real structure equations")
    if args.metric:
        metric = parse_metric(args.metric, g.dim, J)
    else:
        metric = loaded.metric if loaded.metric is not None and not args.J else linalg.identity(g.dim, ONE, ZERO)
    return HermitianStructure(g, J, metric)


# -- reports ------------------------------------------------------------------------

def _flags(h: HermitianStructure) -> dict:
    return dataclasses.asdict(classify_metric(h))


def cmd_parse(args) -> tuple[dict, int]:
    loaded = load(args.file, _params(args), validate=False)
    report = {"command": "parse", "input": loaded.source, "algebra": salamon_string(loaded.algebra),
              "complex": loaded.complex_text}
    lie_algebra_validate(loaded.algebra, raise_on_error=True)
    return report, EXIT_OK


def cmd_check(args) -> tuple[dict, int]:
    loaded = load(args.file, _params(args), validate=False)
    g = loaded.algebra
    v = lie_algebra_validate(g)
    report = {"command": "check", "input": loaded.source, "algebra": salamon_string(g), "dim": g.dim}
    if not v.ok:
        report.update(jacobi="violated", triple=list(v.triple), step=None, nilpotent=None, unimodular=None,
                      lower_central_series=None)
        return report, EXIT_JACOBI
    dims, step = lower_central_series(g)
    report.update(jacobi="ok", triple=None, step=step, nilpotent=step is not None, unimodular=is_unimodular(g),
                  lower_central_series=dims)
    return report, EXIT_OK


def _hermitian_report(command: str, h: HermitianStructure, loaded: Loaded) -> dict:
    return {
        "command": command,
        "input": loaded.source,
        "algebra": salamon_string(h.algebra),
        "J": _pairs_of(h.J),
        "omega": format_form(h.omega),
        "d_omega": format_form(h.algebra.d(h.omega)),
        "H": format_form(h.torsion),
        "dH": format_form(h.dH),
        "lee": format_form(h.lee),
    }


def _pairs_of(J: ComplexStructure) -> list[str]:
    """``"a>b"`` (or ``"a>-b"``) when ``J e_a = +-e_b``; matrix columns otherwise."""
    out = []
    cols = [list(c) for c in zip(*J.matrix)]
    for a, col in enumerate(cols, start=1):
        nz = [i for i, x in enumerate(col) if x != 0]
        if len(nz) != 1 or col[nz[0]] not in (ONE, -ONE):
            return [",".join(format_scalar(x) for x in c) for c in cols]
        out.append(f"{a}>{'' if col[nz[0]] == ONE else '-'}{nz[0] + 1}")
    return out


def cmd_hermitian(args) -> tuple[dict, int]:
    loaded = load(args.file, _params(args))
    h = hermitian_from_args(args, loaded)
    report = _hermitian_report("hermitian", h, loaded)
    report["flags"] = _flags(h)
    return report, EXIT_OK


def cmd_solve(args) -> tuple[dict, int]:
    loaded = load(args.file, _params(args))
    h = hermitian_from_args(args, loaded)
    sol = lcskt_solve(h)
    report = _hermitian_report("solve", h, loaded)
    report.update(
        classification=sol.classification.value,
        alpha=None if sol.particular is None or sol.homogeneous_basis else format_form(sol.particular),
        particular=None if sol.particular is None else format_form(sol.particular),
        span=[format_form(b) for b in sol.homogeneous_basis],
        dimension=sol.dimension if sol.particular is not None else None,
        skt_but_not_lcskt=sol.skt_but_not_lcskt,
        summary=solution_text(sol),
    )
    return report, EXIT_OK


def _matrix(text: str, size: int) -> list[list[Scalar]]:
    rows = [r for r in text.split(";") if r.strip()]
    m = [[parse_scalar(x) for x in _split_top(r)] for r in rows]
    if len(m) != size or any(len(r) != size for r in m):
        raise CliError(EXIT_USAGE, f"expected a {size}x{size} matrix (rows separated by ';')")
    return m


def _almost_abelian_data(args) -> AlmostAbelianData:
    params = _params(args)
    if args.data:
        name = args.data
        kw = {k: v.re for k, v in params.items() if k in ("p", "q", "s")} if name == "l8" else {}
        entry = catalog_get(name, **kw)
        if entry.data is None:
            raise CliError(EXIT_USAGE, f"{name} is not stored as almost abelian data")
        return entry.data
    if args.A is None:
        raise CliError(EXIT_USAGE, "pass --data NAME or --A (with optional --a, --v, --J1)")
    n = args.n
    m = 2 * n - 2
    v = [parse_scalar(x) for x in _split_top(args.v)] if args.v else [ZERO] * m
    J1 = _matrix(args.J1, m) if args.J1 else None
    return AlmostAbelianData(n, parse_scalar(args.a), v, _matrix(args.A, m), J1)


def cmd_almost_abelian(args) -> tuple[dict, int]:
    d = _almost_abelian_data(args)
    g, J, h = build_almost_abelian(d)
    sol = lcskt_solve(h)
    ric = ricci_forms(d)
    report = {
        "command": "almost-abelian",
        "n": d.n,
        "algebra": salamon_string(g),
        "omega": format_form(h.omega),
        "H": format_form(h.torsion),
        "dH": format_form(h.dH),
        "lee": format_form(h.lee),
        "lee_formula": format_form(lee_form_almost_abelian(d)),
        "ricci_chern": format_form(ric.chern),
        "ricci_bismut": format_form(ric.bismut),
        "skt": skt_check_almost_abelian(d),
        "normal": d.is_normal,
        "unimodular": is_unimodular(g),
        "flags": _flags(h),
        "classification": sol.classification.value,
        "summary": solution_text(sol),
        "nondegenerate": None,
        "eigenvalues": None,
        "lattice": [],
    }
    if d.det_A != 0:
        v = lcskt_decide_nondegenerate(d)
        report["nondegenerate"] = {
            "lambda": None if v.lambda_value is None else format_scalar(v.lambda_value),
            "any_lambda": v.any_lambda,
            "lambda1_free": v.lambda1_free,
            "lcskt": v.lcskt,
        }
        ev = eigen_diagnostic(d)
        report["eigenvalues"] = [{"re": round(z.real, 12), "im": round(z.imag, 12), "bin": b}
                                 for z, b in zip(ev.eigenvalues, ev.bins)]
    for t0 in args.t0 or []:
        res = lattice_screen(d, t0, args.tolerance)
        report["lattice"].append({"t0": t0, "integral": res.integral,
                                  "coefficients": [round(c, 12) for c in res.coefficients]})
    return report, EXIT_OK


# -- sweep ---------------------------------------------------------------------------

_METRIC_NAMES = ("r", "s", "t", "u", "v", "z")


def _forced_metric(rng, forced: dict) -> NilpotentMetricParams:
    keep = {k: v for k, v in forced.items() if k in _METRIC_NAMES}
    for _ in range(1000):
        m = sampling.nilpotent_metric(rng)
        try:
            return dataclasses.replace(m, **keep)
        except NotPositiveDefinite:
            continue
    raise CliError(EXIT_USAGE, "forced metric parameters are never positive definite")


def _sweep_draw(family: str, rng, forced: dict) -> tuple[dict, dict]:
    """``(inputs, checks)`` for one draw; every check value is a bool."""
    if family == "almost-abelian":
        d = sampling.almost_abelian(rng)
        res = oracle_comparison(d, rng)
        inputs = {"a": format_scalar(d.a), "v": [format_scalar(x) for x in d.v],
                  "A": [[format_scalar(x) for x in r] for r in d.A],
                  "J1": [[format_scalar(x) for x in r] for r in d.J1]}
        checks = {"prop45_oracle": res.checked == res.agreed}
        if res.decision_agrees is not None:
            checks["nondegenerate_decision"] = res.decision_agrees
        return inputs, checks
    metric = _forced_metric(rng, forced)
    if family == "nonnil":
        p = sampling.nonnilpotent_params(rng)
        fam = {k: forced[k] for k in ("A", "E", "b") if k in forced}
        p = NonNilpotentFamilyParams(**{**dataclasses.asdict(p), **fam})
    else:
        eps = 1 if family == "nil-e1" else 0
        fixed = {k: v for k, v in forced.items() if k in ("A", "B", "C", "D")}
        if "rho" in forced:
            fixed["rho"] = int(forced["rho"].re)
        p = sampling.nilpotent_params(rng, eps, fixed)
    h = family_hermitian(p, metric)
    sol = lcskt_solve(h)
    inputs = {k: format_scalar(v) if isinstance(v, Scalar) else v for k, v in dataclasses.asdict(p).items()}
    inputs.update({k: format_scalar(getattr(metric, k)) for k in _METRIC_NAMES})
    checks = {"dH_closed_form": dH_closed_form_check(p, metric, h)}
    if family == "nonnil":
        checks["not_lcskt"] = sol.classification == Classification.NOT_LCSKT
    checks["dH_zero"] = h.dH.is_zero()
    inputs["dH"] = format_form(to_complex_frame(h.dH))
    return inputs, checks


def cmd_sweep(args) -> tuple[dict, int]:
    forced = _params(args)
    counts: dict[str, dict[str, int]] = {}
    failures = []
    for i in range(args.draws):
        rng = sampling.make_rng(args.seed, args.family, i)
        inputs, checks = _sweep_draw(args.family, rng, forced)
        failed = []
        for name, ok in checks.items():
            c = counts.setdefault(name, {"pass": 0, "fail": 0})
            if name == "dH_zero":
                c["pass" if ok else "fail"] += 1  # informational
                continue
            c["pass" if ok else "fail"] += 1
            if not ok:
                failed.append(name)
        if failed:
            repro = {"family": args.family, "seed": args.seed, "draw": i, "failed": failed, "inputs": inputs,
                     "forced": {k: format_scalar(v) for k, v in forced.items()}}
            path = Path(args.reproducer_dir) / f"lcskt-repro-{args.family}-{args.seed}-{i}.json"
            path.write_text(json.dumps(repro, indent=2) + "\n", encoding="utf-8")
            failures.append({"draw": i, "failed": failed, "reproducer": str(path)})
    dh_zero = counts.pop("dH_zero", None)
    report = {"command": "sweep", "family": args.family, "draws": args.draws, "seed": args.seed,
              "forced": {k: format_scalar(v) for k, v in forced.items()}, "checks": counts,
              "dH_zero_draws": None if dh_zero is None else dh_zero["pass"], "failures": failures}
    return report, EXIT_SWEEP if failures else EXIT_OK


# -- reproduce -----------------------------------------------------------------------

def cmd_reproduce(args) -> tuple[dict, int]:
    if args.all == bool(args.scenario):
        raise CliError(EXIT_USAGE, "pass a scenario id or --all")
    ids = scenario_ids() if args.all else [args.scenario]
    rows = [run_scenario(i, args.tolerance).to_dict() for i in ids]
    mismatches = [r["id"] for r in rows if not r["match"]]
    report = {"command": "reproduce", "scenarios": rows, "mismatches": mismatches}
    return report, EXIT_MISMATCH if mismatches else EXIT_OK


def cmd_list(args) -> tuple[dict, int]:
    return {"command": "list", "scenarios": scenario_ids()}, EXIT_OK


# -- plumbing ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="emit a JSON report")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0, help="seed for sampling")
    p.add_argument("--param", action="append", default=d, metavar="NAME=VAL",
                   help="bind (or force, for sweep) a parameter; repeatable")
    p.add_argument("--tolerance", type=float, default=argparse.SUPPRESS if suppress else 1e-9,
                   help="float tolerance of the lattice screen")
    p.add_argument("--timing", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="add wall-clock time to the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcskt", description=__doc__)
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        _common(p, suppress=True)
        p.set_defaults(func=func)
        return p

    def hermitian_opts(p):
        p.add_argument("file", help="DSL file, '-' for stdin, or catalog:NAME")
        p.add_argument("--J", help="complex structure as pairs, e.g. 1>2,3>4,5>6")
        p.add_argument("--metric", help="identity | diag:a,b,... | nil:r=..,s=..,t=..,u=..,v=..,z=..")

    p = add("parse", cmd_parse, "parse a file and print canonical structure equations")
    p.add_argument("file")
    p = add("check", cmd_check, "Jacobi identity, nilpotency step, unimodularity")
    p.add_argument("file")
    hermitian_opts(add("hermitian", cmd_hermitian, "fundamental form, torsion, Lee form, metric flags"))
    hermitian_opts(add("solve", cmd_solve, "solve d alpha = 0, dH = alpha ^ H"))
    p = add("almost-abelian", cmd_almost_abelian, "almost abelian data (a, v, A, J1)")
    p.add_argument("--data", help="catalog entry (l8, l23_0)")
    p.add_argument("--n", type=int, default=3, help="half dimension")
    p.add_argument("--a", default="0")
    p.add_argument("--v", help="comma-separated vector")
    p.add_argument("--A", help="matrix, rows separated by ';'")
    p.add_argument("--J1", help="matrix, rows separated by ';'")
    p.add_argument("--t0", type=float, action="append", help="lattice screen time; repeatable")
    p = add("sweep", cmd_sweep, "randomized identity checks")
    p.add_argument("--family", choices=SWEEP_FAMILIES, required=True)
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--reproducer-dir", default=".")
    p = add("reproduce", cmd_reproduce, "replay registered scenarios")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--all", action="store_true")
    add("list", cmd_list, "list scenario ids")
    return parser


def _human(report: dict, indent: str = "") -> str:
    lines = []
    for k, v in report.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_human(v, indent + "  "))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{indent}{k}:")
            lines += [indent + "  - " + ", ".join(f"{a}={b}" for a, b in item.items()) for item in v]
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(x for x in lines if x)


_ERRORS = [
    ((ParseError, UnboundParam, UnknownName, InvalidParams, IncompatibleJ1), EXIT_USAGE),
    ((UnknownScenario,), EXIT_USAGE),
    ((JacobiViolation,), EXIT_JACOBI),
    ((NotIntegrable, NotComplexStructure), EXIT_INTEGRABILITY),
    ((NotPositiveDefinite, NotCompatible), EXIT_POSITIVITY),
]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except CliError as exc:
        return _fail(args, exc.code, "usage", str(exc))
    except tuple(e for group, _ in _ERRORS for e in group) as exc:
        code = next(c for group, c in _ERRORS if isinstance(exc, group))
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        return _fail(args, code, type(exc).__name__, msg)
    if args.timing:
        report["timing_s"] = round(time.perf_counter() - start, 6)
    _emit(args, report)
    return code


def _emit(args, report: dict):
    if args.json:
        sys.stdout.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(_human(report) + "\n")


def _fail(args, code: int, kind: str, message: str) -> int:
    report = {"command": args.command, "error": kind, "message": message, "exit_code": code}
    if args.json:
        _emit(args, report)
    else:
        sys.stderr.write(f"lcskt: {kind}: {message}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
