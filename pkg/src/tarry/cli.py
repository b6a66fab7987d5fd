"""Command-line front end: ``tarry {analyze,order,bounds,estimate,verify}``.

Every report is a JSON object with ``"schema": "tarry-report/1"``, the
subcommand and the full run configuration, so the configuration alone fixes
every output byte.  ``--format text`` prints the same content as indented
``key: value`` lines.  Exit codes: 0 ok, 2 input error, 3 failed check or
disagreement between estimate and bounds.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field

from .criteria import SearchTooLarge, convergence_report
from .exponents import ShapeError, exponent_matrix, is_decomposable, load_polynomial, rank_exact, senior_form_support
from .lemmas import verify_lemma1, verify_lemma2
from .nlorder import high_member, nl_sort
from .quad import ShellConfig, classify_empirical
from .structure import DEFAULT_DELTA, prop3_rank_check, shape_structure, singular_fraction, structure_decompose

SCHEMA = "tarry-report/1"
EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


@dataclass
class RunConfig:
    subcommand: str
    poly: str | None = None
    seed: int = 42
    trials: int = 500
    samples: int = 100_000
    two_k: int | None = None
    a_max: float = 64.0
    shells: int = 8
    eps: float = 0.1
    lam: float = 1e-12
    delta: float = DEFAULT_DELTA
    k: int = 2
    min_fraction: float = 0.99
    checks: list = field(default_factory=list)
    lemma1: list | None = None
    exponents: list | None = None
    format: str = "json"

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("format")
        d["lambda"] = _num(d.pop("lam"))
        return d


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _vars(indices) -> list[int]:
    return [i + 1 for i in sorted(indices)]


def _parse_exponents(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad exponent list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tarry", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, poly_required=True):
        sp.add_argument("--poly", required=poly_required, help="polynomial JSON file")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    common(sub.add_parser("analyze", help="shape, exponent matrix, rank, structure, bounds"))
    common(sub.add_parser("order", help="n.-l. sorted monomials"))
    common(sub.add_parser("bounds", help="divergence/convergence certificates"))

    est = sub.add_parser("estimate", help="shell Monte Carlo decay diagnostic")
    common(est)
    est.add_argument("--two-k", type=int, required=True)
    est.add_argument("--a-max", type=float, default=64.0)
    est.add_argument("--samples", type=int, default=100_000)
    est.add_argument("--seed", type=int, default=42)
    est.add_argument("--shells", type=int, default=8)
    est.add_argument("--eps", type=float, default=0.1)

    ver = sub.add_parser("verify", help="lemma and proposition checks")
    common(ver, poly_required=False)
    ver.add_argument("--prop3", action="store_true")
    ver.add_argument("--lemma1", nargs=2, type=int, metavar=("N", "M"))
    ver.add_argument("--lemma2", action="store_true")
    ver.add_argument("--singular", action="store_true")
    ver.add_argument("--exponents", type=_parse_exponents)
    ver.add_argument("--lambda", dest="lam", type=float, default=1e-12)
    ver.add_argument("--k", type=int, default=2)
    ver.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    ver.add_argument("--trials", type=int, default=500)
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--min-fraction", type=float, default=0.99)
    return parser


def _config_from_args(ns) -> RunConfig:
    cfg = RunConfig(subcommand=ns.subcommand, poly=ns.poly, format=ns.format)
    for name in ("seed", "trials", "samples", "two_k", "a_max", "shells", "eps", "lam",
                 "delta", "k", "min_fraction", "exponents", "lemma1"):
        if hasattr(ns, name) and getattr(ns, name) is not None:
            setattr(cfg, name, getattr(ns, name))
    if ns.subcommand == "verify":
        cfg.checks = [c for c in ("prop3", "lemma1", "lemma2", "singular") if getattr(ns, c)]
    return cfg


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _shape_doc(p) -> dict:
    return {"r": p.r, "N": p.N, "m": p.m, "monomials": p.as_lists()}


def cmd_analyze(cfg: RunConfig, p) -> tuple[dict, int]:
    M = exponent_matrix(p)
    dec = is_decomposable(p)
    sorted_struct = shape_structure(p)
    stored_struct = structure_decompose(M)
    report = convergence_report(p)
    return {
        "shape": _shape_doc(p),
        "exponent_matrix": M,
        "rank": rank_exact(M),
        "structure": {
            "nl_sorted": {"blocks": list(sorted_struct.blocks), "q": sorted_struct.q},
            "stored_order": {"blocks": list(stored_struct.blocks), "q": stored_struct.q},
        },
        "high_member": list(high_member(p).exponents),
        "decomposable": dec.decomposable,
        "components": [_vars(c) for c in dec.components],
        "unused_variables": _vars(dec.unused),
        "senior_form_support": _vars(senior_form_support(p)),
        "v_max": report.v_max,
        "v_witness": _vars(report.v_witness),
        "bounds": report.to_dict(),
    }, EXIT_OK


def cmd_order(cfg, p):
    return {"monomials": nl_sort(p).as_lists(), "high_member": list(high_member(p).exponents)}, EXIT_OK


def cmd_bounds(cfg, p):
    return convergence_report(p).to_dict(), EXIT_OK


def cmd_estimate(cfg, p):
    sc = ShellConfig(a_max=cfg.a_max, shells=cfg.shells, samples=cfg.samples, seed=cfg.seed, eps=cfg.eps)
    rep = classify_empirical(p, cfg.two_k, sc)
    code = EXIT_CHECK if rep.agreement == "disagree" else EXIT_OK
    return rep.to_dict(), code


def cmd_verify(cfg, p):
    if not cfg.checks:
        raise InputError("verify needs at least one of --prop3, --lemma1, --lemma2, --singular")
    records, ok = [], True
    for check in cfg.checks:
        if check in ("prop3", "singular") and p is None:
            raise InputError(f"--{check} needs --poly")
        if check == "prop3":
            rec = prop3_rank_check(p, cfg.trials, cfg.seed).to_dict()
            rec["pass"] = rec["fraction"] >= cfg.min_fraction
        elif check == "singular":
            rec = singular_fraction(p, cfg.k, cfg.lam, cfg.trials, cfg.seed, cfg.delta).to_dict()
            rec["pass"] = rec["fraction"] >= cfg.min_fraction
        elif check == "lemma1":
            n, m = cfg.lemma1
            if m < 1 or n < m:
                raise InputError(f"--lemma1 needs n >= m >= 1, got {n} {m}")
            rec = verify_lemma1(n, m).to_dict()
        else:
            if not cfg.exponents:
                raise InputError("--lemma2 needs --exponents")
            try:
                rec = verify_lemma2(cfg.exponents, cfg.trials, cfg.seed, cfg.delta).to_dict()
            except ShapeError as exc:
                raise InputError(str(exc)) from None
        ok = ok and rec["pass"]
        records.append(rec)
    return {"records": records, "pass": ok}, EXIT_OK if ok else EXIT_CHECK


COMMANDS = {"analyze": cmd_analyze, "order": cmd_order, "bounds": cmd_bounds,
            "estimate": cmd_estimate, "verify": cmd_verify}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _text_lines(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for key, val in obj.items():
            if isinstance(val, (dict, list)) and val and not _is_flat_list(val):
                yield f"{pad}{key}:"
                yield from _text_lines(val, indent + 1)
            else:
                yield f"{pad}{key}: {json.dumps(val)}"
    elif isinstance(obj, list):
        for i, val in enumerate(obj):
            if isinstance(val, (dict, list)) and not _is_flat_list(val):
                yield f"{pad}- [{i}]"
                yield from _text_lines(val, indent + 1)
            else:
                yield f"{pad}- {json.dumps(val)}"


def _is_flat_list(val) -> bool:
    return isinstance(val, list) and all(not isinstance(v, (dict, list)) or _is_flat_list(v) for v in val)


def _bounds_summary(b: dict) -> list[str]:
    lines = []
    thr = b["real_thresholds"]
    lo = thr["gamma_low"]
    lines.append(f"gamma_low  = {lo['exact']} ({', '.join(lo['theorems'])})")
    hi = thr["gamma_high"]
    lines.append("gamma_high = unknown" if hi is None else f"gamma_high = {hi['exact']} ({', '.join(hi['theorems'])})")
    for d in b["divergence_region"]:
        lines.append(f"diverges   2k = {d['two_k']} ({d['theorem']})")
    conv = b["convergence_region"]
    if conv:
        lines.append(f"converges  2k >= {conv['smallest_two_k']} ({conv['theorem']})")
    return lines


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=False)
    lines = []
    result = doc.get("result", {})
    bounds = result.get("bounds") if doc.get("command") == "analyze" else result
    if doc.get("command") in ("analyze", "bounds") and bounds:
        lines += _bounds_summary(bounds)
        lines.append("")
    lines += list(_text_lines(doc))
    return "\n".join(lines)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    fmt = "json"
    if argv is None:
        argv = sys.argv[1:]
    if "--format" in argv:
        i = argv.index("--format")
        if i + 1 < len(argv) and argv[i + 1] in ("json", "text"):
            fmt = argv[i + 1]
    try:
        ns = build_parser().parse_args(argv)
        cfg = _config_from_args(ns)
        fmt = cfg.format
        p = None
        if cfg.poly is not None:
            try:
                p = load_polynomial(cfg.poly)
            except OSError as exc:
                raise InputError(f"cannot read {cfg.poly}: {exc.strerror}") from None
        result, code = COMMANDS[cfg.subcommand](cfg, p)
        doc = {"schema": SCHEMA, "command": cfg.subcommand, "config": cfg.to_dict(), "result": result}
    except (InputError, ShapeError, SearchTooLarge, ValueError) as exc:
        doc = {"schema": SCHEMA, "error": {"type": type(exc).__name__, "message": str(exc)}}
        code = EXIT_INPUT
    print(render(doc, fmt), file=out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
