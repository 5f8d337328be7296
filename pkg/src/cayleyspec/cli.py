"""Command-line front end: ``cayleyspec <command> ...`` (JSON by default, CSV on request)."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import spectra, tree, walks
from .acceptance import CRITERIA, run_check
from .errors import CayleySpecError, HypothesisNotSatisfied
from .groups import load_group
from .machines import cayley_machine, invert, reset_inverse_machine
from .measures import (cdf, euler_phi_identity_partial, fraction_str, kns_measure, level_measure,
                       level_moment, moment)
from .tree import AutomatonGroup, depth, fix_count, fix_count_enumerate, freeness_report
from .walks import kesten_moments, monte_carlo_return, walk_distribution
from .words import WitnessReport, gamma_depth_witness
from .zeta import exponent_verdict, finite_zeta_log, limit_zeta_log, schreier_multigraph

ENV_BUDGETS = {
    "level": "CAYLEYSPEC_LEVEL_BUDGET",
    "dense": "CAYLEYSPEC_DENSE_BUDGET",
    "walk": "CAYLEYSPEC_WALK_BUDGET",
}


@dataclass
class RunConfig:
    command: str
    fmt: str = "json"
    out: str | None = None
    level_budget: int = tree.LEVEL_BUDGET
    dense_budget: int = spectra.DENSE_BUDGET
    walk_budget: int = walks.WALK_BUDGET
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("level_budget", "dense_budget", "walk_budget"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        budgets = {}
        for key, var in ENV_BUDGETS.items():
            if var in os.environ:
                budgets[f"{key}_budget"] = int(os.environ[var])
        opts = {k: v for k, v in vars(args).items() if k not in ("command", "format", "out", "handler")}
        return cls(args.command, args.format, args.out, options=opts, **budgets)


def nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def pos_int(text: str) -> int:
    v = nonneg_int(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def frac(x: Fraction) -> dict:
    return {"value": fraction_str(x), "float": float(x)}


# --- command handlers: each returns (document, csv rows) -------------------

def cmd_machine(cfg: RunConfig):
    G = load_group(cfg.options["group"])
    kind = cfg.options["kind"]
    M = {"cayley": cayley_machine, "reset": reset_inverse_machine,
         "cayley-inverse": lambda H: invert(cayley_machine(H))}[kind](G)
    doc = {"group": G.name, "kind": kind, **M.to_json()}
    rows = [{"state": M.labels[q], "letter": G.labels[a], "next": M.labels[int(M.transition[q, a])],
             "output": G.labels[int(M.output[q, a])]}
            for q in range(M.num_states) for a in range(M.alphabet_size)]
    return doc, rows


def cmd_spectrum(cfg: RunConfig):
    G = load_group(cfg.options["group"])
    k = cfg.options["level"]
    tree.check_budget(G.order, k, cfg.level_budget)
    exact = spectra.closed_form_spectrum(G.order, k)
    doc = {"group": G.name, **exact.to_json()}
    rows = [{"p": a.p, "q": a.q, "value": a.value, "multiplicity": a.multiplicity} for a in exact.atoms]
    if cfg.options["numeric"]:
        A = spectra.adjacency_matrix(G, k, cfg.level_budget)
        num = spectra.numeric_spectrum(A, G.order, method=cfg.options["method"], dense_budget=cfg.dense_budget)
        ok, why = spectra.match_spectrum(num, exact)
        doc["numeric"] = {"method": cfg.options["method"],
                          "eigenvalues": [{"value": v, "multiplicity": m} for v, m in num],
                          "matches_closed_form": ok, "detail": why}
    return doc, rows


def cmd_kns(cfg: RunConfig):
    n, Q = cfg.options["n"], cfg.options["qmax"]
    m = kns_measure(n, Q)
    doc = m.to_json()
    partial, tail = euler_phi_identity_partial(n, Q)
    doc["euler_partial_sum"] = frac(partial)
    if cfg.options["moments"] is not None:
        doc["moments"] = []
        for j in range(cfg.options["moments"] + 1):
            val, err = moment(m, j)
            doc["moments"].append({"order": j, **frac(Fraction(val)), "error": float(err)})
    if cfg.options["cdf"]:
        doc["cdf"] = []
        for x in cfg.options["cdf"]:
            lo, hi = cdf(m, Fraction(x), cfg.options["view"])
            doc["cdf"].append({"x": x, "view": cfg.options["view"], "lower": fraction_str(lo),
                               "upper": fraction_str(hi), "lower_float": float(lo), "upper_float": float(hi)})
    rows = [{"p": a.p, "q": a.q, "value": a.value, "weight": fraction_str(a.weight)} for a in m.atoms]
    return doc, rows


def cmd_moments(cfg: RunConfig):
    G = load_group(cfg.options["group"])
    k, top = cfg.options["level"], cfg.options["orders"]
    tree.check_budget(G.order, k, cfg.level_budget)
    lm = level_measure(G, k)
    rows = []
    for j in range(top + 1):
        exact = level_moment(G, k, j)
        rows.append({"order": j, "level_moment": fraction_str(exact), "float": float(exact),
                     "closed_form_moment": fraction_str(moment(lm, j)[0])})
    return {"group": G.name, "level": k, "moments": rows}, rows


def _element(cfg: RunConfig):
    G = load_group(cfg.options["group"])
    return G, AutomatonGroup(G).parse(cfg.options["element"])


def cmd_fix(cfg: RunConfig):
    G, e = _element(cfg)
    rows = []
    for k in range(cfg.options["levels"] + 1):
        c = fix_count(e, k)
        row = {"level": k, "fix": c, "fraction": fraction_str(Fraction(c, G.order**k))}
        if cfg.options["check"] and G.order**k <= min(cfg.level_budget, G.order**8):
            row["enumerated"] = fix_count_enumerate(e, k, cfg.level_budget)
        rows.append(row)
    return {"group": G.name, "element": e.label(), "levels": rows}, rows


def cmd_depth(cfg: RunConfig):
    G, e = _element(cfg)
    d = depth(e, cfg.options["kmax"])
    doc = {"group": G.name, "element": e.label(), "k_max": cfg.options["kmax"],
           "depth": d if d is not None else f"exceeds({cfg.options['kmax']})",
           "machine_states": e.state.machine.num_states}
    return doc, [{"element": e.label(), "depth": doc["depth"]}]


def cmd_free(cfg: RunConfig):
    G = load_group(cfg.options["group"])
    rep = freeness_report(AutomatonGroup(G).generators(), cfg.options["word_len"], cfg.options["kmax"])
    doc = {"group": G.name, **rep.to_json()}
    rows = [{"element": v.element, "verdict": v.verdict, "p": v.period, "decay_ok": v.decay_ok,
             "witness": "" if v.witness is None else " ".join(G.labels[a] for a in v.witness)}
            for v in rep.elements]
    return doc, rows


def cmd_zeta(cfg: RunConfig):
    R = cfg.options["order"]
    if cfg.options["limit"]:
        n = cfg.options["n"]
        series = limit_zeta_log(kns_measure(n, cfg.options["qmax"]), n, R, cfg.options["normalization"])
        doc = series.to_json()
    else:
        G = load_group(cfg.options["group"])
        k = cfg.options["level"]
        tree.check_budget(G.order, k, cfg.level_budget)
        X = schreier_multigraph(G, k)
        series = finite_zeta_log(X, R)
        doc = {"group": G.name, "level": k, **series.to_json()}
        if cfg.options["verdict"]:
            doc["exponent_verdict"] = exponent_verdict([X], R)
    return doc, doc["coefficients"]


def cmd_walk(cfg: RunConfig):
    G = load_group(cfg.options["group"])
    m = cfg.options["steps"]
    probs = kesten_moments(G, m, cfg.walk_budget)
    rows = [{"m": j, "p_m": fraction_str(p), "float": float(p)} for j, p in enumerate(probs)]
    doc = {"group": G.name, "steps": m, "return_probabilities": rows,
           "support_size": len(walk_distribution(G, m)) if m <= min(cfg.walk_budget, 10) else None}
    if cfg.options["mc"]:
        doc["monte_carlo"] = {"approximate": True, "samples": cfg.options["mc"], "seed": cfg.options["seed"],
                              "p_m": monte_carlo_return(G, m, cfg.options["mc"], cfg.options["seed"])}
    return doc, rows


def cmd_structure(cfg: RunConfig):
    G = load_group(cfg.options["group"])
    try:
        rep = gamma_depth_witness(G, cfg.options["theorem"], cfg.options["n"], cfg.options["p"])
    except HypothesisNotSatisfied as exc:
        rep = WitnessReport(cfg.options["theorem"], cfg.options["n"], "hypothesis-not-satisfied", note=str(exc))
    doc = {"group": G.name, **rep.to_json()}
    return doc, [{k: v for k, v in doc.items() if not isinstance(v, (list, dict))}]


def cmd_verify(cfg: RunConfig):
    keys = cfg.options["only"] or [k for k, _, _ in CRITERIA]
    results = []
    for key in keys:
        r = run_check(key)
        print(r.line(), file=sys.stderr, flush=True)
        results.append(r)
    doc = {"passed": sum(r.passed for r in results), "total": len(results),
           "criteria": [r.to_json() for r in results]}
    return doc, [r.to_json() for r in results]


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cayleyspec", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    def group_arg(p):
        p.add_argument("--group", required=True, help="builtin (Z2, S3, D4, Q8, Z2xZ2, ...) or JSON file")

    p = add("machine", cmd_machine, "dump a machine")
    group_arg(p)
    p.add_argument("--kind", choices=["cayley", "reset", "cayley-inverse"], default="cayley")

    p = add("spectrum", cmd_spectrum, "closed-form (and numeric) spectrum of M_k")
    group_arg(p)
    p.add_argument("--level", type=nonneg_int, required=True)
    p.add_argument("--numeric", action="store_true")
    p.add_argument("--method", choices=["auto", "jacobi", "lapack"], default="auto")

    p = add("kns", cmd_kns, "truncated KNS measure")
    p.add_argument("--n", type=pos_int, required=True)
    p.add_argument("--qmax", type=pos_int, required=True)
    p.add_argument("--moments", type=nonneg_int)
    p.add_argument("--cdf", type=str, nargs="*", help="points (decimal or p/q)")
    p.add_argument("--view", choices=["z", "lambda"], default="z")

    p = add("moments", cmd_moments, "exact level moments tr(M_k^j)/n^k")
    group_arg(p)
    p.add_argument("--level", type=nonneg_int, required=True)
    p.add_argument("--orders", type=nonneg_int, default=6)

    for name, handler, help_text in (("fix", cmd_fix, "fixed-point counts per level"),
                                     ("depth", cmd_depth, "depth of an element")):
        p = add(name, handler, help_text)
        group_arg(p)
        p.add_argument("--element", required=True,
                       help="e.g. 'x^2 [b] x^-2': labels are generators, x the identity generator, [g] embedded g")
        if name == "fix":
            p.add_argument("--levels", type=nonneg_int, default=8)
            p.add_argument("--check", action="store_true", help="cross-check by enumeration (k <= 8)")
        else:
            p.add_argument("--kmax", type=nonneg_int, default=12)

    p = add("free", cmd_free, "fixed-point verdicts on a ball of reduced words")
    group_arg(p)
    p.add_argument("--word-len", dest="word_len", type=pos_int, default=3)
    p.add_argument("--kmax", type=pos_int, default=8)

    p = add("zeta", cmd_zeta, "Ihara log-zeta series")
    p.add_argument("--group")
    p.add_argument("--level", type=nonneg_int)
    p.add_argument("-R", "--order", type=nonneg_int, default=8)
    p.add_argument("--limit", action="store_true", help="limit series from the KNS measure")
    p.add_argument("--n", type=pos_int)
    p.add_argument("--qmax", type=pos_int, default=40)
    p.add_argument("--normalization", choices=["vertex", "edge"], default="edge")
    p.add_argument("--verdict", action="store_true", help="also test both exponent conventions")

    p = add("walk", cmd_walk, "exact return probabilities on G wr Z")
    group_arg(p)
    p.add_argument("--steps", type=nonneg_int, required=True)
    p.add_argument("--mc", type=pos_int, help="also estimate by this many simulated walks")
    p.add_argument("--seed", type=int, default=0)

    p = add("structure", cmd_structure, "depth witnesses for the non-embedding arguments")
    group_arg(p)
    p.add_argument("--theorem", type=int, choices=[1, 2], required=True)
    p.add_argument("--n", type=pos_int, required=True)
    p.add_argument("--p", type=pos_int)

    p = add("verify", cmd_verify, "run the acceptance suite")
    p.add_argument("--only", nargs="*", choices=[k for k, _, _ in CRITERIA])
    return parser


def render(doc, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        fields = list(dict.fromkeys(k for r in rows for k in r))
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "zeta":
        if args.limit and args.n is None:
            parser.error("zeta --limit needs --n")
        if not args.limit and (args.group is None or args.level is None):
            parser.error("zeta needs --group and --level (or --limit --n)")
    try:
        cfg = RunConfig.from_args(args)
        doc, rows = args.handler(cfg)
    except (CayleySpecError, KeyError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = render(doc, rows, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and doc["passed"] != doc["total"]:
        return 1
    return 0


def main() -> None:
    sys.exit(run())
