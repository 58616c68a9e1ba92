"""Batch command-line front end; every command prints one JSON document (or a text rendering)."""
from __future__ import annotations

import argparse
import json
import os
import signal
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional, Sequence

from . import bisim, fmp, kripke
from .decide import Budget, ResourceExhausted, actualise, phi_image, satisfiable
from .decide import from_json as pm_from_json, to_json as pm_to_json
from .normalform import to_aanf
from .syntax import (BudgetOverflowError, FormulaSyntaxError, NotAANFError, closure, is_aanf,
                     metrics, parse, to_text)

EXIT_TRUE, EXIT_FALSE, EXIT_EXHAUSTED, EXIT_USAGE, EXIT_FORMAT = 0, 1, 2, 64, 65
CONFIG_ENV = "BAPAL_CONFIG"


@dataclass(frozen=True)
class Config:
    engine: str = "pruned"
    hue_budget: Optional[int] = None  # cap on hue denotations per pseudo-model
    timeout: Optional[float] = 60.0
    state_cap: int = 20_000
    seed: int = 0
    format: str = "json"

    @classmethod
    def load(cls, path: Optional[str]) -> "Config":
        if not path:
            return cls()
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def budget(self) -> Budget:
        b = Budget(max_states=self.state_cap, timeout=self.timeout)
        return replace(b, max_hue=self.hue_budget) if self.hue_budget is not None else b


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Timeout(Exception):
    pass


@contextmanager
def _alarm(seconds: Optional[float]):
    if not seconds or not hasattr(signal, "setitimer"):
        yield
        return

    def fire(signum, frame):
        raise _Timeout()

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, seconds * 1.5)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


# -- helpers -------------------------------------------------------------------

def _formula(args):
    text = args.formula_opt or args.formula
    if text is None:
        raise UsageError("a formula is required")
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read().strip()
    return parse(text)


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _world(m: kripke.Model, w: Optional[str]) -> int:
    if w is None:
        if m.designated is None:
            raise UsageError("no --world given and the model has no designated world")
        return m.designated
    return m.world(w)


# -- commands --------------------------------------------------------------

def cmd_parse(args, cfg):
    f = _formula(args)
    m = metrics(f)
    out = {"formula": to_text(f), "atoms": sorted(m.vars), "modal_depth": m.d,
           "quantifier_depth": m.D, "aanf": is_aanf(f)}
    if args.closure:
        t = closure(f, hue_budget=cfg.hue_budget)
        out["closure"] = [to_text(g) for g in t.cl]
        out["hue_atoms"] = list(t.atoms_hue)
        out["fresh_count"] = t.fresh_expr
        out["faithful"] = t.faithful
    return EXIT_TRUE, out


def cmd_nf(args, cfg):
    f = _formula(args)
    g, trace = to_aanf(f)
    return EXIT_TRUE, {"input": to_text(f), "aanf": to_text(g),
                       "steps": [{"axiom": s.axiom, "path": list(s.path), "before": to_text(s.before),
                                  "after": to_text(s.after)} for s in trace]}


def cmd_check(args, cfg):
    m = kripke.load(args.model)
    f = _formula(args)
    w = _world(m, args.world)
    v = kripke.check(m, w, f)
    return (EXIT_TRUE if v else EXIT_FALSE), {"world": m.names[w], "formula": to_text(f), "value": v}


def cmd_ext(args, cfg):
    m = kripke.load(args.model)
    f = _formula(args)
    return EXIT_TRUE, {"formula": to_text(f), "extension": kripke.extension_names(m, f)}


def cmd_bisim(args, cfg):
    m = kripke.load(args.model)
    n = kripke.load(args.other) if args.other else m
    s, t = _world(m, args.world), _world(n, args.other_world)
    atoms = [a for a in (args.atoms or "").split(",") if a]
    if args.kind == "full":
        w = bisim.bisimilar(m, s, n, t)
    elif args.kind == "q":
        w = bisim.q_bisimilar(atoms, m, s, n, t)
    elif args.kind == "n":
        if args.depth is None:
            raise UsageError("--kind n needs --depth")
        ok = bisim.n_bisimilar(args.depth, m, s, n, t)
        return (EXIT_TRUE if ok else EXIT_FALSE), {"kind": "n", "depth": args.depth, "bisimilar": ok}
    else:
        w = bisim.x_announcement_bisimilar(atoms, m, s, n, t)
    out = {"kind": args.kind, "bisimilar": w is not None}
    if w is not None:
        out["witness"] = w.to_json(m, n)
    return (EXIT_TRUE if w else EXIT_FALSE), out


def cmd_sat(args, cfg):
    f = _formula(args)
    v = satisfiable(f, cfg.budget(), cfg.engine)
    code = {"sat": EXIT_TRUE, "unsat": EXIT_FALSE}.get(v.outcome, EXIT_EXHAUSTED)
    return code, v.to_json()


def cmd_image(args, cfg):
    m = kripke.load(args.model)
    f = _formula(args)
    if not is_aanf(f):
        f = to_aanf(f)[0]
    return EXIT_TRUE, pm_to_json(phi_image(m, f))


def cmd_actualise(args, cfg):
    pm = pm_from_json(_load_json(args.pseudo))
    m = actualise(pm, args.copies, args.act_indices)
    return EXIT_TRUE, kripke.to_json(m)


def cmd_fmp(args, cfg):
    report = fmp.finite_search(args.max_worlds)
    out = report.to_json()
    out["fig1_failing_conjuncts"] = fmp.failing_conjuncts(fmp.fig1_model(), "A")
    return (EXIT_TRUE if report.outcome == "none_found" else EXIT_FALSE), out


def cmd_gen(args, cfg):
    seed = cfg.seed if args.seed is None else args.seed
    m = kripke.random_model(seed, args.max_worlds, args.max_atoms, exact=args.exact)
    return EXIT_TRUE, kripke.to_json(m)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bapal", description="Boolean arbitrary public announcement logic toolkit")
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    p.add_argument("--format", choices=("json", "text"))
    p.add_argument("--timeout", type=float)
    p.add_argument("--engine", choices=("pruned", "faithful"))
    p.add_argument("--hue-budget", type=int)
    p.add_argument("--state-cap", type=int)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def cmd(name, fn, help, formula=True):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        if formula:
            sp.add_argument("formula", nargs="?", help="formula text, or @file")
            sp.add_argument("--formula", dest="formula_opt")
        return sp

    sp = cmd("parse", cmd_parse, "parse and report metrics")
    sp.add_argument("--closure", action="store_true")
    cmd("nf", cmd_nf, "announcement normal form with rewrite trace")
    for name, fn, help in (("check", cmd_check, "model check at a world"),
                           ("ext", cmd_ext, "extension of a formula")):
        sp = cmd(name, fn, help)
        sp.add_argument("--model", required=True)
        sp.add_argument("--world")
    sp = cmd("bisim", cmd_bisim, "bisimilarity of two pointed models", formula=False)
    sp.add_argument("--kind", choices=("full", "q", "n", "xann"), default="full")
    sp.add_argument("--model", required=True)
    sp.add_argument("--world")
    sp.add_argument("--other")
    sp.add_argument("--other-world")
    sp.add_argument("--atoms", help="comma-separated atom set for q and xann")
    sp.add_argument("--depth", type=int)
    sp = cmd("sat", cmd_sat, "decide satisfiability")
    sp.add_argument("--engine", dest="sub_engine", choices=("pruned", "faithful"))
    sp.add_argument("--timeout", dest="sub_timeout", type=float)
    sp = cmd("image", cmd_image, "phi-image of a model")
    sp.add_argument("--model", required=True)
    sp = cmd("actualise", cmd_actualise, "finite truncation of an actualisation", formula=False)
    sp.add_argument("--pseudo", required=True, help="pseudo-model JSON")
    sp.add_argument("--copies", type=int, required=True)
    sp.add_argument("--act-indices", type=int)
    sp = cmd("fmp", cmd_fmp, "bounded finite-model search for the fmp formula", formula=False)
    sp.add_argument("--max-worlds", type=int, default=3)
    sp = cmd("gen", cmd_gen, "random model", formula=False)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-worlds", type=int, default=4)
    sp.add_argument("--max-atoms", type=int, default=2)
    sp.add_argument("--exact", action="store_true")
    return p


def _config(args) -> Config:
    cfg = Config.load(args.config or os.environ.get(CONFIG_ENV))
    over = {"format": args.format, "timeout": getattr(args, "sub_timeout", None) or args.timeout,
            "engine": getattr(args, "sub_engine", None) or args.engine,
            "hue_budget": args.hue_budget, "state_cap": args.state_cap}
    return replace(cfg, **{k: v for k, v in over.items() if v is not None})


def _render(out, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out, sort_keys=True, indent=2)
    lines = []
    for k in sorted(out):
        v = out[k]
        lines.append(f"{k}: {v if isinstance(v, (str, int, float, bool)) or v is None else json.dumps(v, sort_keys=True)}")
    return "\n".join(lines)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "fn", None):
            raise UsageError("a subcommand is required")
        cfg = _config(args)
        with _alarm(cfg.timeout):
            code, out = args.fn(args, cfg)
    except UsageError as e:
        print(f"bapal: usage error: {e}", file=stderr)
        return EXIT_USAGE
    except (FormulaSyntaxError, kripke.ModelError, NotAANFError, json.JSONDecodeError,
            KeyError, ValueError, OSError) as e:
        print(f"bapal: {type(e).__name__}: {e}", file=stderr)
        return EXIT_FORMAT
    except (_Timeout, ResourceExhausted, BudgetOverflowError) as e:
        dim = getattr(e, "dimension", "time" if isinstance(e, _Timeout) else "hue")
        out = {"outcome": "resource_exhausted", "dimension": dim}
        print(_render({**out, "config": asdict(cfg)}, cfg.format), file=stdout)
        return EXIT_EXHAUSTED
    out = dict(out)
    out["config"] = asdict(cfg)
    print(_render(out, cfg.format), file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
