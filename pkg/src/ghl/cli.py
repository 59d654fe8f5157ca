"""Command line interface: ``ghl <group> <command> ...``.

Exit codes: 0 success, 1 an identity failed, 2 bad input, 3 resource cap hit.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .complex import (
    Chain, ChainFormatError, boundary, chain_to_text, d_C, d_R, format_fraction, read_chain,
)
from .halfedge import GraphError
from .morita import (
    GammaError, has_orientation_reversing_automorphism,
    inadmissibility_reason, parse_gamma, verify_pairing_theorem, z,
)

EXIT_OK, EXIT_MATH, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

FIXTURES = ("theta", "banana5", "k4", "banana4")


@dataclass(frozen=True)
class RunConfig:
    workers: int = 1
    memory_cap_mb: Optional[int] = None
    output_format: str = "text"
    seed: int = 0

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.memory_cap_mb is not None and self.memory_cap_mb < 1:
            raise ValueError("memory cap must be positive")
        if self.output_format not in ("text", "json"):
            raise ValueError("format must be text or json")


class InputError(Exception):
    pass


class MathFailure(Exception):
    def __init__(self, fields):
        super().__init__("identity failed")
        self.fields = fields


# -- helpers -----------------------------------------------------------------------

def load_gamma(spec: str):
    """Read a gamma file; a bare fixture name selects a bundled one."""
    p = Path(spec)
    if p.exists():
        text = p.read_text()
    elif spec in FIXTURES:
        text = resources.files("ghl").joinpath("fixtures", f"{spec}.gamma").read_text()
    else:
        raise InputError(f"no such gamma file: {spec}")
    return parse_gamma(text)


def load_chain(path: str) -> Chain:
    try:
        with open(path) as fh:
            return read_chain(fh)
    except OSError as exc:
        raise InputError(str(exc)) from None


def save_chain(c: Chain, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(chain_to_text(c))


def parse_dims(text: Optional[str]):
    if text is None:
        return None
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"bad --dims value {text!r}; use a..b") from None


def emit(cfg: RunConfig, fields: dict, result: Optional[str] = None) -> None:
    if result is not None:
        fields = dict(fields, result=result)
    if cfg.output_format == "json":
        print(json.dumps(fields, indent=2, sort_keys=True, default=str))
        return
    for k, v in fields.items():
        if k == "result":
            continue
        if isinstance(v, list) and v and isinstance(v[0], dict):
            print(f"{k}:")
            for row in v:
                print("  " + " | ".join(f"{a}={b}" for a, b in row.items()))
        else:
            print(f"{k}: {v}")
    if result is not None:
        print(f"RESULT: {result}")


def chain_summary(c: Chain) -> dict:
    return {"rank": c.rank, "variant": c.variant, "dimension": c.dim,
            "bigrade": list(c.grading) if isinstance(c.grading, tuple) else c.grading,
            "terms": len(c)}


# -- commands --------------------------------------------------------------------

def cmd_gamma_check(args, cfg):
    g = load_gamma(args.gamma)
    reason = inadmissibility_reason(g)
    fields = {"gamma": g.name, "valences": g.valences,
              "status": "admissible" if reason is None else f"inadmissible: {reason}"}
    from .canon import aut_order_graph
    fields["aut_order"] = aut_order_graph(g.graph)
    fields["orientation_reversing_automorphism"] = has_orientation_reversing_automorphism(g)
    emit(cfg, fields)
    return EXIT_OK


def _cycle(args, cfg):
    g = load_gamma(args.gamma)
    reason = inadmissibility_reason(g)
    if reason is not None and reason != "even valence":
        raise InputError(f"inadmissible gamma: {reason}")
    c = z(g, basepointed=args.basepointed, base_vertex=args.base, workers=cfg.workers)
    fields = {"gamma": g.name, **chain_summary(c)}
    if reason == "even valence":
        fields["warning"] = "even valence: the sum over sigma cancels in pairs, chain is zero"
    return g, c, fields


def cmd_cycle_build(args, cfg):
    _, c, fields = _cycle(args, cfg)
    save_chain(c, args.out)
    if not args.verify:
        emit(cfg, fields)
        return EXIT_OK
    return _verify_cycle(c, fields, cfg)


def _verify_cycle(c, fields, cfg):
    r, s = d_R(c), d_C(c)
    fields.update({"d_R_terms": len(r), "d_C_terms": len(s)})
    if r or s:
        emit(cfg, fields, "CYCLE-FAILED")
        return EXIT_MATH
    emit(cfg, fields, "CYCLE-CERTIFIED")
    return EXIT_OK


def cmd_cycle_verify(args, cfg):
    p = Path(args.gamma)
    if p.exists() and p.read_text().startswith("chain "):
        c = load_chain(args.gamma)
        fields = {"chain": args.gamma, **chain_summary(c)}
    else:
        _, c, fields = _cycle(args, cfg)
        save_chain(c, args.out)
    return _verify_cycle(c, fields, cfg)


def cmd_pairing_verify(args, cfg):
    from .homology import enumerate_cells
    g = load_gamma(args.gamma)
    if inadmissibility_reason(g) is not None:
        raise InputError(f"inadmissible gamma: {inadmissibility_reason(g)}")
    zc = z(g, workers=cfg.workers)
    n = args.rank or zc.rank
    basis = enumerate_cells(n, zc.dim, "out")
    rep = verify_pairing_theorem(g, basis.keys, zc)
    fields = {"gamma": g.name, "rank": n, "dimension": zc.dim, "cells": rep.cells,
              "support": rep.support,
              "constant": None if rep.constant is None else format_fraction(rep.constant),
              "c_gamma": rep.c_gamma, "aut_dart": rep.aut_dart, "aut_vertex": rep.aut_vertex,
              "convention": rep.convention(), "violations": len(rep.violations)}
    ok = rep.matches
    emit(cfg, fields, "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_MATH


def cmd_stab_verify(args, cfg):
    from .stab import verify_stable_triviality
    g = load_gamma(args.gamma)
    if inadmissibility_reason(g) is not None:
        raise InputError(f"inadmissible gamma: {inadmissibility_reason(g)}")
    cert = verify_stable_triviality(g, args.base, cfg.workers)
    if args.perturb:
        # negative control: drop one term of W and recheck
        W = cert.W
        k = next(iter(W))[0]
        cert.W = W - W.like({k: W[k]})
        cert.dR_W, cert.dC_W = d_R(cert.W), d_C(cert.W)
    text = cert.report()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_chain(cert.Zplus, str(out / "Zplus.chain"))
        save_chain(cert.W, str(out / "W.chain"))
        (out / "certificate.txt").write_text(text)
    if cfg.output_format == "json":
        emit(cfg, {"gamma": cert.gamma_name, "rank": cert.rank, "dimension": cert.dim,
                   "Zplus_terms": len(cert.Zplus), "W_terms": len(cert.W),
                   "d_R_W_terms": len(cert.dR_W),
                   "d_C_W_minus_Zplus_terms": len(cert.dC_W - cert.Zplus)},
             "BOUNDARY-CERTIFIED" if cert.certified else "FAILED")
    else:
        sys.stdout.write(text)
    return EXIT_OK if cert.certified else EXIT_MATH


def cmd_homology_betti(args, cfg):
    from .homology import betti_table
    if args.rank is None:
        raise InputError("--rank is required")
    rows = betti_table(args.rank, args.variant, parse_dims(args.dims))
    if cfg.output_format == "json":
        emit(cfg, {"rank": args.rank, "variant": args.variant,
                   "table": [{"k": r.k, "cells": r.cells, "rank_boundary": r.rank_boundary,
                              "betti": r.betti} for r in rows]})
    else:
        from .homology import format_betti_table
        sys.stdout.write(format_betti_table(args.rank, args.variant, rows))
    return EXIT_OK


def cmd_chain_boundary(args, cfg):
    c = load_chain(args.chain)
    b = boundary(c)
    if args.out:
        save_chain(b, args.out)
    elif cfg.output_format == "text":
        sys.stdout.write(chain_to_text(b))
        return EXIT_OK
    emit(cfg, {"input": args.chain, **chain_summary(b)})
    return EXIT_OK


def cmd_chain_is_boundary(args, cfg):
    from .homology import NotACycle, is_boundary
    c = load_chain(args.chain)
    try:
        w = is_boundary(c)
    except NotACycle:
        raise InputError("input is not a cycle") from None
    fields = {"input": args.chain, **chain_summary(c)}
    if w is None:
        emit(cfg, fields, "NOT-A-BOUNDARY")
        return EXIT_MATH
    fields["witness_terms"] = len(w)
    save_chain(w, args.out)
    emit(cfg, fields, "BOUNDARY")
    return EXIT_OK


def cmd_chain_diff(args, cfg):
    a, b = load_chain(args.chain), load_chain(args.other)
    d = a - b if (a and b) else (a if a else -b)
    fields = {"left_terms": len(a), "right_terms": len(b), "difference_terms": len(d)}
    if d and cfg.output_format == "text":
        emit(cfg, fields)
        sys.stdout.write("".join(chain_to_text(d).splitlines(True)[1:]))
        print("RESULT: DIFFERENT")
        return EXIT_MATH
    emit(cfg, fields, "EQUAL" if not d else "DIFFERENT")
    return EXIT_OK if not d else EXIT_MATH


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--memory-cap-mb", type=int, default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--rank", type=int, default=None)
    common.add_argument("--variant", choices=("out", "aut"), default="out")
    common.add_argument("--dims", default=None)
    common.add_argument("--basepointed", action="store_true")
    common.add_argument("--base", type=int, default=None)

    p = argparse.ArgumentParser(prog="ghl", description="Exact computations with forested graph cells.")
    groups = p.add_subparsers(dest="group", required=True)

    def add(group, name, func, *positional):
        sub = group.add_parser(name, parents=[common])
        for pos in positional:
            sub.add_argument(pos)
        sub.set_defaults(func=func)
        return sub

    g = groups.add_parser("gamma").add_subparsers(dest="cmd", required=True)
    add(g, "check", cmd_gamma_check, "gamma")
    c = groups.add_parser("cycle").add_subparsers(dest="cmd", required=True)
    add(c, "build", cmd_cycle_build, "gamma").add_argument("--verify", action="store_true")
    add(c, "verify", cmd_cycle_verify, "gamma")
    pa = groups.add_parser("pairing").add_subparsers(dest="cmd", required=True)
    add(pa, "verify", cmd_pairing_verify, "gamma")
    s = groups.add_parser("stab").add_subparsers(dest="cmd", required=True)
    add(s, "verify", cmd_stab_verify, "gamma").add_argument("--perturb", action="store_true")
    h = groups.add_parser("homology").add_subparsers(dest="cmd", required=True)
    add(h, "betti", cmd_homology_betti)
    ch = groups.add_parser("chain").add_subparsers(dest="cmd", required=True)
    add(ch, "boundary", cmd_chain_boundary, "chain")
    add(ch, "is-boundary", cmd_chain_is_boundary, "chain")
    add(ch, "diff", cmd_chain_diff, "chain", "other")
    return p


def _apply_memory_cap(mb: Optional[int]) -> None:
    if mb is None:
        return
    import resource
    limit = mb * 1024 * 1024
    resource.setrlimit(resource.RLIMIT_AS, (limit, limit))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cap = args.memory_cap_mb
    if cap is None and os.environ.get("GHL_MEMORY_CAP_MB"):
        try:
            cap = int(os.environ["GHL_MEMORY_CAP_MB"])
        except ValueError:
            print("error: GHL_MEMORY_CAP_MB must be an integer", file=sys.stderr)
            return EXIT_INPUT
    try:
        cfg = RunConfig(args.workers, cap, args.format, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    random.seed(cfg.seed)
    try:
        _apply_memory_cap(cfg.memory_cap_mb)
        return args.func(args, cfg)
    except (InputError, GammaError, GraphError, ChainFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MemoryError:
        print("error: memory cap reached", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
