"""``daisyforge`` command line.

Exit status: 0 when the claim is verified, 2 when it is refuted (the
certificate then carries a witness), 1 on usage, input or scale errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .arcs import frame_search, max_arc, q_plus_two_any_q, q_plus_two_pairwise
from .certificates import CERT_VERSION, check_certificate, file_record, render, timing_path, write_certificate
from .config import budget_from_env, Budget
from .construct import (blow_up, mod_level_family, plan_layer_families, striped_plan,
                        two_layer_family, basis_family)
from .daisy import DaisyPattern, MODES, daisy_free, find_consecutive_q6, q6_layer_indices
from .density import finite_product, fmt, gamma6_report, gamma7_report, product_bound, trivial_upper
from .errors import BoundTooLoose, DaisyforgeError, PatternMismatch
from .families import LayeredFamily, SetFamily, density, density_sum, dump_json
from .hitting import HittingFamily, verify_hitting
from .oracle import ORACLE_MAX_MEMBERS, exact_ex, exact_g, exact_l, monotonicity_suite, paper_patterns

EXIT_OK, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2


class UsageError(DaisyforgeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p: argparse.ArgumentParser, out_required: bool = False) -> None:
    p.add_argument("--out", required=out_required, help="output file")
    p.add_argument("--threads", type=_positive, default=1, help="worker processes for daisy searches")
    p.add_argument("--mode", choices=MODES, default="deterministic")
    p.add_argument("--budget-members", type=_positive, help="cap on materialized members")
    p.add_argument("--budget-nodes", type=_positive, help="cap on search nodes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="daisyforge", description="Daisy-free constructions and hypercube hitting sets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    con = groups.add_parser("construct", help="build families").add_subparsers(dest="what", required=True)
    p = con.add_parser("basis", help="bases of GF(q)^r as r-sets of [q^r - 1]")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    _common(p, True)
    p = con.add_parser("blowup", help="replace each point by m copies")
    p.add_argument("--family", required=True)
    p.add_argument("--m", type=_positive, required=True)
    _common(p, True)
    p = con.add_parser("two-layer", help="GF(5) two-layer family")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--w", type=_int_list, help="nonzero vector, comma separated (default e_1)")
    _common(p, True)
    p = con.add_parser("mod-level", help="levels divisible by d + 1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    _common(p, True)
    p = con.add_parser("plan", help="striped hitting plan for d in {6, 7}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--K", type=_positive, default=8)
    _common(p, True)

    ver = groups.add_parser("verify", help="check freeness and hitting").add_subparsers(dest="what", required=True)
    p = ver.add_parser("daisy", help="is the family free of D_r(s,t)?")
    p.add_argument("--family", required=True)
    p.add_argument("--r", type=int, help="uniformity (checked against the family)")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    _common(p)
    p = ver.add_parser("two-layer", help="is a layered family free of consecutive Q6 layer copies?")
    p.add_argument("--family", required=True)
    p.add_argument("--i", type=int, help="only this upper layer index (2..5)")
    _common(p)
    p = ver.add_parser("hitting", help="does the vertex set meet every d-subcube?")
    p.add_argument("--family", required=True)
    p.add_argument("--d", type=int, required=True)
    _common(p)

    lem = groups.add_parser("lemma", help="vector configuration searches").add_subparsers(dest="what", required=True)
    p = lem.add_parser("arc", help="largest set with every j vectors independent; refuted if cap is reached")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--j", type=int)
    p.add_argument("--cap", type=_positive, required=True)
    p.add_argument("--normalize", choices=("auto", "none", "basis"), default="auto")
    _common(p)
    p = lem.add_parser("frame", help="extend the standard frame to t vectors, every dim independent")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=_positive, default=7)
    _common(p)
    for name in ("pairwise", "any-q"):
        p = lem.add_parser(name, help="no q+2 vectors of GF(q)^3 with every 3 independent")
        p.add_argument("--q", type=int, required=True)
        _common(p)

    ora = groups.add_parser("oracle", help="exact values at tiny scale").add_subparsers(dest="what", required=True)
    p = ora.add_parser("ex", help="largest family free of D_r(2,t) and D_r(t-2,t), or of D_r(s,t) alone")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--s", type=int, help="single pattern D_r(s,t) instead of the pair")
    _common(p)
    p = ora.add_parser("g", help="smallest vertex set meeting every d-subcube of Q_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    _common(p)
    p = ora.add_parser("l", help="largest density-sum avoiding consecutive Q6 layer copies")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    _common(p)
    p = ora.add_parser("monotone", help="averaging inequalities over every in-range point")
    _common(p)

    den = groups.add_parser("density", help="exact density bounds").add_subparsers(dest="what", required=True)
    p = den.add_parser("product", help="bounds on prod (1 - q^-k)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--K", type=_positive, default=8)
    _common(p)
    for name in ("gamma7", "gamma6"):
        p = den.add_parser(name, help=f"upper bound on the hitting density for d = {name[-1]}")
        p.add_argument("--K", type=_positive, default=8)
        _common(p)
    p = den.add_parser("trivial", help="1/(d+1)")
    p.add_argument("--d", type=_positive, required=True)
    _common(p)

    p = groups.add_parser("check", help="re-verify a certificate")
    p.add_argument("certificate")
    return parser


# helpers ---------------------------------------------------------------------------

def _budget(args) -> Budget:
    b = budget_from_env()
    if getattr(args, "budget_members", None):
        b = replace(b, members=args.budget_members)
    if getattr(args, "budget_nodes", None):
        b = replace(b, nodes=args.budget_nodes)
    return b


def _cert_path(out: str) -> Path:
    p = Path(out)
    return p.with_name(p.stem + ".cert.json")


def _sibling(out: str, suffix: str) -> Path:
    p = Path(out)
    return p.with_name(p.stem + suffix)


def _header(args, kind: str) -> dict:
    return {"kind": kind, "version": CERT_VERSION, "command": f"{args.group} {args.what}"}


def _emit(args, cert: dict, verified: bool, path=None) -> int:
    cert["status"] = "verified" if verified else "refuted"
    path = path or getattr(args, "out", None)
    if path:
        data = write_certificate(cert, path, args.mode)
    else:
        data, _ = render(cert, args.mode)
    sys.stdout.write(data.decode())
    return EXIT_OK if verified else EXIT_REFUTED


# construct -------------------------------------------------------------------------

def cmd_construct(args) -> int:
    b = _budget(args)
    cert = _header(args, "construct")
    cert["construction"] = args.what
    inputs = {}
    if args.what == "basis":
        f = basis_family(args.q, args.r, b.members)
        f.save(args.out)
        cert["params"] = {"q": args.q, "r": args.r}
        cert.update(n=f.n, r=f.r, size=len(f), density=fmt(density(f)),
                    finite_product=fmt(finite_product(args.q, args.r)),
                    result=density(f) > finite_product(args.q, args.r))
    elif args.what == "blowup":
        base = SetFamily.load(args.family)
        inputs["base"] = file_record(args.family)
        f = blow_up(base, args.m, b.members)
        f.save(args.out)
        cert["params"] = {"m": args.m}
        cert.update(n=f.n, r=f.r, size=len(f), density=fmt(density(f)), base_density=fmt(density(base)),
                    result=True)
    elif args.what == "two-layer":
        lf = two_layer_family(args.r, args.w, b.members)
        lf.save(args.out)
        w = list(args.w) if args.w else [1] + [0] * (args.r - 1)
        cert["params"] = {"r": args.r, "w": w}
        cert.update(n=lf.n, r=lf.r, upper_size=len(lf.upper), lower_size=len(lf.lower),
                    density_sum=fmt(density_sum(lf)), result=True)
    else:
        h = mod_level_family(args.n, args.d)
        h.save(args.out)
        cert["params"] = {"n": args.n, "d": args.d}
        cert.update(n=h.n, size=len(h), result=True)
    if inputs:
        cert["inputs"] = inputs
    cert["outputs"] = {"family": file_record(args.out)}
    return _emit(args, cert, bool(cert["result"]), _cert_path(args.out))


def cmd_plan(args) -> int:
    plan = striped_plan(args.n, args.d, _budget(args), K=args.K)
    refs, outputs = {}, {}
    for level, fam in plan_layer_families(plan).items():
        path = _sibling(args.out, f".level{level}.json")
        fam.save(path)
        refs[level] = str(path)
        outputs[f"level{level}"] = file_record(path)
    body = plan.to_json(refs)
    Path(args.out).write_bytes(dump_json(body))
    outputs["plan"] = file_record(args.out)
    if plan.fully_materialized:
        hpath = _sibling(args.out, ".hitting.json")
        plan.hitting_family().save(hpath)
        outputs["hitting"] = file_record(hpath)
    cert = _header(args, "plan")
    cert.update(n=args.n, d=args.d, K=args.K, levels=body["levels"],
                fully_materialized=plan.fully_materialized,
                asymptotic_density=body["asymptotic_density"], asymptotic_bound=body["asymptotic_bound"],
                outputs=outputs)
    return _emit(args, cert, True, _cert_path(args.out))


# verify ----------------------------------------------------------------------------

def cmd_verify(args) -> int:
    b = _budget(args)
    if args.what == "daisy":
        f = SetFamily.load(args.family)
        if args.r is not None and args.r != f.r:
            raise PatternMismatch(f"--r {args.r} does not match the family uniformity {f.r}")
        pat = DaisyPattern(f.r, args.s, args.t)
        free, body = daisy_free(f, pat, mode=args.mode, workers=args.threads, node_budget=b.nodes)
        cert = _header(args, "daisy_free")
        cert.update(body)
        cert["inputs"] = {"family": file_record(args.family)}
        return _emit(args, cert, free)
    if args.what == "two-layer":
        lf = LayeredFamily.load(args.family)
        indices = [args.i] if args.i is not None else q6_layer_indices(lf.r)
        start = time.perf_counter()
        witness = None
        for i in indices:
            witness = find_consecutive_q6(lf, i, node_budget=b.nodes)
            if witness is not None:
                break
        cert = _header(args, "two_layer_free")
        cert.update(indices=indices, family_sha256=lf.sha256(), density_sum=fmt(density_sum(lf)),
                    result=witness is None, witness=witness.to_json() if witness else None,
                    runtime_ms=round((time.perf_counter() - start) * 1000, 3),
                    inputs={"family": file_record(args.family)})
        return _emit(args, cert, witness is None)
    h = HittingFamily.load(args.family)
    start = time.perf_counter()
    res = verify_hitting(h, args.d)
    cert = _header(args, "hitting")
    cert.update(n=h.n, d=args.d, size=len(h), family_sha256=h.sha256(), result=res.ok,
                missed=res.missed.to_json() if res.missed else None, checked=res.checked,
                runtime_ms=round((time.perf_counter() - start) * 1000, 3),
                inputs={"family": file_record(args.family)})
    return _emit(args, cert, res.ok)


# lemma -----------------------------------------------------------------------------

def cmd_lemma(args) -> int:
    b = _budget(args)
    if args.what == "arc":
        j = args.j if args.j is not None else args.dim
        res = max_arc(args.q, args.dim, j, args.cap, normalize=args.normalize, node_budget=b.nodes)
        cert = _header(args, "arc_search")
        cert.update(res.to_certificate())
        return _emit(args, cert, res.max_size < args.cap)
    if args.what == "frame":
        res = frame_search(args.q, args.dim, args.t, node_budget=b.nodes)
        cert = _header(args, "frame_search")
        cert.update(q=args.q, dim=args.dim, target=args.t, extends=res.extends,
                    witness=[list(v) for v in res.witness], terminal=res.terminal,
                    nodes=res.nodes, runtime_ms=round(res.runtime_ms, 3))
        return _emit(args, cert, not res.extends)
    fn = q_plus_two_pairwise if args.what == "pairwise" else q_plus_two_any_q
    ok = fn(args.q)
    cert = _header(args, "lemma")
    cert.update(lemma=args.what, q=args.q, result=ok)
    return _emit(args, cert, ok)


# oracle ----------------------------------------------------------------------------

def _oracle_cap(args) -> int:
    return args.budget_members or ORACLE_MAX_MEMBERS


def cmd_oracle(args) -> int:
    if args.what == "monotone":
        return cmd_monotone(args)
    cap = _oracle_cap(args)
    if args.what == "ex":
        pats = [DaisyPattern(args.r, args.s, args.t)] if args.s is not None else paper_patterns(args.r, args.t)
        res = exact_ex(args.n, args.r, pats, max_members=cap)
    elif args.what == "g":
        res = exact_g(args.n, args.d)
    else:
        res = exact_l(args.n, args.r, max_members=cap)
    cert = _header(args, "oracle")
    cert.update(quantity=res.quantity, params=res.params, value=res.value_text(), verified=res.verified,
                nodes=res.nodes, constraints=res.constraints, max_members=cap,
                runtime_ms=round(res.runtime_ms, 3))
    if args.out:
        wpath = _sibling(args.out, ".witness.json")
        res.witness.save(wpath)
        cert["outputs"] = {"witness": file_record(wpath)}
    cert["witness"] = res.witness.to_json()
    return _emit(args, cert, res.verified)


def cmd_monotone(args) -> int:
    rep = monotonicity_suite()
    rows, timings = [], {}
    wdir = _sibling(args.out, "_witnesses") if args.out else None
    if wdir:
        wdir.mkdir(parents=True, exist_ok=True)
    for res in rep.results:
        tag = f"{res.quantity}_" + "_".join(f"{k}{v}" for k, v in res.params.items() if k != "patterns")
        wfile = ""
        if wdir:
            wpath = wdir / f"{tag}.json"
            res.witness.save(wpath)
            wfile = str(wpath)
        timings[tag] = round(res.runtime_ms, 3)
        runtime = f"{res.runtime_ms:.3f}" if args.mode == "fast" else ""
        rows.append([res.quantity, res.params_text(), res.value_text(), wfile, res.nodes, runtime])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "params", "value", "witness_file", "nodes", "runtime_ms"])
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
        if args.mode != "fast":
            timing_path(args.out).write_bytes(dump_json(timings))
    summary = {"kind": "monotonicity", "version": CERT_VERSION, "command": "oracle monotone",
               "points": len(rep.results), "checks": len(rep.checks),
               "unverified_witnesses": sum(not r.verified for r in rep.results),
               "violations": rep.violations}
    verified = rep.ok
    summary["status"] = "verified" if verified else "refuted"
    sys.stdout.write(dump_json(summary).decode())
    return EXIT_OK if verified else EXIT_REFUTED


# density ---------------------------------------------------------------------------

def cmd_density(args) -> int:
    cert = _header(args, "density")
    cert["report"] = args.what
    if args.what == "product":
        pb = product_bound(args.q, args.K)
        cert.update(q=args.q, K=args.K, lower=fmt(pb.lower), upper=fmt(pb.upper))
        return _emit(args, cert, pb.lower <= pb.upper)
    if args.what == "trivial":
        cert.update(d=args.d, bound=fmt(trivial_upper(args.d)), construction="construct mod-level")
        return _emit(args, cert, True)
    fn = gamma7_report if args.what == "gamma7" else gamma6_report
    try:
        rep = fn(args.K)
    except BoundTooLoose as exc:
        cert.update(K=args.K, error=str(exc))
        return _emit(args, cert, False)
    cert.update(K=args.K, bound=fmt(rep.bound), target=fmt(rep.target),
                implied_lambda_lower=fmt(rep.implied_lambda_lower), data=rep.to_json())
    return _emit(args, cert, rep.recheck())


def cmd_check(args) -> int:
    ok = check_certificate(args.certificate)
    sys.stdout.write(f"{args.certificate}: {'consistent' if ok else 'INCONSISTENT'}\n")
    return EXIT_OK if ok else EXIT_REFUTED


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.group == "construct":
            return cmd_plan(args) if args.what == "plan" else cmd_construct(args)
        if args.group == "check":
            args.mode = "deterministic"
            return cmd_check(args)
        return {"verify": cmd_verify, "lemma": cmd_lemma, "oracle": cmd_oracle,
                "density": cmd_density}[args.group](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (DaisyforgeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
