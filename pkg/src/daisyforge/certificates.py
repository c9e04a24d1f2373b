"""Certificate files: checksummed inputs, quarantined timings, and re-verification.

A certificate is a JSON object whose ``kind`` names the claim.  Files it
depends on are listed under ``inputs`` (and files it produced under
``outputs``) as ``{"path", "sha256"}`` records.  Runtimes are kept out of
the certificate body in deterministic mode so that repeated runs write
byte-identical files; they go to a ``.timing.json`` sidecar instead.
"""

from __future__ import annotations

import hashlib
import json
from itertools import combinations
from pathlib import Path

from .arcs import frame_search, is_arc, max_arc, q_plus_two_any_q, q_plus_two_pairwise
from .construct import (basis_count, blow_up, mod_level_family, striped_plan,
                        two_layer_family)
from .daisy import DaisyPattern, find_consecutive_q6, search_daisy
from .density import gamma6_report, gamma7_report, product_bound, trivial_upper, fmt
from .errors import CorruptCertificate, DaisyforgeError
from .families import LayeredFamily, SetFamily, dump_json
from .gf import field_make, ground_map
from .hitting import HittingFamily, Subcube, set_to_bits, verify_hitting

CERT_VERSION = 1
VOLATILE_KEYS = ("runtime_ms",)
RECHECK_MEMBER_LIMIT = 200_000
RECHECK_HITTING_N = 20
RECHECK_ARC_POINTS = 200


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def file_record(path) -> dict:
    return {"path": str(path), "sha256": file_sha256(path)}


def split_volatile(obj, prefix: str = ""):
    """Strip runtime fields from ``obj``; return ``(stable, {json_path: value})``."""
    volatile: dict = {}
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            path = f"{prefix}/{k}"
            if k in VOLATILE_KEYS:
                volatile[path] = v
                continue
            out[k], sub = split_volatile(v, path)
            volatile.update(sub)
        return out, volatile
    if isinstance(obj, list):
        out = []
        for i, v in enumerate(obj):
            item, sub = split_volatile(v, f"{prefix}/{i}")
            out.append(item)
            volatile.update(sub)
        return out, volatile
    return obj, volatile


def timing_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".timing.json")


def render(cert: dict, mode: str) -> tuple[bytes, dict]:
    """Certificate bytes for ``mode`` together with the quarantined timings."""
    if mode == "fast":
        return dump_json(cert), {}
    stable, volatile = split_volatile(cert)
    return dump_json(stable), volatile


def write_certificate(cert: dict, path, mode: str = "deterministic") -> bytes:
    data, volatile = render(cert, mode)
    Path(path).write_bytes(data)
    if volatile:
        timing_path(path).write_bytes(dump_json(volatile))
    return data


# re-verification ------------------------------------------------------------------

def _resolve(record: dict, base: Path) -> Path:
    p = Path(record["path"])
    if p.exists():
        return p
    alt = base / p
    if not p.is_absolute() and alt.exists():
        return alt
    raise CorruptCertificate(f"referenced file {record['path']} is missing")


def _files_match(cert: dict, base: Path) -> tuple[bool, dict[str, Path]]:
    paths = {}
    ok = True
    for group in ("inputs", "outputs"):
        for name, rec in cert.get(group, {}).items():
            if rec is None:
                continue
            if not isinstance(rec, dict) or "path" not in rec or "sha256" not in rec:
                raise CorruptCertificate(f"malformed file record {name!r}")
            p = _resolve(rec, base)
            paths[name] = p
            ok &= file_sha256(p) == rec["sha256"]
    return ok, paths


def _daisy_witness_ok(f: SetFamily, pat: DaisyPattern, w: dict) -> bool:
    stem, petals = tuple(w["stem"]), tuple(w["petals"])
    if len(stem) != pat.stem_size or len(petals) != pat.t or set(stem) & set(petals):
        return False
    if any(not 1 <= x <= f.n for x in stem + petals):
        return False
    return all(tuple(sorted(stem + x)) in f for x in combinations(petals, pat.s))


def _check_daisy(cert: dict, paths: dict) -> bool:
    f = SetFamily.load(paths["family"])
    if f.sha256() != cert["family_sha256"]:
        return False
    pat = DaisyPattern(*cert["pattern"])
    if not cert["result"]:
        return cert.get("witness") is not None and _daisy_witness_ok(f, pat, cert["witness"])
    if cert.get("witness") is not None:
        return False
    if len(f) > RECHECK_MEMBER_LIMIT:
        return True
    return search_daisy(f, pat).witness is None


def _check_two_layer(cert: dict, paths: dict) -> bool:
    lf = LayeredFamily.load(paths["family"])
    if not cert["result"]:
        w = cert.get("witness")
        if w is None:
            return False
        i, Y, X = w["i"], tuple(w["Y"]), tuple(w["X"])
        if len(Y) != lf.r - i or len(X) != 6 or set(Y) & set(X):
            return False
        return (all(tuple(sorted(Y + a)) in lf.upper for a in combinations(X, i))
                and all(tuple(sorted(Y + a)) in lf.lower for a in combinations(X, i - 1)))
    if len(lf.upper) + len(lf.lower) > RECHECK_MEMBER_LIMIT:
        return True
    return all(find_consecutive_q6(lf, i) is None for i in cert["indices"])


def _check_hitting(cert: dict, paths: dict) -> bool:
    h = HittingFamily.load(paths["family"])
    d = cert["d"]
    if not cert["result"]:
        m = cert.get("missed")
        if m is None:
            return False
        c = Subcube(h.n, set_to_bits(m["base"]), set_to_bits(m["free"]))
        if c.base_mask & c.free_mask or c.dim != d:
            return False
        return not any(v in h for v in c.vertices())
    if h.n > RECHECK_HITTING_N:
        return True
    return verify_hitting(h, d).ok


def _check_arc(cert: dict, paths: dict) -> bool:
    F = field_make(cert["q"])
    w = [tuple(v) for v in cert["witness"]]
    if any(len(v) != cert["dim"] or any(not 0 <= x < F.q for x in v) for v in w):
        return False
    if len(w) != cert["max_size"] or len(w) > cert["cap"] or not is_arc(F, w, cert["j"]):
        return False
    if not cert["exhaustive"]:
        return True
    points = (F.q ** cert["dim"] - 1) // (F.q - 1)
    if points > RECHECK_ARC_POINTS:
        return True
    again = max_arc(cert["q"], cert["dim"], cert["j"], cert["cap"], normalize=cert["normalization"])
    return again.max_size == cert["max_size"]


def _check_frame(cert: dict, paths: dict) -> bool:
    res = frame_search(cert["q"], cert["dim"], cert["target"])
    return (res.extends == cert["extends"]
            and [list(v) for v in res.witness] == cert["witness"]
            and _jsonable(res.terminal) == cert["terminal"])


def _jsonable(obj):
    return json.loads(json.dumps(obj))


def _check_construct(cert: dict, paths: dict) -> bool:
    what, p = cert["construction"], cert["params"]
    out = paths["family"]
    if what == "basis":
        f = SetFamily.load(out)
        gm = ground_map(p["q"], p["r"])
        if f.n != gm.n or f.r != p["r"] or len(f) != basis_count(p["q"], p["r"]):
            return False
        return all(gm.field.is_basis([gm.vector(i) for i in m]) for m in f.members)
    if what == "blowup":
        base = SetFamily.load(paths["base"])
        return blow_up(base, p["m"]).sha256() == SetFamily.load(out).sha256()
    if what == "two-layer":
        return two_layer_family(p["r"], p["w"]).sha256() == LayeredFamily.load(out).sha256()
    if what == "mod-level":
        return mod_level_family(p["n"], p["d"]).sha256() == HittingFamily.load(out).sha256()
    raise CorruptCertificate(f"unknown construction {what!r}")


def _check_plan(cert: dict, paths: dict) -> bool:
    plan = striped_plan(cert["n"], cert["d"], K=cert.get("K", 8))
    refs = {e["level"]: e.get("family_ref") for e in cert["levels"]}
    return plan.to_json(refs)["levels"] == cert["levels"]


def _check_density(cert: dict, paths: dict) -> bool:
    what = cert["report"]
    if what == "product":
        pb = product_bound(cert["q"], cert["K"])
        return cert["lower"] == fmt(pb.lower) and cert["upper"] == fmt(pb.upper)
    if what == "trivial":
        return cert["bound"] == fmt(trivial_upper(cert["d"]))
    rep = (gamma7_report if what == "gamma7" else gamma6_report)(cert["K"])
    return rep.recheck() and rep.to_json() == cert["data"]


def _check_oracle(cert: dict, paths: dict) -> bool:
    from .oracle import exact_ex, exact_g, exact_l

    q, p = cert["quantity"], cert["params"]
    if q == "ex":
        pats = [DaisyPattern(*x) for x in p["patterns"]]
        res = exact_ex(p["n"], p["r"], pats, max_members=cert.get("max_members", 30))
        wit = SetFamily.load(paths["witness"])
    elif q == "g":
        res = exact_g(p["n"], p["d"])
        wit = HittingFamily.load(paths["witness"])
    elif q == "l":
        res = exact_l(p["n"], p["r"], max_members=cert.get("max_members", 30))
        wit = LayeredFamily.load(paths["witness"])
    else:
        raise CorruptCertificate(f"unknown oracle quantity {q!r}")
    return (res.value_text() == cert["value"] and res.verified
            and res.witness.sha256() == wit.sha256())


def _check_lemma(cert: dict, paths: dict) -> bool:
    fn = q_plus_two_pairwise if cert["lemma"] == "pairwise" else q_plus_two_any_q
    return fn(cert["q"]) == cert["result"]


_CHECKERS = {
    "daisy_free": _check_daisy,
    "two_layer_free": _check_two_layer,
    "hitting": _check_hitting,
    "arc_search": _check_arc,
    "frame_search": _check_frame,
    "construct": _check_construct,
    "plan": _check_plan,
    "density": _check_density,
    "oracle": _check_oracle,
    "lemma": _check_lemma,
}


def check_certificate(path) -> bool:
    """Re-verify a certificate from its recorded inputs.

    Witnesses are always re-validated; freeness claims are re-run when the
    instance is small enough.  Missing or unreadable referenced files raise
    ``CorruptCertificate``; checksum mismatches and failed re-validation
    return False.
    """
    path = Path(path)
    try:
        cert = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise CorruptCertificate(f"cannot read certificate {path}: {exc}") from exc
    if not isinstance(cert, dict) or cert.get("kind") not in _CHECKERS:
        raise CorruptCertificate(f"unknown certificate kind {cert.get('kind') if isinstance(cert, dict) else None!r}")
    ok, paths = _files_match(cert, path.parent)
    if not ok:
        return False
    try:
        return bool(_CHECKERS[cert["kind"]](cert, paths))
    except CorruptCertificate:
        raise
    except (KeyError, TypeError, ValueError, DaisyforgeError) as exc:
        raise CorruptCertificate(f"certificate {path} is malformed: {exc}") from exc


__all__ = ["check_certificate", "write_certificate", "render", "file_record", "file_sha256",
           "split_volatile", "timing_path", "CERT_VERSION"]
