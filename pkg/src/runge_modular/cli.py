"""Command-line front end: analyze, construct, verify, compare.

Exit codes: 0 success, 1 malformed input or bad options, 2 Runge condition
fails, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from typing import Any, Sequence

import flint

from . import __version__
from .bounds import BoundInputs, bilu_parent_arb, height_bound_chain, up
from .congruence import (
    check_field_subgroup,
    compute_m,
    curve_invariants,
    galois_orbits_by_matrices,
    group_from_json,
    runge_condition,
)
from .cyclotomic import unit_subgroup

EXIT_OK, EXIT_INPUT, EXIT_RUNGE, EXIT_FAILED = 0, 1, 2, 3
MAX_LEVEL = 8


class InputError(ValueError):
    pass


def _load_json(text_or_path: str) -> Any:
    try:
        if text_or_path.lstrip().startswith(("{", "[")):
            return json.loads(text_or_path)
        with open(text_or_path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input: {exc}") from exc


def _group(data: Any):
    if not isinstance(data, dict):
        raise InputError("group description must be a JSON object with N and generators")
    try:
        return group_from_json(data)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _field_subgroup(G, K: Sequence[str] | None) -> frozenset[int]:
    if not K or K == ["full"] or K == ["K_G"]:
        return G.det_image
    try:
        gens = [int(x) for part in K for x in part.split(",") if x]
    except ValueError as exc:
        raise InputError(f"--K expects 'full' or unit generators: {exc}") from exc
    try:
        return check_field_subgroup(G.level, unit_subgroup(G.level, gens), G.det_image)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _envelope(command: str, config: dict, seed: int, body: dict) -> dict:
    return {"version": __version__, "command": command, "config_hash": _config_hash(config), "seed": seed, **body}


def render_text(obj: Any, prefix: str = "") -> list[str]:
    """Flatten a JSON value into 'path: value' lines (same content as the JSON)."""
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            lines.extend(render_text(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        for i, v in enumerate(obj):
            lines.extend(render_text(v, f"{prefix}[{i}]"))
    else:
        lines.append(f"{prefix}: {json.dumps(obj)}")
    return lines


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, payload: dict) -> None:
    if args.out:
        _write_atomic(args.out, json.dumps(payload, indent=2, sort_keys=False) + "\n")
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(render_text(payload)))


def _config(args) -> dict:
    keys = ("command", "input", "sigma", "K", "s", "prec", "seed", "tags", "allow_large", "skip_q", "s_values")
    out = {}
    for k in keys:
        v = getattr(args, k, None)
        if k == "input" and v and not v.lstrip().startswith(("{", "[")) and os.path.exists(v):
            with open(v, "rb") as fh:
                v = {"sha256": hashlib.sha256(fh.read()).hexdigest()}
        out[k] = v
    return out


def _parse_sigma(text: str, orbits, curve) -> list[int] | None:
    if text in (None, "auto"):
        return None
    try:
        ids = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError as exc:
        raise InputError(f"--sigma expects 'auto' or orbit ids: {exc}") from exc
    if not ids or any(not 0 <= i < orbits.count for i in ids):
        raise InputError(f"orbit ids must lie in [0, {orbits.count})")
    sigma = sorted(c for i in ids for c in orbits.orbits[i])
    if len(sigma) >= curve.n_cusps:
        raise InputError("the chosen orbits cover every cusp")
    return sigma


def _tag_orbits(curve, orbits) -> None:
    for c in curve.cusps:
        c.orbit_id = orbits.orbit_of(c.index)


def _bounds_json(rep) -> dict:
    data = rep.to_json()
    data["bilu_parent_exceeds_poly_bound"] = bool(rep.bilu_parent.lower() > rep.height_bound_poly.upper())
    return data


# -- commands -----------------------------------------------------------------------


def cmd_analyze(args) -> int:
    from .suites import auto_sigma

    G = _group(_load_json(args.input))
    D = _field_subgroup(G, args.K)
    curve = curve_invariants(G)
    orbits = galois_orbits_by_matrices(G, curve, D)
    _tag_orbits(curve, orbits)
    ok = runge_condition(orbits.count, args.s)
    body: dict = {
        "curve": curve.to_json(),
        "field_degree_K_G": curve.field_degree,
        "orbits": orbits.to_json(),
        "s": args.s,
        "runge_condition": ok,
    }
    if ok:
        explicit = _parse_sigma(args.sigma, orbits, curve)
        if explicit is None:
            sigma, m = auto_sigma(curve, orbits, args.s, "max")
            body["sigma_rule"] = "largest m over unions of at most s orbits"
        else:
            sigma, m = explicit, compute_m(curve, explicit)
            body["sigma_rule"] = "explicit"
        body["sigma"] = sigma
        body["m"] = m
        profile = tuple((curve.cusps[orb[0]].width, len(orb)) for orb in orbits.orbits if orb[0] in sigma)
        rep = height_bound_chain(BoundInputs(G.level, m, curve.mu, curve.group_order, profile, args.s))
        body["bounds"] = _bounds_json(rep)
    _emit(args, _envelope("analyze", _config(args), args.seed, body))
    return EXIT_OK if ok else EXIT_RUNGE


def cmd_construct(args) -> int:
    from .modform_space import build_basis
    from .siegel_search import build_certificate, certificate_to_json
    from .suites import auto_sigma

    G = _group(_load_json(args.input))
    if G.level > MAX_LEVEL and not args.allow_large:
        raise InputError(f"N = {G.level} exceeds {MAX_LEVEL}; pass --allow-large to proceed")
    D = _field_subgroup(G, args.K)
    curve = curve_invariants(G)
    orbits = galois_orbits_by_matrices(G, curve, D)
    _tag_orbits(curve, orbits)
    if not runge_condition(orbits.count, args.s):
        payload = _envelope("construct", _config(args), args.seed, {"runge_condition": False, "orbits": orbits.to_json()})
        print("\n".join(render_text(payload)), file=sys.stderr)
        return EXIT_RUNGE
    explicit = _parse_sigma(args.sigma, orbits, curve)
    if explicit is None:
        sigma, m = auto_sigma(curve, orbits, args.s, "min")
    else:
        sigma, m = explicit, compute_m(curve, explicit)
    basis = build_basis(12 * m, G, curve, prec=args.prec, seed=args.seed)
    cert = build_certificate(basis, sigma, orbits, with_Q=not args.skip_q)
    body = {"curve": curve.to_json(), "basis_dimension": basis.d, "certificate": certificate_to_json(cert, orbits)}
    payload = _envelope("construct", _config(args), args.seed, body)
    _emit(args, payload)
    c = body["certificate"]
    print(f"u_norm {c['u_norm']} (log {math_log(c['u_norm']):.3f}) <= calB (log <= {c['log_calB_upper']:.3f})", file=sys.stderr)
    return EXIT_OK if all(cert.checks.values()) else EXIT_FAILED


def math_log(x: int) -> float:
    import math

    return math.log(x) if x > 0 else float("-inf")


def cmd_verify(args) -> int:
    from .suites import run_suites

    if args.input:
        from .siegel_search import verify_certificate

        data = _load_json(args.input)
        cert = data.get("certificate", data) if isinstance(data, dict) else None
        if not isinstance(cert, dict) or "u" not in cert:
            raise InputError("verify --input expects a certificate written by construct")
        try:
            res = verify_certificate(cert, with_Q=not args.skip_q)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed certificate: {exc}") from exc
        except ArithmeticError as exc:
            res = {"error": str(exc), "all": False}
        _emit(args, _envelope("verify", _config(args), args.seed, {"certificate_checks": res}))
        return EXIT_OK if res["all"] else EXIT_FAILED
    try:
        results = run_suites(args.tags, seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    body = {"results": [r.to_json() for r in results], "all_passed": all(r.passed for r in results)}
    _emit(args, _envelope("verify", _config(args), args.seed, body))
    return EXIT_OK if body["all_passed"] else EXIT_FAILED


COMPARE_COLUMNS = ["N", "group_order", "mu", "s", "orbits", "runge", "m", "exact_bound", "poly_bound", "coarse_bound", "bilu_parent"]


def compare_rows(rows: Sequence[dict]) -> list[dict]:
    from .suites import auto_sigma

    out = []
    for row in rows:
        G = _group(row.get("group", row))
        s = int(row.get("s", 1))
        curve = curve_invariants(G)
        orbits = galois_orbits_by_matrices(G, curve, G.det_image)
        rec = {
            "N": G.level,
            "group_order": curve.group_order,
            "mu": curve.mu,
            "s": s,
            "orbits": orbits.count,
            "runge": runge_condition(orbits.count, s),
            "m": None,
            "exact_bound": None,
            "poly_bound": None,
            "coarse_bound": None,
            "bilu_parent": up(bilu_parent_arb(G.level, curve.group_order, s)),
        }
        if rec["runge"]:
            _, m = auto_sigma(curve, orbits, s, "max")
            rep = height_bound_chain(BoundInputs(G.level, m, curve.mu, curve.group_order, s=s))
            rec.update(
                m=m,
                exact_bound=up(rep.height_bound_exact),
                poly_bound=up(rep.height_bound_poly),
                coarse_bound=up(rep.height_bound_coarse),
            )
        out.append(rec)
    return out


def cmd_compare(args) -> int:
    data = _load_json(args.input)
    if isinstance(data, dict):
        s_values = [int(x) for x in (args.s_values or str(args.s)).split(",")]
        rows = [{"group": data, "s": s} for s in s_values]
    elif isinstance(data, list):
        rows = data
    else:
        raise InputError("compare expects a group object or a list of {group, s} rows")
    table = compare_rows(rows)
    payload = _envelope("compare", _config(args), args.seed, {"columns": COMPARE_COLUMNS, "rows": table})
    if args.out and args.out.endswith(".csv"):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COMPARE_COLUMNS)
        writer.writeheader()
        writer.writerows(table)
        _write_atomic(args.out, buf.getvalue())
        args.out = None
    _emit(args, payload)
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="runge-modular", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_input=True):
        sp.add_argument("--input", required=need_input, help="group JSON (path or inline), or a certificate for verify")
        sp.add_argument("--K", nargs="+", default=None, help="'full' (K = K_G) or generators of D in (Z/N)^x")
        sp.add_argument("--s", type=int, default=1, help="|S|, number of places (default 1)")
        sp.add_argument("--sigma", default="auto", help="'auto' or comma-separated orbit ids")
        sp.add_argument("--prec", type=int, default=None, help="q_N precision for the basis search")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="write JSON here (atomic)")
        sp.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")

    common(sub.add_parser("analyze", help="invariants, cusp orbits, Runge condition and the bound chain"))
    c = sub.add_parser("construct", help="build a Runge function and its certificate")
    common(c)
    c.add_argument("--allow-large", action="store_true", help=f"allow N > {MAX_LEVEL}")
    c.add_argument("--skip-q", action="store_true", help="skip the Z[j] integrality step")
    v = sub.add_parser("verify", help="run the verification suites or re-check a certificate")
    common(v, need_input=False)
    v.add_argument("--tags", nargs="*", default=None, help="suite tags to run (default: all)")
    v.add_argument("--skip-q", action="store_true")
    cp = sub.add_parser("compare", help="bound table against the Bilu-Parent value")
    common(cp)
    cp.add_argument("--s-values", default=None, help="comma-separated s values for a single group")
    return p


COMMANDS = {"analyze": cmd_analyze, "construct": cmd_construct, "verify": cmd_verify, "compare": cmd_compare}


def main(argv: Sequence[str] | None = None) -> int:
    threads = os.environ.get("RUNGE_THREADS")
    if threads:
        try:
            flint.ctx.threads = max(1, int(threads))
        except ValueError:
            print("RUNGE_THREADS must be an integer", file=sys.stderr)
            return EXIT_INPUT
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "s", 1) < 1:
        print("error: --s must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
