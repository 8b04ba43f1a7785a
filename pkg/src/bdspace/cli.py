"""Command-line entry point: ``bdspace <command> [options]``.

Every command writes JSON lines (one record per line, sorted keys) to
``--out`` or stdout.  Rationals appear as exact ``p/q`` strings next to a
12-digit decimal.  Exit codes: 0 success, 1 verification failure, 2 usage
error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from fractions import Fraction

from . import __version__
from .bdcore import BDParams, DVector, eval_coord, filler, make_node, parse_node, validate_node
from .bounds import (Budget, SkippedDecomposition, build_growth_certificate, constants_of,
                     iterate_growth, read_certificate, skipped_sum_bound, verify_certificate,
                     write_certificate)
from .coeffs import solve_alpha, solve_alpha_blocks
from .errors import AlphaNotFoundError, BDError, ParseError, ResourceCapError, VerificationError
from .rational import fmt, fmt_decimal, parse_rational
from .setsys import build_system, interval_family
from .tsirelson import norming_certificate, parse_vector, tsirelson_norm, verify_tree

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    code = "E_USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def exact(q):
    """``{"exact": "p/q", "decimal": "..."}`` for a rational."""
    return {"decimal": fmt_decimal(q), "exact": fmt(q)}


def emit_report(records, out, csv_path=None):
    """Write one JSON object per line; optionally a flat CSV of the same records."""
    lines = "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)
    if out is None:
        sys.stdout.write(lines)
    else:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(lines)
        except OSError as exc:
            raise OSError(f"cannot write report {out}: {exc.strerror}") from None
    if csv_path:
        rows = [_flatten(r) for r in records]
        keys = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
        try:
            with open(csv_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise OSError(f"cannot write CSV {csv_path}: {exc.strerror}") from None


def _flatten(rec, prefix=""):
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True, separators=(",", ":"))
        else:
            out[key] = v
    return out


def read_config(path):
    """``key = value`` lines; ``#`` starts a comment.  Keys mirror long flags."""
    out = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for no, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out.extend([f"--{key.replace('_', '-')}", value])
    return out


# argument parsing ----------------------------------------------------------

def _rational(text):
    try:
        return parse_rational(text)
    except ParseError:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _common(p):
    p.add_argument("--out", help="report file (JSON lines); default stdout")
    p.add_argument("--csv", help="optional CSV summary")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timing", action="store_true", help="include wall-clock timing in records")


def _params(p, omega="1/2"):
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--theta", type=_rational, default=Fraction(7, 5))
    p.add_argument("--omega", type=_rational, default=Fraction(omega))


def build_parser():
    top = _Parser(prog="bdspace", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"bdspace {__version__}")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("tnorm", help="Tsirelson-type norm with a norming tree")
    p.add_argument("--system", default="schreier")
    p.add_argument("--theta", type=_rational, default=Fraction(1, 2))
    p.add_argument("--vector", required=True, help="e.g. {3:1,4:-1/2}")
    _common(p)

    p = sub.add_parser("alpha", help="convex coefficients with small mass on the system")
    p.add_argument("--system", default="schreier")
    p.add_argument("--omega", type=_rational, default=Fraction(1, 2))
    p.add_argument("--k-max", type=int, default=64)
    p.add_argument("--blocks", help="interval family 'lo-hi,lo-hi,...' for the block version")
    p.add_argument("--search", choices=("gallop", "linear"), default="gallop")
    _common(p)

    p = sub.add_parser("validate", help="validate a serialized node")
    p.add_argument("--system", default="schreier")
    _params(p)
    p.add_argument("--node", required=True)
    _common(p)

    p = sub.add_parser("eval", help="coordinate of a d-vector at a node")
    _params(p)
    p.add_argument("--dvector", required=True, help="whitespace-separated 'coef@node-id' terms")
    p.add_argument("--node", required=True)
    _common(p)

    p = sub.add_parser("constants", help="closed-form constants")
    _params(p)
    _common(p)

    p = sub.add_parser("certify-growth", help="build a growth certificate and write it")
    p.add_argument("--system", default="schreier")
    _params(p)
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 10))
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--rank-rule", choices=("tight", "apriori"), default="tight")
    p.add_argument("--k-max", type=int, default=256)
    p.add_argument("--max-rank", type=int, default=100000)
    p.add_argument("--max-nodes", type=int, default=20000)
    p.add_argument("--cert", help="certificate output path")
    _common(p)

    p = sub.add_parser("verify", help="re-verify a certificate file")
    p.add_argument("--cert", required=True)
    p.add_argument("--system", help="override the system recorded in the certificate")
    _common(p)

    p = sub.add_parser("contrast", help="dichotomy evidence for two systems")
    p.add_argument("--systems", default="full,schreier")
    _params(p)
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 10))
    p.add_argument("--omegas", default="1/4,1/2,7/10")
    p.add_argument("--samples", type=int, default=100)
    _common(p)
    return top


# commands ------------------------------------------------------------------

def _system(args):
    return build_system(args.system)


def _bdparams(args):
    return BDParams(args.N, args.theta, args.omega)


def _params_echo(params):
    return {"N": params.N, "omega": fmt(params.omega), "theta": fmt(params.theta)}


def cmd_tnorm(args):
    sysm = _system(args)
    x = parse_vector(args.vector)
    value = tsirelson_norm(x, sysm, args.theta)
    rec = {"inputs": {"system": sysm.descriptor, "theta": fmt(args.theta),
                      "vector": {str(k): fmt(v) for k, v in x.items()}},
           "outputs": {"norm": exact(value)}}
    if value:
        tree = norming_certificate(x, sysm, args.theta)
        rec["outputs"]["tree"] = _tree_record(tree)
        rec["outputs"]["tree_verified"] = verify_tree(tree, x, sysm, args.theta)
    return [rec], EXIT_OK


def _tree_record(t):
    if t.is_leaf:
        return {"index": t.index, "sign": t.sign, "value": fmt(t.value)}
    return {"children": [_tree_record(c) for c in t.children],
            "family": [list(e) for e in t.family],
            "markers": list(t.witness.markers), "value": fmt(t.value)}


def _parse_blocks(text):
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        lo, _, hi = chunk.partition("-")
        try:
            pairs.append((int(lo), int(hi or lo)))
        except ValueError:
            raise UsageError(f"bad interval {chunk!r}; expected lo-hi") from None
    return interval_family(pairs)


def cmd_alpha(args):
    sysm = _system(args)
    inputs = {"k_max": args.k_max, "omega": fmt(args.omega), "system": sysm.descriptor}
    if args.blocks:
        fam = _parse_blocks(args.blocks)
        inputs["blocks"] = [list(e) for e in fam]
        sol = solve_alpha_blocks(sysm, args.omega, fam, k_max=min(args.k_max, len(fam)), search=args.search)
    else:
        sol = solve_alpha(sysm, args.omega, args.k_max, search=args.search)
    if sol is None:
        rec = {"inputs": inputs, "outputs": {"found": False}, "error": AlphaNotFoundError.code}
        return [rec], EXIT_FAIL
    out = {"alpha": [fmt(a) for a in sol.alpha], "argmax": list(sol.argmax), "found": True,
           "k": sol.k, "value": exact(sol.value)}
    return [{"inputs": inputs, "outputs": out}], EXIT_OK


def cmd_validate(args):
    sysm, params = _system(args), _bdparams(args)
    node = parse_node(args.node)
    rep = validate_node(node, sysm, params)
    checks = {name: {"detail": detail, "passed": passed} for name, (passed, detail) in rep.checks.items()}
    rec = {"inputs": {"node": node.id, "params": _params_echo(params), "system": sysm.descriptor},
           "outputs": {"checks": checks, "valid": rep.ok}}
    return [rec], EXIT_OK if rep.ok else EXIT_FAIL


def parse_dvector(text):
    coeffs = {}
    for term in text.split():
        coef, sep, ident = term.partition("@")
        if not sep:
            raise ParseError(f"expected coef@node-id, got {term!r}")
        node = parse_node(ident)
        coeffs[node] = coeffs.get(node, 0) + parse_rational(coef)
    return DVector(coeffs)


def cmd_eval(args):
    params = _bdparams(args)
    x = parse_dvector(args.dvector)
    node = parse_node(args.node)
    value = eval_coord(x, node, params)
    rec = {"inputs": {"node": node.id, "params": _params_echo(params),
                      "dvector": {n.id: fmt(v) for n, v in sorted(x.items(), key=lambda kv: kv[0].key)}},
           "outputs": {"value": exact(value)}}
    return [rec], EXIT_OK


def cmd_constants(args):
    params = _bdparams(args)
    c = constants_of(params)
    out = {"C": exact(c.C), "c": exact(c.c), "isoBound": exact(c.iso_bound),
           "projBound": exact(c.proj_bound), "ordered": c.check()}
    return [{"inputs": {"params": _params_echo(params)}, "outputs": out}], EXIT_OK


def _cert_record(cert, verified):
    return {
        "chain_ranks": [g.rank for g, _ in cert.chain],
        "ks": list(cert.ks),
        "level": cert.level,
        "r": [r for _, r in cert.chain],
        "target": exact(cert.target),
        "top_value": exact(cert.top_value),
        "values": [exact(v) for v in cert.values],
        "verified": verified,
    }


def cmd_certify(args):
    sysm, params = _system(args), _bdparams(args)
    budget = Budget(max_rank=args.max_rank, max_nodes=args.max_nodes, k_max=args.k_max)
    inputs = {"epsilon": fmt(args.epsilon), "level": args.level, "params": _params_echo(params),
              "rank_rule": args.rank_rule, "system": sysm.descriptor}
    try:
        if args.level == 1:
            cert = build_growth_certificate(sysm, params, args.epsilon, rank_rule=args.rank_rule, budget=budget)
        else:
            cert = iterate_growth(sysm, params, args.epsilon, args.level, budget=budget,
                                  rank_rule=args.rank_rule)
    except (AlphaNotFoundError, ResourceCapError) as exc:
        code = EXIT_CAP if isinstance(exc, ResourceCapError) else EXIT_FAIL
        return [{"error": exc.code, "inputs": inputs, "message": str(exc)}], code
    rep = verify_certificate(cert, sysm)
    if args.cert:
        write_certificate(cert, args.cert)
        inputs["cert"] = args.cert
    rec = {"inputs": inputs, "outputs": _cert_record(cert, rep.ok)}
    return [rec], EXIT_OK if rep.ok else EXIT_FAIL


def cmd_verify(args):
    cert = read_certificate(args.cert)
    sysm = build_system(args.system or cert.system)
    rep = verify_certificate(cert, sysm)
    checks = {name: {"detail": detail, "passed": passed} for name, (passed, detail) in rep.checks.items()}
    out = _cert_record(cert, rep.ok)
    out["checks"] = checks
    rec = {"inputs": {"cert": args.cert, "system": sysm.descriptor}, "outputs": out}
    if not rep.ok:
        rec["error"] = VerificationError.code
    return [rec], EXIT_OK if rep.ok else EXIT_FAIL


def random_skipped_sum(rng, params, iso):
    """Filler blocks at random ranks, scaled to certified norm at most 1."""
    m = rng.randint(1, 5)
    rank = rng.randint(1, 3)
    blocks, markers = [], []
    for j in range(m + 1):
        if j:
            rank += rng.randint(0, 2)
            markers.append(rank)
        width = rng.randint(1, 3)
        coeffs = {}
        weights = [Fraction(rng.randint(1, 4)) for _ in range(width)]
        total = sum(weights)
        for i, w in enumerate(weights):
            sign = rng.choice((1, -1))
            coeffs[filler(rank + i)] = sign * w / (total * iso)
        blocks.append(DVector(coeffs))
        rank += width
    return blocks, markers, rank


def probe_nodes(rng, sysm, params, blocks, top, count=12):
    """Valid chains above the blocks whose parts point at block fillers."""
    fillers = sorted({n for b in blocks for n in b.nodes()}, key=lambda n: n.key)
    out = []
    prev = None
    for i in range(count):
        rank = top + 1 + i
        lo = 0 if prev is None else prev.rank + 1
        pool = [f for f in fillers if f.rank >= lo]
        if not pool:
            prev = None
            continue
        picks = sorted(rng.sample(pool, min(len(pool), rng.randint(1, 2))), key=lambda n: n.rank)
        parts = [(rng.choice((1, -1)), f.rank, f.rank, f, rng.randint(1, 2)) for f in picks]
        node = make_node(rank, "a" if prev is None else "b", parts, prev)
        if validate_node(node, sysm, params).ok:
            out.append(node)
            prev = node if node.age < params.N else None
    return out


def cmd_contrast(args):
    names = [s.strip() for s in args.systems.split(",") if s.strip()]
    if len(names) != 2:
        raise UsageError("--systems needs exactly two descriptors")
    omegas = [parse_rational(w) for w in args.omegas.split(",")]
    rng = random.Random(args.seed)
    records, exit_code = [], EXIT_OK
    for name in names:
        sysm = build_system(name)
        for omega in omegas:
            row = {"omega": fmt(omega), "system": sysm.descriptor}
            try:
                params = BDParams(args.N, args.theta, omega)
            except BDError as exc:
                row.update({"outcome": "invalid-params", "detail": str(exc)})
                records.append({"row": row, "table": "certificate"})
                continue
            try:
                cert = build_growth_certificate(sysm, params, args.epsilon)
                rep = verify_certificate(cert, sysm)
                row.update({"ks": list(cert.ks), "outcome": "certified" if rep.ok else "verify-failed",
                            "top_value": exact(cert.top_value)})
            except AlphaNotFoundError as exc:
                row.update({"error": exc.code, "outcome": "alpha-not-found"})
            except ResourceCapError as exc:
                row.update({"error": exc.code, "outcome": "resource-cap"})
            records.append({"row": row, "table": "certificate"})
        if sysm.kind == "full":
            # the full system admits every skipped arrangement
            params = _bdparams(args)
            iso = constants_of(params).iso_bound
            worst, sampled, bound = Fraction(0), 0, None
            for _ in range(args.samples):
                blocks, markers, top = random_skipped_sum(rng, params, iso)
                witness = tuple(range(1, max(markers + [1]) + 1))
                dec = SkippedDecomposition(blocks, tuple(markers), witness)
                probes = probe_nodes(rng, sysm, params, blocks, top)
                bound, rep = skipped_sum_bound(dec, params, sysm, probes)
                worst = max(worst, rep.max_abs)
                sampled += rep.sampled
            records.append({"row": {"bound": exact(bound), "max_coordinate": exact(worst),
                                    "sampled_nodes": sampled, "sums": args.samples,
                                    "system": sysm.descriptor}, "table": "skipped-sums"})
    return records, exit_code


COMMANDS = {
    "tnorm": cmd_tnorm, "alpha": cmd_alpha, "validate": cmd_validate, "eval": cmd_eval,
    "constants": cmd_constants, "certify-growth": cmd_certify, "verify": cmd_verify,
    "contrast": cmd_contrast,
}


def run_command(argv):
    """Parse ``argv``, run the command and return ``(exit code, records, args)``."""
    argv = list(argv)
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            raise UsageError("--config needs a path")
        path = argv[i + 1]
        rest = argv[:i] + argv[i + 2:]
        if not rest:
            raise UsageError("a command is required")
        # explicit flags come after the file's so they win
        argv = rest[:1] + read_config(path) + rest[1:]
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("a command is required")
    start = time.perf_counter()
    records, code = COMMANDS[args.command](args)
    elapsed = time.perf_counter() - start
    for rec in records:
        rec["command"] = args.command
        rec["seed"] = args.seed
        rec["version"] = __version__
        if args.timing:
            rec["seconds"] = round(elapsed, 3)
    return code, records, args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        code, records, args = run_command(argv)
        emit_report(records, args.out, args.csv)
        return code
    except UsageError as exc:
        sys.stderr.write(f"{UsageError.code}: {exc}\n")
        return EXIT_USAGE
    except ResourceCapError as exc:
        sys.stderr.write(f"{exc.code}: {exc}\n")
        return EXIT_CAP
    except (ParseError, BDError) as exc:
        sys.stderr.write(f"{exc.code}: {exc}\n")
        return EXIT_USAGE if isinstance(exc, ParseError) or exc.code == "E_PRECONDITION" else EXIT_FAIL
    except OSError as exc:
        sys.stderr.write(f"E_IO: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
