"""Certificate files: one JSON document with sorted keys, rationals as ``p/q``.

Nodes are stored once in a table keyed by their canonical id and referenced
by index elsewhere, so nested chains do not repeat their serializations.
"""

from __future__ import annotations

import json
from fractions import Fraction

from ..bdcore.dvector import DVector
from ..bdcore.nodes import BDParams, parse_node
from ..errors import ParseError
from ..rational import fmt, parse_rational
from .growth import Block, GrowthCertificate

FORMAT = "bdspace-growth-certificate/1"


def to_document(cert: GrowthCertificate) -> dict:
    table, index = [], {}

    def ref(node):
        i = index.get(node.id)
        if i is None:
            i = index[node.id] = len(table)
            table.append(node.id)
        return i

    blocks = []
    for b in cert.blocks:
        coeffs = sorted(b.vector.items(), key=lambda kv: kv[0].key)
        blocks.append({
            "coeffs": [[ref(n), fmt(v)] for n, v in coeffs],
            "end": b.end,
            "eta": ref(b.eta),
            "eta_value": fmt(b.value),
            "hi": b.hi,
            "lo": b.lo,
        })
    chain = [{"node": ref(g), "r": r} for g, r in cert.chain]
    p = cert.params
    return {
        "blocks": blocks,
        "chain": chain,
        "epsilon": fmt(cert.epsilon),
        "format": FORMAT,
        "ks": list(cert.ks),
        "level": cert.level,
        "nodes": table,
        "params": {"N": p.N, "omega": fmt(p.omega), "theta": fmt(p.theta)},
        "scale": fmt(cert.scale),
        "system": cert.system,
        "values": [fmt(v) for v in cert.values],
    }


def from_document(doc: dict) -> GrowthCertificate:
    if doc.get("format") != FORMAT:
        raise ParseError(f"not a certificate document (format {doc.get('format')!r})")
    try:
        cache = {}
        nodes = []
        for text in doc["nodes"]:
            node = cache.get(text)
            if node is None:
                node = cache[text] = parse_node(text)
            nodes.append(node)
        p = doc["params"]
        params = BDParams(int(p["N"]), parse_rational(p["theta"]), parse_rational(p["omega"]))
        blocks = []
        for b in doc["blocks"]:
            vec = DVector({nodes[i]: parse_rational(v) for i, v in b["coeffs"]})
            blocks.append(Block(vec, int(b["lo"]), int(b["hi"]), nodes[b["eta"]],
                                parse_rational(b["eta_value"]), int(b["end"])))
        chain = [(nodes[c["node"]], int(c["r"])) for c in doc["chain"]]
        return GrowthCertificate(doc["system"], params, parse_rational(doc["epsilon"]), int(doc["level"]),
                                 chain, blocks, [parse_rational(v) for v in doc["values"]],
                                 parse_rational(doc["scale"]), list(doc.get("ks", [])))
    except (KeyError, IndexError, TypeError) as exc:
        raise ParseError(f"malformed certificate document: {exc!r}") from None


def dumps(cert: GrowthCertificate) -> str:
    return json.dumps(to_document(cert), sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> GrowthCertificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"certificate is not valid JSON: {exc.msg}", exc.pos) from None
    return from_document(doc)


def write_certificate(cert: GrowthCertificate, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(cert))


def read_certificate(path) -> GrowthCertificate:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
