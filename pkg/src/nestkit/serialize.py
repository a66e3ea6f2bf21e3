"""JSON encodings for every data type, with rationals kept as ``"p/q"`` strings."""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .covers import LinkedCover, RChain
from .intervals import Family, Interval, OrderMap, as_scalar, format_scalar
from .nest import BlockOperator, GridInterval, NestGrid
from .nets import NetChain
from .seminorms import DSF, ElemKind, NodeSeminorm


def interval_to_json(E: Interval) -> list[str]:
    return [format_scalar(E.lo), format_scalar(E.hi)]


def interval_from_json(doc) -> Interval:
    lo, hi = doc
    return Interval(as_scalar(lo), as_scalar(hi))


def family_to_json(P: Family) -> dict:
    return {"intervals": [interval_to_json(E) for E in P]}


def family_from_json(doc) -> Family:
    return Family(tuple(interval_from_json(E) for E in doc["intervals"]))


def cover_to_json(c: LinkedCover) -> dict:
    return {"kind": c.kind, "base": interval_to_json(c.base),
            "intervals": [interval_to_json(E) for E in c.intervals],
            "against": family_to_json(c.against)}


def cover_from_json(doc) -> LinkedCover:
    return LinkedCover(tuple(interval_from_json(E) for E in doc["intervals"]), doc["kind"],
                       interval_from_json(doc["base"]), family_from_json(doc["against"]))


def chain_to_json(ch: RChain) -> dict:
    return {"points": [format_scalar(x) for x in ch.points], "base": interval_to_json(ch.base)}


def order_map_to_json(theta: OrderMap) -> dict:
    return {"breakpoints": [[format_scalar(a), format_scalar(b)] for a, b in theta.breakpoints]}


def order_map_from_json(doc) -> OrderMap:
    return OrderMap(tuple((as_scalar(a), as_scalar(b)) for a, b in doc["breakpoints"]))


def grid_to_json(g: NestGrid) -> dict:
    doc: dict[str, Any] = {"dim": g.dim, "cuts": list(g.cuts)}
    if g.labels is not None:
        doc["labels"] = [format_scalar(x) for x in g.labels]
    return doc


def grid_from_json(doc) -> NestGrid:
    labels = doc.get("labels")
    return NestGrid(int(doc["dim"]), tuple(int(c) for c in doc["cuts"]),
                    None if labels is None else tuple(as_scalar(x) for x in labels))


def operator_to_json(X: BlockOperator) -> dict:
    flat = X.entries.reshape(-1)
    return {"grid": grid_to_json(X.grid),
            "entries": [[float(z.real), float(z.imag)] for z in flat]}


def operator_from_json(doc) -> BlockOperator:
    g = grid_from_json(doc["grid"])
    pairs = np.array(doc["entries"], dtype=float).reshape(g.dim * g.dim, 2)
    entries = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(g.dim, g.dim)
    return BlockOperator(g, entries)


def grid_interval_to_json(E: GridInterval) -> list[int]:
    return [E.start, E.stop]


def grid_interval_from_json(doc) -> GridInterval:
    return GridInterval(int(doc[0]), int(doc[1]))


def node_seminorm_to_json(f: NodeSeminorm):
    if f.top:
        return "j"
    return {"minus": f.minus.value, "plus": f.plus.value}


def node_seminorm_from_json(doc) -> NodeSeminorm:
    if doc == "j":
        return NodeSeminorm(top=True)
    return NodeSeminorm(ElemKind(doc["minus"]), ElemKind(doc["plus"]))


def dsf_to_json(d: DSF) -> dict:
    return {"grid": grid_to_json(d.grid), "kinds": [node_seminorm_to_json(f) for f in d.kinds]}


def dsf_from_json(doc) -> DSF:
    return DSF(grid_from_json(doc["grid"]), tuple(node_seminorm_from_json(f) for f in doc["kinds"]))


def net_to_json(n: NetChain) -> dict:
    return {"grid": grid_to_json(n.grid),
            "families": [[grid_interval_to_json(E) for E in P] for P in n.families],
            "automorphism_samples": [order_map_to_json(t) for t in n.automorphism_samples]}


def net_from_json(doc) -> NetChain:
    return NetChain(grid_from_json(doc["grid"]),
                    tuple(tuple(grid_interval_from_json(E) for E in P) for P in doc["families"]),
                    tuple(order_map_from_json(t) for t in doc.get("automorphism_samples", [])))


ENCODERS = [
    (LinkedCover, cover_to_json), (RChain, chain_to_json), (Family, family_to_json),
    (Interval, interval_to_json), (OrderMap, order_map_to_json), (NestGrid, grid_to_json),
    (BlockOperator, operator_to_json), (GridInterval, grid_interval_to_json),
    (DSF, dsf_to_json), (NodeSeminorm, node_seminorm_to_json), (NetChain, net_to_json),
]

DECODERS = {
    "family": family_from_json, "cover": cover_from_json, "order_map": order_map_from_json,
    "grid": grid_from_json, "operator": operator_from_json, "dsf": dsf_from_json,
    "net": net_from_json, "interval": interval_from_json,
}


def to_jsonable(obj):
    for cls, enc in ENCODERS:
        if isinstance(obj, cls):
            return enc(obj)
    raise TypeError(f"no encoding for {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic text: sorted keys, two-space indent, trailing newline."""
    doc = obj if isinstance(obj, (dict, list)) else to_jsonable(obj)
    return json.dumps(doc, indent=2, sort_keys=True, default=to_jsonable) + "\n"


def loads(text: str, kind: str):
    return DECODERS[kind](json.loads(text))
