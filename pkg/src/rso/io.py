"""JSON and edge-list serialization with canonical (sorted) edge order."""
from __future__ import annotations

import json

from .graph import ColoredMultiGraph, DirectedColoredMultiGraph, Graph, GraphError


class ParseError(GraphError):
    pass


def _kind(G) -> tuple[bool, bool]:
    if isinstance(G, Graph):
        return False, False
    if isinstance(G, ColoredMultiGraph):
        return True, False
    if isinstance(G, DirectedColoredMultiGraph):
        return True, True
    raise TypeError(f"cannot serialize {type(G).__name__}")


def _rows(G) -> list[list[int]]:
    if isinstance(G, Graph):
        return [[u, v] for u, v in G.edges]
    items = G.arcs if isinstance(G, DirectedColoredMultiGraph) else G.edges
    return sorted([list(e) for e in items])


def to_dict(G) -> dict:
    colored, directed = _kind(G)
    return {"n": G.n, "colored": colored, "directed": directed, "edges": _rows(G)}


def to_json(G) -> str:
    return json.dumps(to_dict(G), separators=(",", ":"), sort_keys=True) + "\n"


def _build(n: int, colored: bool, directed: bool, rows: list, where) -> Graph | ColoredMultiGraph | DirectedColoredMultiGraph:
    width = 3 if colored else 2
    clean = []
    for i, row in enumerate(rows):
        if not isinstance(row, (list, tuple)) or len(row) != width:
            raise ParseError(f"{where(i)}: expected {width} integers, got {row!r}")
        try:
            vals = [int(x) for x in row]
        except (TypeError, ValueError):
            raise ParseError(f"{where(i)}: non-integer field in {row!r}") from None
        for x in vals[:2]:
            if not 1 <= x <= n:
                raise ParseError(f"{where(i)}: endpoint {x} of edge {vals[0]}-{vals[1]} out of range 1..{n}")
        clean.append(tuple(vals))
    try:
        if directed:
            return DirectedColoredMultiGraph(n, tuple(clean))
        if colored:
            return ColoredMultiGraph(n, tuple(clean))
        return Graph(n, tuple(clean))
    except GraphError as exc:
        raise ParseError(str(exc)) from None


def from_dict(doc: dict):
    try:
        n = int(doc["n"])
        colored = bool(doc.get("colored", False))
        directed = bool(doc.get("directed", False))
        rows = doc["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"header: missing or invalid field ({exc})") from None
    if directed and not colored:
        raise ParseError("header: directed graphs must be colored")
    return _build(n, colored, directed, rows, lambda i: f"edge #{i + 1}")


def from_json(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    return from_dict(doc)


def to_edgelist(G) -> str:
    """Header line '# n=<n> colored=<0|1> directed=<0|1>' then one 'u v [color]' per line."""
    colored, directed = _kind(G)
    lines = [f"# n={G.n} colored={int(colored)} directed={int(directed)}"]
    lines += [" ".join(str(x) for x in row) for row in _rows(G)]
    return "\n".join(lines) + "\n"


def from_edgelist(text: str):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError("line 1: missing '# n=... colored=... directed=...' header")
    header = {}
    for tok in lines[0][1:].split():
        key, _, val = tok.partition("=")
        header[key] = val
    try:
        n = int(header["n"])
        colored = header.get("colored", "0") == "1"
        directed = header.get("directed", "0") == "1"
    except (KeyError, ValueError):
        raise ParseError("line 1: header must define integer n") from None
    rows, lineno = [], []
    for k, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        rows.append(s.split())
        lineno.append(k)
    return _build(n, colored, directed, rows, lambda i: f"line {lineno[i]}")


def dumps(G, fmt: str = "json") -> str:
    return to_json(G) if fmt == "json" else to_edgelist(G)


def loads(text: str):
    """Parse either format, detected by the first non-blank character."""
    return from_json(text) if text.lstrip().startswith("{") else from_edgelist(text)
