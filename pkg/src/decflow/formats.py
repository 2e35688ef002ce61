"""Text formats for graphs and update streams.

Graph files::

    p <n> <m>
    n <id> <cap> <cost>
    e <u> <v> <w>

Update files hold ``d <u> <v>`` (delete) and ``i <u> <v> <w>`` (weight
increase) records.  Blank lines and ``#`` comments are ignored.
"""

from decflow.graph import GraphError, build


class ParseError(GraphError):
    def __init__(self, path, lineno, msg):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


def _records(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int(tok, path, lineno):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(path, lineno, f"expected integer, got {tok!r}") from None


def _num(tok, path, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(path, lineno, f"expected number, got {tok!r}") from None


def parse_graph(text, path="<graph>"):
    header = None
    caps, costs, edges = {}, {}, []
    vertices = set()
    for lineno, tok in _records(text):
        kind = tok[0]
        if kind == "p":
            if header is not None or len(tok) != 3:
                raise ParseError(path, lineno, "malformed or repeated header")
            header = (_int(tok[1], path, lineno), _int(tok[2], path, lineno))
        elif kind == "n":
            if len(tok) != 4:
                raise ParseError(path, lineno, "vertex line needs: n <id> <cap> <cost>")
            v = _int(tok[1], path, lineno)
            cap, cost = _num(tok[2], path, lineno), _num(tok[3], path, lineno)
            if cap < 0 or cost < 0:
                raise ParseError(path, lineno, "negative capacity or cost")
            if v in vertices:
                raise ParseError(path, lineno, f"duplicate vertex {v}")
            vertices.add(v)
            caps[v], costs[v] = cap, cost
        elif kind == "e":
            if len(tok) != 4:
                raise ParseError(path, lineno, "edge line needs: e <u> <v> <w>")
            edges.append((_int(tok[1], path, lineno), _int(tok[2], path, lineno),
                          _num(tok[3], path, lineno), lineno))
        else:
            raise ParseError(path, lineno, f"unknown record type {kind!r}")
    if header is None:
        raise ParseError(path, 0, "missing 'p <n> <m>' header")
    seen = set()
    for u, v, w, lineno in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(path, lineno, f"duplicate edge ({u},{v})")
        if not w > 0:
            raise ParseError(path, lineno, f"nonpositive weight on edge ({u},{v})")
        if u == v:
            raise ParseError(path, lineno, f"self loop at {u}")
        seen.add(key)
    g = build([(u, v, w) for u, v, w, _ in edges], caps, costs, vertices)
    n, m = header
    if g.n != n or g.m != m:
        raise ParseError(path, 0, f"header says n={n} m={m}, found n={g.n} m={g.m}")
    return g


def parse_updates(text, path="<updates>"):
    ops = []
    for lineno, tok in _records(text):
        if tok[0] == "d" and len(tok) == 3:
            ops.append(("d", _int(tok[1], path, lineno), _int(tok[2], path, lineno)))
        elif tok[0] == "i" and len(tok) == 4:
            ops.append(("i", _int(tok[1], path, lineno), _int(tok[2], path, lineno),
                        _num(tok[3], path, lineno)))
        else:
            raise ParseError(path, lineno, f"bad update record {' '.join(tok)!r}")
    return ops


def read_graph(path):
    with open(path) as fh:
        return parse_graph(fh.read(), str(path))


def read_updates(path):
    with open(path) as fh:
        return parse_updates(fh.read(), str(path))


def fmt(x):
    """Fixed 9-decimal rendering used by every report."""
    if x == float("inf"):
        return "inf"
    return f"{x:.9f}"


def dump_graph(g):
    lines = [f"p {g.n} {g.m}"]
    for v in sorted(g.adj):
        lines.append(f"n {v} {fmt(g.vertex_cap[v])} {fmt(g.vertex_cost[v])}")
    for u, v, w in g.undirected_edges():
        lines.append(f"e {u} {v} {fmt(w)}")
    return "\n".join(lines) + "\n"


def dump_updates(ops):
    out = []
    for op in ops:
        if op[0] == "d":
            out.append(f"d {op[1]} {op[2]}")
        else:
            out.append(f"i {op[1]} {op[2]} {fmt(op[3])}")
    return "\n".join(out) + ("\n" if out else "")
