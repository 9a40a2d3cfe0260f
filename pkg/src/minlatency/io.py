"""Plain-text instance files.

::

    MLP 1
    TYPE matrix|tree|line
    N <n>
    START <vertex>          # line instances: START <coordinate>
    <body>                  # n matrix rows | n-1 "EDGE u v w" lines | one line of n coordinates
    PENALTY <v> <p>         # optional, any number

``#`` starts a comment. Penalty vertex ids refer to matrix/tree vertices, or
to point indices for line instances.
"""
from __future__ import annotations

import io as _io
import os

import numpy as np

from .core import InstanceError, LineInstance, MetricInstance, TreeInstance, tolerance


class InstanceFormatError(InstanceError):
    pass


def _lines(text: str):
    for k, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield k, body.split()


def _num(tok, k, what="number"):
    try:
        x = float(tok)
    except ValueError:
        raise InstanceFormatError(f"line {k}: expected a {what}, got {tok!r}") from None
    if not np.isfinite(x):
        raise InstanceFormatError(f"line {k}: {what} must be finite, got {tok!r}")
    return x


def _int(tok, k, what="integer"):
    try:
        return int(tok)
    except ValueError:
        raise InstanceFormatError(f"line {k}: expected an {what}, got {tok!r}") from None


def _header(it, key, k_prev):
    try:
        k, toks = next(it)
    except StopIteration:
        raise InstanceFormatError(f"line {k_prev + 1}: missing {key} line") from None
    if toks[0] != key or len(toks) != 2:
        raise InstanceFormatError(f"line {k}: expected '{key} <value>', got {' '.join(toks)!r}")
    return k, toks[1]


def parse_instance_text(text: str):
    """Parse file contents; returns ``(instance, penalties)`` with penalties a dict (possibly empty)."""
    it = _lines(text)
    k, magic = _header(it, "MLP", 0)
    if magic != "1":
        raise InstanceFormatError(f"line {k}: unsupported format version {magic!r}")
    k, kind = _header(it, "TYPE", k)
    if kind not in ("matrix", "tree", "line"):
        raise InstanceFormatError(f"line {k}: unknown TYPE {kind!r}")
    k, ntok = _header(it, "N", k)
    n = _int(ntok, k)
    if n < 1:
        raise InstanceFormatError(f"line {k}: N must be >= 1")
    k, stok = _header(it, "START", k)
    start = _num(stok, k, "coordinate") if kind == "line" else _int(stok, k, "index")

    body = []
    penalties = {}
    for k, toks in it:
        if toks[0] == "PENALTY":
            if len(toks) != 3:
                raise InstanceFormatError(f"line {k}: expected 'PENALTY <v> <p>'")
            v, p = _int(toks[1], k, "vertex"), _num(toks[2], k, "penalty")
            if p < 0:
                raise InstanceFormatError(f"line {k}: negative penalty {p}")
            if not 0 <= v < n:
                raise InstanceFormatError(f"line {k}: penalty vertex {v} out of range")
            penalties[v] = p
        elif penalties:
            raise InstanceFormatError(f"line {k}: data after PENALTY lines")
        else:
            body.append((k, toks))

    try:
        if kind == "matrix":
            inst = _matrix(body, n, start, k)
        elif kind == "tree":
            inst = _tree(body, n, start, k)
        else:
            inst = _line(body, n, start, k)
    except InstanceFormatError:
        raise
    except InstanceError as exc:
        where = body[0][0] if body else k
        raise InstanceFormatError(f"line {where}: {exc}") from None
    return inst, penalties


def _matrix(body, n, start, k_last):
    if len(body) != n:
        where = body[n][0] if len(body) > n else k_last
        raise InstanceFormatError(f"line {where}: expected {n} matrix rows, got {len(body)}")
    rows = []
    for k, toks in body:
        if len(toks) != n:
            raise InstanceFormatError(f"line {k}: expected {n} entries, got {len(toks)}")
        row = [_num(t, k, "distance") for t in toks]
        if any(x < 0 for x in row):
            raise InstanceFormatError(f"line {k}: negative distance")
        rows.append(row)
    d = np.array(rows)
    tol = tolerance(d)
    for i in range(n):
        if d[i, i] != 0:
            raise InstanceFormatError(f"line {body[i][0]}: nonzero diagonal entry at ({i},{i})")
        for j in range(i + 1, n):
            if abs(d[i, j] - d[j, i]) > tol:
                raise InstanceFormatError(
                    f"line {body[i][0]}: matrix not symmetric at ({i},{j}): {d[i, j]} != {d[j, i]}")
    if not 0 <= start < n:
        raise InstanceFormatError(f"START {start} out of range for N={n}")
    return MetricInstance.from_matrix(d, start, check_metric=True)


def _tree(body, n, start, k_last):
    edges = []
    for k, toks in body:
        if toks[0] != "EDGE" or len(toks) != 4:
            raise InstanceFormatError(f"line {k}: expected 'EDGE u v w'")
        u, v = _int(toks[1], k, "vertex"), _int(toks[2], k, "vertex")
        w = _num(toks[3], k, "weight")
        if w <= 0:
            raise InstanceFormatError(f"line {k}: edge weight must be positive, got {w}")
        edges.append((u, v, w))
    if len(edges) != n - 1:
        raise InstanceFormatError(f"line {k_last}: tree on {n} vertices needs {n - 1} edges, got {len(edges)}")
    return TreeInstance(n, tuple(edges), start)


def _line(body, n, start, k_last):
    if len(body) != 1:
        where = body[1][0] if len(body) > 1 else k_last
        raise InstanceFormatError(f"line {where}: expected one line of {n} coordinates")
    k, toks = body[0]
    if len(toks) != n:
        raise InstanceFormatError(f"line {k}: expected {n} coordinates, got {len(toks)}")
    return LineInstance(tuple(_num(t, k, "coordinate") for t in toks), start)


def parse_instance(path):
    with open(path, encoding="utf-8") as fh:
        return parse_instance_text(fh.read())


def format_instance(inst, penalties=None) -> str:
    out = _io.StringIO()
    w = out.write
    w("MLP 1\n")
    if isinstance(inst, MetricInstance):
        w(f"TYPE matrix\nN {inst.n}\nSTART {inst.start}\n")
        for row in inst.d:
            w(" ".join(repr(float(x)) for x in row) + "\n")
    elif isinstance(inst, TreeInstance):
        w(f"TYPE tree\nN {inst.n}\nSTART {inst.start}\n")
        for u, v, wt in inst.edges:
            w(f"EDGE {u} {v} {wt!r}\n")
    elif isinstance(inst, LineInstance):
        w(f"TYPE line\nN {inst.n}\nSTART {inst.start!r}\n")
        w(" ".join(repr(x) for x in inst.coords) + "\n")
    else:
        raise TypeError(f"cannot serialize {type(inst).__name__}")
    if penalties is not None:
        items = penalties.items() if isinstance(penalties, dict) else enumerate(penalties)
        for v, p in items:
            w(f"PENALTY {v} {float(p)!r}\n")
    return out.getvalue()


def write_instance(path, inst, penalties=None):
    text = format_instance(inst, penalties)
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        fh.write(text)
