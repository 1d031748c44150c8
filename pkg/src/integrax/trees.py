"""Bicolored plane trees built from valency data.

Vertices are integers.  Trees produced from a valency sequence use the
sequence positions as vertex ids, so vertex ``i`` has valency ``gamma[i]``.
The plane structure is the rooted child order: children are listed in the
order their edges were created, a glued leaf always going last.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError, NoSuchTreeError

WHITE, BLACK = "w", "b"


@dataclass(frozen=True)
class PlaneTree:
    root: int
    children: tuple[tuple[int, ...], ...]
    colors: tuple[str, ...]

    def __post_init__(self):
        nv = len(self.children)
        if len(self.colors) != nv:
            raise InputError("colors and children disagree on the vertex count")
        if not 0 <= self.root < nv:
            raise InputError("root is not a vertex")
        seen = {self.root}
        stack = [self.root]
        while stack:
            v = stack.pop()
            for w in self.children[v]:
                if w in seen:
                    raise InputError("child lists do not describe a tree")
                if self.colors[w] == self.colors[v]:
                    raise InputError(f"edge {v}-{w} joins two vertices of the same color")
                seen.add(w)
                stack.append(w)
        if len(seen) != nv:
            raise InputError("tree is not connected")
        if any(c not in (WHITE, BLACK) for c in self.colors):
            raise InputError("colors must be 'w' or 'b'")

    @property
    def n_vertices(self) -> int:
        return len(self.children)

    @property
    def n_edges(self) -> int:
        return len(self.children) - 1

    def parent(self) -> list[int | None]:
        par: list[int | None] = [None] * self.n_vertices
        for v, ch in enumerate(self.children):
            for w in ch:
                par[w] = v
        return par

    def valency(self, v: int) -> int:
        return len(self.children[v]) + (v != self.root)

    def valencies(self) -> list[int]:
        return [self.valency(v) for v in range(self.n_vertices)]

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v, ch in enumerate(self.children) for w in ch]

    def vertices_of(self, color: str) -> list[int]:
        return [v for v, c in enumerate(self.colors) if c == color]

    def preorder(self) -> list[int]:
        out, stack = [], [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children[v]))
        return out


def _rooted(nv: int, edges: list[tuple[int, int]], root: int, colors: Sequence[str] | None) -> PlaneTree:
    """Root an edge list (in creation order) at ``root``.

    Each vertex lists its children in edge-creation order.  Without colors
    the root is white and colors alternate.
    """
    adj: list[list[int]] = [[] for _ in range(nv)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    children: list[list[int]] = [[] for _ in range(nv)]
    col = list(colors) if colors is not None else [WHITE] * nv
    seen = {root}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                children[v].append(w)
                if colors is None:
                    col[w] = BLACK if col[v] == WHITE else WHITE
                queue.append(w)
    return PlaneTree(root, tuple(tuple(c) for c in children), tuple(col))


def _check_tree_sequence(gamma: Sequence[int]) -> int:
    gamma = list(gamma)
    if any(int(g) != g or g < 1 for g in gamma):
        raise InputError(f"valencies must be positive integers, got {gamma}")
    total = sum(gamma)
    if total % 2 or total < 2:
        raise InputError(f"valencies must sum to 2n with n >= 1, got sum {total}")
    n = total // 2
    if len(gamma) != n + 1:
        raise InputError(f"a tree with {n} edges has {n + 1} vertices, got {len(gamma)} valencies")
    return n


def tree_from_partition(gamma: Sequence[int]) -> PlaneTree:
    """Plane tree whose vertex ``i`` has valency ``gamma[i]``, rooted (and white) at vertex 0.

    Repeatedly detaches the lowest-index leaf from the lowest-index vertex of
    valency > 1, then glues the leaves back in reverse order.
    """
    _check_tree_sequence(gamma)
    val = [int(g) for g in gamma]
    active = list(range(len(val)))
    glued = []
    while len(active) > 2:
        i = next(v for v in active if val[v] == 1)
        j = next(v for v in active if val[v] > 1)
        glued.append((j, i))
        val[j] -= 1
        active.remove(i)
    edges = [(active[0], active[1])] + glued[::-1]
    return _rooted(len(gamma), edges, 0, None)


def _glue_bicolored(val: list[int], colors: list[str]) -> PlaneTree:
    """Two-color induction over vertices with prescribed valency and color."""
    val = list(val)
    active = list(range(len(val)))
    glued = []
    while len(active) > 2:
        i = next(v for v in active if val[v] == 1)
        j = next((v for v in active if colors[v] != colors[i] and val[v] > 1), None)
        if j is None:
            raise NoSuchTreeError("valency data admits no bicolored tree")
        glued.append((j, i))
        val[j] -= 1
        active.remove(i)
    a, b = active
    if colors[a] == colors[b] or val[a] != 1 or val[b] != 1:
        raise NoSuchTreeError("valency data admits no bicolored tree")
    edges = [(a, b)] + glued[::-1]
    return _rooted(len(val), edges, 0, colors)


def bicolored_from_partitions(alpha: Sequence[int], beta: Sequence[int]) -> PlaneTree:
    """Bicolored tree with white valencies ``alpha`` (vertices ``0..p-1``) and black ``beta``."""
    alpha, beta = [int(a) for a in alpha], [int(b) for b in beta]
    if not alpha or not beta or min(alpha + beta) < 1:
        raise InputError("both color classes need positive valencies")
    n = sum(alpha)
    if sum(beta) != n:
        raise InputError(f"white and black valencies must both sum to n; got {n} and {sum(beta)}")
    if len(alpha) + len(beta) != n + 1:
        raise InputError(f"p + q must equal n + 1 = {n + 1}, got {len(alpha) + len(beta)}")
    return _glue_bicolored(alpha + beta, [WHITE] * len(alpha) + [BLACK] * len(beta))


def _subset_with_sum(values: Sequence[int], target: int) -> list[int] | None:
    """Indices of a subset of ``values`` summing to ``target``, earliest indices preferred."""
    k = len(values)
    reach = [set() for _ in range(k + 1)]
    reach[k] = {0}
    for i in range(k - 1, -1, -1):
        reach[i] = reach[i + 1] | {s + values[i] for s in reach[i + 1] if s + values[i] <= target}
    if target not in reach[0]:
        return None
    picked, rem = [], target
    for i in range(k):
        if rem - values[i] in reach[i + 1] and rem >= values[i]:
            picked.append(i)
            rem -= values[i]
    return picked


def bicolored_with_white_prefix(gamma: Sequence[int], l: int) -> PlaneTree:
    """Bicolored tree with vertex valencies ``gamma`` whose first ``l`` vertices are white.

    The white class is the prefix plus a subset of the remaining vertices
    whose valencies complete the white total to n; the tree is then glued by
    the two-color induction.  Raises :class:`NoSuchTreeError` when no such
    subset exists (the prefix bound alone does not guarantee one).
    """
    n = _check_tree_sequence(gamma)
    gamma = [int(g) for g in gamma]
    if not 1 <= l <= n:
        raise InputError(f"prefix length must satisfy 1 <= l <= n = {n}, got {l}")
    head = sum(gamma[:l])
    if head > n:
        raise InputError(f"prefix valencies sum to {head} > n = {n}")
    if l == 1:
        return tree_from_partition(gamma)
    tail = gamma[l:]
    pick = _subset_with_sum(tail, n - head)
    if pick is None:
        raise NoSuchTreeError(
            f"no bicolored tree has white class containing {gamma[:l]}: "
            f"no remaining valencies sum to {n - head}"
        )
    colors = [WHITE] * l + [BLACK] * len(tail)
    for i in pick:
        colors[l + i] = WHITE
    return _glue_bicolored(gamma, colors)


def valency_sequences(t: PlaneTree) -> tuple[list[int], list[int]]:
    """White and black valencies, each in vertex-id order."""
    vals = t.valencies()
    return ([vals[v] for v in t.vertices_of(WHITE)], [vals[v] for v in t.vertices_of(BLACK)])


def encode(t: PlaneTree) -> str:
    """Nested-parenthesis form: color letter, then children in order, e.g. ``w(b,b(w))``."""
    out = []

    def emit(v):
        out.append(t.colors[v])
        ch = t.children[v]
        if ch:
            out.append("(")
            for i, w in enumerate(ch):
                if i:
                    out.append(",")
                emit(w)
            out.append(")")

    emit(t.root)
    return "".join(out)


def decode(s: str) -> PlaneTree:
    """Inverse of :func:`encode`; vertices are numbered in preorder from 0."""
    text = "".join(s.split())
    pos = 0
    children: list[list[int]] = []
    colors: list[str] = []

    def node() -> int:
        nonlocal pos
        if pos >= len(text) or text[pos] not in (WHITE, BLACK):
            raise InputError(f"malformed tree string at offset {pos}: {s!r}")
        v = len(colors)
        colors.append(text[pos])
        children.append([])
        pos += 1
        if pos < len(text) and text[pos] == "(":
            pos += 1
            while True:
                children[v].append(node())
                if pos < len(text) and text[pos] == ",":
                    pos += 1
                    continue
                if pos < len(text) and text[pos] == ")":
                    pos += 1
                    break
                raise InputError(f"malformed tree string at offset {pos}: {s!r}")
        return v

    root = node()
    if pos != len(text):
        raise InputError(f"trailing characters in tree string: {s!r}")
    return PlaneTree(root, tuple(tuple(c) for c in children), tuple(colors))


def to_adjacency(t: PlaneTree) -> dict:
    """JSON-ready description of the tree."""
    return {
        "encoding": encode(t),
        "root": t.root,
        "edges": t.n_edges,
        "vertices": [
            {"id": v, "color": t.colors[v], "valency": t.valency(v), "children": list(t.children[v])}
            for v in range(t.n_vertices)
        ],
    }
