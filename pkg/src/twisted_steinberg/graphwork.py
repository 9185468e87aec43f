"""Boundary-path groupoids of finite directed graphs, handled symbolically.

Elements of the algebra are finite combinations of indicators of cylinder
bisections ``Z(mu, nu) = {(mu z, |mu| - |nu|, nu z)}``.  Boundary paths are never
materialized; equality of functions is decided by refining every cylinder to a
common path length, after which distinct cylinders are disjoint.

Paths run left to right: ``mu = e1 e2 ...`` with ``rng(e1) = src(e2)``, and they
are extended at their range.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .coeffring import CoeffRing
from .errors import DepthExceeded, NotHomogeneous, SinkVertex, ZeroInput

MAX_DEPTH = 16


@dataclass(frozen=True)
class Graph:
    """Vertices plus named edges ``name -> (src, rng)``, kept in insertion order."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        verts = set(self.vertices)
        if len(verts) != len(self.vertices):
            raise ValueError("duplicate vertex")
        names = [e for e, _, _ in self.edges]
        if len(set(names)) != len(names):
            raise ValueError("duplicate edge name")
        clash = verts & set(names)
        if clash:
            raise ValueError(f"names used for both a vertex and an edge: {sorted(clash)}")
        for e, s, r in self.edges:
            if s not in verts or r not in verts:
                raise ValueError(f"edge {e} has an unknown endpoint")

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Mapping[str, tuple[str, str]]) -> Graph:
        return cls(tuple(vertices), tuple((e, s, r) for e, (s, r) in edges.items()))

    @cached_property
    def src(self) -> dict[str, str]:
        return {e: s for e, s, _ in self.edges}

    @cached_property
    def rng(self) -> dict[str, str]:
        return {e: r for e, _, r in self.edges}

    @cached_property
    def out_edges(self) -> dict[str, tuple[str, ...]]:
        return {v: tuple(e for e, s, _ in self.edges if s == v) for v in self.vertices}

    def is_sink(self, v: str) -> bool:
        return not self.out_edges[v]

    @cached_property
    def _tokens(self) -> list[str]:
        return sorted(self.src, key=len, reverse=True)

    def path(self, text: str) -> Path:
        """Parse a vertex name, ``e1.e2.e3`` or concatenated edge names such as ``ccf``."""
        text = text.strip()
        if text in self.vertices:
            return Path(self, text, ())
        if "." in text:
            parts = text.split(".")
        else:
            parts, rest = [], text
            while rest:
                tok = next((t for t in self._tokens if rest.startswith(t)), None)
                if tok is None:
                    raise ValueError(f"cannot parse path {text!r}")
                parts.append(tok)
                rest = rest[len(tok):]
        if any(p not in self.src for p in parts):
            raise ValueError(f"cannot parse path {text!r}")
        return Path(self, self.src[parts[0]], tuple(parts))

    def paths(self, max_len: int) -> list[Path]:
        """Every path of length at most ``max_len``, shortest first."""
        layer = [Path(self, v, ()) for v in self.vertices]
        out = list(layer)
        for _ in range(max_len):
            layer = [p.extend(e) for p in layer for e in self.out_edges[p.range]]
            out += layer
        return out


@dataclass(frozen=True)
class Path:
    graph: Graph = field(repr=False, compare=False)
    vertex: str
    edges: tuple[str, ...]

    def __post_init__(self):
        g = self.graph
        v = self.vertex
        for e in self.edges:
            if g.src[e] != v:
                raise ValueError(f"edge {e} does not start at {v}")
            v = g.rng[e]

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def source(self) -> str:
        return self.vertex

    @property
    def range(self) -> str:
        return self.graph.rng[self.edges[-1]] if self.edges else self.vertex

    def extend(self, e: str) -> Path:
        return Path(self.graph, self.vertex, self.edges + (e,))

    def concat(self, other: Path) -> Path:
        if other.source != self.range:
            raise ValueError("paths do not compose")
        return Path(self.graph, self.vertex, self.edges + other.edges)

    def strip_prefix(self, prefix: Path) -> Path | None:
        """``rest`` with ``self = prefix rest``, or ``None``."""
        if prefix.vertex != self.vertex or self.edges[: len(prefix)] != prefix.edges:
            return None
        return Path(self.graph, prefix.range, self.edges[len(prefix):])

    def __str__(self) -> str:
        if not self.edges:
            return self.vertex
        sep = "." if any(len(e) > 1 for e in self.edges) else ""
        return sep.join(self.edges)


@dataclass(frozen=True)
class Cylinder:
    mu: Path
    nu: Path

    def __post_init__(self):
        if self.mu.range != self.nu.range:
            raise ValueError(f"r({self.mu}) != r({self.nu})")

    @property
    def degree(self) -> int:
        return len(self.mu) - len(self.nu)

    @property
    def inverse(self) -> Cylinder:
        return Cylinder(self.nu, self.mu)

    @property
    def is_unit(self) -> bool:
        return self.mu == self.nu

    def key(self) -> tuple:
        return (len(self.mu), self.mu.vertex, self.mu.edges, len(self.nu), self.nu.vertex, self.nu.edges)

    def __str__(self) -> str:
        return f"Z({self.mu},{self.nu})"


def cylinder(graph: Graph, mu: str, nu: str | None = None) -> Cylinder:
    m = graph.path(mu)
    return Cylinder(m, graph.path(nu) if nu is not None else m)


def refine_cylinder(c: Cylinder) -> list[Cylinder]:
    """``Z(mu, nu)`` as the disjoint union of ``Z(mu e, nu e)`` over edges out of ``r(mu)``."""
    v = c.mu.range
    out = c.mu.graph.out_edges[v]
    if not out:
        raise SinkVertex(f"{v} is a sink; {c} cannot be refined")
    return [Cylinder(c.mu.extend(e), c.nu.extend(e)) for e in out]


def cylinder_product(a: Cylinder, b: Cylinder) -> Cylinder | None:
    """Product of the bisections ``a`` and ``b``, or ``None`` when it is empty."""
    rest = b.mu.strip_prefix(a.nu)
    if rest is not None:
        return Cylinder(a.mu.concat(rest), b.nu)
    rest = a.nu.strip_prefix(b.mu)
    if rest is not None:
        return Cylinder(a.mu, b.nu.concat(rest))
    return None


@dataclass(frozen=True, eq=False)
class BPAlgElem:
    """``sum coeff * 1_Z`` over cylinders, with the bilinear twist ``t^{k l}``."""

    graph: Graph = field(repr=False)
    ring: CoeffRing
    terms: tuple[tuple[int, Cylinder], ...]
    twist: int = 1

    def __post_init__(self):
        n = self.ring.modulus
        if not self.ring.is_unit_value(self.twist):
            raise ValueError(f"twist parameter {self.twist} is not a unit of {self.ring!r}")
        object.__setattr__(self, "twist", self.twist % n)
        object.__setattr__(self, "terms", tuple((int(r) % n, c) for r, c in self.terms if int(r) % n))

    def _check(self, other: BPAlgElem) -> None:
        if other.graph != self.graph or other.ring != self.ring or other.twist != self.twist:
            raise ValueError("elements live in different algebras")

    def __add__(self, other: BPAlgElem) -> BPAlgElem:
        self._check(other)
        return BPAlgElem(self.graph, self.ring, self.terms + other.terms, self.twist)

    def scale(self, r: int) -> BPAlgElem:
        return BPAlgElem(self.graph, self.ring, tuple((r * v, c) for v, c in self.terms), self.twist)

    def __neg__(self) -> BPAlgElem:
        return self.scale(-1)

    def __sub__(self, other: BPAlgElem) -> BPAlgElem:
        return self + (-other)

    def __mul__(self, other: BPAlgElem) -> BPAlgElem:
        return conv_bp(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, BPAlgElem) and equals_bp(self, other)

    __hash__ = None

    def canonical(self) -> dict[Cylinder, int]:
        return canonical_terms(self)

    def degrees(self) -> set[int]:
        return {c.degree for _, c in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*{c}" for v, c in self.terms)

    def __repr__(self) -> str:
        return f"BPAlgElem({self})"


def bp_element(graph: Graph, ring: CoeffRing, terms: Iterable[tuple[int, Cylinder | tuple[str, str]]], twist: int = 1) -> BPAlgElem:
    """Build an element from ``(coeff, cylinder)`` pairs; cylinders may be given as path strings."""
    out = []
    for r, c in terms:
        if not isinstance(c, Cylinder):
            c = cylinder(graph, *c)
        out.append((int(r), c))
    return BPAlgElem(graph, ring, tuple(out), twist)


def _refine_to(c: Cylinder, depth: int) -> list[Cylinder]:
    if len(c.mu) >= depth or c.mu.graph.is_sink(c.mu.range):
        return [c]
    return [d for e in refine_cylinder(c) for d in _refine_to(e, depth)]


def canonical_terms(a: BPAlgElem, depth: int | None = None) -> dict[Cylinder, int]:
    """Coefficients on the common refinement where every ``mu`` has length ``depth``
    (or ends at a sink); on that family distinct cylinders are disjoint."""
    if depth is None:
        depth = max((len(c.mu) for _, c in a.terms), default=0)
    if depth > MAX_DEPTH:
        raise DepthExceeded(f"common refinement needs depth {depth} > {MAX_DEPTH}")
    n = a.ring.modulus
    out: dict[Cylinder, int] = {}
    for r, c in a.terms:
        for d in _refine_to(c, depth):
            out[d] = (out.get(d, 0) + r) % n
    return {c: v for c, v in sorted(out.items(), key=lambda kv: kv[0].key()) if v}


def equals_bp(a: BPAlgElem, b: BPAlgElem) -> bool:
    a._check(b)
    depth = max((len(c.mu) for _, c in a.terms + b.terms), default=0)
    return canonical_terms(a - b, depth) == {}


def conv_bp(a: BPAlgElem, b: BPAlgElem) -> BPAlgElem:
    a._check(b)
    ring, t = a.ring, a.twist
    out = []
    for r, x in a.terms:
        for s, y in b.terms:
            z = cylinder_product(x, y)
            if z is not None:
                out.append((r * s * ring.power(t, x.degree * y.degree) % ring.modulus, z))
    return BPAlgElem(a.graph, ring, tuple(out), t)


def _unique_successor(graph: Graph, v: str) -> str | None:
    out = graph.out_edges[v]
    return out[0] if len(out) == 1 else None


def exitless_cycle_at(graph: Graph, v: str) -> tuple[str, ...] | None:
    """The first-return loop at ``v`` if following unique out-edges from ``v`` returns to ``v``."""
    edges = []
    w = v
    for _ in range(len(graph.vertices)):
        e = _unique_successor(graph, w)
        if e is None:
            return None
        edges.append(e)
        w = graph.rng[e]
        if w == v:
            return tuple(edges)
    return None


def condition_L(graph: Graph) -> bool:
    """Every cycle has an exit: no vertex lies on a cycle of out-degree-one vertices."""
    return all(exitless_cycle_at(graph, v) is None for v in graph.vertices)


def iso_interior_member(c: Cylinder) -> bool:
    """Whether ``Z(mu, nu)`` lies in the interior of the isotropy."""
    if c.is_unit:
        return True
    long, short = (c.mu, c.nu) if len(c.mu) >= len(c.nu) else (c.nu, c.mu)
    eta = long.strip_prefix(short)
    if eta is None or not eta.edges:
        return False
    loop = exitless_cycle_at(c.mu.graph, c.mu.range)
    if loop is None or len(eta) % len(loop):
        return False
    return eta.edges == loop * (len(eta) // len(loop))


@dataclass(frozen=True)
class DenseWitness:
    """A boundary path in ``Z(mu)`` with isotropy inside ``Iso°``.

    ``kind`` is ``sink`` (the finite path ``prefix``), ``exitless-cycle``
    (``prefix loop^inf``) or ``aperiodic`` (``prefix a b a a b a a a b ...`` for two
    distinct first-return loops ``a``, ``b``).
    """

    kind: str
    prefix: Path
    loops: tuple[tuple[str, ...], ...] = ()

    def __str__(self) -> str:
        def word(edges):
            return ".".join(edges) if any(len(e) > 1 for e in edges) else "".join(edges)

        if self.kind == "sink":
            return f"{self.prefix} (ends at sink)"
        if self.kind == "exitless-cycle":
            return f"{self.prefix}({word(self.loops[0])})^inf"
        a, b = (word(x) for x in self.loops)
        return f"{self.prefix}({a})({b})({a})^2({b})({a})^3..."


@dataclass
class DenseReport:
    depth: int
    witnesses: list[tuple[Path, DenseWitness]]
    counterexamples: list[Path]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _first_return_loops(graph: Graph, w: str, limit: int = 2) -> list[tuple[str, ...]]:
    """Up to ``limit`` simple first-return loops at ``w`` (no vertex repeated)."""
    found = []
    stack = [(w, (), frozenset())]
    while stack and len(found) < limit:
        v, edges, seen = stack.pop(0)
        for e in graph.out_edges[v]:
            r = graph.rng[e]
            if r == w:
                found.append(edges + (e,))
            elif r not in seen:
                stack.append((r, edges + (e,), seen | {r}))
    return found[:limit]


def find_dense_witness(start: Path) -> DenseWitness | None:
    """Search the vertices reachable from ``r(start)`` (breadth first) for a good point."""
    g = start.graph
    routes = {start.range: start}
    queue = deque([start.range])
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for e in g.out_edges[v]:
            r = g.rng[e]
            if r not in routes:
                routes[r] = routes[v].extend(e)
                queue.append(r)
    for v in order:
        if g.is_sink(v):
            return DenseWitness("sink", routes[v])
    for v in order:
        loop = exitless_cycle_at(g, v)
        if loop is not None:
            return DenseWitness("exitless-cycle", routes[v], (loop,))
    for v in order:
        loops = _first_return_loops(g, v)
        if len(loops) == 2:
            return DenseWitness("aperiodic", routes[v], tuple(loops))
    return None


def x_dense_check(graph: Graph, depth: int) -> DenseReport:
    """For each path ``mu`` with ``|mu| <= depth``, a point of ``Z(mu)`` whose isotropy is interior."""
    witnesses, bad = [], []
    for mu in graph.paths(depth):
        w = find_dense_witness(mu)
        if w is None:
            bad.append(mu)
            continue
        if w.kind == "exitless-cycle":
            base = w.prefix
            around = base
            for e in w.loops[0]:
                around = around.extend(e)
            if not iso_interior_member(Cylinder(around, base)):
                bad.append(mu)
                continue
        witnesses.append((mu, w))
    return DenseReport(depth, witnesses, bad)


def graded_witness_bp(a: BPAlgElem) -> BPAlgElem:
    """``~1_{B^-1} * a`` for the first cylinder ``B`` of the canonical refinement of ``a``."""
    if len(a.degrees()) > 1:
        raise NotHomogeneous(f"mixed degrees {sorted(a.degrees())}")
    canon = canonical_terms(a)
    if not canon:
        raise ZeroInput("graded_witness_bp needs a nonzero element")
    B = next(iter(canon))
    f = conv_bp(BPAlgElem(a.graph, a.ring, ((1, B.inverse),), a.twist), a)
    result = canonical_terms(f)
    if not result or any(c.degree for c in result) or not any(c.is_unit for c in result):
        raise AssertionError("graded lemma postcondition failed on the graph backend")
    return f


def loop_graph() -> Graph:
    return Graph.build(["v"], {"c": ("v", "v")})


def loop_exit_graph() -> Graph:
    return Graph.build(["v", "w"], {"c": ("v", "v"), "f": ("v", "w")})


def acyclic_graph() -> Graph:
    return Graph.build(["u", "v", "w"], {"e": ("u", "v"), "f": ("v", "w"), "g": ("u", "w")})


def cylinders(graph: Graph, depth: int) -> list[Cylinder]:
    """All cylinders with ``|mu|, |nu| <= depth``."""
    by_range: dict[str, list[Path]] = {}
    for p in graph.paths(depth):
        by_range.setdefault(p.range, []).append(p)
    return [Cylinder(m, n) for ps in by_range.values() for m in ps for n in ps]


def laurent_image(a: BPAlgElem) -> dict[int, int]:
    """On the single-loop graph, ``Z(c^m, c^n) -> x^{m-n}``; returns exponent -> coefficient."""
    n = a.ring.modulus
    out: dict[int, int] = {}
    for r, c in a.terms:
        out[c.degree] = (out.get(c.degree, 0) + r) % n
    return {k: v for k, v in sorted(out.items()) if v}
