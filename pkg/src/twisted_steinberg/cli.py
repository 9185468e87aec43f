"""Command-line workbench: ``steinberg {validate,info,conv,witness,check,oracle} DOC``.

Documents are YAML (JSON is accepted as well, being valid YAML flow syntax);
the grammar is described in ``docs/FORMAT.md``.  Exit codes: 0 success or
verdict, 1 parse error, 2 unmet precondition or failed validation, 3 oracle
discrepancy.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass, field
from typing import Any

import yaml

from . import uniqueness as U
from .algebra import AlgElem, element, format_elem, include
from .coeffring import CoeffRing
from .errors import NotHomogeneous, PreconditionFail, SteinbergError, TooLarge, ZeroInput
from .graded import AbelianGroup, Grading, validate_grading
from .graphwork import (
    BPAlgElem,
    Cylinder,
    Graph,
    canonical_terms,
    condition_L,
    conv_bp,
    cylinder,
    equals_bp,
    exitless_cycle_at,
    graded_witness_bp,
    refine_cylinder,
)
from .groupoid import (
    FiniteGroupoid,
    cyclic_group,
    group_bundle,
    group_groupoid,
    is_effective,
    isotropy,
    isotropy_interior,
    pair_groupoid,
    transformation_groupoid,
    validate_groupoid,
)
from .sampling import random_bp_element, random_element, random_generators
from .twist import Cocycle2, DiscreteTwist, cocycle_from_entries, trivial_cocycle, validate_twist

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_PRECONDITION = 2
EXIT_DISCREPANCY = 3

GROUPOID_KINDS = ("table", "group", "pair", "bundle", "action", "graph")
CHECK_MODES = ("gut", "ck", "graded", "graded-ck")


# ---------------------------------------------------------------------------
# document loading


class DocError(Exception):
    """Parse or shape errors, each with a 1-based line number when known."""

    def __init__(self, problems: list[tuple[int | None, str]]):
        self.problems = problems
        super().__init__("; ".join(_where(line) + msg for line, msg in problems))


def _where(line: int | None) -> str:
    return f"line {line}: " if line else ""


class _Map(dict):
    line: int | None = None
    lines: dict


class _Seq(list):
    line: int | None = None


class _LineLoader(yaml.SafeLoader):
    """Safe loader that records line numbers and reads yes/no/on/off as strings."""


_LineLoader.yaml_implicit_resolvers = {
    k: [(tag, rx) for tag, rx in v if tag != "tag:yaml.org,2002:bool"]
    for k, v in yaml.SafeLoader.yaml_implicit_resolvers.items()
}


def _construct_map(loader, node):
    m = _Map()
    m.line = node.start_mark.line + 1
    m.lines = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        if not isinstance(key, (str, int)):
            raise DocError([(key_node.start_mark.line + 1, "mapping keys must be scalars")])
        key = str(key)
        m[key] = loader.construct_object(value_node, deep=True)
        m.lines[key] = key_node.start_mark.line + 1
    return m


def _construct_seq(loader, node):
    s = _Seq(loader.construct_object(child, deep=True) for child in node.value)
    s.line = node.start_mark.line + 1
    return s


_LineLoader.add_constructor("tag:yaml.org,2002:map", _construct_map)
_LineLoader.add_constructor("tag:yaml.org,2002:seq", _construct_seq)


def load_document(text: str) -> _Map:
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise DocError([(mark.line + 1 if mark else None, str(exc.problem or exc))]) from None
    except yaml.YAMLError as exc:
        raise DocError([(None, str(exc))]) from None
    if not isinstance(doc, _Map):
        raise DocError([(1, "document must be a mapping")])
    return doc


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_plain(v) for v in x]
    return x


class _Problem(Exception):
    def __init__(self, line: int | None, msg: str):
        self.line, self.msg = line, msg


def _need(node: _Map, key: str, kind=None):
    if key not in node:
        raise _Problem(getattr(node, "line", None), f"missing key {key!r}")
    value = node[key]
    if kind is not None and not isinstance(value, kind):
        raise _Problem(node.lines.get(key), f"{key!r} has the wrong type")
    return value


def _line_of(node, key=None):
    if key is not None and isinstance(node, _Map):
        return node.lines.get(key, node.line)
    return getattr(node, "line", None)


def _int(value, line, what) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _Problem(line, f"{what} must be an integer, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# scenarios


@dataclass
class Scenario:
    ring: CoeffRing
    groupoid_doc: dict
    groupoid: FiniteGroupoid | None = None
    graph: Graph | None = None
    cocycle: Cocycle2 | None = None
    bilinear: int = 1
    grading: Grading | None = None
    ideal: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def is_graph(self) -> bool:
        return self.graph is not None

    @property
    def twist(self) -> DiscreteTwist:
        return self.cocycle.extension


def _group(spec, line) -> tuple[list[str], Any]:
    if not isinstance(spec, dict):
        raise _Problem(line, "group must be a mapping")
    if "cyclic" in spec:
        m = _int(spec["cyclic"], _line_of(spec, "cyclic"), "cyclic order")
        if m < 1:
            raise _Problem(_line_of(spec, "cyclic"), "cyclic order must be positive")
        return cyclic_group(m, str(spec.get("identity", "e")), str(spec.get("generator", "g")))
    labels = [str(x) for x in _need(spec, "elements", list)]
    table = _need(spec, "table", list)
    if len(table) != len(labels) or any(not isinstance(r, list) or len(r) != len(labels) for r in table):
        raise _Problem(_line_of(spec, "table"), "table must be a square list of rows")
    pos = {lab: k for k, lab in enumerate(labels)}
    prod = {(a, b): str(table[i][j]) for i, a in enumerate(labels) for j, b in enumerate(labels)}
    for v in prod.values():
        if v not in pos:
            raise _Problem(_line_of(spec, "table"), f"table entry {v!r} is not a group element")
    return labels, lambda a, b: prod[(a, b)]


def _build_groupoid(node: _Map) -> tuple[FiniteGroupoid | None, Graph | None]:
    kind = str(_need(node, "kind"))
    if kind not in GROUPOID_KINDS:
        raise _Problem(_line_of(node, "kind"), f"unknown groupoid kind {kind!r}; expected one of {GROUPOID_KINDS}")
    if kind == "table":
        elements = [str(x) for x in _need(node, "elements", list)]
        units = [str(x) for x in _need(node, "units", list)]
        inverse = {str(k): str(v) for k, v in _need(node, "inverse", dict).items()}
        comp = {}
        for row in _need(node, "compose", list):
            if not isinstance(row, list) or len(row) != 3:
                raise _Problem(_line_of(row) or _line_of(node, "compose"), "compose rows are [a, b, ab]")
            comp[(str(row[0]), str(row[1]))] = str(row[2])
        return validate_groupoid(elements, inverse, comp, units), None
    if kind == "group":
        return group_groupoid(*_group(node, node.line)), None
    if kind == "pair":
        return pair_groupoid([str(p) for p in _need(node, "points", list)]), None
    if kind == "bundle":
        points = [str(p) for p in _need(node, "points", list)]
        return group_bundle(points, *_group(_need(node, "group"), _line_of(node, "group"))), None
    if kind == "action":
        points = [str(p) for p in _need(node, "points", list)]
        labels, mul = _group(_need(node, "group"), _line_of(node, "group"))
        table = _need(node, "action", dict)
        e = next(x for x in labels if all(mul(x, y) == y for y in labels))

        def act(h, x):
            if h == e:
                return x
            try:
                return str(table[h][x])
            except (KeyError, TypeError):
                raise _Problem(_line_of(node, "action"), f"action of {h} on {x} is not given") from None

        return transformation_groupoid(points, labels, mul, act), None
    vertices = [str(v) for v in _need(node, "vertices", list)]
    edges = {}
    for name, ends in _need(node, "edges", dict).items():
        if not isinstance(ends, list) or len(ends) != 2:
            raise _Problem(_line_of(node["edges"], name), f"edge {name} must be [src, rng]")
        edges[str(name)] = (str(ends[0]), str(ends[1]))
    try:
        return None, Graph.build(vertices, edges)
    except ValueError as exc:
        raise _Problem(node.line, str(exc)) from None


_TERM = re.compile(r"^\s*(-?\d+)\s*\*\s*1_(.+?)\s*$")
_BP_TERM = re.compile(r"^\s*(-?\d+)\s*\*\s*Z\(([^,()]+),([^,()]+)\)\s*$")


def _parse_element(sc: Scenario, spec, line) -> AlgElem | BPAlgElem:
    if sc.is_graph:
        terms = []
        if isinstance(spec, str):
            for part in spec.split("+"):
                if part.strip() == "0":
                    continue
                m = _BP_TERM.match(part)
                if not m:
                    raise _Problem(line, f"cannot parse term {part.strip()!r}")
                terms.append((int(m.group(1)), m.group(2).strip(), m.group(3).strip()))
        elif isinstance(spec, list):
            for t in spec:
                if not isinstance(t, list) or len(t) != 3:
                    raise _Problem(_line_of(t) or line, "graph terms are [coeff, mu, nu]")
                terms.append((t[0], str(t[1]), str(t[2])))
        else:
            raise _Problem(line, "graph elements are term lists or strings")
        out = []
        for r, mu, nu in terms:
            try:
                out.append((_int(r, line, "coefficient"), cylinder(sc.graph, mu, nu)))
            except ValueError as exc:
                raise _Problem(line, str(exc)) from None
        return BPAlgElem(sc.graph, sc.ring, tuple(out), sc.bilinear)
    if isinstance(spec, str):
        coeffs: dict = {}
        for part in spec.split(" + "):
            if part.strip() == "0":
                continue
            m = _TERM.match(part)
            if not m:
                raise _Problem(line, f"cannot parse term {part.strip()!r}")
            coeffs[m.group(2)] = coeffs.get(m.group(2), 0) + int(m.group(1))
    elif isinstance(spec, dict):
        coeffs = {str(k): _int(v, _line_of(spec, k), "coefficient") for k, v in spec.items()}
    else:
        raise _Problem(line, "elements are label -> coefficient mappings or strings")
    unknown = [k for k in coeffs if k not in sc.groupoid.index]
    if unknown:
        raise _Problem(line, f"unknown element label {unknown[0]!r}")
    return element(sc.twist, coeffs)


def build_scenario(doc: _Map) -> Scenario:
    """Validate a loaded document; shape problems raise :class:`DocError` (all of them
    that can be found), mathematical failures raise library errors."""
    problems: list[tuple[int | None, str]] = []
    known = {"ring", "groupoid", "cocycle", "grading", "ideal", "params"}
    for key in doc:
        if key not in known:
            problems.append((doc.lines.get(key), f"unknown section {key!r}"))
    try:
        ring_node = _need(doc, "ring")
        if isinstance(ring_node, dict):
            modulus = _int(_need(ring_node, "modulus"), _line_of(ring_node, "modulus"), "modulus")
        else:
            modulus = _int(ring_node, doc.lines.get("ring"), "ring modulus")
        if modulus < 2:
            raise _Problem(doc.lines.get("ring"), "modulus must be at least 2")
        ring = CoeffRing(modulus)
    except _Problem as p:
        problems.append((p.line, p.msg))
        ring = None
    try:
        gnode = _need(doc, "groupoid", dict)
        groupoid, graph = _build_groupoid(gnode)
    except _Problem as p:
        problems.append((p.line, p.msg))
        gnode = groupoid = graph = None
    if problems:
        raise DocError(problems)

    sc = Scenario(ring, _plain(gnode), groupoid, graph)
    params = doc.get("params", {})
    if not isinstance(params, dict):
        problems.append((doc.lines.get("params"), "params must be a mapping"))
        params = {}
    sc.params = _plain(params)

    try:
        cnode = doc.get("cocycle")
        if graph is not None:
            if cnode is not None:
                fam = str(_need(cnode, "family")) if isinstance(cnode, dict) else ""
                m = re.fullmatch(r"bilinear:(-?\d+)", fam)
                if not m:
                    raise _Problem(doc.lines.get("cocycle"), "graph twists are given as family 'bilinear:t'")
                t = int(m.group(1)) % ring.modulus
                if not ring.is_unit_value(t):
                    raise _Problem(_line_of(cnode, "family"), f"{t} is not a unit of {ring!r}")
                sc.bilinear = t
        elif cnode is None:
            sc.cocycle = trivial_cocycle(groupoid, ring)
        else:
            if not isinstance(cnode, dict) or "entries" not in cnode:
                raise _Problem(doc.lines.get("cocycle"), "cocycle needs 'entries' (family 'bilinear:t' is for graphs)")
            entries = {}
            for row in _need(cnode, "entries", list):
                if not isinstance(row, list) or len(row) != 3:
                    raise _Problem(_line_of(row) or _line_of(cnode, "entries"), "cocycle entries are [a, b, value]")
                a, b = str(row[0]), str(row[1])
                for lab in (a, b):
                    if lab not in groupoid.index:
                        raise _Problem(_line_of(row), f"unknown element label {lab!r}")
                entries[(a, b)] = _int(row[2], _line_of(row), "cocycle value")
            sc.cocycle = cocycle_from_entries(groupoid, ring, entries)
    except _Problem as p:
        problems.append((p.line, p.msg))

    if problems:
        raise DocError(problems)

    try:
        gr = doc.get("grading")
        if gr is not None:
            if graph is not None:
                raise _Problem(doc.lines.get("grading"), "graph algebras carry the length grading; omit 'grading'")
            if not isinstance(gr, dict):
                raise _Problem(doc.lines.get("grading"), "grading must be a mapping")
            try:
                gamma = AbelianGroup.parse(str(_need(gr, "gamma")))
            except ValueError as exc:
                raise _Problem(_line_of(gr, "gamma"), str(exc)) from None
            degrees = {}
            for lab, v in (gr.get("degrees") or {}).items():
                if lab not in groupoid.index:
                    raise _Problem(_line_of(gr["degrees"], lab), f"unknown element label {lab!r}")
                degrees[lab] = v
            try:
                sc.grading = validate_grading(sc.twist, gamma, degrees)
            except ValueError as exc:
                raise _Problem(_line_of(gr, "degrees"), str(exc)) from None
    except _Problem as p:
        problems.append((p.line, p.msg))

    inode = doc.get("ideal", [])
    if not isinstance(inode, list):
        problems.append((doc.lines.get("ideal"), "ideal must be a list of elements"))
    else:
        for k, spec in enumerate(inode):
            try:
                sc.ideal.append(_parse_element(sc, spec, _line_of(spec) or _line_of(inode)))
            except _Problem as p:
                problems.append((p.line, f"ideal[{k}]: {p.msg}"))
    if problems:
        raise DocError(problems)
    return sc


def parse_element(sc: Scenario, spec) -> AlgElem | BPAlgElem:
    try:
        return _parse_element(sc, spec, None)
    except _Problem as p:
        raise DocError([(p.line, p.msg)]) from None


def _element_doc(f) -> Any:
    if isinstance(f, BPAlgElem):
        return [[r, str(c.mu), str(c.nu)] for r, c in f.terms]
    labels = f.twist.base.labels
    return {labels[a]: v for a, v in f.coeffs.items()}


def scenario_document(sc: Scenario, ideal: list | None = None, params: dict | None = None) -> dict:
    """Canonical plain-data document for ``sc``."""
    doc: dict = {"ring": {"modulus": sc.ring.modulus}, "groupoid": sc.groupoid_doc}
    if sc.is_graph:
        if sc.bilinear != 1:
            doc["cocycle"] = {"family": f"bilinear:{sc.bilinear}"}
    elif not sc.cocycle.is_trivial():
        doc["cocycle"] = {"entries": [list(e) for e in sc.cocycle.nontrivial_entries()]}
    if sc.grading is not None:
        gr = sc.grading
        degrees = {}
        for a, d in enumerate(gr.cG):
            if d != gr.gamma.identity:
                degrees[sc.groupoid.labels[a]] = d[0] if len(d) == 1 else list(d)
        doc["grading"] = {"gamma": str(gr.gamma), "degrees": degrees}
    gens = sc.ideal if ideal is None else ideal
    if gens:
        doc["ideal"] = [_element_doc(g) for g in gens]
    params = sc.params if params is None else params
    if params:
        doc["params"] = params
    return doc


def emit_document(sc: Scenario, fmt: str = "yaml", **overrides) -> str:
    doc = scenario_document(sc, **overrides)
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, allow_unicode=True)


def parse_scenario(text: str) -> Scenario:
    return build_scenario(load_document(text))


# ---------------------------------------------------------------------------
# commands


class Outcome:
    """Collects human lines and a JSON payload for one invocation."""

    def __init__(self, command: str):
        self.command = command
        self.lines: list[str] = []
        self.data: dict[str, Any] = {"command": command}
        self.code = EXIT_OK

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def render(self, as_json: bool) -> str:
        if as_json:
            payload = dict(self.data)
            payload["exit"] = self.code
            return json.dumps(payload, sort_keys=True) + "\n"
        return "\n".join(self.lines) + "\n"


def _labels(G: FiniteGroupoid, ids) -> list[str]:
    return [G.labels[a] for a in sorted(ids)]


def cmd_validate(sc: Scenario, out: Outcome, args) -> None:
    out.say(f"ring: {sc.ring!r}")
    out.data["ring"] = sc.ring.modulus
    if sc.is_graph:
        g = sc.graph
        out.say(f"graph: {len(g.vertices)} vertices, {len(g.edges)} edges")
        ok = all(
            (k * l + (k + l) * m) == (l * m + k * (l + m))
            for k in range(-4, 5) for l in range(-4, 5) for m in range(-4, 5)
        )
        out.say(f"bilinear twist t={sc.bilinear}: cocycle identity {'ok' if ok else 'FAIL'}")
        out.say(f"condition L: {'yes' if condition_L(g) else 'no'}")
        out.say("result: ok")
        out.data.update(kind="graph", vertices=len(g.vertices), edges=len(g.edges), ok=True)
        return
    G = sc.groupoid
    out.say(f"groupoid: {len(G)} elements, {len(G.units)} units ({sc.groupoid_doc.get('kind')})")
    entries = sc.cocycle.nontrivial_entries()
    out.say(f"cocycle: {len(entries)} nontrivial entries")
    report = validate_twist(sc.twist)
    for check in report.checks:
        out.say(f"  {check.line()}")
    out.say(f"summary: {report.summary()}")
    out.data.update(
        kind=sc.groupoid_doc.get("kind"),
        elements=len(G),
        checks={c.name: c.ok for c in report.checks},
        summary=report.summary(),
    )
    if sc.grading is not None:
        out.say(f"grading: {sc.grading.gamma} ok, |G_eps| = {len(sc.grading.epsilon)}")
    out.say(f"ideal generators: {len(sc.ideal)}")
    if not report.ok:
        bad = report.first_failure()
        out.say(f"result: FAIL at {bad.name}")
        out.data["ok"] = False
        out.code = EXIT_PRECONDITION
    else:
        out.say("result: ok")
        out.data["ok"] = True


def cmd_info(sc: Scenario, out: Outcome, args) -> None:
    if sc.is_graph:
        g = sc.graph
        sinks = [v for v in g.vertices if g.is_sink(v)]
        loops = {v: exitless_cycle_at(g, v) for v in g.vertices}
        out.say(f"vertices: {', '.join(g.vertices)}")
        out.say("edges: " + ", ".join(f"{e}: {s}->{r}" for e, s, r in g.edges))
        out.say(f"sinks: {', '.join(sinks) or '-'}")
        out.say(f"condition L (effective): {'yes' if condition_L(g) else 'no'}")
        out.say(f"twist: t = {sc.bilinear}")
        out.data.update(vertices=list(g.vertices), sinks=sinks, condition_L=condition_L(g),
                        exitless_cycle_vertices=[v for v, l in loops.items() if l is not None],
                        twist=sc.bilinear)
        return
    G, tw = sc.groupoid, sc.twist
    iso, interior = isotropy(G), isotropy_interior(G)
    X = U.compute_X_sigma(tw)
    out.say(f"ring: {sc.ring!r}, units {list(sc.ring.units)}")
    out.say(f"G: {len(G)} elements; units {_labels(G, G.units)}")
    out.say(f"isotropy: {_labels(G, iso)}; interior: {_labels(G, interior)}")
    out.say(f"effective: {'yes' if is_effective(G) else 'no'}")
    out.say(f"Sigma: {len(tw.total)} elements; X_Sigma has {len(X)} of {len(tw.total.units)} units")
    entries = sc.cocycle.nontrivial_entries()
    out.say("cocycle: " + (", ".join(f"({a},{b})->{v}" for a, b, v in entries) or "trivial"))
    out.data.update(
        elements=list(G.labels), units=_labels(G, G.units), isotropy=_labels(G, iso),
        effective=is_effective(G), sigma_size=len(tw.total), cocycle=[list(e) for e in entries],
    )
    if sc.grading is not None:
        gr = sc.grading
        comps = {}
        for d in sorted(set(gr.cG)):
            comps[gr.gamma.format(d)] = _labels(G, gr.component(d))
            out.say(f"degree {gr.gamma.format(d)}: {comps[gr.gamma.format(d)]}")
        eff = is_effective(gr.epsilon_twist.base)
        out.say(f"G_eps effective: {'yes' if eff else 'no'}")
        out.data.update(components=comps, epsilon_effective=eff)


def _fmt(f) -> str:
    return str(f) if isinstance(f, BPAlgElem) else format_elem(f)


def cmd_conv(sc: Scenario, out: Outcome, args) -> None:
    pair = sc.params.get("conv")
    if not isinstance(pair, list) or len(pair) != 2:
        raise DocError([(None, "conv needs params.conv: [left, right]")])
    f, g = (parse_element(sc, x) for x in pair)
    h = conv_bp(f, g) if sc.is_graph else f * g
    out.say(f"left:    {_fmt(f)}")
    out.say(f"right:   {_fmt(g)}")
    out.say(f"product: {_fmt(h)}")
    out.data.update(left=_fmt(f), right=_fmt(g), product=_fmt(h))
    if sc.is_graph:
        canon = " + ".join(f"{v}*{c}" for c, v in canonical_terms(h).items()) or "0"
        out.say(f"refined: {canon}")
        out.data["refined"] = canon


def _first_nonzero(sc: Scenario):
    for g in sc.ideal:
        if (canonical_terms(g) if sc.is_graph else g):
            return g
    raise ZeroInput("no nonzero ideal generator")


def cmd_witness(sc: Scenario, out: Outcome, args) -> None:
    g = _first_nonzero(sc)
    if sc.is_graph:
        if not args.graded:
            raise PreconditionFail("only the graded witness (--graded) is available for graph algebras")
        f = graded_witness_bp(g)
        canon = canonical_terms(f)
        out.say(f"input:   {g}")
        out.say(f"witness: {f}")
        meets = any(c.is_unit for c in canon)
        out.say(f"re-verified: nonzero={'yes' if canon else 'no'}, degree 0={'yes' if all(c.degree == 0 for c in canon) else 'no'}, "
                f"meets units={'yes' if meets else 'no'}")
        out.data.update(input=str(g), witness=str(f), nonzero=bool(canon), meets_units=meets)
        return
    if args.graded:
        if sc.grading is None:
            raise PreconditionFail("--graded needs a grading section")
        gr = sc.grading
        if gr.degree_of(g) is None:
            raise NotHomogeneous(f"{format_elem(g)} is not homogeneous")
        f_eps = U.graded_epsilon_witness(g, gr)
        f = include(f_eps, g.section)
        in_ideal = U.ideal_closure([g]).contains(f)
        meets = any(a in sc.groupoid.units for a in f.coeffs)
        out.say(f"input:   {format_elem(g)}  (degree {gr.gamma.format(gr.degree_of(g))})")
        out.say(f"witness: {format_elem(f)}")
        out.say(f"re-verified: nonzero={'yes' if f else 'no'}, degree eps=yes, meets units={'yes' if meets else 'no'}, "
                f"in ideal={'yes' if in_ideal else 'no'}")
        out.data.update(input=format_elem(g), witness=format_elem(f), in_ideal=in_ideal, meets_units=meets)
        return
    report = U.isotropy_witness(g)
    for line in report.lines():
        out.say(line)
    again = report.recheck()
    out.say(f"re-verified: witness in ideal={'yes' if again else 'no'}, supp in Iso°={'yes' if report.certificate['isotropy_support'] else 'no'}")
    tot = sc.twist.total
    out.data.update(
        input=format_elem(g), D0=[tot.labels[x] for x in sorted(report.d0)], f=format_elem(report.f),
        u=tot.labels[report.u], K=[tot.labels[x] for x in sorted(report.K)],
        witness=format_elem(report.witness), certificate=report.certificate, reverified=again,
    )


def _verdict_for(sc: Scenario, pi: U.QuotientHom, mode: str) -> U.Verdict:
    if mode == "gut":
        return U.gut_check(pi)
    if mode == "ck":
        return U.ck_check(pi)
    if sc.grading is None:
        raise PreconditionFail(f"mode {mode} needs a grading section")
    return U.graded_check(pi, sc.grading, "general" if mode == "graded" else "epsilon-effective")


def cmd_check(sc: Scenario, out: Outcome, args) -> None:
    if sc.is_graph:
        raise PreconditionFail("injectivity checks need a finite groupoid")
    mode = args.mode or sc.params.get("mode", "gut")
    if mode not in CHECK_MODES:
        raise DocError([(None, f"unknown mode {mode!r}")])
    pi = U.ideal_closure(sc.ideal, sc.twist)
    v = _verdict_for(sc, pi, mode)
    out.say(f"mode: {mode}")
    out.say(f"ideal: {pi.size()} elements")
    out.say(f"verdict: {v}")
    out.data.update(mode=mode, ideal_size=pi.size(), injective=v.injective,
                    witness=format_elem(v.witness) if v.witness is not None else None)


def _oracle_finite(sc: Scenario, rng: random.Random, iterations: int):
    tw = sc.twist
    S = tw.section
    effective = is_effective(sc.groupoid)
    eps_effective = sc.grading is not None and is_effective(sc.grading.epsilon_twist.base)
    for it in range(iterations):
        g = random_element(S, rng)
        report = U.isotropy_witness(g)
        if not report.ok:
            return it, [g], f"witness certificate failed: {report.certificate}"
        gens = random_generators(S, rng, grading=sc.grading)
        pi = U.ideal_closure(gens, S)
        verdicts = {"gut": U.gut_check(pi)}
        try:
            brute = U.brute_force_injectivity(pi)
            verdicts["brute"] = brute
            if brute.closure_size != pi.size():
                return it, gens, f"ideal size {pi.size()} != enumerated {brute.closure_size}"
        except TooLarge:
            pass
        if effective:
            verdicts["ck"] = U.ck_check(pi)
        if sc.grading is not None:
            verdicts["graded"] = U.graded_check(pi, sc.grading, "general")
            if eps_effective:
                verdicts["graded-ck"] = U.graded_check(pi, sc.grading, "epsilon-effective")
        answers = {k: v.injective for k, v in verdicts.items()}
        if len(set(answers.values())) != 1:
            return it, gens, f"checkers disagree: {answers}"
        if pi.is_zero != answers["gut"]:
            return it, gens, "gut verdict does not match the ideal"
    return None


def _oracle_graph(sc: Scenario, rng: random.Random, iterations: int):
    g, ring, t = sc.graph, sc.ring, sc.bilinear
    for it in range(iterations):
        a, b, c = (random_bp_element(g, ring, rng, depth=2, twist=t) for _ in range(3))
        if not equals_bp(conv_bp(conv_bp(a, b), c), conv_bp(a, conv_bp(b, c))):
            return it, [a, b, c], "convolution is not associative"
        cyl = rng.choice([x for _, x in a.terms] or [Cylinder(g.path(g.vertices[0]), g.path(g.vertices[0]))])
        if not g.is_sink(cyl.mu.range):
            whole = BPAlgElem(g, ring, ((1, cyl),), t)
            parts = BPAlgElem(g, ring, tuple((1, x) for x in refine_cylinder(cyl)), t)
            if not equals_bp(whole, parts):
                return it, [whole], "refinement identity fails"
        k = rng.choice(sorted({x.degree for _, x in a.terms}) or [0])
        h = random_bp_element(g, ring, rng, depth=2, twist=t, degree=k)
        if canonical_terms(h):
            graded_witness_bp(h)
    return None


def cmd_oracle(sc: Scenario, out: Outcome, args) -> None:
    seed = args.seed if args.seed is not None else int(sc.params.get("seed", 0))
    iterations = args.iterations if args.iterations is not None else int(sc.params.get("iterations", 100))
    rng = random.Random(seed)
    run = _oracle_graph if sc.is_graph else _oracle_finite
    failure = run(sc, rng, iterations)
    out.data.update(seed=seed, iterations=iterations)
    if failure is None:
        out.say(f"seed {seed}: {iterations}/{iterations} agree")
        out.data.update(agree=iterations, discrepancy=None)
        return
    it, elems, why = failure
    out.code = EXIT_DISCREPANCY
    out.say(f"seed {seed}: discrepancy at iteration {it}: {why}")
    out.say(f"{it}/{iterations} agree")
    reproducer = emit_document(sc, ideal=elems, params={"seed": seed, "iteration": it})
    out.say("reproducer:")
    out.say(reproducer.rstrip())
    out.data.update(agree=it, discrepancy=why, reproducer=reproducer)


COMMANDS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "conv": cmd_conv,
    "witness": cmd_witness,
    "check": cmd_check,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("doc", nargs="?", default="-", help="document path, or - for standard input")
    common.add_argument("--json", action="store_true", help="print one JSON object instead of text")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--iterations", type=int, default=None)
    common.add_argument("--mode", choices=CHECK_MODES, default=None)
    common.add_argument("--graded", action="store_true")
    parser = argparse.ArgumentParser(prog="steinberg", description="Twisted Steinberg algebra workbench")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(argv: list[str] | None = None, stdin=None) -> tuple[int, str]:
    """Run the CLI and return ``(exit code, output text)`` without printing."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_PARSE if exc.code else EXIT_OK), ""
    out = Outcome(args.command)
    try:
        if args.doc == "-":
            text = (stdin or sys.stdin).read()
        else:
            with open(args.doc, encoding="utf-8") as fh:
                text = fh.read()
        sc = parse_scenario(text)
        COMMANDS[args.command](sc, out, args)
    except OSError as exc:
        out.code = EXIT_PARSE
        out.say(f"error: cannot read {args.doc}: {exc.strerror}")
        out.data["error"] = {"type": "OSError", "message": str(exc.strerror)}
    except DocError as exc:
        out.code = EXIT_PARSE
        for line, msg in exc.problems:
            out.say(f"parse error: {_where(line)}{msg}")
        out.data["error"] = {"type": "DocError", "problems": [[line, msg] for line, msg in exc.problems]}
    except SteinbergError as exc:
        out.code = EXIT_PRECONDITION
        out.say(f"error: {type(exc).__name__}: {exc}")
        out.data["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return out.code, out.render(args.json)


def main(argv: list[str] | None = None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
