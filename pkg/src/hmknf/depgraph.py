"""Positive dependency graphs over atoms, loops, and ontology neighbourhoods.

An edge ``a -> b`` reads "a depends on b".  The rule graph links head atoms to
positive body atoms.  The ontology graph comes in two flavours: the exact
graph obtained by enumerating assumption sets, and a cheap syntactic
overapproximation used by the solver.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Literal

import networkx as nx

from .errors import GateExceeded
from .kb import Atom, KnowledgeBase, iter_subsets
from .ontology import EntailmentOracle, default_oracle

GraphMode = Literal["exact", "overapprox"]
Edge = tuple[Atom, Atom]
Loop = frozenset  # frozenset[Atom]

EXACT_GRAPH_GATE = 12
LOOP_GATE = 4096
_MAX_SCC_FOR_LOOPS = 20


@dataclass(frozen=True)
class DependencyGraph:
    vertices: frozenset[Atom]
    edges: frozenset[Edge]

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.vertices or b not in self.vertices:
                raise ValueError(f"edge {a}->{b} leaves the vertex set")

    def successors(self, atom: Atom) -> set[Atom]:
        return {b for a, b in self.edges if a == atom}

    def union(self, other: DependencyGraph) -> DependencyGraph:
        return DependencyGraph(self.vertices | other.vertices, self.edges | other.edges)

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sorted(self.vertices))
        g.add_edges_from(sorted(self.edges))
        return g


def rule_graph(kb: KnowledgeBase) -> DependencyGraph:
    edges = {(h, b) for r in kb.rules for h in r.head for b in r.body_pos}
    return DependencyGraph(kb.ka, frozenset(edges))


def ontology_graph_exact(
    kb: KnowledgeBase,
    oracle: EntailmentOracle | None = None,
    gate: int = EXACT_GRAPH_GATE,
) -> DependencyGraph:
    """Minimal ontology graph: ``a -> b`` iff ``b`` is needed in some consistent,
    minimal assumption set entailing ``a``.  Exhaustive over subsets of ka_o."""
    if len(kb.ka_o) > gate:
        raise GateExceeded("max-exact-graph", gate, len(kb.ka_o),
                           "too large for exact mode; use --graph-mode overapprox")
    oracle = oracle or default_oracle(kb)
    edges: set[Edge] = set()
    for s in iter_subsets(kb.ka_o):
        if not s or not oracle.consistent(s):
            continue
        for a in sorted(kb.ka_o - s):
            if not oracle.entails(s, a):
                continue
            for b in sorted(s):
                if (a, b) not in edges and not oracle.entails(s - {b}, a):
                    edges.add((a, b))
    return DependencyGraph(kb.ka_o, frozenset(edges))


def _literal_reachability(kb: KnowledgeBase) -> set[Edge]:
    # Literal l needs the complement of every other literal in its clause.
    # a -> b when literal +a transitively needs +b.
    needs: dict[tuple[Atom, bool], set[tuple[Atom, bool]]] = {}
    for c in kb.ontology.clauses:
        for lit in c:
            for other in c:
                if other != lit:
                    needs.setdefault(lit, set()).add((other[0], not other[1]))
    edges: set[Edge] = set()
    for a in kb.ka_o:
        start = (a, True)
        seen = set()
        todo = deque(needs.get(start, ()))
        while todo:
            lit = todo.popleft()
            if lit in seen:
                continue
            seen.add(lit)
            todo.extend(needs.get(lit, ()))
        edges.update((a, b) for b, pos in seen if pos and b != a)
    return edges


def ontology_graph_overapprox(kb: KnowledgeBase) -> DependencyGraph:
    """Clause co-occurrence edges (both directions) plus positive-literal
    reachability through clauses; contains every edge of the exact graph."""
    edges: set[Edge] = set()
    for c in kb.ontology.clauses:
        atoms = [a for a, _ in c]
        edges.update((a, b) for a in atoms for b in atoms if a != b)
    edges |= _literal_reachability(kb)
    return DependencyGraph(kb.ka_o, frozenset(edges))


def ontology_graph(kb: KnowledgeBase, mode: GraphMode = "overapprox", *,
                   oracle: EntailmentOracle | None = None,
                   exact_gate: int = EXACT_GRAPH_GATE) -> DependencyGraph:
    if mode == "exact":
        return ontology_graph_exact(kb, oracle, exact_gate)
    if mode == "overapprox":
        return ontology_graph_overapprox(kb)
    raise ValueError(f"unknown graph mode {mode!r}")


def kb_graph(kb: KnowledgeBase, mode: GraphMode = "overapprox", *,
             oracle: EntailmentOracle | None = None,
             exact_gate: int = EXACT_GRAPH_GATE) -> DependencyGraph:
    return rule_graph(kb).union(ontology_graph(kb, mode, oracle=oracle, exact_gate=exact_gate))


def cyclic_components(graph: DependencyGraph) -> list[frozenset[Atom]]:
    """SCCs that can host a loop (size >= 2, or a singleton with a self-edge)."""
    g = graph.to_networkx()
    out = []
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1 or any(g.has_edge(v, v) for v in comp):
            out.append(frozenset(comp))
    return sorted(out, key=lambda c: sorted(c))


def is_strongly_connected_subset(graph: DependencyGraph, atoms: Iterable[Atom]) -> bool:
    atoms = set(atoms)
    if not atoms:
        return False
    inner = [(a, b) for a, b in graph.edges if a in atoms and b in atoms]
    if len(atoms) == 1:
        (v,) = atoms
        return (v, v) in inner
    fwd: dict[Atom, list[Atom]] = {}
    bwd: dict[Atom, list[Atom]] = {}
    for a, b in inner:
        fwd.setdefault(a, []).append(b)
        bwd.setdefault(b, []).append(a)
    root = min(atoms)
    for adj in (fwd, bwd):
        seen = {root}
        todo = [root]
        while todo:
            for w in adj.get(todo.pop(), ()):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        if seen != atoms:
            return False
    return True


def loops(graph: DependencyGraph, max_enumeration: int = LOOP_GATE) -> list[Loop]:
    """All vertex sets whose induced subgraph is strongly connected.

    Singletons count only with a self-edge.  Exponential in SCC size, hence
    the gate on the number of loops produced.
    """
    found: list[Loop] = []
    for comp in cyclic_components(graph):
        if len(comp) > _MAX_SCC_FOR_LOOPS:
            raise GateExceeded("max-loops", max_enumeration, None,
                               f"strongly connected component of size {len(comp)}")
        for subset in iter_subsets(comp):
            if subset and is_strongly_connected_subset(graph, subset):
                found.append(subset)
                if len(found) > max_enumeration:
                    raise GateExceeded("max-loops", max_enumeration, len(found))
    return found


def ext(graph: DependencyGraph, atoms: Iterable[Atom]) -> frozenset[Atom]:
    """Out-neighbours of ``atoms`` in an ontology graph, minus the atoms themselves."""
    atoms = frozenset(atoms)
    return frozenset(b for a, b in graph.edges if a in atoms) - atoms


def is_tight(kb: KnowledgeBase, mode: GraphMode = "overapprox", **kw) -> bool:
    return nx.is_directed_acyclic_graph(kb_graph(kb, mode, **kw).to_networkx())


def to_dot(kb: KnowledgeBase, mode: GraphMode = "overapprox", *, annotate_loops: bool = False,
           oracle: EntailmentOracle | None = None, exact_gate: int = EXACT_GRAPH_GATE) -> str:
    """DOT digraph of G(K): rule edges solid, ontology-only edges dashed."""
    rg = rule_graph(kb)
    og = ontology_graph(kb, mode, oracle=oracle, exact_gate=exact_gate)
    full = rg.union(og)

    def q(s: str) -> str:
        return '"' + s.replace('"', '\\"') + '"'

    lines = ["digraph G {"]
    if annotate_loops:
        for i, comp in enumerate(cyclic_components(full)):
            lines.append(f"  subgraph cluster_scc{i} {{")
            lines.append('    label="SCC"; style=dotted;')
            lines.extend(f"    {q(v)};" for v in sorted(comp))
            lines.append("  }")
    lines.extend(f"  {q(v)};" for v in sorted(full.vertices))
    for a, b in sorted(full.edges):
        style = "solid" if (a, b) in rg.edges else "dashed"
        lines.append(f"  {q(a)} -> {q(b)} [style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
