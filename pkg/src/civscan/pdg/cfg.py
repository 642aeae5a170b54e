"""Per-function control flow graphs with dominators, postdominators, and
control dependence.

The graph core is plain block labels and edges so tests can build CFGs
directly; build_cfg extracts the structure from a lowered function. A
virtual exit is added whenever there is not exactly one exit block, which
keeps the postdominator tree well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from civscan.frontend.ir import IRFunction

VIRTUAL_EXIT = "@exit"


@dataclass
class CFG:
    function: str
    blocks: list[str]
    edges: set[tuple[str, str]]
    entry: str
    exits: frozenset[str]
    _succ: dict[str, list[str]] = field(default_factory=dict, repr=False)
    _pred: dict[str, list[str]] = field(default_factory=dict, repr=False)
    _dom: dict[str, frozenset[str]] | None = field(default=None, repr=False)
    _pdom: dict[str, frozenset[str]] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self._succ = {b: [] for b in self.blocks}
        self._pred = {b: [] for b in self.blocks}
        for a, b in sorted(self.edges):
            self._succ[a].append(b)
            self._pred[b].append(a)

    def successors(self, b: str) -> list[str]:
        return self._succ[b]

    def predecessors(self, b: str) -> list[str]:
        return self._pred[b]

    def reachable(self) -> set[str]:
        seen = {self.entry}
        stack = [self.entry]
        while stack:
            for s in self._succ[stack.pop()]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return seen

    def dead_blocks(self) -> set[str]:
        return set(self.blocks) - self.reachable()

    # ------------------------------------------------------------ dominance

    def dominators(self) -> dict[str, frozenset[str]]:
        """dom[b] = blocks dominating b, over reachable blocks only."""
        if self._dom is None:
            live = [b for b in self.blocks if b in self.reachable()]
            self._dom = _iterate_dominance(
                live, self.entry, lambda b: [p for p in self._pred[b] if p in set(live)]
            )
        return self._dom

    def _exit_graph(self) -> tuple[list[str], str, dict[str, list[str]]]:
        """Reversed reachable graph with a virtual exit when |exits| != 1."""
        live = self.reachable()
        exits = [e for e in sorted(self.exits) if e in live]
        nodes = sorted(live)
        rev: dict[str, list[str]] = {b: [] for b in nodes}
        for a, b in sorted(self.edges):
            if a in live and b in live:
                rev.setdefault(b, []).append(a)
        if len(exits) == 1:
            return nodes, exits[0], rev
        nodes = nodes + [VIRTUAL_EXIT]
        rev[VIRTUAL_EXIT] = list(exits)
        return nodes, VIRTUAL_EXIT, rev

    def postdominators(self) -> dict[str, frozenset[str]]:
        """pdom[b] = blocks postdominating b (virtual exit excluded)."""
        if self._pdom is None:
            nodes, start, rev = self._exit_graph()
            succ_in_rev = {b: [] for b in nodes}  # type: dict[str, list[str]]
            for b, preds in rev.items():
                for p in preds:
                    succ_in_rev[p].append(b)
            raw = _iterate_dominance(nodes, start, lambda b: succ_in_rev[b])
            self._pdom = {
                b: frozenset(x for x in s if x != VIRTUAL_EXIT)
                for b, s in raw.items()
                if b != VIRTUAL_EXIT
            }
        return self._pdom

    def control_dependence(self) -> dict[str, frozenset[str]]:
        """cd[b] = branch blocks c such that b postdominates a successor of c
        but does not postdominate c."""
        pdom = self.postdominators()
        live = self.reachable()
        out: dict[str, set[str]] = {b: set() for b in self.blocks if b in live}
        for c in sorted(live):
            succs = [s for s in self._succ[c] if s in live]
            if len(succs) < 2:
                continue
            for b in sorted(live):
                pdoms_some_succ = any(b in pdom[s] for s in succs)
                if pdoms_some_succ and b not in pdom[c]:
                    out[b].add(c)
        return {b: frozenset(s) for b, s in out.items()}

    def back_edges(self) -> set[tuple[str, str]]:
        """Edges u->h where h dominates u (natural loop back edges)."""
        dom = self.dominators()
        live = self.reachable()
        return {
            (u, h)
            for (u, h) in self.edges
            if u in live and h in live and h in dom[u]
        }

    def natural_loop(self, back_edge: tuple[str, str]) -> set[str]:
        """Blocks of the natural loop for a back edge (header included)."""
        u, h = back_edge
        body = {h, u}
        stack = [u]
        while stack:
            n = stack.pop()
            if n == h:
                continue
            for p in self._pred[n]:
                if p not in body:
                    body.add(p)
                    stack.append(p)
        return body


def _iterate_dominance(nodes, entry, preds) -> dict[str, frozenset[str]]:
    all_nodes = frozenset(nodes)
    dom: dict[str, frozenset[str]] = {n: all_nodes for n in nodes}
    dom[entry] = frozenset({entry})
    changed = True
    while changed:
        changed = False
        for n in nodes:
            if n == entry:
                continue
            ps = [dom[p] for p in preds(n)]
            if ps:
                new = frozenset({n}) | reduce(lambda a, b: a & b, ps)
            else:
                new = frozenset({n})
            if new != dom[n]:
                dom[n] = new
                changed = True
    return dom


def build_cfg(fn: IRFunction) -> CFG:
    """CFG for a lowered function; total on valid IR."""
    blocks = [b.label for b in fn.blocks]
    edges: set[tuple[str, str]] = set()
    exits: set[str] = set()
    for b in fn.blocks:
        term = b.terminator
        if term.kind == "ret":
            exits.add(b.label)
        elif term.kind in ("br", "jmp"):
            for t in term.targets:
                edges.add((b.label, t))
        elif term.kind == "switch":
            edges.add((b.label, term.targets[0]))
            for _, t in term.cases:
                edges.add((b.label, t))
        else:
            raise AssertionError(f"block {b.label} ends in non-terminator {term.kind}")
    return CFG(fn.name, blocks, edges, fn.blocks[0].label, frozenset(exits))
