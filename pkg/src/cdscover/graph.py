"""Two-colored bipartite instances and the covering parameter rho.

An instance is a bipartite graph on nodes A1..AX, B1..BY whose edges carry
one of two colors: qualified (the secret must be decodable from that signal
pair) or unqualified (nothing may leak). rho is the minimum size of a
connected qualified edge cover taken over all (internal qualified edge,
unqualified path) pairs; it drives both the converse bound and the
synthesizer.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import inf
from typing import Iterator, Sequence

import numpy as np

Edge = tuple[str, str]  # (A-node, B-node), e.g. ("A1", "B2")


class InstanceError(ValueError):
    """Malformed or inconsistent instance data."""


class CoverSearchLimit(RuntimeError):
    """Exact cover search refused: too many qualified edges in the component."""


def node_key(node: str) -> tuple[int, int]:
    """Sort key: A-nodes before B-nodes, then by index."""
    side = 0 if node[0] == "A" else 1
    return (side, int(node[1:]))


def a_node(x: int) -> str:
    return f"A{x}"


def b_node(y: int) -> str:
    return f"B{y}"


def edge_nodes(pair: tuple[int, int]) -> Edge:
    return (a_node(pair[0]), b_node(pair[1]))


@dataclass(frozen=True)
class CdsInstance:
    """A CDS instance: bipartite node sets plus colored edge sets.

    Indices are 1-based. The two edge sets must be disjoint; pairs absent
    from both sets are inputs that never occur. Nodes may have no
    unqualified edge (several of the catalog instances do); callers that
    need the normalization can ask via ``nodes_without_unqualified``.
    """

    name: str
    a_count: int
    b_count: int
    qualified: frozenset[tuple[int, int]]
    unqualified: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.a_count < 1 or self.b_count < 1:
            raise InstanceError("a_count and b_count must be positive")
        for label, edges in (("qualified", self.qualified), ("unqualified", self.unqualified)):
            for x, y in edges:
                if not (1 <= x <= self.a_count and 1 <= y <= self.b_count):
                    raise InstanceError(
                        f"{label} edge ({x},{y}) out of range for {self.a_count}x{self.b_count} instance"
                    )
        both = self.qualified & self.unqualified
        if both:
            x, y = min(both)
            raise InstanceError(f"edge ({x},{y}) listed as both qualified and unqualified")

    # -- node / edge views ---------------------------------------------------

    def nodes(self) -> list[str]:
        return [a_node(x) for x in range(1, self.a_count + 1)] + [
            b_node(y) for y in range(1, self.b_count + 1)
        ]

    def qualified_node_edges(self) -> list[Edge]:
        return sorted((edge_nodes(p) for p in self.qualified), key=lambda e: (node_key(e[0]), node_key(e[1])))

    def unqualified_node_edges(self) -> list[Edge]:
        return sorted((edge_nodes(p) for p in self.unqualified), key=lambda e: (node_key(e[0]), node_key(e[1])))

    def edges_with_kind(self) -> Iterator[tuple[tuple[int, int], str]]:
        for p in sorted(self.qualified):
            yield p, "qualified"
        for p in sorted(self.unqualified):
            yield p, "unqualified"

    def qualified_adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes()}
        for x, y in self.qualified:
            adj[a_node(x)].add(b_node(y))
            adj[b_node(y)].add(a_node(x))
        return adj

    def unqualified_adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes()}
        for x, y in self.unqualified:
            adj[a_node(x)].add(b_node(y))
            adj[b_node(y)].add(a_node(x))
        return adj

    def nodes_without_unqualified(self) -> list[str]:
        adj = self.unqualified_adjacency()
        return [n for n in self.nodes() if not adj[n]]


# -- parsing and serialization ------------------------------------------------


def _edge_list(obj, label: str) -> frozenset[tuple[int, int]]:
    if not isinstance(obj, list):
        raise InstanceError(f"field '{label}' must be a list of [x, y] pairs")
    pairs = set()
    for i, item in enumerate(obj):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in item)
        ):
            raise InstanceError(f"{label}[{i}] must be a pair of integers, got {item!r}")
        pairs.add((item[0], item[1]))
    return frozenset(pairs)


def parse_instance(text: str, require_unqualified_incidence: bool = False) -> CdsInstance:
    """Parse and validate the instance JSON format.

    Rejects malformed JSON, out-of-range indices and overlapping edge
    colors. The model normalization (every node incident to an unqualified
    edge) is only enforced when ``require_unqualified_incidence`` is set,
    because several published instances violate it.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"malformed JSON: {e.msg} (line {e.lineno}, column {e.colno})") from e
    if not isinstance(obj, dict):
        raise InstanceError("instance file must contain a JSON object")
    for key in ("a_count", "b_count"):
        if not isinstance(obj.get(key), int) or isinstance(obj.get(key), bool):
            raise InstanceError(f"field '{key}' must be an integer")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise InstanceError("field 'name' must be a string")
    inst = CdsInstance(
        name=name,
        a_count=obj["a_count"],
        b_count=obj["b_count"],
        qualified=_edge_list(obj.get("qualified", []), "qualified"),
        unqualified=_edge_list(obj.get("unqualified", []), "unqualified"),
    )
    if require_unqualified_incidence:
        missing = inst.nodes_without_unqualified()
        if missing:
            raise InstanceError(f"node {missing[0]} has no unqualified edge")
    return inst


def serialize_instance(inst: CdsInstance) -> str:
    """Canonical JSON: fixed key order, edge lists sorted lexicographically."""
    obj = {
        "name": inst.name,
        "a_count": inst.a_count,
        "b_count": inst.b_count,
        "qualified": [list(p) for p in sorted(inst.qualified)],
        "unqualified": [list(p) for p in sorted(inst.unqualified)],
    }
    return json.dumps(obj, indent=2) + "\n"


def load_instance(path) -> CdsInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- qualified components ------------------------------------------------------


@dataclass(frozen=True)
class QualifiedComponent:
    nodes: tuple[str, ...]
    kind: str  # "path" | "cycle" | "other"
    traversal: tuple[str, ...] | None

    def __contains__(self, node: str) -> bool:
        return node in self.nodes


def qualified_components(inst: CdsInstance) -> list[QualifiedComponent]:
    """Partition into maximal qualified-connected components with shapes.

    A component is a path or cycle iff every node has qualified degree <= 2
    and the edges form a single path/cycle; isolated nodes count as
    one-node paths. Traversals are deterministic: paths start at the
    lexicographically smaller endpoint; cycles start at the lowest-indexed
    A-node and move toward its lower-indexed qualified neighbor.
    """
    adj = inst.qualified_adjacency()
    seen: set[str] = set()
    comps: list[QualifiedComponent] = []
    for start in sorted(inst.nodes(), key=node_key):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            n = queue.popleft()
            comp.append(n)
            for m in sorted(adj[n], key=node_key):
                if m not in seen:
                    seen.add(m)
                    queue.append(m)
        comp_sorted = tuple(sorted(comp, key=node_key))
        n_edges = sum(len(adj[n]) for n in comp) // 2
        degrees = [len(adj[n]) for n in comp]
        if max(degrees, default=0) <= 2:
            if n_edges == len(comp) - 1:
                comps.append(QualifiedComponent(comp_sorted, "path", _path_traversal(comp_sorted, adj)))
                continue
            if n_edges == len(comp) and all(d == 2 for d in degrees):
                comps.append(QualifiedComponent(comp_sorted, "cycle", _cycle_traversal(comp_sorted, adj)))
                continue
        comps.append(QualifiedComponent(comp_sorted, "other", None))
    comps.sort(key=lambda c: node_key(c.nodes[0]))
    return comps


def _path_traversal(nodes: tuple[str, ...], adj: dict[str, set[str]]) -> tuple[str, ...]:
    if len(nodes) == 1:
        return nodes
    endpoints = sorted((n for n in nodes if len(adj[n]) == 1), key=node_key)
    cur = endpoints[0]
    order = [cur]
    prev = None
    while len(order) < len(nodes):
        nxt = [m for m in adj[cur] if m != prev]
        prev, cur = cur, nxt[0]
        order.append(cur)
    return tuple(order)


def _cycle_traversal(nodes: tuple[str, ...], adj: dict[str, set[str]]) -> tuple[str, ...]:
    start = min((n for n in nodes if n[0] == "A"), key=node_key)
    first = min(adj[start], key=node_key)
    order = [start, first]
    prev, cur = start, first
    while len(order) < len(nodes):
        nxt = [m for m in adj[cur] if m != prev]
        prev, cur = cur, nxt[0]
        order.append(cur)
    return tuple(order)


# -- internal qualified edges and unqualified paths ----------------------------


def _bfs_dist(adj: dict[str, set[str]], sources: Sequence[str]) -> dict[str, int]:
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        n = queue.popleft()
        for m in adj[n]:
            if m not in dist:
                dist[m] = dist[n] + 1
                queue.append(m)
    return dist


def _simple_paths(adj: dict[str, set[str]], start: str, goal: str, max_edges: int) -> Iterator[tuple[str, ...]]:
    """All simple paths start..goal with at most max_edges edges, DFS order."""
    dist_goal = _bfs_dist(adj, [goal])
    if start not in dist_goal or dist_goal[start] > max_edges:
        return
    path = [start]
    on_path = {start}

    def rec() -> Iterator[tuple[str, ...]]:
        cur = path[-1]
        used = len(path) - 1
        for nb in sorted(adj[cur], key=node_key):
            if nb in on_path:
                continue
            if used + 1 + dist_goal.get(nb, inf) > max_edges:
                continue
            if nb == goal:
                yield tuple(path) + (goal,)
                continue
            path.append(nb)
            on_path.add(nb)
            yield from rec()
            path.pop()
            on_path.remove(nb)

    yield from rec()


def internal_qualified_edge_candidates(
    inst: CdsInstance, max_path_len: int | None = None
) -> list[tuple[Edge, tuple[str, ...]]]:
    """All (qualified edge e, unqualified path P between e's endpoints).

    Restricting P's endpoints to e's endpoints loses no generality for the
    minimum: if e = {u, v} joins two interior nodes of a path P', the
    sub-path of P' between u and v is itself an unqualified path whose node
    set is contained in P''s, so any cover of P' covers it and the minimum
    over the restricted pairs equals the unrestricted minimum.
    """
    if max_path_len is None:
        max_path_len = inst.a_count + inst.b_count
    if max_path_len < 1:
        raise InstanceError("max_path_len must be at least 1")
    uadj = inst.unqualified_adjacency()
    out: list[tuple[Edge, tuple[str, ...]]] = []
    for e in inst.qualified_node_edges():
        u, v = e
        for path in _simple_paths(uadj, u, v, max_path_len):
            out.append((e, path))
    return out


# -- connected edge covers ------------------------------------------------------


@dataclass(frozen=True)
class CoverWitness:
    """Certificate for a value of rho(e, P).

    ``edge`` is the internal qualified edge, ``path`` the unqualified path
    (as a node sequence joining the edge's endpoints) and ``cover`` the
    connected qualified edge set containing ``edge`` that covers every path
    node.
    """

    edge: Edge
    path: tuple[str, ...]
    cover: frozenset[Edge]

    @property
    def size(self) -> int:
        return len(self.cover)

    def sort_key(self):
        return (self.size, self.edge, self.path, tuple(sorted(self.cover)))

    def violations(self, inst: CdsInstance) -> list[str]:
        """Re-check every invariant independently; empty list means valid."""
        problems = []
        qedges = set(inst.qualified_node_edges())
        uedges = {frozenset(e) for e in inst.unqualified_node_edges()}
        if self.edge not in qedges:
            problems.append(f"edge {self.edge} is not a qualified edge")
        if self.edge[0] not in self.path or self.edge[1] not in self.path:
            problems.append("edge endpoints not on the path")
        if len(set(self.path)) != len(self.path):
            problems.append("path nodes are not distinct")
        for a, b in zip(self.path, self.path[1:]):
            if frozenset((a, b)) not in uedges:
                problems.append(f"path step {a}-{b} is not an unqualified edge")
        if not self.cover <= qedges:
            problems.append("cover contains non-qualified edges")
        if self.edge not in self.cover:
            problems.append("cover does not contain the internal edge")
        covered = {n for e in self.cover for n in e}
        missing = [n for n in self.path if n not in covered]
        if missing:
            problems.append(f"cover misses path nodes {missing}")
        if self.cover and not _edges_connected(self.cover):
            problems.append("cover is not connected")
        return problems


def _edges_connected(edges: frozenset[Edge]) -> bool:
    nodes = {n for e in edges for n in e}
    adj: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    start = next(iter(nodes))
    return len(_bfs_dist(adj, [start])) == len(nodes)


def _validate_pair(inst: CdsInstance, e: Edge, path: Sequence[str]) -> None:
    qedges = set(inst.qualified_node_edges())
    if e not in qedges:
        raise InstanceError(f"{e} is not a qualified edge of {inst.name!r}")
    if not path or e[0] not in path or e[1] not in path:
        raise InstanceError("both endpoints of the internal edge must lie on the path")
    uedges = {frozenset(x) for x in inst.unqualified_node_edges()}
    if len(set(path)) != len(path):
        raise InstanceError("path nodes must be distinct")
    for a, b in zip(path, path[1:]):
        if frozenset((a, b)) not in uedges:
            raise InstanceError(f"path step {a}-{b} is not an unqualified edge")


def min_connected_edge_cover(
    inst: CdsInstance,
    e: Edge,
    path: Sequence[str],
    force_exact: bool = False,
    exact_edge_limit: int = 20,
) -> CoverWitness | None:
    """Minimum connected qualified edge cover for (e, P); None means infinite.

    Branch and bound over qualified edges grown outward from ``e`` (so every
    explored set is connected by construction), seeded with a greedy cover
    as the initial upper bound. Exact; components with more than
    ``exact_edge_limit`` qualified edges are refused unless ``force_exact``.
    """
    _validate_pair(inst, e, path)
    return _cover_search(inst, e, tuple(path), None, force_exact, exact_edge_limit)


def _cover_search(
    inst: CdsInstance,
    e: Edge,
    path: tuple[str, ...],
    size_cap: int | None,
    force_exact: bool,
    exact_edge_limit: int,
) -> CoverWitness | None:
    qadj = inst.qualified_adjacency()
    target = set(path)
    comp = set(_bfs_dist(qadj, [e[0]]))
    if not target <= comp:
        return None
    comp_edges = sorted(
        (edge for edge in inst.qualified_node_edges() if edge[0] in comp),
        key=lambda edge: (node_key(edge[0]), node_key(edge[1])),
    )
    if len(comp_edges) > exact_edge_limit and not force_exact:
        raise CoverSearchLimit(
            f"component has {len(comp_edges)} qualified edges (limit {exact_edge_limit}); "
            "pass force_exact=True to search anyway"
        )
    incident: dict[str, list[Edge]] = {n: [] for n in comp}
    for edge in comp_edges:
        incident[edge[0]].append(edge)
        incident[edge[1]].append(edge)

    dist_to = {w: _bfs_dist(qadj, [w]) for w in target}

    def lower_bound(m_size: int, tree: set[str]) -> float:
        # tree == set of nodes covered by the current edge set
        uncovered = target - tree
        if not uncovered:
            return m_size
        far = max(min(dist_to[w][t] for t in tree) for w in uncovered)
        return m_size + max(far, -(-len(uncovered) // 2))

    def greedy() -> list[Edge] | None:
        m = [e]
        in_m = {e}
        tree = set(e)
        while not target <= tree:
            cands = {edge for n in tree for edge in incident[n] if edge not in in_m}
            if not cands:
                return None
            best = None
            best_score = None
            for edge in sorted(cands):
                gain = len((set(edge) - tree) & target)
                new_node = edge[0] if edge[0] not in tree else edge[1]
                near = min(
                    (dist_to[w][new_node] for w in target - tree if new_node in dist_to[w]),
                    default=0,
                )
                score = (-gain, near, edge)
                if best_score is None or score < best_score:
                    best_score = score
                    best = edge
            m.append(best)
            in_m.add(best)
            tree.update(best)
        return m

    seed = greedy()
    best_size = inf if seed is None else len(seed)
    best_cover = None if seed is None else tuple(sorted(seed))
    if size_cap is not None and best_size > size_cap:
        best_size, best_cover = size_cap + 1, None

    visited: set[frozenset[Edge]] = set()

    def dfs(m: frozenset[Edge], tree: set[str]) -> None:
        nonlocal best_size, best_cover
        if target <= tree:
            key = tuple(sorted(m))
            if len(m) < best_size or (len(m) == best_size and (best_cover is None or key < best_cover)):
                best_size, best_cover = len(m), key
            return
        if lower_bound(len(m), tree) > best_size:
            return
        expansions = sorted({edge for n in tree for edge in incident[n] if edge not in m})
        for edge in expansions:
            m2 = m | {edge}
            if m2 in visited:
                continue
            visited.add(m2)
            dfs(m2, tree | set(edge))

    dfs(frozenset([e]), set(e))
    if best_cover is None:
        return None
    return CoverWitness(edge=e, path=path, cover=frozenset(best_cover))


@dataclass(frozen=True)
class RhoResult:
    value: int | None  # None encodes +infinity
    witness: CoverWitness | None

    @property
    def is_infinite(self) -> bool:
        return self.value is None


def rho(
    inst: CdsInstance,
    max_path_len: int | None = None,
    force_exact: bool = False,
    exact_edge_limit: int = 20,
) -> RhoResult:
    """min over all (e, P) of the connected edge cover size, with witness.

    Candidates are scanned in lexicographic order and the running best size
    is used to prune later cover searches, so the returned witness is the
    lexicographically least among minimum-size ones regardless of any
    evaluation order.
    """
    best: CoverWitness | None = None
    for e, path in internal_qualified_edge_candidates(inst, max_path_len):
        cap = None if best is None else best.size - 1
        if cap is not None and cap < 1:
            break
        w = _cover_search(inst, e, path, cap, force_exact, exact_edge_limit)
        if w is not None and (best is None or w.size < best.size):
            best = w
    if best is None:
        return RhoResult(None, None)
    return RhoResult(best.size, best)


# -- instance generators --------------------------------------------------------


def random_instance(
    seed: int,
    a_count: int,
    b_count: int,
    shape: str,
    unqualified_density: float,
    name: str | None = None,
) -> CdsInstance:
    """Seeded instance whose qualified edges form exactly one path or cycle.

    Unqualified edges are sampled independently at the given density among
    the non-qualified pairs, then repaired (preferring partners that are
    themselves uncovered) so every node touches at least one unqualified
    edge. Deterministic function of the arguments.
    """
    if shape not in ("path", "cycle"):
        raise InstanceError(f"unknown shape {shape!r}")
    if not 0.0 <= unqualified_density <= 1.0:
        raise InstanceError("unqualified_density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    a_order = [int(v) + 1 for v in rng.permutation(a_count)]
    b_order = [int(v) + 1 for v in rng.permutation(b_count)]

    if shape == "path":
        if abs(a_count - b_count) > 1:
            raise InstanceError("a path must alternate sides: |a_count - b_count| <= 1")
        if a_count > b_count:
            start_a = True
        elif b_count > a_count:
            start_a = False
        else:
            start_a = bool(rng.integers(0, 2))
        order: list[str] = []
        ai, bi = 0, 0
        take_a = start_a
        while ai < a_count or bi < b_count:
            if take_a and ai < a_count:
                order.append(a_node(a_order[ai]))
                ai += 1
            elif not take_a and bi < b_count:
                order.append(b_node(b_order[bi]))
                bi += 1
            take_a = not take_a
        qualified = {_pair(u, v) for u, v in zip(order, order[1:])}
    else:
        if a_count != b_count or a_count < 2:
            raise InstanceError("a qualified cycle needs a_count == b_count >= 2")
        order = []
        for x, y in zip(a_order, b_order):
            order.append(a_node(x))
            order.append(b_node(y))
        qualified = {_pair(u, v) for u, v in zip(order, order[1:])}
        qualified.add(_pair(order[-1], order[0]))

    non_qualified = [
        (x, y)
        for x in range(1, a_count + 1)
        for y in range(1, b_count + 1)
        if (x, y) not in qualified
    ]
    draws = rng.random(len(non_qualified))
    unqualified = {p for p, r in zip(non_qualified, draws) if r < unqualified_density}

    inst = CdsInstance(
        name=name or f"random-{shape}-{seed}",
        a_count=a_count,
        b_count=b_count,
        qualified=frozenset(qualified),
        unqualified=frozenset(unqualified),
    )
    for pick in _minimal_repair(inst, rng):
        unqualified.add(pick)
    return CdsInstance(inst.name, a_count, b_count, frozenset(qualified), frozenset(unqualified))


def _minimal_repair(inst: CdsInstance, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Minimum set of addable unqualified edges covering every uncovered node.

    Maximum matching between uncovered A- and B-nodes (over pairs free for
    an unqualified edge) pairs up as many as possible; the rest each take
    one arbitrary free partner. |lacking| - |matching| edges is optimal for
    covering the lacking set.
    """
    lacking = inst.nodes_without_unqualified()
    if not lacking:
        return []
    taken = inst.qualified | inst.unqualified
    lack_a = [int(n[1:]) for n in lacking if n[0] == "A"]
    lack_b = [int(n[1:]) for n in lacking if n[0] == "B"]
    adj = {x: [y for y in lack_b if (x, y) not in taken] for x in lack_a}
    match_of_b: dict[int, int] = {}

    def augment(x: int, visited: set[int]) -> bool:
        for y in adj[x]:
            if y in visited:
                continue
            visited.add(y)
            if y not in match_of_b or augment(match_of_b[y], visited):
                match_of_b[y] = x
                return True
        return False

    for x in lack_a:
        augment(x, set())
    added = [(x, y) for y, x in sorted(match_of_b.items())]
    covered = {a_node(x) for x, _ in added} | {b_node(y) for _, y in added}
    for node in lacking:
        if node in covered:
            continue
        pool = [p for p in _unqualified_pool(inst, node) if p not in added]
        if not pool:
            raise InstanceError(f"cannot give node {node} an unqualified edge")
        added.append(pool[int(rng.integers(0, len(pool)))])
    return added


def _pair(u: str, v: str) -> tuple[int, int]:
    if u[0] == "A":
        return (int(u[1:]), int(v[1:]))
    return (int(v[1:]), int(u[1:]))


def _other_end(pair: tuple[int, int], node: str) -> str:
    a, b = edge_nodes(pair)
    return b if node == a else a


def _unqualified_pool(inst: CdsInstance, node: str) -> list[tuple[int, int]]:
    taken = inst.qualified | inst.unqualified
    if node[0] == "A":
        x = int(node[1:])
        return [(x, y) for y in range(1, inst.b_count + 1) if (x, y) not in taken]
    y = int(node[1:])
    return [(x, y) for x in range(1, inst.a_count + 1) if (x, y) not in taken]


def disjoint_union(
    first: CdsInstance,
    second: CdsInstance,
    cross_density: float = 0.0,
    seed: int = 0,
    name: str | None = None,
) -> CdsInstance:
    """Combine two instances side by side, optionally sampling cross
    unqualified edges between them (qualified edges never cross)."""
    rng = np.random.default_rng(seed)
    ax, by = first.a_count, first.b_count
    qualified = set(first.qualified)
    unqualified = set(first.unqualified)
    for x, y in second.qualified:
        qualified.add((x + ax, y + by))
    for x, y in second.unqualified:
        unqualified.add((x + ax, y + by))
    cross = [
        (x, y + by) for x in range(1, ax + 1) for y in range(1, second.b_count + 1)
    ] + [(x + ax, y) for x in range(1, second.a_count + 1) for y in range(1, by + 1)]
    draws = rng.random(len(cross))
    for p, r in zip(cross, draws):
        if r < cross_density:
            unqualified.add(p)
    return CdsInstance(
        name=name or f"{first.name}+{second.name}",
        a_count=ax + second.a_count,
        b_count=by + second.b_count,
        qualified=frozenset(qualified),
        unqualified=frozenset(unqualified),
    )
