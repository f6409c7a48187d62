"""Rate-optimal scheme construction for path/cycle instances.

For an instance whose qualified components are all paths or cycles with
finite covering parameter rho, the construction uses L = rho-1 secret
symbols and N = rho signal symbols per node over the smallest prime field
of size >= 2*rho-2. Noise symbols slide along each component one position
per node, each noise symbol is mixed with one payload (a plain secret
symbol, or on the wrap-around part of a cycle a generic Cauchy combination),
and the payload coefficient at a node is the index of the node's
unqualified class inside the subgraph induced by that symbol's holders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import FieldMatrix, PrimeField, next_prime
from .graph import CdsInstance, QualifiedComponent, node_key, qualified_components, rho
from .linalg import cauchy_matrix
from .scheme import LinearScheme


class SynthesisError(ValueError):
    """The construction's preconditions do not hold for this instance."""


def choose_field(rho_value: int | None) -> PrimeField:
    """Smallest prime no smaller than 2*rho - 2."""
    if rho_value is None:
        raise SynthesisError(
            "rho is infinite: the capacity-1/2 regime is out of scope for this construction"
        )
    if rho_value < 5:
        raise SynthesisError(f"rho must be at least 5, got {rho_value}")
    return PrimeField(next_prime(2 * rho_value - 2))


@dataclass(frozen=True)
class NoiseLayout:
    """Sliding-window assignment of component-local noise indices.

    Path components use indices 0..n+rho-2 (index 0 carries no payload);
    node i holds (i-1, ..., i+rho-2). Cycle components use indices 1..n
    cyclically; node i holds (i, i+1, ..., i+rho-1) with wrap-around.
    Consecutive nodes share exactly rho-1 indices, except on a cycle with
    exactly rho nodes, whose windows all coincide.
    """

    kind: str
    windows: dict[str, tuple[int, ...]]  # node -> ordered local indices
    symbol_count: int

    def holders(self, j: int) -> list[str]:
        return [n for n, w in self.windows.items() if j in w]


def noise_layout(component: QualifiedComponent, rho_value: int) -> NoiseLayout:
    if component.kind not in ("path", "cycle"):
        raise SynthesisError(f"component of kind {component.kind!r} has no layout")
    trav = component.traversal
    n = len(trav)
    if component.kind == "path":
        windows = {
            node: tuple(range(i - 1, i + rho_value - 1)) for i, node in enumerate(trav, start=1)
        }
        return NoiseLayout("path", windows, n + rho_value - 1)
    if n < rho_value:
        raise SynthesisError(
            f"cycle with {n} nodes is shorter than rho={rho_value}; the construction is undefined"
        )
    windows = {
        node: tuple(((i - 1 + k) % n) + 1 for k in range(rho_value))
        for i, node in enumerate(trav, start=1)
    }
    return NoiseLayout("cycle", windows, n)


@dataclass(frozen=True)
class CoefficientTable:
    """Per noise symbol: the unqualified classes of its holders and payloads.

    ``coefficients[j][node]`` is the 1-based index of the node's unqualified
    class inside the subgraph induced by the holders of local symbol j
    (classes ordered by their minimal node id, A-nodes first); nodes of the
    same class get the same coefficient so unqualified neighbours transmit
    identical slots. ``payloads[j]`` is ("s", i) for plain secret s_i,
    ("l", i) for the i-th Cauchy combination, or None for the unused z_0.
    """

    coefficients: dict[int, dict[str, int]]
    payloads: dict[int, tuple[str, int] | None]
    classes: dict[int, tuple[tuple[str, ...], ...]]


def _secret_index(j: int, rho_value: int) -> int:
    # representative of j mod (rho-1) in {1, ..., rho-1}
    return ((j - 1) % (rho_value - 1)) + 1


def coefficient_table(
    inst: CdsInstance,
    component: QualifiedComponent,
    layout: NoiseLayout,
    rho_value: int,
) -> CoefficientTable:
    uadj = inst.unqualified_adjacency()
    coefficients: dict[int, dict[str, int]] = {}
    payloads: dict[int, tuple[str, int] | None] = {}
    classes: dict[int, tuple[tuple[str, ...], ...]] = {}
    indices = range(0, layout.symbol_count) if layout.kind == "path" else range(1, layout.symbol_count + 1)
    for j in indices:
        holders = set(layout.holders(j))
        if layout.kind == "path" and j == 0:
            coefficients[0] = {}
            payloads[0] = None
            classes[0] = ()
            continue
        groups = _unqualified_classes(holders, uadj)
        coefficients[j] = {node: k for k, group in enumerate(groups, start=1) for node in group}
        classes[j] = groups
        if layout.kind == "cycle" and j <= rho_value - 1:
            payloads[j] = ("l", j)
        else:
            payloads[j] = ("s", _secret_index(j, rho_value))
    return CoefficientTable(coefficients, payloads, classes)


def _unqualified_classes(
    holders: set[str], uadj: dict[str, set[str]]
) -> tuple[tuple[str, ...], ...]:
    """Unqualified connected components of the induced subgraph, ordered by
    minimal node id; isolated holders are singleton classes."""
    seen: set[str] = set()
    groups = []
    for start in sorted(holders, key=node_key):
        if start in seen:
            continue
        group = []
        stack = [start]
        seen.add(start)
        while stack:
            cur = stack.pop()
            group.append(cur)
            for nb in uadj[cur]:
                if nb in holders and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        groups.append(tuple(sorted(group, key=node_key)))
    groups.sort(key=lambda g: node_key(g[0]))
    return tuple(groups)


@dataclass(frozen=True)
class ComponentPlan:
    component: QualifiedComponent
    layout: NoiseLayout
    table: CoefficientTable
    col_offset: int

    def local_col(self, j: int) -> int:
        return j if self.layout.kind == "path" else j - 1


@dataclass(frozen=True)
class SynthesisPlan:
    instance: CdsInstance
    rho_value: int
    field: PrimeField
    L: int
    N: int
    L_Z: int
    cauchy: FieldMatrix
    components: tuple[ComponentPlan, ...]

    def to_scheme(self) -> LinearScheme:
        precoders = {}
        for comp in self.components:
            for node in comp.component.nodes:
                f_rows = np.zeros((self.N, self.L), dtype=np.int64)
                h_rows = np.zeros((self.N, self.L_Z), dtype=np.int64)
                for r, j in enumerate(comp.layout.windows[node]):
                    h_rows[r, comp.col_offset + comp.local_col(j)] = 1
                    payload = comp.table.payloads[j]
                    if payload is None:
                        continue
                    k = comp.table.coefficients[j][node]
                    kind, idx = payload
                    if kind == "s":
                        f_rows[r, idx - 1] = k
                    else:
                        f_rows[r] = np.mod(k * self.cauchy.array[idx - 1], self.field.p)
                precoders[node] = (
                    FieldMatrix(f_rows, self.field),
                    FieldMatrix(h_rows, self.field),
                )
        return LinearScheme(
            field=self.field,
            L=self.L,
            L_Z=self.L_Z,
            N=self.N,
            precoders=precoders,
            name=f"synth-{self.instance.name}" if self.instance.name else "synth",
        )


def synthesize_plan(inst: CdsInstance, force_exact: bool = False) -> SynthesisPlan:
    """Layouts and coefficient tables for the whole instance.

    Raises SynthesisError when the construction does not apply: some
    component has shape "other", rho is infinite, or a cycle is shorter
    than rho.
    """
    comps = qualified_components(inst)
    bad = [c for c in comps if c.kind == "other"]
    if bad:
        raise SynthesisError(
            f"qualified component containing {bad[0].nodes[0]} is neither a path nor a cycle"
        )
    r = rho(inst, force_exact=force_exact)
    if r.is_infinite:
        raise SynthesisError(
            "rho is infinite: no internal qualified edge within any qualified component "
            "(the capacity-1/2 regime); nothing to synthesize"
        )
    rho_value = r.value
    field = choose_field(rho_value)
    short = [c for c in comps if c.kind == "cycle" and len(c.nodes) < rho_value]
    if short:
        raise SynthesisError(
            f"cycle component with {len(short[0].nodes)} nodes is shorter than rho={rho_value}"
        )
    L, N = rho_value - 1, rho_value
    cauchy = cauchy_matrix(
        xs=list(range(0, rho_value - 1)),
        ys=list(range(rho_value - 1, 2 * rho_value - 2)),
        field=field,
    )
    plans = []
    offset = 0
    for comp in comps:
        layout = noise_layout(comp, rho_value)
        table = coefficient_table(inst, comp, layout, rho_value)
        plans.append(ComponentPlan(comp, layout, table, offset))
        offset += layout.symbol_count
    plan = SynthesisPlan(
        instance=inst,
        rho_value=rho_value,
        field=field,
        L=L,
        N=N,
        L_Z=offset,
        cauchy=cauchy,
        components=tuple(plans),
    )
    _structural_certificate(inst, plan)
    return plan


def synthesize(inst: CdsInstance, force_exact: bool = False) -> LinearScheme:
    """Emit the rate-(rho-1)/(2*rho) scheme for a path/cycle instance."""
    return synthesize_plan(inst, force_exact=force_exact).to_scheme()


def _structural_certificate(inst: CdsInstance, plan: SynthesisPlan) -> None:
    """Structural decodability facts, asserted before any verifier runs.

    Every noise symbol appears at <= rho nodes; the two ends of a qualified
    edge share exactly rho-1 symbols; and for each shared symbol the two
    coefficients differ. The last fact holds because equal coefficients
    would put both ends in one unqualified class of the induced subgraph,
    yielding an unqualified path P between them whose holders form a
    qualified-connected span containing a connected cover of P with at most
    rho-1 edges, contradicting the minimality of rho.
    """
    rho_value = plan.rho_value
    qedges = inst.qualified_node_edges()
    for comp in plan.components:
        layout, table = comp.layout, comp.table
        for j in table.coefficients:
            if len(layout.holders(j)) > rho_value:
                raise SynthesisError(f"noise symbol {j} appears at more than rho nodes")
        comp_nodes = set(comp.component.nodes)
        # windows of a cycle with exactly rho nodes coincide entirely, so its
        # edges share rho symbols instead of rho-1; decoding still works since
        # the rho-1 generic combinations alone are invertible
        expected_shared = rho_value - 1
        if layout.kind == "cycle" and len(comp_nodes) == rho_value:
            expected_shared = rho_value
        for u, v in qedges:
            if u not in comp_nodes:
                continue
            shared = [j for j in layout.windows[u] if j in layout.windows[v]]
            if len(shared) != expected_shared:
                raise SynthesisError(
                    f"qualified edge {u}-{v} shares {len(shared)} noise symbols, "
                    f"expected {expected_shared}"
                )
            for j in shared:
                if table.coefficients[j][u] == table.coefficients[j][v]:
                    raise SynthesisError(
                        f"qualified edge {u}-{v} has equal coefficients on shared symbol {j}"
                    )


def render_plan(plan: SynthesisPlan) -> str:
    """Human-readable rendering of each node's signal as symbolic sums."""
    lines = []
    for q, comp in enumerate(plan.components, start=1):
        lines.append(f"component {q} ({comp.layout.kind}): " + "-".join(comp.component.traversal))
        for node in comp.component.traversal:
            slots = []
            for j in comp.layout.windows[node]:
                z = f"z{q}_{j}"
                payload = comp.table.payloads[j]
                if payload is None:
                    slots.append(z)
                    continue
                k = comp.table.coefficients[j][node]
                kind, idx = payload
                sym = f"s{idx}" if kind == "s" else f"l{idx}"
                slots.append(f"{sym}+{z}" if k == 1 else f"{k}*{sym}+{z}")
            lines.append(f"  {node}: (" + "; ".join(slots) + ")")
    return "\n".join(lines) + "\n"
