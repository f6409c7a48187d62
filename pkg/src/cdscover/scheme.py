"""Vector linear schemes and their two independent verifiers.

A scheme assigns every node v a secret precoder F_v (N x L) and a noise
precoder H_v (N x L_Z); the transmitted signal is F_v S + H_v Z. The linear
verifier checks, per edge, the alignment conditions on the overlap of the
two noise row spaces: full-rank secret difference on qualified edges,
entry-wise equality on unqualified ones. The entropic oracle re-checks the
same edges by brute-force enumeration of secrets and noise, sharing no code
path with the linear conditions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .fields import FieldError, FieldMatrix, PrimeField
from .graph import CdsInstance, a_node, b_node, node_key
from .linalg import rank, rank_rref, rowspace_intersection, rref_with_transform


class SchemeError(ValueError):
    """Malformed scheme data or scheme/instance shape mismatch."""


@dataclass(frozen=True)
class LinearScheme:
    """Per-node precoders plus the global parameters (p, L, L_Z, N)."""

    field: PrimeField
    L: int
    L_Z: int
    N: int
    precoders: dict[str, tuple[FieldMatrix, FieldMatrix]]  # node -> (F, H)
    name: str = ""

    def f_of(self, node: str) -> FieldMatrix:
        return self.precoders[node][0]

    def h_of(self, node: str) -> FieldMatrix:
        return self.precoders[node][1]

    def check_shapes(self) -> None:
        for node, (f, h) in self.precoders.items():
            if f.shape != (self.N, self.L):
                raise SchemeError(f"F_{node} has shape {f.shape}, expected {(self.N, self.L)}")
            if h.shape != (self.N, self.L_Z):
                raise SchemeError(f"H_{node} has shape {h.shape}, expected {(self.N, self.L_Z)}")
            if f.field != self.field or h.field != self.field:
                raise SchemeError(f"precoders of {node} are over the wrong field")

    def check_for_instance(self, inst: CdsInstance) -> None:
        self.check_shapes()
        missing = [n for n in inst.nodes() if n not in self.precoders]
        if missing:
            raise SchemeError(f"scheme lacks precoders for {missing}")


def rate(scheme: LinearScheme) -> Fraction:
    """Secret symbols disclosed per symbol of total communication, L/(2N)."""
    if scheme.N <= 0:
        raise SchemeError("N must be positive")
    return Fraction(scheme.L, 2 * scheme.N)


# -- scheme files ---------------------------------------------------------------


def _matrix_entries(obj, what: str, p: int) -> list[list[int]]:
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise SchemeError(f"{what} must be a list of rows")
    for r in obj:
        for v in r:
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < p:
                raise SchemeError(f"{what} entry {v!r} is not an integer in [0, {p})")
    return obj


def parse_scheme(text: str) -> LinearScheme:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemeError(f"malformed JSON: {e.msg} (line {e.lineno}, column {e.colno})") from e
    if not isinstance(obj, dict):
        raise SchemeError("scheme file must contain a JSON object")
    for key in ("p", "L", "Lz", "N"):
        if not isinstance(obj.get(key), int) or isinstance(obj.get(key), bool):
            raise SchemeError(f"field '{key}' must be an integer")
    try:
        fld = PrimeField(obj["p"])
    except FieldError as e:
        raise SchemeError(str(e)) from e
    L, L_Z, N = obj["L"], obj["Lz"], obj["N"]
    nodes = obj.get("nodes")
    if not isinstance(nodes, dict):
        raise SchemeError("field 'nodes' must be an object mapping node ids to precoders")
    precoders = {}
    for node, entry in nodes.items():
        if not isinstance(entry, dict) or "F" not in entry or "H" not in entry:
            raise SchemeError(f"node {node} must have 'F' and 'H' matrices")
        f = FieldMatrix.from_rows(_matrix_entries(entry["F"], f"F_{node}", fld.p), fld, cols=L)
        h = FieldMatrix.from_rows(_matrix_entries(entry["H"], f"H_{node}", fld.p), fld, cols=L_Z)
        precoders[node] = (f, h)
    scheme = LinearScheme(
        field=fld, L=L, L_Z=L_Z, N=N, precoders=precoders, name=obj.get("name", "")
    )
    scheme.check_shapes()
    return scheme


def serialize_scheme(scheme: LinearScheme) -> str:
    nodes = {
        node: {"F": f.to_lists(), "H": h.to_lists()}
        for node, (f, h) in sorted(scheme.precoders.items(), key=lambda kv: node_key(kv[0]))
    }
    obj = {
        "name": scheme.name,
        "p": scheme.field.p,
        "L": scheme.L,
        "Lz": scheme.L_Z,
        "N": scheme.N,
        "nodes": nodes,
    }
    return json.dumps(obj, indent=2) + "\n"


def load_scheme(path) -> LinearScheme:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scheme(fh.read())


# -- linear verifier ------------------------------------------------------------


@dataclass(frozen=True)
class CheckRecord:
    subject: str  # "A1" for node checks, "A1-B2" for edge checks
    kind: str  # "noise-rank" | "qualified" | "unqualified" | "noise-alignment"
    passed: bool
    overlap_dim: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "kind": self.kind,
            "passed": self.passed,
            "overlap_dim": self.overlap_dim,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class VerificationReport:
    records: tuple[CheckRecord, ...]

    @property
    def overall(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_json(self) -> dict:
        return {"overall": self.overall, "records": [r.to_json() for r in self.records]}


def verify_linear(inst: CdsInstance, scheme: LinearScheme) -> VerificationReport:
    """Check the linear feasibility conditions on every edge.

    For each edge {v, u} the overlap of the noise row spaces is identified
    by coefficient matrices P_v, P_u with P_v H_v = P_u H_u. A qualified
    edge passes iff rank(P_v F_v - P_u F_u) = L (the overlap must then have
    dimension >= L, recorded separately as the noise-alignment datum); an
    unqualified edge passes iff P_v F_v = P_u F_u entry-wise. Each noise
    precoder must also have full row rank. The checks do not depend on the
    choice of P: the rows of (P_v | P_u) span the full solution set of
    P_v H_v = P_u H_u modulo left-null contributions, so any other
    full-rank choice differs by an invertible row transform.
    """
    scheme.check_for_instance(inst)
    records: list[CheckRecord] = []
    for node in sorted(inst.nodes(), key=node_key):
        h = scheme.h_of(node)
        r = rank(h)
        records.append(
            CheckRecord(
                subject=node,
                kind="noise-rank",
                passed=r == scheme.N,
                detail=f"rank(H)={r}, N={scheme.N}",
            )
        )
    for (x, y), kind in inst.edges_with_kind():
        va, vb = a_node(x), b_node(y)
        inter = rowspace_intersection(scheme.h_of(va), scheme.h_of(vb))
        d = inter.basis.rows
        diff = (inter.p_a @ scheme.f_of(va)) - (inter.p_b @ scheme.f_of(vb))
        subject = f"{va}-{vb}"
        if kind == "qualified":
            r = rank(diff)
            records.append(
                CheckRecord(
                    subject=subject,
                    kind="qualified",
                    passed=r == scheme.L,
                    overlap_dim=d,
                    detail=f"rank(PvFv - PuFu)={r}, L={scheme.L}",
                )
            )
            records.append(
                CheckRecord(
                    subject=subject,
                    kind="noise-alignment",
                    passed=d >= scheme.L,
                    overlap_dim=d,
                    detail=f"overlap dim {d} vs L={scheme.L}",
                )
            )
        else:
            ok = diff.is_zero()
            records.append(
                CheckRecord(
                    subject=subject,
                    kind="unqualified",
                    passed=ok,
                    overlap_dim=d,
                    detail="secret projections agree on the noise overlap"
                    if ok
                    else "secret projections differ on the noise overlap",
                )
            )
    return VerificationReport(tuple(records))


# -- entropic oracle ------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    edge: tuple[int, int]
    kind: str
    status: str  # "pass" | "fail" | "not-checked"
    states: int
    detail: str = ""
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def to_json(self) -> dict:
        return {
            "edge": list(self.edge),
            "kind": self.kind,
            "status": self.status,
            "states": self.states,
            "detail": self.detail,
            "counterexample": self.counterexample,
        }


DEFAULT_ORACLE_BUDGET = 10_000_000


def _all_tuples(p: int, n: int) -> np.ndarray:
    """All p^n tuples over F_p, one per row, lexicographic order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(p, dtype=np.int64)] * n, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def entropic_oracle_edge(
    inst: CdsInstance,
    scheme: LinearScheme,
    edge: tuple[int, int],
    budget: int = DEFAULT_ORACLE_BUDGET,
) -> OracleResult:
    """Brute-force entropy check of one edge by exhaustive enumeration.

    Enumerates every secret and every assignment of the noise coordinates
    actually referenced by the two noise precoders (unreferenced coordinates
    are independent of both signals, so marginalizing over them is exact)
    and tabulates how often each signal pair occurs with each secret. A
    qualified edge passes iff every realized signal pair is consistent with
    exactly one secret; an unqualified edge passes iff, for every realized
    signal pair, the count is identical across all p^L secrets. Never
    silently passes: when p^(L+m) exceeds the budget the result is an
    explicit "not-checked".
    """
    scheme.check_for_instance(inst)
    if edge in inst.qualified:
        kind = "qualified"
    elif edge in inst.unqualified:
        kind = "unqualified"
    else:
        raise SchemeError(f"({edge[0]},{edge[1]}) is not an edge of {inst.name!r}")
    va, vb = a_node(edge[0]), b_node(edge[1])
    p = scheme.field.p
    f_stack = np.vstack([scheme.f_of(va).array, scheme.f_of(vb).array])
    h_stack = np.vstack([scheme.h_of(va).array, scheme.h_of(vb).array])
    ref_cols = np.nonzero(h_stack.any(axis=0))[0]
    m = len(ref_cols)
    states = p ** (scheme.L + m)
    if states > budget:
        return OracleResult(
            edge=edge,
            kind=kind,
            status="not-checked",
            states=states,
            detail=f"p^(L+m) = {p}^{scheme.L + m} = {states} exceeds budget {budget}",
        )
    h_ref = h_stack[:, ref_cols]
    secrets = _all_tuples(p, scheme.L)
    noises = _all_tuples(p, m)
    hz = np.mod(noises @ h_ref.T, p)  # p^m x 2N
    fs = np.mod(secrets @ f_stack.T, p)  # p^L x 2N
    n_secrets = secrets.shape[0]
    width = 2 * scheme.N
    if p**width < 2**62:
        # encode each signal pair as one base-p integer; counting is a bincount
        powers = p ** np.arange(width, dtype=np.int64)
        keys = np.empty((n_secrets, hz.shape[0]), dtype=np.int64)
        for s_idx in range(n_secrets):
            keys[s_idx] = np.mod(hz + fs[s_idx], p) @ powers
        uniq, inv = np.unique(keys.ravel(), return_inverse=True)
        s_of = np.repeat(np.arange(n_secrets, dtype=np.int64), hz.shape[0])
        counts = np.bincount(inv * n_secrets + s_of, minlength=len(uniq) * n_secrets)
        counts = counts.reshape(len(uniq), n_secrets)

        def signal_values(k: int) -> list[int]:
            key = int(uniq[k])
            return [(key // int(powers[i])) % p for i in range(width)]

    else:
        # signals too wide for integer keys: accumulate per-row byte keys
        table: dict[bytes, np.ndarray] = {}
        for s_idx in range(n_secrets):
            sig = np.mod(hz + fs[s_idx], p).astype(np.uint8)
            rows, cnt = np.unique(sig, axis=0, return_counts=True)
            for row, c in zip(rows, cnt):
                vec = table.setdefault(row.tobytes(), np.zeros(n_secrets, dtype=np.int64))
                vec[s_idx] += c
        uniq_bytes = list(table)
        counts = np.stack([table[k] for k in uniq_bytes]) if table else np.zeros((0, n_secrets), np.int64)

        def signal_values(k: int) -> list[int]:
            return list(uniq_bytes[k])

    def signal_pair(k: int) -> dict:
        vals = signal_values(k)
        return {va: vals[: scheme.N], vb: vals[scheme.N :]}

    if kind == "qualified":
        consistent = counts > 0
        bad = np.nonzero(consistent.sum(axis=1) != 1)[0]
        if bad.size:
            k = int(bad[0])
            witnesses = np.nonzero(consistent[k])[0][:2]
            return OracleResult(
                edge=edge,
                kind=kind,
                status="fail",
                states=states,
                detail="a signal pair is consistent with more than one secret",
                counterexample={
                    "signals": signal_pair(k),
                    "secrets": [secrets[i].tolist() for i in witnesses],
                },
            )
        return OracleResult(edge=edge, kind=kind, status="pass", states=states)

    bad = np.nonzero(counts.max(axis=1) != counts.min(axis=1))[0]
    if bad.size:
        k = int(bad[0])
        vec = counts[k]
        lo, hi = int(np.argmin(vec)), int(np.argmax(vec))
        return OracleResult(
            edge=edge,
            kind=kind,
            status="fail",
            states=states,
            detail="signal pair counts differ across secrets",
            counterexample={
                "signals": signal_pair(k),
                "secret_low": secrets[lo].tolist(),
                "count_low": int(vec[lo]),
                "secret_high": secrets[hi].tolist(),
                "count_high": int(vec[hi]),
            },
        )
    return OracleResult(edge=edge, kind=kind, status="pass", states=states)


def entropic_oracle_all(
    inst: CdsInstance, scheme: LinearScheme, budget: int = DEFAULT_ORACLE_BUDGET
) -> list[OracleResult]:
    return [entropic_oracle_edge(inst, scheme, e, budget) for e, _ in inst.edges_with_kind()]


# -- simulation -----------------------------------------------------------------


@dataclass(frozen=True)
class EdgeSimulation:
    edge: tuple[int, int]
    kind: str
    trials: int
    decode_successes: int | None  # qualified edges only
    decodable: bool | None
    distinct_signal_pairs: int | None  # unqualified edges only
    secret_count_spread: int | None

    @property
    def success_frequency(self) -> float | None:
        if self.decode_successes is None or self.trials == 0:
            return None
        return self.decode_successes / self.trials

    def to_json(self) -> dict:
        return {
            "edge": list(self.edge),
            "kind": self.kind,
            "trials": self.trials,
            "decode_successes": self.decode_successes,
            "decodable": self.decodable,
            "success_frequency": self.success_frequency,
            "distinct_signal_pairs": self.distinct_signal_pairs,
            "secret_count_spread": self.secret_count_spread,
        }


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    seed: int
    edges: tuple[EdgeSimulation, ...]

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "edges": [e.to_json() for e in self.edges],
        }


def simulate(inst: CdsInstance, scheme: LinearScheme, seed: int, trials: int) -> SimulationReport:
    """Monte Carlo smoke test: sample (S, Z), decode on qualified edges,
    tabulate empirical secret-given-signals counts on unqualified edges.

    Deterministic under the seed. On a scheme passing the linear verifier,
    qualified decode frequency is exactly 1.0; the decoder inverts the
    full-rank secret difference on the noise overlap.
    """
    scheme.check_for_instance(inst)
    if trials == 0:
        return SimulationReport(trials=0, seed=seed, edges=())
    rng = np.random.default_rng(seed)
    p = scheme.field.p
    s_draws = rng.integers(0, p, size=(trials, scheme.L), dtype=np.int64)
    z_draws = rng.integers(0, p, size=(trials, scheme.L_Z), dtype=np.int64)
    sims: list[EdgeSimulation] = []
    for (x, y), kind in inst.edges_with_kind():
        va, vb = a_node(x), b_node(y)
        sig_a = np.mod(s_draws @ scheme.f_of(va).array.T + z_draws @ scheme.h_of(va).array.T, p)
        sig_b = np.mod(s_draws @ scheme.f_of(vb).array.T + z_draws @ scheme.h_of(vb).array.T, p)
        if kind == "qualified":
            inter = rowspace_intersection(scheme.h_of(va), scheme.h_of(vb))
            diff = (inter.p_a @ scheme.f_of(va)) - (inter.p_b @ scheme.f_of(vb))
            r, _, _ = rank_rref(diff)
            if r < scheme.L:
                sims.append(EdgeSimulation((x, y), kind, trials, 0, False, None, None))
                continue
            red, t, pivots = rref_with_transform(diff)
            decoder = t.array[: scheme.L]  # T @ diff == [I_L; 0]
            obs = np.mod(sig_a @ inter.p_a.array.T - sig_b @ inter.p_b.array.T, p)
            decoded = np.mod(obs @ decoder.T, p)
            successes = int(np.all(decoded == s_draws, axis=1).sum())
            sims.append(EdgeSimulation((x, y), kind, trials, successes, True, None, None))
        else:
            pairs = np.hstack([sig_a, sig_b]).astype(np.uint8)
            table: dict[bytes, dict[bytes, int]] = {}
            for i in range(trials):
                k = pairs[i].tobytes()
                sk = s_draws[i].astype(np.uint8).tobytes()
                table.setdefault(k, {}).setdefault(sk, 0)
                table[k][sk] += 1
            spread = 0
            for per_secret in table.values():
                if len(per_secret) > 1:
                    spread = max(spread, max(per_secret.values()) - min(per_secret.values()))
            sims.append(
                EdgeSimulation((x, y), kind, trials, None, None, len(table), spread)
            )
    return SimulationReport(trials=trials, seed=seed, edges=tuple(sims))
