"""End-to-end orchestration: keywords -> annotated queries -> assembly ->
prediction -> winner selection -> SPARQL -> answers, plus the lower-bound
benchmark harness."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import lexicon as lexicon_mod
from .assembler import (
    BOUND_NAMES,
    build_candidate_sets,
    build_condensed_graph,
    embedding_cost_source,
    solve_qga,
)
from .errors import InfeasibleAssemblyError, UninterpretableQueryError
from .instances import build_random_graph
from .predictor import predict_missing_relations
from .sparql import emit_sparql, evaluate_bgp


@dataclass
class PipelineConfig:
    k: int = 10
    top_n: int = 5
    bound: str = "greedy"
    predict: bool = True
    fuzzy: bool = False


@dataclass
class CandidateResult:
    """Diagnostics for one annotated query's assembly attempt."""

    aq: object
    sets: object = None
    query_graph: object = None
    stats: object = None
    normalized_cost: float = math.inf
    assembled_cost: float = math.inf
    predicted_cost: float = 0.0
    infeasible_reason: str | None = None


@dataclass
class PipelineResult:
    query_graph: object
    structured_query: object
    bindings: list
    winner_index: int
    candidates: list[CandidateResult]


def _normalized_cost(q) -> float:
    edge_count = len(q.edges) + len(q.predicted_edges)
    if edge_count == 0:
        return 0.0
    return (q.total_cost + q.predicted_cost) / edge_count


def answer_keywords(tokens, kg, lexicon, table, config: PipelineConfig | None = None) -> PipelineResult:
    """Interpret a keyword token list against the store and answer it.

    Produces the top-N annotated queries, assembles each, optionally
    predicts omitted relations, picks the winner by per-edge normalized
    cost (ties: higher segmentation score, then rank), and evaluates the
    emitted query.  Raises UninterpretableQueryError when Phase-I yields
    nothing and InfeasibleAssemblyError when every candidate fails.
    """
    config = config or PipelineConfig()
    aqs = lexicon_mod.annotate(
        tokens, lexicon, k=config.k, top_n=config.top_n, fuzzy=config.fuzzy
    )
    if not aqs:
        raise UninterpretableQueryError(f"no interpretation for tokens {tokens!r}")

    # class membership is carried by the class vertices themselves, so the
    # type predicate is never a sensible implicit relation
    predictable = [p for p in kg.predicates if kg.iri_of(p) != kg.type_predicate]
    if not predictable:
        predictable = kg.predicates

    candidates: list[CandidateResult] = []
    for aq in aqs:
        cand = CandidateResult(aq=aq)
        candidates.append(cand)
        try:
            sets = build_candidate_sets(aq)
            cand.sets = sets
            graph = build_condensed_graph(sets, embedding_cost_source(table))
            q, stats = solve_qga(graph, bound=config.bound)
            cand.stats = stats
            if q is None:
                cand.infeasible_reason = "no conflict-free matching"
                continue
            if config.predict:
                q = predict_missing_relations(q, table, predictable)
            cand.query_graph = q
            cand.assembled_cost = q.total_cost
            cand.predicted_cost = q.predicted_cost
            cand.normalized_cost = _normalized_cost(q)
        except Exception as exc:  # noqa: BLE001 - reported per candidate
            cand.infeasible_reason = f"{type(exc).__name__}: {exc}"

    viable = [(i, c) for i, c in enumerate(candidates) if c.query_graph is not None]
    if not viable:
        raise InfeasibleAssemblyError(
            [c.infeasible_reason or "unknown" for c in candidates]
        )
    winner_index, winner = min(
        viable, key=lambda ic: (ic[1].normalized_cost, -ic[1].aq.segmentation_score, ic[0])
    )
    sq = emit_sparql(winner.query_graph, kg)
    bindings = evaluate_bgp(sq, kg)
    return PipelineResult(
        query_graph=winner.query_graph,
        structured_query=sq,
        bindings=bindings,
        winner_index=winner_index,
        candidates=candidates,
    )


# -- lower-bound benchmark ----------------------------------------------------


@dataclass
class BenchRow:
    instance: int
    k: int
    n: int
    m: int
    bound: str
    cost: float
    states_pushed: int
    states_popped: int
    states_pruned: int
    wall_seconds: float


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def mean_popped(self, k: int, bound: str) -> float:
        vals = [r.states_popped for r in self.rows if r.k == k and r.bound == bound]
        return sum(vals) / len(vals) if vals else math.nan

    def mean_wall(self, k: int, bound: str) -> float:
        vals = [r.wall_seconds for r in self.rows if r.k == k and r.bound == bound]
        return sum(vals) / len(vals) if vals else math.nan

    def k_values(self) -> list[int]:
        return sorted({r.k for r in self.rows})

    def deterministic_rows(self):
        """Rows minus wall clock, for reproducibility comparisons."""
        return [
            (r.instance, r.k, r.n, r.m, r.bound, round(r.cost, 12),
             r.states_pushed, r.states_popped, r.states_pruned)
            for r in self.rows
        ]

    def to_tsv(self) -> str:
        header = "instance\tk\tn\tm\tbound\tcost\tstates_pushed\tstates_popped\tstates_pruned\twall_seconds"
        lines = [header]
        for r in self.rows:
            cost = "inf" if math.isinf(r.cost) else f"{r.cost:.6f}"
            lines.append(
                f"{r.instance}\t{r.k}\t{r.n}\t{r.m}\t{r.bound}\t{cost}"
                f"\t{r.states_pushed}\t{r.states_popped}\t{r.states_pruned}"
                f"\t{r.wall_seconds:.6f}"
            )
        lines.append("")
        for k in self.k_values():
            for bound in BOUND_NAMES:
                lines.append(
                    f"# mean k={k} {bound}: popped={self.mean_popped(k, bound):.2f}"
                    f" wall={self.mean_wall(k, bound):.4f}s"
                )
        return "\n".join(lines) + "\n"


def bench_lower_bounds(
    instance_count: int,
    k_values=(5, 10),
    n_range=(3, 4),
    m_range=(2, 3),
    seed: int = 7,
) -> BenchReport:
    """Run the solver under every bound on the same random instances.

    Optimal costs must agree across bounds on every instance; disagreement
    raises immediately since it means an optimality bug.
    """
    if instance_count < 1:
        raise ValueError("instance_count must be positive")
    report = BenchReport()
    for k in k_values:
        rng = np.random.default_rng(seed + k)
        for idx in range(instance_count):
            n = int(rng.integers(n_range[0], n_range[1] + 1))
            m = int(rng.integers(m_range[0], m_range[1] + 1))
            graph = build_random_graph(rng, n, m, k, exact_sizes=True)
            costs = {}
            for bound in BOUND_NAMES:
                t0 = time.perf_counter()
                q, stats = solve_qga(graph, bound=bound)
                wall = time.perf_counter() - t0
                cost = q.total_cost if q is not None else math.inf
                costs[bound] = cost
                report.rows.append(
                    BenchRow(
                        instance=idx,
                        k=k,
                        n=n,
                        m=m,
                        bound=bound,
                        cost=cost,
                        states_pushed=stats.states_pushed,
                        states_popped=stats.states_popped,
                        states_pruned=stats.states_pruned,
                        wall_seconds=wall,
                    )
                )
            lo, hi = min(costs.values()), max(costs.values())
            if math.isinf(lo) != math.isinf(hi) or (
                math.isfinite(lo) and hi - lo > 1e-9 * max(1.0, abs(lo))
            ):
                raise AssertionError(
                    f"optimal cost disagreement on instance {idx} (k={k}): {costs}"
                )
    return report
