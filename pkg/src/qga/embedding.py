"""Translation embeddings and the triple assembly cost.

Training follows the classic margin-ranking recipe: for each stored triple,
corrupt the subject or the object (uniformly, skipping accidental positives),
and push the true triple's translation residual below the corrupted one's by
at least the margin.  Entity/class vectors are renormalized to unit length
after every epoch; predicate vectors are normalized once at initialization.

The assembly cost of wiring vertices v1, v2 with predicate p is the smaller
of the two directed L2 residuals |v1 + p - v2| and |v2 + p - v1|, together
with the direction that attained it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import QgaError, UnknownItemError, VectorFormatError
from .store import KIND_PREDICATE, KnowledgeGraph

DIR_FORWARD = 0  # triple reads (v1, p, v2)
DIR_REVERSE = 1  # triple reads (v2, p, v1)


@dataclass
class TrainConfig:
    dim: int = 32
    epochs: int = 200
    learning_rate: float = 0.01
    margin: float = 1.0
    seed: int = 0

    def validate(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.margin <= 0:
            raise ValueError("margin must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass
class EmbeddingTable:
    """Vectors for every item id; rows without a vector have ``has[i]=False``."""

    dim: int
    vectors: np.ndarray
    has: np.ndarray
    final_loss: float = 0.0
    items: list[str] = field(default_factory=list)

    def vector(self, item: int) -> np.ndarray:
        if not (0 <= item < self.vectors.shape[0]) or not self.has[item]:
            raise UnknownItemError(f"no vector for item id {item!r}")
        return self.vectors[item]

    def require(self, *ids):
        for i in ids:
            self.vector(i)


def _init_table(kg: KnowledgeGraph, config: TrainConfig) -> tuple[EmbeddingTable, np.ndarray]:
    rng = np.random.default_rng(config.seed)
    n = kg.num_items()
    bound = 6.0 / np.sqrt(config.dim)
    vectors = rng.uniform(-bound, bound, size=(n, config.dim))
    pred_mask = np.array([k == KIND_PREDICATE for k in kg.kinds])
    norms = np.linalg.norm(vectors[pred_mask], axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    vectors[pred_mask] = vectors[pred_mask] / norms
    table = EmbeddingTable(
        dim=config.dim,
        vectors=vectors,
        has=np.ones(n, dtype=bool),
        items=list(kg.items),
    )
    return table, ~pred_mask


def _renormalize(vectors: np.ndarray, vertex_mask: np.ndarray) -> None:
    norms = np.linalg.norm(vectors[vertex_mask], axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    vectors[vertex_mask] = vectors[vertex_mask] / norms


def _sample_negatives(rng, pos, vertex_ids, positive_set, max_tries=100):
    """Corrupt subject or object of each triple, avoiding stored positives."""
    n = pos.shape[0]
    neg = pos.copy()
    sides = rng.integers(0, 2, size=n)  # 0: corrupt subject, 1: corrupt object
    for t in range(n):
        col = 0 if sides[t] == 0 else 2
        orig = pos[t, col]
        for _ in range(max_tries):
            repl = vertex_ids[rng.integers(0, len(vertex_ids))]
            if repl == orig:
                continue
            neg[t, col] = repl
            if (neg[t, 0], neg[t, 1], neg[t, 2]) not in positive_set:
                break
        # on exhaustion the last draw stands, filtered or not
    return neg


def train_transe(kg: KnowledgeGraph, config: TrainConfig | None = None) -> EmbeddingTable:
    """Train translation embeddings over the whole store.

    Deterministic for a fixed seed: single-threaded SGD, all randomness from
    one seeded generator.  ``epochs=0`` returns the seeded initialization
    unchanged.  The mean hinge loss of the last epoch is stored on the table.
    """
    config = config or TrainConfig()
    config.validate()
    if not kg.triples:
        raise QgaError("cannot train on an empty graph")

    table, vertex_mask = _init_table(kg, config)
    rng = np.random.default_rng(config.seed + 1)
    pos_all = np.array(kg.triples, dtype=np.int64)
    vertex_ids = np.array(kg.vertices, dtype=np.int64)
    positive_set = set(kg.triples)

    loss = 0.0
    for _ in range(config.epochs):
        order = rng.permutation(pos_all.shape[0])
        pos = pos_all[order]
        neg = _sample_negatives(rng, pos, vertex_ids, positive_set)
        loss = kernels.sgd_epoch(
            table.vectors, pos, neg, config.learning_rate, config.margin
        )
        _renormalize(table.vectors, vertex_mask)
    table.final_loss = float(loss)
    return table


# -- reference loss/gradient (mirrors the kernel's math) -------------------


def margin_loss(vectors: np.ndarray, pos, neg, margin: float) -> float:
    s, p, o = pos
    cs, cp, co = neg
    d_pos = float(np.linalg.norm(vectors[s] + vectors[p] - vectors[o]))
    d_neg = float(np.linalg.norm(vectors[cs] + vectors[cp] - vectors[co]))
    return max(0.0, margin + d_pos - d_neg)


def margin_loss_grad(vectors: np.ndarray, pos, neg, margin: float) -> dict[int, np.ndarray]:
    """Analytic gradient of ``margin_loss`` w.r.t. every involved vector,
    accumulated per item id.  Zero dict when the hinge is inactive."""
    s, p, o = pos
    cs, cp, co = neg
    rp = vectors[s] + vectors[p] - vectors[o]
    rn = vectors[cs] + vectors[cp] - vectors[co]
    d_pos = float(np.linalg.norm(rp))
    d_neg = float(np.linalg.norm(rn))
    if margin + d_pos - d_neg <= 0.0:
        return {}
    gp = rp / d_pos if d_pos > 1e-12 else np.zeros_like(rp)
    gn = rn / d_neg if d_neg > 1e-12 else np.zeros_like(rn)
    grads: dict[int, np.ndarray] = {}

    def add(item, g):
        grads[item] = grads.get(item, 0.0) + g

    add(s, gp)
    add(p, gp)
    add(o, -gp)
    add(cs, -gn)
    add(cp, -gn)
    add(co, gn)
    return grads


# -- persistence ------------------------------------------------------------


def save_table(table: EmbeddingTable, path) -> None:
    """Write ``dim=<d>`` then one ``iri<TAB>f1 f2 ... fd`` row per item,
    using shortest round-trip float formatting."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim={table.dim}\n")
        for item, iri in enumerate(table.items):
            if not table.has[item]:
                continue
            row = " ".join(repr(float(x)) for x in table.vectors[item])
            fh.write(f"{iri}\t{row}\n")


def load_table(path, kg: KnowledgeGraph) -> EmbeddingTable:
    """Load a vector file, binding rows to the store's item ids."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("dim="):
            raise VectorFormatError(f"{path}: missing dim= header")
        try:
            dim = int(header[4:])
        except ValueError:
            raise VectorFormatError(f"{path}: bad dim header {header!r}")
        if dim < 1:
            raise VectorFormatError(f"{path}: bad dim {dim}")
        vectors = np.zeros((kg.num_items(), dim))
        has = np.zeros(kg.num_items(), dtype=bool)
        for line_no, line in enumerate(fh, 2):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise VectorFormatError(f"{path}:{line_no}: expected iri<TAB>floats")
            iri, row = fields
            try:
                item = kg.id_of(iri)
            except UnknownItemError:
                raise UnknownItemError(f"{path}:{line_no}: unknown IRI {iri!r}")
            values = row.split()
            if len(values) != dim:
                raise VectorFormatError(
                    f"{path}:{line_no}: expected {dim} floats, got {len(values)}"
                )
            vectors[item] = [float(v) for v in values]
            has[item] = True
    return EmbeddingTable(dim=dim, vectors=vectors, has=has, items=list(kg.items))


# -- assembly cost ----------------------------------------------------------


def triple_assembly_cost(table: EmbeddingTable, v1: int, v2: int, p: int):
    """Cost of wiring (v1, v2) with predicate p, and the cheaper direction.

    Ties resolve to the forward direction (v1 -> v2); swapping v1 and v2
    compares the same two residuals, so the cost is exactly symmetric.
    """
    table.require(v1, v2, p)
    costs, dirs = kernels.pair_costs(
        table.vectors,
        np.array([v1], dtype=np.int64),
        np.array([v2], dtype=np.int64),
        np.array([p], dtype=np.int64),
    )
    return float(costs[0]), int(dirs[0])


def condensed_edge_weight(table: EmbeddingTable, v1: int, v2: int, predicates):
    """Minimum assembly cost over a predicate candidate set.

    Returns (cost, best predicate, direction); predicate ties break by id.
    """
    preds = sorted(predicates)
    if not preds:
        raise ValueError("empty predicate set")
    table.require(v1, v2, *preds)
    n = len(preds)
    costs, dirs = kernels.pair_costs(
        table.vectors,
        np.full(n, v1, dtype=np.int64),
        np.full(n, v2, dtype=np.int64),
        np.array(preds, dtype=np.int64),
    )
    best = int(np.argmin(costs))
    return float(costs[best]), preds[best], int(dirs[best])
