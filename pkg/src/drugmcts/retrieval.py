"""Deterministic candidate retrieval: fingerprint and embedding similarity.

Candidate molecules come from the union of the top-10 lists under each
metric; candidate proteins are the known interaction partners of those
molecules. Pure functions of (query, corpus): repeated calls are
byte-identical, which keeps the search root unique.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .domain import Corpus, Fingerprint, Molecule

logger = logging.getLogger(__name__)

TOP_K_PER_METRIC = 10


@dataclass(frozen=True)
class RankedHit:
    molecule_id: str
    score: float
    metric: str  # tanimoto | cosine
    rank: int


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """Bit-set overlap |a&b| / |a|b|. Undefined when both vectors are empty."""
    if a.n_bits != b.n_bits:
        raise ValueError(f"fingerprint width mismatch: {a.n_bits} vs {b.n_bits}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        raise ValueError("tanimoto undefined for two all-zero fingerprints")
    return (a.bits & b.bits).bit_count() / union


def cosine(a, b) -> float:
    """Angle cosine of two real vectors; both must have nonzero norm."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValueError(f"embedding dimension mismatch: {va.shape} vs {vb.shape}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero-norm vectors")
    return float(np.dot(va, vb) / (na * nb))


def _pair_score(query: Molecule, other: Molecule, metric: str):
    """Score one pair, or None when either side lacks the metric's modality."""
    if metric == "tanimoto":
        if query.fingerprint is None or other.fingerprint is None:
            return None
        return tanimoto(query.fingerprint, other.fingerprint)
    if metric == "cosine":
        if query.embedding is None or other.embedding is None:
            return None
        return cosine(query.embedding, other.embedding)
    raise ValueError(f"unknown metric {metric!r}")


def top_k(query: Molecule, corpus: Corpus, metric: str, k: int) -> list[RankedHit]:
    """k most similar corpus molecules, query excluded.

    Ordered by score descending, ties broken by molecule id ascending.
    Pairs whose preconditions fail (missing modality, zero vectors) are
    skipped; the skip count is logged.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scored = []
    skipped = 0
    for other in corpus.molecules.values():
        if other.id == query.id:
            continue
        try:
            score = _pair_score(query, other, metric)
        except ValueError:
            skipped += 1
            continue
        if score is None:
            skipped += 1
            continue
        scored.append((score, other.id))
    if skipped:
        logger.warning("top_k(%s, metric=%s): skipped %d pairs", query.id, metric, skipped)
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [
        RankedHit(molecule_id=mol_id, score=score, metric=metric, rank=rank)
        for rank, (score, mol_id) in enumerate(scored[:k], start=1)
    ]


def retrieve_candidates(query: Molecule, corpus: Corpus) -> frozenset:
    """Union of the per-metric top-10 lists, deduplicated, query excluded."""
    hits_t = top_k(query, corpus, "tanimoto", TOP_K_PER_METRIC)
    hits_c = top_k(query, corpus, "cosine", TOP_K_PER_METRIC)
    return frozenset(h.molecule_id for h in hits_t) | frozenset(h.molecule_id for h in hits_c)


def candidate_proteins(candidates, corpus: Corpus) -> frozenset:
    """Every protein with a positive interaction against any candidate molecule."""
    pool: set = set()
    for mol_id in candidates:
        pool |= corpus.proteins_of(mol_id)
    return frozenset(pool)


def ranked_hits_to_objs(query_id: str, hits: list[RankedHit]) -> list[dict]:
    """Debug-output records, one per hit."""
    return [
        {
            "query_id": query_id,
            "metric": h.metric,
            "rank": h.rank,
            "molecule_id": h.molecule_id,
            "score": h.score,
        }
        for h in hits
    ]
