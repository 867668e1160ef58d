"""Problem-instance construction from a raw interaction corpus.

Every molecule is tried as a query; retrieval proposes candidates, and a
fixed rule chain filters both candidates and whole instances. Rejections
are attributed to the first failing rule so accepted + rejected counts sum
to the number of query molecules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .domain import (
    Corpus,
    MAX_GROUND_TRUTH,
    ProblemInstance,
    exceeds_pool_ratio,
)
from .retrieval import candidate_proteins, retrieve_candidates

REJECT_QUERY_PROTEIN_RANGE = "query_protein_range"
REJECT_NO_CANDIDATES = "no_candidates"
REJECT_TOO_MANY_CANDIDATES = "too_many_candidates"
REJECT_GT_SIZE = "gt_size"
REJECT_GT_RATIO = "gt_ratio"

REJECTION_RULES = (
    REJECT_QUERY_PROTEIN_RANGE,
    REJECT_NO_CANDIDATES,
    REJECT_TOO_MANY_CANDIDATES,
    REJECT_GT_SIZE,
    REJECT_GT_RATIO,
)


@dataclass(frozen=True)
class BuilderRules:
    """Filter thresholds; defaults follow the published construction rules.

    Raising max_candidates above 15 would emit instances that fail
    validate_instance, so only lower it.
    """

    min_query_proteins: int = 2
    max_query_proteins: int = 10
    min_candidate_proteins: int = 2
    max_candidate_proteins: int = 4
    max_candidates: int = 15


@dataclass
class BuildReport:
    queries: int = 0
    accepted: int = 0
    rejected: dict = field(default_factory=lambda: {rule: 0 for rule in REJECTION_RULES})
    dropped_candidates: int = 0

    def to_obj(self) -> dict:
        return {
            "queries": self.queries,
            "accepted": self.accepted,
            "rejected": dict(self.rejected),
            "dropped_candidates": self.dropped_candidates,
        }


def build_instances(corpus: Corpus, rules: BuilderRules = BuilderRules()):
    """Construct instances for every query molecule; returns (instances, report).

    Candidates whose positive-interaction count is outside
    [min_candidate_proteins, max_candidate_proteins] are dropped (the
    instance survives if any remain); instance-level rules then reject or
    accept. Deterministic: queries are processed in id order.
    """
    instances = []
    report = BuildReport()
    for query_id in sorted(corpus.molecules):
        report.queries += 1
        query = corpus.molecule(query_id)
        query_proteins = corpus.proteins_of(query_id)
        if not rules.min_query_proteins <= len(query_proteins) <= rules.max_query_proteins:
            report.rejected[REJECT_QUERY_PROTEIN_RANGE] += 1
            continue
        raw = retrieve_candidates(query, corpus)
        kept = frozenset(
            mid for mid in raw
            if rules.min_candidate_proteins <= len(corpus.proteins_of(mid)) <= rules.max_candidate_proteins
        )
        report.dropped_candidates += len(raw) - len(kept)
        if not kept:
            report.rejected[REJECT_NO_CANDIDATES] += 1
            continue
        if len(kept) > rules.max_candidates:
            report.rejected[REJECT_TOO_MANY_CANDIDATES] += 1
            continue
        pool = candidate_proteins(kept, corpus)
        ground_truth = pool & query_proteins
        if not 1 <= len(ground_truth) <= MAX_GROUND_TRUTH:
            report.rejected[REJECT_GT_SIZE] += 1
            continue
        if exceeds_pool_ratio(len(ground_truth), len(pool)):
            report.rejected[REJECT_GT_RATIO] += 1
            continue
        report.accepted += 1
        instances.append(
            ProblemInstance(
                query_molecule_id=query_id,
                candidate_molecule_ids=kept,
                candidate_protein_ids=pool,
                ground_truth_protein_ids=ground_truth,
            )
        )
    return instances, report


# ---------------------------------------------------------------------------
# Baseline projection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaselineInstance:
    """Instance with the candidate molecules removed."""

    query_molecule_id: str
    candidate_protein_ids: frozenset
    ground_truth_protein_ids: frozenset


def build_baseline_dataset(instances) -> list:
    return [
        BaselineInstance(
            query_molecule_id=inst.query_molecule_id,
            candidate_protein_ids=inst.candidate_protein_ids,
            ground_truth_protein_ids=inst.ground_truth_protein_ids,
        )
        for inst in instances
    ]


def baseline_to_obj(inst: BaselineInstance) -> dict:
    return {
        "query_molecule_id": inst.query_molecule_id,
        "candidate_protein_ids": sorted(inst.candidate_protein_ids),
        "ground_truth_protein_ids": sorted(inst.ground_truth_protein_ids),
    }
