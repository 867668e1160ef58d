"""Recall under Top-K selection policies, aggregated across instances."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass


def topk_select(ranked_answers, gt_count: int, mode: str) -> frozenset:
    """First K ranked proteins, K = gt_count (gt) or gt_count + 3 (gt_plus_3).

    Shorter rankings yield fewer picks; nothing is padded.
    """
    if gt_count < 1:
        raise ValueError("gt_count must be >= 1")
    if mode == "gt":
        k = gt_count
    elif mode == "gt_plus_3":
        k = gt_count + 3
    else:
        raise ValueError(f"unknown topk mode {mode!r}")
    return frozenset(answer.protein_id for answer in ranked_answers[:k])


def recall(predicted, ground_truth) -> float:
    """Fraction of ground-truth proteins recovered by the prediction."""
    gt = frozenset(ground_truth)
    if not gt:
        raise ValueError("recall undefined for empty ground truth")
    return len(frozenset(predicted) & gt) / len(gt)


@dataclass(frozen=True)
class InstanceRow:
    instance_id: str
    gt_size: int
    k: int
    hits: int
    recall: float
    tokens: int
    rollouts: int


@dataclass(frozen=True)
class Report:
    mode: str
    mean_recall: float
    total_tokens: int
    rows: tuple

    def to_obj(self) -> dict:
        return {
            "mode": self.mode,
            "mean_recall": self.mean_recall,
            "total_tokens": self.total_tokens,
            "rows": [
                {
                    "instance_id": r.instance_id,
                    "gt_size": r.gt_size,
                    "k": r.k,
                    "hits": r.hits,
                    "recall": r.recall,
                    "tokens": r.tokens,
                    "rollouts": r.rollouts,
                }
                for r in self.rows
            ],
        }

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["instance_id", "gt_size", "k", "hits", "recall", "tokens", "rollouts"])
        for r in self.rows:
            writer.writerow([r.instance_id, r.gt_size, r.k, r.hits, r.recall, r.tokens, r.rollouts])
        return buffer.getvalue()


def evaluate_run(results, instances, mode: str) -> Report:
    """Per-instance recall plus run-level aggregates.

    Results and instances must cover exactly the same query ids.
    """
    if not results:
        raise ValueError("no results to evaluate")
    by_query = {}
    for inst in instances:
        by_query[inst.query_molecule_id] = inst
    result_ids = [r.query_molecule_id for r in results]
    if len(set(result_ids)) != len(result_ids):
        raise ValueError("duplicate result query ids")
    missing = sorted(set(result_ids) - set(by_query))
    if missing:
        raise ValueError(f"results without matching instances: {missing}")
    extra = sorted(set(by_query) - set(result_ids))
    if extra:
        raise ValueError(f"instances without results: {extra}")

    rows = []
    for result in sorted(results, key=lambda r: r.query_molecule_id):
        inst = by_query[result.query_molecule_id]
        gt = inst.ground_truth_protein_ids
        k = len(gt) if mode == "gt" else len(gt) + 3 if mode == "gt_plus_3" else None
        if k is None:
            raise ValueError(f"unknown topk mode {mode!r}")
        predicted = topk_select(result.ranked_answers, len(gt), mode)
        hits = len(predicted & gt)
        rows.append(
            InstanceRow(
                instance_id=result.query_molecule_id,
                gt_size=len(gt),
                k=k,
                hits=hits,
                recall=hits / len(gt),
                tokens=result.total_tokens,
                rollouts=len(result.rollout_outcomes),
            )
        )
    mean_recall = sum(r.recall for r in rows) / len(rows)
    return Report(
        mode=mode,
        mean_recall=mean_recall,
        total_tokens=sum(r.tokens for r in rows),
        rows=tuple(rows),
    )
