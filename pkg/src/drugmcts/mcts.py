"""The search core: UCT selection, distinct-answer expansion, simulation,
reward backpropagation, and cross-rollout answer aggregation.

The tree is an arena of nodes addressed by ordinal id; node ids double as
creation indices, which makes tie-breaking and snapshots trivially
deterministic. All randomness flows from one ``random.Random(config.seed)``
stream plus the backend's own seed, so a fixed seed with the mock backend
replays bit-for-bit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .actions import (
    ACTION_FIELDS,
    ApplyResult,
    SearchContext,
    apply_interaction_analysis,
    apply_molecule_analysis,
    apply_molecule_selection,
    apply_protein_selection,
    build_interaction_analysis_prompt,
    build_molecule_analysis_prompt,
    build_molecule_selection_prompt,
    build_protein_selection_prompt,
    root_context,
    successor_map,
)
from .domain import Action, Corpus, ProblemInstance, SearchConfig, validate_instance
from .rewards import compute_rollout_reward
from .runtime import (
    AgentRuntime,
    BackendError,
    render_prompt,
    request_fingerprint,
    sample_distinct,
    SamplingRequest,
)


@dataclass
class SearchNode:
    node_id: int
    action: Action
    context: SearchContext
    parent_id: Optional[int]
    creation_index: int
    visits: int = 0
    total_reward: float = 0.0
    children: list = field(default_factory=list)
    fallback: bool = False


@dataclass(frozen=True)
class RolloutOutcome:
    path: tuple
    p_star: str
    r_relative: float
    r_absolute: float
    r_final: float


@dataclass(frozen=True)
class RankedAnswer:
    protein_id: str
    aggregate_score: float
    support_count: int


@dataclass(frozen=True)
class SearchResult:
    query_molecule_id: str
    rollout_outcomes: tuple
    ranked_answers: tuple
    total_tokens: int


class TraceRecorder:
    """Accumulates one record per agent interaction for audit and tests."""

    def __init__(self):
        self.records: list = []

    def record(self, **fields):
        self.records.append(fields)

    @property
    def total_tokens(self) -> int:
        return sum(
            r.get("prompt_tokens", 0) + r.get("completion_tokens", 0) for r in self.records
        )

    def agent_calls(self) -> int:
        return sum(1 for r in self.records if r.get("prompt_tokens") is not None)


class SearchTree:
    def __init__(self):
        self.nodes: list = []

    def add(self, action: Action, context: SearchContext, parent_id: Optional[int], fallback: bool = False) -> SearchNode:
        node = SearchNode(
            node_id=len(self.nodes),
            action=action,
            context=context,
            parent_id=parent_id,
            creation_index=len(self.nodes),
        )
        node.fallback = fallback
        self.nodes.append(node)
        return node

    @property
    def root(self) -> SearchNode:
        return self.nodes[0]

    def node(self, node_id: int) -> SearchNode:
        return self.nodes[node_id]

    def path_from_root(self, node_id: int) -> list:
        path = []
        cursor: Optional[int] = node_id
        while cursor is not None:
            path.append(cursor)
            cursor = self.nodes[cursor].parent_id
        path.reverse()
        return path

    def snapshot(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.node_id,
                    "action": n.action.value,
                    "parent": n.parent_id,
                    "creation_index": n.creation_index,
                    "visits": n.visits,
                    "total_reward": n.total_reward,
                    "children": list(n.children),
                    "fallback": n.fallback,
                }
                for n in self.nodes
            ]
        }


# ---------------------------------------------------------------------------
# UCT
# ---------------------------------------------------------------------------


def uct_score(w: float, n: int, parent_visits: int, c: float) -> float:
    """Mean reward plus the exploration bonus; unvisited nodes rank first."""
    if parent_visits < 1:
        raise ValueError("parent_visits must be >= 1")
    if n == 0:
        return math.inf
    return w / n + c * math.sqrt(math.log(parent_visits) / n)


def select_leaf(tree: SearchTree, config: SearchConfig) -> int:
    """Descend by UCT argmax until a childless node or a terminal node.

    Unvisited children precede visited ones; all ties fall to the smallest
    creation index.
    """
    node = tree.root
    while node.children and node.action != Action.END:
        parent_visits = max(node.visits, 1)

        def sort_key(child_id: int):
            child = tree.node(child_id)
            return (
                -uct_score(child.total_reward, child.visits, parent_visits, config.exploration_c),
                child.creation_index,
            )

        node = tree.node(min(node.children, key=sort_key))
    return node.node_id


# ---------------------------------------------------------------------------
# Expansion and simulation
# ---------------------------------------------------------------------------

_PROMPT_BUILDERS = {
    Action.MOLECULE_ANALYSIS: lambda ctx, corpus, config: build_molecule_analysis_prompt(ctx),
    Action.MOLECULE_SELECTION: lambda ctx, corpus, config: build_molecule_selection_prompt(ctx, corpus),
    Action.INTERACTION_ANALYSIS: build_interaction_analysis_prompt,
    Action.PROTEIN_SELECTION: build_protein_selection_prompt,
}


def _apply_answer(action: Action, ctx: SearchContext, corpus: Corpus, config: SearchConfig, text: str) -> ApplyResult:
    if action == Action.MOLECULE_ANALYSIS:
        return apply_molecule_analysis(ctx, text)
    if action == Action.MOLECULE_SELECTION:
        return apply_molecule_selection(ctx, corpus, text)
    if action == Action.INTERACTION_ANALYSIS:
        return apply_interaction_analysis(ctx, text)
    if action == Action.PROTEIN_SELECTION:
        return apply_protein_selection(ctx, config, text)
    raise ValueError(f"action {action} does not consume answers")


def expand(
    tree: SearchTree,
    node_id: int,
    corpus: Corpus,
    runtime: AgentRuntime,
    config: SearchConfig,
    trace: Optional[TraceRecorder] = None,
    rollout: Optional[int] = None,
) -> list:
    """Create children for the node's successor action.

    Agent-backed actions request ``branching`` answers distinct under
    normalization and build one child per answer; fewer distinct answers
    yield fewer children. End nodes are never expandable.
    """
    node = tree.node(node_id)
    if node.action == Action.END:
        raise ValueError("terminal nodes cannot be expanded")
    succ = successor_map(config)[node.action]

    if succ == Action.END:
        child = tree.add(action=succ, context=node.context, parent_id=node_id)
        node.children.append(child.node_id)
        return [child.node_id]

    template_id, bindings = _PROMPT_BUILDERS[succ](node.context, corpus, config)
    messages = render_prompt(template_id, bindings, runtime.library)
    want = config.branching_for(succ)
    texts, responses = sample_distinct(
        runtime.backend, messages, want=want,
        temperature=config.temperature, max_tokens=config.max_tokens,
    )
    if not texts:
        raise BackendError(f"expansion toward {succ.value} produced no usable answers")

    child_ids = []
    parsed = []
    for text in texts:
        result = _apply_answer(succ, node.context, corpus, config, text)
        child = tree.add(action=succ, context=result.context, parent_id=node_id, fallback=result.fallback)
        child_ids.append(child.node_id)
        parsed.append(result.parsed)
    node.children.extend(child_ids)

    if trace is not None:
        probe = SamplingRequest(
            messages=tuple(messages), temperature=config.temperature, n=want,
            max_tokens=config.max_tokens,
        )
        trace.record(
            rollout=rollout,
            kind="expansion",
            action=succ.value,
            template_id=template_id,
            prompt_sha256=request_fingerprint(probe),
            raw_texts=[t for r in responses for t in r.texts],
            parsed=parsed,
            fallback=any(tree.node(cid).fallback for cid in child_ids),
            prompt_tokens=sum(r.prompt_tokens for r in responses),
            completion_tokens=sum(r.completion_tokens for r in responses),
            node_ids=child_ids,
        )
    return child_ids


def simulate(
    tree: SearchTree,
    node_id: int,
    corpus: Corpus,
    runtime: AgentRuntime,
    config: SearchConfig,
    rng: random.Random,
    trace: Optional[TraceRecorder] = None,
    rollout: Optional[int] = None,
) -> int:
    """Expand and descend uniformly at random until a terminal node exists."""
    current = node_id
    while tree.node(current).action != Action.END:
        children = expand(tree, current, corpus, runtime, config, trace, rollout)
        current = rng.choice(children)
    return current


def backpropagate(tree: SearchTree, path, reward: float) -> None:
    """Add one visit and the reward to every node on the path, nothing else."""
    if not 0.0 <= reward <= 1.0:
        raise ValueError(f"reward out of range [0, 1]: {reward}")
    for node_id in path:
        node = tree.node(node_id)
        node.visits += 1
        node.total_reward += reward


def aggregate_answers(outcomes) -> tuple:
    """Rank proteins by summed final reward, then support count, then id."""
    if not outcomes:
        raise ValueError("cannot aggregate zero outcomes")
    scores: dict = {}
    counts: dict = {}
    for outcome in outcomes:
        scores[outcome.p_star] = scores.get(outcome.p_star, 0.0) + outcome.r_final
        counts[outcome.p_star] = counts.get(outcome.p_star, 0) + 1
    ranked = sorted(scores, key=lambda pid: (-scores[pid], -counts[pid], pid))
    return tuple(
        RankedAnswer(protein_id=pid, aggregate_score=scores[pid], support_count=counts[pid])
        for pid in ranked
    )


# ---------------------------------------------------------------------------
# The full search
# ---------------------------------------------------------------------------


class MctsSearch:
    """One instance's search; exposes tree and trace for snapshots and audit."""

    def __init__(self, instance: ProblemInstance, corpus: Corpus, runtime: AgentRuntime, config: SearchConfig):
        violations = validate_instance(instance, corpus)
        if violations:
            raise ValueError(f"instance {instance.query_molecule_id!r} invalid: {violations}")
        self.instance = instance
        self.corpus = corpus
        self.runtime = runtime
        self.config = config
        self.trace = TraceRecorder()
        self.tree = SearchTree()
        self.tree.add(action=Action.ROOT, context=root_context(instance, corpus), parent_id=None)

    def run(self) -> SearchResult:
        rng = random.Random(self.config.seed)
        outcomes = []
        for rollout in range(self.config.rollouts):
            leaf = select_leaf(self.tree, self.config)
            terminal = simulate(
                self.tree, leaf, self.corpus, self.runtime, self.config, rng,
                self.trace, rollout,
            )
            terminal_ctx = self.tree.node(terminal).context
            breakdown, rel, absolute = compute_rollout_reward(
                terminal_ctx, self.corpus, self.runtime, self.config
            )
            self._record_rewards(rollout, terminal, breakdown, rel, absolute)
            path = self.tree.path_from_root(terminal)
            backpropagate(self.tree, path, breakdown.r_final)
            outcomes.append(
                RolloutOutcome(
                    path=tuple(path),
                    p_star=breakdown.p_star,
                    r_relative=breakdown.r_relative,
                    r_absolute=breakdown.r_absolute,
                    r_final=breakdown.r_final,
                )
            )
        return SearchResult(
            query_molecule_id=self.instance.query_molecule_id,
            rollout_outcomes=tuple(outcomes),
            ranked_answers=aggregate_answers(outcomes),
            total_tokens=self.trace.total_tokens,
        )

    def _record_rewards(self, rollout, terminal, breakdown, rel, absolute):
        self.trace.record(
            rollout=rollout,
            kind="reward_relative",
            action=Action.PROTEIN_SELECTION.value,
            template_id=rel.stats.template_id,
            prompt_sha256=rel.stats.prompt_sha256,
            raw_texts=list(rel.stats.texts),
            parsed={"p_star": breakdown.p_star, "selection_counts": breakdown.selection_counts},
            fallback=rel.fallback,
            prompt_tokens=rel.stats.prompt_tokens,
            completion_tokens=rel.stats.completion_tokens,
            node_ids=[terminal],
        )
        if absolute is not None:
            self.trace.record(
                rollout=rollout,
                kind="reward_absolute",
                action="interaction_judgment",
                template_id=absolute.stats.template_id,
                prompt_sha256=absolute.stats.prompt_sha256,
                raw_texts=list(absolute.stats.texts),
                parsed={"yes_count": breakdown.yes_count, "k": breakdown.k},
                fallback=False,
                prompt_tokens=absolute.stats.prompt_tokens,
                completion_tokens=absolute.stats.completion_tokens,
                node_ids=[terminal],
            )
        self.trace.record(
            rollout=rollout,
            kind="reward_breakdown",
            reward={
                "p_star": breakdown.p_star,
                "selection_counts": breakdown.selection_counts,
                "yes_count": breakdown.yes_count,
                "k": breakdown.k,
                "r_relative": breakdown.r_relative,
                "r_absolute": breakdown.r_absolute,
                "r_final": breakdown.r_final,
            },
        )


def run_search(instance: ProblemInstance, corpus: Corpus, runtime: AgentRuntime, config: SearchConfig) -> SearchResult:
    """Run the configured number of rollouts and aggregate the answers."""
    return MctsSearch(instance, corpus, runtime, config).run()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def result_to_obj(result: SearchResult) -> dict:
    return {
        "query_molecule_id": result.query_molecule_id,
        "rollout_outcomes": [
            {
                "path": list(o.path),
                "p_star": o.p_star,
                "r_relative": o.r_relative,
                "r_absolute": o.r_absolute,
                "r_final": o.r_final,
            }
            for o in result.rollout_outcomes
        ],
        "ranked_answers": [
            {
                "protein_id": a.protein_id,
                "aggregate_score": a.aggregate_score,
                "support_count": a.support_count,
            }
            for a in result.ranked_answers
        ],
        "total_tokens": result.total_tokens,
    }


def result_from_obj(obj: dict) -> SearchResult:
    return SearchResult(
        query_molecule_id=obj["query_molecule_id"],
        rollout_outcomes=tuple(
            RolloutOutcome(
                path=tuple(o["path"]),
                p_star=o["p_star"],
                r_relative=o["r_relative"],
                r_absolute=o["r_absolute"],
                r_final=o["r_final"],
            )
            for o in obj["rollout_outcomes"]
        ),
        ranked_answers=tuple(
            RankedAnswer(
                protein_id=a["protein_id"],
                aggregate_score=a["aggregate_score"],
                support_count=a["support_count"],
            )
            for a in obj["ranked_answers"]
        ),
        total_tokens=obj["total_tokens"],
    )


def check_tree_invariants(tree: SearchTree) -> list:
    """Structural checks run after golden searches; returns violations."""
    problems = []
    for node in tree.nodes:
        if not 0.0 <= node.total_reward <= node.visits + 1e-9:
            problems.append(f"node {node.node_id}: W={node.total_reward} outside [0, n={node.visits}]")
        if node.children:
            child_sum = sum(tree.node(c).visits for c in node.children)
            if child_sum != node.visits:
                problems.append(
                    f"node {node.node_id}: visits {node.visits} != sum of child visits {child_sum}"
                )
        if node.action == Action.END and node.children:
            problems.append(f"node {node.node_id}: terminal node has children")
    return problems
