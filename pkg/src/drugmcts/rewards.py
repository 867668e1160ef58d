"""Terminal-node rewards: self-consistency, yes/no judgment, and their blend.

The relative reward re-asks the decision question k times and scores the
modal answer's frequency over the parseable replies. The absolute reward
asks k yes/no interaction judgments about the modal protein and scores the
affirmative fraction. The final reward averages the two, or passes the
relative reward through in relative-only mode.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .actions import (
    SearchContext,
    build_interaction_judgment_prompt,
    build_protein_selection_prompt,
    selection_pool,
)
from .domain import Corpus, SearchConfig
from .runtime import (
    AgentRuntime,
    SamplingRequest,
    parse_id_list,
    parse_yes_no,
    render_prompt,
    request_fingerprint,
    sample,
)


@dataclass(frozen=True)
class RewardBreakdown:
    p_star: str
    selection_counts: dict
    yes_count: int
    k: int
    r_relative: float
    r_absolute: float
    r_final: float


@dataclass(frozen=True)
class QueryStats:
    """Sampling bookkeeping one reward step produced."""

    template_id: str
    prompt_sha256: str
    texts: tuple
    prompt_tokens: int
    completion_tokens: int


def _sample_k(runtime: AgentRuntime, messages, config: SearchConfig):
    """k completions of one question, batched or issued one by one."""
    k = config.k_samples
    texts: list = []
    prompt_tokens = 0
    completion_tokens = 0
    fingerprint = None
    if config.batched_reward_samples:
        request = SamplingRequest(
            messages=tuple(messages), temperature=config.temperature, n=k,
            max_tokens=config.max_tokens,
        )
        fingerprint = request_fingerprint(request)
        response = sample(runtime.backend, request)
        texts.extend(response.texts)
        prompt_tokens += response.prompt_tokens
        completion_tokens += response.completion_tokens
    else:
        for _ in range(k):
            request = SamplingRequest(
                messages=tuple(messages), temperature=config.temperature, n=1,
                max_tokens=config.max_tokens,
            )
            if fingerprint is None:
                fingerprint = request_fingerprint(request)
            response = sample(runtime.backend, request)
            texts.extend(response.texts)
            prompt_tokens += response.prompt_tokens
            completion_tokens += response.completion_tokens
    return texts, prompt_tokens, completion_tokens, fingerprint


@dataclass(frozen=True)
class RelativeRewardResult:
    p_star: str
    r_relative: float
    selection_counts: dict
    parseable: int
    fallback: bool
    stats: QueryStats


def relative_reward(
    ctx: SearchContext, corpus: Corpus, runtime: AgentRuntime, config: SearchConfig
) -> RelativeRewardResult:
    """Modal re-selection and its frequency among parseable replies.

    When no reply parses, the rollout's own selection stands with reward 0.
    """
    pool = selection_pool(ctx, config)
    if not pool:
        raise ValueError("relative reward needs a nonempty selection pool")
    template_id, bindings = build_protein_selection_prompt(ctx, corpus, config)
    messages = render_prompt(template_id, bindings, runtime.library)
    texts, p_tok, c_tok, fingerprint = _sample_k(runtime, messages, config)

    selections = []
    for text in texts:
        ids = parse_id_list(text, pool)
        if ids:
            selections.append(ids[0])
    counts = Counter(selections)
    stats = QueryStats(
        template_id=template_id, prompt_sha256=fingerprint, texts=tuple(texts),
        prompt_tokens=p_tok, completion_tokens=c_tok,
    )
    if not selections:
        if ctx.selected_protein is None:
            raise ValueError("no parseable selections and no prior selection to fall back on")
        return RelativeRewardResult(
            p_star=ctx.selected_protein, r_relative=0.0, selection_counts={},
            parseable=0, fallback=True, stats=stats,
        )
    p_star = min(counts, key=lambda pid: (-counts[pid], pid))
    return RelativeRewardResult(
        p_star=p_star,
        r_relative=counts[p_star] / len(selections),
        selection_counts=dict(sorted(counts.items())),
        parseable=len(selections),
        fallback=False,
        stats=stats,
    )


@dataclass(frozen=True)
class AbsoluteRewardResult:
    r_absolute: float
    yes_count: int
    stats: QueryStats


def absolute_reward(
    p_star: str, ctx: SearchContext, corpus: Corpus, runtime: AgentRuntime, config: SearchConfig
) -> AbsoluteRewardResult:
    """Fraction of k yes/no judgments that affirm the pairing; indeterminate counts as non-yes."""
    template_id, bindings = build_interaction_judgment_prompt(p_star, ctx, corpus, config)
    messages = render_prompt(template_id, bindings, runtime.library)
    texts, p_tok, c_tok, fingerprint = _sample_k(runtime, messages, config)
    yes_count = sum(
        parse_yes_no(text, config.affirmative_lexicon, config.negative_lexicon) == "yes"
        for text in texts
    )
    return AbsoluteRewardResult(
        r_absolute=yes_count / config.k_samples,
        yes_count=yes_count,
        stats=QueryStats(
            template_id=template_id, prompt_sha256=fingerprint, texts=tuple(texts),
            prompt_tokens=p_tok, completion_tokens=c_tok,
        ),
    )


def final_reward(r_relative: float, r_absolute: float, mode: str) -> float:
    """Blend per reward mode; inputs must already be valid rewards."""
    for name, value in (("r_relative", r_relative), ("r_absolute", r_absolute)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} out of range [0, 1]: {value}")
    if mode == "combined":
        return (r_relative + r_absolute) / 2
    if mode == "relative_only":
        return r_relative
    raise ValueError(f"unknown reward mode {mode!r}")


def compute_rollout_reward(
    ctx: SearchContext, corpus: Corpus, runtime: AgentRuntime, config: SearchConfig
):
    """Full reward step at a terminal context.

    Returns (RewardBreakdown, relative result, absolute result or None).
    The absolute queries are skipped entirely in relative-only mode.
    """
    rel = relative_reward(ctx, corpus, runtime, config)
    if config.reward_mode == "relative_only":
        absolute: Optional[AbsoluteRewardResult] = None
        r_absolute, yes_count = 0.0, 0
    else:
        absolute = absolute_reward(rel.p_star, ctx, corpus, runtime, config)
        r_absolute, yes_count = absolute.r_absolute, absolute.yes_count
    breakdown = RewardBreakdown(
        p_star=rel.p_star,
        selection_counts=rel.selection_counts,
        yes_count=yes_count,
        k=config.k_samples,
        r_relative=rel.r_relative,
        r_absolute=r_absolute,
        r_final=final_reward(rel.r_relative, r_absolute, config.reward_mode),
    )
    return breakdown, rel, absolute
