import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from drugmcts.actions import SearchContext
from drugmcts.domain import SearchConfig
from drugmcts.rewards import (
    absolute_reward,
    compute_rollout_reward,
    final_reward,
    relative_reward,
)
from drugmcts.runtime import AgentRuntime, ScriptedBackend

from factories import corpus, molecule, pocket, protein


@pytest.fixture()
def reward_corpus():
    molecules = [molecule(f"M{i}", bits=[i]) for i in range(1, 4)]
    proteins = [protein(pid, pockets=[pocket()]) for pid in ("PA", "PB", "PC")]
    links = [("M2", "PA"), ("M2", "PB"), ("M3", "PC")]
    return corpus(molecules, proteins, links)


@pytest.fixture()
def terminal_ctx(reward_corpus):
    return SearchContext(
        query_molecule=reward_corpus.molecule("M1"),
        candidate_molecules=frozenset({"M2", "M3"}),
        candidate_proteins=frozenset({"PA", "PB", "PC"}),
        reference_molecules=frozenset({"M2", "M3"}),
        reference_proteins=frozenset({"PA", "PB", "PC"}),
        selected_protein="PA",
    )


CONFIG = SearchConfig(seed=0, k_samples=4)


def _runtime(replies):
    return AgentRuntime(backend=ScriptedBackend(replies))


# ---------------------------------------------------------------------------
# relative_reward
# ---------------------------------------------------------------------------


def test_relative_modal_frequency(terminal_ctx, reward_corpus):
    # Frequency count: A appears 2 of 4 parseable selections.
    result = relative_reward(
        terminal_ctx, reward_corpus, _runtime(["PA", "PA", "PB", "PC"]), CONFIG
    )
    assert result.p_star == "PA"
    assert result.r_relative == 0.5
    assert result.selection_counts == {"PA": 2, "PB": 1, "PC": 1}


def test_relative_unanimous(terminal_ctx, reward_corpus):
    result = relative_reward(
        terminal_ctx, reward_corpus, _runtime(["PA"] * 4), CONFIG
    )
    assert result.p_star == "PA"
    assert result.r_relative == 1.0


def test_relative_tie_broken_by_id(terminal_ctx, reward_corpus):
    result = relative_reward(
        terminal_ctx, reward_corpus, _runtime(["PA", "PA", "PB", "PB"]), CONFIG
    )
    assert result.p_star == "PA"
    assert result.r_relative == 0.5


def test_relative_denominator_is_parseable_count(terminal_ctx, reward_corpus):
    # One unparseable reply: 2 of 3 parseable selections name PB.
    result = relative_reward(
        terminal_ctx, reward_corpus, _runtime(["PB", "gibberish", "PB", "PC"]), CONFIG
    )
    assert result.p_star == "PB"
    assert result.r_relative == pytest.approx(2 / 3)
    assert result.parseable == 3


def test_relative_zero_parse_falls_back_to_path_selection(terminal_ctx, reward_corpus):
    result = relative_reward(
        terminal_ctx, reward_corpus, _runtime(["nope"] * 4), CONFIG
    )
    assert result.p_star == "PA"  # the rollout's own selection
    assert result.r_relative == 0.0
    assert result.fallback


def test_relative_singleton_pool_all_parse(reward_corpus, terminal_ctx):
    ctx = dataclasses.replace(
        terminal_ctx, reference_proteins=frozenset({"PB"}), selected_protein="PB"
    )
    result = relative_reward(ctx, reward_corpus, _runtime(["PB"] * 4), CONFIG)
    assert result.r_relative == 1.0


def test_relative_per_call_sampling(terminal_ctx, reward_corpus):
    config = CONFIG.with_overrides(batched_reward_samples=False)
    backend = ScriptedBackend(["PA", "PB", "PA", "PA"])
    result = relative_reward(terminal_ctx, reward_corpus, AgentRuntime(backend=backend), config)
    assert backend.consumed == 4
    assert result.p_star == "PA"
    assert result.r_relative == 0.75


# ---------------------------------------------------------------------------
# absolute_reward
# ---------------------------------------------------------------------------


def test_absolute_counts_affirmatives(terminal_ctx, reward_corpus):
    result = absolute_reward(
        "PA", terminal_ctx, reward_corpus,
        _runtime(["Yes.", "Yes, strongly.", "yes", "No."]), CONFIG,
    )
    assert result.r_absolute == 0.75
    assert result.yes_count == 3


def test_absolute_all_yes(terminal_ctx, reward_corpus):
    result = absolute_reward("PA", terminal_ctx, reward_corpus, _runtime(["Yes"] * 4), CONFIG)
    assert result.r_absolute == 1.0


def test_absolute_indeterminate_counts_as_non_yes(terminal_ctx, reward_corpus):
    # Lexicon-parse oracle: yes, indeterminate, no, no -> 1/4.
    replies = ["Yes.", "It is unclear.", "No.", "No."]
    result = absolute_reward("PA", terminal_ctx, reward_corpus, _runtime(replies), CONFIG)
    assert result.r_absolute == 0.25
    assert result.yes_count == 1


# ---------------------------------------------------------------------------
# final_reward
# ---------------------------------------------------------------------------


def test_final_reward_cases():
    assert final_reward(1.0, 1.0, "combined") == 1.0
    assert final_reward(0.5, 0.75, "combined") == 0.625
    assert final_reward(0.5, 0.75, "relative_only") == 0.5


def test_final_reward_rejects_out_of_range():
    with pytest.raises(ValueError):
        final_reward(1.5, 0.0, "combined")
    with pytest.raises(ValueError):
        final_reward(0.5, -0.1, "combined")


@given(
    st.floats(min_value=0, max_value=1),
    st.floats(min_value=0, max_value=1),
    st.floats(min_value=0, max_value=1),
)
def test_final_reward_monotone(r1, r2, a):
    if r1 <= r2:
        assert final_reward(r1, a, "combined") <= final_reward(r2, a, "combined")
        assert final_reward(a, r1, "combined") <= final_reward(a, r2, "combined")
    assert 0.0 <= final_reward(r1, a, "combined") <= 1.0


# ---------------------------------------------------------------------------
# compute_rollout_reward
# ---------------------------------------------------------------------------


def test_rollout_reward_combined(terminal_ctx, reward_corpus):
    replies = ["PA", "PA", "PB", "PC", "Yes.", "Yes.", "Yes.", "No."]
    breakdown, rel, absolute = compute_rollout_reward(
        terminal_ctx, reward_corpus, _runtime(replies), CONFIG
    )
    assert breakdown.p_star == "PA"
    assert breakdown.r_relative == 0.5
    assert breakdown.r_absolute == 0.75
    assert breakdown.r_final == 0.625
    assert breakdown.k == 4
    assert absolute is not None


def test_rollout_reward_relative_only_skips_absolute_queries(terminal_ctx, reward_corpus):
    config = CONFIG.with_overrides(reward_mode="relative_only")
    backend = ScriptedBackend(["PA", "PA", "PB", "PC"])  # no yes/no replies provisioned
    breakdown, rel, absolute = compute_rollout_reward(
        terminal_ctx, reward_corpus, AgentRuntime(backend=backend), config
    )
    assert absolute is None
    assert breakdown.r_final == breakdown.r_relative == 0.5
    assert breakdown.r_absolute == 0.0
    assert breakdown.yes_count == 0
    assert backend.consumed == 4
