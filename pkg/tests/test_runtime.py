import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from drugmcts.runtime import (
    BackendError,
    HttpBackend,
    MockBackend,
    PromptMessage,
    SamplingRequest,
    ScriptedBackend,
    TemplateError,
    TemplateLibrary,
    normalize_answer,
    parse_id_list,
    parse_yes_no,
    render_prompt,
    sample,
    sample_distinct,
)


def _request(content, n=1, temperature=0.8):
    return SamplingRequest(
        messages=(PromptMessage(role="user", content=content),), temperature=temperature, n=n
    )


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------


def test_render_single_substitution(tmp_path):
    (tmp_path / "probe.txt").write_text("Analyze {{smiles}}", encoding="utf-8")
    lib = TemplateLibrary(tmp_path)
    messages = render_prompt("probe", {"smiles": "CCO"}, lib)
    assert [m.content for m in messages] == ["Analyze CCO"]
    assert messages[0].role == "user"


def test_render_missing_placeholder_named(tmp_path):
    (tmp_path / "probe.txt").write_text("Pockets: {{pockets}}", encoding="utf-8")
    lib = TemplateLibrary(tmp_path)
    with pytest.raises(TemplateError, match="pockets"):
        render_prompt("probe", {}, lib)


def test_render_repeated_placeholder(tmp_path):
    (tmp_path / "probe.txt").write_text("{{x}} and again {{x}}", encoding="utf-8")
    lib = TemplateLibrary(tmp_path)
    rendered = render_prompt("probe", {"x": "VALUE"}, lib)[0].content
    # String-scan oracle: no placeholder survives, the binding appears twice.
    assert "{{" not in rendered
    assert rendered.count("VALUE") == 2


def test_render_unknown_template(tmp_path):
    lib = TemplateLibrary(tmp_path)
    with pytest.raises(TemplateError, match="nope"):
        render_prompt("nope", {}, lib)


def test_render_system_section(tmp_path):
    (tmp_path / "probe.txt").write_text("You are {{role}}.\n---\nDo {{thing}}.", encoding="utf-8")
    lib = TemplateLibrary(tmp_path)
    messages = render_prompt("probe", {"role": "an assistant", "thing": "it"}, lib)
    assert [m.role for m in messages] == ["system", "user"]
    assert messages[0].content == "You are an assistant."


def test_packaged_templates_render():
    for template_id, bindings in [
        ("molecule_analysis", {"query_profile": "profile"}),
    ]:
        messages = render_prompt(template_id, bindings)
        assert len(messages) == 2
        assert messages[1].role == "user"


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


def test_mock_pure_function_of_seed_and_request():
    request = _request("Describe the query molecule scaffold.", n=2)
    first = MockBackend(seed=7).sample(request)
    second = MockBackend(seed=7).sample(request)
    assert first.texts == second.texts
    assert MockBackend(seed=8).sample(request).texts != first.texts


def test_mock_golden_transcript():
    # Frozen once; guards platform- and refactor-drift in the mock stream.
    request = _request("Describe the query molecule scaffold.", n=2)
    assert MockBackend(seed=7).sample(request).texts == (
        "The saturated pocket geometry is consistent with the observed contacts. "
        "Overall the scaffold is consistent with the observed contacts.",
        "The flexible ring system limits membrane permeability. "
        "Overall the substituent layout hints at an allosteric preference.",
    )


def test_mock_reads_options_and_cues():
    picks = MockBackend(seed=7).sample(_request("Options: P1, P2\nSelect exactly one protein id."))
    assert picks.texts == ("Weighing the evidence, pick P2.",)
    judgment = MockBackend(seed=7).sample(_request("Answer yes or no.", n=4))
    assert all(t.startswith(("Yes.", "No.")) for t in judgment.texts)


def test_scripted_backend_in_order_and_exhaustion():
    backend = ScriptedBackend(["first reply", "second reply"])
    response = sample(backend, _request("anything", n=2))
    assert response.texts == ("first reply", "second reply")
    with pytest.raises(BackendError, match="exhausted"):
        backend.sample(_request("more"))


def test_token_accounting_is_additive():
    backend = MockBackend(seed=3)
    requests = [_request("one two three", n=2), _request("four five", n=1)]
    responses = [backend.sample(r) for r in requests]
    total = sum(r.prompt_tokens + r.completion_tokens for r in responses)
    assert total == sum(r.prompt_tokens for r in responses) + sum(
        r.completion_tokens for r in responses
    )
    assert responses[0].prompt_tokens == 3


# ---------------------------------------------------------------------------
# HTTP backend against a recorded-exchange fake transport
# ---------------------------------------------------------------------------


class FakeResponse:
    def __init__(self, status_code=200, payload=None):
        self.status_code = status_code
        self._payload = payload or {}

    def json(self):
        return self._payload


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append({"url": url, "json": json, "headers": headers})
        result = self.responses.pop(0)
        if isinstance(result, Exception):
            raise result
        return result


def _chat_payload(texts, usage=True):
    payload = {"choices": [{"message": {"content": t}} for t in texts]}
    if usage:
        payload["usage"] = {"prompt_tokens": 11, "completion_tokens": 7}
    return payload


def test_http_backend_happy_path(monkeypatch):
    monkeypatch.setenv("DRUGMCTS_API_KEY", "sk-test")
    session = FakeSession([FakeResponse(payload=_chat_payload(["a", "b", "c", "d"]))])
    backend = HttpBackend("http://llm.local/v1", "toy-model", session=session, sleep=lambda s: None)
    response = backend.sample(_request("question", n=4))
    assert response.texts == ("a", "b", "c", "d")
    assert response.prompt_tokens == 11
    call = session.calls[0]
    assert call["url"] == "http://llm.local/v1/chat/completions"
    assert call["json"]["n"] == 4
    assert call["json"]["model"] == "toy-model"
    assert call["headers"]["Authorization"] == "Bearer sk-test"


def test_http_backend_retries_then_succeeds():
    import requests

    sleeps = []
    session = FakeSession(
        [
            requests.ConnectionError("down"),
            FakeResponse(status_code=503),
            FakeResponse(payload=_chat_payload(["ok"])),
        ]
    )
    backend = HttpBackend(
        "http://llm.local/v1", "toy-model", max_retries=3, session=session, sleep=sleeps.append
    )
    response = backend.sample(_request("question"))
    # A success after retries is indistinguishable from a first-try success.
    assert response.texts == ("ok",)
    assert len(sleeps) == 2  # exponential backoff happened twice


def test_http_backend_gives_up_after_retries():
    session = FakeSession([FakeResponse(status_code=500)] * 3)
    backend = HttpBackend(
        "http://llm.local/v1", "toy-model", max_retries=3, session=session, sleep=lambda s: None
    )
    with pytest.raises(BackendError, match="after 3 attempts"):
        backend.sample(_request("question"))


def test_http_backend_malformed_response():
    session = FakeSession([FakeResponse(payload={"nonsense": True})])
    backend = HttpBackend("http://llm.local/v1", "toy-model", session=session, sleep=lambda s: None)
    with pytest.raises(BackendError, match="malformed"):
        backend.sample(_request("question"))


def test_http_backend_wrong_choice_count():
    session = FakeSession([FakeResponse(payload=_chat_payload(["only one"]))])
    backend = HttpBackend("http://llm.local/v1", "toy-model", session=session, sleep=lambda s: None)
    with pytest.raises(BackendError, match="choices"):
        backend.sample(_request("question", n=2))


# ---------------------------------------------------------------------------
# sample_distinct
# ---------------------------------------------------------------------------


def test_sample_distinct_dedups_normalized():
    backend = ScriptedBackend(["Answer A", "answer  a", "Answer B", "Answer C"])
    texts, responses = sample_distinct(backend, _request("q").messages, want=4, temperature=0.8)
    # The normalized duplicate collapses; the failing top-up batch is tolerated.
    assert texts == ["Answer A", "Answer B", "Answer C"]
    assert len(responses) == 1


def test_sample_distinct_first_batch_failure_propagates():
    backend = ScriptedBackend(["lonely"])
    with pytest.raises(BackendError, match="exhausted"):
        sample_distinct(backend, _request("q").messages, want=4, temperature=0.8)


def test_sample_distinct_stops_when_satisfied():
    backend = ScriptedBackend(["A", "B", "C", "D", "E", "F"])
    texts, responses = sample_distinct(backend, _request("q").messages, want=2, temperature=0.8)
    assert texts == ["A", "B"]
    assert backend.consumed == 2


def test_sample_distinct_uses_extra_batches():
    backend = ScriptedBackend(["A", "A", "B", "A", "C", "C"])
    texts, _ = sample_distinct(backend, _request("q").messages, want=3, temperature=0.8, max_batches=3)
    assert texts == ["A", "B", "C"]
    assert backend.consumed == 6


def test_sample_distinct_fewer_when_unattainable():
    backend = ScriptedBackend(["same"] * 9)
    texts, _ = sample_distinct(backend, _request("q").messages, want=3, temperature=0.8)
    assert texts == ["same"]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_parse_id_list_direct_mentions():
    assert parse_id_list("I select M2 and M7.", {"M1", "M2", "M7"}) == ["M2", "M7"]


def test_parse_id_list_no_valid_mentions():
    assert parse_id_list("Nothing relevant here.", {"M1", "M2"}) == []


def test_parse_id_list_dedup_and_boundaries():
    # Scan-and-dedup oracle: "M2, M2, M10" keeps each valid id once, in order.
    assert parse_id_list("M2, M2, M10", {"M2", "M10"}) == ["M2", "M10"]
    # "M2" must not fire inside "M20".
    assert parse_id_list("Candidates M20 and M3.", {"M2", "M3"}) == ["M3"]


def test_parse_id_list_bullets_and_prose():
    text = "Keep:\n- P3\n- P1\nbecause both look plausible"
    assert parse_id_list(text, {"P1", "P2", "P3"}) == ["P3", "P1"]


@given(st.lists(st.sampled_from(["M1", "M2", "M3", "M44"]), max_size=8))
def test_parse_id_list_subset_property(mentions):
    text = " and ".join(mentions)
    result = parse_id_list(text, {"M1", "M2", "M3"})
    assert set(result) <= {"M1", "M2", "M3"}
    assert len(result) == len(set(result))


def test_parse_yes_no_leading_tokens():
    assert parse_yes_no("Yes, a strong interaction is likely.") == "yes"
    assert parse_yes_no("No.") == "no"


def test_parse_yes_no_indeterminate():
    # Lexicon-scan oracle: neither word appears standalone.
    assert parse_yes_no("It is unclear.") == "indeterminate"
    assert parse_yes_no("Notably, nobody knows.") == "indeterminate"


def test_parse_yes_no_first_match_wins():
    assert parse_yes_no("no, wait - yes") == "no"
    assert parse_yes_no("I'd say yes although no is defensible") == "yes"


def test_parse_yes_no_custom_lexicon():
    assert parse_yes_no("Affirmative.", ("yes", "affirmative"), ("no",)) == "yes"


def test_normalize_answer():
    assert normalize_answer("  Mixed   CASE\ttext \n") == "mixed case text"


def test_request_rejects_empty_message():
    with pytest.raises(ValueError):
        PromptMessage(role="user", content="")
    with pytest.raises(ValueError):
        SamplingRequest(messages=(), temperature=0.8, n=0)
