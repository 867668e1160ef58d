"""Sampling backends, prompt templates, and answer parsing.

Three interchangeable backends drive every agent:

* ``MockBackend``: a pure function of (seed, request); reads the rendered
  prompt for an ``Options:`` line or a yes/no instruction and fabricates a
  plausible answer. Golden transcripts are stable across runs and platforms.
* ``ScriptedBackend``: canned replies consumed in request order.
* ``HttpBackend``: OpenAI-compatible ``/chat/completions`` endpoint with
  bearer auth from ``DRUGMCTS_API_KEY`` and bounded retries.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import requests

logger = logging.getLogger(__name__)

API_KEY_ENV = "DRUGMCTS_API_KEY"


class BackendError(Exception):
    """Transport failure after retries, malformed reply, or exhausted fixture."""


class TemplateError(Exception):
    """Unknown template or a placeholder without a binding."""


@dataclass(frozen=True)
class PromptMessage:
    role: str  # system | user | assistant
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"unknown role {self.role!r}")
        if not self.content:
            raise ValueError("message content must be nonempty")


@dataclass(frozen=True)
class SamplingRequest:
    messages: tuple[PromptMessage, ...]
    temperature: float
    n: int
    max_tokens: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class SamplingResponse:
    texts: tuple[str, ...]
    prompt_tokens: int
    completion_tokens: int


def approx_token_count(text: str) -> int:
    """Whitespace-token approximation used by the mock and scripted backends."""
    return len(text.split())


def _prompt_token_estimate(messages) -> int:
    return sum(approx_token_count(m.content) for m in messages)


def request_fingerprint(request: SamplingRequest) -> str:
    """Stable digest of a request; used for mock seeding and trace records."""
    payload = {
        "messages": [[m.role, m.content] for m in request.messages],
        "temperature": request.temperature,
        "n": request.n,
        "max_tokens": request.max_tokens,
    }
    blob = json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------

_PLACEHOLDER = re.compile(r"\{\{([A-Za-z0-9_]+)\}\}")
_SECTION_SEPARATOR = "\n---\n"


class TemplateLibrary:
    """Prompt templates as text files with {{placeholder}} slots.

    A line containing only ``---`` splits an optional system section from
    the user section; without it the whole file is the user message.
    """

    def __init__(self, directory: Optional[str] = None):
        self._directory = Path(directory) if directory is not None else None
        self._cache: dict = {}

    def _read(self, template_id: str) -> str:
        if template_id in self._cache:
            return self._cache[template_id]
        if self._directory is not None:
            path = self._directory / f"{template_id}.txt"
            if not path.is_file():
                raise TemplateError(f"unknown template {template_id!r} ({path})")
            text = path.read_text(encoding="utf-8")
        else:
            ref = resources.files(__package__).joinpath("templates", f"{template_id}.txt")
            if not ref.is_file():
                raise TemplateError(f"unknown template {template_id!r}")
            text = ref.read_text(encoding="utf-8")
        self._cache[template_id] = text
        return text

    def render(self, template_id: str, bindings: dict) -> tuple[PromptMessage, ...]:
        raw = self._read(template_id)

        def substitute(text: str) -> str:
            def repl(match):
                name = match.group(1)
                if name not in bindings:
                    raise TemplateError(
                        f"template {template_id!r}: no binding for placeholder {name!r}"
                    )
                return bindings[name]

            return _PLACEHOLDER.sub(repl, text)

        if _SECTION_SEPARATOR in raw:
            system_part, user_part = raw.split(_SECTION_SEPARATOR, 1)
            return (
                PromptMessage(role="system", content=substitute(system_part.strip())),
                PromptMessage(role="user", content=substitute(user_part.strip())),
            )
        return (PromptMessage(role="user", content=substitute(raw.strip())),)


_default_library = TemplateLibrary()


def render_prompt(template_id: str, bindings: dict, library: Optional[TemplateLibrary] = None):
    """Render a template into prompt messages; deterministic for fixed inputs."""
    lib = library if library is not None else _default_library
    return lib.render(template_id, bindings)


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------

_OPTIONS_LINE = re.compile(r"(?im)^options:\s*(.+?)\s*$")
_YES_NO_CUE = re.compile(r"(?i)answer\s+yes\s+or\s+no")
_SINGLE_CUE = re.compile(r"(?i)exactly\s+one")

_MOCK_ADJECTIVES = (
    "compact", "flexible", "rigid", "lipophilic", "polar",
    "aromatic", "saturated", "branched", "planar", "charged",
)
_MOCK_FEATURES = (
    "scaffold", "ring system", "hydrogen-bonding pattern",
    "charge distribution", "substituent layout", "pocket geometry",
)
_MOCK_VERDICTS = (
    "favors selective binding", "suggests broad target engagement",
    "limits membrane permeability", "supports deep pocket access",
    "hints at an allosteric preference", "is consistent with the observed contacts",
)
_MOCK_SELECT_PHRASES = (
    "The strongest option is", "I would select", "The best supported choice is",
    "Weighing the evidence, pick",
)
_MOCK_JUDGMENT_PHRASES = (
    "The pocket contacts support this call.",
    "The profile match is decisive here.",
    "Literature context tips the balance.",
    "The binding geometry argues this way.",
)


def _extract_options(prompt: str) -> list[str]:
    match = _OPTIONS_LINE.search(prompt)
    if not match:
        return []
    return [token.strip() for token in match.group(1).split(",") if token.strip()]


class MockBackend:
    """Deterministic stand-in for an LLM endpoint.

    Every call is a pure function of (seed, request): the same request
    always yields the same texts, so searches are replayable bit-for-bit.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def sample(self, request: SamplingRequest) -> SamplingResponse:
        digest = hashlib.sha256(
            f"{self.seed}|{request_fingerprint(request)}".encode("utf-8")
        ).digest()
        rng = random.Random(int.from_bytes(digest[:8], "big"))
        prompt = "\n".join(m.content for m in request.messages)
        texts = tuple(self._synthesize(rng, prompt) for _ in range(request.n))
        return SamplingResponse(
            texts=texts,
            prompt_tokens=_prompt_token_estimate(request.messages),
            completion_tokens=sum(approx_token_count(t) for t in texts),
        )

    @staticmethod
    def _synthesize(rng: random.Random, prompt: str) -> str:
        options = _extract_options(prompt)
        if _YES_NO_CUE.search(prompt):
            verdict = rng.choice(("Yes", "No"))
            return f"{verdict}. {rng.choice(_MOCK_JUDGMENT_PHRASES)}"
        if options and _SINGLE_CUE.search(prompt):
            return f"{rng.choice(_MOCK_SELECT_PHRASES)} {rng.choice(options)}."
        if options:
            count = rng.randint(1, min(4, len(options)))
            picks = rng.sample(options, count)
            return f"Selected candidates: {', '.join(picks)}."
        sentence = (
            f"The {rng.choice(_MOCK_ADJECTIVES)} {rng.choice(_MOCK_FEATURES)} "
            f"{rng.choice(_MOCK_VERDICTS)}."
        )
        if rng.random() < 0.5:
            sentence += (
                f" Overall the {rng.choice(_MOCK_FEATURES)} "
                f"{rng.choice(_MOCK_VERDICTS)}."
            )
        return sentence


class ScriptedBackend:
    """Replays canned texts in request order; raises when the fixture runs dry."""

    def __init__(self, replies: Sequence[str]):
        self._replies = list(replies)
        self._cursor = 0

    @property
    def consumed(self) -> int:
        return self._cursor

    def sample(self, request: SamplingRequest) -> SamplingResponse:
        if self._cursor + request.n > len(self._replies):
            raise BackendError(
                f"scripted fixture exhausted: need {request.n} replies, "
                f"{len(self._replies) - self._cursor} left"
            )
        texts = tuple(self._replies[self._cursor:self._cursor + request.n])
        self._cursor += request.n
        return SamplingResponse(
            texts=texts,
            prompt_tokens=_prompt_token_estimate(request.messages),
            completion_tokens=sum(approx_token_count(t) for t in texts),
        )


class HttpBackend:
    """OpenAI-compatible chat-completions client with bounded retries."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: Optional[str] = None,
        max_retries: int = 3,
        backoff: float = 0.5,
        timeout: float = 120.0,
        session=None,
        sleep=time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.max_retries = max_retries
        self.backoff = backoff
        self.timeout = timeout
        self.session = session if session is not None else requests.Session()
        self._sleep = sleep

    def sample(self, request: SamplingRequest) -> SamplingResponse:
        payload = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
            "n": request.n,
        }
        if request.max_tokens is not None:
            payload["max_tokens"] = request.max_tokens
        headers = {"Content-Type": "application/json"}
        key = self.api_key or os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"

        url = f"{self.base_url}/chat/completions"
        last_error = None
        for attempt in range(self.max_retries):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.session.post(url, json=payload, headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                logger.warning("backend attempt %d failed: %s", attempt + 1, exc)
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"server status {resp.status_code}"
                logger.warning("backend attempt %d failed: %s", attempt + 1, last_error)
                continue
            if resp.status_code != 200:
                raise BackendError(f"server rejected request: status {resp.status_code}")
            return self._parse(resp, request)
        raise BackendError(f"backend unreachable after {self.max_retries} attempts ({last_error})")

    @staticmethod
    def _parse(resp, request: SamplingRequest) -> SamplingResponse:
        try:
            data = resp.json()
            choices = data["choices"]
            texts = tuple(choice["message"]["content"] for choice in choices)
        except (ValueError, KeyError, TypeError) as exc:
            raise BackendError(f"malformed server response: {exc}") from exc
        if len(texts) != request.n:
            raise BackendError(
                f"malformed server response: asked for {request.n} choices, got {len(texts)}"
            )
        usage = data.get("usage") or {}
        prompt_tokens = usage.get("prompt_tokens")
        completion_tokens = usage.get("completion_tokens")
        if prompt_tokens is None:
            prompt_tokens = _prompt_token_estimate(request.messages)
        if completion_tokens is None:
            completion_tokens = sum(approx_token_count(t) for t in texts)
        return SamplingResponse(
            texts=texts,
            prompt_tokens=int(prompt_tokens),
            completion_tokens=int(completion_tokens),
        )


@dataclass
class AgentRuntime:
    """Backend plus the template library every agent renders against."""

    backend: object
    library: Optional[TemplateLibrary] = None


def sample(backend, request: SamplingRequest) -> SamplingResponse:
    """Run one request and enforce the |texts| == n contract."""
    response = backend.sample(request)
    if len(response.texts) != request.n:
        raise BackendError(
            f"backend returned {len(response.texts)} texts for n={request.n}"
        )
    return response


def normalize_answer(text: str) -> str:
    """Lowercase, whitespace-collapsed form used for answer deduplication."""
    return " ".join(text.lower().split())


def sample_distinct(
    backend,
    messages,
    want: int,
    temperature: float,
    max_tokens: Optional[int] = None,
    max_batches: int = 3,
):
    """Collect up to ``want`` answers distinct under normalization.

    Issues batches of n=want until enough distinct, nonempty answers arrive
    or ``max_batches`` is exhausted; fewer answers are returned rather than
    padded. Top-up batches are best-effort: once at least one answer is in
    hand, a failing batch (e.g. an exhausted scripted fixture) ends the
    collection instead of aborting. Returns (texts, responses) with
    responses kept for token accounting.
    """
    texts: list[str] = []
    seen: set = set()
    responses = []
    for _ in range(max_batches):
        request = SamplingRequest(
            messages=tuple(messages), temperature=temperature, n=want, max_tokens=max_tokens
        )
        try:
            response = sample(backend, request)
        except BackendError:
            if texts:
                logger.warning("distinct-answer top-up batch failed; keeping %d answers", len(texts))
                break
            raise
        responses.append(response)
        for text in response.texts:
            norm = normalize_answer(text)
            if not norm or norm in seen:
                continue
            seen.add(norm)
            texts.append(text)
        if len(texts) >= want:
            break
    return texts[:want], responses


# ---------------------------------------------------------------------------
# Answer parsing
# ---------------------------------------------------------------------------


def parse_id_list(text: str, valid_ids) -> list[str]:
    """Ordered, deduplicated valid ids mentioned in the text.

    Ids match as standalone tokens (no alphanumeric neighbors), so "M2"
    never fires inside "M20"; order follows first occurrence.
    """
    found = []
    for vid in valid_ids:
        pattern = re.compile(r"(?<![A-Za-z0-9_])" + re.escape(vid) + r"(?![A-Za-z0-9_])")
        match = pattern.search(text)
        if match:
            found.append((match.start(), vid))
    found.sort()
    return [vid for _, vid in found]


def _first_lexicon_hit(lowered: str, words) -> Optional[int]:
    best = None
    for word in words:
        pattern = re.compile(r"(?<![a-z0-9])" + re.escape(word.lower()) + r"(?![a-z0-9])")
        match = pattern.search(lowered)
        if match is not None and (best is None or match.start() < best):
            best = match.start()
    return best


def parse_yes_no(text: str, affirmative=("yes", "affirmative"), negative=("no", "negative")) -> str:
    """Classify by the first standalone lexicon hit; ambiguity is indeterminate."""
    lowered = text.lower()
    pos = _first_lexicon_hit(lowered, affirmative)
    neg = _first_lexicon_hit(lowered, negative)
    if pos is None and neg is None:
        return "indeterminate"
    if neg is None:
        return "yes"
    if pos is None:
        return "no"
    if pos == neg:
        return "indeterminate"
    return "yes" if pos < neg else "no"
