"""Entailment backends: remote inference client, offline mock, result cache.

All backends answer (premise, hypothesis) pairs with a probability triple
over entailment / neutral / contradiction. The remote client speaks the
sidecar wire protocol:

    POST {base_url}/v1/classify
    request:  {"pairs": [{"premise": "...", "hypothesis": "..."}, ...]}
    response: {"verdicts": [{"entailment": 0.64, "neutral": 0.30,
                             "contradiction": 0.06}, ...]}

with verdicts in request order. The mock backend is a deterministic
token-overlap oracle so the whole evaluation pipeline runs offline.
"""

from __future__ import annotations

import os
import re
import threading
import time
from dataclasses import dataclass

import requests

from .errors import ProtocolError, TransportError

NLI_URL_ENV = "SGSACC_NLI_URL"

PROBABILITY_SUM_TOLERANCE = 1e-4

NLI_LABELS = ("entailment", "neutral", "contradiction")

# Stop words dropped from hypotheses by the mock oracle: articles, copulas
# and the glue tokens the reference templates introduce.
MOCK_STOP_WORDS = frozenset(
    {"the", "a", "an", "is", "are", "of", "to", "whether", "yes", "no", "in", "and"}
)
NEGATION_TOKENS = frozenset({"not", "no"})

_TOKEN_RE = re.compile(r"[a-z0-9']+")


def _tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class NliPair:
    premise: str
    hypothesis: str

    def __post_init__(self):
        if not self.premise or not self.hypothesis:
            raise ValueError("premise and hypothesis must be non-empty")


@dataclass(frozen=True)
class NliVerdict:
    """Probability triple over the three NLI classes."""

    p_entailment: float
    p_neutral: float
    p_contradiction: float

    def __post_init__(self):
        probs = (self.p_entailment, self.p_neutral, self.p_contradiction)
        if any(p < 0.0 or p > 1.0 for p in probs):
            raise ValueError(f"probabilities must lie in [0, 1], got {probs}")
        if abs(sum(probs) - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ValueError(f"probabilities must sum to 1, got {sum(probs)}")

    @property
    def label(self) -> str:
        """Argmax label; ties break entailment > neutral > contradiction."""
        probs = (self.p_entailment, self.p_neutral, self.p_contradiction)
        best = max(range(3), key=lambda i: probs[i])
        return NLI_LABELS[best]

    @property
    def is_entailment(self) -> bool:
        return self.label == "entailment"


def _require_pairs(pairs):
    if not pairs:
        raise ValueError("classify_batch requires a non-empty list of pairs")


class NliBackend:
    """Common interface; subclasses override classify or classify_batch."""

    name = "base"

    def classify(self, pair: NliPair) -> NliVerdict:
        return self.classify_batch([pair])[0]

    def classify_batch(self, pairs: list[NliPair]) -> list[NliVerdict]:
        _require_pairs(pairs)
        return [self.classify(pair) for pair in pairs]


class MockNliBackend(NliBackend):
    """Deterministic token-overlap oracle for offline runs.

    Both texts are lowercased and stripped of punctuation, and stop words are
    dropped from the hypothesis. If every remaining hypothesis token occurs
    in the premise, the pair is an entailment (1, 0, 0). Failing that, if the
    hypothesis carries a negation token whose removal would have produced an
    entailment, the pair is a contradiction (0, 0, 1). Everything else is
    neutral (0, 1, 0).
    """

    name = "mock"

    def classify(self, pair: NliPair) -> NliVerdict:
        premise_tokens = set(_tokens(pair.premise))
        hypothesis_tokens = _tokens(pair.hypothesis)
        content = [t for t in hypothesis_tokens if t not in MOCK_STOP_WORDS]
        if all(t in premise_tokens for t in content):
            return NliVerdict(1.0, 0.0, 0.0)
        if any(t in NEGATION_TOKENS for t in hypothesis_tokens):
            affirmed = [t for t in content if t not in NEGATION_TOKENS]
            if all(t in premise_tokens for t in affirmed):
                return NliVerdict(0.0, 0.0, 1.0)
        return NliVerdict(0.0, 1.0, 0.0)

    def classify_batch(self, pairs: list[NliPair]) -> list[NliVerdict]:
        _require_pairs(pairs)
        return [self.classify(pair) for pair in pairs]


class RemoteNliBackend(NliBackend):
    """HTTP client for the inference sidecar.

    Transient failures (connection errors, HTTP 5xx such as model-not-ready)
    are retried with exponential backoff; 4xx responses and malformed payloads
    fail immediately as protocol errors. A failing chunk fails the whole
    batch: no partial results are returned.
    """

    name = "remote"

    def __init__(
        self,
        base_url: str | None = None,
        *,
        timeout: float = 60.0,
        max_attempts: int = 3,
        backoff: float = 0.5,
        chunk_size: int = 64,
        session: requests.Session | None = None,
    ):
        url = base_url or os.environ.get(NLI_URL_ENV)
        if not url:
            raise ValueError(f"no backend URL given and {NLI_URL_ENV} is not set")
        self.base_url = url.rstrip("/")
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.chunk_size = chunk_size
        self._session = session or requests.Session()

    def classify_batch(self, pairs: list[NliPair]) -> list[NliVerdict]:
        _require_pairs(pairs)
        verdicts: list[NliVerdict] = []
        for start in range(0, len(pairs), self.chunk_size):
            verdicts.extend(self._classify_chunk(pairs[start : start + self.chunk_size]))
        return verdicts

    def _classify_chunk(self, chunk: list[NliPair]) -> list[NliVerdict]:
        body = {
            "pairs": [{"premise": p.premise, "hypothesis": p.hypothesis} for p in chunk]
        }
        last_status = None
        last_error = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self._session.post(
                    self.base_url + "/v1/classify", json=body, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = exc
            else:
                if response.status_code == 200:
                    return self._parse_response(response, len(chunk))
                last_status = response.status_code
                if response.status_code < 500:
                    raise ProtocolError(
                        f"backend rejected request with HTTP {response.status_code}: "
                        f"{response.text[:200]}"
                    )
            if attempt < self.max_attempts:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
        raise TransportError(
            f"backend {self.base_url} unreachable after {self.max_attempts} attempts "
            f"(last status: {last_status}, last error: {last_error})",
            attempts=self.max_attempts,
            last_status=last_status,
        )

    @staticmethod
    def _parse_response(response, expected: int) -> list[NliVerdict]:
        try:
            payload = response.json()
        except ValueError as exc:
            raise ProtocolError(f"backend returned non-JSON body: {exc}") from exc
        verdicts = payload.get("verdicts") if isinstance(payload, dict) else None
        if not isinstance(verdicts, list) or len(verdicts) != expected:
            raise ProtocolError(
                f"backend returned {0 if not isinstance(verdicts, list) else len(verdicts)} "
                f"verdicts for {expected} pairs"
            )
        parsed = []
        for entry in verdicts:
            try:
                parsed.append(
                    NliVerdict(
                        p_entailment=float(entry["entailment"]),
                        p_neutral=float(entry["neutral"]),
                        p_contradiction=float(entry["contradiction"]),
                    )
                )
            except (TypeError, KeyError, ValueError) as exc:
                raise ProtocolError(f"backend returned invalid verdict {entry!r}: {exc}") from exc
        return parsed


class CachedNliBackend(NliBackend):
    """Verdict cache keyed by the exact (premise, hypothesis) string pair.

    No key normalization: premise augmentation deliberately changes the
    premise string. Reads are concurrent, writes serialized; a key computed
    twice under a race converges because identical inputs yield identical
    verdicts.
    """

    def __init__(self, inner: NliBackend):
        self.inner = inner
        self._store: dict[tuple[str, str], NliVerdict] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @property
    def name(self) -> str:
        return self.inner.name

    def classify_batch(self, pairs: list[NliPair]) -> list[NliVerdict]:
        _require_pairs(pairs)
        results: list[NliVerdict | None] = [None] * len(pairs)
        missing_order: list[NliPair] = []
        missing_positions: dict[tuple[str, str], list[int]] = {}
        with self._lock:
            for i, pair in enumerate(pairs):
                key = (pair.premise, pair.hypothesis)
                cached = self._store.get(key)
                if cached is not None:
                    self.hits += 1
                    results[i] = cached
                else:
                    self.misses += 1
                    if key not in missing_positions:
                        missing_positions[key] = []
                        missing_order.append(pair)
                    missing_positions[key].append(i)
        if missing_order:
            fresh = self.inner.classify_batch(missing_order)
            with self._lock:
                for pair, verdict in zip(missing_order, fresh):
                    key = (pair.premise, pair.hypothesis)
                    self._store[key] = verdict
                    for i in missing_positions[key]:
                        results[i] = verdict
        return results  # type: ignore[return-value]

    def cache_size(self) -> int:
        with self._lock:
            return len(self._store)


def create_backend(spec: str, *, cached: bool = True) -> NliBackend:
    """Build a backend from a config string: "mock", "remote" or a URL."""
    if spec == "mock":
        backend: NliBackend = MockNliBackend()
    elif spec == "remote":
        backend = RemoteNliBackend()
    elif spec.startswith(("http://", "https://")):
        backend = RemoteNliBackend(spec)
    else:
        raise ValueError(f"unknown NLI backend {spec!r} (use 'mock', 'remote' or a URL)")
    return CachedNliBackend(backend) if cached else backend
