"""Hypothesis generation behind pluggable paraphrase/translation providers.

Hypotheses are produced in two steps: the English source is paraphrased,
then the paraphrase is translated into Korean. Real services plug in via
:class:`HttpProvider` (credentials only from environment variables, never
from files); :class:`MockProvider` is fully offline and deterministic so
the pipeline is testable without network access. Every request/response is
appended to a JSONL audit log.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Protocol, Sequence, Union

from .taxonomy import TranslationUnit

__all__ = [
    "PARAPHRASE_PROMPT_TEMPLATE",
    "PROMPT_PLACEHOLDER",
    "ENV_BASE_URL",
    "ENV_API_KEY",
    "ProviderError",
    "ProviderSpec",
    "Provider",
    "MockProvider",
    "HttpProvider",
    "render_prompt",
    "BuildFailure",
    "BuildReport",
    "build_hypotheses",
]

PROMPT_PLACEHOLDER = "[English sentence]"

PARAPHRASE_PROMPT_TEMPLATE = (
    "Please rewrite the given sentence in\n"
    "English while maintaining the same\n"
    "meaning, using different vocabulary\n"
    "or sentence structures:\n"
    "[English sentence]"
)

ENV_BASE_URL = "PROVIDER_BASE_URL"
ENV_API_KEY = "PROVIDER_API_KEY"


class ProviderError(RuntimeError):
    pass


def render_prompt(source: str, template: str = PARAPHRASE_PROMPT_TEMPLATE) -> str:
    if PROMPT_PLACEHOLDER not in template:
        raise ValueError(f"prompt template lacks the placeholder {PROMPT_PLACEHOLDER!r}")
    return template.replace(PROMPT_PLACEHOLDER, source)


@dataclass(frozen=True)
class ProviderSpec:
    """Descriptor for external paraphrase/translation endpoints.

    ``base_url`` falls back to the PROVIDER_BASE_URL environment variable;
    the API key is always read from the environment (``api_key_env``).
    ``mock`` selects the offline provider regardless of the URL fields.
    """

    base_url: Optional[str] = None
    prompt_template: str = PARAPHRASE_PROMPT_TEMPLATE
    api_key_env: str = ENV_API_KEY
    mock: bool = True

    def __post_init__(self) -> None:
        if PROMPT_PLACEHOLDER not in self.prompt_template:
            raise ValueError(f"prompt template lacks the placeholder {PROMPT_PLACEHOLDER!r}")

    def build(self) -> "Provider":
        if self.mock:
            return MockProvider(prompt_template=self.prompt_template)
        return HttpProvider(self)


class Provider(Protocol):
    def paraphrase(self, source: str) -> str: ...

    def translate(self, text: str) -> str: ...


class MockProvider:
    """Offline provider: the paraphrase is the source unchanged and the
    translation is a deterministic placeholder."""

    def __init__(self, prompt_template: str = PARAPHRASE_PROMPT_TEMPLATE):
        self.prompt_template = prompt_template

    def paraphrase(self, source: str) -> str:
        render_prompt(source, self.prompt_template)  # validates the template
        return source

    def translate(self, text: str) -> str:
        return f"[ko] {text}"


class HttpProvider:
    """POSTs to ``{base_url}/paraphrase`` and ``{base_url}/translate``.

    Both endpoints accept ``{"text": ...}`` (the paraphrase endpoint gets
    the fully rendered prompt) and answer ``{"text": ...}``.
    """

    def __init__(self, spec: ProviderSpec, timeout: float = 30.0):
        base_url = spec.base_url or os.environ.get(ENV_BASE_URL)
        if not base_url:
            raise ProviderError(
                f"no provider base URL configured (set {ENV_BASE_URL} or ProviderSpec.base_url)"
            )
        self.base_url = base_url.rstrip("/")
        self.prompt_template = spec.prompt_template
        self.api_key = os.environ.get(spec.api_key_env)
        self.timeout = timeout

    def _post(self, endpoint: str, text: str) -> str:
        import requests

        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(
                f"{self.base_url}/{endpoint}",
                json={"text": text},
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            return str(response.json()["text"])
        except Exception as exc:
            raise ProviderError(f"{endpoint} request failed: {exc}") from exc

    def paraphrase(self, source: str) -> str:
        return self._post("paraphrase", render_prompt(source, self.prompt_template))

    def translate(self, text: str) -> str:
        return self._post("translate", text)


@dataclass(frozen=True)
class BuildFailure:
    unit_id: str
    error: str
    attempts: int


@dataclass(frozen=True)
class BuildReport:
    units: tuple[TranslationUnit, ...]
    failures: tuple[BuildFailure, ...]

    @property
    def completed(self) -> tuple[TranslationUnit, ...]:
        return tuple(u for u in self.units if u.hypothesis is not None)


class _AuditLog:
    def __init__(self, path: Optional[Union[str, Path]]):
        self._path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        if self._path is not None:
            self._path.parent.mkdir(parents=True, exist_ok=True)

    def write(self, record: dict) -> None:
        if self._path is None:
            return
        line = json.dumps(record, ensure_ascii=False)
        with self._lock:
            with self._path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")


def _build_one(
    unit: TranslationUnit,
    provider: Provider,
    audit: _AuditLog,
    retries: int,
) -> tuple[TranslationUnit, Optional[BuildFailure]]:
    if unit.hypothesis is not None:
        audit.write({"unit_id": unit.id, "step": "skip", "reason": "hypothesis present"})
        return unit, None

    last_error = ""
    for attempt in range(1, retries + 2):
        try:
            paraphrase = provider.paraphrase(unit.source)
            audit.write(
                {
                    "unit_id": unit.id,
                    "step": "paraphrase",
                    "attempt": attempt,
                    "request": unit.source,
                    "response": paraphrase,
                }
            )
            hypothesis = provider.translate(paraphrase)
            audit.write(
                {
                    "unit_id": unit.id,
                    "step": "translate",
                    "attempt": attempt,
                    "request": paraphrase,
                    "response": hypothesis,
                }
            )
            return replace(unit, hypothesis=hypothesis), None
        except ProviderError as exc:
            last_error = str(exc)
            audit.write(
                {"unit_id": unit.id, "step": "error", "attempt": attempt, "error": last_error}
            )
            time.sleep(0)
    return unit, BuildFailure(unit_id=unit.id, error=last_error, attempts=retries + 1)


def build_hypotheses(
    units: Sequence[TranslationUnit],
    provider: Provider,
    audit_log: Optional[Union[str, Path]] = None,
    retries: int = 2,
    max_workers: int = 1,
) -> BuildReport:
    """Fill the hypothesis of every unit via paraphrase-then-translate.

    Idempotent: units that already carry a hypothesis are skipped. A
    provider failure on one unit does not abort the run; the partial result
    keeps every successful hypothesis and the failure is reported with its
    retry count. Result order matches input order regardless of
    ``max_workers``.
    """
    audit = _AuditLog(audit_log)
    if max_workers <= 1:
        outcomes = [_build_one(unit, provider, audit, retries) for unit in units]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(
                pool.map(lambda unit: _build_one(unit, provider, audit, retries), units)
            )
    return BuildReport(
        units=tuple(unit for unit, _ in outcomes),
        failures=tuple(failure for _, failure in outcomes if failure is not None),
    )
