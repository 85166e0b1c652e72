"""Chat-completion endpoint configuration and client."""

import logging
import os
import threading
import time
from typing import Optional, Tuple

import requests
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import EndpointError
from ..utils.utils import read_json

logger = logging.getLogger(__name__)


class ModelEndpointConfig(BaseModel):
    """Where and how to query a chat-completion model.

    Parameters
    ----------
    base_url : str
        API root; requests go to ``{base_url}/chat/completions``.
    model : str
        Model name sent with every request.
    api_key_env : str
        Environment variable holding the bearer token.
    max_concurrency : int
        Largest number of requests in flight.
    max_attempts : int
        Attempts per request, the first one included.
    backoff : float
        Base delay in seconds; attempt ``k`` waits ``backoff * 2 ** (k - 1)``.
    timeout : float
        Request timeout in seconds.
    temperature : float
        Sampling temperature.
    max_tokens : int | None
        Completion length limit.
    similarity_weights : tuple of float
        Weights of rules, initial sources and target in graph similarity.
    self_correction_prompt : str | None
        Follow-up message sent when a generated story does not match its
        graph; ``{report}`` is replaced by the mismatch report.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    base_url: str
    model: str
    api_key_env: str = "OPENAI_API_KEY"
    max_concurrency: int = Field(default=4, ge=1)
    max_attempts: int = Field(default=3, ge=1)
    backoff: float = Field(default=1.0, ge=0)
    timeout: float = Field(default=60.0, gt=0)
    temperature: float = Field(default=0.0, ge=0)
    max_tokens: Optional[int] = Field(default=None, ge=1)
    similarity_weights: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    self_correction_prompt: Optional[str] = None

    @field_validator("similarity_weights")
    @classmethod
    def _check_weights(cls, value):
        if any(w < 0 for w in value) or abs(sum(value) - 1) > 1e-9:
            raise ValueError(
                f"similarity_weights must be non-negative and sum to 1, got {value}"
            )
        return value

    @classmethod
    def from_file(cls, fname):
        """Load a configuration from a JSON file."""
        return cls.model_validate(read_json(fname))


def _is_transient(exc):
    """Whether a failed request may succeed when sent again.

    Connection errors, timeouts, 429 and 5xx answers are transient; any other
    4xx answer is not.
    """
    if isinstance(exc, (requests.ConnectionError, requests.Timeout)):
        return True
    status = getattr(exc.response, "status_code", None)
    return status is not None and (status == 429 or status >= 500)


class ChatClient:
    """Blocking chat-completion client with bounded concurrency and retries.

    Parameters
    ----------
    config : ModelEndpointConfig
        The endpoint.
    session : requests.Session | None
        Session used for the requests (a new one by default).
    """

    def __init__(self, config, session=None):
        self.config = config
        self.session = session if session is not None else requests.Session()
        self._slots = threading.BoundedSemaphore(config.max_concurrency)

    def __repr__(self):
        """Return a summary of the client."""
        return f"<ChatClient | {self.config.model} at {self.url}>"

    @property
    def url(self):
        """The chat-completion URL."""
        return self.config.base_url.rstrip("/") + "/chat/completions"

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.config.api_key_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def _payload(self, messages):
        payload = {
            "model": self.config.model,
            "messages": list(messages),
            "temperature": self.config.temperature,
        }
        if self.config.max_tokens is not None:
            payload["max_tokens"] = self.config.max_tokens
        return payload

    def complete(self, messages):
        """Send a conversation and return the reply text.

        Parameters
        ----------
        messages : list of dict
            ``{"role": ..., "content": ...}`` messages.

        Returns
        -------
        content : str

        Raises
        ------
        EndpointError
            If every attempt failed, a non-transient error occurred or the
            reply has no message content.
        """
        payload = self._payload(messages)
        attempts = self.config.max_attempts
        for attempt in range(1, attempts + 1):
            try:
                with self._slots:
                    response = self.session.post(
                        self.url,
                        json=payload,
                        headers=self._headers(),
                        timeout=self.config.timeout,
                    )
                response.raise_for_status()
                break
            except requests.RequestException as exc:
                if attempt == attempts or not _is_transient(exc):
                    raise EndpointError(
                        f"{self.url} failed after {attempt} attempt(s): {exc}"
                    ) from exc
                delay = self.config.backoff * 2 ** (attempt - 1)
                logger.warning(
                    "Request to %s failed (%s); retry %d/%d in %.1f s",
                    self.url, exc, attempt, attempts - 1, delay,
                )
                time.sleep(delay)
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise EndpointError(f"Unexpected reply from {self.url}: {exc!r}") from exc
        if not isinstance(content, str):
            raise EndpointError(
                f"Unexpected reply from {self.url}: content is "
                f"{type(content).__name__}, not str"
            )
        return content
