"""Shared HTTP POST helper with bounded retries.

Retries connection failures and retryable status codes (429 plus any 5xx)
with exponential backoff and jitter, honoring a numeric Retry-After header
when the server sends one. Anything else surfaces immediately.
"""

from __future__ import annotations

import logging
import random
import time

import requests

logger = logging.getLogger(__name__)

RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})


def post_json_with_retry(
    session: requests.Session,
    url: str,
    payload: dict,
    *,
    headers: dict | None = None,
    timeout: float = 30.0,
    max_attempts: int = 5,
    backoff_base: float = 0.5,
    backoff_cap: float = 30.0,
    error_cls: type[Exception] = RuntimeError,
    sleep=time.sleep,
) -> dict:
    """POST a JSON payload and return the decoded JSON response body.

    Raises error_cls when attempts are exhausted, on a non-retryable error
    status, or when the response body is not a JSON object.
    """
    if max_attempts < 1:
        raise ValueError(f"max_attempts must be >= 1, got {max_attempts}")
    last_error = "no attempt made"
    for attempt in range(1, max_attempts + 1):
        retry_after = None
        try:
            response = session.post(url, json=payload, headers=headers, timeout=timeout)
        except requests.RequestException as exc:
            last_error = f"request failed: {exc}"
        else:
            if response.status_code == 200:
                try:
                    body = response.json()
                except ValueError as exc:
                    raise error_cls(f"{url}: response is not JSON: {exc}") from None
                if not isinstance(body, dict):
                    raise error_cls(f"{url}: expected a JSON object in the response")
                return body
            if response.status_code not in RETRYABLE_STATUSES:
                raise error_cls(
                    f"{url}: HTTP {response.status_code}: {response.text[:200]}"
                )
            last_error = f"HTTP {response.status_code}"
            header = response.headers.get("Retry-After")
            if header is not None:
                try:
                    retry_after = max(0.0, float(header))
                except ValueError:
                    retry_after = None
        if attempt == max_attempts:
            break
        if retry_after is not None:
            delay = retry_after
        else:
            delay = min(backoff_cap, backoff_base * (2 ** (attempt - 1)))
            delay *= 0.5 + random.random() / 2
        logger.warning(
            "retrying %s (attempt %d/%d) after %s, sleeping %.2fs",
            url, attempt, max_attempts, last_error, delay,
        )
        sleep(delay)
    raise error_cls(f"{url}: giving up after {max_attempts} attempts ({last_error})")
