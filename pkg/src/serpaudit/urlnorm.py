"""URL normalization: the identity rule behind every similarity metric.

Two captures only count as "the same result" if their URLs normalize to
the same string, so the transform is deliberately small and auditable:

1. unwrap engine redirect wrappers (e.g. /url?q=<target>) to the target,
2. lowercase the scheme and host,
3. drop the fragment,
4. drop tracking parameters on a configurable deny-list.

Everything else (path case, parameter order, encoding of values) is left
alone. normalize_url is idempotent.
"""
from __future__ import annotations

from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

from .errors import UrlNormalizationError

# Parameters dropped everywhere. Prefix rule: any utm_* parameter is dropped.
DEFAULT_DENY_PARAMS = frozenset({"gclid", "fbclid", "msclkid", "yclid"})

# A URL is treated as a redirect wrapper when its last path segment is one
# of these AND a known parameter carries an absolute http(s) target.
WRAPPER_PATH_SEGMENTS = frozenset({"url", "l", "rd", "redirect", "link", "aclk", "ck"})
WRAPPER_TARGET_PARAMS = ("q", "u", "url", "uddg", "target", "to")

_MAX_UNWRAP = 10


def _unwrap_once(parts) -> str | None:
    """Return the wrapped target URL, or None if this is not a wrapper."""
    segment = parts.path.rstrip("/").rsplit("/", 1)[-1].lower()
    if segment not in WRAPPER_PATH_SEGMENTS:
        return None
    params = dict(parse_qsl(parts.query, keep_blank_values=True))
    for name in WRAPPER_TARGET_PARAMS:
        target = params.get(name, "")
        if target.startswith(("http://", "https://")):
            return target
    return None


def normalize_url(raw: str, deny_params: frozenset[str] | set[str] | None = None) -> str:
    """Normalize *raw* into a canonical absolute http(s) URL.

    Raises UrlNormalizationError (carrying the raw string) when the input
    does not resolve to an absolute http(s) URL.
    """
    deny = DEFAULT_DENY_PARAMS if deny_params is None else frozenset(deny_params)
    if not isinstance(raw, str) or not raw.strip():
        raise UrlNormalizationError(str(raw), "empty input")
    current = raw.strip()

    for _ in range(_MAX_UNWRAP):
        try:
            parts = urlsplit(current)
        except ValueError as exc:
            raise UrlNormalizationError(raw, str(exc)) from None
        target = _unwrap_once(parts)
        if target is None:
            break
        current = target

    parts = urlsplit(current)
    scheme = parts.scheme.lower()
    if scheme not in ("http", "https") or not parts.netloc:
        raise UrlNormalizationError(raw)

    kept = [
        (name, value)
        for name, value in parse_qsl(parts.query, keep_blank_values=True)
        if name not in deny and not name.lower().startswith("utm_")
    ]
    return urlunsplit((scheme, parts.netloc.lower(), parts.path, urlencode(kept), ""))


def result_domain(url: str) -> str:
    """Domain label used for source classification.

    Lowercased host with any leading "www." removed and port dropped.
    (A full public-suffix registrable-domain lookup is out of scope;
    classifier suffix rules absorb subdomain variance.)
    """
    host = urlsplit(url).hostname or ""
    host = host.lower()
    if host.startswith("www."):
        host = host[4:]
    return host
