"""Extract ordered organic result URLs from captured result pages.

Engine layouts drift, so extraction is data-driven: each engine has a rule
file naming `organic` selectors (anchors that are results) and `exclude`
selectors (ads, related-query boxes, navigation). Layout changes are a
rule-file update, not a code change.

Rule file format, one file per engine::

    # comment
    engine: simengine
    organic: ol.results li.result a.result-link
    exclude: li.sponsored
    exclude: div.related

An anchor is organic iff it matches an `organic` selector and is not a
descendant-or-self of any element matching an `exclude` selector.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import PageGapError, UnsupportedEngineError
from .htmldoc import parse_html, select
from .rankings import ListOrigin, RankedList
from .urlnorm import UrlNormalizationError, normalize_url, result_domain

DEFAULT_DEPTH = 50


class EmptyParseWarning(UserWarning):
    """A capture yielded zero organic results (recorded, not fatal)."""


@dataclass(frozen=True)
class SerpCapture:
    """One captured result page plus its provenance."""

    html: str
    engine_id: str
    query_id: str
    agent_id: str
    page_index: int
    capture_timestamp: float  # POSIX seconds, UTC

    def __post_init__(self) -> None:
        if not self.html:
            raise ValueError("capture html must be nonempty")
        if self.page_index < 0:
            raise ValueError("page_index is 0-based and nonnegative")


@dataclass(frozen=True)
class ResultEntry:
    url: str
    rank: int
    domain: str


@dataclass(frozen=True)
class ExtractorRules:
    engine_id: str
    organic: tuple[str, ...]
    exclude: tuple[str, ...] = ()

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "ExtractorRules":
        engine_id = None
        organic: list[str] = []
        exclude: list[str] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition(":")
            key, value = key.strip(), value.strip()
            if key == "engine":
                engine_id = value
            elif key == "organic":
                organic.append(value)
            elif key == "exclude":
                exclude.append(value)
            else:
                raise ValueError(f"{source}:{lineno}: unknown extractor key {key!r}")
        if not engine_id:
            raise ValueError(f"{source}: missing 'engine:' line")
        if not organic:
            raise ValueError(f"{source}: at least one 'organic:' selector required")
        return cls(engine_id, tuple(organic), tuple(exclude))

    @classmethod
    def from_file(cls, path: str | Path) -> "ExtractorRules":
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), source=str(path))


@dataclass
class ExtractorRegistry:
    """Read-only map engine-id -> ExtractorRules after load."""

    rules: dict[str, ExtractorRules] = field(default_factory=dict)

    def add(self, rules: ExtractorRules) -> None:
        self.rules[rules.engine_id] = rules

    def get(self, engine_id: str) -> ExtractorRules:
        try:
            return self.rules[engine_id]
        except KeyError:
            raise UnsupportedEngineError(f"no extractor rules for engine {engine_id!r}") from None

    def __contains__(self, engine_id: str) -> bool:
        return engine_id in self.rules

    @classmethod
    def from_dir(cls, directory: str | Path) -> "ExtractorRegistry":
        registry = cls()
        for path in sorted(Path(directory).glob("*.rules")):
            registry.add(ExtractorRules.from_file(path))
        return registry


def builtin_extractors() -> ExtractorRegistry:
    """Extractor rules shipped with the package."""
    registry = ExtractorRegistry()
    package_dir = resources.files("serpaudit").joinpath("extractors")
    for entry in sorted(package_dir.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".rules"):
            registry.add(ExtractorRules.from_text(entry.read_text(encoding="utf-8"), source=entry.name))
    return registry


def parse_capture(
    capture: SerpCapture,
    extractor: ExtractorRules,
    deny_params: frozenset[str] | None = None,
) -> list[ResultEntry]:
    """Organic results of one capture, in document order, ads excluded.

    Duplicate URLs (after normalization) keep their first occurrence.
    Anchors whose href cannot be normalized are skipped. Zero organic
    results emits EmptyParseWarning and returns an empty list.
    """
    root = parse_html(capture.html)

    excluded: set[int] = set()
    for selector in extractor.exclude:
        for node in select(root, selector):
            excluded.add(id(node))
            for child in node.walk():
                excluded.add(id(child))

    # gather anchors across all organic selectors, then restore document order
    document_order = {id(node): position for position, node in enumerate(root.walk())}
    anchors: dict[int, object] = {}
    for selector in extractor.organic:
        for anchor in select(root, selector):
            if id(anchor) not in excluded:
                anchors[id(anchor)] = anchor

    entries: list[ResultEntry] = []
    seen: set[str] = set()
    for anchor in sorted(anchors.values(), key=lambda node: document_order[id(node)]):
        href = anchor.get("href")
        if not href:
            continue
        try:
            url = normalize_url(href, deny_params=deny_params)
        except UrlNormalizationError:
            continue
        if url in seen:
            continue
        seen.add(url)
        entries.append(ResultEntry(url=url, rank=len(entries) + 1, domain=result_domain(url)))

    if not entries:
        warnings.warn(
            f"no organic results in capture (engine={capture.engine_id}, "
            f"query={capture.query_id}, page={capture.page_index})",
            EmptyParseWarning,
            stacklevel=2,
        )
    return entries


def assemble_ranked_list(
    pages: Mapping[int, Sequence[ResultEntry]],
    origin: ListOrigin | None = None,
    depth: int = DEFAULT_DEPTH,
) -> RankedList:
    """Concatenate per-page entries into one RankedList.

    Pages must form a contiguous 0-based index range; missing indices raise
    PageGapError. Cross-page duplicates keep their first occurrence; the
    result is truncated to *depth*.
    """
    indices = sorted(pages)
    if indices != list(range(len(indices))):
        missing = sorted(set(range(max(indices) + 1)) - set(indices)) if indices else [0]
        raise PageGapError(missing)

    urls: list[str] = []
    seen: set[str] = set()
    for index in indices:
        for entry in pages[index]:
            if entry.url in seen:
                continue
            seen.add(entry.url)
            urls.append(entry.url)
            if len(urls) >= depth:
                return RankedList(tuple(urls), origin=origin)
    return RankedList(tuple(urls), origin=origin)


def parse_session(
    captures: Iterable[SerpCapture],
    extractor: ExtractorRules,
    origin: ListOrigin | None = None,
    depth: int = DEFAULT_DEPTH,
) -> RankedList:
    """Parse and assemble all captures of one session."""
    pages = {c.page_index: parse_capture(c, extractor) for c in captures}
    return assemble_ranked_list(pages, origin=origin, depth=depth)
