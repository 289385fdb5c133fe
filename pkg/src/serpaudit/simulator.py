"""Deterministic pseudo search engine for end-to-end testing.

Real engines randomize their output between identical, simultaneous,
nonpersonalized users; this module reproduces that behavior with a dialable
volatility knob so the measurement pipeline can be exercised offline.

Every ranking is a pure function of (seed, query, agent, session). At
volatility 0 all agents see the engine's base ranking; at volatility v the
base ranking is perturbed by seeded pool substitutions (each slot replaced
with probability v by an item from beyond the evaluation depth) followed by
seeded adjacent transpositions. The perturbation model is a test
construction, not a claim about any real engine.

Rankings are rendered through the shared HTML templates so the extractor
pipeline runs against real markup, sponsored slots included.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from string import Template
from typing import Mapping, Sequence

from .errors import BotDetectedSignal, ClientCrashSignal, PoolInfeasibleError, UnknownQueryError
from .parser import SerpCapture

PAGED_LAYOUT = "simengine"
SCROLL_LAYOUT = "simengine-scroll"

# adjacent transpositions applied at volatility 1.0, per ranked slot
_SWAPS_PER_SLOT = 2.0
# sponsored slots rendered on every page (they must never reach a RankedList)
_ADS_PER_PAGE = 2


@dataclass(frozen=True)
class SimEngineSpec:
    """One simulated engine: per-query URL pools plus noise parameters."""

    engine_id: str
    pools: Mapping[str, tuple[str, ...]]
    volatility: float = 0.0
    seed: int = 0
    page_size: int = 10
    infinite_scroll: bool = False
    overlap: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0.0 <= self.volatility <= 1.0:
            raise ValueError(f"volatility must be in [0, 1], got {self.volatility}")
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")
        for query, pool in self.pools.items():
            if len(set(pool)) != len(pool):
                raise ValueError(f"pool for query {query!r} contains duplicate URLs")
        for other, fraction in self.overlap.items():
            if not 0.0 <= fraction <= 1.0:
                raise ValueError(f"overlap with {other!r} must be in [0, 1], got {fraction}")

    @property
    def layout(self) -> str:
        return SCROLL_LAYOUT if self.infinite_scroll else PAGED_LAYOUT


def _session_rng(spec: SimEngineSpec, query_id: str, agent_id: str, session_index: int) -> random.Random:
    """Portable seeded generator: SHA-256 of the identity tuple feeds the
    Mersenne Twister, so identical inputs give identical streams on every
    platform (frozen test vectors guard this)."""
    key = f"{spec.seed}|{spec.engine_id}|{query_id}|{agent_id}|{session_index}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def generate_ranking(
    spec: SimEngineSpec,
    query_id: str,
    agent_id: str,
    session_index: int,
    depth: int = 50,
    volatility: float | None = None,
) -> list[str]:
    """The ranking one agent would see, before HTML rendering."""
    try:
        pool = spec.pools[query_id]
    except KeyError:
        raise UnknownQueryError(f"engine {spec.engine_id!r} has no pool for query {query_id!r}") from None
    v = spec.volatility if volatility is None else volatility
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"volatility override must be in [0, 1], got {v}")

    ranking = list(pool[:depth])
    if v == 0.0:
        return ranking

    rng = _session_rng(spec, query_id, agent_id, session_index)
    tail = list(pool[depth:])
    for slot in range(len(ranking)):
        if tail and rng.random() < v:
            j = rng.randrange(len(tail))
            ranking[slot], tail[j] = tail[j], ranking[slot]
    for _ in range(round(v * _SWAPS_PER_SLOT * len(ranking))):
        i = rng.randrange(len(ranking) - 1)
        ranking[i], ranking[i + 1] = ranking[i + 1], ranking[i]
    return ranking


@lru_cache(maxsize=None)
def _template(name: str) -> Template:
    text = resources.files("serpaudit").joinpath("templates", name).read_text(encoding="utf-8")
    return Template(text)


def _organic_item(url: str, engine_id: str, position: int, tag: str) -> str:
    # organic hrefs carry a tracking parameter so extraction exercises the
    # normalization deny-list on its real path
    sep = "&" if "?" in url else "?"
    href = f"{url}{sep}utm_source={engine_id}"
    return (
        f'<{tag} class="result"><h3><a class="result-link" href="{href}">'
        f"Result {position}</a></h3>"
        f'<span class="url">{url}</span>'
        f'<p class="snippet">Snippet text for result {position}.</p></{tag}>'
    )


def _sponsored_item(engine_id: str, query_id: str, page_index: int, slot: int, tag: str) -> str:
    href = f"https://ads.{engine_id}.example/click?page={page_index}&slot={slot}&q={query_id.replace(' ', '+')}"
    return (
        f'<{tag} class="result sponsored"><span class="badge">Ad</span>'
        f'<h3><a class="result-link" href="{href}">Sponsored {slot}</a></h3></{tag}>'
    )


def ad_urls_for_page(engine_id: str, query_id: str, page_index: int) -> list[str]:
    """The sponsored URLs a rendered page contains (for leak checks)."""
    return [
        f"https://ads.{engine_id}.example/click?page={page_index}&slot={slot}&q={query_id.replace(' ', '+')}"
        for slot in range(_ADS_PER_PAGE)
    ]


def _render_page(
    spec: SimEngineSpec,
    query_id: str,
    page_index: int,
    urls: Sequence[str],
    start_position: int,
) -> str:
    tag = "div" if spec.infinite_scroll else "li"
    items: list[str] = []
    for slot in range(_ADS_PER_PAGE):
        items.append(_sponsored_item(spec.engine_id, query_id, page_index, slot, tag))
    # first ad leads, second lands mid-page: splice organic items around them
    organic = [
        _organic_item(url, spec.engine_id, start_position + offset, tag)
        for offset, url in enumerate(urls)
    ]
    midpoint = max(1, len(organic) // 2)
    body = [items[0], *organic[:midpoint], items[1], *organic[midpoint:]]
    template = _template("serp_page_scroll.html" if spec.infinite_scroll else "serp_page.html")
    return template.substitute(
        engine=spec.engine_id,
        query=query_id.replace(" ", "+"),
        items="\n".join(body),
        page_number=page_index + 1,
        next_page=page_index + 2,
    )


def generate_serp(
    spec: SimEngineSpec,
    query_id: str,
    agent_id: str,
    session_index: int,
    depth: int = 50,
    volatility: float | None = None,
    start_time: float = 0.0,
    seconds_per_page: float = 2.0,
) -> list[SerpCapture]:
    """Render the session's ranking into captured pages.

    Paged engines emit ceil(depth / page_size) captures; infinite-scroll
    engines emit a single page_index-0 capture holding the whole stream.
    Identical arguments produce byte-identical captures.
    """
    ranking = generate_ranking(spec, query_id, agent_id, session_index, depth=depth, volatility=volatility)
    if spec.infinite_scroll:
        chunks = [ranking]
    else:
        chunks = [ranking[i : i + spec.page_size] for i in range(0, len(ranking), spec.page_size)]

    captures = []
    for page_index, chunk in enumerate(chunks):
        html = _render_page(spec, query_id, page_index, chunk, start_position=page_index * spec.page_size + 1)
        captures.append(
            SerpCapture(
                html=html,
                engine_id=spec.engine_id,
                query_id=query_id,
                agent_id=agent_id,
                page_index=page_index,
                capture_timestamp=start_time + page_index * seconds_per_page,
            )
        )
    return captures


def _slug(text: str) -> str:
    return "".join(ch if ch.isalnum() else "-" for ch in text.lower()).strip("-")


def cross_engine_pools(
    specs: Sequence[SimEngineSpec],
    queries: Sequence[str],
    pool_size: int,
) -> dict[str, dict[str, tuple[str, ...]]]:
    """Construct per-engine URL pools honoring requested pairwise overlaps.

    Engines i and j share a dedicated URL block of round(overlap * pool_size)
    items; blocks are pairwise disjoint, so realized intersections equal the
    requested fractions to within one item. Shared items are woven evenly
    through each pool (same relative order on both sides), remaining slots
    are filled with engine-unique URLs.

    Raises PoolInfeasibleError when an engine's shared blocks exceed the
    pool size, naming the engine and its partners.
    """
    by_id = {s.engine_id: s for s in specs}
    ids = sorted(by_id)
    for i in ids:
        for j, fraction in by_id[i].overlap.items():
            if j not in by_id:
                raise PoolInfeasibleError(f"engine {i!r} declares overlap with unknown engine {j!r}")
            mirrored = by_id[j].overlap.get(i, 0.0)
            if abs(mirrored - fraction) > 1e-12:
                raise PoolInfeasibleError(
                    f"overlap matrix not symmetric: {i!r}->{j!r} is {fraction}, {j!r}->{i!r} is {mirrored}"
                )

    block_sizes: dict[tuple[str, str], int] = {}
    for a_index, i in enumerate(ids):
        for j in ids[a_index + 1 :]:
            fraction = by_id[i].overlap.get(j, 0.0)
            block_sizes[(i, j)] = round(fraction * pool_size)

    for i in ids:
        demanded = sum(size for pair, size in block_sizes.items() if i in pair)
        if demanded > pool_size:
            partners = sorted({e for pair, size in block_sizes.items() if i in pair and size for e in pair} - {i})
            raise PoolInfeasibleError(
                f"engine {i!r} needs {demanded} shared slots with {partners} but pool size is {pool_size}"
            )

    pools: dict[str, dict[str, tuple[str, ...]]] = {i: {} for i in ids}
    for query in queries:
        qslug = _slug(query)
        shared_streams: dict[str, list[str]] = {i: [] for i in ids}
        for (i, j), size in sorted(block_sizes.items()):
            block = [f"https://{_slug(i)}-{_slug(j)}.shared.example/{qslug}/{n}" for n in range(size)]
            shared_streams[i].extend(block)
            shared_streams[j].extend(block)
        for i in ids:
            shared = shared_streams[i]
            unique_count = pool_size - len(shared)
            unique = [f"https://{_slug(i)}.only.example/{qslug}/{n}" for n in range(unique_count)]
            pool: list[str] = []
            taken = 0
            for position in range(pool_size):
                want_shared = ((position + 1) * len(shared)) // pool_size > taken
                if want_shared:
                    pool.append(shared[taken])
                    taken += 1
                else:
                    pool.append(unique[position - taken])
            pools[i][query] = tuple(pool)
    return pools


def with_pools(spec: SimEngineSpec, pools: Mapping[str, tuple[str, ...]]) -> SimEngineSpec:
    """Copy of *spec* carrying the given per-query pools."""
    return replace(spec, pools=dict(pools))


def uniform_pool(engine_id: str, query: str, size: int) -> tuple[str, ...]:
    """Standalone pool for one engine (no cross-engine sharing)."""
    qslug = _slug(query)
    return tuple(f"https://{_slug(engine_id)}.pool.example/{qslug}/{n}" for n in range(size))


class SimulatorClient:
    """Engine client backed by a SimEngineSpec.

    Implements the three-step session protocol against generated pages and
    leaves realistic browser state behind (history, cache, cookies, local
    and session storage) so state-hygiene checks have something to find.
    """

    def __init__(
        self,
        spec: SimEngineSpec,
        clock,
        depth: int = 50,
        landing_seconds: float = 1.0,
        query_seconds: float = 2.0,
        page_seconds: float = 2.0,
        volatility_by_browser: Mapping[str, float] | None = None,
    ):
        self.spec = spec
        self.engine_id = spec.engine_id
        self.clock = clock
        self.depth = depth
        self.landing_seconds = landing_seconds
        self.query_seconds = query_seconds
        self.page_seconds = page_seconds
        self.volatility_by_browser = dict(volatility_by_browser or {})
        self._pending: list[SerpCapture] = []

    def open_landing(self, context) -> None:
        self.clock.advance(self.landing_seconds)
        context.state["history"][f"visit:{self.engine_id}:landing"] = "1"
        context.state["cookies"][f"{self.engine_id}:sid"] = "landing"

    def submit_query(self, context, query_id: str, agent, session_index: int) -> SerpCapture:
        self.clock.advance(self.query_seconds)
        volatility = self.volatility_by_browser.get(agent.browser_id)
        captures = generate_serp(
            self.spec,
            query_id,
            agent.agent_id,
            session_index,
            depth=self.depth,
            volatility=volatility,
            start_time=self.clock.now(),
            seconds_per_page=self.page_seconds,
        )
        self._pending = list(captures)
        first = self._pending.pop(0)
        self._record_page_state(context, query_id, first)
        return first

    def next_page(self, context) -> SerpCapture | None:
        if not self._pending:
            return None
        self.clock.advance(self.page_seconds)
        capture = self._pending.pop(0)
        self._record_page_state(context, capture.query_id, capture)
        return capture

    def _record_page_state(self, context, query_id: str, capture: SerpCapture) -> None:
        state = context.state
        state["history"][f"visit:{self.engine_id}:{query_id}:p{capture.page_index}"] = "1"
        state["cache"][f"page:{self.engine_id}:{query_id}:p{capture.page_index}"] = str(len(capture.html))
        state["cookies"][f"{self.engine_id}:prefs"] = query_id
        state["local_storage"][f"{self.engine_id}:recent"] = query_id
        state["session_storage"][f"{self.engine_id}:scroll"] = str(capture.page_index)


class ScriptedFailureClient:
    """Wrapper injecting deterministic failures for specific sessions.

    ``script`` maps (agent_id, session_index) to a cause in
    {"bot-detected", "crash"}; all other sessions pass through.
    """

    def __init__(self, inner, script: Mapping[tuple[str, int], str]):
        self.inner = inner
        self.engine_id = inner.engine_id
        self.script = dict(script)

    def open_landing(self, context) -> None:
        self.inner.open_landing(context)

    def submit_query(self, context, query_id: str, agent, session_index: int):
        cause = self.script.get((agent.agent_id, session_index))
        if cause == "bot-detected":
            raise BotDetectedSignal(f"captcha challenge for {agent.agent_id}")
        if cause == "crash":
            raise ClientCrashSignal(f"scripted crash for {agent.agent_id}")
        return self.inner.submit_query(context, query_id, agent, session_index)

    def next_page(self, context):
        return self.inner.next_page(context)
