"""Minimal HTML element tree with a small CSS-selector subset.

Built on html.parser so captured pages can be queried without rendering.
Supported selector grammar (everything the extractor rule files need):

    compound   := [tag]('.'class)*('#'id)?          e.g. li.result, div#main
    selector   := compound (whitespace compound)*   descendant combinator only

Selectors match case-sensitively on class/id, case-insensitively on tag.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser

VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)


@dataclass
class Element:
    tag: str
    attrs: dict[str, str]
    parent: "Element | None" = None
    children: list["Element"] = field(default_factory=list)
    text_parts: list[str] = field(default_factory=list)

    @property
    def classes(self) -> frozenset[str]:
        return frozenset((self.attrs.get("class") or "").split())

    @property
    def text(self) -> str:
        return "".join(self.text_parts).strip()

    def get(self, name: str, default: str = "") -> str:
        return self.attrs.get(name, default)

    def walk(self):
        """Yield descendants in document order (self excluded)."""
        for child in self.children:
            yield child
            yield from child.walk()

    def ancestors(self):
        node = self.parent
        while node is not None:
            yield node
            node = node.parent


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = Element("[document]", {})
        self._stack = [self.root]

    def handle_starttag(self, tag, attrs):
        element = Element(tag.lower(), {k: (v or "") for k, v in attrs}, parent=self._stack[-1])
        self._stack[-1].children.append(element)
        if tag.lower() not in VOID_TAGS:
            self._stack.append(element)

    def handle_startendtag(self, tag, attrs):
        element = Element(tag.lower(), {k: (v or "") for k, v in attrs}, parent=self._stack[-1])
        self._stack[-1].children.append(element)

    def handle_endtag(self, tag):
        tag = tag.lower()
        # close the nearest matching open element; ignore strays
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                break

    def handle_data(self, data):
        self._stack[-1].text_parts.append(data)


def parse_html(html: str) -> Element:
    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()
    return builder.root


@dataclass(frozen=True)
class _Compound:
    tag: str | None
    classes: frozenset[str]
    elem_id: str | None

    def matches(self, element: Element) -> bool:
        if self.tag is not None and element.tag != self.tag:
            return False
        if self.classes and not self.classes <= element.classes:
            return False
        if self.elem_id is not None and element.get("id") != self.elem_id:
            return False
        return True


def _parse_compound(token: str) -> _Compound:
    tag: str | None = None
    classes: list[str] = []
    elem_id: str | None = None
    current, kind = "", "tag"
    for ch in token + "\0":
        if ch in ".#\0":
            if current:
                if kind == "tag":
                    tag = current.lower()
                elif kind == "class":
                    classes.append(current)
                else:
                    elem_id = current
            current, kind = "", ("class" if ch == "." else "id" if ch == "#" else kind)
        else:
            current += ch
    return _Compound(tag, frozenset(classes), elem_id)


def parse_selector(selector: str) -> tuple[_Compound, ...]:
    tokens = selector.split()
    if not tokens:
        raise ValueError("empty selector")
    return tuple(_parse_compound(t) for t in tokens)


def _ancestors_match(element: Element, compounds: tuple[_Compound, ...]) -> bool:
    """True if the compound chain (outermost first) matches some ancestor path."""
    remaining = list(compounds)
    for ancestor in element.ancestors():
        if remaining and remaining[-1].matches(ancestor):
            remaining.pop()
        if not remaining:
            return True
    return not remaining


def select(root: Element, selector: str) -> list[Element]:
    """All elements matching *selector*, in document order."""
    compounds = parse_selector(selector)
    last, outer = compounds[-1], compounds[:-1]
    return [
        node
        for node in root.walk()
        if last.matches(node) and (_ancestors_match(node, outer) if outer else True)
    ]
