"""Small HTML document tree with CSS-subset selectors.

The package mirror has no bs4/lxml, and listing pages only need a narrow
slice of CSS anyway: tag, .class, #id, tag.class and descendant chains.
Built on the stdlib HTMLParser, which is tolerant of real-world court
markup; gross non-markup (no tags at all, NUL bytes) is rejected with the
byte offset of the offending position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser

from .errors import MarkupParseError

_VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}

_BLOCK_TAGS = {
    "p", "div", "tr", "li", "br", "h1", "h2", "h3", "h4", "h5", "h6",
    "table", "ul", "ol", "section", "article", "blockquote", "pre",
}

_SKIP_TEXT_TAGS = {"script", "style"}


@dataclass
class Element:
    tag: str
    attrs: dict[str, str] = field(default_factory=dict)
    children: list["Element | str"] = field(default_factory=list)
    parent: "Element | None" = None

    @property
    def classes(self) -> set[str]:
        return set(self.attrs.get("class", "").split())

    def text(self) -> str:
        """Concatenated descendant text, whitespace-collapsed."""
        parts: list[str] = []
        self._collect_text(parts)
        return " ".join("".join(parts).split())

    def _collect_text(self, parts: list[str]) -> None:
        if self.tag in _SKIP_TEXT_TAGS:
            return
        for child in self.children:
            if isinstance(child, str):
                parts.append(child)
            else:
                child._collect_text(parts)
                if child.tag in _BLOCK_TAGS:
                    parts.append(" ")

    def iter(self):
        yield self
        for child in self.children:
            if isinstance(child, Element):
                yield from child.iter()

    def select(self, selector: str) -> list["Element"]:
        """Elements matching a descendant chain of simple selectors."""
        steps = [_parse_simple(step) for step in selector.split()]
        if not steps:
            return []
        matched = [self]
        for step in steps:
            next_matched: list[Element] = []
            seen: set[int] = set()
            for scope in matched:
                for el in scope.iter():
                    if el is scope:
                        continue
                    if _matches(el, step) and id(el) not in seen:
                        seen.add(id(el))
                        next_matched.append(el)
            matched = next_matched
        return matched

    def select_one(self, selector: str) -> "Element | None":
        found = self.select(selector)
        return found[0] if found else None


def _parse_simple(step: str) -> tuple[str | None, set[str], str | None]:
    """Split 'tag.cls1.cls2#id' into (tag, classes, id)."""
    tag: str | None = None
    classes: set[str] = set()
    elem_id: str | None = None
    token = ""
    mode = "tag"
    for ch in step + "\0":
        if ch in ".#\0":
            if token:
                if mode == "tag":
                    tag = token
                elif mode == "class":
                    classes.add(token)
                else:
                    elem_id = token
            token = ""
            mode = "class" if ch == "." else "id" if ch == "#" else mode
        else:
            token += ch
    return tag, classes, elem_id


def _matches(el: Element, step: tuple[str | None, set[str], str | None]) -> bool:
    tag, classes, elem_id = step
    if tag and el.tag != tag:
        return False
    if classes and not classes.issubset(el.classes):
        return False
    if elem_id and el.attrs.get("id") != elem_id:
        return False
    return True


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Element("[document]")
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        el = Element(tag, {k: (v or "") for k, v in attrs}, parent=self.stack[-1])
        self.stack[-1].children.append(el)
        if tag not in _VOID_TAGS:
            self.stack.append(el)

    def handle_startendtag(self, tag, attrs):
        el = Element(tag, {k: (v or "") for k, v in attrs}, parent=self.stack[-1])
        self.stack[-1].children.append(el)

    def handle_endtag(self, tag):
        # close the nearest matching open element; tolerate strays
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                break

    def handle_data(self, data):
        if data:
            self.stack[-1].children.append(data)


def parse_html(content: str) -> Element:
    """Parse markup into an element tree.

    Raises MarkupParseError with a byte offset for content that is not
    markup at all (NUL bytes, or no tags anywhere).
    """
    nul = content.find("\0")
    if nul != -1:
        raise MarkupParseError("NUL byte in markup", offset=len(content[:nul].encode("utf-8")))
    if "<" not in content:
        raise MarkupParseError("no markup found in content", offset=0)
    builder = _TreeBuilder()
    builder.feed(content)
    builder.close()
    return builder.root


def html_to_text(content: str) -> str:
    """Visible text of an HTML document, block tags becoming line breaks.

    Used to normalize fetched decision pages into plain unofficial text.
    Plain text input (no tags) is returned unchanged.
    """
    if "<" not in content:
        return content
    root = parse_html(content)
    lines: list[str] = []
    _blocks_to_lines(root, lines, [])
    if not lines:
        return ""
    return "\n".join(lines)


def _blocks_to_lines(el: Element, lines: list[str], buf: list[str]) -> None:
    for child in el.children:
        if isinstance(child, str):
            buf.append(child)
            continue
        if child.tag in _SKIP_TEXT_TAGS:
            continue
        if child.tag in _BLOCK_TAGS:
            _flush_line(lines, buf)
            _blocks_to_lines(child, lines, buf)
            _flush_line(lines, buf)
        else:
            _blocks_to_lines(child, lines, buf)
    if el.tag == "[document]":
        _flush_line(lines, buf)


def _flush_line(lines: list[str], buf: list[str]) -> None:
    line = " ".join("".join(buf).split())
    buf.clear()
    if line:
        lines.append(line)
