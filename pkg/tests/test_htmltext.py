import pytest

from lexcorpus.errors import MarkupParseError
from lexcorpus.htmltext import html_to_text, parse_html


SAMPLE = """
<html><body>
<table class="decisions" id="main">
  <tr><td class="cite">2025 FC 1</td><td><a class="doclink" href="d/1.html">Reasons</a></td></tr>
  <tr><td class="cite">2025 FC 2</td><td><a class="doclink" href="d/2.html">Reasons</a></td></tr>
</table>
<table class="notices"><tr><td class="cite">ignore me</td></tr></table>
</body></html>
"""


def test_select_descendant_chain_scopes_to_ancestor():
    root = parse_html(SAMPLE)
    rows = root.select("table.decisions tr")
    assert len(rows) == 2
    assert [r.select_one("td.cite").text() for r in rows] == ["2025 FC 1", "2025 FC 2"]


def test_select_by_id_and_bare_class():
    root = parse_html(SAMPLE)
    assert root.select_one("#main").attrs["id"] == "main"
    assert len(root.select(".cite")) == 3
    assert root.select("table.decisions .doclink")[0].attrs["href"] == "d/1.html"


def test_select_one_returns_none_when_absent():
    root = parse_html(SAMPLE)
    assert root.select_one("td.nonexistent") is None
    assert root.select("span") == []


def test_element_text_collapses_whitespace():
    root = parse_html("<p>  The \n application\t is <b>allowed</b>. </p>")
    assert root.select_one("p").text() == "The application is allowed."


def test_unclosed_and_stray_tags_are_tolerated():
    root = parse_html(
        "<table><tr><td class='cite'>2025 FC 9</td></tr>"
        "<tr><td class='cite'>2025 FC 10</span></td>"
    )
    assert [td.text() for td in root.select("td.cite")] == ["2025 FC 9", "2025 FC 10"]


def test_entities_are_decoded():
    root = parse_html("<p>R&eacute;fugi&eacute; &amp; others</p>")
    assert root.select_one("p").text() == "Réfugié & others"


def test_html_to_text_breaks_on_block_tags():
    text = html_to_text("<div><h1>Title</h1><p>One two.</p><p>Three<br>Four</p></div>")
    assert text == "Title\nOne two.\nThree\nFour"


def test_html_to_text_skips_script_and_style():
    text = html_to_text("<p>visible</p><script>var x = 1;</script><style>p{}</style>")
    assert text == "visible"


def test_html_to_text_passes_plain_text_through():
    plain = "Just reasons for judgment.\nParagraph two."
    assert html_to_text(plain) == plain


def test_nul_byte_rejected_with_byte_offset():
    with pytest.raises(MarkupParseError) as exc:
        parse_html("<p>café\0</p>")
    # offset counts bytes, and "é" is two bytes in UTF-8
    assert exc.value.offset == len("<p>café".encode("utf-8"))


def test_tagless_content_rejected_at_offset_zero():
    with pytest.raises(MarkupParseError) as exc:
        parse_html("no markup at all")
    assert exc.value.offset == 0
