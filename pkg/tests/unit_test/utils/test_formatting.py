from colorama import Fore, Style

from mfgtime.utils.formatting import WIDTH, chapter, error, paragraph, status_icon, table


def _strip(text):
    for code in (Fore.MAGENTA, Fore.BLUE, Fore.RED, Style.BRIGHT, Style.RESET_ALL):
        text = text.replace(code, "")
    return text


def test_chapter_is_a_full_width_rule():
    line = _strip(chapter("mfgtime solve")).strip("\n")
    assert len(line) == WIDTH
    assert " MFGTIME SOLVE " in line


def test_paragraph_leaves_quoted_names_plain():
    text = paragraph("Value of 'east'")
    assert f"{Style.RESET_ALL}'east'{Fore.BLUE}" in text
    assert _strip(text) == "\nValue of 'east'"


def test_notices_and_icons():
    assert _strip(error("bad grid")).endswith("Error\nbad grid")
    assert [status_icon(value) for value in (True, False, None)] == ["✅", "❌", "ℹ️"]
    rendered = table([["dpp", 0.1]], headers=["check", "measured"])
    assert "check" in rendered and "dpp" in rendered
