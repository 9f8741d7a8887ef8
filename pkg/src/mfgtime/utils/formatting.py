import re

from colorama import Fore, Style
from tabulate import tabulate

WIDTH = 100
SYMBOL = "═"
TABLE_FORMAT = "fancy_outline"

_QUOTED = re.compile(r"('.*?')")


def _bright(color, text) -> str:
    return f"{color}{Style.BRIGHT}{text}{Style.RESET_ALL}"


def _notice(icon, color, label, text) -> str:
    return f"\n{icon} {color}{label}{Style.RESET_ALL}\n{text}"


def chapter(title: str) -> str:
    """Command banner: the upper-case title centred in a rule of WIDTH characters."""
    return "\n" + _bright(Fore.MAGENTA, f" {title.upper()} ".center(WIDTH, SYMBOL))


def section(title: str) -> str:
    return "\n" + _bright(Fore.GREEN, f"*** {title.upper()} ***")


def paragraph(title: str) -> str:
    """Bold blue heading; quoted names such as population ids stay plain."""
    plain = _QUOTED.sub(lambda match: f"{Style.RESET_ALL}{match.group(1)}{Fore.BLUE}{Style.BRIGHT}", title)
    return "\n" + _bright(Fore.BLUE, plain)


def error(text: str) -> str:
    return _notice("❌", Fore.RED, "Error", text)


def warning(text: str) -> str:
    return _notice("⚠️", Fore.YELLOW, "Warning", text)


def info(text: str) -> str:
    return _notice("ℹ️", Fore.CYAN, "Info", text)


def table(rows, headers, align="left") -> str:
    """Renders rows as a fancy-outline table, the one table style used everywhere."""
    return tabulate(rows, headers=headers, tablefmt=TABLE_FORMAT, numalign=align, stralign=align,
                    showindex=False)


def status_icon(passed) -> str:
    """Report glyph for True, False or None (informational)."""
    if passed is None:
        return "ℹ️"
    return "✅" if passed else "❌"
