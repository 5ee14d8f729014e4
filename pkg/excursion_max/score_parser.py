"""
Reading of score sequences: newline-delimited decimal reals, or a single-column CSV whose header is auto-detected
"""

import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from excursion_max.exceptions import EmptyInputError, ScoreParseError

STDIN_SOURCE = "-"

_REAL_PATTERN = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")
_HEADER_PATTERN = re.compile(r"^[A-Za-z_][\w ]*$")


@dataclass(frozen=True)
class ScoreSequence:
    """
    Ordered steps eps_1, ..., eps_n read from a file or from standard input

    Params:
        values: Non-empty tuple of finite reals.
        source: File path, or "-" for standard input.
        header: Column name when the input was a CSV with a header line.
    """

    values: tuple[float, ...]
    source: str = STDIN_SOURCE
    header: str | None = None


def _is_float(line: str) -> bool:
    try:
        float(line)
    except ValueError:
        return False
    return True


def parse_score_line(line: str, line_number: int) -> float:
    """
    Parse one entry of a score file

    Params:
        line: Stripped line content.
        line_number: 1-based line number used in error messages.

    Returns:
        The finite real value of the line.
    """
    if "," in line:
        raise ScoreParseError(f"Invalid entry: '{line}'. Only single-column inputs are supported", line_number)
    if _REAL_PATTERN.match(line) is None:
        raise ScoreParseError(f"Invalid entry: '{line}'. It must be a decimal real number", line_number)
    value = float(line)
    if not math.isfinite(value):
        raise ScoreParseError(f"Invalid entry: '{line}'. It must be finite", line_number)
    return value


def parse_scores(text: str, source: str = STDIN_SOURCE) -> ScoreSequence:
    """
    Parse the content of a score file

    Example:
        ```python
        parse_scores("score\\n1\\n-1\\n").values  # (1.0, -1.0)
        ```

    Params:
        text: File content, '\\n' or '\\r\\n' terminated lines. Blank lines are skipped.
        source: Origin of the content, echoed in the result.

    Returns:
        A ScoreSequence.
    """
    header = None
    values = []
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip().lstrip("\ufeff")
        if not line:
            continue
        # a header is only accepted before the first value, nan and inf are rejected as values
        if header is None and not values and _HEADER_PATTERN.match(line) and not _is_float(line):
            header = line
            continue
        values.append(parse_score_line(line, line_number))

    if not values:
        raise EmptyInputError(f"Invalid input '{source}': no score values found")
    return ScoreSequence(values=tuple(values), source=source, header=header)


def read_scores(source: str | Path) -> ScoreSequence:
    """
    Read a score sequence from a UTF-8 file, or from standard input when source is "-"

    Params:
        source: File path or "-".

    Returns:
        A ScoreSequence.
    """
    source = str(source)
    if source == STDIN_SOURCE:
        return parse_scores(sys.stdin.read(), source)
    try:
        text = Path(source).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ScoreParseError(f"Invalid input '{source}': {exc}") from exc
    return parse_scores(text, source)
