"""Text normalization and tokenization rules used consistently across the pipeline.

Three distinct normalizers exist on purpose:
  - ``normalize_text``   : embedding identity (lowercase, collapse whitespace)
  - ``normalize_name``   : entity merge key (uppercase, collapse whitespace, strip
                           outer punctuation)
  - ``match_tokens``     : token sequence for boundary-aware matching, where any
                           non-alphanumeric character acts as a separator, so that
                           "Israel-Hamas" matches the entities ISRAEL and HAMAS but
                           "EUROPE" never matches "EU"
"""

from __future__ import annotations

import re
import string

_WS = re.compile(r"\s+")
_TOKEN = re.compile(r"\S+")
_NON_ALNUM = re.compile(r"[^0-9a-z]+")


def normalize_text(text: str) -> str:
    """Lowercase and collapse all whitespace runs to single spaces."""
    return _WS.sub(" ", text.strip()).lower()


def normalize_name(name: str) -> str:
    """Canonical merge key: uppercase, collapsed whitespace, outer punctuation stripped."""
    collapsed = _WS.sub(" ", name.strip()).strip(string.punctuation + " ")
    return _WS.sub(" ", collapsed).upper()


def match_tokens(text: str) -> list[str]:
    """Tokens for boundary-aware substring matching; punctuation splits tokens."""
    return [t for t in _NON_ALNUM.split(text.lower()) if t]


def find_token_sublist(haystack: list[str], needle: list[str]) -> int:
    """Index of the first occurrence of ``needle`` as a contiguous run, or -1."""
    if not needle or len(needle) > len(haystack):
        return -1
    for i in range(len(haystack) - len(needle) + 1):
        if haystack[i : i + len(needle)] == needle:
            return i
    return -1


def token_spans(text: str) -> list[tuple[int, int]]:
    """Character [start, end) spans of whitespace-delimited tokens, in order."""
    return [m.span() for m in _TOKEN.finditer(text)]


def count_tokens(text: str) -> int:
    """Whitespace token count; also used for mock token accounting."""
    return len(_TOKEN.findall(text))
