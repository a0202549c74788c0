import json
import os
import re
from typing import Iterable, Optional

from loguru import logger

from qmapkit.errors import MalformedDatum


DEFAULT_ENUM_CAP = 20


def enumeration_cap() -> int:
    """Largest number of weights for which supports are enumerated; ``QMAP_ENUM_CAP`` overrides the default."""
    raw = os.environ.get("QMAP_ENUM_CAP")
    if raw is None:
        return DEFAULT_ENUM_CAP
    try:
        cap = int(raw)
    except ValueError:
        logger.warning(f"Ignoring QMAP_ENUM_CAP={raw!r}, it is not an integer")
        return DEFAULT_ENUM_CAP
    return max(cap, 0)


def locate_key(text: str, path: Iterable) -> Optional[int]:
    """1-based line of the innermost string key of ``path`` in a JSON document, if it can be found."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    pattern = re.compile(r'"' + re.escape(keys[-1]) + r'"\s*:')
    for lineno, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return lineno
    return None


def load_json_document(path: str):
    """Read a JSON file, returning the raw text and the parsed document."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        return text, json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedDatum(f"{path}:{e.lineno}: {e.msg}") from e
