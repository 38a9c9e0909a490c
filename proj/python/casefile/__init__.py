# casefile - offline artifact analysis workbench
"""Python access to the casefile analysis core."""

import json as _json

from ._core import (
    Error,
    __version__,
    analyze_json,
    artifacts,
    compare,
    deobfuscate,
    disassemble,
    entropy,
    hash,
    identify,
    strings,
)


def analyze(data, name="input", deep=False, passwords=()):
    """Full analysis report as a dict."""
    return _json.loads(analyze_json(data, name, deep, list(passwords)))


__all__ = [
    "Error",
    "__version__",
    "analyze",
    "artifacts",
    "compare",
    "deobfuscate",
    "disassemble",
    "entropy",
    "hash",
    "identify",
    "strings",
]
