"""On-shell symmetry checks for Lagrangian systems.

Thin wrapper over the native core. Every command returns a :class:`Report`
holding the exit code, the JSON document and the text narrative that the
``jetsym`` command line tool would print.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Sequence

from . import _core
from ._core import JetsymError, SpecSyntaxError, normalize_expression, normalize_spec

__version__ = _core.__version__
SCHEMA_VERSION = _core.SCHEMA_VERSION

__all__ = [
    "JetsymError",
    "Report",
    "SpecSyntaxError",
    "check",
    "drag",
    "euler_lagrange",
    "noether",
    "normalize_expression",
    "normalize_spec",
    "reduce",
    "run",
    "tangency",
    "validate",
]


@dataclass(frozen=True)
class Report:
    exit_code: int
    document: dict[str, Any]
    text: str

    @property
    def ok(self) -> bool:
        return self.exit_code == 0

    def __getitem__(self, key: str) -> Any:
        return self.document[key]


def run(command: str, args: Sequence[str], spec_text: str, **flags: Any) -> Report:
    """Run a command against a specification given as text.

    Keyword flags mirror the CLI: depth, s, steps, ic, tol, h, t_end, csv,
    splitting.
    """
    code, doc, text = _core.run(command, list(args), spec_text, **flags)
    return Report(code, json.loads(doc), text)


def euler_lagrange(spec_text: str) -> Report:
    return run("el", [], spec_text)


def check(spec_text: str, transform: str, **flags: Any) -> Report:
    return run("check", [transform], spec_text, **flags)


def validate(spec_text: str, transform: str, splitting: str) -> Report:
    return run("validate", [transform, splitting], spec_text)


def noether(spec_text: str, transform: str, splitting: str) -> Report:
    return run("noether", [transform, splitting], spec_text)


def tangency(spec_text: str, transform: str, depth: int | None = None) -> Report:
    return run("tangency", [transform], spec_text, depth=depth)


def drag(spec_text: str, transform: str, ic: str, **flags: Any) -> Report:
    return run("drag", [transform], spec_text, ic=ic, **flags)


def reduce(spec_text: str, expression: str) -> Report:
    return run("reduce", [expression], spec_text)
