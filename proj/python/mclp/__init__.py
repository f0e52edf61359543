"""Exact parametric simplex solver for continuous linear programs."""

import json
from fractions import Fraction
from pathlib import Path

from . import _core

__all__ = ["solve", "oracle", "check", "ParseError", "DegeneracyError", "SignError"]

ParseError = _core.ParseError
DegeneracyError = _core.DegeneracyError
SignError = _core.SignError

_RATIONAL_KEYS = ("objective", "dual_objective", "breakpoints", "u0", "uN", "p0", "pN", "x", "q", "u")


def _text(problem):
    if isinstance(problem, dict):
        return json.dumps(problem, default=str)
    if isinstance(problem, Path) or (isinstance(problem, str) and not problem.lstrip().startswith("{")):
        return Path(problem).read_text()
    return problem


def _fractions(value):
    if isinstance(value, list):
        return [_fractions(v) for v in value]
    return Fraction(value)


def solve(problem, max_insert=1):
    """Solve a problem given as a dict, JSON text or file path. Rational values come back as Fractions."""
    out = dict(_core.solve(_text(problem), max_insert))
    for key in _RATIONAL_KEYS:
        if key in out:
            out[key] = _fractions(out[key])
    return out


def oracle(problem, steps):
    """Objective of the time-discretized problem on a uniform grid with `steps` intervals."""
    out = dict(_core.oracle(_text(problem), steps))
    if "objective" in out:
        out["objective"] = Fraction(out["objective"])
    return out


def check(problem):
    """Feasibility verdict of the primal and dual problems."""
    return _core.check(_text(problem))
