"""Partial values in Kleene style.

A partial operation returns either a plain value (defined) or an
:class:`Undefined` marker that carries a machine-readable reason code.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Undefined:
    """The result of a partial operation outside its domain.

    Two ``Undefined`` values compare equal regardless of their reason,
    so Kleene equality can use plain ``==`` on the markers.
    """

    reason: str = field(default="undefined", compare=False)

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"Undefined({self.reason!r})"


def is_defined(x) -> bool:
    return not isinstance(x, Undefined)


def _default_eq(x, y) -> bool:
    return bool(x == y)


def kleene_eq(x, y, eq=_default_eq) -> bool:
    """``x ≃ y``: both undefined, or both defined and equal."""
    dx, dy = is_defined(x), is_defined(y)
    if not dx and not dy:
        return True
    if dx and dy:
        return eq(x, y)
    return False


def kleene_leq(x, y, eq=_default_eq) -> bool:
    """Directed Kleene equality: ``x`` undefined, or both defined and equal."""
    if not is_defined(x):
        return True
    return is_defined(y) and eq(x, y)


def bind(x, fn):
    """Apply ``fn`` to a defined value, propagate ``Undefined`` otherwise."""
    if not is_defined(x):
        return x
    return fn(x)
