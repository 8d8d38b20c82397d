"""Completion of a monoidal paracategory by paths modulo a congruence.

Equivalence of paths is witnessed by :class:`RewriteCertificate` objects: a
start path and a list of localized rewrite steps, each naming its rule and
the path it produces. Certificates are checked against the instance's own
partial composition, so they can be stored and re-checked without search.

Rules (``span`` is a half-open range of arrow positions):

``collapse``
    Replace the arrows of ``span`` by their composite, if it is defined. An
    empty span inserts an identity. ``inverse`` runs the step backwards.
``paracat-law``
    Replace ``span`` by another path with the same, defined, composite.
``concat-compat``
    Rewrite the subpath at ``span`` by a nested certificate.
``whisker-left`` / ``whisker-right``
    The subpath at ``span`` is ``1_X ⊗ p`` (resp. ``p ⊗ 1_X``); rewrite it
    to ``1_X ⊗ q`` using a nested certificate from ``p`` to ``q``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable

from .kleene import Undefined, is_defined, kleene_eq
from .paracat import (
    MonoidalParacategory,
    Path,
    PathError,
    concat,
    eps,
    path_tensor,
    whisker_left,
    whisker_right,
)
from .ratlin import Matrix, format_matrix, parse_matrix

RULES = ("collapse", "paracat-law", "concat-compat", "whisker-left", "whisker-right")


class CertificateError(ValueError):
    """A certificate step is malformed (unknown rule, bad span, ...)."""


@dataclass(frozen=True)
class CongruenceRule:
    rule: str
    span: tuple[int, int]
    inverse: bool = False
    obj: Any = None
    nested: "RewriteCertificate | None" = None
    new_len: int | None = None  # length of the replacement for paracat-law

    def __post_init__(self):
        if self.rule not in RULES:
            raise CertificateError(f"unknown rule {self.rule!r}")
        i, j = self.span
        if not 0 <= i <= j:
            raise CertificateError(f"bad span {self.span}")


@dataclass(frozen=True)
class Step:
    rule: CongruenceRule
    result: Path


@dataclass(frozen=True)
class RewriteCertificate:
    start: Path
    steps: tuple[Step, ...] = ()

    @property
    def end(self) -> Path:
        return self.steps[-1].result if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def then(self, other: "RewriteCertificate") -> "RewriteCertificate":
        """Transitivity: ``self`` followed by ``other``."""
        if other.start != self.end:
            raise CertificateError("certificates do not meet")
        return RewriteCertificate(self.start, self.steps + other.steps)

    def reversed(self) -> "RewriteCertificate":
        """Symmetry: the same chain read from end to start."""
        paths = [self.start] + [s.result for s in self.steps]
        steps = []
        for k in range(len(self.steps) - 1, -1, -1):
            steps.append(Step(_flip(self.steps[k].rule), paths[k]))
        return RewriteCertificate(self.end, tuple(steps))


def _flip(r: CongruenceRule) -> CongruenceRule:
    if r.rule == "collapse":
        return CongruenceRule("collapse", r.span, not r.inverse)
    if r.rule == "paracat-law":
        i, j = r.span
        return CongruenceRule("paracat-law", (i, i + r.new_len), new_len=j - i)
    # whiskering keeps lengths, so the replacement is as long as the nested end
    i = r.span[0]
    return CongruenceRule(r.rule, (i, i + len(r.nested.end)), obj=r.obj, nested=r.nested.reversed())


def splice(p: Path, i: int, j: int, q: Path) -> Path:
    """``p`` with arrows ``i..j-1`` replaced by ``q``."""
    if not 0 <= i <= j <= len(p):
        raise CertificateError(f"span {(i, j)} outside a path of length {len(p)}")
    return concat(concat(p.span(0, i), q), p.span(j, len(p)))


def _apply(pc, p: Path, r: CongruenceRule):
    """The path a forward rule produces from ``p``, or ``None`` if it does not apply."""
    i, j = r.span
    if j > len(p):
        return None
    if r.rule == "collapse":
        if i == j:
            value = pc.identity(p.objects[i])
        else:
            value = pc.compose(p.span(i, j))
            if not is_defined(value):
                return None
        return splice(p, i, j, pc.single(value))
    if r.rule in ("concat-compat", "whisker-left", "whisker-right"):
        c = r.nested
        if r.rule == "concat-compat":
            src, dst = c.start, c.end
        elif r.rule == "whisker-left":
            src, dst = whisker_left(pc, r.obj, c.start), whisker_left(pc, r.obj, c.end)
        else:
            src, dst = whisker_right(pc, c.start, r.obj), whisker_right(pc, c.end, r.obj)
        if p.span(i, j) != src:
            return None
        try:
            return splice(p, i, j, dst)
        except PathError:
            return None
    raise CertificateError(f"rule {r.rule!r} has no forward form")


def check_step(pc, src: Path, step: Step) -> bool:
    r, dst = step.rule, step.result
    if r.rule == "collapse" and r.inverse:
        return _apply(pc, dst, CongruenceRule("collapse", r.span)) == src
    if r.rule == "paracat-law":
        i, j = r.span
        m = r.new_len
        if m is None or j > len(src) or i + m > len(dst):
            return False
        if src.span(0, i) != dst.span(0, i) or src.span(j, len(src)) != dst.span(i + m, len(dst)):
            return False
        left, right = pc.compose(src.span(i, j)), pc.compose(dst.span(i, i + m))
        return is_defined(left) and is_defined(right) and pc.equal(left, right)
    if r.nested is not None and not check_certificate(pc, r.nested):
        return False
    return _apply(pc, src, r) == dst


def check_certificate(pc, c: RewriteCertificate) -> bool:
    """True iff every step is a valid rule instance producing the recorded path."""
    cur = c.start
    for step in c.steps:
        try:
            if not check_step(pc, cur, step):
                return False
        except PathError:
            return False
        cur = step.result
    return True


def soundness_spot_check(pc, c: RewriteCertificate) -> bool:
    """``[start] ≃ [end]`` on the instance."""
    return kleene_eq(pc.compose(c.start), pc.compose(c.end), pc.equal)


def decide_singleton(pc, p: Path, q) -> bool:
    """``p ∼ q`` for a single arrow ``q``: exactly when ``[p]`` is defined and equals ``q``."""
    if isinstance(q, Path):
        if len(q) != 1:
            raise ValueError("decide_singleton needs a length-1 right-hand side")
        q = q.arrows[0]
    if p.dom != pc.dom(q) or p.cod != pc.cod(q):
        return False
    value = pc.compose(p)
    return is_defined(value) and pc.equal(value, q)


def _moves(pc, p: Path):
    """Reducing rewrites of ``p``: collapse a defined span, or drop an identity."""
    n = len(p)
    for i in range(n):
        f = p.arrows[i]
        if pc.equal(f, pc.identity(p.objects[i])) and p.objects[i] == p.objects[i + 1]:
            yield CongruenceRule("collapse", (i, i), inverse=True), splice(p, i, i + 1, eps(p.objects[i]))
    for width in range(n, 1, -1):
        for i in range(0, n - width + 1):
            r = CongruenceRule("collapse", (i, i + width))
            q = _apply(pc, p, r)
            if q is not None:
                yield r, q


def search_equiv(pc, p: Path, q: Path, depth: int = 8, max_nodes: int = 20_000):
    """Bounded bidirectional search for a certificate ``p ∼ q``.

    Both ends are rewritten by reducing moves until the frontiers meet.
    Returns :class:`Undefined` when nothing is found within ``depth`` total
    steps; that carries no claim that the paths are inequivalent.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if p.dom != q.dom or p.cod != q.cod:
        return Undefined("endpoint-mismatch")
    if p == q:
        return RewriteCertificate(p)
    # parent maps: path -> (previous path, rule) on each side
    parents = ({p: None}, {q: None})
    dist = ({p: 0}, {q: 0})
    frontiers = (deque([p]), deque([q]))

    def chain(side: int, node: Path) -> list[tuple[Path, CongruenceRule, Path]]:
        out = []
        while parents[side][node] is not None:
            prev, rule = parents[side][node]
            out.append((prev, rule, node))
            node = prev
        out.reverse()
        return out

    def build(meet: Path) -> RewriteCertificate:
        fwd = RewriteCertificate(p, tuple(Step(r, dst) for _, r, dst in chain(0, meet)))
        back = RewriteCertificate(q, tuple(Step(r, dst) for _, r, dst in chain(1, meet)))
        return fwd.then(back.reversed())

    seen = 2
    for _round in range(depth):
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) or not frontiers[1] else 1
        if not frontiers[side]:
            side = 1 - side
            if not frontiers[side]:
                break
        level = dist[side][frontiers[side][0]]
        while frontiers[side] and dist[side][frontiers[side][0]] == level:
            node = frontiers[side].popleft()
            for rule, nxt in _moves(pc, node):
                if nxt in parents[side]:
                    continue
                parents[side][nxt] = (node, rule)
                dist[side][nxt] = level + 1
                if nxt in parents[1 - side]:
                    if dist[0][nxt] + dist[1][nxt] <= depth:
                        return build(nxt)
                frontiers[side].append(nxt)
                seen += 1
                if seen > max_nodes:
                    return Undefined("search-budget")
    return Undefined("not-found")


# --- the quotient category ---------------------------------------------------

@dataclass(frozen=True)
class QuotMor:
    """An arrow of the quotient, held by one representative path."""

    rep: Path

    @property
    def dom(self):
        return self.rep.dom

    @property
    def cod(self):
        return self.rep.cod


def quot_identity(a) -> QuotMor:
    return QuotMor(eps(a))


def quot_compose(a: QuotMor, b: QuotMor) -> QuotMor:
    """``b ∘ a``: concatenation of representatives."""
    return QuotMor(concat(a.rep, b.rep))


def quot_tensor(pc: MonoidalParacategory, a: QuotMor, b: QuotMor) -> QuotMor:
    return QuotMor(path_tensor(pc, a.rep, b.rep))


def functor_f(pc, x) -> QuotMor:
    """The class of the length-1 path ``(x)``."""
    return QuotMor(pc.single(x))


def quot_symmetry(pc: MonoidalParacategory, a, b) -> QuotMor:
    return functor_f(pc, pc.symmetry(a, b))


def quot_trace(pc, f: QuotMor, u, a, b) -> QuotMor:
    """Canonical trace in a compact closed quotient.

    ``pc`` must provide ``dual``, ``eta`` and ``eps``; ``f: A⊗U → B⊗U``.
    """
    T = pc.tensor_obj
    if f.dom != T(a, u) or f.cod != T(b, u):
        raise PathError("quot_trace: f is not of the form A⊗U → B⊗U")
    us = pc.dual(u)
    one = pc.identity
    head = pc.path(pc.tensor(one(a), pc.eta(u)), pc.tensor(one(a), pc.symmetry(us, u)))
    body = whisker_right(pc, f.rep, us)
    tail = pc.single(pc.tensor(one(b), pc.eps(u)))
    return QuotMor(concat(concat(head, body), tail))


@dataclass
class StrictFunctor:
    """A strict monoidal functor into a total category, as callbacks.

    ``target`` needs ``identity`` and ``compose(g, f)``.
    """

    on_objects: Callable[[Any], Any]
    on_arrows: Callable[[Any], Any]
    target: Any


def induced_l(g: StrictFunctor, p: QuotMor | Path):
    """``L(p̄) = G(p₁); …; G(pₙ)``, with ``L(ε_A) = 1_{G(A)}``."""
    rep = p.rep if isinstance(p, QuotMor) else p
    acc = g.target.identity(g.on_objects(rep.dom))
    for f in rep.arrows:
        acc = g.target.compose(g.on_arrows(f), acc)
    return acc


# --- JSON --------------------------------------------------------------------

def _arrow_json(f) -> Any:
    from .intp import IMor

    if isinstance(f, IMor):
        return {"dom": [f.dom.plus, f.dom.minus], "cod": [f.cod.plus, f.cod.minus],
                "matrix": format_matrix(f.under)}
    if isinstance(f, Matrix):
        return {"matrix": format_matrix(f)}
    raise TypeError(f"cannot serialize arrow {f!r}")


def _obj_json(a) -> Any:
    from .intp import IObj

    return [a.plus, a.minus] if isinstance(a, IObj) else a


def path_json(p: Path) -> dict:
    return {"objects": [_obj_json(a) for a in p.objects], "arrows": [_arrow_json(f) for f in p.arrows]}


def _arrow_from(data, pc):
    from .intp import IObj, Intp

    m = parse_matrix(data["matrix"])
    if isinstance(pc, Intp):
        return pc.make(IObj(*data["dom"]), IObj(*data["cod"]), m)
    return m


def _obj_from(data, pc):
    from .intp import IObj, Intp

    return IObj(*data) if isinstance(pc, Intp) else data


def path_from(data: dict, pc) -> Path:
    objs = tuple(_obj_from(a, pc) for a in data["objects"])
    arrows = tuple(_arrow_from(f, pc) for f in data["arrows"])
    p = Path(objs, arrows)
    for k, f in enumerate(arrows):
        if pc.dom(f) != objs[k] or pc.cod(f) != objs[k + 1]:
            raise PathError(f"arrow {k} does not fit the listed objects")
    return p


def _rule_json(r: CongruenceRule) -> dict:
    out: dict[str, Any] = {"rule": r.rule, "span": list(r.span)}
    if r.inverse:
        out["inverse"] = True
    if r.obj is not None:
        out["object"] = _obj_json(r.obj)
    if r.nested is not None:
        out["nested"] = certificate_json(r.nested)
    if r.new_len is not None:
        out["new_len"] = r.new_len
    return out


def certificate_json(c: RewriteCertificate) -> dict:
    return {
        "start": path_json(c.start),
        "steps": [dict(_rule_json(s.rule), result=path_json(s.result)) for s in c.steps],
    }


def certificate_from(data: dict, pc) -> RewriteCertificate:
    try:
        steps = []
        for s in data["steps"]:
            rule = CongruenceRule(
                s["rule"],
                tuple(s["span"]),
                bool(s.get("inverse", False)),
                _obj_from(s["object"], pc) if "object" in s else None,
                certificate_from(s["nested"], pc) if "nested" in s else None,
                s.get("new_len"),
            )
            steps.append(Step(rule, path_from(s["result"], pc)))
        return RewriteCertificate(path_from(data["start"], pc), tuple(steps))
    except (KeyError, TypeError) as exc:
        raise CertificateError(f"malformed certificate: {exc}") from exc


def dump_certificate(c: RewriteCertificate, path: str, instance: str = "intp:ki") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dict(instance=instance, **certificate_json(c)), fh, indent=2)
        fh.write("\n")


__all__ = [
    "CertificateError",
    "CongruenceRule",
    "QuotMor",
    "RewriteCertificate",
    "Step",
    "StrictFunctor",
    "check_certificate",
    "check_step",
    "certificate_from",
    "certificate_json",
    "decide_singleton",
    "dump_certificate",
    "functor_f",
    "induced_l",
    "path_from",
    "path_json",
    "quot_compose",
    "quot_identity",
    "quot_symmetry",
    "quot_tensor",
    "quot_trace",
    "search_equiv",
    "soundness_spot_check",
    "splice",
]
