"""Paths, paracategories and strict symmetric monoidal paracategories.

A paracategory is a directed graph whose composition is a *partial*
operation on whole paths, ``[p]``. Concrete instances implement
:class:`Paracategory`; the checkers below test its axioms on sampled paths
and return reports in the same format as :mod:`ptrace.axioms`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Sequence

from .axioms import EQ, LEQ, AxiomReport
from .kleene import Undefined, bind, is_defined, kleene_eq, kleene_leq


class PathError(ValueError):
    """Endpoints of a path do not line up."""


@dataclass(frozen=True)
class Path:
    """``(A0, f1, A1, ..., fn, An)``, compared literally."""

    objects: tuple
    arrows: tuple = ()

    def __post_init__(self):
        if len(self.objects) != len(self.arrows) + 1:
            raise PathError("a path of n arrows needs n + 1 objects")

    def __len__(self) -> int:
        return len(self.arrows)

    @property
    def dom(self):
        return self.objects[0]

    @property
    def cod(self):
        return self.objects[-1]

    def span(self, i: int, j: int) -> "Path":
        """Subpath of arrows ``i..j-1``."""
        return Path(self.objects[i:j + 1], self.arrows[i:j])

    def __repr__(self) -> str:
        return f"Path(len={len(self)}, {self.dom!r} -> {self.cod!r})"


def eps(a) -> Path:
    """The empty path at ``a``."""
    return Path((a,))


def concat(p: Path, q: Path) -> Path:
    if p.cod != q.dom:
        raise PathError(f"cannot concatenate: {p.cod!r} != {q.dom!r}")
    return Path(p.objects + q.objects[1:], p.arrows + q.arrows)


class Paracategory:
    """Graph plus partial path composition.

    Subclasses supply ``dom``, ``cod``, ``identity`` and ``compose``; arrows
    must be hashable so compositions can be cached.
    """

    def dom(self, f) -> Hashable:
        raise NotImplementedError

    def cod(self, f) -> Hashable:
        raise NotImplementedError

    def identity(self, a):
        raise NotImplementedError

    def compose(self, p: Path):
        """``[p]``: an arrow ``p.dom -> p.cod`` or :class:`Undefined`."""
        raise NotImplementedError

    def equal(self, x, y) -> bool:
        return x == y

    def path(self, *arrows) -> Path:
        """The path through ``arrows``; checks that endpoints agree."""
        if not arrows:
            raise PathError("use eps() for the empty path")
        objs = [self.dom(arrows[0])]
        for f in arrows:
            if self.dom(f) != objs[-1]:
                raise PathError(f"arrow {f!r} does not start at {objs[-1]!r}")
            objs.append(self.cod(f))
        return Path(tuple(objs), tuple(arrows))

    def single(self, f) -> Path:
        return self.path(f)


class MonoidalParacategory(Paracategory):
    """A paracategory with strict tensor, unit and symmetry."""

    unit: Any

    def tensor_obj(self, a, b):
        raise NotImplementedError

    def tensor(self, f, g):
        raise NotImplementedError

    def symmetry(self, a, b):
        raise NotImplementedError

    def random_object(self, rng: random.Random):
        raise NotImplementedError

    def random_arrow(self, rng: random.Random, a, b):
        raise NotImplementedError


def whisker_left(ms: MonoidalParacategory, x, p: Path) -> Path:
    """``1_x ⊗ p``, pointwise."""
    return Path(
        tuple(ms.tensor_obj(x, a) for a in p.objects),
        tuple(ms.tensor(ms.identity(x), f) for f in p.arrows),
    )


def whisker_right(ms: MonoidalParacategory, p: Path, x) -> Path:
    """``p ⊗ 1_x``, pointwise."""
    return Path(
        tuple(ms.tensor_obj(a, x) for a in p.objects),
        tuple(ms.tensor(f, ms.identity(x)) for f in p.arrows),
    )


def path_tensor(ms: MonoidalParacategory, p: Path, q: Path) -> Path:
    """``(p ⊗ 1), (1 ⊗ q)``."""
    return concat(whisker_right(ms, p, q.dom), whisker_left(ms, p.cod, q))


def path_tensor_flip(ms: MonoidalParacategory, p: Path, q: Path) -> Path:
    """``(1 ⊗ q), (p ⊗ 1)``."""
    return concat(whisker_left(ms, p.dom, q), whisker_right(ms, p, q.cod))


class TotalCategory(MonoidalParacategory):
    """A strict symmetric monoidal category seen as a total paracategory.

    ``base`` is a provider from :mod:`ptrace.vectcat` (or anything with the
    same category operations); objects are its dimensions and ``[p]`` is the
    fold of binary composition.
    """

    def __init__(self, base, max_dim: int = 3):
        self.base = base
        self.unit = base.unit
        self.max_dim = max_dim

    def dom(self, f):
        return self.base.dom(f)

    def cod(self, f):
        return self.base.cod(f)

    def identity(self, a):
        return self.base.identity(a)

    def compose(self, p: Path):
        acc = self.identity(p.dom)
        for f in p.arrows:
            acc = self.base.compose(f, acc)
        return acc

    def equal(self, x, y) -> bool:
        return self.base.equal(x, y)

    def tensor_obj(self, a, b):
        return self.base.tensor_obj(a, b)

    def tensor(self, f, g):
        return self.base.tensor(f, g)

    def symmetry(self, a, b):
        return self.base.symmetry(a, b)

    def random_object(self, rng):
        return rng.randint(0 if self.unit == 0 else 1, self.max_dim)

    def random_arrow(self, rng, a, b):
        return self.base.random_morphism(rng, a, b)


class ProductParacategory(MonoidalParacategory):
    """``C × D``: componentwise composition with Kleene pairing."""

    def __init__(self, c1: Paracategory, c2: Paracategory):
        self.c1, self.c2 = c1, c2
        self.unit = (getattr(c1, "unit", None), getattr(c2, "unit", None))

    def _split(self, p: Path) -> tuple[Path, Path]:
        return (
            Path(tuple(a for a, _ in p.objects), tuple(f for f, _ in p.arrows)),
            Path(tuple(b for _, b in p.objects), tuple(g for _, g in p.arrows)),
        )

    def dom(self, f):
        return (self.c1.dom(f[0]), self.c2.dom(f[1]))

    def cod(self, f):
        return (self.c1.cod(f[0]), self.c2.cod(f[1]))

    def identity(self, a):
        return (self.c1.identity(a[0]), self.c2.identity(a[1]))

    def compose(self, p: Path):
        p1, p2 = self._split(p)
        x, y = self.c1.compose(p1), self.c2.compose(p2)
        if not is_defined(x):
            return x
        if not is_defined(y):
            return y
        return (x, y)

    def equal(self, x, y) -> bool:
        return self.c1.equal(x[0], y[0]) and self.c2.equal(x[1], y[1])

    def tensor_obj(self, a, b):
        return (self.c1.tensor_obj(a[0], b[0]), self.c2.tensor_obj(a[1], b[1]))

    def tensor(self, f, g):
        return (self.c1.tensor(f[0], g[0]), self.c2.tensor(f[1], g[1]))

    def symmetry(self, a, b):
        return (self.c1.symmetry(a[0], b[0]), self.c2.symmetry(a[1], b[1]))

    def random_object(self, rng):
        return (self.c1.random_object(rng), self.c2.random_object(rng))

    def random_arrow(self, rng, a, b):
        return (self.c1.random_arrow(rng, a[0], b[0]), self.c2.random_arrow(rng, a[1], b[1]))


def product_paracat(c1: Paracategory, c2: Paracategory) -> ProductParacategory:
    return ProductParacategory(c1, c2)


# --- checkers ----------------------------------------------------------------

def _rep(pc, axiom, instance, relation, left, right) -> AxiomReport:
    rel = kleene_eq if relation == EQ else kleene_leq
    ok = rel(left, right, pc.equal)
    return AxiomReport(axiom, instance, "pass" if ok else "violation", relation, left, right)


def _defined(pc, axiom, instance, value) -> AxiomReport:
    verdict = "pass" if is_defined(value) else "violation"
    return AxiomReport(axiom, instance, verdict, "↓", value, value)


def check_paracat(
    pc: Paracategory,
    sample: Iterable[Path],
    inverse_pairs: Sequence[tuple[Any, Any]] = (),
) -> list[AxiomReport]:
    """Axioms (a), (b), (c) plus the identity and inverse consequences.

    For each sampled path ``p`` this checks
    (a) ``[ε_A]`` defined for every object on ``p``;
    (b) ``[f] = f`` for every arrow on ``p``;
    (c) ``[r, [q], s] ≃ [r, q, s]`` for every non-empty span ``q`` with ``[q]`` defined;
    identities: ``[r, 1_A, s] ≃ [r, s]`` at every position.
    ``inverse_pairs`` holds ``(b, b⁻¹)``; for each sampled arrow ``f`` ending
    where ``b`` starts, ``g = [f, b]`` must give back ``f = [g, b⁻¹]``.
    """
    out: list[AxiomReport] = []
    seen_objs: set = set()
    seen_arrows: set = set()
    for k, p in enumerate(sample):
        tag = f"path#{k} len={len(p)}"
        for a in p.objects:
            if a not in seen_objs:
                seen_objs.add(a)
                out.append(_defined(pc, "paracat-a", f"{tag} eps {a!r}", pc.compose(eps(a))))
        for f in p.arrows:
            if f not in seen_arrows:
                seen_arrows.add(f)
                out.append(_rep(pc, "paracat-b", f"{tag} singleton", EQ, pc.compose(pc.single(f)), f))
        whole = pc.compose(p)
        n = len(p)
        for i in range(n):
            for j in range(i + 1, n + 1):
                if j - i == n and n == 1:
                    continue
                inner = pc.compose(p.span(i, j))
                if not is_defined(inner):
                    continue
                spliced = concat(concat(p.span(0, i), pc.single(inner)), p.span(j, n))
                out.append(_rep(pc, "paracat-c", f"{tag} span {i}..{j}", EQ, pc.compose(spliced), whole))
        for i in range(n + 1):
            a = p.objects[i]
            with_id = concat(concat(p.span(0, i), pc.single(pc.identity(a))), p.span(i, n))
            out.append(_rep(pc, "paracat-identity", f"{tag} id at {i}", EQ, pc.compose(with_id), whole))
    for k, (b, binv) in enumerate(inverse_pairs):
        for f in seen_arrows:
            if pc.cod(f) != pc.dom(b):
                continue
            g = pc.compose(pc.path(f, b))
            back = bind(g, lambda g: pc.compose(pc.path(g, binv)))
            out.append(_rep(pc, "paracat-inverse", f"pair#{k}", EQ, back, f))
    return out


@dataclass
class SsmpSample:
    """Sampled data for :func:`check_ssmp`."""

    paths: list[Path]
    objects: list
    seed: int = 0


def check_ssmp(ms: MonoidalParacategory, sample: SsmpSample) -> list[AxiomReport]:
    """Strict symmetric monoidal paracategory obligations.

    Splitting lemma (a) ``[f,f'] ⊗ [g,g'] ⊑ [f⊗g, f'⊗g']`` and (b)
    ``1⊗[p] ⊑ [1⊗p]`` (both sides), the interchange lemma for singletons,
    then for the symmetry: totality, naturality, ``[σ, σ] = 1``, the strict
    hexagon ``σ_{A,B⊗C} = [σ_{A,B}⊗1, 1⊗σ_{A,C}]``, and strict
    associativity and unit laws of the tensor.
    """
    rng = random.Random(sample.seed)
    out: list[AxiomReport] = []
    T, one, cmp_ = ms.tensor_obj, ms.identity, ms.compose
    objs = list(sample.objects) or [ms.unit]
    pick = lambda: rng.choice(objs)  # noqa: E731

    twos = [p for p in sample.paths if len(p) == 2]
    for k in range(0, len(twos) - 1, 2):
        p, q = twos[k], twos[k + 1]
        left = bind(cmp_(p), lambda x: bind(cmp_(q), lambda y: ms.tensor(x, y)))
        pair = ms.path(ms.tensor(p.arrows[0], q.arrows[0]), ms.tensor(p.arrows[1], q.arrows[1]))
        out.append(_rep(ms, "ssmp-split-a", f"pair#{k}", LEQ, left, cmp_(pair)))

    for k, p in enumerate(sample.paths):
        x = objs[k % len(objs)]
        inner = cmp_(p)
        out.append(_rep(ms, "ssmp-split-b", f"path#{k} 1⊗[p]", LEQ,
                        bind(inner, lambda v: ms.tensor(one(x), v)), cmp_(whisker_left(ms, x, p))))
        out.append(_rep(ms, "ssmp-split-b", f"path#{k} [p]⊗1", LEQ,
                        bind(inner, lambda v: ms.tensor(v, one(x))), cmp_(whisker_right(ms, p, x))))

    ones = [f for p in sample.paths for f in p.arrows]
    for k in range(0, min(len(ones), 40) - 1, 2):
        f, g = ones[k], ones[k + 1]
        pf, pg = ms.single(f), ms.single(g)
        value = ms.tensor(f, g)
        out.append(_rep(ms, "ssmp-interchange", f"arrows#{k}", EQ, cmp_(path_tensor(ms, pf, pg)), value))
        out.append(_rep(ms, "ssmp-interchange", f"arrows#{k} flip", EQ,
                        cmp_(path_tensor_flip(ms, pf, pg)), value))

    for k in range(len(objs)):
        a, b, c, x = pick(), pick(), pick(), pick()
        tag = f"objs#{k}"
        s_ab, s_ba = ms.symmetry(a, b), ms.symmetry(b, a)
        out.append(_rep(ms, "sigma-symmetry", tag, EQ, cmp_(ms.path(s_ab, s_ba)), one(T(a, b))))
        hexa = cmp_(ms.path(ms.tensor(s_ab, one(c)), ms.tensor(one(b), ms.symmetry(a, c))))
        out.append(_rep(ms, "sigma-hexagon", tag, EQ, hexa, ms.symmetry(a, T(b, c))))
        y = pick()
        f = ms.random_arrow(rng, T(x, T(b, a)), y)
        g = ms.random_arrow(rng, y, T(x, T(a, b)))
        sig = ms.tensor(one(x), s_ab)
        out.append(_defined(ms, "sigma-totality", tag + " [1⊗σ, f]", cmp_(ms.path(sig, f))))
        out.append(_defined(ms, "sigma-totality", tag + " [g, 1⊗σ]", cmp_(ms.path(g, sig))))
        a2, b2 = pick(), pick()
        fa, gb = ms.random_arrow(rng, a, a2), ms.random_arrow(rng, b, b2)
        out.append(_rep(ms, "sigma-naturality", tag, EQ,
                        cmp_(ms.path(ms.tensor(fa, gb), ms.symmetry(a2, b2))),
                        cmp_(ms.path(s_ab, ms.tensor(gb, fa)))))
        h = ms.random_arrow(rng, c, x)
        out.append(_rep(ms, "strict-assoc", tag, EQ,
                        ms.tensor(ms.tensor(fa, gb), h), ms.tensor(fa, ms.tensor(gb, h))))
        out.append(_rep(ms, "strict-assoc-obj", tag, EQ, T(T(a, b), c), T(a, T(b, c))))
        out.append(_rep(ms, "strict-unit", tag, EQ, ms.tensor(fa, one(ms.unit)), fa))
        out.append(_rep(ms, "strict-unit", tag + " left", EQ, ms.tensor(one(ms.unit), fa), fa))
        out.append(_rep(ms, "strict-unit-obj", tag, EQ, T(a, ms.unit), a))
        out.append(_rep(ms, "tensor-identity", tag, EQ, ms.tensor(one(a), one(b)), one(T(a, b))))
    return out


def random_paths(
    pc: MonoidalParacategory,
    rng: random.Random,
    n: int,
    max_len: int = 4,
) -> list[Path]:
    """``n`` random well-typed paths of length ``0..max_len``."""
    out = []
    for _ in range(n):
        length = rng.randint(0, max_len)
        objs = [pc.random_object(rng) for _ in range(length + 1)]
        arrows = tuple(pc.random_arrow(rng, objs[i], objs[i + 1]) for i in range(length))
        out.append(Path(tuple(objs), arrows))
    return out


def violations(reports: Iterable[AxiomReport]) -> list[AxiomReport]:
    return [r for r in reports if r.verdict == "violation"]


class BrokenSingleton(Paracategory):
    """Wraps a paracategory but breaks axiom (b); a negative control."""

    def __init__(self, inner: Paracategory, spoil: Callable[[Any], Any]):
        self.inner = inner
        self.spoil = spoil

    def dom(self, f):
        return self.inner.dom(f)

    def cod(self, f):
        return self.inner.cod(f)

    def identity(self, a):
        return self.inner.identity(a)

    def compose(self, p: Path):
        value = self.inner.compose(p)
        if len(p) == 1:
            return self.spoil(value)
        return value

    def equal(self, x, y) -> bool:
        return self.inner.equal(x, y)


__all__ = [
    "BrokenSingleton",
    "MonoidalParacategory",
    "Paracategory",
    "Path",
    "PathError",
    "ProductParacategory",
    "SsmpSample",
    "TotalCategory",
    "Undefined",
    "check_paracat",
    "check_ssmp",
    "concat",
    "eps",
    "path_tensor",
    "path_tensor_flip",
    "product_paracat",
    "random_paths",
    "violations",
    "whisker_left",
    "whisker_right",
]
