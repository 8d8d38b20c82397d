"""The partial Int construction over a partially traced base category.

Objects are pairs ``(plus, minus)`` of base objects; an arrow
``(A⁺, A⁻) → (B⁺, B⁻)`` is a base morphism ``A⁺⊗B⁻ → B⁺⊗A⁻``. Composition
of a path feeds every intermediate negative wire back through the base
trace, so it is only partially defined: the result is a strict symmetric
monoidal paracategory, compact closed with identity units and counits.

The induced functor out of ``Int`` into a compact closed target ``D`` of a
traced functor ``G`` sends ``f`` to ``(ε ⊗ 1) ∘ (G f ⊗ 1) ∘ (1 ⊗ η)`` up to
the coherence isomorphisms of ``D``; that functor is not strict and is not
implemented here.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Any, Sequence

from .kleene import Undefined, bind, is_defined
from .paracat import MonoidalParacategory, Path, PathError, eps
from .ratlin import Matrix, format_matrix, parse_matrix
from .vectcat import DirectSum


@dataclass(frozen=True)
class IObj:
    plus: int
    minus: int

    def __repr__(self) -> str:
        return f"({self.plus},{self.minus})"


@dataclass(frozen=True)
class IMor:
    """An arrow ``dom → cod`` carried by ``under: dom.plus⊗cod.minus → cod.plus⊗dom.minus``."""

    dom: IObj
    cod: IObj
    under: Matrix

    def __repr__(self) -> str:
        return f"IMor({self.dom!r}->{self.cod!r}, {self.under!r})"


class TypingError(ValueError):
    pass


class Intp(MonoidalParacategory):
    """``Int`` of a partially traced strict symmetric monoidal category.

    ``base`` is an exact provider from :mod:`ptrace.vectcat`; the default is
    ``(Vect, ⊕)`` with the kernel-image trace.
    """

    def __init__(self, base=None, max_dim: int = 3, cache_size: int = 100_000):
        self.base = base if base is not None else DirectSum("ki")
        if not getattr(self.base, "exact", False):
            raise ValueError("Intp needs an exact base provider")
        b = self.base
        self.unit = IObj(b.unit, b.unit)
        self.max_dim = max_dim
        self._cache: dict[Path, Any] = {}
        self._cache_size = cache_size

    def __repr__(self) -> str:
        return f"Intp({self.base!r})"

    # -- graph ------------------------------------------------------------
    def dom(self, f: IMor) -> IObj:
        return f.dom

    def cod(self, f: IMor) -> IObj:
        return f.cod

    def _T(self, *objs: int) -> int:
        out = self.base.unit
        for x in objs:
            out = self.base.tensor_obj(out, x)
        return out

    def make(self, dom: IObj, cod: IObj, under: Matrix) -> IMor:
        """Wrap ``under``, checking that its shape fits the typing rule."""
        t = self._T
        want = (t(cod.plus, dom.minus), t(dom.plus, cod.minus))
        if (self.base.cod(under), self.base.dom(under)) != want:
            raise TypingError(
                f"arrow {dom!r}->{cod!r} needs a {want[0]}x{want[1]} base matrix, "
                f"got {under.rows}x{under.cols}"
            )
        return IMor(dom, cod, under)

    def identity(self, a: IObj) -> IMor:
        return IMor(a, a, self.base.identity(self._T(a.plus, a.minus)))

    # -- composition ----------------------------------------------------------
    def precompose(self, p: Path) -> Matrix:
        """The wiring ``A₀⁺⊗V⊗Aₙ⁻ → Aₙ⁺⊗A₀⁻⊗V`` with ``V = A₀⁻⊗…⊗Aₙ₋₁⁻``.

        Total: only composes and tensors base morphisms.
        """
        b, T = self.base, self._T
        a0 = p.objects[0]
        acc = b.identity(T(a0.plus, a0.minus))
        v = b.unit
        for k, f in enumerate(p.arrows):
            an, an1 = p.objects[k], p.objects[k + 1]
            if f.dom != an or f.cod != an1:
                raise PathError(f"arrow {k} does not fit the path")
            w = T(a0.minus, v)
            step = b.tensor(acc, b.identity(an1.minus))
            step = b.compose(b.tensor(b.identity(an.plus), b.symmetry(w, an1.minus)), step)
            step = b.compose(b.tensor(f.under, b.identity(w)), step)
            step = b.compose(b.tensor(b.identity(an1.plus), b.symmetry(an.minus, w)), step)
            acc = step
            v = T(v, an.minus)
        return acc

    def feedback_object(self, p: Path) -> int:
        return self._T(*(a.minus for a in p.objects[:-1]))

    def compose(self, p: Path):
        """``[p] = Tr^V(⟦p⟧ ∘ (A₀⁺ ⊗ σ_{Aₙ⁻,V}))``, memoized per path."""
        hit = self._cache.get(p)
        if hit is not None:
            return hit
        b, T = self.base, self._T
        a0, an = p.objects[0], p.objects[-1]
        v = self.feedback_object(p)
        body = b.compose(
            self.precompose(p),
            b.tensor(b.identity(a0.plus), b.symmetry(an.minus, v)),
        )
        res = b.trace(body, T(a0.plus, an.minus), v, T(an.plus, a0.minus))
        out = bind(res, lambda m: IMor(a0, an, m))
        if len(self._cache) >= self._cache_size:
            self._cache.clear()
        self._cache[p] = out
        return out

    def binary_composite(self, f: IMor, g: IMor):
        """``g ∘ f`` through a single trace over ``B⁻``; an independent route for length 2."""
        b, T = self.base, self._T
        a, bb, c = f.dom, f.cod, g.cod
        if g.dom != bb:
            raise PathError("arrows are not composable")
        s = b.symmetry
        one = b.identity
        body = b.tensor(one(a.plus), s(c.minus, bb.minus))
        body = b.compose(b.tensor(f.under, one(c.minus)), body)
        body = b.compose(b.tensor(one(bb.plus), s(a.minus, c.minus)), body)
        body = b.compose(b.tensor(g.under, one(a.minus)), body)
        body = b.compose(b.tensor(one(c.plus), s(bb.minus, a.minus)), body)
        res = b.trace(body, T(a.plus, c.minus), bb.minus, T(c.plus, a.minus))
        return bind(res, lambda m: IMor(a, c, m))

    # -- monoidal structure -----------------------------------------------------
    def tensor_obj(self, a: IObj, b: IObj) -> IObj:
        return IObj(self._T(a.plus, b.plus), self._T(b.minus, a.minus))

    def tensor(self, f: IMor, g: IMor) -> IMor:
        b = self.base
        a_, c_ = f.dom, f.cod
        b_, d_ = g.dom, g.cod
        pre = b.permutation([a_.plus, b_.plus, d_.minus, c_.minus], [0, 3, 1, 2])
        post = b.permutation([c_.plus, a_.minus, d_.plus, b_.minus], [0, 2, 3, 1])
        under = b.compose(post, b.compose(b.tensor(f.under, g.under), pre))
        return IMor(self.tensor_obj(a_, b_), self.tensor_obj(c_, d_), under)

    def symmetry(self, a: IObj, b: IObj) -> IMor:
        base = self.base
        under = base.tensor(base.symmetry(a.plus, b.plus), base.symmetry(a.minus, b.minus))
        return IMor(self.tensor_obj(a, b), self.tensor_obj(b, a), under)

    def dual(self, a: IObj) -> IObj:
        return IObj(a.minus, a.plus)

    def eta(self, a: IObj) -> IMor:
        """``I → A* ⊗ A``, carried by the identity on ``A⁻⊗A⁺``."""
        target = self.tensor_obj(self.dual(a), a)
        return IMor(self.unit, target, self.base.identity(self._T(a.minus, a.plus)))

    def eps(self, a: IObj) -> IMor:
        """``A ⊗ A* → I``, carried by the identity on ``A⁺⊗A⁻``."""
        source = self.tensor_obj(a, self.dual(a))
        return IMor(source, self.unit, self.base.identity(self._T(a.plus, a.minus)))

    # -- embedding and trace ------------------------------------------------
    def embed_obj(self, a: int) -> IObj:
        return IObj(a, self.base.unit)

    def embed(self, f: Matrix) -> IMor:
        b = self.base
        return IMor(self.embed_obj(b.dom(f)), self.embed_obj(b.cod(f)), f)

    def _quotient(self, whole: int, part: int) -> int:
        if self.base.unit == 0:
            q = whole - part
            ok = q >= 0
        else:
            q, r = divmod(whole, part) if part else (0, whole)
            ok = part > 0 and r == 0
        if not ok:
            raise TypingError(f"cannot split {part} off {whole}")
        return q

    def trace_path(self, f: IMor, u: IObj, a: IObj | None = None, b: IObj | None = None) -> Path:
        """``1⊗η_U, 1⊗σ_{U*,U}, f⊗1_{U*}, 1⊗ε_U`` for ``f: A⊗U → B⊗U``."""
        if a is None:
            a = IObj(self._quotient(f.dom.plus, u.plus), self._quotient(f.dom.minus, u.minus))
        if b is None:
            b = IObj(self._quotient(f.cod.plus, u.plus), self._quotient(f.cod.minus, u.minus))
        if self.tensor_obj(a, u) != f.dom or self.tensor_obj(b, u) != f.cod:
            raise TypingError(f"{f!r} is not of the form A⊗U → B⊗U for U={u!r}")
        us = self.dual(u)
        return self.path(
            self.tensor(self.identity(a), self.eta(u)),
            self.tensor(self.identity(a), self.symmetry(us, u)),
            self.tensor(f, self.identity(us)),
            self.tensor(self.identity(b), self.eps(u)),
        )

    def trace(self, f: IMor, u: IObj, a: IObj | None = None, b: IObj | None = None):
        return self.compose(self.trace_path(f, u, a, b))

    # -- sampling ------------------------------------------------------------
    def random_object(self, rng: random.Random) -> IObj:
        lo = 0 if self.base.unit == 0 else 1
        return IObj(rng.randint(lo, self.max_dim), rng.randint(lo, self.max_dim))

    def random_arrow(self, rng: random.Random, a: IObj, b: IObj) -> IMor:
        T = self._T
        cols, rows = T(a.plus, b.minus), T(b.plus, a.minus)
        if rng.random() < 0.5:
            # sparse 0/±1 arrows make singular feedback, so compositions can fail
            under = Matrix(rows, cols, (rng.choice((0, 0, 0, 1, 1, -1)) for _ in range(rows * cols)))
        else:
            under = self.base.random_morphism(rng, cols, rows)
        return IMor(a, b, under)


# module-level aliases for the common operations over the default base
_DEFAULT = None


def default_intp() -> Intp:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Intp()
    return _DEFAULT


def precompose(p: Path, ip: Intp | None = None) -> Matrix:
    return (ip or default_intp()).precompose(p)


def pcompose(p: Path, ip: Intp | None = None):
    return (ip or default_intp()).compose(p)


def imor_tensor(f: IMor, g: IMor, ip: Intp | None = None) -> IMor:
    return (ip or default_intp()).tensor(f, g)


def isym(a: IObj, b: IObj, ip: Intp | None = None) -> IMor:
    return (ip or default_intp()).symmetry(a, b)


def idual(a: IObj) -> IObj:
    return IObj(a.minus, a.plus)


def ieta(a: IObj, ip: Intp | None = None) -> IMor:
    return (ip or default_intp()).eta(a)


def ieps(a: IObj, ip: Intp | None = None) -> IMor:
    return (ip or default_intp()).eps(a)


def embed_n(x, ip: Intp | None = None):
    """``N(A) = (A, I)`` on objects, ``N(f) = f`` on arrows."""
    ip = ip or default_intp()
    return ip.embed(x) if isinstance(x, Matrix) else ip.embed_obj(x)


def itrace(f: IMor, u: IObj, ip: Intp | None = None, a: IObj | None = None, b: IObj | None = None):
    return (ip or default_intp()).trace(f, u, a, b)


# --- path files --------------------------------------------------------------

def _obj_json(a: IObj) -> list[int]:
    return [a.plus, a.minus]


def path_to_json(p: Path) -> dict:
    return {
        "objects": [_obj_json(a) for a in p.objects],
        "arrows": [
            {"dom": _obj_json(f.dom), "cod": _obj_json(f.cod), "matrix": format_matrix(f.under)}
            for f in p.arrows
        ],
    }


def path_from_json(data: dict, ip: Intp | None = None) -> Path:
    """Read a path file; arrows alone suffice, ``objects`` is only needed for empty paths."""
    ip = ip or default_intp()
    arrows = [
        ip.make(IObj(*a["dom"]), IObj(*a["cod"]), parse_matrix(a["matrix"]))
        for a in data.get("arrows", [])
    ]
    if not arrows:
        objs = data.get("objects") or []
        if len(objs) != 1:
            raise PathError("an empty path needs exactly one object")
        return eps(IObj(*objs[0]))
    p = ip.path(*arrows)
    if "objects" in data and [list(x) for x in data["objects"]] != [_obj_json(a) for a in p.objects]:
        raise PathError("listed objects do not match the arrows")
    return p


def load_path(path: str, ip: Intp | None = None) -> Path:
    with open(path, encoding="utf-8") as fh:
        return path_from_json(json.load(fh), ip)


def dump_path(p: Path, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(path_to_json(p), fh, indent=2)
        fh.write("\n")


__all__ = [
    "IMor",
    "IObj",
    "Intp",
    "TypingError",
    "Undefined",
    "dump_path",
    "embed_n",
    "idual",
    "ieps",
    "ieta",
    "imor_tensor",
    "is_defined",
    "isym",
    "itrace",
    "load_path",
    "path_from_json",
    "path_to_json",
    "pcompose",
    "precompose",
]
