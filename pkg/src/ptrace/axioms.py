"""Executable partial-trace axioms under Kleene semantics.

Every check works against a *trace provider*: a strict symmetric monoidal
category whose objects are dimensions, with ``identity``, ``compose``
(``g ∘ f``), ``tensor``, ``symmetry`` and a partial ``trace(f, a, u, b)``.
Instances are always given as exact rational matrices; a provider lifts
them into its own value type with ``lift``.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Protocol

import numpy as np

from .kleene import Undefined, bind, is_defined, kleene_eq, kleene_leq
from .ratlin import Matrix, direct_sum, format_matrix, inverse, mul
from .vectcat import DirectSum, FloatDirectSum, Kron, tr_hs, tr_sum_exact

__all__ = [
    "AXIOMS",
    "AxiomReport",
    "TraceProvider",
    "kleene_eq",
    "kleene_leq",
    "run_suite",
    "summarize",
]

EQ = "≃"
LEQ = "⊑"

AXIOMS = (
    "naturality",
    "dinaturality",
    "strength",
    "superposing",
    "vanishing_i",
    "vanishing_ii",
    "yanking",
)


class TraceProvider(Protocol):
    name: str
    unit: int
    exact: bool

    def tensor_obj(self, a: int, b: int) -> int: ...
    def identity(self, a: int) -> Any: ...
    def compose(self, g, f) -> Any: ...
    def tensor(self, f, g) -> Any: ...
    def symmetry(self, a: int, b: int) -> Any: ...
    def trace(self, f, a: int, u: int, b: int) -> Any: ...
    def lift(self, m: Matrix) -> Any: ...
    def equal(self, x, y) -> bool: ...


def render_value(x) -> str:
    if not is_defined(x):
        return f"UNDEFINED {x.reason}"
    if isinstance(x, Matrix):
        return format_matrix(x)
    arr = np.asarray(x, dtype=float)
    lines = [f"{arr.shape[0]} {arr.shape[1]}"]
    lines += [" ".join(f"{v:.12g}" for v in row) for row in arr]
    return "\n".join(lines)


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    instance: str
    verdict: str  # "pass", "violation", or "unstable" (float verdict flips under tol halving)
    relation: str
    left: Any = field(repr=False)
    right: Any = field(repr=False)

    @property
    def ok(self) -> bool:
        return self.verdict != "violation"

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "instance": self.instance,
            "verdict": self.verdict,
            "relation": self.relation,
            "left": render_value(self.left),
            "right": render_value(self.right),
        }


def _report(p, axiom, instance, relation, left, right) -> AxiomReport:
    rel = kleene_eq if relation == EQ else kleene_leq
    ok = rel(left, right, p.equal)
    return AxiomReport(axiom, instance, "pass" if ok else "violation", relation, left, right)


def _dims(**kw) -> str:
    return " ".join(f"{k}={v}" for k, v in kw.items())


def check_naturality(p, f, g, h, a, u, b, a2, b2, label="") -> AxiomReport:
    """``h ∘ Tr(f) ∘ g ⊑ Tr((h⊗1) ∘ f ∘ (g⊗1))``, with ``≃`` when ``g`` and ``h`` are isos."""
    iso = p.is_iso(g) and p.is_iso(h) if hasattr(p, "is_iso") else False
    F, G, H = p.lift(f), p.lift(g), p.lift(h)
    left = bind(p.trace(F, a, u, b), lambda t: p.compose(H, p.compose(t, G)))
    one_u = p.identity(u)
    conj = p.compose(p.tensor(H, one_u), p.compose(F, p.tensor(G, one_u)))
    right = p.trace(conj, a2, u, b2)
    inst = label or _dims(A=a, U=u, B=b, A2=a2, B2=b2, iso=iso)
    return _report(p, "naturality", inst, EQ if iso else LEQ, left, right)


def check_dinaturality(p, f, g, a, u, b, u2, label="") -> AxiomReport:
    """``Tr^U((1_B⊗g) ∘ f) ≃ Tr^{U'}(f ∘ (1_A⊗g))`` for ``f: A⊗U → B⊗U'``, ``g: U' → U``."""
    F, G = p.lift(f), p.lift(g)
    left = p.trace(p.compose(p.tensor(p.identity(b), G), F), a, u, b)
    right = p.trace(p.compose(F, p.tensor(p.identity(a), G)), a, u2, b)
    return _report(p, "dinaturality", label or _dims(A=a, U=u, B=b, U2=u2), EQ, left, right)


def check_strength(p, f, g, a, u, b, c, d, label="") -> AxiomReport:
    """``g ⊗ Tr(f) ⊑ Tr(g ⊗ f)``."""
    F, G = p.lift(f), p.lift(g)
    left = bind(p.trace(F, a, u, b), lambda t: p.tensor(G, t))
    right = p.trace(p.tensor(G, F), p.tensor_obj(c, a), u, p.tensor_obj(d, b))
    return _report(p, "strength", label or _dims(A=a, U=u, B=b, C=c, D=d), LEQ, left, right)


def check_superposing(p, f, g, a, u, b, c, d, label="") -> AxiomReport:
    """``Tr(f) ⊗ g ⊑ Tr((1_B⊗σ_{U,D}) ∘ (f⊗g) ∘ (1_A⊗σ_{C,U}))``."""
    F, G = p.lift(f), p.lift(g)
    left = bind(p.trace(F, a, u, b), lambda t: p.tensor(t, G))
    pre = p.tensor(p.identity(a), p.symmetry(c, u))
    post = p.tensor(p.identity(b), p.symmetry(u, d))
    body = p.compose(post, p.compose(p.tensor(F, G), pre))
    right = p.trace(body, p.tensor_obj(a, c), u, p.tensor_obj(b, d))
    return _report(p, "superposing", label or _dims(A=a, U=u, B=b, C=c, D=d), LEQ, left, right)


def check_vanishing_i(p, f, a, b, label="") -> AxiomReport:
    """``f ≃ Tr^I(f)``."""
    F = p.lift(f)
    right = p.trace(F, a, p.unit, b)
    return _report(p, "vanishing_i", label or _dims(A=a, B=b), EQ, F, right)


def check_vanishing_ii(p, f, a, u, v, b, label="") -> AxiomReport:
    """``Tr^U(Tr^V(f)) ≃ Tr^{U⊗V}(f)`` when ``Tr^V(f)`` is defined, ``⊑`` always."""
    F = p.lift(f)
    inner = p.trace(F, p.tensor_obj(a, u), v, p.tensor_obj(b, u))
    left = bind(inner, lambda t: p.trace(t, a, u, b))
    right = p.trace(F, a, p.tensor_obj(u, v), b)
    relation = EQ if is_defined(inner) else LEQ
    return _report(p, "vanishing_ii", label or _dims(A=a, U=u, V=v, B=b), relation, left, right)


def check_yanking(p, a, label="") -> AxiomReport:
    """``Tr^A(σ_{A,A}) ≃ 1_A``."""
    left = p.trace(p.symmetry(a, a), a, a, a)
    return _report(p, "yanking", label or _dims(A=a), EQ, left, p.identity(a))


CHECKS: dict[str, Callable[..., AxiomReport]] = {
    "naturality": check_naturality,
    "dinaturality": check_dinaturality,
    "strength": check_strength,
    "superposing": check_superposing,
    "vanishing_i": check_vanishing_i,
    "vanishing_ii": check_vanishing_ii,
    "yanking": check_yanking,
}


def _pattern(r: AxiomReport) -> tuple[bool, bool]:
    return is_defined(r.left), is_defined(r.right)


def run_check(p, axiom: str, inst: dict) -> AxiomReport:
    """Run one check; heuristic providers only keep verdicts stable under ``tol/2``."""
    rep = CHECKS[axiom](p, **inst)
    if getattr(p, "exact", True):
        return rep
    again = CHECKS[axiom](p.with_tol(p.tol / 2), **inst)
    if _pattern(again) != _pattern(rep):
        return AxiomReport(rep.axiom, rep.instance, "unstable", rep.relation, rep.left, rep.right)
    return rep


# --- instance generation -----------------------------------------------------

def _rand_matrix(rng, p, rows: int, cols: int) -> Matrix:
    return p.random_morphism(rng, cols, rows)


def _structured_endo(rng, p, a: int, u: int, b: int) -> Matrix:
    """A random ``f: A⊕U → B⊕U`` biased towards interesting definedness.

    Mixes dense matrices, singular ``I − f22`` with a kernel-image witness,
    nilpotent feedback, and sparse 0/±1 matrices.
    """
    mode = rng.random()
    if u == 0 or mode < 0.35:
        return _rand_matrix(rng, p, b + u, a + u)
    if mode < 0.65:
        r = rng.randint(0, u - 1)
        left = _rand_matrix(rng, p, u, r)
        right = _rand_matrix(rng, p, r, u)
        d = mul(left, right)
        f22 = Matrix.identity(u) - d
        i = _rand_matrix(rng, p, u, a)
        k = _rand_matrix(rng, p, b, u)
        f11 = _rand_matrix(rng, p, b, a)
        if rng.random() < 0.3:
            # break one side of the witness so the kernel-image trace fails
            return _assemble(f11, _rand_matrix(rng, p, b, u), mul(d, i), f22)
        return _assemble(f11, mul(k, d), mul(d, i), f22)
    if mode < 0.85:
        f22 = Matrix(u, u, (
            _rand_matrix(rng, p, 1, 1)[0, 0] if j > i else 0
            for i in range(u) for j in range(u)
        ))
        return _assemble(
            _rand_matrix(rng, p, b, a), _rand_matrix(rng, p, b, u),
            _rand_matrix(rng, p, u, a), f22,
        )
    n, m = b + u, a + u
    return Matrix(n, m, (rng.choice((0, 0, 0, 1, 1, -1)) for _ in range(n * m)))


def _assemble(f11, f12, f21, f22) -> Matrix:
    from .vectcat import BlockView

    return BlockView(f11, f12, f21, f22).assemble()


def default_generator(rng: random.Random, p, max_dim: int = 4) -> dict[str, dict]:
    """One instance for each axiom, drawn from ``rng``."""
    additive = p.unit == 0
    lo = 0 if additive else 1
    dim = lambda: rng.randint(lo, max_dim)  # noqa: E731
    T = p.tensor_obj

    def endo(a, u, b):
        if additive:
            return _structured_endo(rng, p, a, u, b)
        return _rand_matrix(rng, p, T(b, u), T(a, u))

    out: dict[str, dict] = {}
    a, u, b = dim(), dim(), dim()
    if rng.random() < 0.5:
        a2, b2 = a, b
    else:
        a2, b2 = dim(), dim()
    out["naturality"] = dict(
        f=endo(a, u, b), g=_rand_matrix(rng, p, a, a2), h=_rand_matrix(rng, p, b2, b),
        a=a, u=u, b=b, a2=a2, b2=b2,
    )
    a, u, b, u2 = dim(), dim(), dim(), dim()
    out["dinaturality"] = dict(
        f=_dinat_f(rng, p, a, u, b, u2, additive), g=_rand_matrix(rng, p, u, u2),
        a=a, u=u, b=b, u2=u2,
    )
    for name in ("strength", "superposing"):
        a, u, b, c, d = dim(), dim(), dim(), dim(), dim()
        out[name] = dict(f=endo(a, u, b), g=_rand_matrix(rng, p, d, c), a=a, u=u, b=b, c=c, d=d)
    a, b = dim(), dim()
    out["vanishing_i"] = dict(f=_rand_matrix(rng, p, b, a), a=a, b=b)
    a, u, v, b = dim(), dim(), dim(), dim()
    if additive:
        f = _structured_endo(rng, p, a + u, v, b + u) if rng.random() < 0.5 else endo(a, u + v, b)
    else:
        f = _rand_matrix(rng, p, T(T(b, u), v), T(T(a, u), v))
    out["vanishing_ii"] = dict(f=f, a=a, u=u, v=v, b=b)
    out["yanking"] = dict(a=dim())
    return out


def _dinat_f(rng, p, a, u, b, u2, additive) -> Matrix:
    if not additive:
        return _rand_matrix(rng, p, p.tensor_obj(b, u2), p.tensor_obj(a, u))
    if u == u2:
        return _structured_endo(rng, p, a, u, b)
    return _rand_matrix(rng, p, b + u2, a + u)


def _m(rows) -> Matrix:
    return Matrix.from_rows(rows)


VANISHING_II_MATRIX = _m([[1, 1, 0], [1, -2, 1], [0, 1, Fraction(1, 2)]])
PARADOX_F = _m([[0, 1, 1], [0, 2, 1], [1, -1, 0]])
SWAP_X = _m([[0, 1], [1, 0]])
HS_ONLY = _m([[1, 1], [1, 2]])
KI_ONLY = Matrix.identity(2)
SUM_ONLY = _m([[0, 1], [0, 1]])


def paradox_g() -> Matrix:
    """``(id ⊕ X) f (id ⊕ X⁻¹)``."""
    one = Matrix.identity(1)
    return mul(mul(direct_sum(one, SWAP_X), PARADOX_F), direct_sum(one, inverse(SWAP_X)))


def worked_corpus(p) -> list[tuple[str, dict]]:
    """Fixed instances from the worked examples, prepended to every suite."""
    if p.unit != 0:
        return [("yanking", dict(a=d, label=f"corpus yanking A={d}")) for d in (1, 2, 3)]
    corpus: list[tuple[str, dict]] = [
        ("vanishing_ii", dict(f=VANISHING_II_MATRIX, a=1, u=1, v=1, b=1,
                              label="corpus vanishing-II counterexample")),
        ("vanishing_ii", dict(f=PARADOX_F, a=1, u=1, v=1, b=1, label="corpus paradox f")),
        ("vanishing_ii", dict(f=paradox_g(), a=1, u=1, v=1, b=1, label="corpus paradox g")),
        ("dinaturality", dict(
            f=mul(PARADOX_F, direct_sum(Matrix.identity(1), inverse(SWAP_X))),
            g=SWAP_X, a=1, u=2, b=1, u2=2, label="corpus paradox conjugation by X")),
    ]
    for name, m in (("hs-only", HS_ONLY), ("ki-only", KI_ONLY), ("sum-only", SUM_ONLY)):
        corpus.append(("naturality", dict(
            f=m, g=_m([[2]]), h=_m([[-1]]), a=1, u=1, b=1, a2=1, b2=1,
            label=f"corpus {name} conjugated")))
        corpus.append(("strength", dict(
            f=m, g=_m([[1, 2]]), a=1, u=1, b=1, c=2, d=1, label=f"corpus {name} strength")))
    for d in (0, 1, 2, 3):
        corpus.append(("yanking", dict(a=d, label=f"corpus yanking A={d}")))
        corpus.append(("vanishing_i", dict(f=Matrix.identity(d), a=d, b=d,
                                           label=f"corpus vanishing-I id_{d}")))
    return corpus


def _instances(p, gen, n, seed, max_dim):
    for k in range(n):
        rng = random.Random(f"{seed}:{k}")
        yield k, gen(rng, p, max_dim)


def _run_one(args) -> list[AxiomReport]:
    p, gen, seed, k, max_dim = args
    rng = random.Random(f"{seed}:{k}")
    insts = gen(rng, p, max_dim)
    out = []
    for axiom in AXIOMS:
        inst = dict(insts[axiom])
        inst.setdefault("label", f"#{k} " + _dims(**{
            key: val for key, val in inst.items() if isinstance(val, int)
        }))
        out.append(run_check(p, axiom, inst))
    return out


def run_suite(
    p,
    gen: Callable | None = None,
    n: int = 1000,
    seed: int = 0,
    max_dim: int = 4,
    corpus: bool = True,
    workers: int = 1,
) -> list[AxiomReport]:
    """All seven checks on ``n`` seeded instances, worked examples first.

    Output depends only on ``(p, gen, n, seed, max_dim, corpus)``; with
    ``workers > 1`` instances are fanned out to processes and merged back
    in instance order.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    gen = gen or default_generator
    reports: list[AxiomReport] = []
    if corpus:
        for axiom, inst in worked_corpus(p):
            reports.append(run_check(p, axiom, inst))
    jobs = [(p, gen, seed, k, max_dim) for k in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for batch in ex.map(_run_one, jobs, chunksize=max(1, n // (4 * workers))):
                reports.extend(batch)
    else:
        for job in jobs:
            reports.extend(_run_one(job))
    return reports


def summarize(reports: Iterable[AxiomReport]) -> dict[str, dict[str, int]]:
    table = {ax: {"pass": 0, "violation": 0, "unstable": 0} for ax in AXIOMS}
    for r in reports:
        table[r.axiom][r.verdict] += 1
    return table


# --- reproductions of the worked examples -----------------------------------

def _fmt_inline(x) -> str:
    if not is_defined(x):
        return f"UNDEFINED({x.reason})"
    if isinstance(x, Matrix):
        from .ratlin import format_entry

        if x.shape == (1, 1):
            return format_entry(x[0, 0])
        return "[" + "; ".join(
            " ".join(format_entry(v) for v in x.row(i)) for i in range(x.rows)
        ) + "]"
    arr = np.asarray(x, dtype=float)
    arr = np.where(np.abs(arr) < 1e-12, 0.0, arr) + 0.0  # drop rounding dust and -0.0
    if arr.shape == (1, 1):
        return f"{arr[0, 0]:.6g}"
    return "[" + "; ".join(" ".join(f"{v:.6g}" for v in row) for row in arr) + "]"


@dataclass
class Repro:
    name: str
    lines: list[str]
    values: dict[str, Any]
    ok: bool

    @property
    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def repro_trace_paradox() -> Repro:
    f, g = PARADOX_F, paradox_g()
    x2 = mul(SWAP_X, SWAP_X)
    inner_f, inner_g = tr_hs(f, 2, 1), tr_hs(g, 2, 1)
    outer_f = bind(inner_f, lambda t: tr_sum_exact(t, 1, 1))
    outer_g = bind(inner_g, lambda t: tr_sum_exact(t, 1, 1))
    lines = [
        "trace paradox: A=B=U=k, X=[0 1; 1 0]",
        f"X*X = {_fmt_inline(x2)}",
        f"f = {_fmt_inline(f)}",
        f"g = (id+X) f (id+X^-1) = {_fmt_inline(g)}",
        f"TrHS^U(f) = {_fmt_inline(inner_f)}",
        f"TrHS^U(g) = {_fmt_inline(inner_g)}",
        f"TrS^U(TrHS^U(f)) = {_fmt_inline(outer_f)}",
        f"TrS^U(TrHS^U(g)) = {_fmt_inline(outer_g)}",
        "a trace extending both would give Tr^(U+U)(f)=1 and Tr^(U+U)(g)=0 by vanishing II,",
        "but dinaturality forces Tr^(U+U)(f) ~= Tr^(U+U)(g)",
        f"TrS∘TrHS(f)={_fmt_inline(outer_f)}  TrS∘TrHS(g)={_fmt_inline(outer_g)}"
        "  CONTRADICTION: dinaturality",
    ]
    ok = outer_f == _m([[1]]) and outer_g == _m([[0]]) and x2 == Matrix.identity(2)
    return Repro("paradox", lines, {"f": outer_f, "g": outer_g,
                                    "inner_f": inner_f, "inner_g": inner_g}, ok)


def repro_vanishing2(horizon: int = 64, tol: float = 1e-9) -> Repro:
    from .vectcat import tr_sum_float

    f = VANISHING_II_MATRIX
    inner = tr_sum_exact(f, 2, 1)
    outer = bind(inner, lambda t: tr_sum_exact(t, 1, 1))
    joint = tr_sum_exact(f, 1, 2)
    inner_fl = tr_sum_float(f, 2, 1, horizon=horizon, tol=tol)
    outer_fl = bind(inner_fl, lambda t: tr_sum_float(t, 1, 1, horizon=horizon, tol=tol))
    joint_fl = tr_sum_float(f, 1, 2, horizon=horizon, tol=tol)
    lines = [
        "vanishing II counterexample: A=B=U=V=k",
        f"f = {_fmt_inline(f)}",
        f"exact  TrS^V(f) = {_fmt_inline(inner)}",
        f"exact  TrS^U(TrS^V(f)) = {_fmt_inline(outer)}",
        f"exact  TrS^(U+V)(f) = {_fmt_inline(joint)}",
        f"float  horizon={horizon} tol={tol:g}",
        f"float  TrS^V(f) = {_fmt_inline(inner_fl)}",
        f"float  TrS^U(TrS^V(f)) = {_fmt_inline(outer_fl)}",
        f"float  TrS^(U+V)(f) = {_fmt_inline(joint_fl)}",
        "VIOLATION: vanishing II (left defined, right undefined)",
    ]
    ok = (
        inner == _m([[1, 1], [1, 0]])
        and outer == _m([[2]])
        and not is_defined(joint)
        and not is_defined(joint_fl)
        and is_defined(outer_fl)
    )
    return Repro("vanishing2", lines, {"inner": inner, "outer": outer, "joint": joint,
                                       "joint_float": joint_fl}, ok)


def repro_yanking(max_dim: int = 3) -> Repro:
    from .vectcat import tr_ki_witness

    lines = ["yanking with the kernel-image trace"]
    ok = True
    for d in range(1, max_dim + 1):
        sigma = DirectSum().symmetry(d, d)
        res = tr_ki_witness(sigma, d, d, d)
        value, wit = res
        good = value == Matrix.identity(d) and wit.i == Matrix.identity(d) \
            and wit.k == Matrix.identity(d)
        ok &= good
        lines.append(
            f"U={d}: TrKI(sigma_U) = {_fmt_inline(value)}  witness i={_fmt_inline(wit.i)}"
            f" k={_fmt_inline(wit.k)}  {'OK' if good else 'FAIL'}"
        )
    return Repro("yanking", lines, {}, ok)


def _verdict_table(title: str, rows) -> tuple[list[str], bool]:
    from .vectcat import tr_ki

    ops = {"HS": tr_hs, "KI": tr_ki, "SUM": tr_sum_exact}
    lines = [title]
    ok = True
    for label, m, expect in rows:
        vals = {k: op(m, 1, 1) for k, op in ops.items()}
        got = {k: is_defined(v) for k, v in vals.items()}
        good = all(got[k] == v for k, v in expect.items())
        ok &= good
        lines.append(
            f"{label}: f={_fmt_inline(m)}  "
            + "  ".join(f"{k}={_fmt_inline(v)}" for k, v in vals.items())
            + ("  OK" if good else "  FAIL")
        )
    return lines, ok


def repro_hs_vs_ki() -> Repro:
    lines, ok = _verdict_table("definedness: HS vs kernel-image vs sum", [
        ("hs-defined/sum-undefined", HS_ONLY, {"HS": True, "SUM": False}),
        ("ki-defined/hs-undefined", KI_ONLY, {"KI": True, "HS": False}),
    ])
    return Repro("hs-vs-ki", lines, {}, ok)


def repro_sum_vs_ki() -> Repro:
    lines, ok = _verdict_table("definedness: sum vs kernel-image", [
        ("sum-defined/ki-undefined", SUM_ONLY, {"SUM": True, "KI": False}),
        ("sum-defined/hs-undefined", KI_ONLY, {"SUM": True, "HS": False}),
    ])
    return Repro("sum-vs-ki", lines, {}, ok)


REPROS = {
    "paradox": repro_trace_paradox,
    "vanishing2": repro_vanishing2,
    "yanking": repro_yanking,
    "hs-vs-ki": repro_hs_vs_ki,
    "sum-vs-ki": repro_sum_vs_ki,
}


def default_provider(name: str):
    from .vectcat import provider

    return provider(name)


__all__ += ["CHECKS", "REPROS", "Repro", "worked_corpus", "default_generator",
            "FloatDirectSum", "Kron", "Undefined"]
