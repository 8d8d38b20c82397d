"""Finite-dimensional rational vector spaces under ``⊕`` and ``⊗``.

Objects are plain dimensions and a morphism ``A → B`` is a ``B x A``
:class:`~ptrace.ratlin.Matrix`. Both monoidal structures are strict: the
``⊕`` unit is the zero space and the ``⊗`` unit is the one-dimensional
space.

For ``f: A ⊕ U → B ⊕ U`` the block ``f_ij`` is ``π_i ∘ f ∘ ι_j``, so
``f12: U → B`` occupies the first ``B`` rows and last ``U`` columns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .kleene import Undefined, is_defined
from .ratlin import (
    DimensionError,
    Matrix,
    block_permutation,
    charpoly,
    column_basis,
    direct_sum,
    hstack,
    inverse,
    kron,
    mul,
    schur_stable,
    solve_left,
    solve_right,
    vstack,
)

# reason codes reported for undefined traces
NOT_INVERTIBLE = "not-invertible"
IMAGE_OBSTRUCTION = "image-obstruction"
KERNEL_OBSTRUCTION = "kernel-obstruction"
DIVERGES = "diverges"
NOT_SUBSTOCHASTIC = "not-substochastic"


class NotSubstochasticError(ValueError):
    """Input to the substochastic trace is not itself substochastic."""


class BlockView(NamedTuple):
    f11: Matrix
    f12: Matrix
    f21: Matrix
    f22: Matrix

    def assemble(self) -> Matrix:
        return vstack(hstack(self.f11, self.f12), hstack(self.f21, self.f22))


@dataclass(frozen=True)
class TraceWitness:
    """A pair with ``f12 = k·(I − f22)`` and ``f21 = (I − f22)·i``."""

    i: Matrix
    k: Matrix


def _split_dims(f, a: int, u: int, b: int | None, u2: int | None = None):
    rows, cols = f.shape
    if u2 is None:
        u2 = u
    if b is None:
        b = rows - u2
    if a < 0 or u < 0 or b < 0 or u2 < 0 or a + u != cols or b + u2 != rows:
        raise DimensionError(
            f"split A={a}, U={u}, B={b}, U'={u2} does not partition a {rows}x{cols} matrix"
        )
    return a, u, b, u2


def blocks(f: Matrix, a: int, u: int, b: int | None = None, u2: int | None = None) -> BlockView:
    """Split ``f: A ⊕ U → B ⊕ U'`` into its four blocks."""
    a, u, b, u2 = _split_dims(f, a, u, b, u2)
    return BlockView(
        f.submatrix(0, b, 0, a),
        f.submatrix(0, b, a, a + u),
        f.submatrix(b, b + u2, 0, a),
        f.submatrix(b, b + u2, a, a + u),
    )


def tr_hs(f: Matrix, a: int, u: int, b: int | None = None) -> Matrix | Undefined:
    """The HS trace ``f11 + f12 (I − f22)⁻¹ f21``, defined when ``I − f22`` is invertible."""
    f11, f12, f21, f22 = blocks(f, a, u, b)
    inv = inverse(Matrix.identity(u) - f22)
    if not is_defined(inv):
        return Undefined(NOT_INVERTIBLE)
    return f11 + mul(mul(f12, inv), f21)


def tr_ki_witness(
    f: Matrix, a: int, u: int, b: int | None = None
) -> tuple[Matrix, TraceWitness] | Undefined:
    """Kernel-image trace together with the witness pair that was found."""
    f11, f12, f21, f22 = blocks(f, a, u, b)
    d = Matrix.identity(u) - f22
    i = solve_right(d, f21)
    if not is_defined(i):
        return Undefined(IMAGE_OBSTRUCTION)
    k = solve_left(d, f12)
    if not is_defined(k):
        return Undefined(KERNEL_OBSTRUCTION)
    value = f11 + mul(f12, i)
    # witness independence: both readings of the value must coincide
    if value != f11 + mul(k, f21):
        raise ArithmeticError("kernel-image witnesses disagree")
    return value, TraceWitness(i=i, k=k)


def tr_ki(f: Matrix, a: int, u: int, b: int | None = None) -> Matrix | Undefined:
    res = tr_ki_witness(f, a, u, b)
    return res[0] if is_defined(res) else res


def _realize_minimal(c: Matrix, a: Matrix, b: Matrix):
    """Reachable-then-observable reduction of the sequence ``c·aⁿ·b``.

    Returns ``(c_o, a_o, b_o)`` with ``c_o·a_oⁿ·b_o = c·aⁿ·b`` for every
    ``n``, or ``None`` when the sequence is identically zero.
    """
    d = a.rows
    krylov = [b]
    for _ in range(d - 1):
        krylov.append(mul(a, krylov[-1]))
    reach = column_basis(hstack(*krylov))
    if reach.cols == 0:
        return None
    a_r = solve_right(reach, mul(a, reach))
    b_r = solve_right(reach, b)
    c_r = mul(c, reach)
    obs = [c_r]
    for _ in range(reach.cols - 1):
        obs.append(mul(obs[-1], a_r))
    w = column_basis(vstack(*obs).T).T
    if w.rows == 0:
        return None
    a_o = solve_left(w, mul(w, a_r))
    c_o = solve_left(w, c_r)
    return c_o, a_o, mul(w, b_r)


def series_sum(c: Matrix, a: Matrix, b: Matrix) -> Matrix | Undefined:
    """Exact value of ``Σ_{n≥0} c·aⁿ·b`` when the series converges.

    Convergence is entrywise over the reals. After reducing to a minimal
    realization every eigenvalue of the reduced matrix shows up in the
    sequence, so the series converges iff the reduced matrix has spectral
    radius below one.
    """
    zero = Matrix.zeros(c.rows, b.cols)
    if a.rows == 0:
        return zero
    reduced = _realize_minimal(c, a, b)
    if reduced is None:
        return zero
    c_o, a_o, b_o = reduced
    if not schur_stable(charpoly(a_o)):
        return Undefined(DIVERGES)
    return mul(mul(c_o, inverse(Matrix.identity(a_o.rows) - a_o)), b_o)


def tr_sum_exact(f: Matrix, a: int, u: int, b: int | None = None) -> Matrix | Undefined:
    """Sum trace ``f11 + Σ f12 f22ⁿ f21`` decided exactly."""
    f11, f12, f21, f22 = blocks(f, a, u, b)
    s = series_sum(f12, f22, f21)
    if not is_defined(s):
        return s
    return f11 + s


def tr_kleene_exact(f: Matrix, a: int, u: int, b: int | None = None) -> Matrix | Undefined:
    """Kleene trace ``f11 + f12 (Σ f22ⁿ) f21``, defined iff ``Σ f22ⁿ`` converges."""
    f11, f12, f21, f22 = blocks(f, a, u, b)
    if u and not schur_stable(charpoly(f22)):
        return Undefined(DIVERGES)
    geometric = inverse(Matrix.identity(u) - f22)
    return f11 + mul(mul(f12, geometric), f21)


def to_float(m) -> np.ndarray:
    if isinstance(m, np.ndarray):
        return m.astype(float)
    return np.array([float(x) for x in m.entries], dtype=float).reshape(m.rows, m.cols)


def float_partial_sums(f, a: int, u: int, b: int | None = None, horizon: int = 64) -> np.ndarray:
    """Partial sums ``S_N = f11 + Σ_{n<N} f12 f22ⁿ f21`` for ``N = 1..horizon``."""
    x = to_float(f)
    a, u, b, _ = _split_dims(x, a, u, b)
    f11, f12 = x[:b, :a], x[:b, a:]
    f21, f22 = x[b:, :a], x[b:, a:]
    out = np.empty((horizon, b, a))
    acc = f11.copy()
    v = f21.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(horizon):
            acc = acc + f12 @ v
            out[n] = acc
            v = f22 @ v
    return out


def tr_sum_float(
    f, a: int, u: int, b: int | None = None, horizon: int = 64, tol: float = 1e-9
) -> np.ndarray | Undefined:
    """Floating-point sum trace with a Cauchy test on the partial sums.

    Defined when the partial sums of the last quarter of the horizon stay
    within ``tol`` of the final one (relative to its size once that exceeds
    one). Any entry above ``1/tol`` counts as divergence. A heuristic by
    construction.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    sums = float_partial_sums(f, a, u, b, horizon)
    if not np.all(np.isfinite(sums)) or (sums.size and np.abs(sums).max() > 1.0 / tol):
        return Undefined(DIVERGES)
    last = sums[-1]
    if last.size == 0:
        return last
    tail = sums[horizon - max(1, horizon // 4):]
    spread = np.abs(tail - last).max()
    if spread > tol * max(1.0, np.abs(last).max()):
        return Undefined(DIVERGES)
    return last


def kron_total_trace(f: Matrix, a: int, u: int, b: int | None = None) -> Matrix:
    """Canonical trace on ``(Vect, ⊗)``: ``Tr(f)[b, a] = Σ_u f[(b,u), (a,u)]``.

    Index convention: the pair ``(x, u)`` sits at ``x * dimU + u``.
    """
    if u <= 0 or f.cols != a * u:
        raise DimensionError(f"{f.rows}x{f.cols} is not A⊗U → B⊗U for A={a}, U={u}")
    if b is None:
        b = f.rows // u
    if f.rows != b * u:
        raise DimensionError(f"{f.rows}x{f.cols} is not A⊗U → B⊗U for B={b}, U={u}")
    data = []
    for bi in range(b):
        for ai in range(a):
            data.append(sum((f[bi * u + k, ai * u + k] for k in range(u)), Fraction(0)))
    return Matrix(b, a, data)


def is_substochastic(m: Matrix) -> bool:
    if any(x < 0 or x > 1 for x in m.entries):
        return False
    return all(sum(m[i, j] for i in range(m.rows)) <= 1 for j in range(m.cols))


def induced_trace_substochastic(
    f: Matrix, a: int, u: int, b: int | None = None
) -> Matrix | Undefined:
    """Partial trace on substochastic maps inherited from ``(Vect, ⊗)``."""
    if not is_substochastic(f):
        raise NotSubstochasticError("trace input must be substochastic")
    g = kron_total_trace(f, a, u, b)
    if not is_substochastic(g):
        return Undefined(NOT_SUBSTOCHASTIC)
    return g


# --- the categories as trace providers ---------------------------------------

def _random_rational(rng, lo=-3, hi=3) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice((1, 2)))


class DirectSum:
    """``(Vect_fin over ℚ, ⊕)`` with one of the exact partial traces."""

    unit = 0
    exact = True
    TRACES = {
        "hs": tr_hs,
        "ki": tr_ki,
        "sum-exact": tr_sum_exact,
        "kleene": tr_kleene_exact,
    }

    def __init__(self, impl: str = "ki"):
        if impl not in self.TRACES:
            raise ValueError(f"unknown trace {impl!r}")
        self.impl = impl
        self._trace = self.TRACES[impl]

    @property
    def name(self) -> str:
        return self.impl

    def __repr__(self) -> str:
        return f"DirectSum({self.impl!r})"

    def __reduce__(self):
        return (DirectSum, (self.impl,))

    def tensor_obj(self, a: int, b: int) -> int:
        return a + b

    def dom(self, f) -> int:
        return f.cols

    def cod(self, f) -> int:
        return f.rows

    def identity(self, a: int) -> Matrix:
        return Matrix.identity(a)

    def compose(self, g, f):
        """``g ∘ f``."""
        return mul(g, f)

    def tensor(self, f, g):
        return direct_sum(f, g)

    def symmetry(self, a: int, b: int) -> Matrix:
        return block_permutation([1, 0], [a, b])

    def permutation(self, dims: Sequence[int], perm: Sequence[int]) -> Matrix:
        return block_permutation(perm, dims)

    def trace(self, f, a: int, u: int, b: int):
        return self._trace(f, a, u, b)

    def lift(self, m: Matrix):
        return m

    def equal(self, x, y) -> bool:
        return x == y

    def is_iso(self, m: Matrix) -> bool:
        return m.rows == m.cols and is_defined(inverse(m))

    def random_morphism(self, rng, dom: int, cod: int) -> Matrix:
        return Matrix(cod, dom, (_random_rational(rng) for _ in range(dom * cod)))


class FloatDirectSum(DirectSum):
    """``(Vect, ⊕)`` in floating point with the heuristic sum trace."""

    exact = False

    def __init__(self, horizon: int = 256, tol: float = 1e-9):
        self.impl = "sum-float"
        self.horizon = horizon
        self.tol = tol

    def __repr__(self) -> str:
        return f"FloatDirectSum(horizon={self.horizon}, tol={self.tol})"

    def __reduce__(self):
        return (FloatDirectSum, (self.horizon, self.tol))

    def with_tol(self, tol: float) -> "FloatDirectSum":
        return FloatDirectSum(self.horizon, tol)

    def dom(self, f) -> int:
        return f.shape[1]

    def cod(self, f) -> int:
        return f.shape[0]

    def identity(self, a: int) -> np.ndarray:
        return np.eye(a)

    def compose(self, g, f):
        return g @ f

    def tensor(self, f, g):
        out = np.zeros((f.shape[0] + g.shape[0], f.shape[1] + g.shape[1]))
        out[: f.shape[0], : f.shape[1]] = f
        out[f.shape[0]:, f.shape[1]:] = g
        return out

    def symmetry(self, a: int, b: int) -> np.ndarray:
        return to_float(block_permutation([1, 0], [a, b]))

    def permutation(self, dims, perm) -> np.ndarray:
        return to_float(block_permutation(perm, dims))

    def trace(self, f, a: int, u: int, b: int):
        return tr_sum_float(f, a, u, b, horizon=self.horizon, tol=self.tol)

    def lift(self, m):
        return to_float(m)

    def equal(self, x, y) -> bool:
        if x.shape != y.shape:
            return False
        if x.size == 0:
            return True
        scale = max(1.0, float(np.abs(x).max()), float(np.abs(y).max()))
        return bool(np.abs(x - y).max() <= 1e-6 * scale)


def _kron_permutation(dims: Sequence[int], perm: Sequence[int]) -> Matrix:
    n = 1
    for d in dims:
        n *= d
    out_dims = [dims[p] for p in perm]
    data = [Fraction(0)] * (n * n)
    for digits in itertools.product(*(range(d) for d in dims)):
        src = 0
        for x, d in zip(digits, dims):
            src = src * d + x
        dst = 0
        for p, d in zip(perm, out_dims):
            dst = dst * d + digits[p]
        data[dst * n + src] = Fraction(1)
    return Matrix(n, n, data)


class Kron(DirectSum):
    """``(Vect_fin over ℚ, ⊗)``: compact closed, so its canonical trace is total."""

    unit = 1
    TRACES = {"kron": kron_total_trace, "substoch": induced_trace_substochastic}

    def __repr__(self) -> str:
        return f"Kron({self.impl!r})"

    def __reduce__(self):
        return (Kron, (self.impl,))

    def __init__(self, impl: str = "kron"):
        super().__init__(impl)

    def tensor_obj(self, a: int, b: int) -> int:
        return a * b

    def tensor(self, f, g):
        return kron(f, g)

    def symmetry(self, a: int, b: int) -> Matrix:
        return _kron_permutation([a, b], [1, 0])

    def permutation(self, dims, perm) -> Matrix:
        return _kron_permutation(dims, perm)

    def is_iso(self, m: Matrix) -> bool:
        if self.impl != "substoch":
            return super().is_iso(m)
        # isos of the substochastic subcategory: the inverse must stay inside it
        inv = inverse(m) if m.rows == m.cols else Undefined("not-square")
        return is_defined(inv) and is_substochastic(inv)

    def random_morphism(self, rng, dom: int, cod: int) -> Matrix:
        if self.impl == "substoch":
            return random_substochastic(rng, dom, cod)
        return Matrix(cod, dom, (rng.randint(-3, 3) for _ in range(dom * cod)))


def random_substochastic(rng, dom: int, cod: int, denom: int = 4) -> Matrix:
    cols = []
    for _ in range(dom):
        budget = rng.randint(0, denom)
        col = [0] * cod
        for _ in range(budget if cod else 0):
            col[rng.randrange(cod)] += 1
        cols.append([Fraction(x, denom) for x in col])
    return Matrix(cod, dom, (cols[j][i] for i in range(cod) for j in range(dom)))


def provider(name: str, **kw):
    """Build the trace provider registered under ``name``."""
    if name in DirectSum.TRACES:
        return DirectSum(name)
    if name == "sum-float":
        return FloatDirectSum(**kw)
    if name in Kron.TRACES:
        return Kron(name)
    raise ValueError(f"unknown trace implementation {name!r}")


PROVIDER_NAMES = ("hs", "ki", "sum-exact", "sum-float", "kleene", "kron", "substoch")
