"""Exact rational linear algebra.

Matrices are immutable and hold :class:`fractions.Fraction` entries, so
invertibility, image membership and kernel inclusion are decided exactly.
Zero-dimensional matrices (``0 x n`` and ``n x 0``) are legal values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .kleene import Undefined

__all__ = [
    "DimensionError",
    "Matrix",
    "block_permutation",
    "direct_sum",
    "format_matrix",
    "inverse",
    "kron",
    "mul",
    "parse_matrix",
    "rref",
    "solve_left",
    "solve_right",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class DimensionError(ValueError):
    """Raised when matrix shapes are not conformable."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Matrix:
    """An immutable ``rows x cols`` matrix over the rationals."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable = ()):
        if rows < 0 or cols < 0:
            raise DimensionError(f"negative shape {rows}x{cols}")
        data = tuple(_frac(e) for e in entries)
        if len(data) != rows * cols:
            raise DimensionError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(data)}"
            )
        self.rows = rows
        self.cols = cols
        self._data = data
        self._hash = None

    @classmethod
    def _raw(cls, rows: int, cols: int, data: tuple) -> "Matrix":
        m = object.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._data = data
        m._hash = None
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged rows")
        return cls(len(rows), cols, (e for r in rows for e in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls._raw(rows, cols, (_ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        data = [_ZERO] * (n * n)
        for i in range(n):
            data[i * n + i] = _ONE
        return cls._raw(n, n, tuple(data))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple:
        return self._data

    def __getitem__(self, idx) -> Fraction:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(idx)
        return self._data[i * self.cols + j]

    def row(self, i: int) -> tuple:
        c = self.cols
        return self._data[i * c:(i + 1) * c]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self._data == other._data
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(_fmt(e) for e in self.row(i)) for i in range(self.rows))
        return f"Matrix({self.rows}x{self.cols}: [{body}])"

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Matrix._raw(
            self.rows, self.cols, tuple(a + b for a, b in zip(self._data, other._data))
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        return Matrix._raw(
            self.rows, self.cols, tuple(a - b for a, b in zip(self._data, other._data))
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(self.rows, self.cols, tuple(-a for a in self._data))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mul(self, other)

    def scale(self, c) -> "Matrix":
        c = _frac(c)
        return Matrix._raw(self.rows, self.cols, tuple(c * a for a in self._data))

    @property
    def T(self) -> "Matrix":
        r, c, d = self.rows, self.cols, self._data
        return Matrix._raw(c, r, tuple(d[i * c + j] for j in range(c) for i in range(r)))

    def is_zero(self) -> bool:
        return not any(self._data)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        """Rows ``r0:r1`` and columns ``c0:c1``."""
        if not (0 <= r0 <= r1 <= self.rows and 0 <= c0 <= c1 <= self.cols):
            raise DimensionError(
                f"block [{r0}:{r1}, {c0}:{c1}] outside {self.rows}x{self.cols}"
            )
        c, d = self.cols, self._data
        return Matrix._raw(
            r1 - r0,
            c1 - c0,
            tuple(d[i * c + j] for i in range(r0, r1) for j in range(c0, c1)),
        )

    def select(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        """The matrix ``M[row_idx[a], col_idx[b]]``; used for reindexing."""
        c, d = self.cols, self._data
        return Matrix._raw(
            len(row_idx),
            len(col_idx),
            tuple(d[i * c + j] for i in row_idx for j in col_idx),
        )


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def mul(a: Matrix, b: Matrix) -> Matrix:
    """The exact product ``a · b``."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    n, m, p = a.rows, a.cols, b.cols
    ad, bd = a._data, b._data
    out = []
    for i in range(n):
        acc = [_ZERO] * p
        base = i * m
        for k in range(m):
            x = ad[base + k]
            if not x:
                continue
            kb = k * p
            for j in range(p):
                y = bd[kb + j]
                if y:
                    acc[j] += x * y
        out.extend(acc)
    return Matrix._raw(n, p, tuple(out))


def rref(a: Matrix) -> tuple[Matrix, list[int], int]:
    """Reduced row-echelon form, pivot columns and rank."""
    rows = [list(a.row(i)) for i in range(a.rows)]
    pivots: list[int] = []
    r = 0
    for col in range(a.cols):
        if r == a.rows:
            break
        piv = next((i for i in range(r, a.rows) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        inv = 1 / pr[col]
        if inv != 1:
            pr = [x * inv for x in pr]
            rows[r] = pr
        nz = [j for j in range(col, a.cols) if pr[j]]
        for i in range(a.rows):
            if i == r:
                continue
            factor = rows[i][col]
            if factor:
                ri = rows[i]
                for j in nz:
                    ri[j] -= factor * pr[j]
        pivots.append(col)
        r += 1
    reduced = Matrix._raw(a.rows, a.cols, tuple(x for row in rows for x in row))
    return reduced, pivots, len(pivots)


def rank(a: Matrix) -> int:
    return rref(a)[2]


def hstack(*ms: Matrix) -> Matrix:
    rows = ms[0].rows
    for m in ms:
        if m.rows != rows:
            raise DimensionError("hstack needs equal row counts")
    return Matrix._raw(
        rows,
        sum(m.cols for m in ms),
        tuple(x for i in range(rows) for m in ms for x in m.row(i)),
    )


def vstack(*ms: Matrix) -> Matrix:
    cols = ms[0].cols
    for m in ms:
        if m.cols != cols:
            raise DimensionError("vstack needs equal column counts")
    return Matrix._raw(sum(m.rows for m in ms), cols, tuple(x for m in ms for x in m._data))


def solve_right(a: Matrix, b: Matrix) -> Matrix | Undefined:
    """Some ``x`` with ``a · x = b``, or ``Undefined`` if the system is inconsistent.

    The returned solution is the reduced-row-echelon particular solution
    with every free variable set to zero.
    """
    if a.rows != b.rows:
        raise DimensionError(
            f"solve_right: {a.rows}x{a.cols} and {b.rows}x{b.cols} differ in rows"
        )
    reduced, pivots, _ = rref(hstack(a, b))
    n = a.cols
    if pivots and pivots[-1] >= n:
        return Undefined("inconsistent")
    x = [[_ZERO] * b.cols for _ in range(n)]
    for r, col in enumerate(pivots):
        x[col] = list(reduced.row(r)[n:])
    return Matrix._raw(n, b.cols, tuple(v for row in x for v in row))


def solve_left(a: Matrix, b: Matrix) -> Matrix | Undefined:
    """Some ``x`` with ``x · a = b``, or ``Undefined``."""
    if a.cols != b.cols:
        raise DimensionError(
            f"solve_left: {a.rows}x{a.cols} and {b.rows}x{b.cols} differ in columns"
        )
    xt = solve_right(a.T, b.T)
    if isinstance(xt, Undefined):
        return xt
    return xt.T


def inverse(a: Matrix) -> Matrix | Undefined:
    if a.rows != a.cols:
        raise DimensionError(f"inverse of non-square {a.rows}x{a.cols} matrix")
    n = a.rows
    reduced, pivots, _ = rref(hstack(a, Matrix.identity(n)))
    if pivots[:n] != list(range(n)):
        return Undefined("singular")
    return reduced.submatrix(0, n, n, 2 * n)


def kernel_basis(a: Matrix) -> list[Matrix]:
    """A basis of ``{v : a · v = 0}`` as column vectors."""
    reduced, pivots, _ = rref(a)
    free = [j for j in range(a.cols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [_ZERO] * a.cols
        v[f] = _ONE
        for r, p in enumerate(pivots):
            v[p] = -reduced[r, f]
        basis.append(Matrix._raw(a.cols, 1, tuple(v)))
    return basis


def column_basis(a: Matrix) -> Matrix:
    """The pivot columns of ``a``: a basis of its column space."""
    _, pivots, _ = rref(a)
    return a.select(range(a.rows), pivots)


def direct_sum(a: Matrix, b: Matrix) -> Matrix:
    """The block-diagonal matrix ``a ⊕ b``."""
    rows, cols = a.rows + b.rows, a.cols + b.cols
    data = []
    zb = (_ZERO,) * b.cols
    za = (_ZERO,) * a.cols
    for i in range(a.rows):
        data.extend(a.row(i))
        data.extend(zb)
    for i in range(b.rows):
        data.extend(za)
        data.extend(b.row(i))
    return Matrix._raw(rows, cols, tuple(data))


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; row ``(i, k)`` sits at ``i * b.rows + k``."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    data = []
    for i in range(a.rows):
        arow = a.row(i)
        for k in range(b.rows):
            brow = b.row(k)
            for x in arow:
                if x:
                    data.extend(x * y for y in brow)
                else:
                    data.extend((_ZERO,) * b.cols)
    return Matrix._raw(rows, cols, tuple(data))


def _check_perm(perm: Sequence[int], n: int) -> None:
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{list(perm)} is not a permutation of {n} blocks")


def block_permutation(perm: Sequence[int], block_dims: Sequence[int]) -> Matrix:
    """The 0-1 matrix sending ``X_0 ⊕ … ⊕ X_{n-1}`` to ``X_{perm[0]} ⊕ … ⊕ X_{perm[n-1]}``.

    Output block ``k`` is a copy of input block ``perm[k]``.
    """
    _check_perm(perm, len(block_dims))
    offsets = [0]
    for d in block_dims:
        offsets.append(offsets[-1] + d)
    src = [offsets[p] + t for p in perm for t in range(block_dims[p])]
    n = offsets[-1]
    data = [_ZERO] * (n * n)
    for row, col in enumerate(src):
        data[row * n + col] = _ONE
    return Matrix._raw(n, n, tuple(data))


def block_source_index(perm: Sequence[int], block_dims: Sequence[int]) -> list[int]:
    """Source coordinate of each output coordinate of :func:`block_permutation`."""
    _check_perm(perm, len(block_dims))
    offsets = [0]
    for d in block_dims:
        offsets.append(offsets[-1] + d)
    return [offsets[p] + t for p in perm for t in range(block_dims[p])]


def charpoly(a: Matrix) -> list[Fraction]:
    """Coefficients ``[c_0, …, c_n]`` of ``det(zI - a)`` (so ``c_n = 1``).

    Faddeev–LeVerrier recursion; exact over the rationals.
    """
    if a.rows != a.cols:
        raise DimensionError("charpoly needs a square matrix")
    n = a.rows
    coeffs = [_ZERO] * (n + 1)
    coeffs[n] = _ONE
    m = Matrix.zeros(n, n)
    ident = Matrix.identity(n)
    for k in range(1, n + 1):
        m = mul(a, m) + ident.scale(coeffs[n - k + 1])
        am = mul(a, m)
        coeffs[n - k] = -sum((am[i, i] for i in range(n)), _ZERO) / k
    return coeffs


def schur_stable(coeffs: Sequence[Fraction]) -> bool:
    """True iff every root of ``Σ coeffs[k] z^k`` lies strictly inside the unit disk.

    Schur–Cohn reduction on real coefficients: with ``p*`` the reversed
    polynomial, ``(a_n p - a_0 p*) / z`` has one root fewer inside the disk
    than ``p`` provided ``|a_0| < |a_n|``.
    """
    p = [_frac(c) for c in coeffs]
    while len(p) > 1 and not p[-1]:
        p.pop()
    if not p or not p[-1]:
        raise ValueError("zero polynomial")
    while len(p) > 1:
        a0, an = p[0], p[-1]
        if abs(a0) >= abs(an):
            return False
        rev = p[::-1]
        q = [an * x - a0 * y for x, y in zip(p, rev)]
        p = q[1:]
    return True


def parse_matrix(text: str) -> Matrix:
    """Parse the ``rows cols`` header followed by row-major entries."""
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("matrix text needs a 'rows cols' header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise ValueError(f"bad matrix header {tokens[:2]}") from exc
    body = tokens[2:]
    if len(body) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(body)}")
    try:
        return Matrix(rows, cols, (Fraction(t) for t in body))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad matrix entry: {exc}") from exc


def format_matrix(m: Matrix) -> str:
    """Header line then one line per row; empty rows print as blank lines."""
    lines = [f"{m.rows} {m.cols}"]
    for i in range(m.rows):
        lines.append(" ".join(_fmt(x) for x in m.row(i)))
    return "\n".join(lines)


def format_entry(x: Fraction) -> str:
    return _fmt(x)
