"""Exact linear algebra over the rational-function field and over points.

Generic ranks use fraction-free (Bareiss) elimination on denominator-cleared
polynomial matrices.  Kernel and span computations run over the function field
with a deterministic pivot score that prefers nonzero *constant* entries, then
low-complexity entries, then earlier columns; this choice keeps computed
frames polynomial (and valid at the origin) whenever possible.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import Polynomial, RatFunc, poly_gcd


class MatrixRF:
    """Dense row-major matrix of rational functions."""

    __slots__ = ("chart", "rows", "cols", "entries")

    def __init__(self, chart, rows, cols, entries):
        entries = list(entries)
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        self.chart = chart
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, chart, row_lists):
        row_lists = [list(r) for r in row_lists]
        rows = len(row_lists)
        cols = len(row_lists[0]) if rows else 0
        flat = []
        for r in row_lists:
            if len(r) != cols:
                raise ValueError("ragged rows")
            flat.extend(r)
        return cls(chart, rows, cols, flat)

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def row_lists(self):
        return [self.row(i) for i in range(self.rows)]

    def entry(self, i, j):
        return self.entries[i * self.cols + j]

    def evaluate(self, point):
        return [[e.evaluate(point) for e in self.row(i)] for i in range(self.rows)]


def _pivot_score(value, col):
    degree, nterms = value.complexity()
    return (0 if value.is_constant() else 1, degree, nterms, col)


class Echelon:
    """Incrementally reduced row space with deterministic scored pivoting.

    Rows are kept fully reduced (pivot entries normalized to one and
    eliminated from every other row), so residuals of new vectors are
    immediate and kernel extraction is a sign flip.
    """

    __slots__ = ("width", "rows", "pivots")

    def __init__(self, width, vectors=()):
        self.width = width
        self.rows = []
        self.pivots = []  # (column, pivot_was_constant)
        for v in vectors:
            self.add(v)

    @property
    def rank(self):
        return len(self.rows)

    def pivot_columns(self):
        return [c for c, _ in self.pivots]

    def all_pivots_constant(self):
        return all(flag for _, flag in self.pivots)

    def residual(self, vector):
        v = list(vector)
        if len(v) != self.width:
            raise ValueError("vector width mismatch")
        for row, (col, _) in zip(self.rows, self.pivots):
            c = v[col]
            if not c.is_zero():
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def contains(self, vector):
        return all(e.is_zero() for e in self.residual(vector))

    def add(self, vector):
        """Insert a vector; returns True when it enlarged the span."""
        v = self.residual(vector)
        candidates = [(j, e) for j, e in enumerate(v) if not e.is_zero()]
        if not candidates:
            return False
        col, pivot = min(candidates, key=lambda je: _pivot_score(je[1], je[0]))
        was_constant = pivot.is_constant()
        v = [e / pivot for e in v]
        for i, row in enumerate(self.rows):
            c = row[col]
            if not c.is_zero():
                self.rows[i] = [a - c * b for a, b in zip(row, v)]
        self.rows.append(v)
        self.pivots.append((col, was_constant))
        return True


def independent_rows(vectors, width):
    """Indices of an (order-preferring) maximal independent subset."""
    ech = Echelon(width)
    kept = []
    for i, v in enumerate(vectors):
        if ech.add(v):
            kept.append(i)
    return kept


def rank_generic(matrix):
    """Rank over the function field via fraction-free elimination."""
    rows = [_cleared_row(r) for r in matrix.row_lists()]
    return _bareiss_rank(rows)


def _cleared_row(row):
    """Scale a RatFunc row by its denominator lcm; returns polynomial entries."""
    lcm = None
    for e in row:
        d = e.den
        if d.is_one():
            continue
        if lcm is None:
            lcm = d
        else:
            lcm = (lcm * d).divexact(poly_gcd(lcm, d))
    out = []
    for e in row:
        if lcm is None:
            out.append(e.num)
        else:
            out.append(e.num * lcm.divexact(e.den))
    return out


def _bareiss_rank(rows):
    if not rows or not rows[0]:
        return 0
    m = [list(r) for r in rows]
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = None
    for col in range(n_cols):
        pivot_row = None
        for i in range(rank, n_rows):
            if not m[i][col].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        piv = m[rank][col]
        for i in range(rank + 1, n_rows):
            for j in range(col + 1, n_cols):
                t = piv * m[i][j] - m[i][col] * m[rank][j]
                if prev is not None:
                    t = t.divexact(prev)
                m[i][j] = t
            m[i][col] = Polynomial.zero(piv.chart)
        prev = piv
        rank += 1
        if rank == n_rows:
            break
    return rank


def rank_at(matrix, point):
    """Rank of the matrix evaluated at an exact rational point."""
    return fraction_rank(matrix.evaluate(point))


def fraction_rank(rows):
    m = [list(map(Fraction, r)) for r in rows]
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    for col in range(n_cols):
        pivot_row = None
        for i in range(rank, n_rows):
            if m[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        piv = m[rank][col]
        for i in range(rank + 1, n_rows):
            f = m[i][col] / piv
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def kernel_basis(matrix):
    """Basis of the right kernel over the function field.

    One vector per free column, in column order; pivot coordinates are read
    off the fully reduced rows.
    """
    chart = matrix.chart
    ech = Echelon(matrix.cols)
    for r in matrix.row_lists():
        ech.add(r)
    pivot_cols = set(ech.pivot_columns())
    zero = RatFunc.constant(chart, 0)
    one = RatFunc.constant(chart, 1)
    basis = []
    for free in range(matrix.cols):
        if free in pivot_cols:
            continue
        vec = [zero] * matrix.cols
        vec[free] = one
        for row, (col, _) in zip(ech.rows, ech.pivots):
            if not row[free].is_zero():
                vec[col] = -row[free]
        basis.append(vec)
    return basis


def solve_in_span(target, columns):
    """Coordinates of ``target`` in the span of ``columns``, or None.

    ``columns`` is a list of equal-length vectors over one chart.  A result c
    satisfies sum(c[i] * columns[i]) == target exactly; free coordinates are
    zero.  None means the target is not in the span.
    """
    if not columns:
        return None
    chart = columns[0][0].chart
    height = len(columns[0])
    rows = [[col[i] for col in columns] + [target[i]] for i in range(height)]
    augmented = MatrixRF.from_rows(chart, rows)
    k = len(columns)
    for vec in kernel_basis(augmented):
        if not vec[k].is_zero():
            scale = vec[k]
            return [-(vec[i] / scale) for i in range(k)]
    return None
