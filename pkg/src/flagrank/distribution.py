"""Distributions, derived flags, growth vectors, and the square-root plane.

A distribution is carried by a frame of vector fields; all span computations
are generic (over the function field).  Pointwise ranks are a separate
evaluation pass over the full generator lists, so points where a reduced
basis happens to degenerate are still measured correctly.
"""

from __future__ import annotations

from .calculus import VectorField, lie_bracket, pairing
from .errors import ChartMismatch, ConsistencyError, DependentForms, NotRank35
from .linalg import Echelon, MatrixRF, fraction_rank, kernel_basis, rank_generic


class Distribution:
    """A frame of vector fields with cached generic rank.

    ``generators`` is a spanning set that may be larger than the frame; it is
    kept so pointwise ranks see every bracket that built the span, not only
    the generic basis selected from them.  A rank-0 result (empty frame) is
    allowed for derived objects such as characteristic spaces.
    """

    __slots__ = ("chart", "frame", "generators", "_rank")

    def __init__(self, chart, frame, generators=None):
        frame = tuple(frame)
        for f in frame:
            if f.chart != chart:
                raise ChartMismatch("frame field on a different chart")
        self.chart = chart
        self.frame = frame
        self.generators = tuple(generators) if generators is not None else frame
        self._rank = None

    @property
    def generic_rank(self):
        if self._rank is None:
            self._rank = rank_generic(self.matrix())
        return self._rank

    def matrix(self):
        return MatrixRF.from_rows(self.chart,
                                  [f.coefficients for f in self.frame])

    def rank_at(self, point):
        rows = [f.evaluate(point) for f in self.generators]
        return fraction_rank(rows)

    def echelon(self):
        return Echelon(self.chart.dimension,
                       [f.coefficients for f in self.frame])

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.chart == other.chart and self.frame == other.frame

    def __hash__(self):
        return hash((self.chart, self.frame))

    def __repr__(self):
        return f"Distribution(rank {self.generic_rank} on {self.chart.name})"


class GrowthVector:
    """Strictly increasing generic ranks of the iterated bracket flag."""

    __slots__ = ("ranks",)

    def __init__(self, ranks):
        self.ranks = tuple(ranks)

    def render(self):
        return "(" + ",".join(str(r) for r in self.ranks) + ")"

    def __eq__(self, other):
        if isinstance(other, tuple):
            return self.ranks == other
        if not isinstance(other, GrowthVector):
            return NotImplemented
        return self.ranks == other.ranks

    def __hash__(self):
        return hash(self.ranks)

    def __repr__(self):
        return f"GrowthVector{self.ranks}"


def span_reduce(fields):
    """Reduced basis of the span, as normalized echelon rows.

    Each returned field has coefficient one at its pivot column, so a reduced
    frame never vanishes at a point where its denominators are defined; raw
    bracket generators, by contrast, can pick up removable zero loci.
    """
    if not fields:
        return []
    chart = fields[0].chart
    ech = Echelon(chart.dimension)
    for f in fields:
        ech.add(f.coefficients)
    return [VectorField(chart, row) for row in ech.rows]


def span_contains(fields, candidate):
    ech = Echelon(candidate.chart.dimension, [f.coefficients for f in fields])
    return ech.contains(candidate.coefficients)


def spans_equal(fields_a, fields_b):
    width = (fields_a or fields_b)[0].chart.dimension
    ech_a = Echelon(width, [f.coefficients for f in fields_a])
    ech_b = Echelon(width, [f.coefficients for f in fields_b])
    if ech_a.rank != ech_b.rank:
        return False
    return all(ech_a.contains(f.coefficients) for f in fields_b)


def annihilator_frame(forms):
    """Distribution annihilated by the given generically independent one-forms."""
    if not forms:
        raise DependentForms("need at least one form")
    chart = forms[0].chart
    for w in forms:
        if w.chart != chart:
            raise ChartMismatch("forms on different charts")
    matrix = MatrixRF.from_rows(chart, [w.coefficients for w in forms])
    if rank_generic(matrix) != len(forms):
        raise DependentForms("one-forms are generically dependent")
    frame = [VectorField(chart, vec) for vec in kernel_basis(matrix)]
    dist = Distribution(chart, frame)
    for w in forms:
        for x in frame:
            if not pairing(w, x).is_zero():
                raise ConsistencyError("annihilator frame fails to annihilate")
    return dist


def _bracket_generators(frame, generators):
    out = list(generators)
    seen = {_field_key(g) for g in out}
    for x in frame:
        for g in generators:
            b = lie_bracket(x, g)
            if b.is_zero():
                continue
            key = _field_key(b)
            if key not in seen:
                seen.add(key)
                out.append(b)
    return out


def _field_key(field):
    return tuple(c.render() for c in field.coefficients)


def derived_flag(dist):
    """Flag D, D + [D,D], ... until stabilization, with its growth vector.

    Step k+1 spans step k together with brackets of the input frame against
    every generator of step k.  Returned distributions carry reduced frames
    but keep the full generator lists for pointwise evaluation.
    """
    chart = dist.chart
    dim = chart.dimension
    gens = list(dist.frame)
    basis = span_reduce(gens)
    steps = [Distribution(chart, basis, generators=gens)]
    ranks = [len(basis)]
    while ranks[-1] < dim:
        gens = _bracket_generators(dist.frame, gens)
        basis = span_reduce(gens)
        if len(basis) == ranks[-1]:
            break
        steps.append(Distribution(chart, basis, generators=gens))
        ranks.append(len(basis))
    return steps, GrowthVector(ranks)


def growth_at(dist, point, steps=None):
    """Pointwise ranks of the (generically computed) flag steps."""
    if steps is None:
        steps, _ = derived_flag(dist)
    return tuple(step.rank_at(point) for step in steps)


def frobenius_integrable(dist):
    """True iff every pairwise frame bracket stays in the generic span."""
    ech = dist.echelon()
    frame = dist.frame
    for i in range(len(frame)):
        for j in range(i + 1, len(frame)):
            if not ech.contains(lie_bracket(frame[i], frame[j]).coefficients):
                return False
    return True


def bracket_span(fields_a, fields_b):
    """Generators of A + B + [sections of A, sections of B]."""
    gens = list(fields_a)
    keyset = {_field_key(g) for g in gens}
    for g in fields_b:
        key = _field_key(g)
        if key not in keyset:
            keyset.add(key)
            gens.append(g)
    for a in fields_a:
        for b in fields_b:
            br = lie_bracket(a, b)
            if br.is_zero():
                continue
            key = _field_key(br)
            if key not in keyset:
                keyset.add(key)
                gens.append(br)
    return gens


def cauchy_characteristic(dist):
    """Sections of the distribution whose brackets with it stay inside.

    Solves, over the function field, for coefficient vectors c with
    sum_i c_i [F_i, F_j] = 0 mod the distribution for every frame field F_j;
    the derivative terms of non-constant c stay in the span, so this
    pointwise-linear system is exact.
    """
    chart = dist.chart
    frame = dist.frame
    m = len(frame)
    ech = dist.echelon()
    residual = {}
    zero_vec = [chart.const(0)] * chart.dimension
    for i in range(m):
        for j in range(m):
            if i == j:
                residual[(i, j)] = zero_vec
            elif i < j:
                residual[(i, j)] = ech.residual(
                    lie_bracket(frame[i], frame[j]).coefficients)
            else:
                residual[(i, j)] = [-e for e in residual[(j, i)]]
    rows = []
    for j in range(m):
        for k in range(chart.dimension):
            rows.append([residual[(i, j)][k] for i in range(m)])
    solutions = kernel_basis(MatrixRF.from_rows(chart, rows))
    fields = []
    for c in solutions:
        combo = None
        for ci, f in zip(c, frame):
            part = f.scale(ci)
            combo = part if combo is None else combo + part
        if combo is not None and not combo.is_zero():
            fields.append(combo)
    return Distribution(chart, span_reduce(fields))


def square_root_subdistribution(dist):
    """The unique rank-2 subplane whose self-bracket stays in the distribution.

    Requires generic rank 3 with rank-5 first derived span.  The kernel of
    the bracket map on wedge squares is one-dimensional there; its (always
    decomposable) kernel bivector is split back into a plane by solving the
    wedge-annihilation condition.
    """
    chart = dist.chart
    if dist.generic_rank != 3 or len(dist.frame) != 3:
        raise NotRank35("need a rank-3 frame")
    f1, f2, f3 = dist.frame
    brackets = [lie_bracket(f1, f2), lie_bracket(f1, f3), lie_bracket(f2, f3)]
    full = list(dist.frame) + brackets
    if len(span_reduce(full)) != 5:
        raise NotRank35("first derived span does not have rank 5")
    ech = dist.echelon()
    images = [ech.residual(b.coefficients) for b in brackets]
    columns = MatrixRF.from_rows(
        chart, [[images[c][k] for c in range(3)] for k in range(chart.dimension)])
    kernel = kernel_basis(columns)
    if len(kernel) != 1:
        raise ConsistencyError("wedge kernel is not one-dimensional")
    b12, b13, b23 = kernel[0]
    # v ^ beta = 0 in a rank-3 fiber picks out exactly the plane of beta.
    wedge_row = MatrixRF.from_rows(chart, [[b23, -b13, b12]])
    plane = kernel_basis(wedge_row)
    if len(plane) != 2:
        raise ConsistencyError("bivector did not decompose into a plane")
    fields = []
    for coords in plane:
        combo = None
        for ci, f in zip(coords, dist.frame):
            part = f.scale(ci)
            combo = part if combo is None else combo + part
        fields.append(combo)
    result = Distribution(chart, fields)
    if result.generic_rank != 2:
        raise ConsistencyError("square-root plane has wrong rank")
    ech_d = dist.echelon()
    if not ech_d.contains(lie_bracket(fields[0], fields[1]).coefficients):
        raise ConsistencyError("square-root bracket escapes the distribution")
    return result
