"""Adapted frames, the symmetric bracket form, and the point trichotomy.

The 2x2 form measures, against a chosen transversal Z, the brackets of the
square-root plane with the depth-two directions; its signature class (up to
an overall nonzero factor) splits rank-3 growth-(3,5,6) distributions into
elliptic, hyperbolic, and (non-)degenerate parabolic points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .algebra import PointQ
from .calculus import VectorField, coordinate_field, lie_bracket
from .distribution import derived_flag, growth_at, square_root_subdistribution
from .errors import ConsistencyError, NotGrowth356, PoleAtPoint, \
    SampleBudgetExhausted, SymmetryViolated
from .linalg import Echelon, MatrixRF, fraction_rank, rank_generic, solve_in_span


class PointClass(Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC_NONDEG = "parabolic-nondegenerate"
    PARABOLIC_DEG = "parabolic-degenerate"

    @property
    def is_parabolic(self):
        return self in (PointClass.PARABOLIC_NONDEG, PointClass.PARABOLIC_DEG)


@dataclass(frozen=True)
class AdaptedFrame:
    """Frame (X1, X2, Y, Y1, Y2, Z) adapted to a growth-(3,5,6) distribution.

    (X1, X2) spans the square-root plane, (X1, X2, Y) the distribution,
    Y1 = [Y, X1], Y2 = [Y, X2], and Z completes to a full frame.  ``notes``
    records which deterministic choices were made.
    """

    x1: VectorField
    x2: VectorField
    y: VectorField
    y1: VectorField
    y2: VectorField
    z: VectorField
    notes: tuple = ()

    def full(self):
        return [self.x1, self.x2, self.y, self.y1, self.y2, self.z]

    def rank_at(self, point):
        return fraction_rank([f.evaluate(point) for f in self.full()])


@dataclass(frozen=True)
class BracketForm:
    """Symmetric 2x2 form of Z-components of [X_i, Y_j], defined up to scale."""

    a11: object
    a12: object
    a21: object
    a22: object
    frame: AdaptedFrame

    def matrix(self):
        chart = self.a11.chart
        return MatrixRF.from_rows(chart, [[self.a11, self.a12],
                                          [self.a21, self.a22]])

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def evaluate(self, point):
        return (self.a11.evaluate(point), self.a12.evaluate(point),
                self.a22.evaluate(point))

    def entries_rendered(self):
        return {"a11": self.a11.render(), "a12": self.a12.render(),
                "a21": self.a21.render(), "a22": self.a22.render()}


def _complete_with_field(base_fields, candidates, want_rank):
    """First candidate enlarging the span; prefers all-constant-pivot frames.

    The strong preference keeps the completed frame valid on as large a set
    as possible (in particular at the origin of every bundled model).
    """
    width = candidates[0].chart.dimension
    strong = None
    fallback = None
    for cand in candidates:
        ech = Echelon(width, [f.coefficients for f in base_fields])
        if not ech.add(cand.coefficients) or ech.rank != want_rank:
            continue
        if fallback is None:
            fallback = cand
        if ech.all_pivots_constant():
            strong = cand
            break
    return strong if strong is not None else fallback


def adapted_frame(dist):
    """Deterministic adapted frame; requires growth vector (3,5,6)."""
    steps, growth = derived_flag(dist)
    if growth.ranks != (3, 5, 6):
        raise NotGrowth356(f"growth vector is {growth.render()}")
    chart = dist.chart
    plane = square_root_subdistribution(dist)
    x1, x2 = plane.frame
    y = _complete_with_field([x1, x2], list(dist.frame), 3)
    if y is None:
        raise ConsistencyError("no frame field completes the square-root plane")
    y1 = lie_bracket(y, x1)
    y2 = lie_bracket(y, x2)
    five = [x1, x2, y, y1, y2]
    ech = Echelon(chart.dimension, [f.coefficients for f in five])
    if ech.rank != 5:
        raise ConsistencyError("adapted five-frame does not have rank 5")
    pivot_cols = set(ech.pivot_columns())
    missing = [i for i in range(chart.dimension) if i not in pivot_cols]
    z_var = chart.variables[missing[0]]
    z = coordinate_field(chart, z_var)
    notes = (
        "X1,X2: square-root plane kernel basis",
        f"Y: frame field #{list(dist.frame).index(y)} (constant-pivot preferred)",
        f"Z: coordinate direction @{z_var} (echelon complement)",
    )
    return AdaptedFrame(x1, x2, y, y1, y2, z, notes)


def bracket_form(dist, frame):
    """Z-components of [X_i, Y_j]; symmetry is asserted, never assumed."""
    full = frame.full()
    columns = [f.coefficients for f in full]
    values = {}
    for name_i, xi in (("1", frame.x1), ("2", frame.x2)):
        for name_j, yj in (("1", frame.y1), ("2", frame.y2)):
            coords = solve_in_span(lie_bracket(xi, yj).coefficients, columns)
            if coords is None:
                raise ConsistencyError("bracket left the adapted full frame")
            values[name_i + name_j] = coords[5]
    if values["12"] != values["21"]:
        raise SymmetryViolated(
            f"a12 = {values['12'].render()} differs from a21 = {values['21'].render()}")
    return BracketForm(values["11"], values["12"], values["21"], values["22"], frame)


def transformed_frame(frame, y_scale=1, z_scale=1, basis=None):
    """Rebuilt adapted frame after rescaling Y and Z or changing (X1, X2).

    ``basis`` is a 2x2 rational matrix of constants applied to (X1, X2); the
    derived fields Y1, Y2 are recomputed so the result is again adapted.
    """
    x1, x2 = frame.x1, frame.x2
    if basis is not None:
        (m11, m12), (m21, m22) = basis
        n1 = x1.scale(m11) + x2.scale(m12)
        n2 = x1.scale(m21) + x2.scale(m22)
        x1, x2 = n1, n2
    y = frame.y.scale(y_scale)
    z = frame.z.scale(z_scale)
    return AdaptedFrame(x1, x2, y, lie_bracket(y, x1), lie_bracket(y, x2), z,
                        frame.notes + ("transformed",))


def _classify_values(a11, a12, a22):
    if a11 == 0 and a12 == 0 and a22 == 0:
        return PointClass.PARABOLIC_DEG
    det = a11 * a22 - a12 * a12
    if det == 0:
        return PointClass.PARABOLIC_NONDEG
    return PointClass.ELLIPTIC if det > 0 else PointClass.HYPERBOLIC


def sample_points(chart, seed, max_denominator=3, magnitude=4):
    """Deterministic stream of small rational sample points."""
    rng = random.Random(seed)
    while True:
        coords = [Fraction(rng.randint(-magnitude, magnitude),
                           rng.randint(1, max_denominator))
                  for _ in range(chart.dimension)]
        yield PointQ(chart, coords)


def classify_form_generic(form, seed=0, budget=200):
    rank = rank_generic(form.matrix())
    if rank == 0:
        return PointClass.PARABOLIC_DEG
    if rank == 1:
        return PointClass.PARABOLIC_NONDEG
    det = form.det()
    if det.is_constant():
        value = det.constant_value()
        return PointClass.ELLIPTIC if value > 0 else PointClass.HYPERBOLIC
    chart = det.chart
    stream = sample_points(chart, seed)
    for _ in range(budget):
        p = next(stream)
        try:
            if form.frame.rank_at(p) != chart.dimension:
                continue
            value = det.evaluate(p)
        except PoleAtPoint:
            continue
        if value == 0:
            continue
        return PointClass.ELLIPTIC if value > 0 else PointClass.HYPERBOLIC
    raise SampleBudgetExhausted("could not find a definite sample for the form sign")


def classify_generic(dist):
    frame = adapted_frame(dist)
    return classify_form_generic(bracket_form(dist, frame))


def _classify_at_with(dist, form, steps, point):
    if growth_at(dist, point, steps) != (3, 5, 6):
        raise NotGrowth356(f"growth vector at {point.render()} is not (3,5,6)")
    if form.frame.rank_at(point) != dist.chart.dimension:
        raise PoleAtPoint(
            f"adapted frame degenerates at {point.render()}; choose another point")
    a11, a12, a22 = form.evaluate(point)
    return _classify_values(a11, a12, a22)


def classify_at(dist, point):
    steps, growth = derived_flag(dist)
    if growth.ranks != (3, 5, 6):
        raise NotGrowth356(f"growth vector is {growth.render()}")
    frame = adapted_frame(dist)
    return _classify_at_with(dist, bracket_form(dist, frame), steps, point)


@dataclass(frozen=True)
class SampleRow:
    index: int
    point: PointQ
    point_class: PointClass


@dataclass(frozen=True)
class SkippedRow:
    point: PointQ
    reason: str


@dataclass(frozen=True)
class RegularityReport:
    generic_class: PointClass
    samples: tuple
    skipped: tuple
    regular: bool
    seed: int

    @property
    def verdict(self):
        return "regular" if self.regular else "singular-detected"

    def to_json_dict(self):
        return {
            "generic_class": self.generic_class.value,
            "verdict": self.verdict,
            "seed": self.seed,
            "samples": [
                {"index": s.index, "point": s.point.render(),
                 "class": s.point_class.value}
                for s in self.samples
            ],
            "skipped": [
                {"point": s.point.render(), "reason": s.reason}
                for s in self.skipped
            ],
        }


def regularity_scan(dist, n_samples=20, seed=0, retry_factor=25):
    """Classify at seeded sample points and test constancy of the class.

    Points where the growth vector drops, the adapted frame degenerates, or a
    pole appears are skipped (with a retry budget); a successfully classified
    point whose class differs from the generic one makes the verdict
    singular.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    steps, growth = derived_flag(dist)
    if growth.ranks != (3, 5, 6):
        raise NotGrowth356(f"growth vector is {growth.render()}")
    frame = adapted_frame(dist)
    form = bracket_form(dist, frame)
    generic = classify_form_generic(form, seed=seed)
    samples = []
    skipped = []
    stream = sample_points(dist.chart, seed)
    budget = n_samples * retry_factor
    while len(samples) < n_samples:
        if budget == 0:
            raise SampleBudgetExhausted(
                f"no {n_samples} usable sample points within budget")
        budget -= 1
        p = next(stream)
        try:
            if growth_at(dist, p, steps) != (3, 5, 6):
                skipped.append(SkippedRow(p, "growth-drop"))
                continue
            if form.frame.rank_at(p) != dist.chart.dimension:
                skipped.append(SkippedRow(p, "frame-degenerate"))
                continue
            a11, a12, a22 = form.evaluate(p)
        except PoleAtPoint:
            skipped.append(SkippedRow(p, "pole"))
            continue
        cls = _classify_values(a11, a12, a22)
        samples.append(SampleRow(len(samples), p, cls))
    regular = all(s.point_class == generic for s in samples)
    return RegularityReport(generic, tuple(samples), tuple(skipped), regular, seed)
