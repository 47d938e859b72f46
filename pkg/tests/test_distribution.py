"""Derived flags, growth vectors, characteristics, and the square-root plane."""

import random

import pytest

from flagrank import Chart, Distribution, MatrixRF, OneForm, annihilator_frame, \
    cauchy_characteristic, coordinate_field, derived_flag, frobenius_integrable, \
    get_model, growth_at, lie_bracket, rank_generic, span_contains, span_reduce, \
    spans_equal, square_root_subdistribution
from flagrank.errors import DependentForms, NotRank35
from util import brute_growth_at, change_frame, combine, rand_invertible, \
    rand_polynomial, sc, vf

J21 = Chart("J21", ("t", "u", "v", "u1", "u2", "v1"))
PDE = Chart("PDE", ("u1", "u2", "u3", "x", "y", "z"))
CH = Chart("A", ("x", "y", "z"))


def form(chart, *coeffs):
    return OneForm(chart, [sc(chart, c) for c in coeffs])


def jet_forms():
    return [form(J21, "-u1", 1, 0, 0, 0, 0),
            form(J21, "-u2", 0, 0, 1, 0, 0),
            form(J21, "-v1", 0, 1, 0, 0, 0)]


def test_annihilator_frame_jet_model():
    dist = annihilator_frame(jet_forms())
    assert dist.generic_rank == 3
    total = vf(J21, 1, "u1", "v1", "u2", 0, 0)
    expected = [total, coordinate_field(J21, "u2"), coordinate_field(J21, "v1")]
    assert spans_equal(list(dist.frame), expected)
    assert dist.frame[0] == total


def test_annihilator_frame_pde_model():
    d = get_model("eq5").distribution()
    dx = vf(PDE, "u2", "z", 0, 1, 0, 0)
    w = vf(PDE, 0, 0, "-z", 0, 1, 0)
    assert spans_equal(list(d.frame), [dx, w, coordinate_field(PDE, "z")])


def test_annihilator_single_form():
    two = Chart("T", ("t", "x"))
    dist = annihilator_frame([OneForm(two, [two.const(1), two.const(0)])])
    assert dist.generic_rank == 1
    assert dist.frame[0] == coordinate_field(two, "x")


def test_annihilator_dependent_forms():
    w = form(J21, "-u1", 1, 0, 0, 0, 0)
    scaled = OneForm(J21, [c * sc(J21, "u2") for c in w.coefficients])
    with pytest.raises(DependentForms):
        annihilator_frame([w, scaled])


def test_growth_jet_model():
    _, growth = derived_flag(annihilator_frame(jet_forms()))
    assert growth.ranks == (3, 5, 6)
    assert growth.render() == "(3,5,6)"


def test_growth_integrable_plane():
    d = Distribution(CH, (coordinate_field(CH, "x"), coordinate_field(CH, "y")))
    steps, growth = derived_flag(d)
    assert growth.ranks == (2,)
    assert len(steps) == 1


def test_growth_pde_model_depth_two_span():
    d = get_model("eq5").distribution()
    steps, growth = derived_flag(d)
    assert growth.ranks == (3, 5, 6)
    expected = [vf(PDE, "u2", "z", 0, 1, 0, 0),
                vf(PDE, 0, 0, "-z", 0, 1, 0),
                coordinate_field(PDE, "z"),
                coordinate_field(PDE, "u2"),
                coordinate_field(PDE, "u3")]
    assert spans_equal(list(steps[1].frame), expected)


def test_growth_matches_brute_force_oracle():
    for name in ("j21", "eq5", "eq6", "g1_flat"):
        d = get_model(name).distribution()
        steps, growth = derived_flag(d)
        for coords in ((0,) * 6, (1, -1, 2, 1, -2, 1)):
            p = d.chart.point(coords)
            assert brute_growth_at(d, p) == growth.ranks
            assert growth_at(d, p, steps) == growth.ranks


def test_growth_invariant_under_function_field_frame_change():
    d = get_model("eq5").distribution()
    _, growth = derived_flag(d)
    rng = random.Random(21)
    changed = 0
    while changed < 3:
        rows = [[rand_polynomial(PDE, rng, max_terms=2, max_degree=1)
                 for _ in range(3)] for _ in range(3)]
        matrix = MatrixRF.from_rows(PDE, rows)
        if rank_generic(matrix) != 3:
            continue
        fields = [combine(list(d.frame), row) for row in rows]
        _, growth2 = derived_flag(Distribution(PDE, fields))
        assert growth2.ranks == growth.ranks
        changed += 1


def test_frobenius_integrable_plane():
    d = Distribution(CH, (coordinate_field(CH, "x"), coordinate_field(CH, "y")))
    assert frobenius_integrable(d)


def test_frobenius_non_integrable():
    d = Distribution(CH, (coordinate_field(CH, "x"),
                          vf(CH, 0, 1, "x")))
    assert not frobenius_integrable(d)


def test_frobenius_square_root_of_pde_model():
    d = get_model("eq5").distribution()
    assert frobenius_integrable(square_root_subdistribution(d))


def test_cauchy_contact_structure():
    contact = annihilator_frame([form(CH, "-y", 0, 1)])
    assert cauchy_characteristic(contact).generic_rank == 0


def test_cauchy_integrable_distribution_is_itself():
    d = Distribution(CH, (coordinate_field(CH, "x"), coordinate_field(CH, "y")))
    c = cauchy_characteristic(d)
    assert c.generic_rank == 2
    assert spans_equal(list(c.frame), list(d.frame))


def test_cauchy_of_jet_depth_two_span():
    d = annihilator_frame(jet_forms())
    steps, _ = derived_flag(d)
    c = cauchy_characteristic(steps[1])
    span = list(steps[1].frame)
    assert span_contains(list(c.frame), coordinate_field(J21, "v1"))
    for cf in c.frame:
        assert span_contains(span, cf)
        for f in steps[1].frame:
            assert span_contains(span, lie_bracket(cf, f))


def test_square_root_jet_model():
    d = annihilator_frame(jet_forms())
    plane = square_root_subdistribution(d)
    assert spans_equal(list(plane.frame),
                       [coordinate_field(J21, "u2"), coordinate_field(J21, "v1")])


def test_square_root_fourth_order_model():
    d = get_model("eq6").distribution()
    plane = square_root_subdistribution(d)
    x1 = vf(PDE, "u2", "z", "-(y*u3 + y^2*z)", 1, 0, "u3 + y*z")
    w = vf(PDE, 0, 0, "-z", 0, 1, 0)
    assert spans_equal(list(plane.frame), [x1, w])


def test_square_root_flat_d1_model():
    d = get_model("g1_flat").distribution()
    plane = square_root_subdistribution(d)
    assert spans_equal(list(plane.frame), [d.frame[0], d.frame[1]])


def test_square_root_self_bracket_stays_inside():
    for name in ("j21", "eq5", "eq6", "g1_flat"):
        d = get_model(name).distribution()
        plane = square_root_subdistribution(d)
        a, b = plane.frame
        assert span_contains(list(d.frame), lie_bracket(a, b))


def test_square_root_unique_under_frame_change():
    d = get_model("eq6").distribution()
    base = square_root_subdistribution(d)
    rng = random.Random(17)
    for _ in range(3):
        changed = change_frame(d, rand_invertible(rng, 3))
        other = square_root_subdistribution(changed)
        assert spans_equal(list(base.frame), list(other.frame))


def test_square_root_requires_rank_35():
    d = Distribution(CH, (coordinate_field(CH, "x"), coordinate_field(CH, "y"),
                          coordinate_field(CH, "z")))
    with pytest.raises(NotRank35):
        square_root_subdistribution(d)


def test_span_reduce_rows_have_unit_pivots():
    d = get_model("eq6").distribution()
    line = vf(PDE, 0, 0, "-z", 0, 1, 0)
    reduced = span_reduce(list(d.frame) + [lie_bracket(line, f) for f in d.frame])
    origin = PDE.origin()
    # normalized frames stay pointwise independent wherever defined
    from util import pointwise_rank
    assert pointwise_rank(reduced, origin) == len(reduced)
