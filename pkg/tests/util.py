"""Shared helpers for the test suite."""

from fractions import Fraction

from flagrank import Distribution, VectorField, lie_bracket, parse_scalar
from flagrank.linalg import fraction_rank


def sc(chart, text):
    return parse_scalar(chart, str(text))


def vf(chart, *coeffs):
    return VectorField(chart, [sc(chart, c) for c in coeffs])


def pointwise_rank(fields, point):
    return fraction_rank([f.evaluate(point) for f in fields])


def brute_bracket_layers(dist, depth=4):
    """Iterated bracket generators by plain enumeration (oracle path)."""
    layers = [list(dist.frame)]
    for _ in range(depth - 1):
        prev = layers[-1]
        new = list(prev)
        for x in dist.frame:
            for g in prev:
                b = lie_bracket(x, g)
                if not b.is_zero():
                    new.append(b)
        layers.append(new)
    return layers


def brute_growth_at(dist, point, depth=4):
    """Pointwise growth vector from the brute-force bracket closure."""
    ranks = []
    for layer in brute_bracket_layers(dist, depth):
        r = pointwise_rank(layer, point)
        if ranks and r == ranks[-1]:
            break
        ranks.append(r)
    return tuple(ranks)


def det(matrix):
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        sign = -1 if j % 2 else 1
        total += sign * matrix[0][j] * det(minor)
    return total


def rand_invertible(rng, n):
    while True:
        m = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        if det(m) != 0:
            return m


def combine(fields, coeffs):
    combo = None
    for c, f in zip(coeffs, fields):
        part = f.scale(c)
        combo = part if combo is None else combo + part
    return combo


def change_frame(dist, matrix):
    """Distribution respanned by a constant matrix acting on the frame."""
    fields = [combine(list(dist.frame), row) for row in matrix]
    return Distribution(dist.chart, fields)


def rand_polynomial(chart, rng, max_terms=3, max_degree=2):
    total = chart.const(rng.randint(-2, 2))
    for _ in range(rng.randint(1, max_terms)):
        term = chart.const(rng.randint(-3, 3))
        for _ in range(rng.randint(0, max_degree)):
            term = term * chart.var(rng.choice(chart.variables))
        total = total + term
    return total


def rand_ratfunc(chart, rng):
    num = rand_polynomial(chart, rng)
    den = rand_polynomial(chart, rng, max_terms=2, max_degree=1)
    while den.is_zero():
        den = rand_polynomial(chart, rng, max_terms=2, max_degree=1)
    return num / den
