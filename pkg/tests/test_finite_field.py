import pytest
from hypothesis import given
from hypothesis import strategies as st

from k0forge import polyfp
from k0forge.finite_field import FieldElement, FiniteField, conway_style_field, find_root

FIELDS = [(2, 3), (3, 2), (5, 2), (2, 4), (7, 1), (3, 3)]


def element(field, data):
    coeffs = data.draw(st.lists(st.integers(0, field.p - 1), min_size=field.degree, max_size=field.degree))
    return FieldElement(field, polyfp.normalize(coeffs, field.p))


@given(st.sampled_from(FIELDS), st.data())
def test_field_axioms(pd, data):
    field = conway_style_field(*pd)
    a, b, c = (element(field, data) for _ in range(3))
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    if a:
        assert a * a.inverse() == field.one()
    assert a ** field.order == a


@given(st.sampled_from(FIELDS), st.data())
def test_frobenius_is_pth_power(pd, data):
    field = conway_style_field(*pd)
    a = element(field, data)
    assert a.frobenius() == a**field.p


@pytest.mark.parametrize("p,d", FIELDS)
def test_minimal_polynomial_vanishes(p, d):
    field = conway_style_field(p, d)
    for a in list(field.elements())[:60]:
        m = a.minimal_polynomial()
        assert polyfp.is_irreducible(m, p)
        value = field.zero()
        for c in reversed(m):
            value = value * a + c
        assert not value
        assert polyfp.degree(m) == a.subfield_degree()


def test_find_root_small_exhaustive():
    field = FiniteField(2, (1, 1, 0, 1))
    h = (1, 1, 0, 1)
    root = find_root(h, field)
    brute = [x for x in field.elements() if not sum_poly(h, x)]
    assert root in brute


def sum_poly(f, x):
    value = x.field.zero()
    for c in reversed(f):
        value = value * x + c
    return value


def test_find_root_none_when_degree_mismatch():
    field = conway_style_field(2, 4)
    assert find_root(polyfp.least_irreducible(3, 2), field) is None


@pytest.mark.parametrize("p,big,small", [(2, 6, 3), (3, 4, 2), (5, 6, 2), (7, 9, 3), (2, 12, 4)])
def test_find_root_in_extension(p, big, small):
    field = conway_style_field(p, big)
    h = polyfp.least_irreducible(small, p)
    root = find_root(h, field)
    assert root is not None and not sum_poly(h, root)
