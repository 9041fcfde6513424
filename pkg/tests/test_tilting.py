import math
from dataclasses import replace

import numpy as np
import pytest
import sympy

from k0forge.cyclotomic import CyclotomicElement
from k0forge.errors import VerificationError
from k0forge.finite_field import FieldElement
from k0forge.tilting import (
    FusionRing,
    TiltingLabel,
    build_semisimple_fusion,
    dimension_field,
    even_subring,
    k0_isomorphism_certificate,
    mod_p_cross_check,
    quantum_dimension,
    quantum_model,
    truncated_cg,
)

GRID = [(p, ell) for ell in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31) for p in (2, 3, 5, 7, 11) if p != ell]


def verlinde_numeric(ell):
    """Fusion coefficients from the modular S-matrix of level l, computed in floating point."""
    r = ell - 1
    s = np.array([[math.sin(math.pi * (i + 1) * (j + 1) / ell) for j in range(r)] for i in range(r)])
    s *= math.sqrt(2 / ell)
    n = np.einsum("im,jm,km,m->ijk", s, s, s, 1 / s[0])
    return np.rint(n).astype(int), np.abs(n - np.rint(n)).max()


@pytest.mark.parametrize("ell", [3, 5, 7, 11, 13, 17])
def test_truncated_cg_matches_verlinde_formula(ell):
    n, err = verlinde_numeric(ell)
    assert err < 1e-8
    ring = build_semisimple_fusion(2 if ell != 2 else 3, ell)
    assert np.array_equal(ring.tensor(), n)


def test_fusion_examples():
    ring5 = build_semisimple_fusion(2, 5)
    assert ring5.fuse("T2", "T2") == {"T0": 1, "T2": 1}
    ring7 = build_semisimple_fusion(3, 7)
    assert ring7.fuse("T1", "T1") == {"T0": 1, "T2": 1}
    for i in range(6):
        assert ring7.fuse("T0", f"T{i}") == {f"T{i}": 1}


@pytest.mark.parametrize("p,ell", GRID)
def test_fusion_grid(p, ell):
    ring = build_semisimple_fusion(p, ell)
    ring.validate()
    assert ring.labels == tuple(f"T{i}" for i in range(ell - 1))
    assert ring.dual == tuple(range(ell - 1))
    assert not quantum_dimension(ell - 1, p, ell)
    assert all(quantum_dimension(v, p, ell) for v in range(ell - 1))


def test_invalid_parameters():
    with pytest.raises(ValueError):
        build_semisimple_fusion(5, 5)
    with pytest.raises(ValueError):
        build_semisimple_fusion(3, 2)
    with pytest.raises(ValueError):
        build_semisimple_fusion(4, 7)
    with pytest.raises(ValueError):
        quantum_dimension(0, 7, 7)


def test_validation_catches_corruption():
    ring = build_semisimple_fusion(2, 5)
    bad = [[list(row) for row in plane] for plane in ring.N]
    bad[1][1][0] = 2
    corrupt = replace(ring, N=tuple(tuple(tuple(r) for r in plane) for plane in bad))
    with pytest.raises(VerificationError):
        corrupt.validate()


def test_tilting_label_survival():
    assert TiltingLabel(3, 5, 2).survives
    assert not TiltingLabel(4, 5, 2).survives


def test_quantum_dimension_example():
    model = quantum_model(2, 7)
    assert model.field.modulus == (1, 1, 0, 1)
    q = model.q
    # q is the least primitive 7th root by encoding
    primitive = [x for x in model.field.elements() if x and x != 1 and x**7 == 1]
    assert q == min(primitive, key=FieldElement.encode)
    assert quantum_dimension(2, 2, 7) == q**2 + 1 + q.inverse() ** 2
    assert quantum_dimension(0, 2, 7) == model.field.one()


@pytest.mark.parametrize("p,ell", [(2, 5), (3, 7), (5, 11), (11, 13)])
def test_quantum_dimension_closed_form(p, ell):
    q = quantum_model(p, ell).q
    for v in range(2 * ell):
        value = quantum_dimension(v, p, ell)
        assert value * (q - q.inverse()) == q ** (v + 1) - q.inverse() ** (v + 1)
        assert (not value) == ((v + 1) % ell == 0)


def test_even_subring_examples():
    assert even_subring(build_semisimple_fusion(2, 5)).labels == ("T0", "T2")
    assert even_subring(build_semisimple_fusion(2, 7)).labels == ("T0", "T2", "T4")
    assert even_subring(build_semisimple_fusion(2, 3)).labels == ("T0",)


@pytest.mark.parametrize("p,ell", GRID)
def test_even_closure(p, ell):
    ring = build_semisimple_fusion(p, ell)
    n = ring.tensor()
    even = range(0, ell - 1, 2)
    odd = range(1, ell - 1, 2)
    assert all(n[i, j, k] == 0 for i in even for j in even for k in odd)
    even_subring(ring).validate()


def test_k0_certificate_ell5():
    cert = k0_isomorphism_certificate(even_subring(build_semisimple_fusion(2, 5)))
    assert cert.ok
    z = CyclotomicElement.zeta(5)
    assert cert.images[1] == z * z + 1 + z.conjugate() * z.conjugate()
    x = sympy.Symbol("x")
    assert sympy.minimal_polynomial(2 * sympy.cos(4 * sympy.pi / 5) + 1, x) == x**2 - x - 1
    # T2 * T2 = T0 + T2 maps to x^2 = 1 + x
    assert cert.images[1] * cert.images[1] == cert.images[0] + cert.images[1]


def test_k0_certificate_trivial_and_ell7():
    cert3 = k0_isomorphism_certificate(even_subring(build_semisimple_fusion(2, 3)))
    assert cert3.ok and cert3.images == (CyclotomicElement.from_int(3, 1),)
    cert7 = k0_isomorphism_certificate(even_subring(build_semisimple_fusion(2, 7)))
    assert cert7.ok
    assert abs(int(sympy.Matrix(cert7.real_coordinates).det())) == 1


@pytest.mark.parametrize("p,ell", GRID)
def test_k0_certificate_grid(p, ell):
    cert = k0_isomorphism_certificate(even_subring(build_semisimple_fusion(p, ell)))
    assert cert.ok
    det = int(sympy.Matrix(cert.real_coordinates).det())
    assert det == cert.determinant and abs(det) == 1


def test_dimension_field_examples():
    for p in (2, 5, 7, 11):
        assert dimension_field(p, 3).degree == 1
    d = dimension_field(2, 7)
    assert d.degree == 3 and d.model_degree == 3
    d = dimension_field(3, 5)
    assert d.model_degree == 4 and d.degree == 2


@pytest.mark.parametrize("p,ell", GRID[:30])
def test_dimension_field_orbits(p, ell):
    """Degree equals the lcm of Frobenius orbit lengths of the dimensions, found by brute iteration."""
    d = dimension_field(p, ell)
    lengths = []
    for v in range(ell - 1):
        x = quantum_dimension(v, p, ell)
        y, k = x.frobenius(), 1
        while y != x:
            y, k = y.frobenius(), k + 1
        lengths.append(k)
    assert d.degree == math.lcm(*lengths)
    n_star = next(n for n in range(1, ell * ell) if (p**n - 1) % (ell * ell) == 0)
    assert d.n_star == n_star


@pytest.mark.parametrize("p,ell", [(2, 7), (19, 5), (3, 11), (5, 13), (11, 7)])
def test_mod_p_cross_check(p, ell):
    check = mod_p_cross_check(even_subring(build_semisimple_fusion(p, ell)), p)
    assert check.residue_rank == (ell - 1) // 2


def test_fusion_json_round_trip():
    ring = build_semisimple_fusion(3, 7)
    data = ring.to_json()
    assert set(data) >= {"labels", "unit", "N", "dual", "dims"}
    back = FusionRing.from_json(data)
    assert back.labels == ring.labels and np.array_equal(back.tensor(), ring.tensor())


def test_truncated_cg_bounds():
    for ell in (5, 7, 11):
        top = ell - 2
        for i in range(top + 1):
            for j in range(top + 1):
                ks = [k for k in range(top + 1) if truncated_cg(i, j, k, ell)]
                assert ks == list(range(abs(i - j), min(i + j, 2 * top - i - j) + 1, 2))
