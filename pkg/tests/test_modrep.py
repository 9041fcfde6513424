import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from oracles import jordan_blocks_oracle, kron, sigma_list

from k0forge.modrep import (
    JordanModule,
    categorical_trace,
    explicit_projective_factorization,
    is_stably_nilpotent,
    modules_up_to,
    norm_map,
    radical_filtration,
    sample_trace_zero,
    stable_k0,
    tensor,
    tensor_via_matrices,
)


# ---- examples


def test_tensor_examples():
    assert tensor(JordanModule(3, (2,)), JordanModule(3, (2,))) == JordanModule(3, (1, 3))
    assert tensor(JordanModule(5, (2,)), JordanModule(5, (3,))) == JordanModule(5, (2, 4))
    for p in (3, 5, 7):
        for k in range(1, p + 1):
            assert tensor(JordanModule(p, (1,)), JordanModule(p, (k,))) == JordanModule(p, (k,))


def test_tensor_rejects_mismatched_p():
    with pytest.raises(ValueError):
        tensor(JordanModule(3, (1,)), JordanModule(5, (1,)))


def test_block_range_enforced():
    with pytest.raises(ValueError):
        JordanModule(3, (4,))
    with pytest.raises(ValueError):
        JordanModule(3, (0,))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_tensor_matches_pure_python_oracle(p):
    for a, b in itertools.combinations_with_replacement(range(1, p + 1), 2):
        ua, ub = sigma_list([a]), sigma_list([b])
        expected = jordan_blocks_oracle(kron(ua, ub, p), p)
        ours = tensor(JordanModule(p, (a,)), JordanModule(p, (b,)))
        assert ours.blocks == expected, (a, b)
        assert ours.dimension == a * b


@pytest.mark.parametrize("p", [2, 3, 5])
def test_tensor_matches_numpy_oracle_on_sums(p):
    mods = [m for m in modules_up_to(p, 5)]
    for a, b in itertools.product(mods[:12], repeat=2):
        assert tensor(a, b) == tensor_via_matrices(a, b)


@given(st.sampled_from([3, 5, 7]), st.data())
def test_stable_k0_is_multiplicative(p, data):
    blocks = st.lists(st.integers(1, p), min_size=1, max_size=3).map(tuple)
    a = JordanModule(p, data.draw(blocks))
    b = JordanModule(p, data.draw(blocks))
    assert stable_k0(tensor(a, b)).value == stable_k0(a).value * stable_k0(b).value % p
    assert tensor(a, b) == tensor(b, a)


def test_stable_k0_examples():
    for p in (2, 3, 5, 7):
        assert stable_k0(JordanModule(p, (p,))).value == 0
        assert stable_k0(JordanModule(p, (1,))).value == 1
    assert stable_k0(JordanModule(5, (2, 4))).value == 1


@pytest.mark.parametrize("p", [3, 5, 7])
def test_self_duality(p):
    for m in modules_up_to(p, 6):
        u = sigma_list(list(m.blocks))
        inv_t = [list(r) for r in zip(*sympy.Matrix(u).inv_mod(p).tolist())]
        assert jordan_blocks_oracle(inv_t, p) == tuple(sorted(m.blocks))
        assert m.dual() == m


def test_trace_examples():
    one = JordanModule(5, (1,))
    assert categorical_trace(one, np.eye(1, dtype=np.int64)) == 1
    for p in (3, 5, 7):
        proj = JordanModule(p, (p,))
        assert categorical_trace(proj, np.eye(p, dtype=np.int64)) == 0


def test_trace_rejects_noncommuting():
    m = JordanModule(3, (2, 2))
    f = np.zeros((4, 4), dtype=np.int64)
    f[3, 0] = 1
    with pytest.raises(ValueError):
        categorical_trace(m, f)


def test_nilpotent_commutant_j2j2_exhaustive():
    """Every nilpotent endomorphism of J2+J2 over F_3 commuting with sigma has trace 0."""
    p = 3
    u = sympy.Matrix(sigma_list([2, 2]))
    n = u.shape[0]
    # commutant: vec(FU - UF) = (U^T kron I - I kron U) vec(F) = 0, solved over Q
    op = sympy.kronecker_product(u.T, sympy.eye(n)) - sympy.kronecker_product(sympy.eye(n), u)
    basis = [sympy.Matrix(n, n, list(v)).T for v in op.nullspace()]  # column-major vec
    assert all(b * u == u * b for b in basis)
    basis = [b * sympy.ilcm(*[sympy.fraction(x)[1] for x in b]) for b in basis]
    assert len(basis) == 8
    m = JordanModule(p, (2, 2))
    seen = nilpotent = 0
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        f = sum((c * b for c, b in zip(coeffs, basis)), sympy.zeros(n, n)).applyfunc(lambda x: x % p)
        seen += 1
        if (f**n).applyfunc(lambda x: x % p).is_zero_matrix:
            nilpotent += 1
            arr = np.array(f.tolist(), dtype=np.int64)
            assert categorical_trace(m, arr) == 0
    assert seen == 3**8 and nilpotent > 1


def test_stable_nilpotence_examples():
    p = 3
    proj = JordanModule(p, (p,))
    assert is_stably_nilpotent(proj, np.eye(p, dtype=np.int64))
    assert not is_stably_nilpotent(JordanModule(p, (1,)), np.eye(1, dtype=np.int64))
    assert not is_stably_nilpotent(JordanModule(p, (2,)), np.eye(2, dtype=np.int64))


@pytest.mark.parametrize("p", [3, 5])
def test_norm_maps_factor_through_projective(p):
    rng = np.random.default_rng(p)
    for m in modules_up_to(p, 4):
        t = rng.integers(0, p, size=(m.dimension, m.dimension))
        h = norm_map(m, m, t)
        fac = explicit_projective_factorization(m, m, t)
        assert np.array_equal(fac.out_map @ fac.in_map % p, h % p)
        assert categorical_trace(m, h) == 0


@pytest.mark.parametrize("p", [3, 5])
def test_trace_zero_sampling(p):
    report = sample_trace_zero(p, 6, 2000, seed=p)
    assert report.samples >= 2000 and report.ok and not report.failures


def test_radical_filtration():
    layers = radical_filtration(JordanModule(3, (3, 1)))
    assert [layer.dimension for layer in layers] == [2, 1, 1]
    assert all(layer.trivial_action for layer in layers)


def test_json():
    m = JordanModule(5, (4, 2))
    assert JordanModule.from_json(m.to_json()) == m
