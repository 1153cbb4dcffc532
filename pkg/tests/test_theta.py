import os
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cmmahler.errors import DomainError, RankError, TruncationError
from cmmahler.identities import data_dir, get_record, load_records
from cmmahler.quadcm import CMPoint, in_FP, in_FQ
from cmmahler.theta import (QExpansion, decompose, dumps, eigenform_split, embed_oldform,
                            hecke_closure, hecke_Tp, loads, reconstruct, sturm_bound,
                            theta_params, theta_series)


def load_form(name):
    with open(os.path.join(data_dir(), "forms", name)) as fh:
        return loads(fh.read())


@pytest.fixture(scope="module")
def f64():
    return load_form("f64aa1.txt")


@pytest.fixture(scope="module")
def f32():
    return load_form("f32aa1.txt")


def lattice_theta(abc, family, T):
    """Independent brute-force enumeration of the theta coefficients."""
    a, b, c = abc
    if family == "P":
        from math import gcd
        l = gcd(gcd(a, 4 * b), 16 * c)
        form, weight, chi = (16 * c, 4 * b, a), lambda m, n: 2 * b * m + a * n, (0, 1, 0, -1)
        mod = 4
    else:
        from math import gcd
        l = gcd(gcd(a, 3 * b), 9 * c)
        form, weight, chi = (9 * c, 3 * b, a), lambda m, n: 3 * b * m + 2 * a * n, (0, 1, -1)
        mod = 3
    out = [0] * (T + 1)
    R = 4 * T + 10
    for m in range(-R, R + 1):
        for n in range(-R, R + 1):
            v = form[0] * m * m + form[1] * m * n + form[2] * n * n
            if v == 0 or v > T * l:
                continue
            assert v % l == 0
            out[v // l] += chi[n % mod] * weight(m, n)
    return out


def test_theta_params_examples():
    l, A, D, N = theta_params(CMPoint(16, 0, 1), "P")
    assert (l, A, N) == (16, ((2, 0), (0, 32)), 64)
    l, A, D, N = theta_params(CMPoint(1, 0, 1), "Q")
    assert l == 1 and N == 36
    assert A == ((18, 0), (0, 18))


def test_level_divisible_by_four_for_P():
    for rec in load_records().values():
        if rec.family == "P":
            for p in rec.cm_points:
                assert theta_params(p, "P")[3] % 4 == 0


def test_factor_levels_divide_theta_level():
    for rec in load_records().values():
        N = theta_params(rec.cm_points[0], rec.family)[3]
        lcm_span = 1
        for p in rec.cm_points:
            from math import lcm
            lcm_span = lcm(lcm_span, theta_params(p, rec.family)[3])
        for lv in rec.levels:
            assert lcm_span % lv == 0, (rec.id, lv, lcm_span)


def test_theta_examples():
    th = theta_series(CMPoint(16, 0, 1), "P", 13)
    assert {n: c for n, c in enumerate(th.coeffs) if c} == \
        {1: 32, 2: 64, 5: 64, 9: -96, 10: -128, 13: -192}
    th = theta_series(CMPoint(16, 16, 5), "P", 13)
    assert {n: c for n, c in enumerate(th.coeffs) if c} == \
        {1: 32, 2: -64, 5: 64, 9: -96, 10: 128, 13: -192}
    assert theta_series(CMPoint(1, 0, 1), "Q", 3).coeffs[1] == 4


@pytest.mark.parametrize("family,abc", [("P", (16, 0, 1)), ("P", (7, 7, 2)), ("P", (16, 16, 7)),
                                        ("Q", (1, 0, 1)), ("Q", (3, 3, 13)), ("Q", (39, 3, 1))])
def test_theta_matches_brute_force_lattice_sum(family, abc):
    assert theta_series(CMPoint(*abc), family, 60).coeffs == lattice_theta(abc, family, 60)


def test_table_thetas_even_cusp_forms():
    for rec in load_records().values():
        for p in rec.cm_points:
            th = theta_series(p, rec.family, 80)
            assert th.coeffs[0] == 0
            assert all(c % 2 == 0 for c in th.coeffs)
            # |c_n| grows at most linearly times the representation count
            assert all(abs(c) <= 64 * n * max(1, n) ** 0.5 for n, c in enumerate(th.coeffs))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60), st.integers(-60, 60), st.integers(1, 60), st.sampled_from("PQ"))
def test_theta_parity_random_points(a, b, c, family):
    from math import gcd
    if 4 * a * c - b * b <= 0 or gcd(gcd(a, b), c) != 1:
        return
    p = CMPoint(a, b, c)
    if not (in_FP(p) if family == "P" else in_FQ(p)):
        return
    th = theta_series(p, family, 40)
    assert th.coeffs[0] == 0
    assert all(x % 2 == 0 for x in th.coeffs)


def test_sturm_bounds():
    assert sturm_bound(64) == 16
    assert sturm_bound(441) == 112
    assert [sturm_bound(n) for n in (3712, 1665, 192, 576)] == [960, 456, 64, 192]
    assert sturm_bound(112) == 32 and sturm_bound(36) == 12
    with pytest.raises(DomainError):
        sturm_bound(0)


def test_embed_oldform():
    f = QExpansion(8, 1, [0, 1, 1, 1, 1])
    assert embed_oldform(f, 1).coeffs == f.coeffs
    g = embed_oldform(f, 2)
    assert g.coeffs[:5] == [0, 0, 1, 0, 1] and g.level == 16
    with pytest.raises(DomainError):
        embed_oldform(f, 3, target_level=16)


def test_example_decomposition_through_bound(f32, f64):
    th = theta_series(CMPoint(16, 0, 1), "P", 200)
    dec = decompose(th, [embed_oldform(f32, 2, 64), f64])
    assert dec.ok and dec.coefficients == [64, 32]
    assert dec.verified_through >= 16
    assert decompose(f64, [f64]).coefficients == [1]


def test_decompose_reconstruct_roundtrip(f32, f64):
    basis = [embed_oldform(f32, 2, 64), f64]
    th = theta_series(CMPoint(16, 16, 5), "P", 200)
    dec = decompose(th, basis)
    assert dec.coefficients == [-64, 32]
    rebuilt = reconstruct(dec.coefficients, basis)
    assert all(rebuilt[n] == th.coeffs[n] for n in range(min(len(rebuilt), len(th.coeffs))))


def test_sturm_equality_holds_beyond_bound(f32, f64):
    basis = [embed_oldform(f32, 2, 64), f64]
    B = sturm_bound(64)
    th = theta_series(CMPoint(16, 0, 1), "P", 4 * B)
    dec = decompose(th.truncate(B), [b.truncate(B) for b in basis], margin=0)
    rebuilt = reconstruct(dec.coefficients, basis)
    rng = random.Random(3)
    for n in rng.sample(range(B + 1, 4 * B + 1), 20):
        assert rebuilt[n] == th.coeffs[n]


def test_perturbed_theta_rejected(f32, f64):
    basis = [embed_oldform(f32, 2, 64), f64]
    for k in (1, 7, 13, 16):
        th = theta_series(CMPoint(16, 0, 1), "P", 200)
        th.coeffs[k] += 2
        dec = decompose(th, basis)
        assert not dec.ok and dec.witness is not None and dec.witness <= 16 + 8


def test_rank_deficient_basis_raises(f64):
    with pytest.raises(RankError):
        decompose(f64, [f64, f64.scale(2)])


def test_nebentypus_decomposition():
    th = theta_series(CMPoint(1, 0, 1), "Q", 400)
    forms = eigenform_split(hecke_closure([th]), [5, 7, 11, 13])
    assert len(forms) == 2
    dec = decompose(th, forms)
    assert dec.ok
    assert [str(c.value) for c in dec.coefficients] == ["2", "2"]


def test_hecke_Tp_on_theta_span():
    th1 = theta_series(CMPoint(16, 0, 1), "P", 200)
    th2 = theta_series(CMPoint(16, 16, 5), "P", 200)
    t5 = hecke_Tp(th1, 5)
    dec = decompose(t5, [th1.truncate(t5.truncation), th2.truncate(t5.truncation)])
    assert dec.ok and dec.verified_through >= 16
    # p | N: character term drops
    t2 = hecke_Tp(th1, 2)
    assert t2.coeffs[:5] == [th1.coeffs[2 * n] for n in range(5)]
    with pytest.raises(TruncationError):
        hecke_Tp(th1.truncate(3), 5)


def test_eigenforms_of_level_64_span(f32, f64):
    span = [theta_series(CMPoint(16, 0, 1), "P", 300), theta_series(CMPoint(16, 16, 5), "P", 300)]
    forms = eigenform_split(span, [3, 5, 7, 11])
    assert len(forms) == 2
    th1, th2 = span
    plus = [Fraction(x + y, 64) for x, y in zip(th1.coeffs, th2.coeffs)]
    minus = [Fraction(x - y, 128) for x, y in zip(th1.coeffs, th2.coeffs)]
    got = sorted([list(f.coeffs[:100]) for f in forms])
    assert sorted([plus[:100], minus[:100]]) == got
    assert plus[:100] == [f64.coeffs[n] for n in range(100)]
    assert minus[:100] == [f32.coeffs[n // 2] if n % 2 == 0 else 0 for n in range(100)]
    for f in forms:
        lead = next(c for c in f.coeffs if c)
        assert lead == 1


def test_eigenvector_relation(f64):
    for p in (3, 5, 7):
        tp = hecke_Tp(f64, p)
        ap = f64.coeffs[p]
        assert all(tp.coeffs[n] == ap * f64.coeffs[n] for n in range(tp.truncation + 1))


def test_single_eigenform_unchanged(f64):
    out = eigenform_split([f64], [3, 5])
    assert len(out) == 1 and list(out[0].coeffs[:200]) == list(f64.coeffs[:200])


def test_text_roundtrip(f64):
    back = loads(dumps(f64))
    assert back.level == f64.level and back.char_disc == f64.char_disc
    assert list(back.coeffs) == list(f64.coeffs)


def test_level_1665_span_splits_into_four():
    rec = get_record(71)
    from cmmahler.identities import sturm_certificate
    cert = sturm_certificate(rec.cm_points, rec.family, rec.levels, 30)
    assert cert.ok and cert.bound == 456
    first = cert.decompositions[0]
    assert first.verified_through >= 456
