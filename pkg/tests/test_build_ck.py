import random
from fractions import Fraction
from math import comb

import pytest

from prpd import (ConstructionError, ContractError, build_ck, certify, dump_prpd,
                  exact_average, expander_walk_sampler, inf_norm, mat_mul, mat_scale,
                  mat_sub, matrix_form, measure_robust_error, random_robp,
                  uniform_prpd)
from prpd.bits import all_bits
from prpd.pdist import bundle_matrix
from prpd.robp import zeros

from helpers import corrupted_uniform_prpd, weighted_exact_prpd

GAMMA = Fraction(1, 256)


def test_k0_exact_children_collapse_to_product():
    children = [uniform_prpd(2)]
    build = build_ck(children, children, w=2, gamma=GAMMA)
    program = random_robp(4, 2, seed=1)
    mf = matrix_form(build.prpd, program, 0, 4)
    lhs = mf.average()
    rhs = mat_mul(exact_average(program, 0, 2), exact_average(program, 2, 4))
    assert lhs == rhs
    assert build.prpd.mu == 1 == comb(3, 0)


def test_weight_equality_and_vandermonde():
    # children with weights exactly binom(m-1, i) make the merged weight
    # meet its cap binom(2m-1, k) with equality
    m_bits, k = 4, 2
    children = [weighted_exact_prpd(m_bits, comb(m_bits - 1, i)) for i in range(k + 1)]
    build = build_ck(children, children, w=2, gamma=GAMMA)
    assert build.prpd.mu == comb(2 * m_bits - 1, k) == 21
    total = sum(comb(m_bits - 1, i) * comb(m_bits - 1, k - i) for i in range(k + 1))
    total += sum(comb(m_bits - 1, i) * comb(m_bits - 1, k - 1 - i) for i in range(k))
    assert build.prpd.mu == total


def test_exact_children_zero_error():
    children = [uniform_prpd(2), uniform_prpd(2)]
    build = build_ck(children, children, w=2, gamma=GAMMA)
    for seed in range(5):
        program = random_robp(4, 2, seed=seed)
        assert measure_robust_error(build.prpd, program) == 0


def test_lossy_children_error_within_cascade_bound():
    gamma = Fraction(1, 16)
    a0 = corrupted_uniform_prpd(2, 5)        # robust error <= 2/32 = gamma
    a1 = corrupted_uniform_prpd(2, 9)        # robust error <= 2/512 = gamma^2
    build = build_ck([a0, a1], [a0, a1], w=2, gamma=gamma)
    bound = (11 * gamma) ** 2
    saw_nonzero = False
    for seed in range(3):
        program = random_robp(4, 2, seed=seed)
        for i, child in enumerate((a0, a1)):
            for (a, b) in ((0, 2), (2, 4)):
                err = measure_robust_error(child, program, a, b)
                assert err <= gamma ** (i + 1)
        err = measure_robust_error(build.prpd, program)
        assert err <= bound
        saw_nonzero = saw_nonzero or err > 0
    assert saw_nonzero


def test_bundle_decomposes_into_terms():
    gamma = Fraction(1, 16)
    a0 = corrupted_uniform_prpd(2, 5)
    a1 = corrupted_uniform_prpd(2, 9)
    build = build_ck([a0, a1], [a0, a1], w=2, gamma=gamma)
    program = random_robp(4, 2, seed=7)
    rng = random.Random(0)
    for _ in range(25):
        y = format(rng.randrange(1 << build.prpd.s_in), f"0{build.prpd.s_in}b")
        whole = bundle_matrix(program, 0, build.prpd.bundle("", y), 2)
        total = zeros(2)
        for i, j, sign in build.terms:
            a_mat = bundle_matrix(program, 0, build.a_bundle(i, "", y), 2)
            b_mat = bundle_matrix(program, 2, build.b_bundle(j, "", y), 2)
            term = mat_scale(sign, mat_mul(a_mat, b_mat))
            total = tuple(tuple(p + q for p, q in zip(r1, r2)) for r1, r2 in zip(total, term))
        assert whole == total


def test_termwise_decomposition_bounds():
    # with exact (0,0) samplers each cross term collapses to a product of
    # robust-error matrices; the per-term bounds then hold with slack
    gamma = Fraction(1, 16)
    a0 = corrupted_uniform_prpd(2, 5)
    a1 = corrupted_uniform_prpd(2, 9)
    build = build_ck([a0, a1], [a0, a1], w=2, gamma=gamma)
    program = random_robp(4, 2, seed=3)
    a_target = exact_average(program, 0, 2)
    b_target = exact_average(program, 2, 4)
    s_in = build.prpd.s_in
    inv = Fraction(1, 1 << s_in)
    for i, j, _ in build.terms:
        acc = zeros(2)
        for y in all_bits(s_in):
            a_mat = mat_sub(bundle_matrix(program, 0, build.a_bundle(i, "", y), 2), a_target)
            b_mat = mat_sub(bundle_matrix(program, 2, build.b_bundle(j, "", y), 2), b_target)
            prod = mat_mul(a_mat, b_mat)
            acc = tuple(tuple(p + q for p, q in zip(r1, r2)) for r1, r2 in zip(acc, prod))
        term_err = inf_norm(mat_scale(inv, acc))
        # symmetric rule at delta = 0: 9 * gamma^(i+j+2)
        assert term_err <= 9 * gamma ** (i + j + 2)
    # last-term rule: || E_y[A_k - A] * B || <= 3 * gamma^(k+1) at delta = 0
    k = build.k
    acc = zeros(2)
    for y in all_bits(s_in):
        a_mat = mat_sub(bundle_matrix(program, 0, build.a_bundle(k, "", y), 2), a_target)
        acc = tuple(tuple(p + q for p, q in zip(r1, r2)) for r1, r2 in zip(acc, a_mat))
    last = inf_norm(mat_mul(mat_scale(inv, acc), b_target))
    assert last <= 3 * gamma ** (k + 1)


def test_sign_structure_all_plus_minus_one():
    children = [uniform_prpd(2), uniform_prpd(2)]
    build = build_ck(children, children, w=2, gamma=GAMMA)
    prpd = build.prpd
    for x in all_bits(prpd.s_out):
        for y in all_bits(prpd.s_in):
            for i in range(prpd.mu):
                _, sign = prpd.gen(x, y, i)
                assert sign in (1, -1)


def test_non_overlap_structural():
    m_bits, k = 4, 2
    children = [weighted_exact_prpd(m_bits, comb(m_bits - 1, i)) for i in range(k + 1)]
    build = build_ck(children, children, w=2, gamma=GAMMA)
    for i, j, _ in build.terms:
        assert build.len_a[i] + build.len_b[j] <= build.prpd.s_in


def test_oblivious_construction():
    def fresh():
        children = [uniform_prpd(2), uniform_prpd(2)]
        return build_ck(children, children, w=2, gamma=GAMMA)

    first = fresh()
    dump_before = dump_prpd(first.prpd)
    # evaluating against two different programs must not disturb the generator
    matrix_form(first.prpd, random_robp(4, 2, seed=11), 0, 4)
    matrix_form(first.prpd, random_robp(4, 2, seed=12), 0, 4)
    assert dump_prpd(first.prpd) == dump_before
    assert dump_prpd(fresh().prpd) == dump_before


def test_refuses_unsatisfiable_weight_hypothesis():
    # binom(m-1, i) = 0 admits no generator of weight >= 1
    children = [uniform_prpd(1), uniform_prpd(1)]
    with pytest.raises(ConstructionError, match=r"weight hypothesis.*binom\(0, 1\) = 0"):
        build_ck(children, children, w=2, gamma=GAMMA)


def test_refuses_insufficient_sampler_accuracy():
    children = [uniform_prpd(2)]
    g = expander_walk_sampler(6, 2, children[0].seed_len, seed=5)
    ok, _ = certify(g, Fraction(1, 2), Fraction(1, 4))
    assert ok  # certified, but far too weak for gamma = 1/256
    with pytest.raises(ConstructionError, match="eps_0"):
        build_ck(children, children, w=2, gamma=GAMMA, samplers=[g])


def test_refuses_uncertified_sampler():
    children = [uniform_prpd(2)]
    g = expander_walk_sampler(6, 2, children[0].seed_len, seed=5)
    with pytest.raises(ContractError, match="uncertified"):
        build_ck(children, children, w=2, gamma=GAMMA, samplers=[g])


def test_refuses_sampler_output_mismatch():
    children = [uniform_prpd(2)]
    g = expander_walk_sampler(6, 3, 3, seed=5)
    certify(g, Fraction(1), Fraction(1))
    with pytest.raises(ConstructionError, match="flattened child seed"):
        build_ck(children, children, w=2, gamma=GAMMA, samplers=[g])
