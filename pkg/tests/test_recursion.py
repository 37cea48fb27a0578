from fractions import Fraction
from math import comb

import pytest

from prpd import (ConstructionError, InputError, MODE_CERTIFIED, RecursionParams,
                  Robp, certify, exact_average, expander_walk_sampler, identity_robp,
                  inf_norm, ledger_check, ledger_from_dict, ledger_to_dict, mat_sub,
                  matrix_form, measure_robust_error, random_robp, recursive_prpd,
                  robust_form)
from prpd.recursion import derive_k, is_terminal, next_power_of_two


def test_terminal_h0_is_uniform_bit():
    prpd, ledger = recursive_prpd(1, 2, params=RecursionParams(k=0, gamma=Fraction(1, 16)))
    assert (prpd.s_out, prpd.s_in, prpd.mu, prpd.out_len) == (0, 1, 1, 1)
    assert ledger.top.kind == "terminal"
    program = random_robp(1, 2, seed=0)
    assert measure_robust_error(prpd, program) == 0


def test_terminal_when_2k_covers_segment():
    # 2k >= 2^h makes the top node terminal: exact uniform, zero error
    prpd, ledger = recursive_prpd(4, 2, params=RecursionParams(k=2, gamma=Fraction(1, 256)))
    assert ledger.top.kind == "terminal"
    assert prpd.s_out == 0 and prpd.s_in == 4
    program = random_robp(4, 2, seed=1)
    mf = matrix_form(prpd, program, 0, 4)
    rf = robust_form(mf)
    assert rf[""] == exact_average(program, 0, 4)


@pytest.mark.parametrize("n,k", [(4, 0), (4, 1), (8, 0), (8, 1)])
def test_enumeration_mode_builds_exactly(n, k):
    prpd, ledger = recursive_prpd(n, 2, params=RecursionParams(k=k))
    assert prpd.out_len == n
    bound = ledger.top.error_bound
    for seed in range(5):
        program = random_robp(n, 2, seed=seed)
        err = measure_robust_error(prpd, program)
        assert err <= bound
        assert err == 0  # exact samplers and exact terminals cancel all error


@pytest.mark.parametrize("n,k", [(4, 0), (4, 1), (8, 1)])
@pytest.mark.parametrize("c", [1, 2])
def test_ledger_check_passes(n, k, c):
    _, ledger = recursive_prpd(n, 2, params=RecursionParams(k=k, c=c))
    report = ledger_check(ledger)
    assert report.ok, [f"({f.h},{f.k}) {f.name}: {f.lhs} > {f.rhs}" for f in report.failures()]


def test_ledger_mu_caps():
    _, ledger = recursive_prpd(8, 2, params=RecursionParams(k=1))
    for node in ledger.nodes:
        assert node.mu <= max(1, comb((1 << node.h) - 1, node.k))
    top = ledger.top
    assert top.mu == comb(7, 1) == 7  # equality along the natural recursion


def test_derive_k():
    gamma = Fraction(1, 4096)  # n = 8 default
    base = Fraction(11 ** 3, 4096)
    assert derive_k(8, gamma, base) == 0
    assert derive_k(8, gamma, base ** 2) == 1
    assert derive_k(8, gamma, base ** 2 * Fraction(999, 1000)) == 2
    with pytest.raises(InputError):
        derive_k(8, Fraction(1, 2), Fraction(1, 10))  # cascade above 1


def test_eps_drives_k():
    prpd, ledger = recursive_prpd(8, 2, eps=Fraction(1, 10))
    assert ledger.k == derive_k(8, Fraction(1, 8 ** 4), Fraction(1, 10))
    assert ledger.eps_target == Fraction(1, 10)
    assert ledger.top.error_bound <= Fraction(1, 10)


def test_terminal_predicate():
    assert is_terminal(0, 0) and is_terminal(1, 1) and is_terminal(2, 2)
    assert not is_terminal(1, 0) and not is_terminal(2, 1) and not is_terminal(3, 1)


def test_padding_to_power_of_two():
    assert next_power_of_two(3) == 4
    prpd, ledger = recursive_prpd(3, 2, params=RecursionParams(k=1))
    assert ledger.n_padded == 4 and prpd.out_len == 4
    # a 3-step program extended with an identity step ignores the padding bit
    base = random_robp(3, 2, seed=5)
    ext = identity_robp(1, 2)
    padded = Robp(n=4, w=2, d_step=1, transitions=base.transitions + ext.transitions)
    err = measure_robust_error(prpd, padded)
    assert err == 0
    assert inf_norm(mat_sub(exact_average(padded, 0, 4), exact_average(base, 0, 3))) == 0


def test_certified_mode_default_factory():
    prpd, ledger = recursive_prpd(
        4, 2, params=RecursionParams(k=1, sampler_mode=MODE_CERTIFIED))
    assert ledger.sampler_mode == MODE_CERTIFIED
    for node in ledger.nodes:
        for slot in node.samplers:
            assert slot.cert_method == "brute-force"
            assert slot.cert_eps == 0 and slot.cert_delta == 0
    program = random_robp(4, 2, seed=2)
    assert measure_robust_error(prpd, program) == 0
    assert ledger_check(ledger).ok


def test_certified_mode_rejects_weak_backend():
    def weak_factory(m_bits, eps_req, delta_req):
        g = expander_walk_sampler(8, max(1, m_bits - 2), m_bits, seed=3)
        ok, profile = certify(g, 1, 1)
        assert ok
        return g

    with pytest.raises(ConstructionError, match="eps_0"):
        recursive_prpd(4, 2, params=RecursionParams(
            k=0, sampler_mode=MODE_CERTIFIED, sampler_factory=weak_factory))


def test_ledger_json_roundtrip():
    _, ledger = recursive_prpd(8, 2, params=RecursionParams(k=1))
    data = ledger_to_dict(ledger)
    back = ledger_from_dict(data)
    assert back.nodes == ledger.nodes
    assert (back.n, back.n_padded, back.w, back.gamma, back.k, back.c) == (
        ledger.n, ledger.n_padded, ledger.w, ledger.gamma, ledger.k, ledger.c)
    assert ledger_check(back).ok


def test_same_generator_reused_for_both_halves():
    _, ledger = recursive_prpd(8, 2, params=RecursionParams(k=1))
    for node in ledger.nodes:
        if node.kind == "merge":
            assert node.len_a == node.len_b


def test_measure_average_error_zero_for_exact_builds():
    prpd, _ = recursive_prpd(4, 2, params=RecursionParams(k=1))
    from prpd import measure_average_error
    assert measure_average_error(prpd, random_robp(4, 2, seed=9)) == 0


def test_bad_params_rejected():
    with pytest.raises(InputError):
        recursive_prpd(4, 2)  # neither eps nor k
    with pytest.raises(InputError):
        recursive_prpd(4, 2, params=RecursionParams(k=1, gamma=Fraction(3, 2)))
    with pytest.raises(InputError):
        recursive_prpd(4, 2, params=RecursionParams(k=1, sampler_mode="bogus"))
