import random
from fractions import Fraction

import pytest

from padiccf import (
    K_bound,
    QuadIrr,
    b_sequence_analysis,
    dt_identities,
    expand,
    galois_check,
    is_regular,
    reversed_period_identity,
    ruban_nonperiodic_probe,
    trace_zero_classify,
)
from padiccf.analysis import reversal_prefix_check
from padiccf.corpus import random_digits, random_periodic
from padiccf.engine import OPEN, PERIODIC, RUBAN

from oracles import K_bound_brute

PERIOD12_STATE = QuadIrr(5, 19, -13, 6, 1, 2)
SQRT37_STATE = QuadIrr(3, 37, 1, 2, 1, 1)
# 1/(5*sqrt(-434)), written with the root in the numerator
INV_5_SQRT_M434 = QuadIrr(5, -434, 0, -434, 1, 1)


# -- regularity and the periodicity criterion -----------------------------------


def test_regular_state_is_purely_periodic():
    rep = is_regular(PERIOD12_STATE)
    assert rep.regular
    assert rep.v_alpha < 0 < rep.v_conj
    assert rep.first_regular_index == 0


def test_irregular_state_has_positive_first_regular_index():
    rep = is_regular(INV_5_SQRT_M434)
    assert not rep.regular
    assert rep.v_alpha == -1 and rep.v_conj == -1
    assert rep.first_regular_index == 1  # preperiod [6/5] then the cycle


def test_galois_check_on_pinned_states():
    for alpha in (PERIOD12_STATE, SQRT37_STATE, INV_5_SQRT_M434):
        exp = expand(alpha)
        verdict = galois_check(alpha, exp)
        assert verdict.ok
        assert verdict.preperiod_length == len(exp.preperiod)
        assert verdict.regular == exp.is_purely_periodic


def test_galois_check_on_random_periodic_corpus():
    rng = random.Random(2201)
    for _ in range(30):
        p = rng.choice([3, 5, 7])
        alpha = random_periodic(rng, p)
        exp = expand(alpha)
        assert galois_check(alpha, exp).ok, alpha


def test_galois_check_requires_a_periodic_expansion():
    exp = expand(QuadIrr(5, 89, 8, 1, 1, 3), max_steps=20)
    assert exp.status == OPEN
    with pytest.raises(ValueError):
        galois_check(QuadIrr(5, 89, 8, 1, 1, 3), exp)


# -- period reversal -------------------------------------------------------------


def test_reversed_period_of_the_period12_value():
    exp = expand(PERIOD12_STATE)
    rev = reversed_period_identity(exp)
    assert rev.is_purely_periodic
    assert rev.period == tuple(reversed(exp.period))
    # norm 1/6 != -1, so the period must not be a palindrome
    assert PERIOD12_STATE.norm == Fraction(1, 6)
    assert list(exp.period) != list(reversed(exp.period))


def test_palindrome_iff_norm_minus_one():
    # (1+sqrt(37))/6 has norm -1 and the one-digit period is a palindrome
    assert SQRT37_STATE.norm == -1
    rev = reversed_period_identity(expand(SQRT37_STATE))
    assert rev.period == expand(SQRT37_STATE).period


def test_reversal_on_random_purely_periodic_corpus():
    rng = random.Random(2202)
    checked = 0
    while checked < 12:
        p = rng.choice([3, 5, 7])
        alpha = random_periodic(rng, p)
        exp = expand(alpha)
        if not exp.is_purely_periodic:
            continue
        rev = reversed_period_identity(exp)
        assert rev.period == tuple(reversed(exp.period))
        checked += 1


def test_reversed_period_rejects_wrong_shapes():
    with pytest.raises(ValueError):
        reversed_period_identity(expand(INV_5_SQRT_M434))  # nonempty preperiod
    with pytest.raises(ValueError):
        reversed_period_identity(expand(SQRT37_STATE, RUBAN, max_steps=60))


def test_reversal_prefix_identity():
    exp = expand(PERIOD12_STATE)
    for n in range(9):
        assert reversal_prefix_check(exp, n)


# -- norm-sign traces --------------------------------------------------------------


@pytest.mark.parametrize("Delta", [2, 3, 19, 37, 89, 126, 150, 300])
def test_K_bound_matches_brute_sum(Delta):
    assert K_bound(Delta) == K_bound_brute(Delta)


def test_K_bound_needs_positive_discriminant():
    with pytest.raises(ValueError):
        K_bound(-434)


def test_b_sequence_trace_on_real_discriminant():
    trace = b_sequence_analysis(PERIOD12_STATE, 40)
    assert trace.status == PERIODIC and trace.period_length == 12
    assert trace.has_real_norms and trace.K_bound == K_bound_brute(19)
    assert len(trace.signs) == len(trace.b_values) == len(trace.k_values)
    assert set(trace.signs) <= set("+-0")
    if trace.negative_window_triggered:
        assert trace.period_length <= trace.K_bound
    assert trace.ever_b_bounded or not trace.all_b_bounded


def test_b_sequence_trace_on_imaginary_discriminant():
    trace = b_sequence_analysis(INV_5_SQRT_M434, 30)
    assert not trace.has_real_norms
    assert trace.K_bound is None
    assert not trace.negative_window_triggered


# -- trace-zero trichotomy -----------------------------------------------------------


def test_trace_zero_negative_valuation_template():
    rep = trace_zero_classify(INV_5_SQRT_M434)
    assert rep.klass == "preperiod_1"
    assert rep.valuation == -1
    assert rep.a0_small is True
    assert rep.matched is True
    assert len(rep.expansion.preperiod) == 1


def test_trace_zero_positive_valuation_without_small_leading_digit():
    # 7*sqrt(386): periodic with preperiod length 2, but a_0 = 22/7 is too
    # big for the doubled-digit template (22/7 > 7/4), so matched stays off.
    rep = trace_zero_classify(QuadIrr(7, 386, 0, -386, -1, 6))
    assert rep.klass == "preperiod_2"
    assert rep.valuation == 1
    assert rep.expansion.status == PERIODIC
    assert len(rep.expansion.preperiod) == 2
    assert rep.a0_small is False
    assert rep.matched is False


def test_trace_zero_valuation_zero_class():
    rep = trace_zero_classify(QuadIrr(5, 126, 0, 2, 0, 1))
    assert rep.klass == "preperiod_2"
    assert rep.valuation == 0
    assert rep.template is None
    if rep.expansion.status == PERIODIC:
        assert rep.matched == (len(rep.expansion.preperiod) == 2)


def test_trace_zero_rejects_nonzero_trace():
    with pytest.raises(ValueError):
        trace_zero_classify(PERIOD12_STATE)


# -- palindromic convergent identities ------------------------------------------------


def _mirror(w, parity):
    """Palindrome of length 2t+1 (even case) or 2t+2 (odd case) from w."""
    return tuple(w) + tuple(reversed(w[:-1] if parity == "even" else w))


def test_dt_identities_hold_on_random_palindromes():
    rng = random.Random(2203)
    for _ in range(40):
        p = rng.choice([3, 5, 7])
        t = rng.randint(1, 4)
        parity = rng.choice(["even", "odd"])
        w = random_digits(rng, p, t + 1)
        cf = _mirror(w, parity)
        verdict = dt_identities(cf, t, parity)
        assert verdict.ok, (cf, parity)
        assert verdict.d == (2 * t if parity == "even" else 2 * t + 1)
        assert verdict.lhs_A == verdict.rhs_A and verdict.lhs_B == verdict.rhs_B


def test_dt_identities_input_validation():
    rng = random.Random(2204)
    w = random_digits(rng, 5, 3)
    with pytest.raises(ValueError):
        dt_identities(_mirror(w, "even"), 2, "sideways")
    with pytest.raises(ValueError):
        dt_identities(_mirror(w, "even"), 3, "even")  # wrong length for t
    crooked = _mirror(w, "odd")
    crooked = crooked[:-1] + (crooked[-1].doubled(),)
    with pytest.raises(ValueError, match="palindromic"):
        dt_identities(crooked, 2, "odd")


# -- Ruban probes ------------------------------------------------------------------


def test_ruban_probe_certifies_nonperiodicity():
    probe = ruban_nonperiodic_probe(6, 1, 5, N=200)
    assert probe.status == "nonperiodic"
    assert probe.witness_negative_embeddings is True
    assert probe.a1_tilde >= 1
    assert probe.expansion.status == OPEN


@pytest.mark.parametrize("m,k", [(6, 1), (11, 2), (14, 1), (19, 2), (21, 1)])
def test_ruban_probe_samples(m, k):
    probe = ruban_nonperiodic_probe(m, k, 5, N=120)
    assert probe.status == "nonperiodic"
    assert probe.witness_negative_embeddings


@pytest.mark.parametrize("h", [1, 2, 3])
def test_ruban_sqrt_family_is_periodic(h):
    m = 1 + 5 ** (2 * h)
    probe = ruban_nonperiodic_probe(m, -h, 5, N=60, branch=1)
    assert probe.status == PERIODIC
    exp = expand(QuadIrr(5, m, 0, 1, h, 1), RUBAN, max_steps=30)
    assert exp.text() == f"[1/{5**h}, (2/{5**h})*]"


def test_ruban_probe_input_validation():
    with pytest.raises(ValueError):
        ruban_nonperiodic_probe(6, 0, 5)
    with pytest.raises(ValueError):
        ruban_nonperiodic_probe(25, 1, 5)  # p | m
    with pytest.raises(ValueError):
        ruban_nonperiodic_probe(16, 1, 5)  # square
    with pytest.raises(ValueError):
        ruban_nonperiodic_probe(7, 1, 5)  # nonresidue mod 5


def test_report_serialization_shapes():
    probe = ruban_nonperiodic_probe(6, 1, 5, N=50)
    js = probe.to_json()
    assert js["status"] == "nonperiodic" and js["p"] == 5
    rep = trace_zero_classify(INV_5_SQRT_M434)
    assert rep.to_json()["class"] == "preperiod_1"
    trace = b_sequence_analysis(PERIOD12_STATE, 20)
    assert trace.to_json()["period_length"] == 12
