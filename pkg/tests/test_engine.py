import random
from fractions import Fraction

import pytest

from padiccf import (
    QuadIrr,
    convergents,
    eval_finite,
    expand,
    expand_rational,
    normalize,
    periodic_limit,
    step,
    valuation_audit,
)
from padiccf.core import INF, LaurentInt
from padiccf.corpus import random_digits, random_periodic, random_quad, random_rational
from padiccf.engine import (
    BROWKIN,
    FINITE,
    OPEN,
    PERIODIC,
    RUBAN,
    parse_expansion_text,
    parse_quotient_list,
    quad_distance_valuation,
)

from oracles import (
    convergents_brute,
    eval_cf_brute,
    rational_expand_brute,
    surd_expand_brute,
    surd_valuation_brute,
)

# The classical period-12 value over p=5 and its complete digit list.
PERIOD12_STATE = QuadIrr(5, 19, -13, 6, 1, 2)
PERIOD12 = [
    "4/5", "-11/5", "-3/5", "-4/25", "274/125", "-4/25",
    "-3/5", "-11/5", "4/5", "1/5", "24/25", "1/5",
]

# First 14 digits of (8+sqrt(89))/5 over p=5, which never closes up.
SQRT89_STATE = QuadIrr(5, 89, 8, 1, 1, 3)
SQRT89_PREFIX = [
    "-9/5", "-2/5", "-59/25", "2/5", "-9/5", "23/25", "3/5",
    "1/5", "51/25", "8/5", "2/5", "-7/5", "-12/5", "6/5",
]


def _pair(alpha: QuadIrr):
    """(u, v) with alpha = u + v*sqrt(Delta), for feeding the oracle."""
    den = Fraction(alpha.p) ** alpha.k * alpha.c
    return Fraction(alpha.b) / den, 1 / den


# -- pinned expansions ---------------------------------------------------------


def test_period12_example():
    exp = expand(PERIOD12_STATE)
    assert exp.status == PERIODIC
    assert exp.preperiod == ()
    assert [str(q) for q in exp.period] == PERIOD12
    assert exp.text() == "[(" + ", ".join(PERIOD12) + ")*]"


def test_sqrt37_purely_periodic():
    alpha = normalize(3, 37, 1, 6, 0, 1)
    assert alpha == QuadIrr(3, 37, 1, 2, 1, 1)
    exp = expand(alpha)
    assert exp.is_purely_periodic
    assert exp.text() == "[(1/3)*]"


def test_sqrt89_stays_open():
    exp = expand(SQRT89_STATE, max_steps=14)
    assert exp.status == OPEN
    assert [str(q) for q in exp.preperiod] == SQRT89_PREFIX
    longer = expand(SQRT89_STATE, max_steps=500)
    assert longer.status == OPEN
    assert [str(q) for q in longer.preperiod[:14]] == SQRT89_PREFIX


def test_ruban_of_minus_one_cycles():
    exp = expand_rational(Fraction(-1), 5, RUBAN)
    assert exp.status == PERIODIC
    assert exp.text() == "[4, (24/5)*]"


def test_browkin_rational_terminates():
    exp = expand_rational(Fraction(10, 3), 3)
    assert exp.status == FINITE
    assert exp.text() == "[1/3, 1/3]"
    assert eval_finite(exp.preperiod) == Fraction(10, 3)


# -- cross-check against the rational-pair oracle -------------------------------


@pytest.mark.parametrize(
    "alpha",
    [
        PERIOD12_STATE,
        SQRT89_STATE,
        QuadIrr(3, 37, 1, 2, 1, 1),
        QuadIrr(5, -434, 0, -434, 1, 1),
        QuadIrr(7, 386, 0, -386, -1, 6),
        QuadIrr(5, 126, 0, 2, 0, 1),
    ],
)
@pytest.mark.parametrize("flavor", [BROWKIN, RUBAN])
def test_expansion_matches_oracle(alpha, flavor):
    n = 25
    u, v = _pair(alpha)
    want = surd_expand_brute(u, v, alpha.Delta, alpha.branch, alpha.p, flavor, n)
    exp = expand(alpha, flavor, max_steps=n + 5)
    got = [exp.quotient_at(i).value for i in range(n)]
    assert got == want


def test_random_states_match_oracle():
    rng = random.Random(1105)
    for _ in range(40):
        p = rng.choice([3, 5, 7])
        alpha = random_quad(rng, p)
        flavor = rng.choice([BROWKIN, RUBAN])
        u, v = _pair(alpha)
        want = surd_expand_brute(u, v, alpha.Delta, alpha.branch, p, flavor, 12)
        exp = expand(alpha, flavor, max_steps=20)
        got = [exp.quotient_at(i).value for i in range(12)]
        assert got == want, (alpha, flavor)


def test_rational_expansions_match_oracle():
    rng = random.Random(1106)
    for _ in range(60):
        p = rng.choice([3, 5, 7])
        x = random_rational(rng, p)
        digs, terminated = rational_expand_brute(x, p, BROWKIN, 400)
        assert terminated
        exp = expand_rational(x, p)
        assert exp.status == FINITE
        assert [q.value for q in exp.preperiod] == digs


def test_valuation_matches_oracle():
    rng = random.Random(1107)
    for _ in range(60):
        p = rng.choice([3, 5, 7])
        alpha = random_quad(rng, p)
        u, v = _pair(alpha)
        assert alpha.valuation == surd_valuation_brute(u, v, alpha.Delta, alpha.branch, p)


# -- single-step contract --------------------------------------------------------


def test_step_emits_digit_and_reciprocal_remainder():
    rng = random.Random(1108)
    for _ in range(30):
        p = rng.choice([3, 5, 7])
        alpha = random_quad(rng, p)
        for flavor in (BROWKIN, RUBAN):
            a, nxt = step(alpha, flavor)
            if flavor == BROWKIN:
                assert a.in_browkin_range()
            else:
                assert a.in_ruban_range()
            # alpha - a = 1/next, so the distance valuation is -v(next)
            assert quad_distance_valuation(alpha, a.value) == -nxt.valuation
            assert nxt.valuation < 0


def test_digit_windows_along_expansion():
    exp = expand(SQRT89_STATE, max_steps=60)
    for i in range(1, 50):
        q = exp.quotient_at(i)
        assert q.e >= 1
        assert q.in_browkin_range()
        assert exp.k_at(i) == q.e


# -- convergents and finite evaluation ---------------------------------------


def test_convergents_match_plain_recurrences():
    rng = random.Random(1109)
    for _ in range(30):
        p = rng.choice([3, 5, 7])
        digs = random_digits(rng, p, rng.randint(2, 8))
        tab = convergents(digs)
        A, B = convergents_brute([d.value for d in digs])
        for n in range(-1, len(digs)):
            assert tab.A_(n) == A[n + 1]
            assert tab.B_(n) == B[n + 1]
            if n >= 0:  # the n = -1 tilde seeds are the bare 1 and 0
                assert tab.Atilde_(n) == int(tab.A_(n) * Fraction(p) ** tab.Kprime(n))
                assert tab.Btilde_(n) == int(tab.B_(n) * Fraction(p) ** tab.K(n))


def test_determinant_identity():
    rng = random.Random(1110)
    for _ in range(30):
        p = rng.choice([3, 5, 7])
        digs = random_digits(rng, p, rng.randint(2, 7))
        tab = convergents(digs)
        for n in range(len(digs)):
            lhs = tab.A_(n) * tab.B_(n - 1) - tab.A_(n - 1) * tab.B_(n)
            assert lhs == (-1) ** (n + 1)
            if n >= 1:
                tilde = tab.Atilde_(n) * tab.Btilde_(n - 1) - tab.Atilde_(n - 1) * tab.Btilde_(n)
                assert tilde == (-1) ** (n + 1) * p ** (tab.K(n) + tab.Kprime(n - 1))


def test_eval_finite_is_back_substitution():
    rng = random.Random(1111)
    for _ in range(40):
        p = rng.choice([3, 5, 7])
        digs = random_digits(rng, p, rng.randint(1, 7))
        assert eval_finite(digs) == eval_cf_brute([d.value for d in digs])


def test_valuation_audit_on_pinned_states():
    for alpha in (PERIOD12_STATE, SQRT89_STATE):
        exp = expand(alpha, max_steps=40)
        audit = valuation_audit(exp)
        assert audit.ok, audit.failures
        assert audit.n_checked > 0


# -- periodic reconstruction ---------------------------------------------------


def test_periodic_limit_recovers_pinned_values():
    alpha = periodic_limit((), parse_quotient_list("1/3", 3), 3)
    assert alpha.value_equals(QuadIrr(3, 37, 1, 2, 1, 1))
    exp = expand(PERIOD12_STATE)
    back = periodic_limit(exp.preperiod, exp.period, 5)
    assert back.value_equals(PERIOD12_STATE)


def test_periodic_limit_round_trips_random_periodic_values():
    rng = random.Random(1112)
    for _ in range(25):
        p = rng.choice([3, 5, 7])
        alpha = random_periodic(rng, p)
        exp = expand(alpha)
        assert exp.status == PERIODIC
        back = periodic_limit(exp.preperiod, exp.period, p)
        assert back.value_equals(alpha)


def test_periodic_limit_rejects_degenerate_input():
    with pytest.raises(ValueError):
        periodic_limit((), (), 5)
    # [4, (24/5)*] sums to the rational -1, not a quadratic irrational
    pre = parse_quotient_list("4", 5)
    per = parse_quotient_list("24/5", 5)
    with pytest.raises(ValueError, match="rational"):
        periodic_limit(pre, per, 5, RUBAN)


# -- normalization ----------------------------------------------------------------


def test_normalize_pinned_shapes():
    assert normalize(3, 37, 1, 6, 0, 1) == QuadIrr(3, 37, 1, 2, 1, 1)
    # square p-power inside Delta moves into k: 5*sqrt(19) = sqrt(475)
    assert normalize(5, 475, 0, 1, 0, 2) == QuadIrr(5, 19, 0, 1, -1, 2)
    # c not dividing Delta - b**2 forces the (b c, c^2 Delta, c^2) rescale
    got = normalize(5, 21, 1, 4, 0, 1)
    assert got.c != 0 and (got.Delta - got.b**2) % got.c == 0


def test_normalize_rejects_values_outside_qp():
    with pytest.raises(ValueError):
        normalize(5, 10, 0, 1, 0, 1)  # odd p-valuation in Delta
    with pytest.raises(ValueError):
        normalize(5, 2, 0, 1, 0, 1)  # nonresidue unit part
    with pytest.raises(ValueError):
        normalize(5, 16, 1, 1, 0, 1)  # square Delta
    with pytest.raises(ValueError):
        normalize(5, 475, 1, 1, 0, 2)  # unit b against p-divisible sqrt


def test_normalize_preserves_value():
    rng = random.Random(1113)
    done = 0
    while done < 40:
        p = rng.choice([3, 5, 7])
        raw = random_quad(rng, p)
        c = rng.choice([1, -1, 2, 3, 7, 12]) * raw.c
        k = raw.k + rng.randint(-1, 1)
        if c % p == 0:
            continue
        alpha = normalize(p, raw.Delta, raw.b, c, k, raw.branch)
        assert (alpha.Delta - alpha.b**2) % alpha.c == 0
        assert alpha.Delta % p != 0 and alpha.c % p != 0
        u, v = Fraction(raw.b), Fraction(1)
        den = Fraction(p) ** k * c
        want = surd_expand_brute(u / den, v / den, raw.Delta, raw.branch, p, BROWKIN, 8)
        exp = expand(alpha, max_steps=12)
        assert [exp.quotient_at(i).value for i in range(8)] == want
        done += 1


# -- text round trips -------------------------------------------------------------


def test_expansion_text_round_trips():
    cases = [
        expand(PERIOD12_STATE),
        expand(SQRT89_STATE, max_steps=14),
        expand_rational(Fraction(10, 3), 3),
        expand_rational(Fraction(-1), 5, RUBAN),
    ]
    for exp in cases:
        pre, per, status = parse_expansion_text(exp.text(), exp.p)
        assert (pre, per, status) == (exp.preperiod, exp.period, exp.status)


def test_quotient_list_parsing_errors():
    with pytest.raises(ValueError):
        parse_quotient_list("", 5)
    with pytest.raises(ValueError):
        parse_quotient_list("1/6", 5)
    with pytest.raises(ValueError):
        parse_expansion_text("1/5, 2/5", 5)


# -- approximation digits -----------------------------------------------------------


def test_approx_digits_defines_the_value():
    rng = random.Random(1114)
    for _ in range(25):
        p = rng.choice([3, 5, 7])
        alpha = random_quad(rng, p)
        e, unit = alpha.approx_digits(6)
        assert e == alpha.valuation
        assert unit % p != 0
        r = Fraction(unit) * Fraction(p) ** e
        assert quad_distance_valuation(alpha, r) >= e + 6


def test_state_accessors_are_consistent():
    exp = expand(PERIOD12_STATE)
    for i in range(30):
        st = exp.state_at(i)
        assert -st.valuation == exp.k_at(i)
        a, nxt = step(st, BROWKIN)
        assert a == exp.quotient_at(i)
        assert nxt.value_equals(exp.state_at(i + 1))
