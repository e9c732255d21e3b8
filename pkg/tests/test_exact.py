from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from recipstab.errors import DivisionByZero, DomainError
from recipstab.exact import (
    as_rational,
    binomial,
    even_binomial_sum,
    hp,
    power,
    precision,
    rational_pow,
    set_precision,
    to_real,
    unify,
)


def pascal_rows(n_max):
    """Independent oracle: Pascal's triangle built by addition only."""
    rows = [[1]]
    for _ in range(n_max):
        prev = rows[-1]
        rows.append([1] + [prev[i] + prev[i + 1] for i in range(len(prev) - 1)] + [1])
    return rows


PASCAL = pascal_rows(80)


@pytest.mark.parametrize("n,k,expected", [(7, 2, 21), (5, 0, 1), (8, 4, 70)])
def test_binomial_examples(n, k, expected):
    assert binomial(n, k) == expected == PASCAL[n][k]


def test_binomial_matches_pascal_oracle():
    for n, row in enumerate(PASCAL):
        assert [binomial(n, k) for k in range(n + 1)] == row


@given(st.integers(2, 300), st.data())
def test_pascal_rule(n, data):
    k = data.draw(st.integers(1, n - 1))
    assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)


def test_binomial_rejects_k_above_n():
    with pytest.raises(DomainError):
        binomial(3, 4)
    with pytest.raises(DomainError):
        binomial(-1, 0)


@pytest.mark.parametrize("l,expected", [(1, 2), (0, 1), (7, 1094)])
def test_even_binomial_sum_examples(l, expected):
    assert even_binomial_sum(l) == expected


def test_even_binomial_sum_closed_form_oracle():
    for l in range(65):
        assert 2 * even_binomial_sum(l) == 3**l + 1


def test_even_binomial_sum_septic_terms():
    # 128 + 672 + 280 + 14, the even-k terms of 2^(7-k) C(7,k)
    assert even_binomial_sum(7) == 128 + 672 + 280 + 14


def repeated_mult(base, exp):
    acc = Fraction(1)
    factor = base if exp >= 0 else 1 / base
    for _ in range(abs(exp)):
        acc *= factor
    return acc


@pytest.mark.parametrize(
    "base,exp,expected",
    [(Fraction(2, 3), 3, Fraction(8, 27)), (Fraction(5, 7), 0, Fraction(1)), (Fraction(-1, 2), -2, Fraction(4))],
)
def test_rational_pow_examples(base, exp, expected):
    assert rational_pow(base, exp) == expected == repeated_mult(base, exp)


rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q.numerator) < 10**9)
nonzero = rationals.filter(lambda q: q != 0)


@given(nonzero, st.integers(-12, 12))
def test_rational_pow_matches_repeated_multiplication(base, exp):
    assert rational_pow(base, exp) == repeated_mult(base, exp)


def test_rational_pow_zero_negative():
    with pytest.raises(DivisionByZero):
        rational_pow(Fraction(0), -1)
    assert rational_pow(Fraction(0), 0) == 1


@given(rationals, rationals, rationals)
def test_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(rationals)
def test_canonical_form(q):
    r = as_rational(f"{q.numerator * 6}/{q.denominator * 6}")
    assert r == q
    assert r.denominator > 0
    from math import gcd

    assert gcd(abs(r.numerator), r.denominator) == 1


def test_as_rational_reads_decimals_literally():
    assert as_rational(0.01) == Fraction(1, 100)
    assert as_rational("-3/6") == Fraction(-1, 2)
    assert as_rational(7) == 7


def test_power_channels():
    assert power(Fraction(4), 2) == 16 and isinstance(power(Fraction(4), 2), Fraction)
    assert power(Fraction(4), Fraction(1, 2)) == 2
    assert isinstance(power(Fraction(2), Fraction(1, 2)), type(hp.mpf(1)))


def test_unify_promotes_to_real():
    a, b = unify(Fraction(1, 3), hp.mpf(2))
    assert isinstance(a, type(hp.mpf(1))) and a == to_real(Fraction(1, 3))
    assert unify(Fraction(1), 2) == (Fraction(1), Fraction(2))


def test_precision_control():
    before = hp.prec
    with precision(256):
        assert hp.prec == 256
    assert hp.prec == before
    with pytest.raises(DomainError):
        set_precision(32)
