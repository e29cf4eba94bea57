import cmath
import math
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from qtrace.scalar import Scalar

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def scalars(draw):
    terms = {}
    for p in draw(st.lists(st.integers(min_value=0, max_value=4), max_size=3)):
        terms[p] = (draw(fractions), draw(fractions))
    return Scalar(terms)


def close(a, b, rel=1e-12):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


@given(scalars(), scalars(), scalars())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(scalars(), scalars())
def test_embedding_is_a_homomorphism(a, b):
    assert close(complex(a + b), complex(a) + complex(b))
    assert close(complex(a * b), complex(a) * complex(b))


def test_two_pi_i_powers():
    for n in range(6):
        assert close(complex(Scalar.two_pi_i_power(n)), (2j * math.pi) ** n)
    assert Scalar.two_pi_i_power(2) == Scalar.rational(-4, 0, 2)


def test_zero_is_canonical():
    s = Scalar.rational(1, 0, 3) - Scalar.rational(1, 0, 3)
    assert s.is_zero() and s == Scalar() and not s


def test_json_roundtrip():
    s = Scalar({0: (Fraction(1, 3), 0), 4: (0, Fraction(-2, 5))})
    assert Scalar.from_json(s.to_json()) == s
