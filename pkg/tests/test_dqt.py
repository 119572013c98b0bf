import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qadic import dqt
from qadic.errors import Infeasible, PackOverflow, ParamsViolation
from qadic.params import PackingParams, dqt_params

REF = PackingParams(p=3, q=100, d=1, n_max=1)  # decimal reference radix


class TestPack:
    def test_decimal_example(self):
        assert dqt.pack([1, 1], REF).value == 101

    def test_zero_polynomial(self):
        prm = PackingParams(p=3, q=1 << 10, d=2)
        assert dqt.pack([0, 0, 0], prm).value == 0

    def test_binary_fast_path_matches_horner(self):
        prm = PackingParams(p=5, q=1 << 16, d=2, beta=53)
        w = dqt.pack([3, 2, 1], prm)
        assert w.value == 1 * 2**32 + 2 * 2**16 + 3 == 4295098371

    def test_too_many_coefficients(self):
        with pytest.raises(ParamsViolation):
            dqt.pack([1, 1, 1], REF)

    def test_unreduced_coefficient_rejected(self):
        with pytest.raises(ValueError):
            dqt.pack([100], REF)

    def test_overflow_guard(self):
        prm = PackingParams(p=3, q=1 << 20, d=2, beta=40)
        with pytest.raises(PackOverflow):
            dqt.pack([1, 1, 1], prm)

    def test_reduced_flag(self):
        prm = PackingParams(p=3, q=16, d=2)
        assert dqt.pack([2, 1, 0], prm).digits_reduced
        assert not dqt.pack([5, 1, 0], prm).digits_reduced


class TestUnpack:
    def test_decimal_example(self):
        assert dqt.unpack(10302, 3, q=100) == [2, 3, 1]

    def test_zero(self):
        assert dqt.unpack(0, 4, q=1 << 8) == [0, 0, 0, 0]

    def test_inverse_of_pack(self):
        assert dqt.unpack(4295098371, 3, q=1 << 16) == [3, 2, 1]

    def test_needs_radix_for_bare_int(self):
        with pytest.raises(ValueError):
            dqt.unpack(3, 1)

    @given(
        q=st.integers(2, 10**6),
        digits=st.lists(st.integers(0, 10**6 - 1), min_size=1, max_size=5),
    )
    def test_round_trip_any_radix(self, q, digits):
        digits = [d % q for d in digits]
        value = sum(d * q**i for i, d in enumerate(digits))
        assert dqt.unpack(value, len(digits), q=q) == digits

    @given(st.integers(1, 12), st.data())
    def test_fast_and_reference_paths_agree(self, t, data):
        q = 1 << t
        digits = data.draw(st.lists(st.integers(0, q - 1), min_size=1, max_size=4))
        value = sum(d * q**i for i, d in enumerate(digits))
        shifted = [(value >> (i * t)) & (q - 1) for i in range(len(digits))]
        assert dqt.unpack(value, len(digits), q=q) == shifted == digits


def schoolbook(v1, v2, p):
    """Big-integer polynomial dot product, reduced mod p at the end."""
    out = [0] * (2 * max(max(map(len, v1 + v2)), 1) - 1)
    for a, b in zip(v1, v2):
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % p for c in out]


class TestDotDqt:
    def test_decimal_worked_example(self):
        assert dqt.dot_dqt([[1, 1]], [[2, 1]], REF) == [2, 0, 1]

    def test_zero_vector(self):
        prm = dqt_params(5, n=3, k=2)
        assert dqt.dot_dqt([[0, 0]] * 3, [[4, 3]] * 3, prm) == [0, 0, 0]

    def test_against_schoolbook(self):
        rng = np.random.default_rng(11)
        prm = dqt_params(5, n=10, k=3)
        for _ in range(50):
            v1 = [list(rng.integers(0, 5, 3)) for _ in range(10)]
            v2 = [list(rng.integers(0, 5, 3)) for _ in range(10)]
            assert dqt.dot_dqt(v1, v2, prm) == schoolbook(v1, v2, 5)

    def test_length_guard(self):
        prm = dqt_params(5, n=2, k=2)
        with pytest.raises(ParamsViolation):
            dqt.dot_dqt([[1]] * 3, [[1]] * 3, prm)

    def test_unreduced_entry_rejected(self):
        prm = dqt_params(5, n=2, k=2)
        with pytest.raises(ValueError):
            dqt.dot_dqt([[7]], [[1]], prm)


class TestRingMorphism:
    @given(
        p=st.sampled_from([2, 3, 5, 7]),
        k=st.integers(1, 4),
        data=st.data(),
    )
    def test_product_digits_are_convolution(self, p, k, data):
        try:
            prm = dqt_params(p, n=1, k=k)
        except Infeasible:
            return
        a = data.draw(st.lists(st.integers(0, p - 1), min_size=k, max_size=k))
        b = data.draw(st.lists(st.integers(0, p - 1), min_size=k, max_size=k))
        wa, wb = dqt.pack(a, prm), dqt.pack(b, prm)
        conv = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                conv[i + j] += x * y
        assert dqt.unpack(wa.value * wb.value, 2 * k - 1, q=prm.q) == conv
