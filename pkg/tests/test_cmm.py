import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qadic import cmm
from qadic.errors import DimensionMismatch, ParamsViolation
from qadic.params import PackingParams, cmm_params, full_cmm_params


def oracle_matmul(a, b, p):
    return (a.astype(object) @ b.astype(object) % p).astype(np.int64)


class TestCompression:
    def test_reversed_row_layout(self):
        prm = cmm_params(11, 2, strict=True)
        q = prm.q
        a = np.array([[1, 2], [3, 4]])
        ca = cmm.compress_rows(a, prm, cmm.REVERSED)
        assert ca.words.ravel().tolist() == [q * 1 + 2, q * 3 + 4]

    def test_single_entry(self):
        prm = cmm_params(5, 2, strict=True)
        ca = cmm.compress_rows(np.array([[3]]), prm)
        assert ca.words.shape == (1, 1) and ca.words[0, 0] == 3
        assert np.array_equal(cmm.uncompress(ca), [[3]])

    def test_partial_group_padding(self):
        prm = cmm_params(3, 5, strict=True)
        m = np.arange(15).reshape(3, 5) % 3
        ca = cmm.compress_rows(m, prm)
        assert ca.words.shape == (3, -(-5 // prm.k))
        assert np.array_equal(cmm.uncompress(ca), m)

    @given(st.data())
    @settings(max_examples=60)
    def test_round_trips(self, data):
        p = data.draw(st.sampled_from([2, 3, 5, 7]))
        rows = data.draw(st.integers(1, 12))
        cols = data.draw(st.integers(1, 12))
        seed = data.draw(st.integers(0, 2**31))
        rng = np.random.default_rng(seed)
        m = rng.integers(0, p, (rows, cols), dtype=np.int64)
        prm = cmm_params(p, max(2, cols), strict=True)
        prm2 = cmm_params(p, max(2, rows), strict=True)
        for builder, order, par in (
            (cmm.compress_rows, cmm.FORWARD, prm),
            (cmm.compress_rows, cmm.REVERSED, prm),
            (cmm.compress_cols, cmm.FORWARD, prm2),
            (cmm.compress_cols, cmm.REVERSED, prm2),
        ):
            assert np.array_equal(cmm.uncompress(builder(m, par, order)), m)

    def test_entries_must_be_reduced(self):
        prm = cmm_params(5, 2, strict=True)
        with pytest.raises(ValueError):
            cmm.compress_rows(np.array([[7]]), prm)


class TestMiddleProduct:
    def test_two_by_two(self):
        prm = cmm_params(11, 2, strict=True)
        a = np.array([[1, 2], [3, 4]])
        b = np.array([[5, 6], [7, 8]])
        c = cmm.cmm_multiply(
            cmm.compress_rows(a, prm, cmm.REVERSED),
            cmm.compress_cols(b, prm, cmm.FORWARD),
        )
        assert c.tolist() == [[8, 0], [10, 6]]  # [[19,22],[43,50]] mod 11

    def test_identity(self):
        prm = cmm_params(7, 8, strict=True)
        rng = np.random.default_rng(0)
        a = rng.integers(0, 7, (8, 8), dtype=np.int64)
        eye = np.eye(8, dtype=np.int64)
        c = cmm.cmm_multiply(
            cmm.compress_rows(eye, prm, cmm.REVERSED),
            cmm.compress_cols(a, prm, cmm.FORWARD),
        )
        assert np.array_equal(c, a)

    def test_random_against_plain(self, backend):
        rng = np.random.default_rng(1)
        prm = cmm_params(3, 100, strict=True)
        a = rng.integers(0, 3, (100, 100), dtype=np.int64)
        b = rng.integers(0, 3, (100, 100), dtype=np.int64)
        c = cmm.cmm_multiply(
            cmm.compress_rows(a, prm, cmm.REVERSED),
            cmm.compress_cols(b, prm, cmm.FORWARD),
        )
        assert np.array_equal(c, cmm.modmatmul(a, b, 3))

    def test_digit_order_enforced(self):
        prm = cmm_params(3, 4, strict=True)
        a = np.zeros((2, 4), dtype=np.int64)
        b = np.zeros((4, 2), dtype=np.int64)
        with pytest.raises(ParamsViolation):
            cmm.cmm_multiply(
                cmm.compress_rows(a, prm, cmm.FORWARD),
                cmm.compress_cols(b, prm, cmm.FORWARD),
            )

    def test_boundary_radix_refused(self):
        prm = cmm_params(2, 2)  # inclusive threshold: capacity full
        a = np.ones((2, 2), dtype=np.int64)
        with pytest.raises(ParamsViolation):
            cmm.cmm_multiply(
                cmm.compress_rows(a, prm, cmm.REVERSED),
                cmm.compress_cols(a, prm, cmm.FORWARD),
            )


class TestExtractMiddle:
    def test_constructed_word(self):
        prm = cmm_params(3, 16, strict=True)
        t, d = prm.t, prm.d
        word = (35 << (d * t)) + 123  # high coefficient 35, 35 mod 3 = 2
        assert cmm.extract_middle(word, prm) == 2
        assert cmm.extract_middle(word, prm, "add_shift") == 2

    def test_zero(self):
        prm = cmm_params(3, 16, strict=True)
        assert cmm.extract_middle(0, prm) == 0

    def test_modes_agree_on_random_words(self):
        import random

        prm = cmm_params(5, 8, strict=True)
        t, d = prm.t, prm.d
        rnd = random.Random(2)
        for _ in range(300):
            word = rnd.getrandbits(t * (2 * d + 1))
            a = cmm.extract_middle(word, prm)
            b = cmm.extract_middle(word, prm, "add_shift")
            assert a == b == ((word >> (d * t)) & (prm.q - 1)) % 5

    def test_float_accumulator(self):
        prm = cmm_params(3, 4, strict=True)
        t, d = prm.t, prm.d
        word = (7 << (d * t)) + 3
        assert cmm.extract_middle(float(word), prm) == 7 % 3
        assert cmm.extract_middle(float(word), prm, "add_shift") == 7 % 3


class TestOneSided:
    def test_digitwise_two_by_two(self):
        # packed product words carry (ae+bg) + Q(af+bh) before reduction
        p = 7
        prm = cmm_params(p, 2, strict=True)
        a, b, c, d = 1, 2, 3, 4
        e, f, g, h = 5, 6, 1, 2
        left = np.array([[a, b], [c, d]])
        right = np.array([[e, f], [g, h]])
        packed = cmm.right_cmm(
            left, cmm.compress_rows(right, prm, cmm.FORWARD), keep_packed=True
        )
        q = prm.q
        w0, w1 = int(packed.words[0, 0]), int(packed.words[1, 0])
        assert w0 == (a * e + b * g) % p + q * ((a * f + b * h) % p)
        assert w1 == (c * e + d * g) % p + q * ((c * f + d * h) % p)

    def test_right_identity(self):
        prm = cmm_params(5, 6, strict=True)
        rng = np.random.default_rng(3)
        a = rng.integers(0, 5, (6, 6), dtype=np.int64)
        eye = np.eye(6, dtype=np.int64)
        assert np.array_equal(
            cmm.right_cmm(a, cmm.compress_rows(eye, prm, cmm.FORWARD)), a
        )

    def test_right_against_plain(self, backend):
        rng = np.random.default_rng(4)
        prm = cmm_params(3, 250, strict=True)
        a = rng.integers(0, 3, (250, 250), dtype=np.int64)
        b = rng.integers(0, 3, (250, 250), dtype=np.int64)
        got = cmm.right_cmm(a, cmm.compress_rows(b, prm, cmm.FORWARD))
        assert np.array_equal(got, cmm.modmatmul(a, b, 3))

    def test_left_against_plain(self, backend):
        rng = np.random.default_rng(5)
        prm = cmm_params(5, 60, strict=True)
        a = rng.integers(0, 5, (60, 60), dtype=np.int64)
        b = rng.integers(0, 5, (60, 60), dtype=np.int64)
        got = cmm.left_cmm(cmm.compress_cols(a, prm, cmm.FORWARD), b)
        assert np.array_equal(got, cmm.modmatmul(a, b, 5))

    def test_packed_output_chains(self):
        rng = np.random.default_rng(6)
        p = 3
        prm = cmm_params(p, 30, strict=True)
        a = rng.integers(0, p, (30, 30), dtype=np.int64)
        b = rng.integers(0, p, (30, 30), dtype=np.int64)
        c = rng.integers(0, p, (30, 30), dtype=np.int64)
        bc = cmm.right_cmm(b, cmm.compress_rows(c, prm, cmm.FORWARD), keep_packed=True)
        abc = cmm.right_cmm(a, bc)
        expect = cmm.modmatmul(a, cmm.modmatmul(b, c, p), p)
        assert np.array_equal(abc, expect)

    def test_ragged_shapes(self, backend):
        rng = np.random.default_rng(7)
        for m, k, n in ((1, 5, 9), (13, 1, 3), (4, 31, 2)):
            for p in (2, 3, 7):
                a = rng.integers(0, p, (m, k), dtype=np.int64)
                b = rng.integers(0, p, (k, n), dtype=np.int64)
                prm = cmm_params(p, k, strict=True)
                ref = oracle_matmul(a, b, p)
                assert np.array_equal(
                    cmm.right_cmm(a, cmm.compress_rows(b, prm, cmm.FORWARD)), ref
                )
                assert np.array_equal(
                    cmm.left_cmm(cmm.compress_cols(a, prm, cmm.FORWARD), b), ref
                )


class TestFullCompression:
    def test_tile_layout_two_by_two(self):
        p = 7
        fp = full_cmm_params(p, 2, strict=True)
        a = np.array([[1, 2], [3, 4]])
        b = np.array([[5, 6], [1, 2]])
        assert np.array_equal(cmm.full_cmm(a, b, fp), oracle_matmul(a, b, p))

    def test_scalar_case(self):
        fp = full_cmm_params(5, 1, strict=True)
        assert cmm.full_cmm(
            np.array([[4]]), np.array([[4]]), fp
        ).tolist() == [[16 % 5]]

    def test_random_against_plain(self, backend):
        rng = np.random.default_rng(8)
        fp = full_cmm_params(3, 32, strict=True)
        a = rng.integers(0, 3, (32, 32), dtype=np.int64)
        b = rng.integers(0, 3, (32, 32), dtype=np.int64)
        assert np.array_equal(cmm.full_cmm(a, b, fp), cmm.modmatmul(a, b, 3))

    def test_ragged_tiles(self):
        rng = np.random.default_rng(9)
        fp = full_cmm_params(3, 15, strict=True)
        a = rng.integers(0, 3, (7, 15), dtype=np.int64)
        b = rng.integers(0, 3, (15, 5), dtype=np.int64)
        assert np.array_equal(cmm.full_cmm(a, b, fp), oracle_matmul(a, b, 3))


class TestBounds:
    def test_delayed_sum_guard(self):
        prm = PackingParams(p=3, q=1 << 5, d=3, beta=20)
        a = np.ones((4, 8), dtype=np.int64)
        b = np.ones((8, 4), dtype=np.int64)
        with pytest.raises(ParamsViolation):
            cmm.right_cmm(a, cmm.compress_rows(b, prm, cmm.FORWARD))

    def test_strict_params_run_at_thresholds(self):
        rng = np.random.default_rng(10)
        for p, k in ((2, 2), (2, 4), (3, 4), (5, 4)):
            a = rng.integers(0, p, (k, k), dtype=np.int64)
            b = rng.integers(0, p, (k, k), dtype=np.int64)
            prm = cmm_params(p, k, strict=True)
            got = cmm.right_cmm(a, cmm.compress_rows(b, prm, cmm.FORWARD))
            assert np.array_equal(got, oracle_matmul(a, b, p))

    def test_worst_case_inputs_at_strict_params(self):
        # all-maximal operands attain the bound k*(p-1)^2; strict radix holds it
        for p, k in ((2, 2), (3, 4), (5, 1)):
            a = np.full((k, k), p - 1, dtype=np.int64)
            prm = cmm_params(p, k, strict=True)
            got = cmm.right_cmm(a, cmm.compress_rows(a, prm, cmm.FORWARD))
            assert np.array_equal(got, oracle_matmul(a, a, p))


class TestMatrixFiles:
    def test_round_trip_bit_exact(self):
        rng = np.random.default_rng(11)
        m = rng.integers(0, 7, (5, 9), dtype=np.int64)
        buf = io.StringIO()
        cmm.write_matrix(buf, m, 7)
        text = buf.getvalue()
        p, m2 = cmm.read_matrix(io.StringIO(text))
        assert p == 7 and np.array_equal(m, m2)
        buf2 = io.StringIO()
        cmm.write_matrix(buf2, m2, p)
        assert buf2.getvalue() == text

    def test_header_validation(self):
        with pytest.raises(ValueError):
            cmm.read_matrix(io.StringIO("3 2\n1 2\n"))
