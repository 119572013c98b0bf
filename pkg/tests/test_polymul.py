import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qadic import polymul
from qadic.errors import ParamsViolation
from qadic.params import PackingParams, fqt_params, polymul_cost
from qadic.polymul import ModPoly, PolymulStats


def schoolbook(a: ModPoly, b: ModPoly) -> list:
    """Big-integer convolution then mod, independent of the library kernels."""
    if len(a) == 0 or len(b) == 0:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a.coeffs.tolist()):
        for j, y in enumerate(b.coeffs.tolist()):
            out[i + j] += x * y
    return [c % a.p for c in out]


class TestDelayed:
    def test_worked_example(self):
        a = ModPoly.from_list([1, 1], 3)
        b = ModPoly.from_list([2, 1], 3)
        assert polymul.polymul_delayed(a, b).coeffs.tolist() == [2, 0, 1]

    def test_multiplicative_identity(self):
        rng = np.random.default_rng(0)
        a = ModPoly.random(20, 7, rng)
        one = ModPoly.from_list([1], 7)
        assert polymul.polymul_delayed(a, one).same_poly(a)

    def test_degree_500_matches_schoolbook(self):
        rng = np.random.default_rng(1)
        a = ModPoly.random(500, 3, rng)
        b = ModPoly.random(500, 3, rng)
        got = polymul.polymul_delayed(a, b)
        assert got.coeffs.tolist() == schoolbook(a, b)

    def test_empty_operand(self):
        a = ModPoly(np.zeros(0, dtype=np.int64), 5)
        b = ModPoly.from_list([1, 2], 5)
        assert len(polymul.polymul_delayed(a, b)) == 0


class TestPackedRepresentation:
    def test_grouping_and_padding(self):
        prm = fqt_params(5, 2)
        poly = ModPoly.from_list([1, 2, 3, 4, 0, 1, 2], 5)
        fq = polymul.fqt_pack_poly(poly, prm)
        assert fq.words.size == 3 and fq.logical_len == 7
        t = prm.t
        assert fq.words[0] == 1 + (2 << t) + (3 << (2 * t))
        assert fq.words[2] == 2  # zero-padded tail
        assert polymul.fqt_unpack_poly(fq).same_poly(poly)

    def test_empty_polynomial(self):
        prm = fqt_params(5, 2)
        fq = polymul.fqt_pack_poly(ModPoly(np.zeros(0, dtype=np.int64), 5), prm)
        assert fq.words.size == 0
        assert len(polymul.fqt_unpack_poly(fq)) == 0

    @given(st.data())
    @settings(max_examples=60)
    def test_round_trip(self, data):
        p = data.draw(st.sampled_from([2, 3, 5, 7, 11]))
        d = data.draw(st.sampled_from([1, 2, 3]))
        try:
            prm = fqt_params(p, d)
        except Exception:
            return
        coeffs = data.draw(st.lists(st.integers(0, p - 1), max_size=40))
        poly = ModPoly.from_list(coeffs, p)
        assert polymul.fqt_unpack_poly(polymul.fqt_pack_poly(poly, prm)).same_poly(poly)

    def test_unreduced_input_rejected(self):
        prm = fqt_params(5, 2)
        with pytest.raises(ValueError):
            polymul.fqt_pack_poly(ModPoly.from_list([1234, 5678], 5), prm)


PARAMS_GRID = [(2, 3), (2, 6), (3, 1), (3, 3), (5, 2), (5, 3), (7, 2), (11, 2)]


class TestPackedMultiplication:
    def test_worked_example(self):
        prm = fqt_params(3, 1)
        a = ModPoly.from_list([1, 1], 3)
        b = ModPoly.from_list([2, 1], 3)
        assert polymul.polymul_fqt(a, b, prm).coeffs.tolist() == [2, 0, 1]

    def test_zero_operand(self):
        prm = fqt_params(3, 2)
        z = ModPoly.from_list([0, 0, 0], 3)
        b = ModPoly.from_list([1, 2, 1, 2], 3)
        out = polymul.polymul_fqt(z, b, prm)
        assert out.coeffs.tolist() == [0] * 7  # 2*max(len)-1, untrimmed

    def test_output_length_contract(self):
        prm = fqt_params(3, 1)
        a = ModPoly.from_list([1], 3)
        b = ModPoly.from_list([0, 0, 2], 3)
        assert len(polymul.polymul_fqt(a, b, prm)) == 5

    @pytest.mark.parametrize("p,d", PARAMS_GRID)
    def test_oracle_equivalence(self, p, d, backend):
        prm = fqt_params(p, d)
        rng = np.random.default_rng(p * 100 + d)
        for _ in range(4):
            a = ModPoly.random(int(rng.integers(0, 320)), p, rng)
            b = ModPoly.random(int(rng.integers(0, 320)), p, rng)
            ref = polymul.polymul_delayed(a, b)
            classical = polymul.polymul_fqt(a, b, prm, "classical", validate=True)
            kara = polymul.polymul_fqt(a, b, prm, "karatsuba", threshold=4, validate=True)
            assert classical.same_poly(ref)
            assert kara.same_poly(ref)

    def test_chunked_accumulation_regime(self):
        # small radix forces several reductions per output word
        prm = fqt_params(5, 3)
        assert prm.n_max <= 4
        rng = np.random.default_rng(3)
        a = ModPoly.random(200, 5, rng)
        b = ModPoly.random(180, 5, rng)
        got = polymul.polymul_fqt(a, b, prm, validate=True)
        assert got.coeffs[: 200 + 180 + 1].tolist() == schoolbook(a, b)

    def test_karatsuba_threshold_switch(self):
        prm = fqt_params(3, 1)
        rng = np.random.default_rng(4)
        a = ModPoly.random(400, 3, rng)
        b = ModPoly.random(400, 3, rng)
        for threshold in (2, 8, 64, 10_000):
            assert polymul.polymul_fqt(a, b, prm, "karatsuba", threshold=threshold).same_poly(
                polymul.polymul_delayed(a, b)
            )

    def test_rejects_oversized_digits(self):
        bad = PackingParams(p=3, q=1 << 13, d=3, beta=53)  # (2d+1)t > beta
        a = ModPoly.from_list([1, 2], 3)
        with pytest.raises(ParamsViolation):
            polymul.polymul_fqt(a, a, bad)

    def test_modulus_mismatch(self):
        prm = fqt_params(3, 1)
        with pytest.raises(ValueError):
            polymul.polymul_fqt(
                ModPoly.from_list([1], 3), ModPoly.from_list([1], 5), prm
            )


class TestInstrumentation:
    def test_single_pass_reduction_count_matches_model(self):
        # sizes chosen so no intermediate folding happens: the runtime then
        # performs exactly one reduction per output word, the model's count
        p, d, deg = 3, 1, 15
        prm = fqt_params(p, d)
        model = polymul_cost(p, deg, d=d, strategy="fqt")
        assert model.reduction_count == 2 * ((deg + 1) // (d + 1)) - 1
        stats = PolymulStats()
        rng = np.random.default_rng(8)
        polymul.polymul_fqt(
            ModPoly.random(deg, p, rng), ModPoly.random(deg, p, rng), prm,
            stats=stats,
        )
        assert stats.reductions == model.reduction_count

    def test_word_products_within_model_accounting(self):
        # the model books (output length)**2 = (2Dq+1)**2 multiply-adds; a
        # schoolbook word convolution performs (Dq+1)**2, a quarter of it
        p, d, deg = 3, 3, 499
        prm = fqt_params(p, d)
        model = polymul_cost(p, deg, d=d, strategy="fqt")
        stats = PolymulStats()
        rng = np.random.default_rng(9)
        polymul.polymul_fqt(
            ModPoly.random(deg, p, rng), ModPoly.random(deg, p, rng), prm,
            stats=stats,
        )
        assert stats.word_muls <= model.mul_add_count <= 4 * stats.word_muls
        assert stats.reductions <= model.reduction_count
