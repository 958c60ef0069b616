"""波動関数モジュールのテスト"""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from src.business_layer.model import ModelParams, QuantumState, SymmetryLimit, derived_params, solve_energies
from src.business_layer.wavefn import (
    ClosedFormStatus,
    DegenerateDenominatorError,
    ExponentDomainError,
    Exponents,
    NormalizationError,
    NormFormula,
    NormMethod,
    Normalization,
    WavefunctionError,
    component_r,
    component_z,
    component_z_hypergeometric,
    exponents,
    norm_closed_form,
    norm_quadrature,
    norm_r_measure,
    overlap_integral,
    partner_component,
    sample_radial,
)

PSPIN_TABLE1 = ModelParams(M=1.0, V1=-0.002, V2=0.003, alpha=0.01, A=0.0, limit=SymmetryLimit.PSPIN, C=-5.0)
SPIN_TABLE3 = ModelParams(M=1.0, V1=0.002, V2=-0.003, alpha=0.01, A=0.0, limit=SymmetryLimit.SPIN, C=5.0)


class TestExponentsAndComponents:
    """指数と支配成分のテスト"""

    def test_指数はp_qからJacobi指数を導く(self):
        """正常系: u = 2p - ½, v = 2q - ½"""
        state = QuantumState(1, -1, SymmetryLimit.PSPIN)
        E = solve_energies(PSPIN_TABLE1, state).energies[0]
        exps = exponents(PSPIN_TABLE1, E, state.kappa)
        assert exps.u == pytest.approx(2.0 * exps.p - 0.5)
        assert exps.v == pytest.approx(2.0 * exps.q - 0.5)
        # 根では β² + 4α²(n+p+q)² = 0
        derived = derived_params(PSPIN_TABLE1, E, state.kappa)
        bracket = state.n + exps.p + exps.q
        assert 4.0 * PSPIN_TABLE1.alpha ** 2 * bracket ** 2 == pytest.approx(-derived.beta_sq, rel=1e-8)

    def test_有効域外のエネルギーではExponentDomainError(self):
        """異常系: 根号の中身が負"""
        with pytest.raises(ExponentDomainError):
            exponents(PSPIN_TABLE1, -0.99651749280, -1)

    def test_超幾何形式はJacobi形式のn階乗倍(self):
        """正常系: Γ前因子付き₂F₁ = n! × Jacobi形式"""
        exps = Exponents.from_pq(1.1, 0.7)
        for n in range(4):
            state = QuantumState(n, -1, SymmetryLimit.SPIN)
            for z in (0.1, 0.45, 0.9):
                assert component_z_hypergeometric(state, exps, z) == pytest.approx(
                    math.factorial(n) * component_z(state, exps, z), rel=1e-11
                )

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_支配成分の節はn個(self, n):
        """正常系: (0, 1) 内の符号変化の回数"""
        exps = Exponents.from_pq(1.1, 0.7)
        z = np.linspace(1e-3, 1.0 - 1e-3, 2001)
        values = component_z(QuantumState(n, -1, SymmetryLimit.SPIN), exps, z)
        signs = np.sign(values[values != 0.0])
        assert int(np.sum(signs[1:] != signs[:-1])) == n

    def test_r微分が中心差分と一致する(self):
        """正常系: component_r の derivative"""
        exps = Exponents.from_pq(1.2, 0.6)
        state = QuantumState(2, -1, SymmetryLimit.SPIN)
        alpha, h = 0.05, 1e-5
        for r in (3.0, 15.0, 27.0):
            numeric = (component_r(state, exps, alpha, r + h).value - component_r(state, exps, alpha, r - h).value) / (2 * h)
            assert component_r(state, exps, alpha, r).derivative == pytest.approx(numeric, rel=1e-6, abs=1e-10)


class TestNormalization:
    """規格化のテスト"""

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_求積による規格化でz積分が1になる(self, n):
        """正常系: ∫₀¹ |N·支配成分|² dz = 1"""
        exps = Exponents.from_pq(1.05, 0.55)
        state = QuantumState(n, -1, SymmetryLimit.PSPIN)
        norm = norm_quadrature(state, exps)
        integral, _ = quad(lambda z: (norm * component_z(state, exps, z)) ** 2, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
        assert integral == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_標準形の閉形式が求積と一致する(self, n):
        """正常系: formula=standard"""
        exps = Exponents.from_pq(1.1, 0.7)
        state = QuantumState(n, 2, SymmetryLimit.SPIN)
        assert norm_closed_form(state, exps, NormFormula.STANDARD) == pytest.approx(
            norm_quadrature(state, exps), rel=1e-8
        )

    def test_n0でp_qが半分なら規格化定数はルート6(self):
        """正常系: ∫₀¹ z(1-z) dz = 1/6"""
        state = QuantumState(0, -1, SymmetryLimit.SPIN)
        assert norm_quadrature(state, Exponents.from_pq(0.5, 0.5)) == pytest.approx(math.sqrt(6.0), rel=1e-14)

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_求積の節点数を倍にしても規格化定数は変わらない(self, n):
        """正常系: 128点と256点"""
        exps = Exponents.from_pq(1.05, 0.55)
        state = QuantumState(n, -1, SymmetryLimit.PSPIN)
        coarse = norm_quadrature(state, exps, nodes=128)
        fine = norm_quadrature(state, exps, nodes=256)
        assert abs(fine - coarse) <= 1e-13 * coarse

    def test_ランダムな指数で標準形の閉形式が求積と一致する(self):
        """正常系: 10組の (p, q) と n = 0..3"""
        rng = np.random.default_rng(41)
        for p, q in rng.uniform(0.3, 2.5, size=(10, 2)):
            exps = Exponents.from_pq(p, q)
            for n in range(4):
                state = QuantumState(n, 1, SymmetryLimit.SPIN)
                assert norm_closed_form(state, exps, NormFormula.STANDARD) == pytest.approx(
                    norm_quadrature(state, exps), rel=1e-8
                )

    def test_印刷形はn0で負になりNormalizationError(self):
        """異常系: 印刷形の符号"""
        with pytest.raises(NormalizationError):
            norm_closed_form(QuantumState(0, -1, SymmetryLimit.PSPIN), Exponents.from_pq(1.0, 0.5), "printed")

    def test_r測度の規格化(self):
        """正常系: ∫₀^{π/(2α)} |N·支配成分|² dr = 1"""
        exps = Exponents.from_pq(1.3, 0.9)
        state = QuantumState(2, -2, SymmetryLimit.SPIN)
        alpha = 0.02
        norm = norm_r_measure(state, exps, alpha)
        integral, _ = quad(
            lambda r: (norm * component_r(state, exps, alpha, r).value) ** 2,
            0.0, math.pi / (2 * alpha), epsabs=1e-13, epsrel=1e-13, limit=200,
        )
        assert integral == pytest.approx(1.0, abs=1e-9)

    def test_r測度では直交しz測度では直交しない(self):
        """正常系: 重み (u, v) と (u+½, v+½) の違い"""
        exps = Exponents.from_pq(1.1, 0.7)
        for n1, n2 in ((0, 1), (1, 3), (2, 3)):
            assert abs(overlap_integral(n1, n2, exps, Normalization.R)) < 1e-12
        assert abs(overlap_integral(0, 1, exps, Normalization.Z)) > 1e-3
        assert overlap_integral(2, 2, exps, "z") == pytest.approx(1.0)


class TestPartnerAndSampling:
    """パートナー成分とサンプリングのテスト"""

    def test_分母が0ならDegenerateDenominatorError(self):
        """異常系: 擬スピンで E = M + C_ps"""
        state = QuantumState(1, -1, SymmetryLimit.PSPIN)
        exps = Exponents.from_pq(1.0, 0.5)
        dominant = component_r(state, exps, 0.01, 10.0)
        with pytest.raises(DegenerateDenominatorError):
            partner_component(PSPIN_TABLE1, state, 1.0 - 5.0, 10.0, dominant)

    @pytest.mark.parametrize("params,denominator", [
        (SPIN_TABLE3, lambda E: 1.0 + E - 5.0),
        (PSPIN_TABLE1, lambda E: 1.0 - E - 5.0),
    ], ids=["spin", "pspin"])
    def test_パートナー成分が差分近似と一致する(self, params, denominator):
        """正常系: r = π/(8α) で [Δ支配成分/Δr - (κ+A)支配成分/r] / 分母"""
        state = QuantumState(1, -1, params.limit)
        E = max(solve_energies(params, state).energies, key=abs)
        exps = exponents(params, E, state.kappa)
        r, h = math.pi / (8 * params.alpha), 1e-4
        value = component_r(state, exps, params.alpha, r).value
        slope = (
            component_r(state, exps, params.alpha, r + h).value - component_r(state, exps, params.alpha, r - h).value
        ) / (2 * h)
        expected = (slope - (state.kappa + params.A) * value / r) / denominator(E)
        dominant = component_r(state, exps, params.alpha, r)
        assert partner_component(params, state, E, r, dominant) == pytest.approx(expected, rel=1e-6)

    def test_サンプリング結果は規格化済みで端点を含まない(self):
        """正常系: sample_radial"""
        params = PSPIN_TABLE1
        state = QuantumState(1, -1, SymmetryLimit.PSPIN)
        E = solve_energies(params, state).energies[0]
        half_period = math.pi / (2 * params.alpha)
        r = np.linspace(0.01, 0.99, 50) * half_period
        solution = sample_radial(params, state, E, r)
        assert solution.norm_method is NormMethod.QUADRATURE
        assert solution.closed_form_status is ClosedFormStatus.DISAGREES or solution.closed_form_status is ClosedFormStatus.FAILED
        np.testing.assert_array_equal(solution.dominant, solution.lower)
        frame = solution.to_frame()
        assert list(frame.columns) == ['r', 'z', 'F', 'G', 'dominant_sq']
        assert np.all((frame['z'] > 0) & (frame['z'] < 1))

    def test_支配成分は両端で0に近づく(self):
        """正常系: r → 0⁺ と r → π/(2α)⁻"""
        params = SPIN_TABLE3
        state = QuantumState(1, -1, SymmetryLimit.SPIN)
        E = max(solve_energies(params, state).energies, key=abs)
        half_period = math.pi / (2 * params.alpha)
        r = np.array([1e-9, 0.25, 0.5, 0.75, 1.0 - 1e-9]) * half_period
        dominant = sample_radial(params, state, E, r).dominant
        peak = np.max(np.abs(dominant))
        assert peak > 0.0
        assert abs(dominant[0]) < 1e-4 * peak
        assert abs(dominant[-1]) < 1e-4 * peak

    def test_標準形で閉形式が一致すれば採用する(self):
        """正常系: formula=standard では closed-form が使われる"""
        params = SPIN_TABLE3
        state = QuantumState(1, -1, SymmetryLimit.SPIN)
        E = solve_energies(params, state).energies[0]
        r = np.linspace(10.0, 140.0, 20)
        solution = sample_radial(params, state, E, r, formula=NormFormula.STANDARD)
        assert solution.closed_form_status is ClosedFormStatus.AGREES
        assert solution.norm_method is NormMethod.CLOSED_FORM
        assert solution.norm == pytest.approx(norm_quadrature(state, solution.exponents), rel=1e-8)

    def test_r測度の規格化では閉形式を確認しない(self):
        """正常系: normalization=r"""
        params = SPIN_TABLE3
        state = QuantumState(1, -1, SymmetryLimit.SPIN)
        E = solve_energies(params, state).energies[0]
        solution = sample_radial(params, state, E, [20.0, 60.0], normalization="r")
        assert solution.closed_form_status is ClosedFormStatus.SKIPPED
        assert solution.normalization is Normalization.R

    @pytest.mark.parametrize("r", [[0.0, 10.0], [10.0, 200.0]])
    def test_範囲外のrはWavefunctionError(self, r):
        """異常系: 端点を含む格子"""
        state = QuantumState(1, -1, SymmetryLimit.SPIN)
        E = solve_energies(SPIN_TABLE3, state).energies[0]
        with pytest.raises(WavefunctionError):
            sample_radial(SPIN_TABLE3, state, E, r)
