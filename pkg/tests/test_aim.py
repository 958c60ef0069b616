"""漸近反復法エンジンのテスト"""
from fractions import Fraction

import numpy as np
import pytest

from src.business_layer.aim import (
    AimError,
    AimProblem,
    OrderExhaustedError,
    SeriesTaylor,
    aim_delta,
    aim_eigenvalues,
    aim_iterate,
    tpt_problem,
)
from src.business_layer.model import ModelParams, QuantumState, SymmetryLimit, build_aim_problem, solve_energies

PSPIN_TABLE1 = ModelParams(M=1.0, V1=-0.002, V2=0.003, alpha=0.01, A=0.0, limit=SymmetryLimit.PSPIN, C=-5.0)
SPIN_TABLE3 = ModelParams(M=1.0, V1=0.002, V2=-0.003, alpha=0.01, A=0.0, limit=SymmetryLimit.SPIN, C=5.0)


def _harmonic_oscillator(order: int = 40, k_max: int = 15) -> AimProblem:
    """f'' = 2x f' + (1-ε) f、固有値 ε = 2m+1"""
    lambda0 = SeriesTaylor.variable(0.0, order) * 2.0
    return AimProblem(
        lambda0=lambda _: lambda0,
        s0=lambda epsilon: SeriesTaylor.constant(0.0, 1.0 - epsilon, order),
        x0=0.0,
        k_max=k_max,
    )


def _exact_mul(a, b):
    size = min(len(a), len(b))
    return [sum(a[i] * b[j - i] for i in range(j + 1)) for j in range(size)]


def _exact_add(a, b):
    return [x + y for x, y in zip(a, b)]


def _exact_derivative(a):
    return [a[j] * j for j in range(1, len(a))]


def _exact_reciprocal(a):
    result = [1 / a[0]]
    for j in range(1, len(a)):
        result.append(-sum(a[i] * result[j - i] for i in range(1, j + 1)) / a[0])
    return result


def _exact_tpt_delta(p, q, beta_ratio, k, z0=Fraction(1, 2), order=10):
    """有理数演算で展開した三角ポテンシャル問題の δ_k(z0)"""
    padding = [Fraction(0)] * (order - 1)
    z = [z0, Fraction(1)] + padding
    weight = _exact_reciprocal(_exact_mul(z, [1 - z0, Fraction(-1)] + padding))
    total = p + q
    numerator = [c * 4 * (total + Fraction(1, 2)) for c in z]
    numerator[0] -= 4 * p + 1
    lambda0 = [c / 2 for c in _exact_mul(numerator, weight)]
    s0 = [c * (beta_ratio + 4 * total * total) / 4 for c in weight]

    pairs = [(lambda0, s0)]
    for _ in range(k):
        lambda_prev, s_prev = pairs[-1]
        lambda_next = _exact_add(_exact_add(_exact_derivative(lambda_prev), s_prev), _exact_mul(lambda0, lambda_prev))
        s_next = _exact_add(_exact_derivative(s_prev), _exact_mul(s0, lambda_prev))
        pairs.append((lambda_next, s_next))
    lambda_k, s_k = pairs[k]
    lambda_prev, s_prev = pairs[k - 1]
    return lambda_k[0] * s_prev[0] - lambda_prev[0] * s_k[0]


class TestSeriesTaylor:
    """切断テイラー級数のテスト"""

    def test_逆数が幾何級数になる(self):
        """正常系: 1/(1-x) = Σ x^j"""
        x = SeriesTaylor.variable(0.0, 8)
        np.testing.assert_allclose((1.0 - x).reciprocal().coeffs, np.ones(9))

    def test_積と商が元に戻る(self):
        """正常系: (a·b)/b = a"""
        x = SeriesTaylor.variable(0.3, 10)
        a = 2.0 + x * x - 3.0 * x
        b = 1.5 + x
        np.testing.assert_allclose(((a * b) / b).coeffs, a.coeffs, atol=1e-12)

    def test_微分で次数が一つ下がる(self):
        """正常系: d/dx (x²) = 2x を展開点0.5で"""
        x = SeriesTaylor.variable(0.5, 6)
        derivative = (x * x).derivative()
        assert derivative.order == 5
        assert derivative.value() == pytest.approx(1.0)
        assert derivative.value(2.0) == pytest.approx(4.0)

    def test_積の微分がライプニッツ則を満たす(self):
        """正常系: (f·g)' = f'g + fg' をランダムな12次の級数で"""
        rng = np.random.default_rng(12)
        for _ in range(5):
            f = SeriesTaylor(0.3, rng.normal(size=13))
            g = SeriesTaylor(0.3, rng.normal(size=13))
            left = (f * g).derivative()
            right = f.derivative() * g + f * g.derivative()
            assert left.order == right.order == 11
            np.testing.assert_allclose(left.coeffs, right.coeffs, rtol=1e-12, atol=1e-12)

    def test_係数は書き換えられない(self):
        """正常系: 不変性"""
        series = SeriesTaylor.constant(0.0, 1.0, 3)
        with pytest.raises(ValueError):
            series.coeffs[0] = 2.0

    def test_展開点が異なる級数は結合できない(self):
        """異常系: center の不一致"""
        with pytest.raises(AimError):
            SeriesTaylor.variable(0.0, 3) + SeriesTaylor.variable(0.5, 3)

    def test_0次の級数は微分できない(self):
        """異常系: 次数切れ"""
        with pytest.raises(OrderExhaustedError):
            SeriesTaylor.constant(0.0, 1.0, 0).derivative()

    def test_定数項0の逆数はエラー(self):
        """異常系: 1/x"""
        with pytest.raises(AimError):
            SeriesTaylor.variable(0.0, 4).reciprocal()


class TestAimIteration:
    """aim_iterate と aim_delta のテスト"""

    def test_定数係数の二回反復が手計算と一致する(self):
        """正常系: λ₀=0, s₀=-1 のとき (λ₂, s₂) = (0, 1)"""
        problem = AimProblem(
            lambda0=lambda _: SeriesTaylor.constant(0.0, 0.0, 6),
            s0=lambda _: SeriesTaylor.constant(0.0, -1.0, 6),
            x0=0.0,
        )
        lambda2, s2 = aim_iterate(problem, 0.0, 2)
        assert lambda2.value() == pytest.approx(0.0)
        assert s2.value() == pytest.approx(1.0)

    def test_調和振動子のδ1が固有値で零になる(self):
        """正常系: δ₁ は ε = 1, 3 で0"""
        problem = _harmonic_oscillator()
        assert aim_delta(problem, 1.0, 1) == pytest.approx(0.0, abs=1e-12)
        assert aim_delta(problem, 3.0, 1) == pytest.approx(0.0, abs=1e-12)
        assert abs(aim_delta(problem, 2.0, 1)) > 0.1

    @pytest.mark.parametrize("beta_ratio", [-10, -3, 2])
    def test_三角ポテンシャル問題のδ3が有理数演算と一致する(self, beta_ratio):
        """正常系: z0 = ½, k = 3, p = ¾, q = ½"""
        exact = _exact_tpt_delta(Fraction(3, 4), Fraction(1, 2), Fraction(beta_ratio), 3)
        computed = aim_delta(tpt_problem(0.75, 0.5), float(beta_ratio), 3)
        assert exact != 0
        assert computed == pytest.approx(float(exact), rel=1e-10)

    def test_深さがk_maxを超えるとエラー(self):
        """異常系: k > k_max"""
        with pytest.raises(AimError):
            aim_iterate(_harmonic_oscillator(k_max=3), 1.0, 4)

    def test_級数の次数を使い切るとOrderExhaustedError(self):
        """異常系: 次数3の級数で5回反復"""
        with pytest.raises(OrderExhaustedError):
            aim_iterate(_harmonic_oscillator(order=3), 1.0, 5)


class TestAimEigenvalues:
    """aim_eigenvalues のテスト"""

    def test_調和振動子の固有値を求める(self):
        """正常系: [0.5, 6] に ε = 1, 3, 5"""
        roots = aim_eigenvalues(_harmonic_oscillator(), (0.5, 6.0), grid=200, k=6)
        np.testing.assert_allclose([root.energy for root in roots], [1.0, 3.0, 5.0], atol=1e-9)
        assert all(root.converged for root in roots)

    def test_可解な三角ポテンシャル問題の固有値(self):
        """正常系: p = q = ½ で β²/α² = -4(1+j)²"""
        problem = tpt_problem(0.5, 0.5)
        roots = aim_eigenvalues(problem, (-40.0, -1.0), grid=400, k=6)
        np.testing.assert_allclose([root.energy for root in roots], [-36.0, -16.0, -4.0], atol=1e-8)

    def test_ランダムな指数で閉形式のスペクトルを再現する(self):
        """正常系: β²/α² = -4(n+p+q)², n = 0..3"""
        rng = np.random.default_rng(25)
        for _ in range(10):
            p, q = rng.uniform(0.3, 2.0, size=2)
            total = p + q
            expected = sorted(-4.0 * (n + total) ** 2 for n in range(4))
            roots = aim_eigenvalues(tpt_problem(p, q), (-4.0 * (total + 3.5) ** 2, -total ** 2), grid=600, k=6)
            np.testing.assert_allclose([root.energy for root in roots], expected, rtol=1e-8)

    def test_深さkとk1の根が一致して収束する(self):
        """正常系: p = ¾, q = ½ の根 -20.25, -6.25"""
        problem = tpt_problem(0.75, 0.5)
        roots = aim_eigenvalues(problem, (-30.0, -1.0), grid=200, k=4, agreement=1e-8)
        deeper = aim_eigenvalues(problem, (-30.0, -1.0), grid=200, k=5, agreement=1e-8)
        np.testing.assert_allclose([root.energy for root in roots], [-20.25, -6.25], atol=1e-9)
        np.testing.assert_allclose([root.energy for root in deeper], [root.energy for root in roots], atol=1e-9)
        assert all(root.converged and root.shift <= 1e-8 for root in roots)

    @pytest.mark.parametrize("params", [PSPIN_TABLE1, SPIN_TABLE3], ids=["pspin", "spin"])
    @pytest.mark.parametrize("kappa", [-2, -1, 1, 2])
    def test_Dirac問題のAIM根が量子化条件の根と一致する(self, params, kappa):
        """正常系: n = 0..3、深さ n+3、|E| ≈ 4 の根の近傍"""
        for n in range(4):
            state = QuantumState(n, kappa, params.limit)
            energy = max(solve_energies(params, state).energies, key=abs)
            roots = aim_eigenvalues(
                build_aim_problem(params, state), (energy - 1e-4, energy + 1e-4), grid=32, k=n + 3
            )
            assert roots, f"{state.label}: AIMの根がありません"
            assert min(abs(root.energy - energy) for root in roots) <= 1e-8

    def test_根の無い区間では空リスト(self):
        """正常系: [-3, -1] には根が無い"""
        assert aim_eigenvalues(tpt_problem(0.5, 0.5), (-3.0, -1.0), grid=64, k=6) == []

    def test_k_maxで深さk1を確認できない場合は未収束(self):
        """正常系: k+1 > k_max"""
        roots = aim_eigenvalues(_harmonic_oscillator(k_max=4), (0.5, 4.0), grid=100, k=4)
        assert roots
        assert not any(root.converged for root in roots)

    @pytest.mark.parametrize("scan,grid", [((1.0, 1.0), 64), ((0.0, 1.0), 8)])
    def test_不正な走査指定はエラー(self, scan, grid):
        """異常系: 空区間、格子点不足"""
        with pytest.raises(AimError):
            aim_eigenvalues(_harmonic_oscillator(), scan, grid=grid, k=3)
