"""閉形式のスピノル波動関数

支配成分 N z^p (1-z)^q P_n^{(u,v)}(1-2z) の評価、規格化（閉形式の和と求積）、
一階のDirac関係式によるパートナー成分の復元を扱います。
z = sin²(αr) で、物理的な r の範囲は (0, π/(2α)) です。
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.special import roots_jacobi

from . import specfun
from .model import ModelParams, QuantumState, SymmetryLimit, derived_params
from .specfun import JacobiParams

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

DEFAULT_QUADRATURE_NODES = 128
DENOMINATOR_EPSILON = 1e-10


class WavefunctionError(Exception):
    """波動関数関連のエラー"""
    pass


class ExponentDomainError(WavefunctionError, ValueError):
    """指数が定義できない、または規格化不能な場合のエラー"""
    pass


class NormalizationError(WavefunctionError):
    """閉形式の規格化積分が正にならない場合のエラー"""
    pass


class DegenerateDenominatorError(WavefunctionError):
    """パートナー成分の分母が0に近い場合のエラー"""
    pass


class NormMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


class NormFormula(str, Enum):
    """閉形式規格化の公式。PRINTEDは下側パラメータ3つの印刷形、STANDARDは標準的なJacobi積分"""
    PRINTED = "printed"
    STANDARD = "standard"


class Normalization(str, Enum):
    """z: ∫₀¹|支配成分|²dz = 1、r: ∫|支配成分|²dr = 1"""
    Z = "z"
    R = "r"


class ClosedFormStatus(str, Enum):
    AGREES = "agrees"
    DISAGREES = "disagrees"
    FAILED = "failed"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Exponents:
    """端点の指数 p, q と Jacobi 指数 u = 2p-½, v = 2q-½"""
    p: float
    q: float
    u: float
    v: float

    def __post_init__(self):
        if not self.p > 0 or not self.q > 0:
            raise ExponentDomainError(f"p, qは正である必要があります: p={self.p}, q={self.q}")
        if not self.u > -1 or not self.v > -1:
            raise ExponentDomainError(f"規格化にはu, v > -1が必要です: u={self.u}, v={self.v}")

    @classmethod
    def from_pq(cls, p: float, q: float) -> 'Exponents':
        return cls(p=p, q=q, u=2.0 * p - 0.5, v=2.0 * q - 0.5)

    def jacobi(self, n: int) -> JacobiParams:
        return JacobiParams(n, self.u, self.v)


class ComponentValue(NamedTuple):
    """r における成分の値と dr 微分"""
    value: ArrayLike
    derivative: ArrayLike


@dataclass(frozen=True, eq=False)
class SpinorSolution:
    """一つの根で指数を固定した規格化済みスピノル

    upper は F(r)、lower は G(r) です。擬スピンではGが、スピンではFが支配成分です。
    """
    state: QuantumState
    energy: float
    exponents: Exponents
    norm: float
    norm_method: NormMethod
    normalization: Normalization
    closed_form_status: ClosedFormStatus
    r: np.ndarray
    z: np.ndarray
    upper: np.ndarray
    lower: np.ndarray

    @property
    def dominant(self) -> np.ndarray:
        return self.lower if self.state.limit is SymmetryLimit.PSPIN else self.upper

    @property
    def partner(self) -> np.ndarray:
        return self.upper if self.state.limit is SymmetryLimit.PSPIN else self.lower

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'r': self.r,
            'z': self.z,
            'F': self.upper,
            'G': self.lower,
            'dominant_sq': self.dominant ** 2,
        })


def exponents(params: ModelParams, E: float, kappa: int) -> Exponents:
    """p = ¼ + ¼√(1+4(δ+γ₁/α²)), q = ¼ + ¼√(1+4γ₂/α²)

    Raises:
        ExponentDomainError: 根号の中身が負の場合
    """
    derived = derived_params(params, E, kappa)
    alpha_sq = params.alpha * params.alpha
    first = 1.0 + 4.0 * (derived.delta + derived.gamma1 / alpha_sq)
    second = 1.0 + 4.0 * derived.gamma2 / alpha_sq
    if first < 0.0 or second < 0.0:
        raise ExponentDomainError(
            f"E={E}, κ={kappa} で指数の根号の中身が負です: ({first:.6g}, {second:.6g})"
        )
    return Exponents.from_pq(0.25 + 0.25 * math.sqrt(first), 0.25 + 0.25 * math.sqrt(second))


def component_z(state: QuantumState, exponents: Exponents, z: ArrayLike) -> ArrayLike:
    """規格化前の支配成分 z^p (1-z)^q P_n^{(u,v)}(1-2z)"""
    zs = np.asarray(z, dtype=float)
    body = zs ** exponents.p * (1.0 - zs) ** exponents.q * specfun.jacobi_eval(exponents.jacobi(state.n), 1.0 - 2.0 * zs)
    return float(body) if np.ndim(body) == 0 else body


def component_z_hypergeometric(state: QuantumState, exponents: Exponents, z: float) -> float:
    """Γ前因子付き₂F₁形式 Γ(2p+n+½)/Γ(2p+½) z^p (1-z)^q ₂F₁(-n, n+2(p+q); 2p+½; z)

    Jacobi形式の n! 倍になります。
    """
    n, p, q = state.n, exponents.p, exponents.q
    prefactor = specfun.pochhammer(2.0 * p + 0.5, n)
    series = specfun.hyp2f1_terminating(n, n + 2.0 * (p + q), 2.0 * p + 0.5, z)
    return prefactor * z ** p * (1.0 - z) ** q * series


def _component_derivative_z(state: QuantumState, exponents: Exponents, z: np.ndarray) -> np.ndarray:
    """d/dz [z^p (1-z)^q P_n(1-2z)]"""
    params = exponents.jacobi(state.n)
    x = 1.0 - 2.0 * z
    envelope = z ** exponents.p * (1.0 - z) ** exponents.q
    polynomial = specfun.jacobi_eval(params, x)
    slope = specfun.jacobi_derivative(params, x)
    return envelope * ((exponents.p / z - exponents.q / (1.0 - z)) * polynomial - 2.0 * slope)


def component_r(state: QuantumState, exponents: Exponents, alpha: float, r: ArrayLike) -> ComponentValue:
    """規格化前の支配成分の r における値と dr 微分（dz/dr = α sin(2αr)）"""
    rs = np.asarray(r, dtype=float)
    z = np.sin(alpha * rs) ** 2
    value = component_z(state, exponents, z)
    derivative = _component_derivative_z(state, exponents, z) * alpha * np.sin(2.0 * alpha * rs)
    if np.ndim(rs) == 0:
        return ComponentValue(float(value), float(derivative))
    return ComponentValue(np.asarray(value), np.asarray(derivative))


def _quadrature_integral(n: int, exponents: Exponents, normalization: Normalization, nodes: int) -> float:
    """|支配成分|² の積分（z測度または r測度、r測度は α を掛ける前の値）"""
    if normalization is Normalization.Z:
        weight_u, weight_v = exponents.u + 0.5, exponents.v + 0.5
        scale = 2.0 ** -(exponents.u + exponents.v + 2.0)
    else:
        weight_u, weight_v = exponents.u, exponents.v
        scale = 0.5 * 2.0 ** -(exponents.u + exponents.v + 1.0)
    x, w = roots_jacobi(nodes, weight_u, weight_v)
    polynomial = specfun.jacobi_eval(exponents.jacobi(n), x)
    return scale * float(np.dot(w, polynomial * polynomial))


def norm_quadrature(
    state: QuantumState,
    exponents: Exponents,
    nodes: int = DEFAULT_QUADRATURE_NODES
) -> float:
    """N = [∫₀¹ z^{2p}(1-z)^{2q} P_n²(1-2z) dz]^{-1/2}

    x = 1-2z として重み (u+½, v+½) のGauss-Jacobi求積で評価します。
    """
    integral = _quadrature_integral(state.n, exponents, Normalization.Z, nodes)
    return 1.0 / math.sqrt(integral)


def norm_r_measure(
    state: QuantumState,
    exponents: Exponents,
    alpha: float,
    nodes: int = DEFAULT_QUADRATURE_NODES
) -> float:
    """∫₀^{π/(2α)} |支配成分|² dr = 1 となる規格化定数

    dr = dz / (2α√(z(1-z))) なので重み (u, v) のGauss-Jacobi求積になります。
    """
    integral = _quadrature_integral(state.n, exponents, Normalization.R, nodes) / alpha
    return 1.0 / math.sqrt(integral)


def _closed_form_terms(n: int, u: float, v: float, printed: bool) -> float:
    terms = []
    for m in range(n + 1):
        upper_binomial = specfun.generalized_binomial(n + u, m)
        lower_binomial = specfun.generalized_binomial(n + v, n - m)
        if upper_binomial == 0.0 or lower_binomial == 0.0:
            continue
        log_gammas = (
            specfun.ln_gamma(n - m + u + 1.5)
            + specfun.ln_gamma(m + v + 1.5)
            + specfun.ln_gamma(n + u + 1.0)
            - specfun.ln_gamma(n + u + v + 3.0)
            - specfun.ln_gamma(u + 1.0)
            - math.lgamma(n + 1.0)
        )
        if printed:
            sign = (-1.0) ** (n - m + 1)
            series = specfun.hyp3f2_unit_terminating(
                n, u + v + n + 1.0, n - m + u + 1.5, m + v + 1.5, u + 1.0, n + u + v + 3.0
            )
            # 印刷形は外側の ½ と分母の 2 を持つ
            weight = 0.25
        else:
            sign = (-1.0) ** (n - m)
            series = specfun.hyp3f2_unit_terminating(
                n, n + u + v + 1.0, n - m + u + 1.5, u + 1.0, n + u + v + 3.0
            )
            weight = 1.0
        terms.append(weight * sign * upper_binomial * lower_binomial * math.exp(log_gammas) * series)
    return math.fsum(terms)


def norm_closed_form(
    state: QuantumState,
    exponents: Exponents,
    formula: Union[NormFormula, str] = NormFormula.PRINTED
) -> float:
    """閉形式の和 Ī_n(u, v) から N = 1/√Ī_n を返す

    PRINTEDは符号 (-1)^{n-m+1} と下側パラメータ3つの₃F₂をそのまま評価します。
    STANDARDは同じ展開を標準的なJacobi積分公式で評価したものです。

    Raises:
        NormalizationError: Ī_n が正にならない場合
    """
    formula = NormFormula(formula)
    integral = _closed_form_terms(state.n, exponents.u, exponents.v, formula is NormFormula.PRINTED)
    if not integral > 0.0:
        raise NormalizationError(
            f"閉形式の規格化積分が正になりません: n={state.n}, formula={formula.value}, I={integral:.6g}"
        )
    return 1.0 / math.sqrt(integral)


def overlap_integral(
    n1: int,
    n2: int,
    exponents: Exponents,
    measure: Union[Normalization, str] = Normalization.R,
    nodes: int = DEFAULT_QUADRATURE_NODES
) -> float:
    """指数を固定した規格化済み支配成分どうしの重なり積分

    r測度では重み (u, v) のJacobi直交性により n1 ≠ n2 で0になります。
    z測度の重みは (u+½, v+½) なので一般に直交しません。
    """
    measure = Normalization(measure)
    if measure is Normalization.Z:
        weight_u, weight_v = exponents.u + 0.5, exponents.v + 0.5
    else:
        weight_u, weight_v = exponents.u, exponents.v
    x, w = roots_jacobi(nodes, weight_u, weight_v)
    first = specfun.jacobi_eval(exponents.jacobi(n1), x)
    second = specfun.jacobi_eval(exponents.jacobi(n2), x)
    cross = np.dot(w, first * second)
    return float(cross / math.sqrt(np.dot(w, first * first) * np.dot(w, second * second)))


def partner_component(
    params: ModelParams,
    state: QuantumState,
    E: float,
    r: ArrayLike,
    dominant: ComponentValue
) -> ArrayLike:
    """一階の関係式でパートナー成分を求める

    擬スピン: F = [d/dr - (κ+A)/r] G / (M - E + C_ps)
    スピン:   G = [d/dr - (κ+A)/r] F / (M + E - C_s)

    Raises:
        DegenerateDenominatorError: 分母の絶対値が1e-10未満の場合
    """
    if params.limit is SymmetryLimit.PSPIN:
        denominator = params.M - E + params.C
    else:
        denominator = params.M + E - params.C
    if abs(denominator) < DENOMINATOR_EPSILON:
        raise DegenerateDenominatorError(
            f"パートナー成分の分母が0です: limit={params.limit.value}, E={E}, C={params.C}"
        )
    rs = np.asarray(r, dtype=float)
    result = (np.asarray(dominant.derivative) - (state.kappa + params.A) / rs * np.asarray(dominant.value)) / denominator
    return float(result) if np.ndim(result) == 0 else result


def _closed_form_check(
    state: QuantumState,
    exponents: Exponents,
    reference: float,
    formula: NormFormula,
    tolerance: float
) -> ClosedFormStatus:
    try:
        closed = norm_closed_form(state, exponents, formula)
    except NormalizationError as e:
        logger.warning(f"Closed-form normalization failed for {state.label}: {e}")
        return ClosedFormStatus.FAILED
    if abs(closed - reference) <= tolerance * reference:
        return ClosedFormStatus.AGREES
    logger.warning(
        f"Closed-form normalization disagrees for {state.label}: closed={closed:.12g}, quadrature={reference:.12g}"
    )
    return ClosedFormStatus.DISAGREES


def sample_radial(
    params: ModelParams,
    state: QuantumState,
    E: float,
    r_grid: Sequence[float],
    normalization: Union[Normalization, str] = Normalization.Z,
    formula: Union[NormFormula, str] = NormFormula.PRINTED,
    nodes: int = DEFAULT_QUADRATURE_NODES,
    check_tolerance: float = 1e-6
) -> SpinorSolution:
    """規格化済みの支配成分とパートナー成分を r 格子上でサンプリングする

    求積による規格化が基準で、閉形式は一致した場合にのみ採用します。

    Raises:
        WavefunctionError: r が (0, π/(2α)) の外にある場合
    """
    normalization = Normalization(normalization)
    formula = NormFormula(formula)
    rs = np.asarray(r_grid, dtype=float)
    r_max = math.pi / (2.0 * params.alpha)
    if rs.size == 0 or np.any(rs <= 0.0) or np.any(rs >= r_max):
        raise WavefunctionError(f"rは(0, {r_max:.12g})の範囲内である必要があります")

    exps = exponents(params, E, state.kappa)

    if normalization is Normalization.Z:
        norm = norm_quadrature(state, exps, nodes)
        status = _closed_form_check(state, exps, norm, formula, check_tolerance)
        method = NormMethod.CLOSED_FORM if status is ClosedFormStatus.AGREES else NormMethod.QUADRATURE
        if method is NormMethod.CLOSED_FORM:
            norm = norm_closed_form(state, exps, formula)
    else:
        norm = norm_r_measure(state, exps, params.alpha, nodes)
        status = ClosedFormStatus.SKIPPED
        method = NormMethod.QUADRATURE
    logger.info(f"{state.label}: norm={norm:.12g} method={method.value} closed_form={status.value}")

    body = component_r(state, exps, params.alpha, rs)
    dominant = ComponentValue(norm * np.asarray(body.value), norm * np.asarray(body.derivative))
    partner = np.asarray(partner_component(params, state, E, rs, dominant))

    if params.limit is SymmetryLimit.PSPIN:
        upper, lower = partner, dominant.value
    else:
        upper, lower = dominant.value, partner

    return SpinorSolution(
        state=state,
        energy=float(E),
        exponents=exps,
        norm=float(norm),
        norm_method=method,
        normalization=normalization,
        closed_form_status=status,
        r=rs,
        z=np.sin(params.alpha * rs) ** 2,
        upper=np.asarray(upper, dtype=float),
        lower=np.asarray(lower, dtype=float),
    )
