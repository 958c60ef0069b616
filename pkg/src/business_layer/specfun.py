"""特殊関数カーネル

対数ガンマ、ポッホハマー記号、終端する超幾何級数、Jacobi多項式とその導関数を提供します。
級数の総和はmpmathの拡張精度で行い、結果はfloatで返します。
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import mpmath
import numpy as np

logger = logging.getLogger(__name__)

# 級数の総和に使う10進桁数
WORKING_DPS = 30

ArrayLike = Union[float, np.ndarray]


class SpecialFunctionError(Exception):
    """特殊関数関連のエラー"""
    pass


class DomainError(SpecialFunctionError, ValueError):
    """引数が定義域外の場合のエラー"""
    pass


class ParameterError(SpecialFunctionError, ValueError):
    """パラメータが極に当たるなど不正な場合のエラー"""
    pass


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi多項式 P_n^{(u,v)} の次数と指数"""
    n: int
    u: float
    v: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise ParameterError(f"次数nは0以上の整数である必要があります: n={self.n}")
        if not self.u > -1.0 or not self.v > -1.0:
            raise ParameterError(
                f"指数u, vは-1より大きい必要があります: u={self.u}, v={self.v}"
            )
        object.__setattr__(self, 'n', int(self.n))


def _check_degree(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ParameterError(f"終端次数nは0以上の整数である必要があります: n={n}")
    return int(n)


def _check_lower_parameter(value: float, n: int, name: str) -> None:
    """下側パラメータが総和範囲内で極(0, -1, -2, ...)に当たらないことを確認"""
    for k in range(n):
        if value + k == 0:
            raise ParameterError(
                f"下側パラメータ{name}={value} が k={k} で極になります"
            )


def ln_gamma(x: float) -> float:
    """ln Γ(x) を返す（x > 0）

    Args:
        x: 正の実数

    Returns:
        float: ln Γ(x)

    Raises:
        DomainError: x <= 0 または非有限値の場合
    """
    if not np.isfinite(x) or not x > 0:
        raise DomainError(f"ln_gammaの引数は正である必要があります: x={x}")
    with mpmath.workdps(WORKING_DPS):
        return float(mpmath.loggamma(mpmath.mpf(x)))


def _pochhammer_mp(sigma, n: int):
    result = mpmath.mpf(1)
    for k in range(n):
        result *= sigma + k
    return result


def pochhammer(sigma: float, n: int) -> float:
    """上昇階乗 (σ)_n = σ(σ+1)…(σ+n-1) を直接積で返す

    負のσも扱えるようln_gammaは経由しません。
    """
    n = _check_degree(n)
    with mpmath.workdps(WORKING_DPS):
        return float(_pochhammer_mp(mpmath.mpf(sigma), n))


def _binomial_mp(a, k: int):
    if k < 0:
        return mpmath.mpf(0)
    return _pochhammer_mp(a - k + 1, k) / mpmath.factorial(k)


def generalized_binomial(a: float, k: int) -> float:
    """実数上段の二項係数 C(a, k) = (a-k+1)_k / k!（k < 0 では0）"""
    if isinstance(k, bool) or int(k) != k:
        raise ParameterError(f"下段kは整数である必要があります: k={k}")
    with mpmath.workdps(WORKING_DPS):
        return float(_binomial_mp(mpmath.mpf(a), int(k)))


def hyp2f1_terminating(n: int, b: float, c: float, z: float) -> float:
    """終端する ₂F₁(-n, b; c; z) を項ごとの総和で返す

    Raises:
        ParameterError: cが総和範囲内で0または負の整数になる場合
    """
    n = _check_degree(n)
    _check_lower_parameter(c, n, 'c')
    with mpmath.workdps(WORKING_DPS):
        b_mp, c_mp, z_mp = mpmath.mpf(b), mpmath.mpf(c), mpmath.mpf(z)
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        for k in range(n):
            term *= (k - n) * (b_mp + k) * z_mp / ((c_mp + k) * (k + 1))
            total += term
        return float(total)


def hyp3f2_unit_terminating(
    n: int,
    a2: float,
    a3: float,
    b1: float,
    b2: float,
    b3: Optional[float] = None
) -> float:
    """単位引数で終端する ₃F₂(-n, a2, a3; b1, b2[, b3]; 1) を返す

    b3を与えると下側パラメータ3つの形（正規化定数の印刷形）を、
    省略すると標準的な下側2つの形を評価します。

    Args:
        n: 終端次数
        a2, a3: 上側パラメータ
        b1, b2, b3: 下側パラメータ

    Returns:
        float: 有限和の値

    Raises:
        ParameterError: 下側パラメータが総和範囲内で極に当たる場合
    """
    n = _check_degree(n)
    lowers = [b1, b2] if b3 is None else [b1, b2, b3]
    for index, lower in enumerate(lowers, start=1):
        _check_lower_parameter(lower, n, f"b{index}")

    with mpmath.workdps(WORKING_DPS):
        a2_mp, a3_mp = mpmath.mpf(a2), mpmath.mpf(a3)
        lowers_mp = [mpmath.mpf(b) for b in lowers]
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        for k in range(n):
            numerator = (k - n) * (a2_mp + k) * (a3_mp + k)
            denominator = (k + 1) * mpmath.fprod(b + k for b in lowers_mp)
            term *= numerator / denominator
            total += term
        return float(total)


def jacobi_eval(params: JacobiParams, x: ArrayLike) -> ArrayLike:
    """次数に関する三項漸化式で P_n^{(u,v)}(x) を評価する

    xにはスカラーまたはnumpy配列を渡せます。スカラー入力にはfloatを返します。
    """
    n, a, b = params.n, params.u, params.v
    xs = np.asarray(x, dtype=float)

    if n == 0:
        result = np.ones_like(xs)
    else:
        apb = a + b
        p_prev = np.ones_like(xs)
        p_curr = 0.5 * (a - b + (apb + 2.0) * xs)
        for k in range(2, n + 1):
            a1 = 2.0 * k * (k + apb) * (2.0 * k + apb - 2.0)
            a2 = (2.0 * k + apb - 1.0) * (a * a - b * b)
            a3 = (2.0 * k + apb - 2.0) * (2.0 * k + apb - 1.0) * (2.0 * k + apb)
            a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + apb)
            p_next = ((a2 + a3 * xs) * p_curr - a4 * p_prev) / a1
            p_prev, p_curr = p_curr, p_next
        result = p_curr

    if result.ndim == 0:
        return float(result)
    return result


def jacobi_sum(params: JacobiParams, x: float) -> float:
    """二重二項係数の有限和で P_n^{(u,v)}(x) を評価する

    2^{-n} Σ_m C(n+u, m) C(n+v, n-m) (x-1)^{n-m} (1+x)^m
    """
    n = params.n
    with mpmath.workdps(WORKING_DPS):
        u_mp, v_mp, x_mp = mpmath.mpf(params.u), mpmath.mpf(params.v), mpmath.mpf(x)
        total = mpmath.mpf(0)
        for m in range(n + 1):
            total += (
                _binomial_mp(n + u_mp, m)
                * _binomial_mp(n + v_mp, n - m)
                * (x_mp - 1) ** (n - m)
                * (1 + x_mp) ** m
            )
        return float(total / mpmath.mpf(2) ** n)


def jacobi_derivative(params: JacobiParams, x: ArrayLike) -> ArrayLike:
    """d/dx P_n^{(u,v)}(x) = (n+u+v+1)/2 · P_{n-1}^{(u+1,v+1)}(x)"""
    if params.n == 0:
        zeros = np.zeros_like(np.asarray(x, dtype=float))
        return float(zeros) if zeros.ndim == 0 else zeros

    shifted = JacobiParams(params.n - 1, params.u + 1.0, params.v + 1.0)
    scale = 0.5 * (params.n + params.u + params.v + 1.0)
    return scale * jacobi_eval(shifted, x)


def log_beta(a: float, b: float) -> float:
    """ln B(a, b)"""
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)


def factorial(n: int) -> float:
    return float(math.factorial(_check_degree(n)))
