"""漸近反復法(AIM)エンジン

y'' = λ₀(x) y' + s₀(x) y の係数関数を展開点まわりの切断テイラー級数で表し、
λ_k, s_k の漸化式と δ_k による量子化条件から固有値を求めます。
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from .root_finding import scan_roots

logger = logging.getLogger(__name__)

Scalar = Union[int, float]


class AimError(Exception):
    """AIM関連のエラー"""
    pass


class OrderExhaustedError(AimError):
    """級数の使用可能な次数を使い切った場合のエラー"""
    pass


class CoefficientDomainError(AimError, ValueError):
    """固有値パラメータに対して係数関数が定義できない場合のエラー"""
    pass


@dataclass(frozen=True, eq=False)
class SeriesTaylor:
    """展開点centerまわりの切断テイラー級数 Σ c_j (x - center)^j"""
    center: float
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if coeffs.size == 0:
            raise AimError("級数の係数が空です")
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)
        object.__setattr__(self, 'center', float(self.center))

    @classmethod
    def constant(cls, center: float, value: float, order: int) -> 'SeriesTaylor':
        coeffs = np.zeros(order + 1)
        coeffs[0] = value
        return cls(center, coeffs)

    @classmethod
    def variable(cls, center: float, order: int) -> 'SeriesTaylor':
        """恒等関数 x の級数"""
        coeffs = np.zeros(order + 1)
        coeffs[0] = center
        if order >= 1:
            coeffs[1] = 1.0
        return cls(center, coeffs)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def value(self, x: Optional[float] = None) -> float:
        """点xでの値（省略時は展開点での値 c₀）"""
        if x is None:
            return float(self.coeffs[0])
        return float(np.polynomial.polynomial.polyval(x - self.center, self.coeffs))

    def derivative(self) -> 'SeriesTaylor':
        if self.order == 0:
            raise OrderExhaustedError("0次の級数はこれ以上微分できません")
        return SeriesTaylor(self.center, self.coeffs[1:] * np.arange(1, self.order + 1))

    def truncate(self, order: int) -> 'SeriesTaylor':
        return SeriesTaylor(self.center, self.coeffs[:order + 1])

    def reciprocal(self) -> 'SeriesTaylor':
        c0 = self.coeffs[0]
        if c0 == 0.0:
            raise AimError("定数項が0の級数の逆数は定義できません")
        result = np.zeros_like(self.coeffs)
        result[0] = 1.0 / c0
        for j in range(1, self.order + 1):
            result[j] = -np.dot(self.coeffs[1:j + 1], result[j - 1::-1]) / c0
        return SeriesTaylor(self.center, result)

    def _coerce(self, other: 'SeriesTaylor') -> Tuple[np.ndarray, np.ndarray]:
        if not np.isclose(self.center, other.center):
            raise AimError(f"展開点が異なる級数は結合できません: {self.center} != {other.center}")
        order = min(self.order, other.order)
        return self.coeffs[:order + 1], other.coeffs[:order + 1]

    def __add__(self, other: Union['SeriesTaylor', Scalar]) -> 'SeriesTaylor':
        if isinstance(other, SeriesTaylor):
            left, right = self._coerce(other)
            return SeriesTaylor(self.center, left + right)
        coeffs = self.coeffs.copy()
        coeffs[0] += other
        return SeriesTaylor(self.center, coeffs)

    __radd__ = __add__

    def __neg__(self) -> 'SeriesTaylor':
        return SeriesTaylor(self.center, -self.coeffs)

    def __sub__(self, other: Union['SeriesTaylor', Scalar]) -> 'SeriesTaylor':
        return self + (-other)

    def __rsub__(self, other: Scalar) -> 'SeriesTaylor':
        return (-self) + other

    def __mul__(self, other: Union['SeriesTaylor', Scalar]) -> 'SeriesTaylor':
        if isinstance(other, SeriesTaylor):
            left, right = self._coerce(other)
            product = np.convolve(left, right)[:left.size]
            return SeriesTaylor(self.center, product)
        return SeriesTaylor(self.center, self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other: Union['SeriesTaylor', Scalar]) -> 'SeriesTaylor':
        if isinstance(other, SeriesTaylor):
            return self * other.reciprocal()
        return SeriesTaylor(self.center, self.coeffs / other)

    def __rtruediv__(self, other: Scalar) -> 'SeriesTaylor':
        return self.reciprocal() * other


@dataclass(frozen=True)
class AimProblem:
    """y'' = λ₀ y' + s₀ y 形式の固有値問題

    lambda0, s0 は固有値パラメータEを受け取り、x0まわりの級数を返す関数です。
    Eに対して係数が定義できない場合はCoefficientDomainErrorを送出します。
    """
    lambda0: Callable[[float], SeriesTaylor]
    s0: Callable[[float], SeriesTaylor]
    x0: float
    k_max: int = 15

    def __post_init__(self):
        if self.k_max < 1:
            raise AimError(f"k_maxは1以上である必要があります: {self.k_max}")


class AimRoot(NamedTuple):
    """AIMで得た固有値。shiftは深さk+1の対応する根との差"""
    energy: float
    converged: bool
    shift: float


def _iterate(problem: AimProblem, E: float, k: int) -> List[Tuple[SeriesTaylor, SeriesTaylor]]:
    """(λ_0, s_0), …, (λ_k, s_k) を返す"""
    if k < 1 or k > problem.k_max:
        raise AimError(f"反復深さkは1以上k_max({problem.k_max})以下である必要があります: k={k}")

    lambda0 = problem.lambda0(E)
    s0 = problem.s0(E)
    pairs = [(lambda0, s0)]
    lambda_prev, s_prev = lambda0, s0
    for _ in range(k):
        lambda_next = lambda_prev.derivative() + s_prev + lambda0 * lambda_prev
        s_next = s_prev.derivative() + s0 * lambda_prev
        pairs.append((lambda_next, s_next))
        lambda_prev, s_prev = lambda_next, s_next
    return pairs


def aim_iterate(problem: AimProblem, E: float, k: int) -> Tuple[SeriesTaylor, SeriesTaylor]:
    """漸化式をk回適用した (λ_k, s_k) を返す

    Raises:
        OrderExhaustedError: k回の反復前に級数の次数を使い切った場合
    """
    return _iterate(problem, E, k)[-1]


def aim_delta(problem: AimProblem, E: float, k: int) -> float:
    """δ_k = λ_k s_{k-1} - λ_{k-1} s_k をx0で評価する"""
    pairs = _iterate(problem, E, k)
    lambda_k, s_k = pairs[k]
    lambda_prev, s_prev = pairs[k - 1]
    x0 = problem.x0
    return lambda_k.value(x0) * s_prev.value(x0) - lambda_prev.value(x0) * s_k.value(x0)


def _delta_or_nan(problem: AimProblem, E: float, k: int) -> float:
    try:
        return aim_delta(problem, E, k)
    except CoefficientDomainError:
        return float('nan')


def _roots_at_depth(
    problem: AimProblem,
    grid: np.ndarray,
    k: int,
    tol: float
) -> List[float]:
    values = np.array([_delta_or_nan(problem, E, k) for E in grid])

    finite_ends = [abs(v) for v in (values[0], values[-1]) if np.isfinite(v) and v != 0.0]
    scale = max(finite_ends) if finite_ends else 1.0
    scaled = values / scale

    def scaled_delta(E: float) -> float:
        return _delta_or_nan(problem, E, k) / scale

    return scan_roots(scaled_delta, grid, scaled, tol=tol)


def aim_eigenvalues(
    problem: AimProblem,
    scan: Tuple[float, float],
    grid: int,
    k: int,
    tol: float = 1e-12,
    agreement: Optional[float] = None
) -> List[AimRoot]:
    """δ_k(x0; E) の符号変化から固有値を求め昇順で返す

    各根は深さk+1の根と 10·tol（agreement指定時はその値）以内で一致した場合に収束とみなします。
    k+1 がk_maxを超える場合は比較できないため未収束として扱います。

    Args:
        problem: AIM問題
        scan: 走査区間 (下端, 上端)
        grid: 格子点数（16以上）
        k: 反復深さ
        tol: 二分法の許容幅

    Returns:
        List[AimRoot]: 昇順の根。見つからない場合は空リスト
    """
    lower, upper = float(scan[0]), float(scan[1])
    if not (np.isfinite(lower) and np.isfinite(upper)) or lower >= upper:
        raise AimError(f"走査区間が不正です: [{lower}, {upper}]")
    if grid < 16:
        raise AimError(f"格子点数は16以上である必要があります: grid={grid}")

    agreement = 10.0 * tol if agreement is None else agreement
    energies = np.linspace(lower, upper, grid)

    roots = _roots_at_depth(problem, energies, k, tol)
    if not roots:
        logger.debug(f"AIM found no root in [{lower}, {upper}] at k={k}")
        return []

    if k + 1 > problem.k_max:
        logger.warning(f"AIM convergence cannot be checked: k+1={k + 1} exceeds k_max={problem.k_max}")
        return [AimRoot(energy, False, float('nan')) for energy in roots]

    deeper = _roots_at_depth(problem, energies, k + 1, tol)
    results = []
    for energy in roots:
        shift = min((abs(energy - other) for other in deeper), default=float('inf'))
        converged = shift <= agreement
        if not converged:
            logger.warning(f"AIM root {energy:.12g} not converged between k={k} and k={k + 1}: shift={shift:.3e}")
        results.append(AimRoot(energy, converged, shift))
    return results


def tpt_coefficients(
    center: float,
    order: int,
    p: float,
    q: float,
    beta_ratio: float,
    weight: Optional[SeriesTaylor] = None
) -> Tuple[SeriesTaylor, SeriesTaylor]:
    """三角Pöschl-Teller型の z 方程式の λ₀, s₀ を返す

    λ₀ = [4z(P+½) - (4p+1)] / (2z(1-z)),  s₀ = (β²/α² + 4P²) / (4z(1-z)),  P = p + q

    Args:
        center: 展開点 z0
        order: 級数の次数
        p, q: 端点の指数
        beta_ratio: β²/α²
        weight: 1/(z(1-z)) の級数（再利用する場合）
    """
    z = SeriesTaylor.variable(center, order)
    if weight is None:
        weight = (z * (1.0 - z)).reciprocal()
    total = p + q
    lambda0 = (z * (4.0 * (total + 0.5)) - (4.0 * p + 1.0)) * weight * 0.5
    s0 = weight * (0.25 * (beta_ratio + 4.0 * total * total))
    return lambda0, s0


def tpt_problem(p: float, q: float, x0: float = 0.5, k_max: int = 15, order: int = 36) -> AimProblem:
    """p, qを固定し、固有値パラメータを β²/α² とした可解問題"""
    z = SeriesTaylor.variable(x0, order)
    weight = (z * (1.0 - z)).reciprocal()
    lambda0, _ = tpt_coefficients(x0, order, p, q, 0.0, weight)

    def s0(beta_ratio: float) -> SeriesTaylor:
        return tpt_coefficients(x0, order, p, q, beta_ratio, weight)[1]

    return AimProblem(lambda0=lambda _: lambda0, s0=s0, x0=x0, k_max=k_max)
