"""物理モデル

三角Pöschl-Tellerポテンシャルとクーロン型テンソル項を含むDirac方程式について、
スピン・擬スピン対称性極限の量子化残差、エネルギー根の走査、非相対論極限を扱います。
"""
import dataclasses
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Protocol, Tuple, Union

import numpy as np

from . import aim
from .root_finding import RootFindingError, bisect, find_brackets

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

ORBITAL_LETTERS = "spdfghiklmnoqrtuvwxyz"

# 特異点判定に使う |sin|, |cos| の下限
POLE_EPSILON = 1e-12


class ModelError(Exception):
    """物理モデル関連のエラー"""
    pass


class InvalidParameterError(ModelError, ValueError):
    """モデルパラメータが不正な場合のエラー"""
    pass


class InvalidStateError(ModelError, ValueError):
    """量子数が不正な場合のエラー"""
    pass


class SingularPotentialError(ModelError, ValueError):
    """ポテンシャルの極で評価しようとした場合のエラー"""
    pass


class WindowDegenerateError(ModelError):
    """走査区間が有効域との共通部分を持たない場合のエラー"""
    pass


class SymmetryLimit(str, Enum):
    """対称性極限"""
    SPIN = "spin"
    PSPIN = "pspin"


class PotentialParams(NamedTuple):
    """ポテンシャル形状だけを決めるパラメータ"""
    V1: float
    V2: float
    alpha: float


class HasPotential(Protocol):
    V1: float
    V2: float
    alpha: float


@dataclass(frozen=True)
class ModelParams:
    """物理パラメータ（単位 fm⁻¹、Aは無次元）

    Cはlimit=spinのときC_s、limit=pspinのときC_psを表します。
    """
    M: float
    V1: float
    V2: float
    alpha: float
    A: float
    limit: SymmetryLimit
    C: float

    def __post_init__(self):
        try:
            object.__setattr__(self, 'limit', SymmetryLimit(self.limit))
        except ValueError as e:
            raise InvalidParameterError(f"対称性極限はspinまたはpspinである必要があります: {self.limit}") from e
        for name in ('M', 'V1', 'V2', 'alpha', 'A', 'C'):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise InvalidParameterError(f"パラメータ{name}が有限値ではありません: {value}")
            object.__setattr__(self, name, float(value))
        if not self.alpha > 0:
            raise InvalidParameterError(f"alphaは正である必要があります: {self.alpha}")
        if not self.M > 0:
            raise InvalidParameterError(f"Mは正である必要があります: {self.M}")

    def replace(self, **changes) -> 'ModelParams':
        return dataclasses.replace(self, **changes)

    @property
    def potential(self) -> PotentialParams:
        return PotentialParams(self.V1, self.V2, self.alpha)

    def energy_factor_offset(self) -> float:
        """γ_i = (E + c0)·V_i となる c0"""
        if self.limit is SymmetryLimit.PSPIN:
            return -self.M - self.C
        return self.M - self.C


class KappaMapping(NamedTuple):
    """κから導かれる量子数とスペクトル記号"""
    ell: int
    ell_tilde: int
    j: str
    label: str


def kappa_mapping(kappa: int, limit: Union[SymmetryLimit, str]) -> KappaMapping:
    """κ から (ℓ, ℓ̃, j, 記号) を求める

    κ < 0 では ℓ = -κ-1, ℓ̃ = -κ、κ > 0 では ℓ = κ, ℓ̃ = κ-1 で、j = |κ| - ½ です。
    記号は両極限とも上成分のℓで表します（例: κ=-1 → "s1/2", κ=2 → "d3/2"）。

    Raises:
        InvalidStateError: κ = 0 の場合
    """
    SymmetryLimit(limit)
    if isinstance(kappa, bool) or int(kappa) != kappa or kappa == 0:
        raise InvalidStateError(f"κは0でない整数である必要があります: κ={kappa}")
    kappa = int(kappa)
    if kappa < 0:
        ell, ell_tilde = -kappa - 1, -kappa
    else:
        ell, ell_tilde = kappa, kappa - 1
    j = f"{2 * abs(kappa) - 1}/2"
    letter = ORBITAL_LETTERS[ell] if ell < len(ORBITAL_LETTERS) else f"[{ell}]"
    return KappaMapping(ell, ell_tilde, j, f"{letter}{j}")


@dataclass(frozen=True)
class QuantumState:
    """量子状態 (n, κ)"""
    n: int
    kappa: int
    limit: SymmetryLimit

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise InvalidStateError(f"nは0以上の整数である必要があります: n={self.n}")
        mapping = kappa_mapping(self.kappa, self.limit)
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'kappa', int(self.kappa))
        object.__setattr__(self, 'limit', SymmetryLimit(self.limit))
        object.__setattr__(self, '_mapping', mapping)

    @property
    def ell(self) -> int:
        return self._mapping.ell

    @property
    def ell_tilde(self) -> int:
        return self._mapping.ell_tilde

    @property
    def j(self) -> str:
        return self._mapping.j

    @property
    def label(self) -> str:
        # 擬スピンのκ > 0 は表の慣習に合わせ n-1 で表記する
        n_label = self.n
        if self.limit is SymmetryLimit.PSPIN and self.kappa > 0:
            n_label = max(self.n - 1, 0)
        return f"{n_label}{self._mapping.label}"


class DerivedParams(NamedTuple):
    """量子化条件で使う組み合わせ（β²は符号付きのまま保持）"""
    gamma1: ArrayLike
    gamma2: ArrayLike
    beta_sq: ArrayLike
    delta: float


class Residual(NamedTuple):
    value: float
    valid: bool


class ValidityInterval(NamedTuple):
    """両方の根号の中身が非負になるエネルギー区間"""
    lower: float
    upper: float

    @property
    def is_empty(self) -> bool:
        return not self.lower <= self.upper


@dataclass(frozen=True)
class EnergyRoot:
    energy: float
    residual: float
    valid_radicands: bool


@dataclass(frozen=True)
class EnergyRootSet:
    """走査区間内で見つかった全ての根"""
    roots: Tuple[EnergyRoot, ...]
    scan_window: Tuple[float, float]
    grid_points: int

    @property
    def energies(self) -> Tuple[float, ...]:
        return tuple(root.energy for root in self.roots)

    def __len__(self) -> int:
        return len(self.roots)


def potential_tpt(r: ArrayLike, params: HasPotential) -> ArrayLike:
    """V(r) = V₁/sin²(αr) + V₂/cos²(αr)

    Raises:
        SingularPotentialError: αr が kπ/2 に一致する場合
    """
    x = params.alpha * np.asarray(r, dtype=float)
    sin_x, cos_x = np.sin(x), np.cos(x)
    if np.any(np.abs(sin_x) < POLE_EPSILON) or np.any(np.abs(cos_x) < POLE_EPSILON):
        raise SingularPotentialError(f"ポテンシャルの極で評価しようとしました: αr={x}")
    value = params.V1 / sin_x ** 2 + params.V2 / cos_x ** 2
    return float(value) if np.ndim(value) == 0 else value


def find_pole(alpha: float, r_min: float, r_max: float, margin: float = 1e-9) -> Optional[float]:
    """[r_min, r_max] から margin 以内にある極 r = kπ/(2α) を返す（無ければNone）"""
    spacing = math.pi / (2.0 * alpha)
    k = math.ceil((r_min - margin) / spacing)
    candidate = k * spacing
    if candidate <= r_max + margin:
        return candidate
    return None


def centrifugal_approx_error(alpha: float, r: ArrayLike) -> ArrayLike:
    """遠心項近似 1/r² ≈ α²/sin²(αr) の相対誤差 (αr)²/sin²(αr) - 1

    Raises:
        ValueError: αr が (0, π) の外にある場合
    """
    x = alpha * np.asarray(r, dtype=float)
    if np.any(x <= 0.0) or np.any(x >= math.pi):
        raise ValueError(f"αrは(0, π)の範囲内である必要があります: {x}")
    error = x ** 2 / np.sin(x) ** 2 - 1.0
    return float(error) if np.ndim(error) == 0 else error


def _delta(params: ModelParams, kappa: int) -> float:
    shifted = kappa + params.A
    if params.limit is SymmetryLimit.PSPIN:
        return shifted * (shifted - 1.0)
    return shifted * (shifted + 1.0)


def derived_params(params: ModelParams, E: ArrayLike, kappa: int) -> DerivedParams:
    """エネルギーEでの (γ₁, γ₂, β², δ)

    擬スピン: γ̄ᵢ = (E-M-C)Vᵢ, β̄² = (M+E)(M-E+C), δ̄ = (κ+A)(κ+A-1)
    スピン:   γᵢ = (M+E-C)Vᵢ, β² = (M-E)(M+E-C), δ = (κ+A)(κ+A+1)
    """
    E = np.asarray(E, dtype=float) if np.ndim(E) else float(E)
    factor = E + params.energy_factor_offset()
    if params.limit is SymmetryLimit.PSPIN:
        beta_sq = (params.M + E) * (params.M - E + params.C)
    else:
        beta_sq = (params.M - E) * (params.M + E - params.C)
    return DerivedParams(
        gamma1=factor * params.V1,
        gamma2=factor * params.V2,
        beta_sq=beta_sq,
        delta=_delta(params, kappa),
    )


def _radicands(alpha: float, derived: DerivedParams) -> Tuple[ArrayLike, ArrayLike]:
    """(1 + 4δ + 4γ₁/α², 1 + 4γ₂/α²)"""
    alpha_sq = alpha * alpha
    first = 1.0 + 4.0 * derived.delta + 4.0 * derived.gamma1 / alpha_sq
    second = 1.0 + 4.0 * derived.gamma2 / alpha_sq
    return first, second


def _residual_from_derived(n: int, alpha: float, derived: DerivedParams) -> Tuple[np.ndarray, np.ndarray]:
    first, second = _radicands(alpha, derived)
    valid = (np.asarray(first) >= 0.0) & (np.asarray(second) >= 0.0)
    root_sum = np.sqrt(np.clip(first, 0.0, None)) + np.sqrt(np.clip(second, 0.0, None))
    bracket = n + 0.5 + 0.25 * root_sum
    value = derived.beta_sq + 4.0 * alpha * alpha * bracket * bracket
    return np.where(valid, value, np.nan), valid


def _residual_array(params: ModelParams, state: QuantumState, energies: np.ndarray) -> np.ndarray:
    derived = derived_params(params, np.asarray(energies, dtype=float), state.kappa)
    values, _ = _residual_from_derived(state.n, params.alpha, derived)
    return values


def quantization_residual(params: ModelParams, state: QuantumState, E: float) -> Residual:
    """量子化残差 f(E) = β² + 4α²[n + ½ + ¼(√(1+4γ₂/α²) + √(1+4δ+4γ₁/α²))]²

    根号の中身が負になる場合は valid=False とし、値はNaNになります。
    """
    derived = derived_params(params, float(E), state.kappa)
    value, valid = _residual_from_derived(state.n, params.alpha, derived)
    return Residual(float(value), bool(valid))


def validity_interval(params: ModelParams, state: QuantumState) -> ValidityInterval:
    """両方の根号の中身が非負になるエネルギー区間を解析的に求める

    中身はいずれも a + b·(E + c0) の一次式です。
    """
    alpha_sq = params.alpha * params.alpha
    offset = params.energy_factor_offset()
    lower, upper = -math.inf, math.inf
    terms = (
        (1.0 + 4.0 * _delta(params, state.kappa), 4.0 * params.V1 / alpha_sq),
        (1.0, 4.0 * params.V2 / alpha_sq),
    )
    for constant, slope in terms:
        if slope == 0.0:
            if constant < 0.0:
                return ValidityInterval(math.inf, -math.inf)
            continue
        bound = -constant / slope - offset
        if slope > 0.0:
            lower = max(lower, bound)
        else:
            upper = min(upper, bound)
    return ValidityInterval(lower, upper)


def default_window(params: ModelParams) -> Tuple[float, float]:
    """擬スピン [-M-|C|-1, M+1]、スピン [-M-1, M+|C|+1]"""
    if params.limit is SymmetryLimit.PSPIN:
        return (-params.M - abs(params.C) - 1.0, params.M + 1.0)
    return (-params.M - 1.0, params.M + abs(params.C) + 1.0)


def _scan_interval(params: ModelParams, state: QuantumState, window: Tuple[float, float]) -> Tuple[float, float]:
    lower, upper = float(window[0]), float(window[1])
    if not (np.isfinite(lower) and np.isfinite(upper)) or lower >= upper:
        raise WindowDegenerateError(f"走査区間が不正です: [{lower}, {upper}]")

    validity = validity_interval(params, state)
    lower = max(lower, validity.lower)
    upper = min(upper, validity.upper)
    # 境界の丸め誤差で根号の中身が負にならないよう内側へ寄せる
    lower += 1e-12 * max(1.0, abs(lower))
    upper -= 1e-12 * max(1.0, abs(upper))
    if not lower < upper:
        raise WindowDegenerateError(
            f"走査区間 [{window[0]}, {window[1]}] が有効域 [{validity.lower}, {validity.upper}] と重なりません"
        )
    return lower, upper


def solve_energies(
    params: ModelParams,
    state: QuantumState,
    window: Optional[Tuple[float, float]] = None,
    grid: int = 4000,
    tol: float = 1e-12
) -> EnergyRootSet:
    """量子化残差を格子走査し、符号変化を二分法で精密化して全ての根を返す

    Args:
        params: モデルパラメータ
        state: 量子状態
        window: 走査区間（省略時はdefault_window）
        grid: 格子点数
        tol: 二分法の許容幅

    Returns:
        EnergyRootSet: 昇順の根（空の場合もある）

    Raises:
        WindowDegenerateError: 区間が有効域と重ならない場合
    """
    if grid < 2:
        raise InvalidParameterError(f"格子点数は2以上である必要があります: grid={grid}")
    window = default_window(params) if window is None else window
    lower, upper = _scan_interval(params, state, window)

    energies = np.linspace(lower, upper, grid)
    values = _residual_array(params, state, energies)

    def residual(E: float) -> float:
        return quantization_residual(params, state, E).value

    roots = []
    for bracket in find_brackets(energies, values):
        try:
            energy = bisect(residual, bracket, tol=tol)
        except RootFindingError as e:
            logger.warning(f"Root refinement failed for {state.label}: {e}")
            continue
        check = quantization_residual(params, state, energy)
        if abs(check.value) > 1e-9 * max(1.0, energy * energy):
            logger.warning(f"Root {energy:.12g} of {state.label} has residual {check.value:.3e}")
        roots.append(EnergyRoot(energy, check.value, check.valid))

    roots.sort(key=lambda root: root.energy)
    logger.debug(f"{state.label}: {len(roots)} root(s) in [{lower:.12g}, {upper:.12g}]")
    return EnergyRootSet(tuple(roots), (float(window[0]), float(window[1])), grid)


def nonrel_energy(n: int, ell: int, mu: float, alpha: float, V1: float, V2: float) -> float:
    """非相対論極限のエネルギー

    E = (α²/8μ)[2 + √(1+8μV₂/α²) + √((1+2ℓ)² + 8μV₁/α²) + 4n]²

    Raises:
        ModelError: 根号の中身が負の場合
    """
    alpha_sq = alpha * alpha
    second = 1.0 + 8.0 * mu * V2 / alpha_sq
    first = (1.0 + 2.0 * ell) ** 2 + 8.0 * mu * V1 / alpha_sq
    if first < 0.0 or second < 0.0:
        raise ModelError(f"非相対論極限の根号の中身が負です: ({first}, {second})")
    return alpha_sq / (8.0 * mu) * (2.0 + math.sqrt(second) + math.sqrt(first) + 4.0 * n) ** 2


def nonrel_consistency_residual(
    n: int, ell: int, mu: float, alpha: float, V1: float, V2: float, E_nl: float
) -> float:
    """スピン極限の残差に M+E-C_s → 2μ, M-E → -E_nl, A=0 を代入した値"""
    derived = DerivedParams(
        gamma1=2.0 * mu * V1,
        gamma2=2.0 * mu * V2,
        beta_sq=-2.0 * mu * E_nl,
        delta=float(ell * (ell + 1)),
    )
    value, _ = _residual_from_derived(n, alpha, derived)
    return float(value)


def build_aim_problem(
    params: ModelParams,
    state: QuantumState,
    x0: float = 0.5,
    k_max: int = 15,
    order: int = 36
) -> aim.AimProblem:
    """エネルギーEを固有値パラメータとするz方程式のAIM問題を組み立てる

    根号の中身が負になるEではCoefficientDomainErrorを送出します。
    """
    z = aim.SeriesTaylor.variable(x0, order)
    weight = (z * (1.0 - z)).reciprocal()
    alpha_sq = params.alpha * params.alpha

    def coefficients(E: float) -> Tuple[aim.SeriesTaylor, aim.SeriesTaylor]:
        derived = derived_params(params, E, state.kappa)
        first, second = _radicands(params.alpha, derived)
        if first < 0.0 or second < 0.0:
            raise aim.CoefficientDomainError(f"E={E} で根号の中身が負です")
        p = 0.25 + 0.25 * math.sqrt(first)
        q = 0.25 + 0.25 * math.sqrt(second)
        return aim.tpt_coefficients(x0, order, p, q, derived.beta_sq / alpha_sq, weight)

    return aim.AimProblem(
        lambda0=lambda E: coefficients(E)[0],
        s0=lambda E: coefficients(E)[1],
        x0=x0,
        k_max=k_max,
    )
