"""格子走査による符号変化の検出と二分法による根の精密化"""
import logging
import math
from typing import Callable, List, NamedTuple, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class RootFindingError(Exception):
    """根の探索に関するエラー"""
    pass


class Bracket(NamedTuple):
    """根を挟む区間。lower == upper の場合は格子点上の厳密な零点"""
    lower: float
    upper: float
    f_lower: float
    f_upper: float

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper


def find_brackets(xs: Sequence[float], values: Sequence[float]) -> List[Bracket]:
    """隣接する有限値の間の符号変化を列挙する

    NaNの格子点はマスクとして扱い、それを跨ぐ区間は採用しません。
    格子点上の厳密な零点は一度だけ記録します。
    """
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    if xs.shape != values.shape:
        raise RootFindingError(f"格子と値の長さが一致しません: {xs.shape} != {values.shape}")

    brackets: List[Bracket] = []
    for i in range(len(xs)):
        f_i = values[i]
        if not np.isfinite(f_i):
            continue
        if f_i == 0.0:
            brackets.append(Bracket(xs[i], xs[i], 0.0, 0.0))
            continue
        if i + 1 >= len(xs):
            break
        f_next = values[i + 1]
        if not np.isfinite(f_next) or f_next == 0.0:
            continue
        if math.copysign(1.0, f_i) != math.copysign(1.0, f_next):
            brackets.append(Bracket(xs[i], xs[i + 1], f_i, f_next))
    return brackets


def bisect(
    func: Callable[[float], float],
    bracket: Bracket,
    tol: float = 1e-12,
    max_iter: int = 200
) -> float:
    """符号変化を挟む区間を |Δx| <= tol まで二分する

    Raises:
        RootFindingError: 区間内で関数値が非有限になった場合
    """
    if bracket.is_exact:
        return bracket.lower

    lower, upper = bracket.lower, bracket.upper
    f_lower = bracket.f_lower
    for _ in range(max_iter):
        if upper - lower <= tol:
            break
        middle = 0.5 * (lower + upper)
        f_middle = func(middle)
        if not np.isfinite(f_middle):
            raise RootFindingError(f"二分法の途中で関数値が非有限になりました: x={middle}")
        if f_middle == 0.0:
            return middle
        if math.copysign(1.0, f_middle) == math.copysign(1.0, f_lower):
            lower, f_lower = middle, f_middle
        else:
            upper = middle
    else:
        logger.warning(f"Bisection reached max_iter={max_iter}: width={upper - lower:.3e}")
    return 0.5 * (lower + upper)


def scan_roots(
    func: Callable[[float], float],
    xs: Sequence[float],
    values: Sequence[float],
    tol: float = 1e-12
) -> List[float]:
    """格子上の値から全ての根を求め昇順で返す"""
    roots = [bisect(func, bracket, tol=tol) for bracket in find_brackets(xs, values)]
    return sorted(roots)
