"""AIMと閉形式のエネルギー根の照合"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import pandas as pd

from . import aim
from .model import ModelParams, QuantumState, WindowDegenerateError, build_aim_problem, solve_energies

logger = logging.getLogger(__name__)


class CheckStatus(str, Enum):
    OK = "ok"
    MISMATCH = "mismatch"
    MISSING = "missing"
    NOT_CONVERGED = "not-converged"


@dataclass(frozen=True)
class CrossCheckEntry:
    """1つの閉形式根に対する照合結果"""
    n: int
    kappa: int
    label: str
    depth: int
    closed_form: float
    aim_energy: float
    delta: float
    shift: float
    status: CheckStatus


@dataclass
class CrossCheckReport:
    tolerance: float
    entries: List[CrossCheckEntry] = field(default_factory=list)

    @property
    def max_delta(self) -> float:
        deltas = [entry.delta for entry in self.entries if math.isfinite(entry.delta)]
        return max(deltas, default=0.0)

    @property
    def exit_code(self) -> int:
        """根の欠落・未収束は2、差が大きい場合は3、全て一致なら0"""
        statuses = {entry.status for entry in self.entries}
        if not self.entries or statuses & {CheckStatus.MISSING, CheckStatus.NOT_CONVERGED}:
            return 2
        if CheckStatus.MISMATCH in statuses:
            return 3
        return 0

    def to_frame(self) -> pd.DataFrame:
        columns = ['n', 'kappa', 'label', 'depth', 'closed_form', 'aim', 'delta', 'shift', 'status']
        return pd.DataFrame(
            [
                [e.n, e.kappa, e.label, e.depth, e.closed_form, e.aim_energy, e.delta, e.shift, e.status.value]
                for e in self.entries
            ],
            columns=columns,
        )


class SpectrumCrossCheck:
    """閉形式の根の近傍でAIMの根を求め、両者の差を調べるクラス

    δ_k は深さ k 以下の全ての n' の根で零になるため、各根の周りに
    他の閉形式根との距離の半分（上限 1e-2·max(1,|E|)）の窓を取って探索します。
    """

    def __init__(
        self,
        x0: float = 0.5,
        k_max: int = 15,
        order: int = 36,
        grid: int = 64,
        tolerance: float = 1e-12,
        check_tolerance: float = 1e-8,
        solver_grid: int = 4000,
        solver_tolerance: float = 1e-12
    ):
        self.x0 = x0
        self.k_max = k_max
        self.order = order
        self.grid = grid
        self.tolerance = tolerance
        self.check_tolerance = check_tolerance
        self.solver_grid = solver_grid
        self.solver_tolerance = solver_tolerance

    def _closed_form_roots(self, params: ModelParams, state: QuantumState, window) -> List[float]:
        try:
            return list(solve_energies(params, state, window, self.solver_grid, self.solver_tolerance).energies)
        except WindowDegenerateError:
            return []

    def run(
        self,
        params: ModelParams,
        states: Sequence[QuantumState],
        k: Optional[int] = None,
        window=None
    ) -> CrossCheckReport:
        """
        Args:
            params: モデルパラメータ
            states: 照合する状態（通常は同じκの n = 0..n_max）
            k: 全ての n に使う反復深さ（省略時は n+2）
            window: 閉形式根の走査区間（省略時は既定区間）

        Returns:
            CrossCheckReport: 状態・根ごとの照合結果
        """
        report = CrossCheckReport(self.check_tolerance)
        for state in states:
            depth = state.n + 2 if k is None else k
            closed = self._closed_form_roots(params, state, window)
            if not closed:
                logger.warning(f"{state.label}: no closed-form root to check")
                report.entries.append(CrossCheckEntry(
                    state.n, state.kappa, state.label, depth,
                    math.nan, math.nan, math.inf, math.nan, CheckStatus.MISSING,
                ))
                continue

            neighbours = list(closed)
            for other_n in range(max(depth, state.n) + 2):
                if other_n != state.n:
                    other = QuantumState(other_n, state.kappa, state.limit)
                    neighbours.extend(self._closed_form_roots(params, other, window))

            problem = build_aim_problem(params, state, self.x0, self.k_max, self.order)
            for energy in closed:
                report.entries.append(self._check_root(problem, state, depth, energy, neighbours))

        log = logger.info if report.exit_code == 0 else logger.warning
        log(f"AIM cross-check: {len(report.entries)} root(s), max |Δ| = {report.max_delta:.3e}")
        return report

    def _check_root(
        self,
        problem: aim.AimProblem,
        state: QuantumState,
        depth: int,
        energy: float,
        neighbours: Sequence[float]
    ) -> CrossCheckEntry:
        scale = max(1.0, abs(energy))
        distances = [abs(energy - other) for other in neighbours if abs(energy - other) > 1e-9 * scale]
        half_width = min([0.5 * d for d in distances] + [1e-2 * scale])

        def entry(aim_energy: float, shift: float, status: CheckStatus) -> CrossCheckEntry:
            delta = abs(aim_energy - energy) if math.isfinite(aim_energy) else math.inf
            return CrossCheckEntry(
                state.n, state.kappa, state.label, depth, energy, aim_energy, delta, shift, status
            )

        try:
            roots = aim.aim_eigenvalues(
                problem, (energy - half_width, energy + half_width), self.grid, depth, self.tolerance
            )
        except aim.AimError as e:
            logger.warning(f"{state.label}: AIM failed near {energy:.12g}: {e}")
            return entry(math.nan, math.nan, CheckStatus.MISSING)

        if not roots:
            logger.warning(f"{state.label}: AIM found no root near {energy:.12g} at k={depth}")
            return entry(math.nan, math.nan, CheckStatus.MISSING)

        nearest = min(roots, key=lambda root: abs(root.energy - energy))
        if not nearest.converged:
            status = CheckStatus.NOT_CONVERGED
        elif abs(nearest.energy - energy) > self.check_tolerance:
            status = CheckStatus.MISMATCH
        else:
            status = CheckStatus.OK
        logger.debug(f"{state.label}: k={depth} closed={energy:.12g} aim={nearest.energy:.12g}")
        return entry(nearest.energy, nearest.shift, status)
