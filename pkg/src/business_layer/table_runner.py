"""並列表生成マネージャー - (列の値, 状態) ごとのエネルギー根を並列に求める"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .model import (
    ModelError,
    ModelParams,
    QuantumState,
    WindowDegenerateError,
    default_window,
    solve_energies,
)

logger = logging.getLogger(__name__)


class TableRunError(Exception):
    """表生成処理のエラー"""
    pass


@dataclass(frozen=True)
class EnergyWindow:
    """走査区間の指定。未指定の端はパラメータごとの既定区間を使う"""
    emin: Optional[float] = None
    emax: Optional[float] = None

    def resolve(self, params: ModelParams) -> Tuple[float, float]:
        lower, upper = default_window(params)
        return (
            lower if self.emin is None else self.emin,
            upper if self.emax is None else self.emax,
        )


@dataclass
class TableRunResult:
    """表生成結果"""
    frame: pd.DataFrame
    total_cells: int
    empty_cells: List[Tuple[float, str]] = field(default_factory=list)
    degenerate_cells: List[Tuple[float, str]] = field(default_factory=list)
    duration_seconds: float = 0.0

    @property
    def all_cells_have_roots(self) -> bool:
        return not self.empty_cells and not self.degenerate_cells


class ParallelTableRunner:
    """複数セルのエネルギー根を並列に求めるクラス

    結果は列の値の順、状態の順、根の昇順に並べ替えてから返すので、
    ワーカー数に関わらず同じ表になります。
    """

    COLUMNS = ['column', 'n', 'kappa', 'label', 'index', 'energy', 'residual', 'valid']

    def __init__(self, max_workers: int = 4, grid: int = 4000, tol: float = 1e-12):
        """
        ParallelTableRunnerを初期化

        Args:
            max_workers: 最大ワーカー数
            grid: 各セルの格子点数
            tol: 二分法の許容幅
        """
        if max_workers < 1:
            raise TableRunError(f"ワーカー数は1以上である必要があります: {max_workers}")
        self.max_workers = max_workers
        self.grid = grid
        self.tol = tol
        logger.debug(f"ParallelTableRunner initialized with max_workers={max_workers}, grid={grid}")

    def run(
        self,
        cells: Sequence[Tuple[float, ModelParams]],
        states: Sequence[QuantumState],
        window: Optional[EnergyWindow] = None
    ) -> TableRunResult:
        """全セルを解いて長い形式のDataFrameにまとめる

        Args:
            cells: (列の値, パラメータ) の一覧
            states: 解く状態の一覧
            window: 走査区間の指定

        Returns:
            TableRunResult: 1行1根の表。根の無いセルはenergyが空の行になる

        Raises:
            TableRunError: 想定外のエラーでセルの計算に失敗した場合
        """
        start_time = time.time()
        window = window or EnergyWindow()
        tasks = [
            (column_position, state_position, column, params, state)
            for column_position, (column, params) in enumerate(cells)
            for state_position, state in enumerate(states)
        ]
        logger.info(f"Solving {len(tasks)} cells with {self.max_workers} workers")

        outcomes: Dict[Tuple[int, int], Dict[str, Any]] = {}
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_key = {
                executor.submit(self._solve_cell, params, state, window): (column_position, state_position)
                for column_position, state_position, _, params, state in tasks
            }
            for future in as_completed(future_to_key):
                key = future_to_key[future]
                try:
                    outcomes[key] = future.result()
                except ModelError as e:
                    logger.error(f"❌ Cell {key} failed: {e}")
                    raise TableRunError(f"セル{key}の計算に失敗しました: {e}") from e

        rows: List[Dict[str, Any]] = []
        empty_cells: List[Tuple[float, str]] = []
        degenerate_cells: List[Tuple[float, str]] = []
        for column_position, state_position, column, params, state in tasks:
            outcome = outcomes[(column_position, state_position)]
            base = {'column': column, 'n': state.n, 'kappa': state.kappa, 'label': state.label}
            if outcome['degenerate']:
                degenerate_cells.append((column, state.label))
            if not outcome['roots']:
                if not outcome['degenerate']:
                    empty_cells.append((column, state.label))
                rows.append({**base, 'index': None, 'energy': None, 'residual': None, 'valid': None})
                continue
            for index, root in enumerate(outcome['roots']):
                rows.append({
                    **base,
                    'index': index,
                    'energy': root.energy,
                    'residual': root.residual,
                    'valid': root.valid_radicands,
                })

        duration = time.time() - start_time
        frame = pd.DataFrame(rows, columns=self.COLUMNS)
        frame['index'] = frame['index'].astype('Int64')
        logger.info(
            f"Table completed: {len(tasks)} cells, {frame['energy'].notna().sum()} roots, "
            f"{len(empty_cells) + len(degenerate_cells)} empty in {duration:.2f}s"
        )
        return TableRunResult(
            frame=frame,
            total_cells=len(tasks),
            empty_cells=empty_cells,
            degenerate_cells=degenerate_cells,
            duration_seconds=duration,
        )

    def _solve_cell(self, params: ModelParams, state: QuantumState, window: EnergyWindow) -> Dict[str, Any]:
        """単一セルの根を求める（並列実行用）"""
        try:
            result = solve_energies(params, state, window.resolve(params), grid=self.grid, tol=self.tol)
        except WindowDegenerateError as e:
            logger.warning(f"⚠️  {state.label}: {e}")
            return {'roots': (), 'degenerate': True}
        return {'roots': result.roots, 'degenerate': False}
