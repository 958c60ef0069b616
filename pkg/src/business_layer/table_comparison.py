"""計算した表と参照表の比較"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# 列の値（Aや掃引値）を同一とみなす幅
COLUMN_MATCH_TOLERANCE = 1e-9


@dataclass
class ComparisonReport:
    """参照表との比較結果

    rows の列: n, kappa, column, index, reference, computed, delta, suspect, match
    参照値に対応する計算値が無い行は computed が NaN、delta が inf になります。
    """
    table: str
    tolerance: float
    rows: pd.DataFrame

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def mismatch_count(self) -> int:
        return int((~self.rows['match']).sum())

    @property
    def suspect_mismatch_count(self) -> int:
        return int((~self.rows['match'] & (self.rows['suspect'] == 1)).sum())

    @property
    def max_delta(self) -> float:
        if self.rows.empty:
            return 0.0
        return float(self.rows['delta'].max())

    @property
    def passed(self) -> bool:
        return self.mismatch_count == 0

    def summary(self) -> str:
        return (
            f"{self.table}: {self.total} entries, max |Δ| = {self.max_delta:.3e}, "
            f"mismatches = {self.mismatch_count} (suspect {self.suspect_mismatch_count}), "
            f"tolerance = {self.tolerance:g}"
        )


class TableComparator:
    """参照表の各行に最も近い計算根を対応付けて差を調べるクラス"""

    def __init__(self, tolerance: float = 5e-9):
        if not tolerance > 0:
            raise ValueError(f"許容誤差は正である必要があります: {tolerance}")
        self.tolerance = tolerance

    def compare(self, name: str, computed: pd.DataFrame, reference: pd.DataFrame) -> ComparisonReport:
        """
        Args:
            name: 表の名前
            computed: ParallelTableRunnerが返す長い形式の表
            reference: ReferenceTableRepositoryが返す参照表

        Returns:
            ComparisonReport: 参照表の行順の比較結果
        """
        solved = computed.dropna(subset=['energy'])
        records = []
        for ref in reference.to_dict('records'):
            cell = solved[
                (solved['n'] == ref['n'])
                & (solved['kappa'] == ref['kappa'])
                & np.isclose(solved['column'].astype(float), ref['column'], rtol=0.0, atol=COLUMN_MATCH_TOLERANCE)
            ]
            if cell.empty:
                nearest, delta = np.nan, np.inf
            else:
                deltas = (cell['energy'].astype(float) - ref['energy']).abs()
                position = int(np.argmin(deltas.to_numpy()))
                nearest = float(cell['energy'].iloc[position])
                delta = float(deltas.iloc[position])
            records.append({
                'n': ref['n'],
                'kappa': ref['kappa'],
                'column': ref['column'],
                'index': ref['index'],
                'reference': ref['energy'],
                'computed': nearest,
                'delta': delta,
                'suspect': ref['suspect'],
                'match': bool(delta <= self.tolerance),
            })

        rows = pd.DataFrame(
            records,
            columns=['n', 'kappa', 'column', 'index', 'reference', 'computed', 'delta', 'suspect', 'match'],
        )
        rows['match'] = rows['match'].astype(bool)
        report = ComparisonReport(name, self.tolerance, rows)
        if report.passed:
            logger.info(f"✅ {report.summary()}")
        else:
            logger.warning(f"❌ {report.summary()}")
        return report
