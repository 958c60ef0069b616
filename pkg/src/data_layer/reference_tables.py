"""参照表モジュール - 公表されたエネルギー固有値表のフィクスチャ読み込み"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

logger = logging.getLogger(__name__)

DEFAULT_REFERENCE_DIR = Path(__file__).resolve().parent / 'reference'


class ReferenceDataError(Exception):
    """参照データ関連のエラー"""
    pass


class ReferenceTableRepository:
    """reference/ 以下の tableN.csv を読み込むクラス

    各行は一つの印刷値で、列は以下の通りです:
        - n, kappa: 量子数
        - column: Aの値または掃引値
        - index: セル内での印刷順
        - energy: 印刷されたエネルギー
        - suspect: 誤植が疑われる行なら1
    """

    REQUIRED_COLUMNS = ['n', 'kappa', 'column', 'index', 'energy', 'suspect']

    def __init__(self, base_dir: Optional[Union[str, Path]] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else DEFAULT_REFERENCE_DIR
        self._cache: Dict[str, pd.DataFrame] = {}

    def available_tables(self) -> List[str]:
        """利用可能な表の名前を返す"""
        return sorted(path.stem for path in self.base_dir.glob('table*.csv'))

    def load(self, name: str) -> pd.DataFrame:
        """表を読み込む

        Args:
            name: 表の名前（例: "table1"）

        Returns:
            pd.DataFrame: 検証済みの参照データ（呼び出し側で変更しても良いコピー）

        Raises:
            ReferenceDataError: ファイルが無い、列が欠けている、値が数値でない場合
        """
        if name not in self._cache:
            self._cache[name] = self._read(name)
        return self._cache[name].copy()

    def _read(self, name: str) -> pd.DataFrame:
        path = self.base_dir / f"{name}.csv"
        if not path.exists():
            raise ReferenceDataError(f"参照データが見つかりません: {path}")

        try:
            frame = pd.read_csv(path)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise ReferenceDataError(f"参照データの形式が不正です: {path}: {e}") from e

        missing = [column for column in self.REQUIRED_COLUMNS if column not in frame.columns]
        if missing:
            raise ReferenceDataError(f"参照データに必要な列がありません: {path}: {missing}")

        try:
            frame = frame.astype({
                'n': int, 'kappa': int, 'column': float, 'index': int, 'energy': float, 'suspect': int
            })
        except (ValueError, TypeError) as e:
            raise ReferenceDataError(f"参照データに数値でない値があります: {path}: {e}") from e

        suspect_count = int(frame['suspect'].sum())
        if suspect_count:
            logger.warning(f"Reference {name}: {suspect_count} suspect row(s) flagged")
        logger.debug(f"Loaded reference {name}: {len(frame)} rows")
        return frame[self.REQUIRED_COLUMNS]
