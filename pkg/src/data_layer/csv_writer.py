"""CSV出力モジュール

'#' で始まるパラメータ行の後に、有効数字12桁・改行コード '\\n' の表を書き出します。
同じ入力からは常にバイト単位で同一の出力になります。
"""
import logging
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


class CsvExporter:
    """パラメータヘッダー付きCSVの書き出しを担当するクラス"""

    def __init__(self, significant_digits: int = 12):
        if significant_digits < 1:
            raise ValueError(f"有効桁数は1以上である必要があります: {significant_digits}")
        self.significant_digits = significant_digits
        self.float_format = f"%.{significant_digits}g"

    def format_value(self, value: Any) -> str:
        """ヘッダー用に値を文字列化する"""
        if isinstance(value, bool) or value is None:
            return str(value)
        if isinstance(value, (float, np.floating)):
            return self.float_format % value
        if isinstance(value, (list, tuple)):
            return ' '.join(self.format_value(item) for item in value)
        if hasattr(value, 'value') and isinstance(getattr(value, 'value'), str):
            return value.value
        return str(value)

    def render(self, frame: pd.DataFrame, header: Mapping[str, Any]) -> str:
        """ヘッダーと表をCSV文字列にする"""
        lines = [f"# {key}: {self.format_value(value)}" for key, value in header.items()]
        body = frame.to_csv(index=False, float_format=self.float_format, lineterminator='\n')
        return ''.join(line + '\n' for line in lines) + body

    def write(
        self,
        frame: pd.DataFrame,
        header: Mapping[str, Any],
        path: Optional[Union[str, Path]] = None
    ) -> str:
        """CSVを生成し、pathが指定されていればファイルにも書き出す

        Returns:
            str: 生成したCSV文字列
        """
        text = self.render(frame, header)
        if path is not None:
            output_path = Path(path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            with output_path.open('w', encoding='utf-8', newline='') as f:
                f.write(text)
            logger.info(f"CSV written: {output_path} ({len(frame)} rows)")
        return text
