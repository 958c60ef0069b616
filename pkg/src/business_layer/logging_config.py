"""ログ設定管理モジュール

標準出力はCSVの書き出し先に使うため、ログはstderrとローテーティングファイルにだけ出します。
"""
import logging
import logging.handlers
import re
import sys
from pathlib import Path
from typing import Any, Dict

_DEFAULT_MAX_BYTES = 10 * 1024 * 1024


class LoggingConfig:
    """logging セクションの値を保持するクラス"""

    LEVELS = {
        'DEBUG': logging.DEBUG,
        'INFO': logging.INFO,
        'WARNING': logging.WARNING,
        'ERROR': logging.ERROR,
        'CRITICAL': logging.CRITICAL,
    }

    def __init__(self, config: Dict[str, Any]):
        """LoggingConfigを初期化

        Args:
            config: ログ設定辞書
        """
        self.level = str(config.get('level', 'INFO'))
        self.file_path = config.get('file', './logs/tptspin.log')
        self.format = config.get('format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        self.max_file_size = config.get('max_file_size', '10MB')
        self.backup_count = config.get('backup_count', 5)

    def get_log_level(self) -> int:
        """未知のレベル名はINFOとして扱う"""
        return self.LEVELS.get(self.level.upper(), logging.INFO)

    def get_max_bytes(self) -> int:
        """"10MB" のようなサイズ文字列をバイト数に変換する"""
        try:
            match = re.fullmatch(r'(\d+)\s*(KB|MB|GB)', str(self.max_file_size).strip().upper())
        except (TypeError, AttributeError):
            return _DEFAULT_MAX_BYTES
        if not match:
            return _DEFAULT_MAX_BYTES

        size, unit = match.groups()
        multipliers = {'KB': 1024, 'MB': 1024 ** 2, 'GB': 1024 ** 3}
        return int(size) * multipliers[unit]


def setup_logging(config: Dict[str, Any]) -> None:
    """アプリケーション全体のログを設定

    既存のルートハンドラーを外し、stderrへのコンソールハンドラーと
    ローテーティングファイルハンドラーを付け直します。file が空ならファイル出力は行いません。

    Args:
        config: アプリケーション設定辞書
    """
    logging_config = LoggingConfig(config.get('logging', {}))
    level = logging_config.get_log_level()

    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.setLevel(level)

    formatter = logging.Formatter(logging_config.format)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(level)
    root_logger.addHandler(console_handler)

    if logging_config.file_path:
        log_file_path = Path(logging_config.file_path)
        log_file_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            filename=log_file_path,
            maxBytes=logging_config.get_max_bytes(),
            backupCount=logging_config.backup_count,
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        file_handler.setLevel(level)
        root_logger.addHandler(file_handler)

    logger = logging.getLogger(__name__)
    logger.info(f"Logging configured: level={logging_config.level}, file={logging_config.file_path or '-'}")
