#!/usr/bin/env python3
"""
tptspin - エントリーポイント
設定とログの初期化を行い、CLIへ処理を渡す
"""
import logging
import sys
from typing import Any, Dict

from src.business_layer.config_loader import load_app_config
from src.business_layer.logging_config import setup_logging
from src.presentation_layer.cli import cli

# ログは後で設定ファイルから初期化
logger = logging.getLogger(__name__)


def load_and_validate_config() -> Dict[str, Any]:
    """設定ファイルの読み込みとログの初期化

    Returns:
        Dict[str, Any]: 検証済み設定データ

    Raises:
        ConfigError: 設定ファイルが不正な場合
    """
    try:
        config = load_app_config('config.yaml')
        setup_logging(config)
        logger.info("Configuration loaded and validated successfully")
        return config

    except Exception as e:
        logger.error(f"Configuration loading failed: {e}")
        raise


def setup_error_handling():
    """アプリケーション全体のエラーハンドリングを設定"""
    def handle_exception(exc_type, exc_value, exc_traceback):
        if issubclass(exc_type, KeyboardInterrupt):
            # Ctrl+Cによる中断は通常終了として扱う
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return

        logger.error(
            "Uncaught exception",
            exc_info=(exc_type, exc_value, exc_traceback)
        )
        print(f"予期しないエラーが発生しました: {exc_value}", file=sys.stderr)

    sys.excepthook = handle_exception


def main():
    """メイン関数 - アプリケーションのエントリーポイント"""
    try:
        setup_error_handling()
        config = load_and_validate_config()
    except Exception as e:
        print(f"アプリケーション起動エラー: {e}", file=sys.stderr)
        sys.exit(1)

    logger.debug("Starting tptspin")
    cli(obj={'config': config})


if __name__ == '__main__':
    main()
