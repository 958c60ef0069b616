"""設定ファイル読み込みモジュール

アプリケーション設定（config.yaml）と実行ファイル（--config で渡す平坦なYAML）の
両方をここで読み込みます。
"""
import copy
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path('config.yaml')


class ConfigError(Exception):
    """設定関連のエラー"""
    pass


def _positive_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value > 0


def _positive_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and value > 0


APP_DEFAULTS: Dict[str, Any] = {
    'solver': {
        'grid': 4000,
        'tolerance': 1e-12,
        'match_tolerance': 5e-9,
    },
    'aim': {
        'x0': 0.5,
        'k_max': 15,
        'order': 36,
        'grid': 64,
        'tolerance': 1e-12,
        'check_tolerance': 1e-8,
    },
    'wavefunction': {
        'quadrature_nodes': 128,
        'points': 200,
        'normalization': 'z',
    },
    'table': {
        'max_workers': 4,
    },
    'output': {
        'significant_digits': 12,
    },
    'logging': {
        'level': 'INFO',
        'file': './logs/tptspin.log',
        'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        'max_file_size': '10MB',
        'backup_count': 5,
    },
}

APP_VALIDATION_RULES: Dict[str, Callable[[Any], bool]] = {
    'solver.grid': lambda v: _positive_int(v) and v >= 16,
    'solver.tolerance': _positive_number,
    'solver.match_tolerance': _positive_number,
    'aim.x0': lambda v: isinstance(v, (int, float)) and 0.0 < v < 1.0,
    'aim.k_max': _positive_int,
    'aim.order': lambda v: _positive_int(v) and v >= 4,
    'aim.grid': lambda v: _positive_int(v) and v >= 16,
    'aim.tolerance': _positive_number,
    'aim.check_tolerance': _positive_number,
    'wavefunction.quadrature_nodes': lambda v: _positive_int(v) and v >= 8,
    'wavefunction.points': lambda v: _positive_int(v) and v >= 2,
    'wavefunction.normalization': lambda v: v in ('z', 'r'),
    'table.max_workers': _positive_int,
    'output.significant_digits': lambda v: _positive_int(v) and v <= 17,
}


class ConfigLoader:
    """YAML設定ファイルを読み込むクラス"""

    def load_config(
        self,
        config_path: Union[str, Path],
        defaults: Optional[Dict[str, Any]] = None,
        validation_rules: Optional[Dict[str, Callable]] = None
    ) -> Dict[str, Any]:
        """
        設定ファイルを読み込み、検証済み設定を返す

        Args:
            config_path: 設定ファイルのパス
            defaults: デフォルト設定値の辞書
            validation_rules: 検証ルールの辞書（キーパス: 検証関数）

        Returns:
            読み込んだ設定の辞書

        Raises:
            ConfigError: ファイルが見つからない、形式が不正、検証エラーなど
        """
        config_path = Path(config_path).resolve()

        self._validate_file_exists(config_path)
        config = self._load_yaml_file(config_path)

        if defaults:
            config = self._merge_defaults(defaults, config)

        if validation_rules:
            self._validate_config(config, validation_rules)

        return config

    def _validate_file_exists(self, config_path: Path) -> None:
        if not config_path.exists():
            raise ConfigError(f"設定ファイルが見つかりません: {config_path}")

    def _load_yaml_file(self, config_path: Path) -> Dict[str, Any]:
        """YAMLファイルを読み込む。トップレベルはマッピングでなければならない"""
        try:
            with config_path.open('r', encoding='utf-8') as f:
                config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"設定ファイルの形式が不正です: {e}") from e
        except OSError as e:
            raise ConfigError(f"設定ファイルの読み込みに失敗しました: {e}") from e

        if config is None:
            raise ConfigError("設定ファイルが空です")
        if not isinstance(config, dict):
            raise ConfigError(f"設定ファイルのトップレベルはマッピングである必要があります: {config_path}")
        return config

    def _merge_defaults(self, defaults: Dict[str, Any], config: Dict[str, Any]) -> Dict[str, Any]:
        """デフォルト値をマージする"""
        result = copy.deepcopy(defaults)

        def deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
            for key, value in update.items():
                if key in base and isinstance(base[key], dict) and isinstance(value, dict):
                    base[key] = deep_merge(base[key], value)
                else:
                    base[key] = value
            return base

        return deep_merge(result, config)

    def _validate_config(self, config: Dict[str, Any], rules: Dict[str, Callable]) -> None:
        for key_path, validator in rules.items():
            value = self._get_value_by_path(config, key_path)

            if not validator(value):
                raise ConfigError(f"設定値が不正です: {key_path} = {value}")

    def _get_value_by_path(self, config: Dict[str, Any], path: str) -> Any:
        """ドット区切りのパスから値を取得する"""
        value = config
        for key in path.split('.'):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return None
        return value


def load_app_config(config_path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """アプリケーション設定を読み込む

    ファイルが存在しない場合はAPP_DEFAULTSのコピーを返します。
    存在するが不正な場合はConfigErrorです。

    Args:
        config_path: 設定ファイルのパス（省略時はカレントディレクトリのconfig.yaml）

    Returns:
        Dict[str, Any]: 検証済みの設定辞書
    """
    path = Path(config_path) if config_path is not None else DEFAULT_CONFIG_PATH
    if not path.exists():
        logger.debug(f"Config file {path} not found, using defaults")
        return copy.deepcopy(APP_DEFAULTS)
    return ConfigLoader().load_config(path, APP_DEFAULTS, APP_VALIDATION_RULES)
