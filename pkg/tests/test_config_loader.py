"""設定ファイル読み込み機能のテスト"""
import os
import shutil
import tempfile

import pytest
import yaml

from src.business_layer.config_loader import (
    APP_DEFAULTS,
    APP_VALIDATION_RULES,
    ConfigError,
    ConfigLoader,
    load_app_config,
)


class TestConfigLoader:
    """ConfigLoaderのテストクラス"""

    def setup_method(self):
        """各テストメソッドの前処理"""
        self.loader = ConfigLoader()
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        """各テストメソッドの後処理"""
        shutil.rmtree(self.temp_dir)

    def _write(self, name, data):
        config_path = os.path.join(self.temp_dir, name)
        with open(config_path, "w", encoding="utf-8") as f:
            if isinstance(data, str):
                f.write(data)
            else:
                yaml.dump(data, f)
        return config_path

    def test_正常な設定ファイルを読み込める(self):
        """正常系: 有効なYAMLファイルを読み込めることを確認"""
        config_data = {
            "solver": {"grid": 2000, "tolerance": 1e-10},
            "logging": {"level": "DEBUG", "format": "%(asctime)s - %(message)s"},
        }

        result = self.loader.load_config(self._write("config.yaml", config_data))

        assert result == config_data
        assert result["solver"]["grid"] == 2000
        assert result["logging"]["level"] == "DEBUG"

    def test_存在しないファイルの場合エラーを発生させる(self):
        """異常系: 存在しないファイルを指定した場合、ConfigErrorが発生することを確認"""
        non_existent_path = os.path.join(self.temp_dir, "non_existent.yaml")

        with pytest.raises(ConfigError) as exc_info:
            self.loader.load_config(non_existent_path)

        assert "設定ファイルが見つかりません" in str(exc_info.value)

    def test_不正なYAML形式の場合エラーを発生させる(self):
        """異常系: 不正なYAML形式のファイルの場合、ConfigErrorが発生することを確認"""
        config_path = self._write("invalid.yaml", "invalid: yaml: content:\n  - without proper: formatting")

        with pytest.raises(ConfigError) as exc_info:
            self.loader.load_config(config_path)

        assert "設定ファイルの形式が不正です" in str(exc_info.value)

    def test_空のファイルの場合エラーを発生させる(self):
        """異常系: 空のファイルの場合、ConfigErrorが発生することを確認"""
        with pytest.raises(ConfigError) as exc_info:
            self.loader.load_config(self._write("empty.yaml", ""))

        assert "設定ファイルが空です" in str(exc_info.value)

    def test_トップレベルがリストの場合エラーを発生させる(self):
        """異常系: マッピングでないYAML"""
        with pytest.raises(ConfigError) as exc_info:
            self.loader.load_config(self._write("list.yaml", "- 1\n- 2\n"))

        assert "マッピング" in str(exc_info.value)

    def test_デフォルト値を適用できる(self):
        """正常系: デフォルト値を入れ子のまま補えることを確認"""
        config_path = self._write("partial.yaml", {"aim": {"k_max": 20}})

        result = self.loader.load_config(config_path, defaults=APP_DEFAULTS)

        assert result["aim"]["k_max"] == 20  # 設定ファイルの値
        assert result["aim"]["order"] == 36  # デフォルト値
        assert result["solver"]["grid"] == 4000  # デフォルト値
        assert APP_DEFAULTS["aim"]["k_max"] == 15

    def test_相対パスを絶対パスに変換できる(self, monkeypatch):
        """正常系: 相対パスを指定した場合でも読み込めることを確認"""
        config_data = {"output": {"significant_digits": 10}}

        # monkeypatchを使用して安全にディレクトリを変更
        monkeypatch.chdir(self.temp_dir)

        with open("config.yaml", "w", encoding="utf-8") as f:
            yaml.dump(config_data, f)

        result = self.loader.load_config("config.yaml")
        assert result == config_data

    @pytest.mark.parametrize("section,values", [
        ("solver", {"grid": 8}),
        ("aim", {"x0": 1.5}),
        ("wavefunction", {"normalization": "x"}),
        ("table", {"max_workers": 0}),
        ("output", {"significant_digits": 30}),
    ])
    def test_設定値の検証機能が動作する(self, section, values):
        """異常系: 範囲外の値はConfigError"""
        config_path = self._write("invalid_value.yaml", {section: values})

        with pytest.raises(ConfigError) as exc_info:
            self.loader.load_config(config_path, APP_DEFAULTS, APP_VALIDATION_RULES)

        assert "設定値が不正です" in str(exc_info.value)


class TestLoadAppConfig:
    """load_app_configのテストクラス"""

    def setup_method(self):
        """各テストメソッドの前処理"""
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        """各テストメソッドの後処理"""
        shutil.rmtree(self.temp_dir)

    def test_ファイルが無い場合はデフォルト値のコピーを返す(self):
        """正常系: config.yaml 無しでも動く"""
        result = load_app_config(os.path.join(self.temp_dir, "missing.yaml"))

        assert result == APP_DEFAULTS
        result["solver"]["grid"] = 1
        assert APP_DEFAULTS["solver"]["grid"] == 4000

    def test_ファイルの値とデフォルト値をマージする(self):
        """正常系: 一部だけ上書き"""
        config_path = os.path.join(self.temp_dir, "config.yaml")
        with open(config_path, "w", encoding="utf-8") as f:
            yaml.dump({"table": {"max_workers": 2}, "logging": {"file": None}}, f)

        result = load_app_config(config_path)

        assert result["table"]["max_workers"] == 2
        assert result["logging"]["file"] is None
        assert result["logging"]["level"] == "INFO"

    def test_同梱のconfig_yamlが検証を通る(self):
        """正常系: リポジトリ直下の設定ファイル"""
        result = load_app_config("config.yaml")

        assert result["solver"]["tolerance"] == 1e-12
        assert result["wavefunction"]["normalization"] in ("z", "r")
