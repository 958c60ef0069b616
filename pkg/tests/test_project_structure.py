"""
プロジェクト構造の検証テスト
"""
from pathlib import Path

import pytest


class TestProjectStructure:
    """プロジェクト構造のテストクラス"""

    @pytest.mark.parametrize("directory", [
        "src/data_layer", "src/business_layer", "src/presentation_layer", "src/data_layer/reference", "tests",
    ])
    def test_レイヤーのディレクトリが存在する(self, directory):
        """3層構造のディレクトリが存在することを確認"""
        assert Path(directory).is_dir()

    @pytest.mark.parametrize("package", [
        "src", "src/data_layer", "src/business_layer", "src/presentation_layer", "tests",
    ])
    def test_init_pyが存在する(self, package):
        """各パッケージに__init__.pyが存在することを確認"""
        assert (Path(package) / "__init__.py").is_file()

    def test_参照表のCSVが同梱されている(self):
        """table1〜table8が存在することを確認"""
        for index in range(1, 9):
            assert Path(f"src/data_layer/reference/table{index}.csv").is_file()


class TestConfigFiles:
    """設定ファイルの存在テスト"""

    def test_gitignoreの内容が適切(self):
        """.gitignoreの内容が適切であることを確認"""
        content = Path(".gitignore").read_text(encoding="utf-8")

        assert "__pycache__" in content
        assert "*.py[cod]" in content
        assert "logs/" in content
        assert "!src/data_layer/reference/*.csv" in content

    def test_requirements_txtに計算ライブラリが含まれる(self):
        """requirements.txtに依存パッケージが記載されていることを確認"""
        content = Path("requirements.txt").read_text(encoding="utf-8")

        for package in ("numpy", "scipy", "pandas", "pyyaml", "click", "pytest"):
            assert package in content

    def test_config_yamlが存在する(self):
        """アプリケーション設定ファイルが存在することを確認"""
        assert Path("config.yaml").is_file()
        assert Path("main.py").is_file()
