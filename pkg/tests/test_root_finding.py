"""符号変化の検出と二分法のテスト"""
import math

import numpy as np
import pytest

from src.business_layer.root_finding import (
    Bracket,
    RootFindingError,
    bisect,
    find_brackets,
    scan_roots,
)


class TestFindBrackets:
    """find_brackets のテスト"""

    def test_符号変化を全て列挙する(self):
        """正常系: sin の零点を挟む区間"""
        xs = np.linspace(0.5, 10.0, 200)
        brackets = find_brackets(xs, np.sin(xs))
        assert len(brackets) == 3
        for bracket, root in zip(brackets, (math.pi, 2 * math.pi, 3 * math.pi)):
            assert bracket.lower < root < bracket.upper

    def test_NaNの格子点を跨ぐ区間は採用しない(self):
        """正常系: マスクされた点の扱い"""
        xs = np.array([0.0, 1.0, 2.0, 3.0])
        values = np.array([-1.0, np.nan, 1.0, 2.0])
        assert find_brackets(xs, values) == []

    def test_格子点上の厳密な零点は一度だけ記録する(self):
        """正常系: f = 0 の点"""
        xs = np.array([-1.0, 0.0, 1.0])
        brackets = find_brackets(xs, xs)
        assert len(brackets) == 1
        assert brackets[0].is_exact
        assert brackets[0].lower == 0.0

    def test_長さが一致しない場合はエラー(self):
        """異常系: 形状の不一致"""
        with pytest.raises(RootFindingError):
            find_brackets([0.0, 1.0], [1.0])


class TestBisect:
    """bisect と scan_roots のテスト"""

    def test_許容幅まで根を絞り込む(self):
        """正常系: x² - 2 の根"""
        root = bisect(lambda x: x * x - 2.0, Bracket(1.0, 2.0, -1.0, 2.0), tol=1e-13)
        assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_厳密な零点はそのまま返す(self):
        """正常系: is_exact の区間"""
        assert bisect(lambda x: 1.0 / 0.0, Bracket(0.25, 0.25, 0.0, 0.0)) == 0.25

    def test_途中で非有限値になるとエラー(self):
        """異常系: 区間内の特異点"""
        with pytest.raises(RootFindingError):
            bisect(lambda x: float('nan'), Bracket(0.0, 1.0, -1.0, 1.0))

    def test_scan_rootsは昇順で返す(self):
        """正常系: cos の零点"""
        xs = np.linspace(0.0, 7.0, 50)
        roots = scan_roots(np.cos, xs, np.cos(xs))
        np.testing.assert_allclose(roots, [math.pi / 2, 3 * math.pi / 2], atol=1e-11)
