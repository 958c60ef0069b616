"""
データ層（Data Layer）
同梱の参照表の読み込みとCSVの書き出し
"""
