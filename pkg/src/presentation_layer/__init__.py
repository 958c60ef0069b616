"""
プレゼンテーション層（Presentation Layer）
コマンドライン処理
"""
