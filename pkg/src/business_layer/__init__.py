"""
ビジネス層（Business Layer）
特殊関数、量子化条件、AIM、波動関数、表の生成と照合
"""
