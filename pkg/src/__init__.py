"""
tptspin - 三角Pöschl-Tellerポテンシャル下のDirac方程式 スペクトル計算ツール
"""
