"""表・図のプリセット定義

table1〜table8 は公表されたエネルギー固有値表、fig3/fig4 はαに対するエネルギーの掃引、
fig1/fig2 はポテンシャル形状のプリセットです。
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config_loader import ConfigError
from .model import ModelParams, PotentialParams, QuantumState, SymmetryLimit


class UnknownPresetError(ConfigError):
    """未定義のプリセット名が指定された場合のエラー"""
    pass


@dataclass(frozen=True)
class TablePreset:
    """表プリセット

    column_field のパラメータを column_values で掃引し、各値で states の全状態を解きます。
    """
    name: str
    description: str
    base_params: ModelParams
    states: Tuple[Tuple[int, int], ...]
    column_field: str
    column_values: Tuple[float, ...]
    reference: Optional[str] = None

    def quantum_states(self) -> List[QuantumState]:
        return [QuantumState(n, kappa, self.base_params.limit) for n, kappa in self.states]

    def cells(self) -> List[Tuple[float, ModelParams]]:
        """(列の値, その列のパラメータ) の一覧"""
        return [
            (value, self.base_params.replace(**{self.column_field: value}))
            for value in self.column_values
        ]


def _sweep(start: float, stop: float, count: int) -> Tuple[float, ...]:
    return tuple(float(round(value, 10)) for value in np.linspace(start, stop, count))


TENSOR_COLUMNS = (0.0, 0.5, 1.0)

PSPIN_FULL_STATES = (
    (1, -1), (1, -2), (1, -3), (1, -4), (2, -1), (2, -2), (2, -3), (2, -4),
    (1, 2), (1, 3), (1, 4), (1, 5), (2, 2), (2, 3), (2, 4), (2, 5),
)

SPIN_FULL_STATES = tuple(
    (n, kappa) for kappa in (-1, -2, -3, -4, 1, 2, 3) for n in range(4)
)

_PSPIN_BASE = ModelParams(M=1.0, V1=-0.002, V2=0.003, alpha=0.01, A=0.0, limit=SymmetryLimit.PSPIN, C=-5.0)
_SPIN_BASE = ModelParams(M=1.0, V1=0.002, V2=-0.003, alpha=0.01, A=0.0, limit=SymmetryLimit.SPIN, C=5.0)

TABLE_PRESETS: Dict[str, TablePreset] = {
    preset.name: preset for preset in (
        TablePreset(
            name='table1',
            description='擬スピン C_ps=-5 のエネルギー固有値（A = 0, 0.5, 1）',
            base_params=_PSPIN_BASE,
            states=PSPIN_FULL_STATES,
            column_field='A',
            column_values=TENSOR_COLUMNS,
            reference='table1',
        ),
        TablePreset(
            name='table2',
            description='擬スピン C_ps=0 のエネルギー固有値（A = 0, 0.5, 1）',
            base_params=_PSPIN_BASE.replace(C=0.0),
            states=PSPIN_FULL_STATES,
            column_field='A',
            column_values=TENSOR_COLUMNS,
            reference='table2',
        ),
        TablePreset(
            name='table3',
            description='スピン C_s=5 のエネルギー固有値（A = 0, 0.5, 1）',
            base_params=_SPIN_BASE,
            states=SPIN_FULL_STATES,
            column_field='A',
            column_values=TENSOR_COLUMNS,
            reference='table3',
        ),
        TablePreset(
            name='table4',
            description='スピン C_s=0 のエネルギー固有値（A = 0, 0.5, 1）',
            base_params=_SPIN_BASE.replace(C=0.0),
            states=SPIN_FULL_STATES,
            column_field='A',
            column_values=TENSOR_COLUMNS,
            reference='table4',
        ),
        TablePreset(
            name='table5',
            description='擬スピン C_ps=-5, A=1 のMに対する掃引',
            base_params=_PSPIN_BASE.replace(A=1.0),
            states=((1, -1), (1, -2), (1, -3), (1, -4), (2, -2)),
            column_field='M',
            column_values=_sweep(0.1, 2.0, 20),
            reference='table5',
        ),
        TablePreset(
            name='table6',
            description='スピン C_s=5, A=1 のMに対する掃引',
            base_params=_SPIN_BASE.replace(A=1.0),
            states=((1, -1), (1, -2), (0, 1), (2, -4), (1, 3)),
            column_field='M',
            column_values=_sweep(0.1, 2.0, 20),
            reference='table6',
        ),
        TablePreset(
            name='table7',
            description='擬スピン A=1 のC_psに対する掃引',
            base_params=_PSPIN_BASE.replace(A=1.0),
            states=((1, -1), (1, -2), (1, -3), (1, -4), (2, -2)),
            column_field='C',
            column_values=_sweep(-50.0, -5.0, 10),
            reference='table7',
        ),
        TablePreset(
            name='table8',
            description='スピン A=1 のC_sに対する掃引',
            base_params=_SPIN_BASE.replace(A=1.0),
            states=((0, -1), (0, -2), (2, -3), (0, -4), (3, 1)),
            column_field='C',
            column_values=_sweep(5.0, 50.0, 10),
            reference='table8',
        ),
        TablePreset(
            name='fig3',
            description='擬スピン C_ps=0, A=1 のαに対する掃引',
            base_params=_PSPIN_BASE.replace(A=1.0, C=0.0),
            states=((1, -1), (1, -2), (1, -3), (2, -1)),
            column_field='alpha',
            column_values=_sweep(0.01, 0.10, 10),
        ),
        TablePreset(
            name='fig4',
            description='スピン C_s=0, A=1 のαに対する掃引',
            base_params=_SPIN_BASE.replace(A=1.0, C=0.0),
            states=((0, -1), (0, -2), (1, -1), (0, 1)),
            column_field='alpha',
            column_values=_sweep(0.01, 0.10, 10),
        ),
    )
}

POTENTIAL_PRESETS: Dict[str, PotentialParams] = {
    'fig1': PotentialParams(V1=5.0, V2=3.0, alpha=0.02),
    'fig2': PotentialParams(V1=5.0, V2=3.0, alpha=0.03),
}


def get_table_preset(name: str) -> TablePreset:
    """表プリセットを取得する

    Raises:
        UnknownPresetError: 未定義の名前の場合
    """
    try:
        return TABLE_PRESETS[name]
    except KeyError:
        available = ', '.join(sorted(TABLE_PRESETS))
        raise UnknownPresetError(f"未定義のプリセットです: {name}（利用可能: {available}）") from None


def get_potential_preset(name: str) -> PotentialParams:
    try:
        return POTENTIAL_PRESETS[name]
    except KeyError:
        available = ', '.join(sorted(POTENTIAL_PRESETS))
        raise UnknownPresetError(f"未定義のプリセットです: {name}（利用可能: {available}）") from None
