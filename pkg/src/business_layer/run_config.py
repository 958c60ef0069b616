"""実行設定モジュール

コマンドラインのフラグと --config で渡す平坦なYAMLファイルを統合し、
検証済みのRunConfigを組み立てます。ファイルのキーはフラグ名からダッシュを除いたものです。
"""
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config_loader import ConfigError, ConfigLoader
from .model import ModelParams, PotentialParams, QuantumState
from .table_presets import (
    TablePreset,
    get_potential_preset,
    get_table_preset,
)
from .table_runner import EnergyWindow

logger = logging.getLogger(__name__)


class Command(str, Enum):
    SOLVE = "solve"
    TABLE = "table"
    WAVEFN = "wavefn"
    POTENTIAL = "potential"
    AIM_CHECK = "aim-check"


class OutputFormat(str, Enum):
    CSV = "csv"
    TEXT_TABLE = "text-table"


SWEEP_FIELDS = ('M', 'C', 'V1', 'V2', 'alpha', 'A')

RUN_KEYS = frozenset({
    'limit', 'M', 'C', 'V1', 'V2', 'alpha', 'A', 'n', 'kappa',
    'emin', 'emax', 'grid', 'preset', 'compare', 'output', 'sweep',
    'energy', 'root_index', 'points', 'normalization', 'rmin', 'rmax', 'n_max', 'k',
})

_SWEEP_PATTERN = re.compile(r'^\s*(\w+)\s*=\s*([^:]+):([^:]+):([^:]+)\s*$')


@dataclass(frozen=True)
class SweepSpec:
    """パラメータ掃引の指定"""
    field: str
    values: Tuple[float, ...]

    def __post_init__(self):
        if self.field not in SWEEP_FIELDS:
            raise ConfigError(f"掃引できないパラメータです: {self.field}（利用可能: {', '.join(SWEEP_FIELDS)}）")
        if not self.values:
            raise ConfigError("掃引値が空です")


def parse_sweep(text: str) -> SweepSpec:
    """"FIELD=START:STOP:COUNT" 形式の文字列を解釈する

    Raises:
        ConfigError: 形式が不正な場合
    """
    match = _SWEEP_PATTERN.match(str(text))
    if not match:
        raise ConfigError(f"掃引指定の形式が不正です（FIELD=START:STOP:COUNT）: {text}")
    name, start, stop, count = match.groups()
    try:
        start_value, stop_value, count_value = float(start), float(stop), int(count)
    except ValueError as e:
        raise ConfigError(f"掃引指定の数値が不正です: {text}") from e
    if count_value < 1:
        raise ConfigError(f"掃引の点数は1以上である必要があります: {text}")
    values = tuple(float(round(v, 12)) for v in np.linspace(start_value, stop_value, count_value))
    return SweepSpec(name, values)


@dataclass(frozen=True)
class OutputSpec:
    """出力先。pathがNoneなら標準出力"""
    path: Optional[Path]
    format: OutputFormat


@dataclass(frozen=True)
class RunConfig:
    """1回の実行の検証済み設定"""
    command: Command
    output: OutputSpec
    params: Optional[ModelParams] = None
    states: Tuple[QuantumState, ...] = ()
    sweep: Optional[SweepSpec] = None
    window: EnergyWindow = field(default_factory=EnergyWindow)
    grid: Optional[int] = None
    table: Optional[TablePreset] = None
    compare: bool = False
    potential: Optional[PotentialParams] = None
    energy: Optional[float] = None
    root_index: int = 0
    points: Optional[int] = None
    normalization: Optional[str] = None
    r_range: Tuple[Optional[float], Optional[float]] = (None, None)
    n_max: int = 3
    k: Optional[int] = None

    def __post_init__(self):
        if self.sweep is not None and self.command not in (Command.SOLVE, Command.TABLE):
            raise ConfigError(f"掃引はsolveとtableでのみ指定できます: {self.command.value}")


def normalize_key(key: str) -> str:
    """"root-index" と "root_index" を同一視する"""
    return str(key).lstrip('-').replace('-', '_')


def load_run_file(path: Union[str, Path]) -> Dict[str, Any]:
    """--config で渡された平坦なYAMLを読み込む

    Raises:
        ConfigError: ファイルが不正、または未知のキーを含む場合
    """
    raw = ConfigLoader().load_config(path)
    options = {normalize_key(key): value for key, value in raw.items()}
    unknown = sorted(set(options) - RUN_KEYS)
    if unknown:
        raise ConfigError(f"未知の設定キーです: {', '.join(unknown)}")
    nested = [key for key, value in options.items() if isinstance(value, dict)]
    if nested:
        raise ConfigError(f"実行設定ファイルは平坦なマッピングである必要があります: {', '.join(nested)}")
    logger.debug(f"Loaded run file {path}: {sorted(options)}")
    return options


def merge_options(file_options: Mapping[str, Any], cli_options: Mapping[str, Any]) -> Dict[str, Any]:
    """ファイルの値にコマンドラインで明示された値を上書きする

    Noneと空のタプルは「未指定」とみなします。
    """
    merged = dict(file_options)
    for key, value in cli_options.items():
        if value is None or value == ():
            continue
        merged[normalize_key(key)] = value
    return merged


def _as_float(options: Mapping[str, Any], key: str, default: Optional[float] = None) -> Optional[float]:
    value = options.get(key)
    if value is None:
        return default
    if isinstance(value, bool):
        raise ConfigError(f"{key}は数値である必要があります: {value}")
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key}は数値である必要があります: {value}") from e


def _as_int(options: Mapping[str, Any], key: str, default: Optional[int] = None) -> Optional[int]:
    value = options.get(key)
    if value is None:
        return default
    try:
        number = float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key}は整数である必要があります: {value}") from e
    if isinstance(value, bool) or not number.is_integer():
        raise ConfigError(f"{key}は整数である必要があります: {value}")
    return int(number)


def _as_int_list(options: Mapping[str, Any], key: str) -> Tuple[int, ...]:
    value = options.get(key)
    if value is None:
        return ()
    items = value if isinstance(value, (list, tuple)) else [value]
    return tuple(_as_int({key: item}, key) for item in items)


def _require(options: Mapping[str, Any], keys: Sequence[str], command: Command) -> None:
    missing = [key for key in keys if options.get(key) is None]
    if missing:
        raise ConfigError(f"{command.value} に必要な設定がありません: {', '.join('--' + k for k in missing)}")


def build_model_params(options: Mapping[str, Any], command: Command) -> ModelParams:
    """M, V1, V2, alpha, limit は必須、C と A は省略時0"""
    _require(options, ('limit', 'M', 'V1', 'V2', 'alpha'), command)
    try:
        return ModelParams(
            M=_as_float(options, 'M'),
            V1=_as_float(options, 'V1'),
            V2=_as_float(options, 'V2'),
            alpha=_as_float(options, 'alpha'),
            A=_as_float(options, 'A', 0.0),
            limit=str(options['limit']),
            C=_as_float(options, 'C', 0.0),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def build_states(options: Mapping[str, Any], params: ModelParams, command: Command) -> Tuple[QuantumState, ...]:
    """n と κ の組を作る。片方が1個ならもう片方の長さに合わせて繰り返す"""
    ns, kappas = _as_int_list(options, 'n'), _as_int_list(options, 'kappa')
    if not ns or not kappas:
        raise ConfigError(f"{command.value} には --n と --kappa が必要です")
    if len(ns) != len(kappas):
        if len(ns) == 1:
            ns = ns * len(kappas)
        elif len(kappas) == 1:
            kappas = kappas * len(ns)
        else:
            raise ConfigError(f"--n と --kappa の個数が一致しません: {len(ns)} != {len(kappas)}")
    try:
        return tuple(QuantumState(n, kappa, params.limit) for n, kappa in zip(ns, kappas))
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _custom_table(params: ModelParams, states: Tuple[QuantumState, ...], sweep: Optional[SweepSpec]) -> TablePreset:
    field_name, values = (sweep.field, sweep.values) if sweep else ('A', (params.A,))
    return TablePreset(
        name='custom',
        description='設定ファイルから組み立てた表',
        base_params=params,
        states=tuple((state.n, state.kappa) for state in states),
        column_field=field_name,
        column_values=values,
    )


def _output_spec(options: Mapping[str, Any], command: Command) -> OutputSpec:
    path = options.get('output')
    path = Path(path) if path not in (None, '') else None
    text_default = command in (Command.SOLVE, Command.AIM_CHECK) and path is None
    return OutputSpec(path, OutputFormat.TEXT_TABLE if text_default else OutputFormat.CSV)


def build_run_config(command: Union[Command, str], options: Mapping[str, Any]) -> RunConfig:
    """統合済みのオプションからRunConfigを組み立てる

    Args:
        command: コマンド名
        options: フラグ名（ダッシュ無し）をキーとする値

    Returns:
        RunConfig: 検証済み設定

    Raises:
        ConfigError: 必須項目の欠落、値の不正、コマンドに合わない指定
    """
    try:
        command = Command(command)
    except ValueError as e:
        raise ConfigError(f"未知のコマンドです: {command}") from e
    options = {normalize_key(key): value for key, value in options.items()}

    sweep = options.get('sweep')
    if sweep is not None and not isinstance(sweep, SweepSpec):
        sweep = parse_sweep(sweep)
    if sweep is not None and command not in (Command.SOLVE, Command.TABLE):
        raise ConfigError(f"掃引はsolveとtableでのみ指定できます: {command.value}")

    emin, emax = _as_float(options, 'emin'), _as_float(options, 'emax')
    if emin is not None and emax is not None and not emin < emax:
        raise ConfigError(f"--emin は --emax より小さい必要があります: [{emin}, {emax}]")
    grid = _as_int(options, 'grid')
    if grid is not None and grid < 16:
        raise ConfigError(f"--grid は16以上である必要があります: {grid}")
    points = _as_int(options, 'points')
    if points is not None and points < 2:
        raise ConfigError(f"--points は2以上である必要があります: {points}")
    common = dict(
        command=command,
        output=_output_spec(options, command),
        window=EnergyWindow(emin, emax),
        grid=grid,
        points=points,
    )

    if command is Command.POTENTIAL:
        return RunConfig(potential=_potential_params(options), r_range=(
            _as_float(options, 'rmin'), _as_float(options, 'rmax')), **common)

    if command is Command.TABLE:
        preset = options.get('preset')
        if preset is not None:
            table = get_table_preset(str(preset))
            if sweep is not None:
                table = _custom_table(table.base_params, tuple(table.quantum_states()), sweep)
        else:
            params = build_model_params(options, command)
            table = _custom_table(params, build_states(options, params, command), sweep)
        return RunConfig(
            params=table.base_params,
            states=tuple(table.quantum_states()),
            sweep=sweep,
            table=table,
            compare=bool(options.get('compare', False)),
            **common,
        )

    params = build_model_params(options, command)

    if command is Command.AIM_CHECK:
        kappas = _as_int_list(options, 'kappa')
        if len(kappas) != 1:
            raise ConfigError("aim-check には --kappa を1つだけ指定してください")
        n_max = _as_int(options, 'n_max', 3)
        k = _as_int(options, 'k')
        if n_max < 0:
            raise ConfigError(f"--n-max は0以上である必要があります: {n_max}")
        if k is not None and k < 1:
            raise ConfigError(f"--k は1以上である必要があります: {k}")
        try:
            states = tuple(QuantumState(n, kappas[0], params.limit) for n in range(n_max + 1))
        except ValueError as e:
            raise ConfigError(str(e)) from e
        return RunConfig(params=params, states=states, n_max=n_max, k=k, **common)

    states = build_states(options, params, command)

    if command is Command.WAVEFN:
        if len(states) != 1:
            raise ConfigError("wavefn には状態を1つだけ指定してください")
        normalization = options.get('normalization')
        if normalization is not None and normalization not in ('z', 'r'):
            raise ConfigError(f"--normalization は z または r です: {normalization}")
        root_index = _as_int(options, 'root_index', 0)
        if root_index < 0:
            raise ConfigError(f"--root-index は0以上である必要があります: {root_index}")
        return RunConfig(
            params=params,
            states=states,
            energy=_as_float(options, 'energy'),
            root_index=root_index,
            normalization=normalization,
            **common,
        )

    return RunConfig(params=params, states=states, sweep=sweep, **common)


def _potential_params(options: Mapping[str, Any]) -> PotentialParams:
    preset = options.get('preset')
    base = get_potential_preset(str(preset)) if preset is not None else None
    values = {}
    for key in ('V1', 'V2', 'alpha'):
        value = _as_float(options, key, getattr(base, key) if base else None)
        if value is None:
            raise ConfigError(f"potential には --preset または --{key} が必要です")
        values[key] = value
    if not values['alpha'] > 0:
        raise ConfigError(f"alphaは正である必要があります: {values['alpha']}")
    return PotentialParams(**values)
