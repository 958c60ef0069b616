"""
CLI コマンド実装（solve・table・wavefn・potential・aim-check）

数値データ（CSVと solve の表）は標準出力または --output のファイルへ、
進捗やサマリーは標準エラーへ出力します。
"""
import logging
import math
from typing import Any, Dict, Mapping, Optional

import click
import numpy as np
import pandas as pd

from ..business_layer.aim import AimError
from ..business_layer.config_loader import ConfigError, load_app_config
from ..business_layer.model import (
    ModelError,
    ModelParams,
    QuantumState,
    WindowDegenerateError,
    find_pole,
    potential_tpt,
    quantization_residual,
    solve_energies,
)
from ..business_layer.run_config import (
    Command,
    OutputFormat,
    RunConfig,
    build_run_config,
    load_run_file,
    merge_options,
)
from ..business_layer.spectrum_check import SpectrumCrossCheck
from ..business_layer.table_comparison import TableComparator
from ..business_layer.table_presets import TablePreset
from ..business_layer.table_runner import ParallelTableRunner, TableRunError, TableRunResult
from ..business_layer.wavefn import WavefunctionError, sample_radial
from ..data_layer.csv_writer import CsvExporter
from ..data_layer.reference_tables import ReferenceDataError, ReferenceTableRepository

logger = logging.getLogger(__name__)

EXIT_CONFIG_ERROR = 1
EXIT_NO_ROOT = 2
EXIT_MISMATCH = 3


class NoRootError(click.ClickException):
    """根が見つからない、またはAIMが収束しない場合"""
    exit_code = EXIT_NO_ROOT


class ComparisonMismatchError(click.ClickException):
    """参照値や閉形式との差が許容誤差を超えた場合"""
    exit_code = EXIT_MISMATCH


class ExitCodeGroup(click.Group):
    """使い方の誤りも設定エラーとして終了コード1にするグループ

    終了コード2は「根が無い」に割り当てているため、clickの既定値とは分けます。
    """

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_CONFIG_ERROR
            raise


def _settings(ctx: click.Context) -> Dict[str, Any]:
    return ctx.obj['config']


def _resolve_run_config(command: Command, config_file: Optional[str], cli_options: Mapping[str, Any]) -> RunConfig:
    """--config の内容とフラグを統合して検証する"""
    try:
        file_options = load_run_file(config_file) if config_file else {}
        return build_run_config(command, merge_options(file_options, cli_options))
    except ConfigError as e:
        raise click.ClickException(f"設定エラー: {e}") from e


def _exporter(settings: Dict[str, Any]) -> CsvExporter:
    return CsvExporter(settings['output']['significant_digits'])


def _emit_csv(settings: Dict[str, Any], run: RunConfig, frame: pd.DataFrame, header: Mapping[str, Any]) -> None:
    text = _exporter(settings).write(frame, header, run.output.path)
    if run.output.path is None:
        click.echo(text, nl=False)
    else:
        click.echo(f"✅ CSVを書き出しました: {run.output.path}", err=True)


def _params_header(params: ModelParams) -> Dict[str, Any]:
    return {
        'limit': params.limit,
        'M': params.M,
        'C': params.C,
        'V1': params.V1,
        'V2': params.V2,
        'alpha': params.alpha,
        'A': params.A,
    }


def _runner(settings: Dict[str, Any], run: RunConfig) -> ParallelTableRunner:
    solver = settings['solver']
    return ParallelTableRunner(
        max_workers=settings['table']['max_workers'],
        grid=run.grid or solver['grid'],
        tol=solver['tolerance'],
    )


def _run_table(settings: Dict[str, Any], run: RunConfig, table: TablePreset) -> TableRunResult:
    try:
        return _runner(settings, run).run(table.cells(), table.quantum_states(), run.window)
    except TableRunError as e:
        raise click.ClickException(f"表の計算に失敗しました: {e}") from e


def model_options(func):
    """全コマンド共通のパラメータフラグ"""
    options = [
        click.option('--config', 'config_file', type=click.Path(dir_okay=False), help='実行設定YAMLファイル'),
        click.option('--limit', type=click.Choice(['spin', 'pspin']), help='対称性極限'),
        click.option('--M', 'M', type=float, help='質量 M (fm⁻¹)'),
        click.option('--C', 'C', type=float, help='定数 C_s または C_ps (fm⁻¹)'),
        click.option('--V1', 'V1', type=float, help='ポテンシャル強度 V₁'),
        click.option('--V2', 'V2', type=float, help='ポテンシャル強度 V₂'),
        click.option('--alpha', type=float, help='ポテンシャル幅 α (fm⁻¹)'),
        click.option('--A', 'A', type=float, help='テンソル結合 A'),
        click.option('--output', type=click.Path(dir_okay=False), help='出力CSVファイル（省略時は標準出力）'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def state_options(func):
    options = [
        click.option('--n', 'n', type=int, multiple=True, help='動径量子数（複数指定可）'),
        click.option('--kappa', type=int, multiple=True, help='κ（複数指定可、--n と対にする）'),
        click.option('--emin', type=float, help='走査区間の下端'),
        click.option('--emax', type=float, help='走査区間の上端'),
        click.option('--grid', type=int, help='走査格子の点数'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group(cls=ExitCodeGroup)
@click.pass_context
def cli(ctx):
    """三角Pöschl-Tellerポテンシャル下のDirac方程式 スペクトル計算ツール"""
    # コンテキストオブジェクトが無い場合は独立実行モード
    if ctx.obj is None:
        try:
            ctx.obj = {'config': load_app_config()}
        except ConfigError as e:
            raise click.ClickException(f"設定ファイルの読み込みに失敗しました: {e}") from e


@cli.command()
@model_options
@state_options
@click.option('--sweep', help='パラメータ掃引 FIELD=START:STOP:COUNT')
@click.pass_context
def solve(ctx, config_file, **options):
    """指定した状態のエネルギー根を求める"""
    settings = _settings(ctx)
    run = _resolve_run_config(Command.SOLVE, config_file, options)
    column_field = run.sweep.field if run.sweep else 'A'
    column_values = run.sweep.values if run.sweep else (getattr(run.params, column_field),)
    table = TablePreset(
        name='solve',
        description='solve',
        base_params=run.params,
        states=tuple((state.n, state.kappa) for state in run.states),
        column_field=column_field,
        column_values=column_values,
    )
    result = _run_table(settings, run, table)

    if run.output.format is OutputFormat.TEXT_TABLE:
        _echo_roots(result.frame, column_field if run.sweep else None)
    else:
        header = {**_params_header(run.params), 'command': 'solve', 'column': column_field}
        _emit_csv(settings, run, result.frame, header)

    if not result.all_cells_have_roots:
        missing = ', '.join(f"{label}@{column_field}={value:g}" for value, label in
                            result.empty_cells + result.degenerate_cells)
        raise NoRootError(f"根が見つからない状態があります: {missing}")


def _echo_roots(frame: pd.DataFrame, column_field: Optional[str]) -> None:
    """solve の結果を人が読む表として標準出力へ書く"""
    for row in frame.itertuples(index=False):
        prefix = f"{column_field}={row.column:.12g}  " if column_field else ""
        if pd.isna(row.energy):
            click.echo(f"{prefix}{row.label:>8} (n={row.n}, κ={row.kappa}): 根なし")
            continue
        validity = 'valid' if row.valid else 'invalid'
        click.echo(
            f"{prefix}{row.label:>8} (n={row.n}, κ={row.kappa}): "
            f"E = {row.energy:.12g}  f(E) = {row.residual:.3e}  {validity}"
        )


@cli.command()
@click.option('--preset', help='表プリセット名（table1〜table8, fig3, fig4）')
@click.option('--compare', is_flag=True, default=False, help='同梱の参照表と比較する')
@model_options
@state_options
@click.option('--sweep', help='パラメータ掃引 FIELD=START:STOP:COUNT')
@click.pass_context
def table(ctx, config_file, compare, **options):
    """表を再計算してCSVに書き出す"""
    settings = _settings(ctx)
    options['compare'] = True if compare else None
    run = _resolve_run_config(Command.TABLE, config_file, options)
    preset = run.table
    click.echo(f"📊 {preset.name}: {preset.description}", err=True)

    result = _run_table(settings, run, preset)
    header = {
        'preset': preset.name,
        **_params_header(preset.base_params),
        'column': preset.column_field,
    }
    _emit_csv(settings, run, result.frame, header)
    click.echo(
        f"⏱️  {result.total_cells}セル, 空セル {len(result.empty_cells) + len(result.degenerate_cells)}, "
        f"{result.duration_seconds:.1f}秒",
        err=True,
    )

    if run.compare:
        _compare_with_reference(settings, preset, result.frame)


def _compare_with_reference(settings: Dict[str, Any], preset: TablePreset, frame: pd.DataFrame) -> None:
    if preset.reference is None:
        raise click.ClickException(f"{preset.name} には参照データがありません")
    try:
        reference = ReferenceTableRepository().load(preset.reference)
    except ReferenceDataError as e:
        raise click.ClickException(f"参照データの読み込みに失敗しました: {e}") from e

    report = TableComparator(settings['solver']['match_tolerance']).compare(preset.reference, frame, reference)
    click.echo(f"max |Δ| = {report.max_delta:.3e}", err=True)
    click.echo(f"mismatches = {report.mismatch_count} / {report.total} (suspect {report.suspect_mismatch_count})",
               err=True)
    if report.passed:
        click.echo("✅ 全ての参照値と一致しました", err=True)
        return

    for row in report.rows[~report.rows['match']].itertuples(index=False):
        flag = ' [suspect]' if row.suspect else ''
        click.echo(
            f"  ❌ n={row.n} κ={row.kappa} column={row.column:g}: "
            f"reference {row.reference:.11f} computed {row.computed:.11f} |Δ|={row.delta:.3e}{flag}",
            err=True,
        )
    raise ComparisonMismatchError(f"{preset.reference}: {report.mismatch_count}件の不一致があります")


@cli.command()
@model_options
@state_options
@click.option('--energy', type=float, help='使用するエネルギー根（省略時は走査で求める）')
@click.option('--root-index', 'root_index', type=int, help='区間内の何番目の根を使うか（既定0）')
@click.option('--points', type=int, help='サンプル点数')
@click.option('--normalization', type=click.Choice(['z', 'r']), help='規格化の測度')
@click.pass_context
def wavefn(ctx, config_file, **options):
    """規格化した波動関数をCSVに書き出す"""
    settings = _settings(ctx)
    run = _resolve_run_config(Command.WAVEFN, config_file, options)
    params, state = run.params, run.states[0]
    if run.energy is not None:
        energy = _checked_energy(settings, params, state, run.energy)
    else:
        energy = _select_root(settings, run, params, state)

    wave_settings = settings['wavefunction']
    points = run.points or wave_settings['points']
    # z を等間隔の中点に取り、端点 r=0, π/(2α) を含めない
    z = (np.arange(points) + 0.5) / points
    r = np.arcsin(np.sqrt(z)) / params.alpha

    try:
        solution = sample_radial(
            params,
            state,
            energy,
            r,
            normalization=run.normalization or wave_settings['normalization'],
            nodes=wave_settings['quadrature_nodes'],
        )
    except (WavefunctionError, ModelError) as e:
        raise click.ClickException(f"波動関数の計算に失敗しました: {e}") from e

    exps = solution.exponents
    header = {
        **_params_header(params),
        'n': state.n,
        'kappa': state.kappa,
        'label': state.label,
        'energy': solution.energy,
        'p': exps.p,
        'q': exps.q,
        'u': exps.u,
        'v': exps.v,
        'norm': solution.norm,
        'norm_method': solution.norm_method,
        'normalization': solution.normalization,
        'closed_form': solution.closed_form_status,
    }
    _emit_csv(settings, run, solution.to_frame(), header)


def _checked_energy(settings: Dict[str, Any], params: ModelParams, state: QuantumState, energy: float) -> float:
    """--energy で与えた値が量子化条件の根であることを確認する"""
    residual = quantization_residual(params, state, energy)
    tolerance = settings['solver']['match_tolerance'] * max(1.0, energy * energy)
    if not residual.valid or abs(residual.value) > tolerance:
        raise click.ClickException(
            f"{state.label}: E={energy:.12g} は量子化条件の根ではありません（残差 {residual.value:.3e}）"
        )
    return energy


def _select_root(settings: Dict[str, Any], run: RunConfig, params: ModelParams, state: QuantumState) -> float:
    try:
        roots = solve_energies(
            params,
            state,
            run.window.resolve(params),
            grid=run.grid or settings['solver']['grid'],
            tol=settings['solver']['tolerance'],
        ).energies
    except WindowDegenerateError as e:
        raise NoRootError(f"{state.label}: {e}") from e
    if run.root_index >= len(roots):
        raise NoRootError(f"{state.label}: {run.root_index}番目の根がありません（{len(roots)}個）")
    click.echo(f"🔎 {state.label}: E = {roots[run.root_index]:.12g}", err=True)
    return roots[run.root_index]


@cli.command()
@click.option('--config', 'config_file', type=click.Path(dir_okay=False), help='実行設定YAMLファイル')
@click.option('--preset', help='ポテンシャルプリセット（fig1, fig2）')
@click.option('--V1', 'V1', type=float, help='ポテンシャル強度 V₁')
@click.option('--V2', 'V2', type=float, help='ポテンシャル強度 V₂')
@click.option('--alpha', type=float, help='ポテンシャル幅 α (fm⁻¹)')
@click.option('--rmin', type=float, help='r の下端（既定 0.02·π/(2α)）')
@click.option('--rmax', type=float, help='r の上端（既定 0.98·π/(2α)）')
@click.option('--points', type=int, help='サンプル点数')
@click.option('--output', type=click.Path(dir_okay=False), help='出力CSVファイル（省略時は標準出力）')
@click.pass_context
def potential(ctx, config_file, **options):
    """ポテンシャル V(r) をCSVに書き出す"""
    settings = _settings(ctx)
    run = _resolve_run_config(Command.POTENTIAL, config_file, options)
    params = run.potential
    half_period = math.pi / (2.0 * params.alpha)
    r_min = run.r_range[0] if run.r_range[0] is not None else 0.02 * half_period
    r_max = run.r_range[1] if run.r_range[1] is not None else 0.98 * half_period
    if not r_min < r_max:
        raise click.ClickException(f"r の範囲が不正です: [{r_min}, {r_max}]")

    pole = find_pole(params.alpha, r_min, r_max)
    if pole is not None:
        raise click.ClickException(f"範囲 [{r_min:g}, {r_max:g}] がポテンシャルの極 r={pole:.12g} を含みます")

    r = np.linspace(r_min, r_max, run.points or settings['wavefunction']['points'])
    try:
        values = potential_tpt(r, params)
    except ModelError as e:
        raise click.ClickException(str(e)) from e
    header = {'V1': params.V1, 'V2': params.V2, 'alpha': params.alpha, 'rmin': r_min, 'rmax': r_max}
    _emit_csv(settings, run, pd.DataFrame({'r': r, 'V': values}), header)


@cli.command('aim-check')
@model_options
@click.option('--kappa', type=int, multiple=True, help='κ')
@click.option('--emin', type=float, help='閉形式根の走査区間の下端')
@click.option('--emax', type=float, help='閉形式根の走査区間の上端')
@click.option('--grid', type=int, help='閉形式根の走査格子の点数')
@click.option('--n-max', 'n_max', type=int, help='照合する n の上限（既定3）')
@click.option('--k', 'k', type=int, help='全ての n に使うAIMの反復深さ（既定 n+2）')
@click.pass_context
def aim_check(ctx, config_file, **options):
    """AIMの根と閉形式の根を照合する"""
    settings = _settings(ctx)
    run = _resolve_run_config(Command.AIM_CHECK, config_file, options)
    aim_settings, solver = settings['aim'], settings['solver']
    checker = SpectrumCrossCheck(
        x0=aim_settings['x0'],
        k_max=aim_settings['k_max'],
        order=aim_settings['order'],
        grid=aim_settings['grid'],
        tolerance=aim_settings['tolerance'],
        check_tolerance=aim_settings['check_tolerance'],
        solver_grid=run.grid or solver['grid'],
        solver_tolerance=solver['tolerance'],
    )
    try:
        report = checker.run(run.params, run.states, k=run.k, window=run.window.resolve(run.params))
    except (AimError, ModelError) as e:
        raise click.ClickException(f"AIMの照合に失敗しました: {e}") from e

    frame = report.to_frame()
    if run.output.format is OutputFormat.TEXT_TABLE:
        for entry in report.entries:
            click.echo(
                f"{entry.label:>8} n={entry.n} k={entry.depth}: closed {entry.closed_form:.12g} "
                f"aim {entry.aim_energy:.12g} |Δ|={entry.delta:.3e} {entry.status.value}"
            )
    else:
        _emit_csv(settings, run, frame, {**_params_header(run.params), 'command': 'aim-check'})
    click.echo(f"max |Δ| = {report.max_delta:.3e}", err=True)

    if report.exit_code == EXIT_NO_ROOT:
        raise NoRootError("AIMの根が見つからない、または収束しない状態があります")
    if report.exit_code == EXIT_MISMATCH:
        raise ComparisonMismatchError(f"AIMと閉形式の差が {report.tolerance:g} を超えました")
    click.echo("✅ AIMと閉形式の根が一致しました", err=True)
