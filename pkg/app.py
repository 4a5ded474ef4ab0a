"""
Shapelet Segment Explainer - Main Application
Command-line pipeline: synthetic data, black-box training, shapelet training,
explanation, evaluation and plots
"""

import argparse
import logging
import os
import sys
from typing import Dict, Any, List, Optional

import numpy as np
import pandas as pd

from config import (
    APP_TITLE,
    AMPLITUDE_MODES,
    OCCLUSION_ORDERS,
    PERTURBATION_BASELINES,
    POOLING_MODES,
    SYNTH_VARIANTS,
    ReferenceDefaults,
    SynthDefaults,
    RunConfig,
)
from core.errors import DomainError, ConfigError, DegenerateGroundTruth, IoError, ShapeError
from data import load_dataset, save_dataset, validate_data_quality, SynthConfig, generate
from sdd import TrainConfig, train, save_bank, load_bank
from blackbox import ReferenceTrainConfig, train_reference, save_reference, open_classifier
from attribution import (
    ExplainConfig,
    explain_dataset,
    shapley_record,
    equal_length_shapley,
    activation_saliency,
    random_saliency,
)
from evaluation import saliency_metrics, occlusion, OcclusionCurve, DEFAULT_RATIOS
from ui import create_saliency_figure, create_occlusion_figure, create_loss_figure, write_figure
from utils import (
    setup_logging,
    export_saliency_csv,
    load_saliency_csv,
    export_shapley_json,
    export_table_csv,
    format_table_csv,
)

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ['auprc', 'aup', 'aur']
OCCLUSION_COLUMNS = ['ratio', 'auroc', 'order', 'baseline']
EXPLAIN_METHODS = ['shapelet', 'equal', 'activation', 'random']

# optimisation defaults that differ from the shapelet bank's
COMMAND_DEFAULTS = {
    'train-blackbox': {
        'lr': ReferenceDefaults.LEARNING_RATE,
        'batch': ReferenceDefaults.BATCH_SIZE,
        'epochs': ReferenceDefaults.EPOCHS,
    },
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON file with run configuration keys')
    common.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging verbosity')
    common.add_argument('--log-dir', help='Also write a dated log file to this directory')
    common.add_argument('--seed', type=int, help='Random seed (default: $SHAPEX_SEED or 0)')
    return common


def _add_bank_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument('--n-shapelets', dest='n_shapelets', type=int, help='Number of shapelets N')
    p.add_argument('--shapelet-len', dest='shapelet_len', type=int, help='Shapelet length L')
    p.add_argument('--patch-len', dest='patch_len', type=int, help='Patch length P (divides L)')
    p.add_argument('--num-heads', dest='num_heads', type=int, help='Attention heads H')
    p.add_argument('--d-model', dest='d_model', type=int, help='Encoder width')
    p.add_argument('--no-encoder', dest='use_encoder', action='store_const', const=False,
                   help='Use raw shapelets without the encoder')
    p.add_argument('--pooling', choices=POOLING_MODES, help='Pooling of the classification head')
    p.add_argument('--lambda-match', dest='lambda_match', type=float, help='Matching loss weight')
    p.add_argument('--lambda-div', dest='lambda_div', type=float, help='Diversity loss weight')
    p.add_argument('--delta', type=float, help='Diversity margin')
    p.add_argument('--lr', type=float, help='Adam learning rate')
    p.add_argument('--batch', type=int, help='Mini-batch size')
    p.add_argument('--epochs', type=int, help='Training epochs')


def _add_explain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument('--omega', type=float, help='Activation threshold (default 1.5/N)')
    p.add_argument('--gap-tolerance', dest='gap_tolerance', type=int, help='Adjacency gap in timesteps')
    p.add_argument('--all-runs', dest='all_runs', action='store_const', const=True,
                   help='Keep every super-threshold run, not only the peak run')
    p.add_argument('--k-exact', dest='k_exact', type=int, help='Largest universe enumerated exactly')
    p.add_argument('--num-samples', dest='num_samples', type=int, help='Permutations when sampling')
    p.add_argument('--baseline', choices=PERTURBATION_BASELINES, help='Perturbation baseline')
    p.add_argument('--unrestricted', dest='relational', action='store_const', const=False,
                   help='Let every segment play with every other segment')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='app.py', description=APP_TITLE)
    sub = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')
    common = _common_parser()

    p = sub.add_parser('gen', parents=[common], help='Generate a synthetic benchmark')
    p.add_argument('--variant', choices=SYNTH_VARIANTS, default='mcc', help='Count (mcc) or type (mtc) classes')
    p.add_argument('--mode', choices=AMPLITUDE_MODES, default='h', help='Equal (e) or higher (h) amplitude')
    p.add_argument('--t', type=int, default=SynthDefaults.LENGTH, help='Series length')
    p.add_argument('--train', type=int, default=SynthDefaults.N_TRAIN, help='Training instances')
    p.add_argument('--test', type=int, default=SynthDefaults.N_TEST, help='Test instances')
    p.add_argument('--motif-len', dest='motif_len', type=int, help='Motif length (default T/20)')
    p.add_argument('--out', required=True, help='Output directory for train.tsv and test.tsv')

    p = sub.add_parser('train-blackbox', parents=[common], help='Train the reference CNN')
    p.add_argument('--train', required=True, help='Training dataset')
    p.add_argument('--test', help='Optional test dataset for the accuracy report')
    p.add_argument('--out', required=True, help='Model JSON to write')
    p.add_argument('--lr', type=float, help=f'Adam learning rate (default {ReferenceDefaults.LEARNING_RATE:g})')
    p.add_argument('--batch', type=int, help=f'Mini-batch size (default {ReferenceDefaults.BATCH_SIZE})')
    p.add_argument('--epochs', type=int, help=f'Maximum epochs (default {ReferenceDefaults.EPOCHS})')

    p = sub.add_parser('train-shapelets', parents=[common], help='Learn a shapelet bank')
    p.add_argument('--train', required=True, help='Training dataset')
    p.add_argument('--out', required=True, help='Shapelet bank JSON to write')
    _add_bank_flags(p)

    p = sub.add_parser('explain', parents=[common], help='Saliency maps for every series of a dataset')
    p.add_argument('--data', required=True, help='Dataset to explain')
    p.add_argument('--bank', help='Shapelet bank JSON (shapelet and activation methods)')
    p.add_argument('--model', help="'builtin:PATH' or 'external:CMD'")
    p.add_argument('--out', required=True, help='Saliency CSV to write')
    p.add_argument('--shapley-out', dest='shapley_out', help='Per-segment Shapley JSON to write')
    p.add_argument('--method', choices=EXPLAIN_METHODS, default='shapelet', help='Explanation method')
    p.add_argument('--seg-len', dest='seg_len', type=int, help='Segment length for the equal method')
    _add_explain_flags(p)

    p = sub.add_parser('eval-saliency', parents=[common], help='AUPRC/AUP/AUR against ground truth')
    p.add_argument('--data', required=True, help='Dataset with ground-truth saliency')
    p.add_argument('--saliency', required=True, help='Saliency CSV')
    p.add_argument('--out', help='Metrics CSV to write')
    p.add_argument('--per-instance', dest='per_instance', help='Per-instance metrics CSV to write')

    p = sub.add_parser('eval-occlusion', parents=[common], help='AUROC after masking by saliency')
    p.add_argument('--data', required=True, help='Labeled test dataset')
    p.add_argument('--saliency', required=True, help='Saliency CSV')
    p.add_argument('--model', required=True, help="'builtin:PATH' or 'external:CMD'")
    p.add_argument('--ratios', default=','.join(str(r) for r in DEFAULT_RATIOS),
                   help='Comma-separated masked fractions')
    p.add_argument('--baseline', choices=PERTURBATION_BASELINES, help='Replacement for masked steps')
    p.add_argument('--order', choices=OCCLUSION_ORDERS, default='bottom', help='Mask least or most salient')
    p.add_argument('--out', help='Occlusion CSV to write')

    p = sub.add_parser('plot', parents=[common], help='Render a figure to .svg or .html')
    p.add_argument('--kind', choices=['saliency', 'occlusion', 'loss'], required=True, help='Figure type')
    p.add_argument('--data', help='Dataset (saliency plots)')
    p.add_argument('--saliency', help='Saliency CSV (saliency plots)')
    p.add_argument('--instance', type=int, default=0, help='Instance to draw (saliency plots)')
    p.add_argument('--occlusion', nargs='+', help='Occlusion CSV file(s)')
    p.add_argument('--bank', help='Shapelet bank JSON (loss plot)')
    p.add_argument('--out', required=True, help='Figure path ending in .svg or .html')

    return parser


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """Flags > --config file > defaults; path arguments go into ``paths``"""
    flags = {k: v for k, v in vars(args).items() if v is not None}
    path_keys = ['train', 'test', 'out', 'data', 'bank', 'model', 'saliency', 'shapley_out', 'per_instance']
    paths = {k: str(flags[k]) for k in path_keys if k in flags and isinstance(flags[k], str)}
    if args.command == 'gen':
        # sizes, not paths
        paths = {'out': args.out}
    flags['paths'] = paths
    return RunConfig.from_sources(flags, args.config, COMMAND_DEFAULTS.get(args.command))


def train_config_from(rc: RunConfig) -> TrainConfig:
    return TrainConfig(
        n_shapelets=rc.n_shapelets,
        shapelet_len=rc.shapelet_len,
        patch_len=rc.patch_len,
        num_heads=rc.num_heads,
        d_model=rc.d_model,
        use_encoder=rc.use_encoder,
        pooling=rc.pooling,
        lambda_match=rc.lambda_match,
        lambda_div=rc.lambda_div,
        delta=rc.delta,
        lr=rc.lr,
        batch_size=rc.batch,
        epochs=rc.epochs,
        seed=rc.seed,
    )


def explain_config_from(rc: RunConfig) -> ExplainConfig:
    return ExplainConfig(
        omega=rc.omega,
        gap_tolerance=rc.gap_tolerance,
        all_runs=rc.all_runs,
        k_exact=rc.k_exact,
        num_samples=rc.num_samples,
        seed=rc.seed,
        baseline=rc.baseline,
        relational=rc.relational,
    )


def run_gen(args: argparse.Namespace, rc: RunConfig) -> None:
    cfg = SynthConfig(
        variant=args.variant,
        amplitude_mode=args.mode,
        length=args.t,
        n_train=args.train,
        n_test=args.test,
        motif_len=args.motif_len,
        seed=rc.seed,
    )
    train_ds, test_ds = generate(cfg)
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as e:
        raise IoError(f"Cannot create output directory {args.out}: {e}") from e
    save_dataset(train_ds, os.path.join(args.out, 'train.tsv'))
    save_dataset(test_ds, os.path.join(args.out, 'test.tsv'))
    logger.info(f"Train split: {validate_data_quality(train_ds)}")


def run_train_blackbox(args: argparse.Namespace, rc: RunConfig) -> None:
    train_ds = load_dataset(args.train)
    test_ds = load_dataset(args.test) if args.test else None
    config = ReferenceTrainConfig(lr=rc.lr, batch_size=rc.batch, epochs=rc.epochs, seed=rc.seed)
    handle = train_reference(train_ds, config, test_ds)
    save_reference(handle, args.out)
    print(format_table_csv([handle.report], list(handle.report)), end='')


def run_train_shapelets(args: argparse.Namespace, rc: RunConfig) -> None:
    train_ds = load_dataset(args.train)
    bank = train(train_ds, train_config_from(rc))
    save_bank(bank, args.out)


def run_explain(args: argparse.Namespace, rc: RunConfig) -> None:
    ds = load_dataset(args.data)
    method = args.method
    if method in ('shapelet', 'activation') and not args.bank:
        raise ConfigError(f"--bank is required for method '{method}'")
    if method in ('shapelet', 'equal') and not args.model:
        raise ConfigError(f"--model is required for method '{method}'")

    if method == 'random':
        maps = [random_saliency(ds.length, rc.seed + i) for i in range(len(ds))]
        export_saliency_csv(maps, args.out)
        return

    bank = load_bank(args.bank) if args.bank else None
    if bank is not None and bank.hyper.series_length != ds.length:
        raise ShapeError(
            f"Bank {args.bank} was trained on length {bank.hyper.series_length}, "
            f"dataset {args.data} has length {ds.length}"
        )
    if method == 'activation':
        export_saliency_csv([activation_saliency(ts.values, bank) for ts in ds], args.out)
        return

    with open_classifier(args.model) as classifier:
        config = explain_config_from(rc)
        if method == 'equal':
            seg_len = args.seg_len or max(1, ds.length // 10)
            shapley_config = config.shapley_config()
            maps = []
            for ts in ds:
                target = int(np.argmax(classifier.predict_proba(ts.values)))
                maps.append(equal_length_shapley(ts.values, classifier, target, seg_len, shapley_config))
            export_saliency_csv(maps, args.out)
            return

        explanations = explain_dataset(ds, bank, classifier, config)
    export_saliency_csv([e.saliency for e in explanations], args.out)
    if args.shapley_out:
        export_shapley_json([shapley_record(e, i) for i, e in enumerate(explanations)], args.shapley_out)


def _load_maps(path: str, n: int):
    maps = load_saliency_csv(path)
    if len(maps) != n:
        raise ShapeError(f"{path} holds {len(maps)} saliency maps for {n} instances")
    return maps


def run_eval_saliency(args: argparse.Namespace, rc: RunConfig) -> None:
    ds = load_dataset(args.data)
    if not ds.has_saliency:
        raise ConfigError(f"{args.data} has no ground-truth saliency columns")
    maps = _load_maps(args.saliency, len(ds))

    rows: List[Dict[str, Any]] = []
    for i, (ts, m) in enumerate(zip(ds, maps)):
        try:
            metrics = saliency_metrics(m, ts.gt_saliency)
        except DegenerateGroundTruth:
            logger.warning(f"Instance {i} has constant ground truth; skipped")
            continue
        rows.append({'instance': i, 'auprc': metrics.auprc, 'aup': metrics.aup, 'aur': metrics.aur})
    if not rows:
        raise DegenerateGroundTruth("Every instance has constant ground truth")

    table = pd.DataFrame(rows)
    summary = [{c: float(table[c].mean()) for c in METRIC_COLUMNS}]
    if args.per_instance:
        export_table_csv(rows, args.per_instance, ['instance'] + METRIC_COLUMNS)
    if args.out:
        export_table_csv(summary, args.out, METRIC_COLUMNS)
    print(format_table_csv(summary, METRIC_COLUMNS), end='')


def _parse_ratios(text: str) -> List[float]:
    try:
        return [float(r) for r in text.split(',') if r.strip()]
    except ValueError:
        raise ConfigError(f"--ratios must be comma-separated numbers, got '{text}'")


def run_eval_occlusion(args: argparse.Namespace, rc: RunConfig) -> None:
    ds = load_dataset(args.data)
    maps = _load_maps(args.saliency, len(ds))
    with open_classifier(args.model) as classifier:
        curve = occlusion(ds, maps, classifier, _parse_ratios(args.ratios), rc.baseline, args.order)
    if args.out:
        export_table_csv(curve.rows(), args.out, OCCLUSION_COLUMNS)
    print(format_table_csv(curve.rows(), OCCLUSION_COLUMNS), end='')


def _read_curve(path: str) -> OcclusionCurve:
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"Cannot read occlusion file {path}: {e}")
    if list(df.columns) != OCCLUSION_COLUMNS or df.empty:
        raise ConfigError(f"{path} is not an occlusion CSV")
    return OcclusionCurve(
        tuple(df['ratio'].astype(float)), tuple(df['auroc'].astype(float)),
        str(df['order'].iloc[0]), str(df['baseline'].iloc[0])
    )


def run_plot(args: argparse.Namespace, rc: RunConfig) -> None:
    if args.kind == 'saliency':
        if not args.data or not args.saliency:
            raise ConfigError("--data and --saliency are required for saliency plots")
        ds = load_dataset(args.data)
        maps = _load_maps(args.saliency, len(ds))
        if not 0 <= args.instance < len(ds):
            raise ConfigError(f"--instance must lie in [0, {len(ds)})")
        ts = ds[args.instance]
        fig = create_saliency_figure(
            ts.values, maps[args.instance], ts.gt_saliency,
            title=f"{ds.name} instance {args.instance}"
        )
    elif args.kind == 'occlusion':
        if not args.occlusion:
            raise ConfigError("--occlusion is required for occlusion plots")
        fig = create_occlusion_figure([_read_curve(p) for p in args.occlusion])
    else:
        if not args.bank:
            raise ConfigError("--bank is required for loss plots")
        fig = create_loss_figure(load_bank(args.bank).history)
    write_figure(fig, args.out)


COMMANDS = {
    'gen': run_gen,
    'train-blackbox': run_train_blackbox,
    'train-shapelets': run_train_shapelets,
    'explain': run_explain,
    'eval-saliency': run_eval_saliency,
    'eval-occlusion': run_eval_occlusion,
    'plot': run_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command

    Returns:
        0 on success, 1 on a domain error; usage errors exit with 2 via argparse
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_dir)

    try:
        rc = resolve_run_config(args)
        print(rc.to_json(), flush=True)
        COMMANDS[args.command](args, rc)
    except DomainError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    logger.info(f"{args.command} finished")
    return 0


if __name__ == '__main__':
    sys.exit(main())
