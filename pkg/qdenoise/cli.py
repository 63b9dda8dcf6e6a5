"""
Command-line entry point: ``generate``, ``train``, ``eval`` and ``inspect``.

Precedence is flags > ``--config`` file > built-in defaults. Every command
that writes artifacts also writes the resolved configuration next to them.
Exit codes: 0 on success, 1 for runtime failures, 2 for usage and
configuration errors.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import configuration
from .configuration import ConfigError
from .dataset import (
    DatasetGenerator,
    QDSFormatError,
    cell_table,
    read_qds,
    split_train_test,
    write_qds,
)
from .evaluation import (
    BASELINE_CORRECTORS,
    ModelCorrector,
    ReportError,
    UndefinedCorrelationError,
    correlation,
    evaluate_corrections,
    export_heatmaps,
    export_reports,
    reconstruct_state,
)
from .fileio import partial_path
from .localization import _
from .metrics import purity, uhlmann_fidelity
from .models import Dataset
from .nn import Autoencoder, CheckpointError, ModelConfig, init_params, load_checkpoint, save_checkpoint
from .train import TrainConfig, train

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def _levels(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid level list '{text}'") from e


def _filters(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid filter list '{text}'") from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help=_("YAML configuration file"))
    common.add_argument('--verbose', '-v', action='store_true', help=_("log at DEBUG level"))

    parser = argparse.ArgumentParser(
        prog='qdenoise',
        description=_("Quantum density-matrix denoising with a convolutional autoencoder."),
    )
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', parents=[common], help=_("generate a QDS1 dataset"))
    gen.add_argument('--qubits', type=int)
    gen.add_argument('--samples', type=int)
    gen.add_argument('--depth-min', type=int)
    gen.add_argument('--depth-max', type=int)
    gen.add_argument('--kinds', help=_("'all' or a comma-separated list of noise kinds"))
    gen.add_argument('--levels', type=_levels, help=_("comma-separated noise levels"))
    gen.add_argument('--seed', type=int)
    gen.add_argument('--threads', type=int, help=_("worker threads (default: QDEN_THREADS, then core count)"))
    gen.add_argument('--out', required=True, help=_("output .qds file"))

    tr = sub.add_parser('train', parents=[common], help=_("train the autoencoder"))
    tr.add_argument('--data', required=True)
    tr.add_argument('--epochs', type=int)
    tr.add_argument('--batch-size', type=int)
    tr.add_argument('--lr', type=float)
    tr.add_argument('--lambda', dest='lam', type=float)
    tr.add_argument('--filters', type=_filters)
    tr.add_argument('--dropout', type=float)
    tr.add_argument('--test-fraction', type=float)
    tr.add_argument('--split-seed', type=int)
    tr.add_argument('--seed', type=int)
    tr.add_argument('--log', help=_("epoch log (JSON lines); default <out>.log.jsonl"))
    tr.add_argument('--out', required=True, help=_("output .qnn checkpoint"))

    ev = sub.add_parser('eval', parents=[common], help=_("evaluate a checkpoint or baseline"))
    ev.add_argument('--data', required=True)
    group = ev.add_mutually_exclusive_group(required=True)
    group.add_argument('--model', help=_("QNN1 checkpoint"))
    group.add_argument('--baseline', choices=sorted(BASELINE_CORRECTORS))
    ev.add_argument('--test-fraction', type=float)
    ev.add_argument('--split-seed', type=int)
    ev.add_argument('--batch-size', type=int)
    ev.add_argument('--heatmaps', type=int, help=_("export heatmaps for the first N test samples"))
    ev.add_argument('--out', required=True, help=_("report directory"))

    ins = sub.add_parser('inspect', parents=[common], help=_("print dataset statistics"))
    ins.add_argument('--data', required=True)
    return parser


def _resolve(args: argparse.Namespace, overrides: Dict[str, Any], check_model_fit: bool = True) -> Dict[str, Any]:
    config = configuration.load_config(args.config)
    config = configuration.apply_overrides(config, overrides)
    configuration.validate_config(config, check_model_fit=check_model_fit)
    return config


def _echo_path(out: Path) -> Path:
    return out / 'config.yaml' if out.is_dir() else out.with_name(out.name + '.config.yaml')


def _model_config(config: Dict[str, Any], dim: int) -> ModelConfig:
    model = config['model']
    try:
        return ModelConfig(
            dim=dim,
            filters=tuple(model['filters']),
            kernel_size=model['kernel_size'],
            dropout=float(model['dropout']),
            lam=float(model['lambda']),
            skip=model['skip'],
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def cmd_generate(args: argparse.Namespace) -> int:
    config = _resolve(args, {
        'dataset.qubits': args.qubits,
        'dataset.samples': args.samples,
        'dataset.depth_min': args.depth_min,
        'dataset.depth_max': args.depth_max,
        'dataset.kinds': args.kinds,
        'dataset.levels': args.levels,
        'seed': args.seed,
        'threads': args.threads,
    }, check_model_fit=False)
    config['threads'] = configuration.resolve_threads(config['threads'])
    ds = config['dataset']
    generator = DatasetGenerator(
        num_qubits=ds['qubits'],
        depth_min=ds['depth_min'],
        depth_max=ds['depth_max'],
        kinds=configuration.resolve_kinds(ds['kinds']),
        levels=ds['levels'],
        global_seed=config['seed'],
        threads=config['threads'],
    )
    dataset = generator.generate(ds['samples'])
    out = Path(args.out)
    write_qds(dataset, out)
    configuration.save_config(config, _echo_path(out))

    print(_("Wrote {n} samples to {path}").format(n=len(dataset), path=out))
    for cell, count in cell_table(dataset).items():
        print(f"  {cell:<24} {count}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    config = _resolve(args, {
        'train.epochs': args.epochs,
        'train.batch_size': args.batch_size,
        'train.lr': args.lr,
        'train.test_fraction': args.test_fraction,
        'train.split_seed': args.split_seed,
        'model.lambda': args.lam,
        'model.filters': args.filters,
        'model.dropout': args.dropout,
        'seed': args.seed,
    }, check_model_fit=False)
    dataset = read_qds(args.data)
    config['dataset']['qubits'] = dataset.manifest.num_qubits
    model_config = _model_config(config, dataset.manifest.dim)
    tc = config['train']
    train_config = TrainConfig(
        epochs=tc['epochs'],
        batch_size=tc['batch_size'],
        initial_lr=float(tc['lr']),
        lr_decay_factor=float(tc['lr_decay_factor']),
        plateau_patience_epochs=tc['plateau_patience'],
        validation_fraction=float(tc['validation_fraction']),
        early_stop_patience=tc['early_stop_patience'],
        shuffle_seed=config['seed'],
    )

    train_ids, test_ids = split_train_test(dataset, tc['test_fraction'], tc['split_seed'])
    logger.info("Held out %d of %d samples for testing.", len(test_ids), len(dataset))
    params = init_params(model_config, config['seed'])
    logger.info("Model has %d parameters.", params.count())

    out = Path(args.out)
    log_path = Path(args.log) if args.log else out.with_name(out.name + '.log.jsonl')
    log_partial = partial_path(log_path)
    trainer, result = train(params, model_config, dataset, train_ids, train_config, log_partial)
    logger.debug("%d samples contributed gradients.", len(trainer.gradient_indices))
    if log_partial.exists():
        os.replace(log_partial, log_path)

    best = result.best_params or result.params
    save_checkpoint(out, best, model_config, run={
        'split_seed': tc['split_seed'],
        'test_fraction': tc['test_fraction'],
        'seed': config['seed'],
        'best_epoch': result.best_epoch,
        'best_val_loss': result.best_val_loss if result.best_epoch is not None else None,
        'epochs_run': len(result.logs),
        'stopped_early': result.stopped_early,
    })
    configuration.save_config(config, _echo_path(out))

    if result.best_epoch is None:
        print(_("No epochs run; wrote the initial weights to {path}").format(path=out))
    else:
        print(_("Best validation loss {loss:.4f} at epoch {epoch}; checkpoint written to {path}").format(
            loss=result.best_val_loss, epoch=result.best_epoch + 1, path=out))
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    config = _resolve(args, {
        'train.test_fraction': args.test_fraction,
        'train.split_seed': args.split_seed,
        'eval.batch_size': args.batch_size,
        'eval.heatmaps': args.heatmaps,
    }, check_model_fit=False)
    dataset = read_qds(args.data)
    config['dataset']['qubits'] = dataset.manifest.num_qubits
    test_fraction = config['train']['test_fraction']
    split_seed = config['train']['split_seed']
    batch_size = config['eval']['batch_size']

    if args.model:
        expected = None
        if args.config and 'model' in configuration.read_config_file(args.config):
            expected = _model_config(config, dataset.manifest.dim)
        params, model_config, run = load_checkpoint(args.model, expected)
        if model_config.dim != dataset.manifest.dim:
            raise CheckpointError(
                f"Checkpoint expects {model_config.dim}x{model_config.dim} states, "
                f"dataset holds {dataset.manifest.dim}x{dataset.manifest.dim}."
            )
        # The checkpoint's split wins unless a flag overrides it.
        if args.test_fraction is None and 'test_fraction' in run:
            test_fraction = run['test_fraction']
        if args.split_seed is None and 'split_seed' in run:
            split_seed = run['split_seed']
        corrector = ModelCorrector(Autoencoder(model_config, params), batch_size)
    else:
        corrector = BASELINE_CORRECTORS[args.baseline]()
    config['train']['test_fraction'] = test_fraction
    config['train']['split_seed'] = split_seed

    train_ids, test_ids = split_train_test(dataset, test_fraction, split_seed)
    logger.info("Evaluating %s on %d held-out samples (%d used for training).", corrector.name, len(test_ids), len(train_ids))
    summary = evaluate_corrections(corrector, dataset.records, test_ids, batch_size)
    out = Path(args.out)
    export_reports(summary, out)

    flagged = set(summary.flagged_indices)
    heatmap_ids = [i for i in test_ids if i not in flagged][: config['eval']['heatmaps']]
    for i in heatmap_ids:
        record = dataset.records[i]
        channels = corrector.correct([record], dataset.channels([i], 'noisy'))[0]
        export_heatmaps(record, reconstruct_state(record.clean.num_qubits, channels), out / 'heatmaps', f"sample_{i}")
    configuration.save_config(config, _echo_path(out))

    _print_rows(_("By noise type"), summary.by_kind)
    _print_rows(_("By noise level"), summary.by_level)
    _print_rows(_("Overall"), [summary.overall])
    if summary.correlation is not None:
        print(_("Level/noisy-fidelity correlation: {r:.3f}").format(r=summary.correlation))
    print(_("Negative improvements: {n} of {total}").format(n=summary.negative_count, total=summary.overall.count))
    if summary.flagged_indices:
        print(_("Unreconstructable predictions: {n}").format(n=len(summary.flagged_indices)))
    return EXIT_OK


def _print_rows(title: str, rows) -> None:
    print(title)
    print(f"  {'group':<20} {'noisy':>7} {'corrected':>10} {'improvement':>12}")
    for row in rows:
        print(f"  {row.group:<20} {row.noisy_fidelity:7.3f} {row.corrected_fidelity:10.3f} {row.improvement:12.3f}")


def dataset_statistics(dataset: Dataset) -> Dict[str, Any]:
    """Per-cell noisy fidelity and purity means plus the level/fidelity correlation."""
    fidelities = [uhlmann_fidelity(r.clean, r.noisy) for r in dataset.records]
    purities = [purity(r.noisy) for r in dataset.records]
    cells: Dict[str, Dict[str, float]] = {}
    for (kind, level), count in dataset.cell_counts().items():
        members = [i for i, r in enumerate(dataset.records) if r.kind.label == kind and r.noise_level == level]
        cells[f"{kind}@{level:g}"] = {
            'count': count,
            'noisy_fidelity': float(np.mean([fidelities[i] for i in members])),
            'purity': float(np.mean([purities[i] for i in members])),
        }
    try:
        corr: Optional[float] = correlation([r.noise_level for r in dataset.records], fidelities)
    except (UndefinedCorrelationError, ValueError):
        corr = None
    return {'cells': cells, 'correlation': corr}


def cmd_inspect(args: argparse.Namespace) -> int:
    dataset = read_qds(args.data)
    m = dataset.manifest
    print(_("Dataset {path}").format(path=args.data))
    print(f"  qubits={m.num_qubits} dim={m.dim} samples={m.num_samples} seed={m.global_seed} version={m.version}")
    print(f"  kinds={','.join(m.kinds)} levels={','.join(f'{p:g}' for p in m.levels)}")
    stats = dataset_statistics(dataset)
    print(f"  {'cell':<24} {'count':>6} {'fidelity':>9} {'purity':>7}")
    for cell, row in stats['cells'].items():
        print(f"  {cell:<24} {row['count']:>6} {row['noisy_fidelity']:9.3f} {row['purity']:7.3f}")
    if stats['correlation'] is None:
        print(_("Level/noisy-fidelity correlation: undefined"))
    else:
        print(_("Level/noisy-fidelity correlation: {r:.3f}").format(r=stats['correlation']))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    'generate': cmd_generate,
    'train': cmd_train,
    'eval': cmd_eval,
    'inspect': cmd_inspect,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (QDSFormatError, CheckpointError, ReportError) as e:
        logger.error("%s", e)
        return EXIT_FAILURE
    except (ValueError, ArithmeticError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
