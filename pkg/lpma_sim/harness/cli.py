"""Command-line entry point: simulate, pairing-study, ser-sweep and acceptance subcommands."""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from lpma_sim.config import config
from lpma_sim.harness.acceptance_suite import run_acceptance_suite
from lpma_sim.harness.experiment_config import (
    ConfigError,
    ExperimentConfig,
    PairingSpec,
    build_lpma_config,
    check_consistency,
    load_experiment_config,
)
from lpma_sim.harness.pairing_study import run_pairing_study
from lpma_sim.harness.report_writer import ReportWriter
from lpma_sim.harness.simulation_pipeline import SimulationPipeline, run_ser_sweep
from lpma_sim.utils.logging_config import log_banner, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_ACCEPTANCE_FAILED = 2


def apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Re-validate the config with any --seed/--trials/--out/--parallel flags applied."""
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.out is not None:
        updates["output"] = str(args.out)
    if args.parallel is not None:
        updates["parallel"] = args.parallel
    if not updates:
        return cfg
    cfg = ExperimentConfig.model_validate({**cfg.model_dump(), **updates})
    check_consistency(cfg)
    return cfg


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = apply_overrides(load_experiment_config(args.config), args)
    SimulationPipeline(cfg).run()
    return EXIT_OK


def cmd_pairing_study(args: argparse.Namespace) -> int:
    if args.config is not None:
        cfg = load_experiment_config(args.config)
        spec, seed = cfg.pairing, cfg.seed
    else:
        spec, seed = PairingSpec(), config.DEFAULT_SEED
    if args.trials is not None:
        spec = PairingSpec.model_validate({**spec.model_dump(), "trials": args.trials})
    if args.seed is not None:
        seed = args.seed
    report = run_pairing_study(spec, seed)
    ReportWriter(args.out or config.RESULTS_DIR / "pairing_study").write_pairing(report.to_dict())
    return EXIT_OK


def cmd_ser_sweep(args: argparse.Namespace) -> int:
    cfg = apply_overrides(load_experiment_config(args.config), args)
    frame = run_ser_sweep(build_lpma_config(cfg), args.snr_db, args.symbols, cfg.seed)
    out = Path(cfg.output) if cfg.output else config.RESULTS_DIR / f"{cfg.name}_ser"
    ReportWriter(out).write_ser_sweep(frame)
    return EXIT_OK


def cmd_acceptance(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else config.DEFAULT_SEED
    summary = run_acceptance_suite(seed=seed, scale=args.scale)
    for line in summary.lines():
        print(line)
    return EXIT_OK if summary.passed else EXIT_ACCEPTANCE_FAILED


def _add_run_flags(parser: argparse.ArgumentParser, config_required: bool):
    parser.add_argument("--config", type=Path, required=config_required, help="Experiment JSON file")
    parser.add_argument("--seed", type=int, help="Override the configured seed")
    parser.add_argument("--out", type=Path, help="Output directory for result files")
    parser.add_argument("--trials", type=int, help="Override the configured trial count")
    parser.add_argument("--parallel", type=int, help="Worker processes for trial chunks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpma-sim", description="LPMA codec and link-level simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Monte Carlo throughput of LPMA, NOMA and OMA")
    _add_run_flags(simulate, config_required=True)
    simulate.set_defaults(func=cmd_simulate)

    pairing = sub.add_parser("pairing-study", help="Random-pairing degradation study")
    _add_run_flags(pairing, config_required=False)
    pairing.set_defaults(func=cmd_pairing_study)

    sweep = sub.add_parser("ser-sweep", help="Per-level SIC/PIC symbol error rates over an SNR grid")
    _add_run_flags(sweep, config_required=True)
    sweep.add_argument("--snr-db", type=float, nargs="+", default=[15.0, 20.0, 25.0, 30.0])
    sweep.add_argument("--symbols", type=int, default=100_000)
    sweep.set_defaults(func=cmd_ser_sweep)

    acceptance = sub.add_parser("acceptance", help="Run the acceptance suite")
    acceptance.add_argument("--seed", type=int, help="Seed of the Monte Carlo checks")
    acceptance.add_argument("--scale", type=float, default=1.0, help="Multiplier on trial counts")
    acceptance.set_defaults(func=cmd_acceptance)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(config.LOG_DIR, config.LOG_LEVEL, run_name=args.command)
    log_banner(logger, f"LPMA-SIM: {args.command.upper()}")
    try:
        return args.func(args)
    except (ConfigError, ValidationError, FileNotFoundError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
