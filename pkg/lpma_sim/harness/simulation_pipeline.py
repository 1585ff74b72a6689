"""Monte Carlo campaigns: LPMA decoded throughput against the NOMA and OMA baselines."""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import norm
from tqdm import tqdm

from lpma_sim.baselines.baseline_schemes import noma_throughput, oma_throughput
from lpma_sim.channel.channel_model import (
    ChannelRealization,
    apply_channel,
    complex_noise,
    rayleigh_sample,
    realization_from_snr,
)
from lpma_sim.config import config
from lpma_sim.harness.experiment_config import ExperimentConfig, Scheme, build_lpma_config, check_consistency
from lpma_sim.harness.report_writer import ReportRow, ReportWriter, ThroughputReport
from lpma_sim.lattice.lpma_codec import (
    DecodeResult,
    DecoderKind,
    LpmaConfig,
    channel_compensate,
    hybrid_decode,
    lpma_encode,
    mlo_pic_decode,
    mlo_sic_decode,
)
from lpma_sim.scheduling.scheduler_pairing import noma_group_valid
from lpma_sim.utils.logging_config import log_banner

logger = logging.getLogger(__name__)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream of one trial, fixed by (seed, trial index) alone."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def confidence_z(level: float = config.CONFIDENCE_LEVEL) -> float:
    return float(norm.ppf(0.5 + level / 2.0))


def wilson_halfwidth(p: float, trials: int, z: float) -> float:
    """Half-width of the Wilson score interval of a success frequency."""
    if trials == 0:
        return 0.0
    denom = 1.0 + z * z / trials
    return float(z / denom * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)))


def mean_halfwidth(values: np.ndarray, z: float) -> float:
    """Normal-approximation half-width of a sample mean."""
    if len(values) < 2:
        return 0.0
    return float(z * np.std(values, ddof=1) / math.sqrt(len(values)))


@dataclass
class TrialOutcomes:
    """Per-trial results of a trial range, users in configured order."""

    lpma_success: np.ndarray
    noma: np.ndarray
    oma: np.ndarray

    @classmethod
    def concatenate(cls, parts: Sequence["TrialOutcomes"], users: int) -> "TrialOutcomes":
        if not parts:
            return cls(np.zeros((0, users), bool), np.zeros((0, users)), np.zeros((0, users)))
        return cls(
            np.concatenate([p.lpma_success for p in parts]),
            np.concatenate([p.noma for p in parts]),
            np.concatenate([p.oma for p in parts]),
        )


def decode_user(cfg: ExperimentConfig, lpma: LpmaConfig, y_tilde: np.ndarray, level: int) -> DecodeResult:
    """Run the configured receiver for the user holding `level`."""
    kind = cfg.decoder.kind
    if kind is DecoderKind.SIC:
        return mlo_sic_decode(lpma, y_tilde, level)
    if kind is DecoderKind.PIC:
        return mlo_pic_decode(lpma, y_tilde, level)
    pic, sic = cfg.decoder.split(level)
    return hybrid_decode(lpma, y_tilde, pic, sic, target_level=level)


def scheduled_noma_valid(mean_gains: np.ndarray, threshold: float) -> bool:
    """The scheduler accepts the group when neighbouring sorted mean gains are far enough apart."""
    ordered = np.sort(mean_gains)
    if len(ordered) < 2:
        return True
    neighbours = np.stack([ordered[:-1], ordered[1:]], axis=-1)
    try:
        return bool(np.all(noma_group_valid(neighbours, threshold)))
    except ValueError:
        return False


def simulate_trials(cfg: ExperimentConfig, lpma: Optional[LpmaConfig], start: int, stop: int) -> TrialOutcomes:
    """
    Simulate trials start..stop-1.

    Every trial draws, from its own stream and in this order: one message
    per level, one fading coefficient per user, one noise block per user.

    Args:
        cfg: Experiment configuration
        lpma: Codec configuration (None when LPMA is not simulated)
        start: First trial index
        stop: One past the last trial index

    Returns:
        Success flags and baseline throughputs per trial and user
    """
    ids = cfg.users.user_ids
    users = len(ids)
    trials = stop - start
    n = cfg.block_length
    mean_gains = cfg.mean_gains()

    levels = lpma.levels if lpma is not None else ()
    messages = [np.empty((trials, level.code.k), dtype=np.int64) for level in levels]
    fades = np.ones((trials, users), dtype=np.complex128)
    noise = np.zeros((trials, users, n), dtype=np.complex128)
    for t in range(trials):
        rng = trial_rng(cfg.seed, start + t)
        for i, level in enumerate(levels):
            messages[i][t] = rng.integers(0, level.code.q, size=level.code.k)
        fade = rayleigh_sample(rng, users)
        block = complex_noise(rng, 1.0, (users, n))
        if cfg.fading:
            fades[t] = fade
        if cfg.noise:
            noise[t] = block

    channel = realization_from_snr(mean_gains, fade=fades)
    h = channel.h
    gains = channel.snr

    success = np.zeros((trials, users), dtype=bool)
    if lpma is not None and trials:
        samples = lpma_encode(lpma, messages).samples
        for i, user_id in enumerate(ids):
            level = lpma.level_of_user(user_id)
            usable = h[:, i] != 0
            link = ChannelRealization(h=np.where(usable, h[:, i], 1.0)[:, None])
            y = apply_channel(samples, link, noise=noise[:, i])
            y_tilde = channel_compensate(lpma, y, link.h)
            result = decode_user(cfg, lpma, y_tilde, level)
            success[:, i] = result.block_correct(level, messages[level - 1]) & usable

    table = cfg.table()
    noma = np.zeros((trials, users))
    if Scheme.NOMA in cfg.schemes and trials:
        order = np.argsort(gains, axis=1, kind="stable")
        ordered = np.take_along_axis(gains, order, axis=1)
        valid = scheduled_noma_valid(mean_gains, cfg.noma_threshold)
        per_position = noma_throughput(cfg.noma_config(), ordered, table, valid)
        np.put_along_axis(noma, order, per_position, axis=1)

    oma = np.zeros((trials, users))
    if Scheme.OMA in cfg.schemes and trials:
        oma = oma_throughput(cfg.power, gains, cfg.shares(), table)

    return TrialOutcomes(success, noma, oma)


def _simulate_chunk(cfg: ExperimentConfig, bounds: Tuple[int, int]) -> TrialOutcomes:
    lpma = build_lpma_config(cfg) if Scheme.LPMA in cfg.schemes else None
    return simulate_trials(cfg, lpma, *bounds)


def trial_chunks(trials: int, batch: int = config.TRIAL_BATCH_SIZE) -> List[Tuple[int, int]]:
    return [(s, min(s + batch, trials)) for s in range(0, trials, batch)]


def summarize(cfg: ExperimentConfig, lpma: Optional[LpmaConfig], outcomes: TrialOutcomes) -> ThroughputReport:
    """Means, success rates and confidence half-widths per scheme × user, plus a sum row."""
    report = ThroughputReport(
        name=cfg.name,
        seed=cfg.seed,
        trials=cfg.trials,
        config_digest=cfg.digest(),
        config=cfg.provenance(),
    )
    trials = len(outcomes.lpma_success)
    if trials == 0:
        return report

    z = confidence_z()
    ids = cfg.users.user_ids
    for scheme in cfg.schemes:
        if scheme is Scheme.LPMA:
            credits = np.array([
                lpma.level(lpma.level_of_user(uid)).code.rate * math.log2(lpma.level(lpma.level_of_user(uid)).theta.norm_q)
                for uid in ids
            ])
            for i, uid in enumerate(ids):
                p = float(outcomes.lpma_success[:, i].mean())
                report.rows.append(ReportRow(
                    scheme.value, str(uid), float(credits[i] * p), p, float(credits[i] * wilson_halfwidth(p, trials, z))
                ))
            per_trial = outcomes.lpma_success @ credits
            all_ok = float(outcomes.lpma_success.all(axis=1).mean())
            report.rows.append(ReportRow(
                scheme.value, "sum", float(per_trial.mean()), all_ok, mean_halfwidth(per_trial, z)
            ))
        else:
            values = outcomes.noma if scheme is Scheme.NOMA else outcomes.oma
            for i, uid in enumerate(ids):
                report.rows.append(ReportRow(
                    scheme.value, str(uid), float(values[:, i].mean()), 1.0, mean_halfwidth(values[:, i], z)
                ))
            per_trial = values.sum(axis=1)
            report.rows.append(ReportRow(
                scheme.value, "sum", float(per_trial.mean()), 1.0, mean_halfwidth(per_trial, z)
            ))
    return report


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None, progress: bool = True) -> ThroughputReport:
    """
    Run the configured campaign and aggregate it into a ThroughputReport.

    Trials are processed in fixed-size chunks; with several workers the
    chunks are mapped in order over a process pool, so the report does not
    depend on the worker count.
    """
    check_consistency(cfg)
    lpma = build_lpma_config(cfg) if Scheme.LPMA in cfg.schemes else None
    workers = workers or cfg.parallel
    chunks = trial_chunks(cfg.trials)
    users = cfg.user_count

    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(tqdm(
                pool.map(partial(_simulate_chunk, cfg), chunks),
                total=len(chunks), desc=f"{cfg.name} ({workers} workers)", disable=not progress,
            ))
    else:
        parts = [
            simulate_trials(cfg, lpma, start, stop)
            for start, stop in tqdm(chunks, desc=cfg.name, disable=not progress)
        ]

    outcomes = TrialOutcomes.concatenate(parts, users)
    return summarize(cfg, lpma, outcomes)


def run_ser_sweep(lpma: LpmaConfig, snr_grid_db: Sequence[float], symbols: int, seed: int) -> pd.DataFrame:
    """
    Per-level symbol error rates of SIC and PIC decoding over an AWGN SNR grid.

    Messages and unit-variance noise are drawn once and reused at every grid
    point, so differences between points come from the SNR alone.

    Args:
        lpma: Codec configuration
        snr_grid_db: Mean SNR points in dB
        symbols: Minimum number of channel symbols per point
        seed: Seed of the common random numbers

    Returns:
        DataFrame with columns snr_db, level, decoder, symbol_error_rate, symbols
    """
    rng = np.random.default_rng(seed)
    blocks = max(1, math.ceil(symbols / lpma.block_length))
    messages = [rng.integers(0, level.code.q, size=(blocks, level.code.k)) for level in lpma.levels]
    noise = complex_noise(rng, 1.0, (blocks, lpma.block_length))
    signal = lpma_encode(lpma, messages)
    total = blocks * lpma.block_length

    records = []
    for snr_db in tqdm(snr_grid_db, desc="SER sweep"):
        link = realization_from_snr(10.0 ** (snr_db / 10.0), fading=False)
        y = apply_channel(signal.samples, link, noise=noise)
        y_tilde = channel_compensate(lpma, y, link.h)
        sic = mlo_sic_decode(lpma, y_tilde, lpma.num_levels)
        for level in range(1, lpma.num_levels + 1):
            truth = signal.codewords[level - 1]
            pic = mlo_pic_decode(lpma, y_tilde, level)
            for kind, result in ((DecoderKind.SIC, sic), (DecoderKind.PIC, pic)):
                errors = int(np.count_nonzero(result.decisions[level].v_hat != truth))
                records.append({
                    "snr_db": float(snr_db),
                    "level": level,
                    "decoder": kind.value,
                    "symbol_error_rate": errors / total,
                    "symbols": total,
                })
    return pd.DataFrame.from_records(records, columns=["snr_db", "level", "decoder", "symbol_error_rate", "symbols"])


class SimulationPipeline:
    """Run one experiment end to end and write its result files."""

    def __init__(self, cfg: ExperimentConfig, out_dir: Optional[Path] = None):
        self.cfg = cfg
        self.writer = ReportWriter(out_dir or (Path(cfg.output) if cfg.output else config.RESULTS_DIR / cfg.name))

    def run(self, progress: bool = True) -> ThroughputReport:
        start_time = time.time()
        try:
            report = run_experiment(self.cfg, progress=progress)
        except Exception as e:
            logger.error(f"Experiment '{self.cfg.name}' failed: {e}")
            raise
        paths = self.writer.write(report)

        lines = [f"Trials: {self.cfg.trials} (seed {self.cfg.seed})"]
        for scheme in self.cfg.schemes:
            if report.rows:
                lines.append(
                    f"{scheme.value.upper()} sum throughput: {report.sum_throughput(scheme.value):.4f} bits/symbol "
                    f"(success {report.sum_success(scheme.value):.4f})"
                )
        lines.append(f"Total time: {time.time() - start_time:.1f} s")
        lines.append(f"CSV: {paths['csv']}")
        log_banner(logger, "SIMULATION COMPLETE", lines)
        return report


def sweep_points(cfg: ExperimentConfig, snr_grid_db: Sequence[float]) -> Dict[float, ExperimentConfig]:
    """Copies of an experiment with every user's mean SNR set to each grid point."""
    points = {}
    for snr_db in snr_grid_db:
        users = cfg.users.model_copy(update={
            "gains": None, "distances_km": None, "snr_db": [float(snr_db)] * cfg.user_count,
        })
        points[float(snr_db)] = cfg.model_copy(update={"users": users, "name": f"{cfg.name}@{snr_db:g}dB"})
    return points
