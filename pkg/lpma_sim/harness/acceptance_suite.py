"""End-to-end acceptance checks with per-check timing and a pass/fail summary."""

import logging
import math
import tempfile
import time
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
from tqdm import tqdm

from lpma_sim.baselines.baseline_schemes import NomaConfig, noma_sum_rate
from lpma_sim.config import config
from lpma_sim.harness.experiment_config import (
    CodeSpec,
    DecoderSpec,
    ExperimentConfig,
    PairingSpec,
    UserModel,
)
from lpma_sim.harness.pairing_study import run_pairing_study
from lpma_sim.harness.report_writer import ReportWriter
from lpma_sim.harness.simulation_pipeline import run_experiment, run_ser_sweep, sweep_points
from lpma_sim.lattice.finite_field_codes import LinearCode
from lpma_sim.lattice.lpma_codec import (
    LevelConfig,
    LpmaConfig,
    channel_compensate,
    hybrid_decode,
    lpma_encode,
    map_pi_a,
    mlo_pic_decode,
    mlo_sic_decode,
    representative_set,
)
from lpma_sim.lattice.ring_arithmetic import RingDomain, RingPrime, embed_array, quantize_array
from lpma_sim.utils.logging_config import log_banner

logger = logging.getLogger(__name__)

CheckOutcome = Tuple[bool, str]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class AcceptanceSummary:
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]

    def lines(self) -> List[str]:
        return [
            f"[{'PASS' if r.passed else 'FAIL'}] {r.name:<28} {r.seconds:7.2f} s  {r.detail}"
            for r in self.results
        ]


def uncoded_config(domain: RingDomain, coords, n: int = 1, power: float = 1.0) -> LpmaConfig:
    levels = []
    for user_id, (a, b) in enumerate(coords, 1):
        theta = RingPrime.from_coordinates(domain, a, b)
        levels.append(LevelConfig(user_id, theta, LinearCode.identity(theta.norm_q, n)))
    return LpmaConfig.build(levels, power=power)


def _exhaustive_round_trip(lpma: LpmaConfig) -> CheckOutcome:
    fields = [range(level.theta.norm_q) for level in lpma.levels]
    tuples = np.array(list(product(*fields)), dtype=np.int64)
    codewords = [tuples[:, [i]] for i in range(lpma.num_levels)]
    word = map_pi_a(lpma, codewords)

    ref_a, ref_b = representative_set(lpma.domain, [level.theta for level in lpma.levels])
    mapped = set(zip(word.a[:, 0].tolist(), word.b[:, 0].tolist()))
    if len(mapped) != len(tuples) or mapped != set(zip(ref_a.tolist(), ref_b.tolist())):
        return False, f"CRT map is not a bijection onto R/MR ({len(mapped)} images for {len(tuples)} tuples)"

    signal = lpma_encode(lpma, codewords)
    y_tilde = channel_compensate(lpma, signal.samples, 1.0)
    L = lpma.num_levels
    receivers = {
        "sic": mlo_sic_decode(lpma, y_tilde, L),
        "hybrid": hybrid_decode(lpma, y_tilde, [1], list(range(2, L + 1))),
    }
    for level in range(1, L + 1):
        receivers[f"pic{level}"] = mlo_pic_decode(lpma, y_tilde, level)
    for name, result in receivers.items():
        for level, decision in result.decisions.items():
            if not np.array_equal(decision.w_hat, codewords[level - 1]):
                return False, f"{name} receiver failed on level {level}"
    return True, f"{len(tuples)} tuples"


def check_crt_round_trip(seed: int, scale: float) -> CheckOutcome:
    detail = []
    for domain, coords in ((RingDomain.RATIONAL, [(2, 0), (7, 0)]), (RingDomain.EISENSTEIN, [(2, 3), (3, 2)])):
        ok, text = _exhaustive_round_trip(uncoded_config(domain, coords))
        if not ok:
            return False, f"{domain.value}: {text}"
        detail.append(f"{domain.value}: {text}")
    return True, "; ".join(detail)


def check_worked_instance(seed: int, scale: float) -> CheckOutcome:
    lpma = uncoded_config(RingDomain.RATIONAL, [(2, 0), (7, 0)])
    if lpma.descale != (1, 4):
        return False, f"descaling factors {lpma.descale}, expected (1, 4)"
    word = map_pi_a(lpma, [np.array([1]), np.array([3])])
    if (int(word.a[0]), int(word.b[0])) != (-1, 0):
        return False, f"folded representative {int(word.a[0])}, expected -1"
    y_tilde = word.embed()
    result = mlo_sic_decode(lpma, y_tilde, 2)
    decoded = (int(result.decisions[1].w_hat[0]), int(result.decisions[2].w_hat[0]))
    if decoded != (1, 3):
        return False, f"SIC recovered {decoded}, expected (1, 3)"
    return True, "W = -1, SIC -> (1, 3)"


def check_equal_gain_collapse(seed: int, scale: float) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(1000):
        power, gain, alpha1 = rng.uniform(0, 100), rng.uniform(0, 10), rng.uniform(0, 1)
        cfg = NomaConfig(P=power, alpha=(alpha1, 1.0 - alpha1))
        worst = max(worst, abs(noma_sum_rate(cfg, [gain, gain]) - math.log2(1.0 + power * gain)))
    return worst < 1e-12, f"max deviation {worst:.2e}"


def check_pairing_degradation(seed: int, scale: float) -> CheckOutcome:
    trials = max(20_000, int(config.PAIRING_TRIALS * scale))
    report = run_pairing_study(PairingSpec(trials=trials), seed, progress=False)
    ok = abs(report.noma_degradation - 1 / 3) <= 0.02 and report.lpma_degradation == 0.0
    return ok, f"NOMA {report.noma_degradation:.4f}, LPMA {report.lpma_degradation:.4f} over {trials} trials"


def equal_gain_experiment(trials: int, seed: int) -> ExperimentConfig:
    return ExperimentConfig(
        name="equal-gain",
        domain=RingDomain.EISENSTEIN,
        primes=[(2, 3), (3, 2)],
        codes=[CodeSpec(kind="identity")],
        users=UserModel(snr_db=[20.0, 20.0]),
        decoder=DecoderSpec(),
        trials=trials,
        block_length=256,
        seed=seed,
        fading=False,
        throughput_table="lte-cqi",
    )


def check_throughput_ordering(seed: int, scale: float) -> CheckOutcome:
    trials = max(200, int(10_000 * scale))
    base = equal_gain_experiment(trials, seed)
    qualifying = []
    for snr_db, point in sweep_points(base, [10.0, 15.0, 20.0, 25.0, 30.0]).items():
        report = run_experiment(point, progress=False)
        if report.sum_success("lpma") < 0.99:
            continue
        lpma = report.sum_throughput("lpma")
        if not (lpma > report.sum_throughput("noma") and lpma > report.sum_throughput("oma")):
            return False, (
                f"{snr_db:g} dB: LPMA {lpma:.4f} vs NOMA {report.sum_throughput('noma'):.4f}, "
                f"OMA {report.sum_throughput('oma'):.4f}"
            )
        qualifying.append(f"{snr_db:g}")
    if not qualifying:
        return False, "no SNR point reached LPMA success rate 0.99"
    return True, f"LPMA ahead at {', '.join(qualifying)} dB"


def _oracle_nearest(samples: np.ndarray, domain: RingDomain) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest ring element by scanning a 9x9 coordinate window, lexicographic tie-break."""
    if domain is RingDomain.EISENSTEIN:
        beta = samples.imag / (math.sqrt(3.0) / 2.0)
        alpha = samples.real + 0.5 * beta
    else:
        alpha, beta = samples.real, samples.imag
    if domain is RingDomain.RATIONAL:
        beta = np.zeros_like(beta)
    offsets = np.arange(-4, 5)
    da, db = np.meshgrid(offsets, offsets if domain is not RingDomain.RATIONAL else [0], indexing="ij")
    cand_a = np.round(alpha).astype(np.int64)[:, None] + da.ravel()
    cand_b = np.round(beta).astype(np.int64)[:, None] + db.ravel()
    dist = np.abs(samples[:, None] - embed_array(cand_a, cand_b, domain)) ** 2
    pick = np.argmin(dist, axis=1)
    rows = np.arange(len(samples))
    return cand_a[rows, pick], cand_b[rows, pick]


def check_quantizer_oracle(seed: int, scale: float) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    count = max(1000, int(10_000 * scale))
    for domain in RingDomain:
        samples = rng.uniform(-6, 6, count) + 1j * rng.uniform(-6, 6, count)
        a, b = quantize_array(samples, domain)
        oa, ob = _oracle_nearest(samples, domain)
        mismatches = int(np.count_nonzero((a != oa) | (b != ob)))
        if mismatches:
            return False, f"{domain.value}: {mismatches} of {count} samples differ from the brute-force search"
    return True, f"{count} samples per ring"


def check_ser_monotonicity(seed: int, scale: float) -> CheckOutcome:
    symbols = max(10_000, int(100_000 * scale))
    lpma = uncoded_config(RingDomain.RATIONAL, [(2, 0), (7, 0)], n=100)
    frame = run_ser_sweep(lpma, [15.0, 20.0, 25.0, 30.0], symbols, seed)
    for (level, decoder), group in frame.groupby(["level", "decoder"]):
        ser = group.sort_values("snr_db")["symbol_error_rate"].to_numpy()
        if np.any(np.diff(ser) > 0):
            return False, f"{decoder} level {level} SER not non-increasing: {ser.tolist()}"
    pivot = frame.pivot_table(index=["snr_db", "level"], columns="decoder", values="symbol_error_rate")
    if np.any(pivot["pic"] < pivot["sic"]):
        return False, "PIC error rate below SIC at some point"
    high = frame[(frame.snr_db == 30.0) & (frame.decoder == "sic")]["symbol_error_rate"].max()
    if high >= 1e-3:
        return False, f"SIC SER at 30 dB is {high:.2e}"
    return True, f"{frame['symbols'].iloc[0]} symbols/point, SIC SER at 30 dB {high:.1e}"


def determinism_experiment(seed: int, trials: int) -> ExperimentConfig:
    return ExperimentConfig(
        name="determinism",
        domain=RingDomain.GAUSSIAN,
        primes=[(1, 1), (2, 1)],
        codes=[CodeSpec(kind="repetition")],
        users=UserModel(snr_db=[12.0, 18.0]),
        alpha=[0.8, 0.2],
        trials=trials,
        block_length=4,
        seed=seed,
    )


def check_determinism(seed: int, scale: float) -> CheckOutcome:
    cfg = determinism_experiment(seed, max(100, int(2000 * scale)))
    with tempfile.TemporaryDirectory() as tmp:
        outputs = []
        for run in ("first", "second"):
            writer = ReportWriter(Path(tmp) / run)
            paths = writer.write(run_experiment(cfg, progress=False))
            outputs.append((paths["csv"].read_bytes(), paths["json"].read_bytes()))
    if outputs[0] != outputs[1]:
        return False, "two runs with one seed wrote different files"
    return True, f"{cfg.trials} trials, CSV and JSON identical"


CHECKS: List[Tuple[str, Callable[[int, float], CheckOutcome]]] = [
    ("crt-round-trip", check_crt_round_trip),
    ("worked-instance", check_worked_instance),
    ("equal-gain-collapse", check_equal_gain_collapse),
    ("pairing-degradation", check_pairing_degradation),
    ("throughput-ordering", check_throughput_ordering),
    ("quantizer-oracle", check_quantizer_oracle),
    ("ser-monotonicity", check_ser_monotonicity),
    ("determinism", check_determinism),
]


def run_acceptance_suite(seed: int = config.DEFAULT_SEED, scale: float = 1.0, checks=None) -> AcceptanceSummary:
    """
    Run every acceptance check; a check that raises counts as failed.

    Args:
        seed: Seed shared by the Monte Carlo checks
        scale: Multiplier on trial and sample counts (1.0 = full scale)
        checks: Optional subset of (name, function) pairs

    Returns:
        Summary with per-check timing
    """
    summary = AcceptanceSummary()
    for name, check in tqdm(checks or CHECKS, desc="Acceptance checks"):
        start = time.perf_counter()
        try:
            passed, detail = check(seed, scale)
        except Exception as e:
            logger.error(f"Check '{name}' raised: {e}")
            passed, detail = False, f"{type(e).__name__}: {e}"
        result = CheckResult(name, bool(passed), detail, time.perf_counter() - start)
        summary.results.append(result)
        logger.info(f"{name}: {'PASS' if result.passed else 'FAIL'} in {result.seconds:.2f} s")

    status = "ALL CHECKS PASSED" if summary.passed else f"FAILED: {', '.join(summary.failures())}"
    log_banner(logger, f"ACCEPTANCE SUITE - {status}", summary.lines())
    return summary
