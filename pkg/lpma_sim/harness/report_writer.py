"""Result tables: throughput reports as CSV (one row per scheme × user) and JSON."""

import json
import logging
import subprocess
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from lpma_sim.config import config

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["scheme", "user", "throughput_bps_per_symbol", "success_rate", "ci_halfwidth"]
FLOAT_FORMAT = "%.10f"

THROUGHPUT_NOTES = (
    "LPMA throughput is simulated: (k/n)*log2(q) bits/symbol credited per correctly decoded block. "
    "NOMA and OMA throughput is formula-based: the configured SINR-to-throughput table applied to "
    "the rate expressions at the drawn channel gains."
)


@dataclass(frozen=True)
class ReportRow:
    scheme: str
    user: str
    throughput_bps_per_symbol: float
    success_rate: float
    ci_halfwidth: float


@dataclass
class ThroughputReport:
    """Per scheme × user throughput statistics of one run."""

    name: str
    seed: int
    trials: int
    config_digest: str
    config: Dict[str, Any]
    rows: List[ReportRow] = field(default_factory=list)

    def row(self, scheme: str, user) -> ReportRow:
        for r in self.rows:
            if r.scheme == scheme and r.user == str(user):
                return r
        raise KeyError(f"no row for scheme '{scheme}', user '{user}'")

    def sum_throughput(self, scheme: str) -> float:
        return self.row(scheme, "sum").throughput_bps_per_symbol

    def sum_success(self, scheme: str) -> float:
        return self.row(scheme, "sum").success_rate


@lru_cache(maxsize=1)
def git_describe() -> str:
    """`git describe` of the checkout, or 'unknown' outside a repository."""
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=config.BASE_DIR,
            capture_output=True,
            text=True,
            timeout=10,
        )
    except (OSError, subprocess.SubprocessError) as e:
        logger.debug(f"git describe unavailable: {e}")
        return "unknown"
    described = result.stdout.strip()
    return described if result.returncode == 0 and described else "unknown"


def report_frame(report: ThroughputReport) -> pd.DataFrame:
    if not report.rows:
        return pd.DataFrame(columns=CSV_COLUMNS)
    return pd.DataFrame([asdict(r) for r in report.rows], columns=CSV_COLUMNS)


def _dump_json(payload: Dict[str, Any], path: Path):
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


class ReportWriter:
    """Write run results under one output directory."""

    def __init__(self, out_dir: Optional[Path] = None):
        self.out_dir = Path(out_dir) if out_dir is not None else config.RESULTS_DIR

    def _prepare(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir

    def write_csv(self, report: ThroughputReport) -> Path:
        path = self._prepare() / "throughput.csv"
        report_frame(report).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.debug(f"Wrote {len(report.rows)} rows to {path}")
        return path

    def write_json(self, report: ThroughputReport) -> Path:
        path = self._prepare() / "report.json"
        payload = {
            "name": report.name,
            "seed": report.seed,
            "trials": report.trials,
            "config_digest": report.config_digest,
            "git_describe": git_describe(),
            "notes": THROUGHPUT_NOTES,
            "config": report.config,
            "rows": [asdict(r) for r in report.rows],
        }
        _dump_json(payload, path)
        return path

    def write(self, report: ThroughputReport) -> Dict[str, Path]:
        paths = {"csv": self.write_csv(report), "json": self.write_json(report)}
        logger.info(f"Results written to {self.out_dir}")
        return paths

    def write_pairing(self, payload: Dict[str, Any]) -> Path:
        path = self._prepare() / "pairing_study.json"
        _dump_json({**payload, "git_describe": git_describe()}, path)
        logger.info(f"Pairing study written to {path}")
        return path

    def write_ser_sweep(self, frame: pd.DataFrame) -> Path:
        path = self._prepare() / "ser_sweep.csv"
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"SER sweep written to {path}")
        return path
