import csv
import hashlib
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from src.core.exceptions import ConfigError
from src.core.models import Report

logger = logging.getLogger(__name__)

CSV_HEADERS: Dict[str, List[str]] = {
    "verify": ["check", "module", "passed", "residual", "tolerance", "expected_failure", "note"],
    "norm-sweep": ["h", "s", "C", "N", "M", "route", "norm", "bound", "ratio_flag"],
    "gevrey-fit": ["symbol", "s_nominal", "rho_fit", "C_fit", "residual", "window", "flag"],
    "decomp-check": ["h", "N", "max_rel_diff", "M_h", "M_h_over_h_n"],
    "compose": ["x_re", "x_im", "direct_re", "direct_im", "fourier_re", "fourier_im", "rel_diff",
                "h", "N", "M", "R", "s", "C"],
}

# run parameters every experiment row carries; the JSON report always has them
ECHO_FIELDS = ("h", "N", "M", "R", "s", "C")
ECHO_EXPERIMENTS = ("norm-sweep", "gevrey-fit", "decomp-check", "compose")

# excluded from the determinism digest
TIMING_FIELDS = ("wall_time",)


def _plain(value: Any) -> Any:
    """numpy scalars and arrays to JSON-ready Python values; non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_plain(complex(value).real), _plain(complex(value).imag)]
    return value


def _csv_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def report_digest(report: Report) -> str:
    """sha256 of the report body without timing fields; equal for equal config and seed."""
    rows = [{k: v for k, v in row.items() if k not in TIMING_FIELDS} for row in report["rows"]]
    body = {"config": report["provenance"]["config"], "rows": rows, "summary": report["summary"]}
    text = json.dumps(_plain(body), sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ReportWriter:
    """Writes one CSV with a fixed header and one JSON report per experiment into out_dir."""

    def __init__(self, out_dir: str = "results"):
        self.out_dir = Path(out_dir)

    def _prepare(self) -> None:
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {self.out_dir}: {exc}") from exc

    def csv_path(self, experiment: str) -> Path:
        return self.out_dir / f"{experiment}.csv"

    def json_path(self, experiment: str) -> Path:
        return self.out_dir / f"{experiment}.json"

    def write_csv(self, experiment: str, rows: List[Dict[str, Any]]) -> Path:
        if experiment not in CSV_HEADERS:
            raise ConfigError(f"no CSV layout for experiment '{experiment}'")
        self._prepare()
        header = CSV_HEADERS[experiment]
        path = self.csv_path(experiment)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_csv_cell(row.get(column)) for column in header])
        logger.info(f"Wrote {len(rows)} rows to {path}")
        return path

    def write_json(self, report: Report) -> Path:
        self._prepare()
        experiment = report["provenance"]["experiment"]
        if experiment in ECHO_EXPERIMENTS:
            missing = sorted({f for row in report["rows"] for f in ECHO_FIELDS if f not in row})
            if missing:
                logger.warning(f"{experiment} rows do not echo {missing}")
        path = self.json_path(experiment)
        document = dict(report)
        document["digest"] = report_digest(report)
        document["written_at"] = datetime.now(timezone.utc).isoformat()
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_plain(document), f, indent=2, sort_keys=True)
        logger.info(f"Wrote report to {path}")
        return path

    def write(self, report: Report) -> Dict[str, Path]:
        experiment = report["provenance"]["experiment"]
        return {"csv": self.write_csv(experiment, report["rows"]), "json": self.write_json(report)}

    def load(self, experiment: str) -> Optional[Dict[str, Any]]:
        path = self.json_path(experiment)
        if not path.is_file():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
