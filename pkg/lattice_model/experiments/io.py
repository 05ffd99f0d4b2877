import os
import csv
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

logger = logging.getLogger(__name__)

SCHEMA_LINE = "# fiberlat-v1"


@dataclass
class ConvergenceRow:
    """One run of a study: the grid size, the seed, the headline statistic and any
    auxiliary columns."""
    eps: float
    seed: int
    value: float
    columns: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"eps": self.eps, "seed": self.seed, "value": self.value, **self.columns}


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(rows: Sequence[ConvergenceRow], path) -> str:
    """Write rows as CSV preceded by the schema line. Floats are written with repr, so
    equal inputs give byte-identical files."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    records = [row.to_dict() for row in rows]
    header: List[str] = ["eps", "seed", "value"]
    for record in records:
        header += [key for key in record if key not in header]
    with open(path, "w", newline="") as handle:
        handle.write(SCHEMA_LINE + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for record in records:
            writer.writerow([_format(record.get(key, "")) for key in header])
    logger.info(f"Wrote {len(records)} rows to {path}")
    return str(path)


def read_table(path) -> List[Dict[str, str]]:
    with open(path, newline="") as handle:
        first = handle.readline().strip()
        if first != SCHEMA_LINE:
            raise ValueError(f"{path} does not start with {SCHEMA_LINE!r}")
        return list(csv.DictReader(handle))


def write_summary(summary: Dict[str, Any], path) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
        handle.write("\n")
    logger.info(f"Wrote summary to {path}")
    return str(path)
