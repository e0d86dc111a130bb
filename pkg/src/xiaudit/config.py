"""Run configuration shared by the CLI and the experiment scripts."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass
from typing import Optional

from .balls import DEFAULT_PREC, PREC_CAP
from .catalog import DEFAULT_ACCURACY
from .errors import InvalidArgument

ZEROS_ENV = "XIAUDIT_ZEROS"


@dataclass(frozen=True)
class Config:
    precision_bits: int = DEFAULT_PREC
    precision_cap: int = PREC_CAP
    zeros_file: Optional[str] = None
    table_accuracy: float = DEFAULT_ACCURACY
    max_zeros: Optional[int] = None
    tail_slack_C: float = 2.0
    output_format: str = "text"
    # zeros below this ordinate are refined before the direct sum
    refine_below: float = 100.0
    refine_target: float = 1e-24
    workers: int = 1

    def __post_init__(self):
        if self.precision_bits < 32:
            raise InvalidArgument("precision_bits must be at least 32")
        if self.precision_bits > self.precision_cap:
            raise InvalidArgument("precision_bits exceeds precision_cap")
        if self.precision_cap > PREC_CAP:
            raise InvalidArgument(f"precision_cap is limited to {PREC_CAP}")
        if self.max_zeros is not None and self.max_zeros < 1:
            raise InvalidArgument("max_zeros must be at least 1")
        if not self.table_accuracy > 0:
            raise InvalidArgument("table_accuracy must be positive")
        if not self.tail_slack_C > 0:
            raise InvalidArgument("tail slack must be positive")
        if self.output_format not in ("text", "json"):
            raise InvalidArgument("output_format must be text or json")
        if self.workers < 1:
            raise InvalidArgument("workers must be at least 1")

    @property
    def resolved_zeros_file(self):
        return self.zeros_file or os.environ.get(ZEROS_ENV) or None

    def snapshot(self):
        """Deterministic string map for reports."""
        d = asdict(self)
        d["zeros_file"] = self.resolved_zeros_file
        return {k: (None if v is None else str(v) if not isinstance(v, int) else v)
                for k, v in d.items()}
