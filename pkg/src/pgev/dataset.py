from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


@dataclass
class Dataset:
    """Block-maxima observations with optional labels (e.g. years)."""

    values: np.ndarray
    labels: Optional[Sequence] = None
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.values.size == 0:
            raise ValueError("dataset is empty")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("dataset contains non-finite values")
        if self.labels is not None and len(self.labels) != self.values.size:
            raise ValueError("labels and values differ in length")

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    def common_sign(self) -> int:
        """+1 or -1 when all values share one sign; raises otherwise."""
        if np.any(self.values == 0):
            raise ValueError("PGEV data may not contain zeros")
        pos = self.values > 0
        if pos.all():
            return 1
        if (~pos).all():
            return -1
        raise ValueError("PGEV data must be single-signed")
