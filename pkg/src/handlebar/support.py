"""Support descriptors for scalar distributions."""
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Support:
    kind: str
    high: Optional[int] = None

    def __str__(self):
        if self.kind == "integer-range":
            return f"integer-range[0..{self.high}]"
        return self.kind

    @property
    def is_discrete(self):
        return self.kind == "integer-range"


REAL_LINE = Support("real-line")
POSITIVE_REALS = Support("positive-reals")
UNIT_INTERVAL = Support("unit-interval")
# image of a bijector whose range we cannot name
TRANSFORMED = Support("transformed")


def integer_range(n):
    return Support("integer-range", int(n))
