import os

DEFAULT_SIZE_CAP = 2**20


def size_cap() -> int:
    """Materialization cap in symbols; ``LAM_SIZE_CAP`` overrides it."""
    raw = os.environ.get("LAM_SIZE_CAP")
    if raw is None:
        return DEFAULT_SIZE_CAP
    return int(raw)


class SizeCapExceeded(Exception):
    """Raised instead of materializing a term larger than the cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds the cap of {cap} symbols")
        self.what = what
        self.size = size
        self.cap = cap
