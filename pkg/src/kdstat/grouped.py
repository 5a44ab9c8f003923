"""
Grouped observations.

An observation in :math:`\\mathbb{R}^{\\tilde p}` is split into ``p``
contiguous blocks of sizes ``d_1, ..., d_p``; each block gets its own
semimetric. This module holds that description (:class:`GroupSpec`) and
file ingestion for samples and group specifications.
"""
from __future__ import annotations

import csv
import enum
import json
import math
import os
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ConfigurationError, DimensionError, IngestionError, SampleSizeError

Bandwidth = Union[float, None]
AUTO = None


class SemimetricKind(enum.Enum):
    """Per-group semimetric family.

    ``SQUARED_EUCLIDEAN`` makes the aggregate distance the usual Euclidean
    distance (for ``r = 1/2``); the other three are metrics of strong
    negative type.
    """

    SQUARED_EUCLIDEAN = "squared-euclidean"
    EUCLIDEAN = "euclidean"
    LAPLACE = "laplace"
    GAUSSIAN = "gaussian"

    @property
    def induced(self) -> bool:
        """Whether the semimetric is induced by a kernel and needs a bandwidth."""
        return self in (SemimetricKind.LAPLACE, SemimetricKind.GAUSSIAN)

    @property
    def is_metric(self) -> bool:
        return self is not SemimetricKind.SQUARED_EUCLIDEAN

    @classmethod
    def parse(cls, name: str | SemimetricKind) -> SemimetricKind:
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {
            "sqeuclidean": "squared-euclidean",
            "squared": "squared-euclidean",
            "euclid": "euclidean",
            "laplace-induced": "laplace",
            "gauss": "gaussian",
            "gaussian-induced": "gaussian",
        }
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ConfigurationError(f"unknown semimetric {name!r}")


@dataclass(frozen=True)
class GroupSpec:
    """Partition of the coordinates into contiguous groups.

    Parameters
    ----------
    sizes:
        Number of coordinates in each group.
    kind:
        Semimetric applied within every group.
    bandwidth:
        ``None`` for the median heuristic, a positive float applied to every
        group, or one positive float per group. Ignored for non-induced kinds.
    exponent:
        Power ``r`` applied to the sum of group semimetrics, in ``(0, 1]``.
    """

    sizes: tuple[int, ...]
    kind: SemimetricKind = SemimetricKind.EUCLIDEAN
    bandwidth: Union[None, float, tuple[float, ...]] = AUTO
    exponent: float = 0.5
    offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise ConfigurationError("a group spec needs at least one group")
        if any(s < 1 for s in sizes):
            raise ConfigurationError(f"group sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "kind", SemimetricKind.parse(self.kind))
        r = float(self.exponent)
        if not (0.0 < r <= 1.0):
            raise ConfigurationError(f"exponent r must lie in (0, 1], got {r}")
        object.__setattr__(self, "exponent", r)
        bw = self.bandwidth
        if bw is not None:
            if np.ndim(bw) == 0:
                bw = float(bw)
                if not (bw > 0 and math.isfinite(bw)):
                    raise ConfigurationError(f"bandwidth must be positive, got {bw}")
            else:
                bw = tuple(float(b) for b in bw)
                if len(bw) != len(sizes):
                    raise ConfigurationError(
                        f"{len(bw)} bandwidths given for {len(sizes)} groups"
                    )
                if not all(b > 0 and math.isfinite(b) for b in bw):
                    raise ConfigurationError("bandwidths must be positive")
            object.__setattr__(self, "bandwidth", bw)
        object.__setattr__(self, "offsets", tuple(np.concatenate([[0], np.cumsum(sizes)]).tolist()))

    @property
    def n_groups(self) -> int:
        return len(self.sizes)

    @property
    def dim(self) -> int:
        """Total number of coordinates."""
        return self.offsets[-1]

    @property
    def unit_groups(self) -> bool:
        return all(s == 1 for s in self.sizes)

    @classmethod
    def unit(cls, dim: int, kind=SemimetricKind.EUCLIDEAN, bandwidth=AUTO, exponent=0.5) -> GroupSpec:
        """One coordinate per group."""
        return cls((1,) * int(dim), kind, bandwidth, exponent)

    @classmethod
    def single(cls, dim: int, kind=SemimetricKind.EUCLIDEAN, bandwidth=AUTO, exponent=0.5) -> GroupSpec:
        """All coordinates in one group."""
        return cls((int(dim),), kind, bandwidth, exponent)

    @classmethod
    def from_dict(cls, doc: dict) -> GroupSpec:
        if "sizes" not in doc:
            raise ConfigurationError("group spec needs a 'sizes' list")
        bw = doc.get("bandwidth", "auto")
        if isinstance(bw, str):
            if bw.lower() != "auto":
                raise ConfigurationError(f"bandwidth must be 'auto' or a number, got {bw!r}")
            bw = AUTO
        return cls(
            tuple(doc["sizes"]),
            SemimetricKind.parse(doc.get("metric", "euclidean")),
            bw,
            float(doc.get("r", 0.5)),
        )

    def to_dict(self) -> dict:
        bw = self.bandwidth
        return {
            "sizes": list(self.sizes),
            "metric": self.kind.value,
            "bandwidth": "auto" if bw is None else (list(bw) if isinstance(bw, tuple) else bw),
            "r": self.exponent,
        }

    def with_dim(self, dim: int) -> GroupSpec:
        """Check that this spec covers ``dim`` coordinates."""
        if self.dim != dim:
            raise DimensionError(f"group sizes sum to {self.dim} but data have {dim} columns")
        return self


def load_group_spec(path: str | os.PathLike) -> GroupSpec:
    """Read a group spec JSON document."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise IngestionError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise IngestionError(f"{path}: expected a JSON object")
    return GroupSpec.from_dict(doc)


def as_sample(values, *, min_rows: int = 2, name: str = "sample") -> np.ndarray:
    """Validate an ``n x p`` observation matrix and return it as float64.

    A 1-d input is read as ``n`` scalar observations.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-d, got shape {arr.shape}")
    if arr.shape[1] == 0:
        raise DimensionError(f"{name} has no columns")
    if arr.shape[0] < min_rows:
        raise SampleSizeError(f"{name} has {arr.shape[0]} rows, need at least {min_rows}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains NaN or infinite entries")
    return arr


def load_csv(path: str | os.PathLike, has_header: bool = False) -> np.ndarray:
    """Read a rectangular numeric CSV file into an ``n x p`` array.

    Rows are 1-based in error messages and count the header line, so they
    match what a text editor shows.
    """
    rows: list[list[float]] = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, record in enumerate(reader, start=1):
            if has_header and lineno == 1:
                continue
            if not record or all(not cell.strip() for cell in record):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise IngestionError(
                    f"{path}: row {lineno} has {len(record)} columns, expected {width}"
                )
            parsed = []
            for col, cell in enumerate(record, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise IngestionError(
                        f"{path}: row {lineno}, column {col}: non-numeric value {cell.strip()!r}"
                    ) from None
                if not math.isfinite(v):
                    raise IngestionError(f"{path}: row {lineno}, column {col}: non-finite value")
                parsed.append(v)
            rows.append(parsed)
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def split_observation(x: Sequence[float], g: GroupSpec) -> list[np.ndarray]:
    """Split one observation into its group sub-vectors."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != g.dim:
        raise DimensionError(f"observation has length {x.size}, groups need {g.dim}")
    o = g.offsets
    return [x[o[i]:o[i + 1]] for i in range(g.n_groups)]
