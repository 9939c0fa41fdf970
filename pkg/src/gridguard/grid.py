"""Grid data model, region predicates, region generators and grid file I/O."""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, NamedTuple

import numpy as np

from .errors import BadMagicError, GridError, GridFormatError, RegionError, TruncatedError

GRID_MAGIC = b"G2DG"
GRID_VERSION = 1
_HEADER = struct.Struct("<4sIII")


class CellCoord(NamedTuple):
    row: int
    col: int


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class Grid:
    """An m x m matrix of fixed-size byte payloads.

    ``cells`` has shape ``(m, m, cell_size)`` and dtype uint8; it is made
    read-only on construction so a Grid can be shared freely.
    """

    m: int
    cell_size: int
    cells: np.ndarray

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2 or not is_power_of_two(int(self.m)):
            raise GridError(f"m must be a power of 2 and >= 2, got {self.m}")
        if self.cell_size < 1:
            raise GridError(f"cell_size must be >= 1, got {self.cell_size}")
        arr = np.ascontiguousarray(self.cells, dtype=np.uint8)
        if arr.shape != (self.m, self.m, self.cell_size):
            raise GridError(
                f"cells shape {arr.shape} does not match ({self.m}, {self.m}, {self.cell_size})"
            )
        if arr is self.cells:
            arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "cells", arr)

    @property
    def N(self) -> int:
        return self.m * self.m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.m)

    def payload(self, cell: tuple[int, int]) -> bytes:
        r, c = cell
        return self.cells[r, c].tobytes()

    def contains(self, cell: tuple[int, int]) -> bool:
        return 0 <= cell[0] < self.m and 0 <= cell[1] < self.m

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.m == other.m
            and self.cell_size == other.cell_size
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self):
        return hash((self.m, self.cell_size, self.cells.tobytes()))

    def __repr__(self):
        return f"Grid(m={self.m}, cell_size={self.cell_size})"


def new_grid(m: int, cell_size: int = 1, seed: int = 0) -> Grid:
    if not is_power_of_two(m) or m < 2:
        raise GridError(f"m must be a power of 2 and >= 2, got {m}")
    if cell_size < 1:
        raise GridError(f"cell_size must be >= 1, got {cell_size}")
    rng = np.random.default_rng(seed)
    cells = rng.integers(0, 256, size=(m, m, cell_size), dtype=np.uint8)
    return Grid(m, cell_size, cells)


def save_grid(grid: Grid, sink: BinaryIO) -> int:
    header = _HEADER.pack(GRID_MAGIC, GRID_VERSION, grid.m, grid.cell_size)
    body = grid.cells.tobytes()
    sink.write(header)
    sink.write(body)
    return len(header) + len(body)


def grid_to_bytes(grid: Grid) -> bytes:
    buf = io.BytesIO()
    save_grid(grid, buf)
    return buf.getvalue()


def load_grid(source: BinaryIO) -> Grid:
    header = source.read(_HEADER.size)
    if len(header) < _HEADER.size:
        raise TruncatedError(f"grid header truncated: {len(header)} of {_HEADER.size} bytes")
    magic, version, m, cell_size = _HEADER.unpack(header)
    if magic != GRID_MAGIC:
        raise BadMagicError(f"bad grid magic {magic!r}")
    if version != GRID_VERSION:
        raise GridFormatError(f"unsupported grid version {version}")
    if m < 2 or not is_power_of_two(m):
        raise GridFormatError(f"header m={m} is not a power of 2 >= 2")
    if cell_size < 1:
        raise GridFormatError("header cell_size is zero")
    expected = m * m * cell_size
    body = source.read(expected)
    if len(body) < expected:
        raise TruncatedError(f"grid payload truncated: {len(body)} of {expected} bytes")
    cells = np.frombuffer(body, dtype=np.uint8).reshape(m, m, cell_size)
    return Grid(m, cell_size, cells.copy())


def grid_from_bytes(data: bytes) -> Grid:
    return load_grid(io.BytesIO(data))


# -- regions -----------------------------------------------------------------


@dataclass(frozen=True, init=False)
class Region:
    """A finite set of cells; ``t`` is its size."""

    cells: frozenset

    def __init__(self, cells: Iterable[tuple[int, int]] = ()):
        object.__setattr__(self, "cells", frozenset(CellCoord(int(r), int(c)) for r, c in cells))

    @property
    def t(self) -> int:
        return len(self.cells)

    def __len__(self):
        return len(self.cells)

    def __iter__(self) -> Iterator[CellCoord]:
        return iter(sorted(self.cells))

    def __contains__(self, cell):
        return tuple(cell) in self.cells

    def rows(self) -> set[int]:
        return {c.row for c in self.cells}

    def cols(self) -> set[int]:
        return {c.col for c in self.cells}

    def bounds(self) -> tuple[int, int, int, int]:
        """(min_row, min_col, max_row, max_col), inclusive."""
        rows = [c.row for c in self.cells]
        cols = [c.col for c in self.cells]
        return min(rows), min(cols), max(rows), max(cols)


def neighbors4(cell: tuple[int, int], m: int) -> Iterator[CellCoord]:
    r, c = cell
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        rr, cc = r + dr, c + dc
        if 0 <= rr < m and 0 <= cc < m:
            yield CellCoord(rr, cc)


def is_connected(region: Region | Iterable[tuple[int, int]]) -> bool:
    cells = region.cells if isinstance(region, Region) else {tuple(c) for c in region}
    if not cells:
        return True
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        r, c = stack.pop()
        for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


def _runs_contiguous(groups: dict[int, list[int]]) -> bool:
    for values in groups.values():
        values.sort()
        if values[-1] - values[0] + 1 != len(values):
            return False
    return True


def is_hv_convex(region: Region | Iterable[tuple[int, int]]) -> bool:
    """True iff every row slice and every column slice is one contiguous run."""
    cells = region.cells if isinstance(region, Region) else {tuple(c) for c in region}
    by_row: dict[int, list[int]] = {}
    by_col: dict[int, list[int]] = {}
    for r, c in cells:
        by_row.setdefault(r, []).append(c)
        by_col.setdefault(c, []).append(r)
    return _runs_contiguous(by_row) and _runs_contiguous(by_col)


def inject_corruption(grid: Grid, region: Region, seed: int = 0) -> Grid:
    """Return a copy of ``grid`` where exactly the cells of ``region`` differ.

    Every byte of every covered cell is XORed with a nonzero seeded mask.
    """
    if len(region) == 0:
        raise RegionError("cannot inject an empty region")
    cells = sorted(region.cells)
    for cell in cells:
        if not grid.contains(cell):
            raise RegionError(f"cell {tuple(cell)} outside {grid.m}x{grid.m} grid")
    rng = np.random.default_rng(seed)
    mask = rng.integers(1, 256, size=(len(cells), grid.cell_size), dtype=np.uint8)
    out = grid.cells.copy()
    rows = np.fromiter((c.row for c in cells), dtype=np.intp, count=len(cells))
    cols = np.fromiter((c.col for c in cells), dtype=np.intp, count=len(cells))
    out[rows, cols] ^= mask
    return Grid(grid.m, grid.cell_size, out)


# -- region generators -------------------------------------------------------

RECTANGLE = "rectangle"
DISC = "disc"
RANDOM_CONNECTED = "random-connected"
HV_CONVEX_RANDOM = "hv-convex-random"
REGION_KINDS = (RECTANGLE, DISC, RANDOM_CONNECTED, HV_CONVEX_RANDOM)


@dataclass(frozen=True)
class RegionShapeSpec:
    """Parameters for :func:`generate_region`.

    ``anchor`` is the top-left corner for rectangles, the centre for discs
    and the seed cell for random kinds. ``extents`` is (rows, cols) for
    rectangles, ``radius`` applies to discs, ``target`` to random kinds.
    """

    kind: str
    anchor: tuple[int, int] = (0, 0)
    extents: tuple[int, int] = (1, 1)
    radius: int = 0
    target: int = 1
    seed: int = 0


def rectangle_cells(row0: int, col0: int, rows: int, cols: int) -> list[CellCoord]:
    return [CellCoord(r, c) for r in range(row0, row0 + rows) for c in range(col0, col0 + cols)]


def disc_cells(center: tuple[int, int], radius: int) -> list[CellCoord]:
    cr, cc = center
    out = []
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            if dr * dr + dc * dc <= radius * radius:
                out.append(CellCoord(cr + dr, cc + dc))
    return out


def _check_inside(cells: Iterable[CellCoord], m: int, what: str) -> None:
    for r, c in cells:
        if not (0 <= r < m and 0 <= c < m):
            raise RegionError(f"{what} does not fit in a {m}x{m} grid")


def _random_connected(m: int, anchor: tuple[int, int], target: int, rng) -> set[CellCoord]:
    start = CellCoord(*anchor)
    region = {start}
    frontier = [nb for nb in neighbors4(start, m)]
    in_frontier = set(frontier)
    while len(region) < target:
        i = int(rng.integers(len(frontier)))
        frontier[i], frontier[-1] = frontier[-1], frontier[i]
        cell = frontier.pop()
        in_frontier.discard(cell)
        region.add(cell)
        for nb in neighbors4(cell, m):
            if nb not in region and nb not in in_frontier:
                frontier.append(nb)
                in_frontier.add(nb)
    return region


def _ellipse_cells(m, center, a, b, theta) -> set[CellCoord]:
    cr, cc = center
    rr, cc_ = np.mgrid[0:m, 0:m]
    y = rr - cr
    x = cc_ - cc
    cos, sin = math.cos(theta), math.sin(theta)
    u = x * cos + y * sin
    v = -x * sin + y * cos
    inside = (u / a) ** 2 + (v / b) ** 2 <= 1.0
    return {CellCoord(int(r), int(c)) for r, c in zip(*np.nonzero(inside))}


def _staircase_block(m: int, anchor: tuple[int, int], target: int) -> set[CellCoord]:
    # full rows of width w plus one partial row, left-aligned: hv-convex, exact size
    w = min(m, math.ceil(math.sqrt(target)))
    full, rem = divmod(target, w)
    height = full + (1 if rem else 0)
    r0 = min(max(anchor[0], 0), m - height)
    c0 = min(max(anchor[1], 0), m - w)
    cells = {CellCoord(r0 + r, c0 + c) for r in range(full) for c in range(w)}
    cells |= {CellCoord(r0 + full, c0 + c) for c in range(rem)}
    return cells


def _hv_convex_random(m: int, anchor: tuple[int, int], target: int, rng) -> set[CellCoord]:
    lo, hi = 0.9 * target, 1.1 * target
    if target >= 6:
        for _ in range(40):
            aspect = math.exp(rng.uniform(-0.8, 0.8))
            theta = rng.uniform(0.0, math.pi)
            center = (anchor[0] + rng.uniform(-0.5, 0.5), anchor[1] + rng.uniform(-0.5, 0.5))
            small, large = 0.5, float(2 * m)
            best = None
            for _ in range(40):
                scale = (small + large) / 2
                cells = _ellipse_cells(m, center, scale * aspect, scale / aspect, theta)
                if len(cells) < target:
                    small = scale
                else:
                    large = scale
                if best is None or abs(len(cells) - target) < abs(len(best) - target):
                    best = cells
            if best and lo <= len(best) <= hi and is_connected(best) and is_hv_convex(best):
                return best
    return _staircase_block(m, anchor, target)


def generate_region(grid: Grid | int, spec: RegionShapeSpec) -> Region:
    """Build a region of the requested kind inside ``grid``.

    Deterministic in ``spec`` (including its seed).
    """
    m = grid if isinstance(grid, int) else grid.m
    if spec.kind == RECTANGLE:
        rows, cols = spec.extents
        if rows < 1 or cols < 1:
            raise RegionError("rectangle extents must be positive")
        cells = rectangle_cells(spec.anchor[0], spec.anchor[1], rows, cols)
        _check_inside(cells, m, "rectangle")
        return Region(cells)
    if spec.kind == DISC:
        if spec.radius < 0:
            raise RegionError("disc radius must be >= 0")
        cells = disc_cells(spec.anchor, spec.radius)
        _check_inside(cells, m, "disc")
        return Region(cells)
    if spec.kind in (RANDOM_CONNECTED, HV_CONVEX_RANDOM):
        if spec.target < 1 or spec.target > m * m:
            raise RegionError(f"target {spec.target} infeasible in a {m}x{m} grid")
        _check_inside([CellCoord(*spec.anchor)], m, "anchor")
        rng = np.random.default_rng(spec.seed)
        if spec.kind == RANDOM_CONNECTED:
            return Region(_random_connected(m, spec.anchor, spec.target, rng))
        return Region(_hv_convex_random(m, spec.anchor, spec.target, rng))
    raise RegionError(f"unknown region kind {spec.kind!r}")
