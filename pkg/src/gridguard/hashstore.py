"""Signed-hash stores: quadtree, quadtree+boundary lines, sifting, layer sieve
and the adaptive tree, plus their binary file format."""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import BinaryIO, ClassVar, Iterable, Iterator, Mapping

from .auth import (
    CostMeter,
    KeyMaterial,
    KeyMode,
    RegionDescriptor,
    SignedDigest,
    as_payload,
    check_region,
    sign_region,
)
from .errors import (
    MissingKeyError,
    NonConformingSizeError,
    StoreFormatError,
    StoreMismatchError,
    VariantMismatchError,
)
from .grid import CellCoord, is_power_of_two

STORE_MAGIC = b"HST1"
_STORE_HEADER = struct.Struct("<4sBBIIQ")
PUBLIC_KEY_SIZE = 32


class Variant(IntEnum):
    QUAD = 0
    BOUNDARY = 1
    SIFT = 2
    SIEVE = 3
    ADAPTIVE = 4


class HashStore:
    """A set of signed digests keyed by descriptor, in canonical order.

    Subclasses define ``layout`` (which descriptors exist and in what order)
    and structural helpers used by the detectors.
    """

    variant: ClassVar[Variant]

    def __init__(self, key: KeyMaterial, shape: tuple[int, int], cell_size: int,
                 digests: Iterable[SignedDigest]):
        self.key = key.verifying_only()
        self.shape = (int(shape[0]), int(shape[1]))
        self.cell_size = int(cell_size)
        self._digests: dict[RegionDescriptor, SignedDigest] = {}
        for d in digests:
            if d.descriptor in self._digests:
                raise StoreFormatError(f"duplicate descriptor {d.descriptor}")
            self._digests[d.descriptor] = d
        expected = self.layout(self.shape)
        if len(expected) != len(self._digests) or set(expected) != self._digests.keys():
            raise StoreFormatError(
                f"{type(self).__name__} digest set does not match its layout "
                f"({len(self._digests)} digests, expected {len(expected)})"
            )

    @classmethod
    def layout(cls, shape: tuple[int, int]) -> list[RegionDescriptor]:
        raise NotImplementedError

    @classmethod
    def build(cls, grid, key: KeyMaterial):
        payload = as_payload(grid)
        shape = payload.shape[:2]
        cls._check_shape(shape)
        digests = [sign_region(key, payload, d) for d in cls.layout(shape)]
        return cls(key, shape, payload.shape[2], digests)

    @classmethod
    def _check_shape(cls, shape):
        rows, cols = shape
        if rows != cols or not is_power_of_two(rows) or rows < 2:
            raise StoreMismatchError(f"{cls.__name__} needs a square power-of-2 grid, got {rows}x{cols}")

    @property
    def m(self) -> int:
        return self.shape[1]

    @property
    def N(self) -> int:
        return self.shape[0] * self.shape[1]

    def __len__(self):
        return len(self._digests)

    def __iter__(self) -> Iterator[SignedDigest]:
        return iter(self._digests.values())

    def __contains__(self, descriptor):
        return descriptor in self._digests

    def __eq__(self, other):
        if not isinstance(other, HashStore):
            return NotImplemented
        return (
            self.variant == other.variant
            and self.shape == other.shape
            and self.cell_size == other.cell_size
            and self.key.mode == other.key.mode
            and list(self._digests.values()) == list(other._digests.values())
        )

    def digest(self, descriptor: RegionDescriptor) -> SignedDigest:
        try:
            return self._digests[descriptor]
        except KeyError:
            raise StoreMismatchError(f"no digest for {descriptor} in {type(self).__name__}") from None

    def matches(self, grid) -> None:
        payload = as_payload(grid)
        if payload.shape[:2] != self.shape or payload.shape[2] != self.cell_size:
            raise StoreMismatchError(
                f"{type(self).__name__} built for {self.shape[0]}x{self.shape[1]}"
                f"x{self.cell_size}, grid is {payload.shape[0]}x{payload.shape[1]}x{payload.shape[2]}"
            )

    def check(self, grid, descriptor: RegionDescriptor) -> bool:
        return check_region(self.key, as_payload(grid), self.digest(descriptor))

    def verify(self, grid, descriptor: RegionDescriptor, meter: CostMeter) -> bool:
        ok = self.check(grid, descriptor)
        meter.charge_verification(descriptor.size)
        return ok

    def cell_descriptor(self, cell: tuple[int, int]) -> RegionDescriptor:
        """Descriptor of the single-cell digest covering ``cell``."""
        desc = RegionDescriptor.cell(int(cell[0]), int(cell[1]))
        if desc not in self._digests:
            raise StoreMismatchError(f"{type(self).__name__} has no per-cell digests")
        return desc

    def cell_test(self, grid, meter: CostMeter):
        """A metered per-cell corruption test backed by single-cell digests."""
        payload = as_payload(grid)

        def is_corrupted(cell) -> bool:
            desc = self.cell_descriptor(cell)
            ok = check_region(self.key, payload, self._digests[desc])
            meter.charge_verification(1)
            return not ok

        return is_corrupted

    # -- persistence --

    def save(self, sink: BinaryIO) -> int:
        rows, cols = self.shape
        if rows != cols:
            raise StoreFormatError("only square-grid stores can be serialized")
        parts = [_STORE_HEADER.pack(STORE_MAGIC, self.variant, self.key.mode, cols,
                                    self.cell_size, len(self._digests))]
        parts.extend(d.encode() for d in self._digests.values())
        if self.key.mode == KeyMode.SIGNATURE:
            parts.append(self.key.verification_key)
        data = b"".join(parts)
        sink.write(data)
        return len(data)

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        self.save(buf)
        return buf.getvalue()

    @classmethod
    def load(cls, source: BinaryIO, key: KeyMaterial | None = None):
        return load_store(source, key, expected=cls.variant)

    def __repr__(self):
        return f"{type(self).__name__}(shape={self.shape}, digests={len(self)}, mode={self.key.mode.name})"


def _quadrants(r0: int, c0: int, side: int) -> list[RegionDescriptor]:
    h = side // 2
    return [
        RegionDescriptor.rect(r0, c0, h, h),
        RegionDescriptor.rect(r0, c0 + h, h, h),
        RegionDescriptor.rect(r0 + h, c0, h, h),
        RegionDescriptor.rect(r0 + h, c0 + h, h, h),
    ]


def _quadrant_layout(m: int) -> list[RegionDescriptor]:
    out = []
    side = m // 2
    while side >= 1:
        out.extend(RegionDescriptor.rect(r, c, side, side)
                   for r in range(0, m, side) for c in range(0, m, side))
        side //= 2
    return out


def _leaf_layout(m: int) -> list[RegionDescriptor]:
    return [RegionDescriptor.cell(r, c) for r in range(m) for c in range(m)]


class QuadStore(HashStore):
    """One digest per quadtree node down to single cells, plus a root.

    Single cells carry two digests: the 1x1 quadrant seen from the parent
    and the leaf's own cell digest, giving (7N - 4) / 3 non-root entries.
    """

    variant = Variant.QUAD

    @classmethod
    def layout(cls, shape):
        cls._check_shape(shape)
        m = shape[0]
        return [RegionDescriptor.rect(0, 0, m, m)] + _quadrant_layout(m) + _leaf_layout(m)

    @property
    def root(self) -> RegionDescriptor:
        return RegionDescriptor.rect(0, 0, self.m, self.m)

    def quadrants(self, r0: int, c0: int, side: int) -> list[RegionDescriptor]:
        """NW, NE, SW, SE quadrant descriptors of the node at (r0, c0)."""
        return _quadrants(r0, c0, side)


# -- 1-D dyadic lines -------------------------------------------------------


@dataclass(frozen=True)
class LineSpec:
    """A horizontal (``row``) or vertical (``col``) run of cells."""

    orientation: str
    index: int
    start: int
    length: int

    def __post_init__(self):
        if self.orientation not in ("row", "col"):
            raise ValueError(f"orientation must be 'row' or 'col', got {self.orientation!r}")
        if not is_power_of_two(self.length):
            raise ValueError(f"line length must be a power of 2, got {self.length}")

    def descriptor(self, offset: int, length: int) -> RegionDescriptor:
        if self.orientation == "row":
            return RegionDescriptor.row_run(self.index, self.start + offset, length)
        return RegionDescriptor.col_run(self.index, self.start + offset, length)

    def cell(self, offset: int) -> CellCoord:
        if self.orientation == "row":
            return CellCoord(self.index, self.start + offset)
        return CellCoord(self.start + offset, self.index)

    def offset_of(self, cell: tuple[int, int]) -> int | None:
        r, c = cell
        along, across = (c, r) if self.orientation == "row" else (r, c)
        if across != self.index or not self.start <= along < self.start + self.length:
            return None
        return along - self.start

    def dyadic_intervals(self) -> list[tuple[int, int]]:
        out = []
        size = self.length
        while size >= 1:
            out.extend((off, size) for off in range(0, self.length, size))
            size //= 2
        return out

    def dyadic_descriptors(self) -> list[RegionDescriptor]:
        return [self.descriptor(o, n) for o, n in self.dyadic_intervals()]


class DyadicLineTree:
    """Digests for every dyadic sub-interval of one line (2L - 1 of them)."""

    def __init__(self, line: LineSpec, key: KeyMaterial,
                 digests: Mapping[RegionDescriptor, SignedDigest]):
        self.line = line
        self.key = key
        self._digests = digests

    @classmethod
    def build(cls, payload, key: KeyMaterial, line: LineSpec) -> "DyadicLineTree":
        payload = as_payload(payload)
        digests = {d: sign_region(key, payload, d) for d in line.dyadic_descriptors()}
        return cls(line, key.verifying_only(), digests)

    def descriptor(self, offset: int, length: int) -> RegionDescriptor:
        return self.line.descriptor(offset, length)

    def digest(self, offset: int, length: int) -> SignedDigest:
        return self._digests[self.line.descriptor(offset, length)]

    def __len__(self):
        return sum(1 for d in self.line.dyadic_descriptors() if d in self._digests)


def median_lines(r0: int, c0: int, side: int) -> tuple[LineSpec, LineSpec]:
    """Vertical and horizontal median lines of a node.

    Each is the last column (row) of the node's left (top) half.
    """
    h = side // 2
    return (LineSpec("col", c0 + h - 1, r0, side), LineSpec("row", r0 + h - 1, c0, side))


class BoundaryStore(HashStore):
    """Quadrant digests plus two median-line dyadic trees per internal node."""

    variant = Variant.BOUNDARY

    @classmethod
    def layout(cls, shape):
        cls._check_shape(shape)
        m = shape[0]
        out = _quadrant_layout(m)
        side = m
        while side >= 2:
            for r0 in range(0, m, side):
                for c0 in range(0, m, side):
                    for line in median_lines(r0, c0, side):
                        out.extend(line.dyadic_descriptors())
            side //= 2
        return out + _leaf_layout(m)

    def quadrants(self, r0: int, c0: int, side: int) -> list[RegionDescriptor]:
        return _quadrants(r0, c0, side)

    def line_trees(self, r0: int, c0: int, side: int) -> tuple[DyadicLineTree, DyadicLineTree]:
        vertical, horizontal = median_lines(r0, c0, side)
        return (DyadicLineTree(vertical, self.key, self._digests),
                DyadicLineTree(horizontal, self.key, self._digests))


class SiftStore(HashStore):
    """One digest per column followed by one per cell."""

    variant = Variant.SIFT

    @classmethod
    def layout(cls, shape):
        cls._check_shape(shape)
        m = shape[0]
        return [RegionDescriptor.col_run(c, 0, m) for c in range(m)] + _leaf_layout(m)

    def column(self, col: int) -> RegionDescriptor:
        return RegionDescriptor.col_run(col, 0, self.m)


class LayerSieveStore(HashStore):
    """A horizontal layer (one digest per row) and a vertical layer (per column)."""

    variant = Variant.SIEVE

    @classmethod
    def layout(cls, shape):
        cls._check_shape(shape)
        m = shape[0]
        return ([RegionDescriptor.row_run(r, 0, m) for r in range(m)]
                + [RegionDescriptor.col_run(c, 0, m) for c in range(m)])

    def row(self, r: int) -> RegionDescriptor:
        return RegionDescriptor.row_run(r, 0, self.m)

    def column(self, c: int) -> RegionDescriptor:
        return RegionDescriptor.col_run(c, 0, self.m)


# -- adaptive tree ------------------------------------------------------------


def _conforming_neighbours(n_cells: int) -> tuple[int | None, int]:
    below, h = None, 1
    while True:
        size = 1 << (h * (h + 1) // 2)
        if size >= n_cells:
            return below, size
        below = size
        h += 1


def adaptive_height(n_cells: int) -> int:
    """Height h with h(h+1)/2 == log2(n_cells); raise if none exists."""
    if n_cells >= 2 and is_power_of_two(n_cells):
        t = n_cells.bit_length() - 1
        h = int((math.isqrt(8 * t + 1) - 1) // 2)
        if h * (h + 1) // 2 == t:
            return h
    below, above = _conforming_neighbours(max(n_cells, 1))
    if above == n_cells:
        _, above = _conforming_neighbours(n_cells + 1)
    near = " or ".join(f"N={v}" for v in (below, above) if v is not None)
    raise NonConformingSizeError(
        f"adaptive tree needs log2(N) to be a triangular number; N={n_cells} does not conform "
        f"(nearest conforming: {near})"
    )


def range_descriptor(start: int, length: int, shape: tuple[int, int]) -> RegionDescriptor:
    """Descriptor of a contiguous row-major range of cells."""
    rows, cols = shape
    if start % cols == 0 and length % cols == 0:
        return RegionDescriptor.rect(start // cols, 0, length // cols, cols)
    if start // cols == (start + length - 1) // cols:
        return RegionDescriptor.row_run(start // cols, start % cols, length)
    return RegionDescriptor.cell_list(divmod(i, cols) for i in range(start, start + length))


class AdaptiveTree(HashStore):
    """Tree over the row-major linearization with degree 2^(h-d) at depth d.

    Degrees multiply to N, so all leaves (single cells) sit at depth h.
    Works on any (rows, cols) payload whose cell count conforms, which
    allows the 1-D cases N=2 and N=8 as (1, N) strips.
    """

    variant = Variant.ADAPTIVE

    @classmethod
    def _check_shape(cls, shape):
        adaptive_height(shape[0] * shape[1])

    @classmethod
    def layout(cls, shape):
        h = adaptive_height(shape[0] * shape[1])
        n_cells = shape[0] * shape[1]
        out = []
        size = n_cells
        for depth in range(h + 1):
            out.extend(range_descriptor(s, size, shape) for s in range(0, n_cells, size))
            if depth < h:
                size //= 1 << (h - depth)
        return out

    @property
    def height(self) -> int:
        return adaptive_height(self.N)

    @property
    def degrees(self) -> tuple[int, ...]:
        h = self.height
        return tuple(1 << (h - d) for d in range(h))

    def level_sizes(self) -> list[int]:
        """Number of nodes at each depth, root first."""
        out, count = [1], 1
        for deg in self.degrees:
            count *= deg
            out.append(count)
        return out

    def node(self, start: int, length: int) -> RegionDescriptor:
        return range_descriptor(start, length, self.shape)

    @property
    def root(self) -> RegionDescriptor:
        return self.node(0, self.N)

    def children(self, start: int, length: int, depth: int) -> list[tuple[int, int]]:
        deg = 1 << (self.height - depth)
        step = length // deg
        return [(start + i * step, step) for i in range(deg)]

    def cell_descriptor(self, cell):
        return self.node(int(cell[0]) * self.shape[1] + int(cell[1]), 1)


_VARIANTS: dict[Variant, type[HashStore]] = {
    Variant.QUAD: QuadStore,
    Variant.BOUNDARY: BoundaryStore,
    Variant.SIFT: SiftStore,
    Variant.SIEVE: LayerSieveStore,
    Variant.ADAPTIVE: AdaptiveTree,
}

STORE_NAMES = {"quad": Variant.QUAD, "boundary": Variant.BOUNDARY, "sift": Variant.SIFT,
               "sieve": Variant.SIEVE, "adaptive": Variant.ADAPTIVE}


def build_quad_store(grid, key: KeyMaterial) -> QuadStore:
    return QuadStore.build(grid, key)


def build_boundary_store(grid, key: KeyMaterial) -> BoundaryStore:
    return BoundaryStore.build(grid, key)


def build_sift_store(grid, key: KeyMaterial) -> SiftStore:
    return SiftStore.build(grid, key)


def build_layer_sieve(grid, key: KeyMaterial) -> LayerSieveStore:
    return LayerSieveStore.build(grid, key)


def build_adaptive_tree(grid, key: KeyMaterial) -> AdaptiveTree:
    return AdaptiveTree.build(grid, key)


def build_store(name: str, grid, key: KeyMaterial) -> HashStore:
    return _VARIANTS[STORE_NAMES[name]].build(grid, key)


def store_size(store: HashStore) -> int:
    return len(store)


def save_store(store: HashStore, sink: BinaryIO) -> int:
    return store.save(sink)


def load_store(source: BinaryIO, key: KeyMaterial | None = None,
               expected: Variant | None = None) -> HashStore:
    data = source.read()
    if len(data) < _STORE_HEADER.size:
        raise StoreFormatError("store header truncated")
    magic, variant, mode, m, cell_size, count = _STORE_HEADER.unpack_from(data, 0)
    if magic != STORE_MAGIC:
        raise StoreFormatError(f"bad store magic {magic!r}")
    try:
        variant = Variant(variant)
        mode = KeyMode(mode)
    except ValueError as exc:
        raise StoreFormatError(str(exc)) from exc
    if expected is not None and variant != expected:
        raise VariantMismatchError(f"file holds a {variant.name} store, expected {Variant(expected).name}")
    tag_size = 32 if mode == KeyMode.MAC else 64
    offset = _STORE_HEADER.size
    digests = []
    for _ in range(count):
        try:
            desc, offset = RegionDescriptor.decode(data, offset)
        except Exception as exc:
            raise StoreFormatError(f"store truncated or corrupt: {exc}") from exc
        tag = data[offset : offset + tag_size]
        if len(tag) != tag_size:
            raise StoreFormatError("store truncated inside a tag")
        offset += tag_size
        digests.append(SignedDigest(desc, tag))
    if mode == KeyMode.SIGNATURE:
        public = data[offset : offset + PUBLIC_KEY_SIZE]
        if len(public) != PUBLIC_KEY_SIZE:
            raise StoreFormatError("store truncated inside the verification key")
        offset += PUBLIC_KEY_SIZE
        key = KeyMaterial.verifier(public)
    elif key is None:
        raise MissingKeyError("MAC-mode stores embed no key; pass the MAC key")
    elif key.mode != KeyMode.MAC:
        raise StoreFormatError("MAC-mode store needs a MAC key")
    if offset != len(data):
        raise StoreFormatError(f"{len(data) - offset} trailing bytes after store records")
    return _VARIANTS[variant](key, (m, m), cell_size, digests)


def store_from_bytes(data: bytes, key: KeyMaterial | None = None,
                     expected: Variant | None = None) -> HashStore:
    return load_store(io.BytesIO(data), key, expected)
