"""Region descriptors, signed digests, key material and the cost meter.

A digest authenticates SHA-256 over ``canonical_bytes``: the descriptor's
wire encoding followed by the covered payloads in canonical order. Tags are
HMAC-SHA-256 (32 bytes) in MAC mode and Ed25519 (64 bytes) in signature mode.
"""

from __future__ import annotations

import hashlib
import hmac
import struct
from dataclasses import asdict, dataclass
from enum import IntEnum
from typing import Iterable

import numpy as np
from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from .errors import DescriptorError, MissingKeyError
from .grid import CellCoord, Grid


class DescriptorKind(IntEnum):
    RECT = 0
    ROW_RUN = 1
    COL_RUN = 2
    CELL_LIST = 3


_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")
_RECT = struct.Struct("<IIII")
_RUN = struct.Struct("<III")


@dataclass(frozen=True)
class RegionDescriptor:
    """Identifies an exact cell set together with its traversal order.

    Geometry per kind: rect ``(row0, col0, rows, cols)``; row-run
    ``(row, start_col, length)``; col-run ``(col, start_row, length)``;
    cell-list ``(r0, c0, r1, c1, ...)`` sorted row-major.
    """

    kind: DescriptorKind
    geometry: tuple

    @classmethod
    def rect(cls, row0: int, col0: int, rows: int, cols: int) -> "RegionDescriptor":
        return cls(DescriptorKind.RECT, (row0, col0, rows, cols))

    @classmethod
    def row_run(cls, row: int, start: int, length: int) -> "RegionDescriptor":
        return cls(DescriptorKind.ROW_RUN, (row, start, length))

    @classmethod
    def col_run(cls, col: int, start: int, length: int) -> "RegionDescriptor":
        return cls(DescriptorKind.COL_RUN, (col, start, length))

    @classmethod
    def cell_list(cls, cells: Iterable[tuple[int, int]]) -> "RegionDescriptor":
        ordered = sorted({(int(r), int(c)) for r, c in cells})
        return cls(DescriptorKind.CELL_LIST, tuple(v for rc in ordered for v in rc))

    @classmethod
    def cell(cls, row: int, col: int) -> "RegionDescriptor":
        return cls(DescriptorKind.CELL_LIST, (row, col))

    @property
    def size(self) -> int:
        g = self.geometry
        if self.kind == DescriptorKind.RECT:
            return g[2] * g[3]
        if self.kind == DescriptorKind.CELL_LIST:
            return len(g) // 2
        return g[2]

    def cells(self) -> list[CellCoord]:
        g = self.geometry
        if self.kind == DescriptorKind.RECT:
            r0, c0, h, w = g
            return [CellCoord(r, c) for r in range(r0, r0 + h) for c in range(c0, c0 + w)]
        if self.kind == DescriptorKind.ROW_RUN:
            row, s, n = g
            return [CellCoord(row, c) for c in range(s, s + n)]
        if self.kind == DescriptorKind.COL_RUN:
            col, s, n = g
            return [CellCoord(r, col) for r in range(s, s + n)]
        return [CellCoord(g[i], g[i + 1]) for i in range(0, len(g), 2)]

    def encode(self) -> bytes:
        head = _U8.pack(self.kind)
        if self.kind == DescriptorKind.RECT:
            return head + _RECT.pack(*self.geometry)
        if self.kind in (DescriptorKind.ROW_RUN, DescriptorKind.COL_RUN):
            return head + _RUN.pack(*self.geometry)
        n = len(self.geometry) // 2
        return head + _U32.pack(n) + struct.pack(f"<{2 * n}I", *self.geometry)

    @classmethod
    def decode(cls, buf: bytes, offset: int = 0) -> tuple["RegionDescriptor", int]:
        """Parse one descriptor at ``offset``; return it and the next offset."""
        try:
            (kind,) = _U8.unpack_from(buf, offset)
            offset += 1
            kind = DescriptorKind(kind)
            if kind == DescriptorKind.RECT:
                geom = _RECT.unpack_from(buf, offset)
                offset += _RECT.size
            elif kind in (DescriptorKind.ROW_RUN, DescriptorKind.COL_RUN):
                geom = _RUN.unpack_from(buf, offset)
                offset += _RUN.size
            else:
                (n,) = _U32.unpack_from(buf, offset)
                offset += 4
                geom = struct.unpack_from(f"<{2 * n}I", buf, offset)
                offset += 8 * n
        except (struct.error, ValueError) as exc:
            raise DescriptorError(f"malformed descriptor at byte {offset}: {exc}") from exc
        return cls(kind, tuple(geom)), offset

    def extract(self, payload: np.ndarray) -> bytes:
        """Covered payload bytes in canonical order, bounds-checked."""
        rows, cols = payload.shape[:2]
        g = self.geometry
        if self.kind == DescriptorKind.RECT:
            r0, c0, h, w = g
            if h < 1 or w < 1 or r0 + h > rows or c0 + w > cols:
                raise DescriptorError(f"rect {g} outside {rows}x{cols}")
            return payload[r0 : r0 + h, c0 : c0 + w].tobytes()
        if self.kind == DescriptorKind.ROW_RUN:
            row, s, n = g
            if n < 1 or row >= rows or s + n > cols:
                raise DescriptorError(f"row-run {g} outside {rows}x{cols}")
            return payload[row, s : s + n].tobytes()
        if self.kind == DescriptorKind.COL_RUN:
            col, s, n = g
            if n < 1 or col >= cols or s + n > rows:
                raise DescriptorError(f"col-run {g} outside {rows}x{cols}")
            return payload[s : s + n, col].tobytes()
        rr = np.asarray(g[0::2], dtype=np.intp)
        cc = np.asarray(g[1::2], dtype=np.intp)
        if len(rr) == 0 or rr.max() >= rows or cc.max() >= cols:
            raise DescriptorError(f"cell-list outside {rows}x{cols}")
        return payload[rr, cc].tobytes()


def as_payload(source) -> np.ndarray:
    """Accept a Grid or a raw (rows, cols, cell_size) uint8 array."""
    if isinstance(source, Grid):
        return source.cells
    arr = np.asarray(source, dtype=np.uint8)
    if arr.ndim != 3:
        raise ValueError(f"payload must have shape (rows, cols, cell_size), got {arr.shape}")
    return arr


def canonical_bytes(grid, descriptor: RegionDescriptor) -> bytes:
    return descriptor.encode() + descriptor.extract(as_payload(grid))


# -- keys ---------------------------------------------------------------------


class KeyMode(IntEnum):
    MAC = 0
    SIGNATURE = 1


TAG_SIZES = {KeyMode.MAC: 32, KeyMode.SIGNATURE: 64}


class KeyMaterial:
    """Signing and/or verification material for one of the two key modes.

    In MAC mode the same secret both creates and checks tags. In signature
    mode ``verifying_only()`` drops the private half, which is what a store
    should keep around.
    """

    def __init__(self, mode: KeyMode, signing_key: bytes | None, verification_key: bytes):
        self.mode = KeyMode(mode)
        self.signing_key = signing_key
        self.verification_key = verification_key
        self._private = None
        self._public = None
        if self.mode == KeyMode.SIGNATURE:
            if signing_key is not None:
                self._private = Ed25519PrivateKey.from_private_bytes(signing_key)
            self._public = Ed25519PublicKey.from_public_bytes(verification_key)

    @classmethod
    def mac(cls, secret: bytes) -> "KeyMaterial":
        if not secret:
            raise MissingKeyError("empty MAC key")
        return cls(KeyMode.MAC, bytes(secret), bytes(secret))

    @classmethod
    def signature(cls, private_seed: bytes) -> "KeyMaterial":
        private = Ed25519PrivateKey.from_private_bytes(private_seed)
        public = private.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
        return cls(KeyMode.SIGNATURE, bytes(private_seed), public)

    @classmethod
    def generate_signature(cls) -> "KeyMaterial":
        from cryptography.hazmat.primitives.serialization import NoEncryption, PrivateFormat

        raw = Ed25519PrivateKey.generate().private_bytes(Encoding.Raw, PrivateFormat.Raw, NoEncryption())
        return cls.signature(raw)

    @classmethod
    def verifier(cls, public_key: bytes) -> "KeyMaterial":
        return cls(KeyMode.SIGNATURE, None, bytes(public_key))

    def verifying_only(self) -> "KeyMaterial":
        if self.mode == KeyMode.MAC:
            return self
        return KeyMaterial.verifier(self.verification_key)

    @property
    def can_sign(self) -> bool:
        return self.signing_key is not None

    @property
    def tag_size(self) -> int:
        return TAG_SIZES[self.mode]

    def tag(self, digest: bytes) -> bytes:
        if self.signing_key is None:
            raise MissingKeyError("no signing key available in this key material")
        if self.mode == KeyMode.MAC:
            return hmac.new(self.signing_key, digest, hashlib.sha256).digest()
        return self._private.sign(digest)

    def check(self, digest: bytes, tag: bytes) -> bool:
        if self.mode == KeyMode.MAC:
            expected = hmac.new(self.verification_key, digest, hashlib.sha256).digest()
            return hmac.compare_digest(expected, tag)
        try:
            self._public.verify(tag, digest)
        except InvalidSignature:
            return False
        return True

    def __repr__(self):
        return f"KeyMaterial(mode={self.mode.name}, can_sign={self.can_sign})"


@dataclass(frozen=True)
class SignedDigest:
    descriptor: RegionDescriptor
    tag: bytes

    @property
    def size(self) -> int:
        return self.descriptor.size

    def encode(self) -> bytes:
        return self.descriptor.encode() + self.tag


def sign_region(key: KeyMaterial, grid, descriptor: RegionDescriptor) -> SignedDigest:
    digest = hashlib.sha256(canonical_bytes(grid, descriptor)).digest()
    return SignedDigest(descriptor, key.tag(digest))


def check_region(key: KeyMaterial, grid, digest: SignedDigest) -> bool:
    """Unmetered verification; callers account for the cost themselves."""
    h = hashlib.sha256(canonical_bytes(grid, digest.descriptor)).digest()
    return key.check(h, digest.tag)


# -- cost accounting ------------------------------------------------------------


@dataclass
class CostMeter:
    """Counters for both cost models.

    ``sig_verifications`` counts each region check as 1; ``cells_touched``
    counts its size. ``cell_tests``/``neighbor_probes`` are per-cell checks
    made by spreading and by direct comparison; ``stage`` is the deepest
    level, iteration or stage index the last algorithm reached.
    """

    sig_verifications: int = 0
    cells_touched: int = 0
    hash_computations: int = 0
    cell_tests: int = 0
    neighbor_probes: int = 0
    stage: int = 0

    def charge_verification(self, size: int) -> None:
        self.sig_verifications += 1
        self.hash_computations += 1
        self.cells_touched += size

    def reach_stage(self, stage: int) -> None:
        self.stage = max(self.stage, stage)

    def add(self, other: "CostMeter") -> None:
        self.sig_verifications += other.sig_verifications
        self.cells_touched += other.cells_touched
        self.hash_computations += other.hash_computations
        self.cell_tests += other.cell_tests
        self.neighbor_probes += other.neighbor_probes
        self.stage = max(self.stage, other.stage)

    def snapshot(self) -> "CostMeter":
        return CostMeter(**asdict(self))

    def as_dict(self) -> dict:
        return asdict(self)


def verify_region(key: KeyMaterial, grid, digest: SignedDigest, meter: CostMeter | None = None) -> bool:
    ok = check_region(key, grid, digest)
    if meter is not None:
        meter.charge_verification(digest.descriptor.size)
    return ok
