"""Binary weight-file format for the split-prediction network.

Layout (little-endian throughout):

    8 bytes   ASCII magic "SPLTNET1"
    6 x u32   meta: input dim D, hidden dim d_h, heads h, inducing points
              m_ind, encoder depth L, pooling seeds M
    u32       tensor count
    per tensor:
        u16          name length
        bytes        UTF-8 name
        u8           rank
        rank x u32   dims
        f32[...]     row-major payload

Canonical tensor names are generated by :func:`expected_shapes`; both the
loader here and any external trainer must emit exactly that set.  An
attention block contributes 8 tensors (wq, wk, wv, wo, rff1.w/b, rff2.w/b),
an encoder ISAB 17 (two blocks plus its inducing matrix), and the decoder 19
(seed matrix, two blocks, output head), so a full model holds
2 + 17*L + 19 tensors.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import BadMagic, CorruptTensor, InvalidWeights, ShapeMismatch

MAGIC = b"SPLTNET1"


@dataclass(frozen=True)
class StMeta:
    """Architecture description stored in the weight-file header."""

    dim_in: int
    dim_hidden: int
    heads: int
    inducing: int
    depth: int
    seeds: int

    def __post_init__(self):
        for name in ("dim_in", "dim_hidden", "heads", "inducing", "depth", "seeds"):
            if getattr(self, name) < 1:
                raise InvalidWeights(f"meta field {name} must be >= 1")
        if self.dim_hidden % self.heads != 0:
            raise InvalidWeights(
                f"hidden dim {self.dim_hidden} not divisible by {self.heads} heads")
        if self.seeds != 2:
            raise InvalidWeights(f"exactly 2 pooling seeds are supported, got {self.seeds}")


def mab_shapes(prefix: str, d_h: int) -> dict[str, tuple]:
    return {
        f"{prefix}.wq": (d_h, d_h),
        f"{prefix}.wk": (d_h, d_h),
        f"{prefix}.wv": (d_h, d_h),
        f"{prefix}.wo": (d_h, d_h),
        f"{prefix}.rff1.w": (d_h, d_h),
        f"{prefix}.rff1.b": (d_h,),
        f"{prefix}.rff2.w": (d_h, d_h),
        f"{prefix}.rff2.b": (d_h,),
    }


def expected_shapes(meta: StMeta) -> dict[str, tuple]:
    """Canonical name -> shape map for a given architecture."""
    d_h = meta.dim_hidden
    shapes = {"embed.w": (meta.dim_in, d_h), "embed.b": (d_h,)}
    for i in range(meta.depth):
        shapes[f"enc.isab{i}.ind"] = (meta.inducing, d_h)
        shapes.update(mab_shapes(f"enc.isab{i}.mab_inner", d_h))
        shapes.update(mab_shapes(f"enc.isab{i}.mab_outer", d_h))
    shapes["dec.pma.seed"] = (meta.seeds, d_h)
    shapes.update(mab_shapes("dec.pma.mab", d_h))
    shapes.update(mab_shapes("dec.mab", d_h))
    shapes["dec.head.w"] = (d_h, 1)
    shapes["dec.head.b"] = (1,)
    return shapes


@dataclass
class StWeights:
    """A loaded model: meta header plus the named float32 tensors."""

    meta: StMeta
    tensors: dict[str, np.ndarray]

    def __post_init__(self):
        want = expected_shapes(self.meta)
        missing = set(want) - set(self.tensors)
        extra = set(self.tensors) - set(want)
        if missing or extra:
            raise ShapeMismatch(
                f"tensor set mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
        for name, arr in self.tensors.items():
            if tuple(arr.shape) != want[name]:
                raise ShapeMismatch(
                    f"tensor {name}: shape {tuple(arr.shape)}, expected {want[name]}")
            if not np.all(np.isfinite(arr)):
                raise CorruptTensor(f"tensor {name} contains non-finite values")
            self.tensors[name] = np.ascontiguousarray(arr, dtype=np.float32)

    @property
    def dim_in(self) -> int:
        return self.meta.dim_in


def save_weights(weights: StWeights, path) -> None:
    """Write the bit-exact binary format described in the module docstring."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        m = weights.meta
        fh.write(struct.pack("<6I", m.dim_in, m.dim_hidden, m.heads,
                             m.inducing, m.depth, m.seeds))
        fh.write(struct.pack("<I", len(weights.tensors)))
        for name in sorted(weights.tensors):
            arr = weights.tensors[name]
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.astype("<f4").tobytes(order="C"))


def load_weights(path) -> StWeights:
    """Parse and validate a weight file.

    Raises BadMagic, ShapeMismatch, CorruptTensor or InvalidWeights depending
    on what is wrong with the file.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != MAGIC:
        raise BadMagic(f"bad magic bytes {blob[:8]!r}")
    off = 8

    def take(n):
        nonlocal off
        if off + n > len(blob):
            raise CorruptTensor("file truncated")
        chunk = blob[off:off + n]
        off += n
        return chunk

    meta = StMeta(*struct.unpack("<6I", take(24)))
    (count,) = struct.unpack("<I", take(4))
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", take(2))
        name = take(name_len).decode("utf-8")
        (rank,) = struct.unpack("<B", take(1))
        dims = struct.unpack(f"<{rank}I", take(4 * rank))
        numel = int(np.prod(dims, dtype=np.int64)) if rank else 1
        data = np.frombuffer(take(4 * numel), dtype="<f4").reshape(dims)
        tensors[name] = data.copy()
    if off != len(blob):
        raise CorruptTensor(f"{len(blob) - off} trailing bytes after last tensor")
    return StWeights(meta, tensors)


def random_weights(meta: StMeta, rng: np.random.Generator, scale: float = 0.2) -> StWeights:
    """Gaussian-initialized weights; used for tests and as a training start."""
    tensors = {}
    for name, shape in expected_shapes(meta).items():
        if name.endswith(".b"):
            tensors[name] = np.zeros(shape, dtype=np.float32)
        else:
            tensors[name] = (scale * rng.standard_normal(shape)).astype(np.float32)
    return StWeights(meta, tensors)
