"""Set Transformer forward pass used by the learned split initializer.

Architecture, bottom to top:

    attention(Q, K, V)      row-softmax(Q Kᵀ / sqrt(d_q)) V
    multihead_att(q, k, v)  h projected attentions, concatenated, projected
    mab(x, y)               x + rFF1(MHA(x, y)), then + rFF2 of that
    isab(x)                 mab(x, mab(I, x)) with trainable inducing rows I
    forward(x)              embed -> L ISABs -> H; pooled = mab(S, H);
                            logits = head(mab(H, pooled))

rFF is a single affine map plus ReLU applied row-wise; there is no layer
normalization anywhere, and the output head is affine only.  Everything runs
in float32.  Attention score storage is O(n_q * n_k) per block; because the
encoder only ever attends between the set and the m_ind inducing rows, no
block materializes an N x N matrix.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .weights_io import StWeights

F32 = np.float32


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted, dtype=F32)
    return e / e.sum(axis=-1, keepdims=True)


def attention(q: np.ndarray, k: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Scaled dot-product attention; rows of the result are convex
    combinations of the rows of v."""
    d_q = q.shape[-1]
    scores = (q @ np.swapaxes(k, -1, -2)) / F32(np.sqrt(d_q))
    return _softmax_rows(scores) @ v


def multihead_att(q: np.ndarray, k: np.ndarray, v: np.ndarray,
                  tensors: dict, prefix: str, heads: int) -> np.ndarray:
    """Project q/k/v, run `heads` parallel attentions on d_h/heads slices,
    concatenate, and project by wo."""
    d_h = tensors[f"{prefix}.wq"].shape[0]
    d_head = d_h // heads

    def split(x, w):
        proj = (x @ w).reshape(x.shape[0], heads, d_head)
        return np.swapaxes(proj, 0, 1)  # (heads, n, d_head)

    qh = split(q, tensors[f"{prefix}.wq"])
    kh = split(k, tensors[f"{prefix}.wk"])
    vh = split(v, tensors[f"{prefix}.wv"])
    out = attention(qh, kh, vh)  # (heads, n, d_head)
    concat = np.swapaxes(out, 0, 1).reshape(q.shape[0], d_h)
    return concat @ tensors[f"{prefix}.wo"]


def _rff(x: np.ndarray, tensors: dict, prefix: str) -> np.ndarray:
    return np.maximum(x @ tensors[f"{prefix}.w"] + tensors[f"{prefix}.b"], F32(0))


def mab(x: np.ndarray, y: np.ndarray, tensors: dict, prefix: str, heads: int) -> np.ndarray:
    """Multihead attention block: two residual stages, each adding a
    row-wise feed-forward term."""
    h = x + _rff(multihead_att(x, y, y, tensors, prefix, heads), tensors, f"{prefix}.rff1")
    return h + _rff(h, tensors, f"{prefix}.rff2")


def isab(x: np.ndarray, tensors: dict, prefix: str, heads: int) -> np.ndarray:
    """Induced self-attention: the set attends to a small summary built by
    letting the inducing rows attend to the set."""
    induced = mab(tensors[f"{prefix}.ind"], x, tensors, f"{prefix}.mab_inner", heads)
    return mab(x, induced, tensors, f"{prefix}.mab_outer", heads)


def set_transformer_forward(x: np.ndarray, weights: StWeights) -> np.ndarray:
    """Per-point logits for one set; permutation equivariant in the rows of x."""
    x = np.ascontiguousarray(x, dtype=F32)
    if x.ndim != 2:
        raise DimensionMismatch(f"input must be 2-d, got shape {x.shape}")
    if x.shape[1] != weights.meta.dim_in:
        raise DimensionMismatch(
            f"input dim {x.shape[1]} != weight-file dim {weights.meta.dim_in}")
    t = weights.tensors
    heads = weights.meta.heads
    h_x = x @ t["embed.w"] + t["embed.b"]
    for i in range(weights.meta.depth):
        h_x = isab(h_x, t, f"enc.isab{i}", heads)
    pooled = mab(t["dec.pma.seed"], h_x, t, "dec.pma.mab", heads)
    decoded = mab(h_x, pooled, t, "dec.mab", heads)
    logits = decoded @ t["dec.head.w"] + t["dec.head.b"]
    return logits[:, 0]
