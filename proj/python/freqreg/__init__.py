"""Frequency-domain parameter tensors with zigzag truncation."""

from ._core import (
    FrequencyTensor,
    TruncationSchedule,
    ZigzagPlan,
    dct_1d,
    dct_nd,
    gradcheck,
    idct_1d,
    idct_nd,
    idct_nd_adjoint,
    pack_tensor,
    synthetic_blobs,
    unpack_tensor,
)

__all__ = [
    "FrequencyTensor",
    "TruncationSchedule",
    "ZigzagPlan",
    "dct_1d",
    "dct_nd",
    "gradcheck",
    "idct_1d",
    "idct_nd",
    "idct_nd_adjoint",
    "pack_tensor",
    "synthetic_blobs",
    "unpack_tensor",
]
