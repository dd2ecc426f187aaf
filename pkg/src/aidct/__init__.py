"""Exact 8x8 2-D DCT over the algebraic-integer ring Z[z1, z2].

Outputs are quads ``(a, b, c, d)`` meaning ``a + b*z1 + c*z2 + d*z1z2``.
"""

from .frs import SET_12_5_13, SET_437_181_473, ExpansionFactor, frs_reconstruct, frs_reconstruct_scaled
from .harness import CalibrationError, calibrate, success_rate
from .pipeline import PipelineConfig, RowParallelPipeline, stream_blocks
from .ring import AIQuad, decode_array, decode_exact, quad_add, quad_mul
from .transform import dct2d_ai_decomposed, dct2d_ai_direct, dct2d_core, forward_a

__all__ = [
    "AIQuad",
    "CalibrationError",
    "ExpansionFactor",
    "PipelineConfig",
    "RowParallelPipeline",
    "SET_12_5_13",
    "SET_437_181_473",
    "calibrate",
    "dct2d_ai_decomposed",
    "dct2d_ai_direct",
    "dct2d_core",
    "decode_array",
    "decode_exact",
    "forward_a",
    "frs_reconstruct",
    "frs_reconstruct_scaled",
    "quad_add",
    "quad_mul",
    "stream_blocks",
    "success_rate",
]
