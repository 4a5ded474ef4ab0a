"""
Patch-based self-attention encoder that refines raw shapelets
"""

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

DTYPE = torch.float64


def positional_encoding(num_positions: int, d_model: int) -> torch.Tensor:
    """Fixed sinusoidal encoding, shape (num_positions, d_model)"""
    position = torch.arange(num_positions, dtype=DTYPE).unsqueeze(1)
    div_term = torch.exp(
        torch.arange(0, d_model, 2, dtype=DTYPE) * (-math.log(10000.0) / d_model)
    )
    pe = torch.zeros(num_positions, d_model, dtype=DTYPE)
    pe[:, 0::2] = torch.sin(position * div_term)
    pe[:, 1::2] = torch.cos(position * div_term[: d_model // 2])
    return pe


class MultiHeadSelfAttention(nn.Module):
    """Multi-head scaled dot-product self-attention over patch tokens.

    Queries, keys and values are projected once at full width and split into
    ``n_heads`` heads of width ``d_model // n_heads``; the concatenated heads
    go through an output projection.
    """

    def __init__(self, d_model: int, n_heads: int):
        super().__init__()
        assert d_model % n_heads == 0, "d_model must be divisible by n_heads"
        self.d_model = d_model
        self.n_heads = n_heads
        self.d_head = d_model // n_heads

        self.W_q = nn.Linear(d_model, d_model, dtype=DTYPE)
        self.W_k = nn.Linear(d_model, d_model, dtype=DTYPE)
        self.W_v = nn.Linear(d_model, d_model, dtype=DTYPE)
        self.W_o = nn.Linear(d_model, d_model, dtype=DTYPE)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        B, P, D = x.size()

        Q = self.W_q(x).view(B, P, self.n_heads, self.d_head).transpose(1, 2)
        K = self.W_k(x).view(B, P, self.n_heads, self.d_head).transpose(1, 2)
        V = self.W_v(x).view(B, P, self.n_heads, self.d_head).transpose(1, 2)

        scores = torch.matmul(Q, K.transpose(-2, -1)) / math.sqrt(self.d_head)
        attn = F.softmax(scores, dim=-1)
        context = torch.matmul(attn, V)

        context = context.transpose(1, 2).contiguous().view(B, P, D)
        return self.W_o(context)


class ShapeletEncoder(nn.Module):
    """
    Refine shapelets patch by patch

    Each length-L shapelet is cut into L/P patches; patches are embedded
    linearly, offset by a sinusoidal positional encoding, mixed by one
    multi-head self-attention block, mapped back to patch space and
    concatenated. The raw shapelet is added back as a residual, so an encoder
    with all-zero weights is the identity.
    """

    def __init__(self, shapelet_len: int, patch_len: int, d_model: int, n_heads: int):
        super().__init__()
        self.shapelet_len = shapelet_len
        self.patch_len = patch_len
        self.num_patches = shapelet_len // patch_len

        self.patch_embed = nn.Linear(patch_len, d_model, dtype=DTYPE)
        self.attention = MultiHeadSelfAttention(d_model, n_heads)
        self.out_map = nn.Linear(d_model, patch_len, dtype=DTYPE)
        self.register_buffer(
            'pe', positional_encoding(self.num_patches, d_model), persistent=False
        )

    def forward(self, raw: torch.Tensor) -> torch.Tensor:
        N, L = raw.shape
        patches = raw.reshape(N, self.num_patches, self.patch_len)
        tokens = self.patch_embed(patches) + self.pe
        mixed = self.attention(tokens)
        refined = self.out_map(mixed).reshape(N, L)
        return raw + refined
