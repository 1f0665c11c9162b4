"""Effective (cascaded) channel blocks and the total channel they induce.

The receiver can estimate, per transmit antenna t, the block
H_eff,t = H_IR * diag(H_TI[:, t]), an n_r x m matrix. The whole design
pipeline runs off these blocks plus the direct link; the individual reflected
links never need to be recovered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelTriple


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EffectiveChannel:
    """Stack of per-transmit-antenna cascade blocks.

    blocks has shape (n_t, n_r, m); blocks[t] is H_IR * diag of column t of
    H_TI, i.e. blocks[t, r, i] = H_IR[r, i] * H_TI[i, t].
    """

    blocks: np.ndarray

    def __post_init__(self):
        if self.blocks.ndim != 3:
            raise ValueError("blocks must be a 3-d array (n_t, n_r, m)")
        object.__setattr__(self, "blocks", _readonly(self.blocks))

    @property
    def n_t(self) -> int:
        return self.blocks.shape[0]

    @property
    def n_r(self) -> int:
        return self.blocks.shape[1]

    @property
    def m(self) -> int:
        return self.blocks.shape[2]

    def flat(self) -> np.ndarray:
        """All blocks stacked vertically: shape (n_t * n_r, m)."""
        return self.blocks.reshape(self.n_t * self.n_r, self.m)


@dataclass(frozen=True)
class ReflectionVector:
    """Reflection coefficients of the surface, one complex entry per element.

    kind is "unit_modulus" (every |v_i| = 1, enforced here) or "relaxed"
    (only the total-power convention ||v||^2 = m, enforced where the vector
    is produced so that zero placeholders remain constructible in tests).
    """

    entries: np.ndarray
    kind: str

    def __post_init__(self):
        if self.entries.ndim != 1:
            raise ValueError("entries must be a vector")
        if self.kind not in ("unit_modulus", "relaxed"):
            raise ValueError(f"unknown reflection kind {self.kind!r}")
        if self.kind == "unit_modulus":
            err = np.max(np.abs(np.abs(self.entries) - 1.0)) if len(self.entries) else 0.0
            if err > 1e-12:
                raise ValueError(f"unit-modulus violated by {err:.3e}")
        object.__setattr__(self, "entries", _readonly(self.entries))

    @property
    def m(self) -> int:
        return len(self.entries)


def build_effective(triple: ChannelTriple) -> EffectiveChannel:
    """Form the cascade blocks H_IR * diag(H_TI[:, t]) for every t."""
    h_ir = triple.h_ir.matrix
    h_ti = triple.h_ti.matrix
    blocks = h_ir[None, :, :] * h_ti.T[:, None, :]
    return EffectiveChannel(blocks=blocks)


def total_channel(h_tr: np.ndarray, eff: EffectiveChannel, v: ReflectionVector) -> np.ndarray:
    """End-to-end channel for reflection state v.

    Column t equals h_tr[:, t] + blocks[t] @ v, which coincides with
    H_TR + H_IR diag(v) H_TI without ever forming the individual links.
    """
    if v.m != eff.m:
        raise ValueError("reflection vector length does not match surface size")
    if h_tr.shape != (eff.n_r, eff.n_t):
        raise ValueError("direct-link shape does not match the cascade blocks")
    return h_tr + (eff.blocks @ v.entries).T


def gram_sum(eff: EffectiveChannel) -> np.ndarray:
    """Sum over t of H_eff,t^H H_eff,t, an m x m Hermitian PSD matrix.

    Computed as S^H S with all blocks stacked row-wise, then symmetrized to
    scrub roundoff. The quadratic form v^H G v equals the Frobenius power the
    surface contributes to the total channel at reflection state v.
    """
    s = eff.flat()
    g = s.conj().T @ s
    return 0.5 * (g + g.conj().T)
