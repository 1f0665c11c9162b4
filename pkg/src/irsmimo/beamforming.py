"""Transceiver design for a fixed end-to-end channel: water-filling power
allocation, the SVD-based relaxed transceiver that attains the waterfilled
capacity, its projection onto analog phase-shifter hardware, and a fully
digital variant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reflection import canonical_phase

# Relative cutoff below which a squared singular value counts as zero rank.
_RANK_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PowerAllocation:
    """Per-stream transmit powers and the water level that produced them."""

    per_stream_power: np.ndarray
    water_level: float

    def __post_init__(self):
        object.__setattr__(self, "per_stream_power", _readonly(self.per_stream_power))


def water_filling(
    squared_singulars: np.ndarray,
    p_tx: float,
    noise_var: float,
    n_s: int,
) -> PowerAllocation:
    """Allocate p_tx over the top n_s eigenmodes by water-filling.

    Solves max sum log2(1 + P_l * lam_l / noise_var) subject to sum P_l =
    p_tx, P_l >= 0. The optimum is P_l = max(mu - noise_var / lam_l, 0) with
    the water level mu fixed by the power budget; mu is found by bisection to
    absolute tolerance 1e-12. Gains are sorted descending and truncated (or
    zero-padded) to length n_s; gains below 1e-12 of the largest count as
    zero and get no power.
    """
    if p_tx <= 0:
        raise ValueError("p_tx must be positive")
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    if n_s < 1:
        raise ValueError("n_s must be at least 1")
    lam = np.sort(np.asarray(squared_singulars, dtype=float))[::-1]
    if lam.size and lam[-1] < -1e-12 * max(lam[0], 1.0):
        raise ValueError("squared singular values must be nonnegative")
    lam = np.clip(lam[:n_s], 0.0, None)
    if lam.size < n_s:
        lam = np.concatenate([lam, np.zeros(n_s - lam.size)])
    active = lam > _RANK_TOL * (lam[0] if lam.size else 0.0)
    if not np.any(active):
        raise ValueError("all eigenmode gains are zero; nothing to allocate")

    inv = np.zeros(n_s)
    inv[active] = noise_var / lam[active]

    def allocated(mu: float) -> float:
        return float(np.sum(np.maximum(mu - inv[active], 0.0)))

    lo, hi = 0.0, p_tx + float(inv[active].max())
    for _ in range(200):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        if allocated(mid) < p_tx:
            lo = mid
        else:
            hi = mid
    mu = 0.5 * (lo + hi)
    power = np.where(active, np.maximum(mu - inv, 0.0), 0.0)
    return PowerAllocation(per_stream_power=power, water_level=mu)


def r_max(h_tot: np.ndarray, p_tx: float, noise_var: float, n_s: int) -> float:
    """Waterfilled capacity of h_tot restricted to n_s streams, in bit/s/Hz.

    This is the performance ceiling for any transceiver with enough RF
    chains, and the yardstick the hardware-constrained designs are measured
    against.
    """
    h_tot = np.asarray(h_tot)
    sing = np.linalg.svd(h_tot, compute_uv=False)
    if not sing.size or sing[0] == 0.0:
        raise ValueError("channel is identically zero")
    lam = sing[:n_s] ** 2
    alloc = water_filling(lam, p_tx, noise_var, n_s)
    lam_padded = np.concatenate([lam, np.zeros(max(0, n_s - lam.size))])
    return float(np.sum(np.log2(1.0 + alloc.per_stream_power * lam_padded / noise_var)))


@dataclass(frozen=True)
class HybridBeamformers:
    """Receive/transmit pairs (w_rf, w_bb) and (f_rf, f_bb) plus the power
    budget they were designed for.

    kind "relaxed": unconstrained analog parts taken straight from singular
    vectors. kind "projected": analog parts are constant-modulus
    (1/sqrt(antennas) per entry) and the digital precoder is rescaled so
    ||f_rf f_bb||_F^2 = p_tx exactly.
    """

    w_rf: np.ndarray
    w_bb: np.ndarray
    f_rf: np.ndarray
    f_bb: np.ndarray
    kind: str
    p_tx: float

    def __post_init__(self):
        if self.kind not in ("relaxed", "projected"):
            raise ValueError(f"unknown beamformer kind {self.kind!r}")
        if self.p_tx <= 0:
            raise ValueError("p_tx must be positive")
        n_r, n_r_rf = self.w_rf.shape
        n_t, n_t_rf = self.f_rf.shape
        if self.w_bb.shape[0] != n_r_rf or self.f_bb.shape[0] != n_t_rf:
            raise ValueError("digital stage row count must match RF chain count")
        if self.w_bb.shape[1] != self.f_bb.shape[1]:
            raise ValueError("stream counts of the two sides differ")
        if self.kind == "projected":
            mod_err = max(
                float(np.max(np.abs(np.abs(self.w_rf) - 1.0 / np.sqrt(n_r)))),
                float(np.max(np.abs(np.abs(self.f_rf) - 1.0 / np.sqrt(n_t)))),
            )
            if mod_err > 1e-9:
                raise ValueError(f"analog stages violate constant modulus by {mod_err:.3e}")
            pow_err = abs(np.linalg.norm(self.f_rf @ self.f_bb, "fro") ** 2 - self.p_tx)
            if pow_err > 1e-9 * self.p_tx:
                raise ValueError(f"transmit power off budget by {pow_err:.3e}")
        for name in ("w_rf", "w_bb", "f_rf", "f_bb"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))

    @property
    def n_s(self) -> int:
        return self.w_bb.shape[1]


def _canonical_svd(h: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD with deterministic singular-vector phases.

    Paired columns (up to the rank bound min(n_r, n_t)) are rotated jointly
    by the phase that canonicalizes the U column, keeping u s v^H intact;
    surplus null-space columns on either side are canonicalized
    independently since they carry free phases of their own.
    """
    u, s, vh = np.linalg.svd(h, full_matrices=True)
    v = vh.conj().T
    k = min(h.shape)
    for i in range(u.shape[1]):
        pivot = u[int(np.argmax(np.abs(u[:, i]))), i]
        rot = np.abs(pivot) / pivot if pivot != 0 else 1.0
        u[:, i] = u[:, i] * rot
        if i < k:
            # Same rotation on both sides leaves u_i s_i v_i^H unchanged.
            v[:, i] = v[:, i] * rot
    for j in range(k, v.shape[1]):
        v[:, j] = canonical_phase(v[:, j])
    return u, s, v


def _svd_transceiver(
    h_tot: np.ndarray,
    n_r_rf: int,
    n_t_rf: int,
    n_s: int,
    p_tx: float,
    noise_var: float,
) -> HybridBeamformers:
    if n_s > min(n_r_rf, n_t_rf):
        raise ValueError("n_s cannot exceed either RF chain count")
    n_r, n_t = h_tot.shape
    if n_r_rf > n_r or n_t_rf > n_t:
        raise ValueError("RF chain count cannot exceed antenna count")
    u, s, v = _canonical_svd(h_tot)
    lam = s[:n_s] ** 2
    alloc = water_filling(lam, p_tx, noise_var, n_s)

    w_rf = u[:, :n_r_rf]
    f_rf = v[:, :n_t_rf]
    # Digital stages expressed in the RF basis: selectors of the top n_s
    # columns, orthonormal on both sides before power loading.
    w_bb = w_rf.conj().T @ u[:, :n_s]
    f_bb = (f_rf.conj().T @ v[:, :n_s]) * np.sqrt(alloc.per_stream_power)
    return HybridBeamformers(
        w_rf=w_rf, w_bb=w_bb, f_rf=f_rf, f_bb=f_bb, kind="relaxed", p_tx=p_tx)


def relaxed_beamformers(h_tot, dims, p_tx: float, noise_var: float) -> HybridBeamformers:
    """SVD transceiver that meets the waterfilled capacity exactly.

    Analog stages take the leading left/right singular vectors (one per RF
    chain); digital stages select the top dims.n_s of them and load the
    water-filling powers. Since n_s never exceeds the RF chain counts, the
    product spans the same subspace as a fully digital SVD transceiver and
    the rate equals r_max of the channel.
    """
    return _svd_transceiver(
        np.asarray(h_tot), dims.n_r_rf, dims.n_t_rf, dims.n_s, p_tx, noise_var)


def project_hybrid(relaxed: HybridBeamformers, p_tx: float) -> HybridBeamformers:
    """Map a relaxed transceiver onto phase-shifter hardware.

    Analog entries keep only their phases at fixed magnitude
    1/sqrt(antennas); the digital combiner is untouched; the digital
    precoder is rescaled so the radiated power meets p_tx exactly.
    """
    if relaxed.kind != "relaxed":
        raise ValueError("input must be a relaxed transceiver")
    n_r = relaxed.w_rf.shape[0]
    n_t = relaxed.f_rf.shape[0]
    w_rf = np.exp(1j * np.angle(relaxed.w_rf)) / np.sqrt(n_r)
    f_rf = np.exp(1j * np.angle(relaxed.f_rf)) / np.sqrt(n_t)
    scale = np.linalg.norm(f_rf @ relaxed.f_bb, "fro")
    if scale == 0.0:
        raise ValueError("projected precoder radiates no power; cannot normalize")
    f_bb = (np.sqrt(p_tx) / scale) * relaxed.f_bb
    return HybridBeamformers(
        w_rf=w_rf, w_bb=relaxed.w_bb.copy(), f_rf=f_rf, f_bb=f_bb,
        kind="projected", p_tx=p_tx)


def fully_digital(h_tot, p_tx: float, noise_var: float, n_s: int) -> HybridBeamformers:
    """Reference transceiver with one RF chain per antenna (no hardware
    constraint). Attains r_max of the given channel by construction."""
    h_tot = np.asarray(h_tot)
    n_r, n_t = h_tot.shape
    return _svd_transceiver(h_tot, n_r, n_t, n_s, p_tx, noise_var)
