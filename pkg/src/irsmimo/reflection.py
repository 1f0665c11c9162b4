"""Reflection-vector designs: relaxed eigenvector solution, unit-modulus
projection, the closed-form large-surface limit, and a random baseline."""

from __future__ import annotations

import numpy as np

from .channels import ChannelTriple, general_upa_vector
from .effective import ReflectionVector


def canonical_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase so its largest-magnitude entry is real
    and nonnegative (first occurrence wins on ties). Eigen and singular
    vectors are only defined up to such a phase; this pins one
    representative so repeated runs agree bit-for-bit."""
    idx = int(np.argmax(np.abs(vec)))
    pivot = vec[idx]
    if pivot == 0:
        return vec.copy()
    return vec * (np.abs(pivot) / pivot)


def relaxed_reflection(gram: np.ndarray) -> ReflectionVector:
    """Norm-constrained optimum of v^H G v: sqrt(m) times the top unit
    eigenvector of the Hermitian PSD matrix G, phase-canonicalized.

    Maximizes the reflected-path channel power among all v with
    ||v||^2 = m; entries are generally not unit modulus.
    """
    gram = np.asarray(gram)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise ValueError("gram must be square")
    m = gram.shape[0]
    if m == 0:
        raise ValueError("gram must be nonempty")
    herm_err = np.max(np.abs(gram - gram.conj().T))
    scale = max(float(np.max(np.abs(gram))), 1.0)
    if herm_err > 1e-8 * scale:
        raise ValueError("gram must be Hermitian")
    _, vecs = np.linalg.eigh(gram)
    top = canonical_phase(vecs[:, -1])
    return ReflectionVector(entries=np.sqrt(m) * top, kind="relaxed")


def project_reflection(v: ReflectionVector) -> ReflectionVector:
    """Entrywise nearest unit-modulus vector: keep phases, drop magnitudes.
    Zero entries carry no phase information and map to 1."""
    return ReflectionVector(
        entries=np.exp(1j * np.angle(v.entries)), kind="unit_modulus")


def asymptotic_reflection(triple: ChannelTriple) -> ReflectionVector:
    """Closed-form reflection from the strongest path of each surface link.

    As the surface grows, the top eigenvector of the cascade Gram matrix
    converges to the elementwise product of the surface-side steering vector
    of the surface-to-RX link and the conjugated surface-side steering vector
    of the TX-to-surface link. Scaling by m makes every entry unit modulus.
    Needs only two angle pairs, not the full cascade estimate.
    """
    irs = triple.h_ir.tx_geometry
    if irs != triple.h_ti.rx_geometry:
        raise ValueError("surface geometry differs between the two reflected links")
    if triple.h_ir.paths.n_paths < 1 or triple.h_ti.paths.n_paths < 1:
        raise ValueError("links carry no path metadata")
    p_ir = triple.h_ir.paths
    p_ti = triple.h_ti.paths
    a_ir = general_upa_vector(
        irs,
        np.sin(p_ir.tx_azimuth[0]) * np.sin(p_ir.tx_elevation[0]),
        np.cos(p_ir.tx_elevation[0]),
    )
    a_ti = general_upa_vector(
        irs,
        np.sin(p_ti.rx_azimuth[0]) * np.sin(p_ti.rx_elevation[0]),
        np.cos(p_ti.rx_elevation[0]),
    )
    entries = irs.count * a_ir * a_ti.conj()
    return ReflectionVector(entries=entries, kind="unit_modulus")


def random_reflection(m: int, rng: np.random.Generator) -> ReflectionVector:
    """Independent uniform phases on every element."""
    if m < 1:
        raise ValueError("m must be positive")
    phases = rng.uniform(0.0, 2.0 * np.pi, m)
    return ReflectionVector(entries=np.exp(1j * phases), kind="unit_modulus")
