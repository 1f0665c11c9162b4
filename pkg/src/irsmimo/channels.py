"""Geometric mmWave channel synthesis for an IRS-aided point-to-point MIMO link.

Three links are modeled: transmitter to receiver (direct, heavily blocked),
transmitter to reflecting surface, and reflecting surface to receiver. Every
terminal is a uniform planar array; each link is a finite sum of planar-wave
paths with lognormal-shadowed log-distance path loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LOS = "los"
NLOS = "nlos"

_TWO_PI = 2.0 * np.pi


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class UpaGeometry:
    """Uniform planar array layout.

    Elements sit on a horizontal_count x vertical_count grid with uniform
    spacing (in wavelengths) along both axes. Flattened element index is
    horizontal-major: index = x_h * vertical_count + x_v.
    """

    horizontal_count: int
    vertical_count: int
    spacing_over_wavelength: float = 0.5

    def __post_init__(self):
        if self.horizontal_count < 1 or self.vertical_count < 1:
            raise ValueError("array axis counts must be positive")
        if self.spacing_over_wavelength <= 0:
            raise ValueError("element spacing must be positive")

    @property
    def count(self) -> int:
        return self.horizontal_count * self.vertical_count


def squarest_geometry(count: int, spacing_over_wavelength: float = 0.5) -> UpaGeometry:
    """Factor an element count into the most square grid available.

    The horizontal axis gets the larger factor, e.g. 16 -> 4x4, 64 -> 8x8,
    8 -> 4x2. Prime counts degenerate to a uniform linear array.
    """
    if count < 1:
        raise ValueError("element count must be positive")
    v = math.isqrt(count)
    while count % v:
        v -= 1
    return UpaGeometry(count // v, v, spacing_over_wavelength)


def steering_vector(geometry: UpaGeometry, azimuth: float, elevation: float) -> np.ndarray:
    """Unit-norm array response of a UPA toward (azimuth, elevation).

    Entry for grid position (x_h, x_v) is
        exp(j*phi) / sqrt(count),
        phi = 2*pi*spacing*(x_h*sin(az)*sin(el) + x_v*cos(el)),
    flattened horizontal-major. Azimuth is measured in the horizontal plane,
    elevation from the vertical axis, both in radians.
    """
    return general_upa_vector(
        geometry,
        math.sin(azimuth) * math.sin(elevation),
        math.cos(elevation),
    )


def general_upa_vector(geometry: UpaGeometry, f: float, g: float) -> np.ndarray:
    """UPA response with direction cosines given directly.

    f scales the horizontal index and g the vertical index; steering_vector is
    the special case f = sin(az)sin(el), g = cos(el). Differences of direction
    cosines (|f|, |g| up to 2) are valid inputs, which is what elementwise
    products of steering vectors produce.
    """
    xh = np.arange(geometry.horizontal_count)
    xv = np.arange(geometry.vertical_count)
    phase = _TWO_PI * geometry.spacing_over_wavelength * (
        f * xh[:, None] + g * xv[None, :]
    )
    return np.exp(1j * phase).ravel() / math.sqrt(geometry.count)


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path loss PL_dB = alpha + 10*beta*log10(d_m) + eps,
    with lognormal shadowing eps ~ N(0, sigma_db^2)."""

    alpha_db: float
    beta: float
    sigma_db: float


LOS_PATH_LOSS = PathLossParams(alpha_db=61.4, beta=2.0, sigma_db=5.8)
NLOS_PATH_LOSS = PathLossParams(alpha_db=72.0, beta=2.92, sigma_db=8.7)


def sample_path_loss(
    kind: str,
    distance_m: float,
    penetration_db: float,
    rng: np.random.Generator,
    los_params: PathLossParams = LOS_PATH_LOSS,
    nlos_params: PathLossParams = NLOS_PATH_LOSS,
) -> float:
    """Draw one realized path loss in dB, shadowing included.

    kind selects the LOS or NLOS parameter set; penetration_db is added on
    top (blockage for the direct link, zero elsewhere).
    """
    if kind == LOS:
        p = los_params
    elif kind == NLOS:
        p = nlos_params
    else:
        raise ValueError(f"unknown path kind {kind!r}")
    if distance_m <= 0:
        raise ValueError("distance must be positive")
    shadow = p.sigma_db * rng.standard_normal()
    return p.alpha_db + 10.0 * p.beta * math.log10(distance_m) + shadow + penetration_db


@dataclass(frozen=True)
class PathParameters:
    """Per-path parameters of one link, sorted by descending |gain|.

    All arrays share length n_paths. Angles are radians; azimuth in [-pi, pi),
    elevation in [0, pi]. path_loss_db holds each path's realized loss
    (shadowing and penetration included); is_los marks which paths were drawn
    from the LOS parameter set.
    """

    gains: np.ndarray
    rx_azimuth: np.ndarray
    rx_elevation: np.ndarray
    tx_azimuth: np.ndarray
    tx_elevation: np.ndarray
    is_los: np.ndarray
    path_loss_db: np.ndarray

    def __post_init__(self):
        n = len(self.gains)
        for name in ("gains", "rx_azimuth", "rx_elevation", "tx_azimuth",
                     "tx_elevation", "is_los", "path_loss_db"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},), got {arr.shape}")
            object.__setattr__(self, name, _readonly(arr))
        mags = np.abs(self.gains)
        if np.any(mags[:-1] < mags[1:] - 1e-12 * (mags.max() if n else 0.0)):
            raise ValueError("paths must be sorted by descending gain magnitude")

    @property
    def n_paths(self) -> int:
        return len(self.gains)


@dataclass(frozen=True)
class LinkChannel:
    """One narrowband MIMO link: its matrix plus the geometry that built it.

    matrix is rx_geometry.count x tx_geometry.count and equals the sum of
    gain * a_rx * a_tx^H over the stored paths. path_loss_db is the realized
    loss of the strongest path.
    """

    matrix: np.ndarray
    paths: PathParameters
    rx_geometry: UpaGeometry
    tx_geometry: UpaGeometry
    distance_m: float
    path_loss_db: float

    def __post_init__(self):
        expect = (self.rx_geometry.count, self.tx_geometry.count)
        if self.matrix.shape != expect:
            raise ValueError(f"matrix shape {self.matrix.shape} does not match geometry {expect}")
        if self.distance_m <= 0:
            raise ValueError("distance must be positive")
        object.__setattr__(self, "matrix", _readonly(self.matrix))

    @property
    def n_rx(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_tx(self) -> int:
        return self.matrix.shape[1]


def link_from_paths(
    rx_geometry: UpaGeometry,
    tx_geometry: UpaGeometry,
    paths: PathParameters,
    distance_m: float,
) -> LinkChannel:
    """Assemble the link matrix sum_s gain_s a_rx(s) a_tx(s)^H from path data."""
    if paths.n_paths == 0:
        raise ValueError("a link needs at least one path")
    a_rx = np.stack(
        [steering_vector(rx_geometry, az, el)
         for az, el in zip(paths.rx_azimuth, paths.rx_elevation)],
        axis=1,
    )
    a_tx = np.stack(
        [steering_vector(tx_geometry, az, el)
         for az, el in zip(paths.tx_azimuth, paths.tx_elevation)],
        axis=1,
    )
    matrix = (a_rx * paths.gains) @ a_tx.conj().T
    return LinkChannel(
        matrix=matrix,
        paths=paths,
        rx_geometry=rx_geometry,
        tx_geometry=tx_geometry,
        distance_m=distance_m,
        path_loss_db=float(paths.path_loss_db[0]),
    )


def sample_link_channel(
    rx_geometry: UpaGeometry,
    tx_geometry: UpaGeometry,
    n_path: int,
    distance_m: float,
    penetration_db: float,
    los_first_path: bool,
    rng: np.random.Generator,
    los_params: PathLossParams = LOS_PATH_LOSS,
    nlos_params: PathLossParams = NLOS_PATH_LOSS,
) -> LinkChannel:
    """Draw one link realization.

    Angles are uniform (azimuth over [-pi, pi), elevation over [0, pi]); each
    path gain is complex normal with variance
        (n_rx * n_tx / n_path) * 10^(-PL_dB/10)
    where PL_dB is that path's realized loss. With los_first_path the first
    drawn path uses the LOS loss parameters, the rest NLOS; otherwise all
    paths are NLOS. Paths are stored sorted by descending |gain|.
    """
    if n_path < 1:
        raise ValueError("n_path must be at least 1")
    rx_az = rng.uniform(-np.pi, np.pi, n_path)
    rx_el = rng.uniform(0.0, np.pi, n_path)
    tx_az = rng.uniform(-np.pi, np.pi, n_path)
    tx_el = rng.uniform(0.0, np.pi, n_path)

    is_los = np.zeros(n_path, dtype=bool)
    if los_first_path:
        is_los[0] = True
    pl_db = np.array([
        sample_path_loss(LOS if los else NLOS, distance_m, penetration_db, rng,
                         los_params, nlos_params)
        for los in is_los
    ])

    var = (rx_geometry.count * tx_geometry.count / n_path) * 10.0 ** (-0.1 * pl_db)
    gains = np.sqrt(var / 2.0) * (
        rng.standard_normal(n_path) + 1j * rng.standard_normal(n_path)
    )

    order = np.argsort(-np.abs(gains), kind="stable")
    paths = PathParameters(
        gains=gains[order],
        rx_azimuth=rx_az[order],
        rx_elevation=rx_el[order],
        tx_azimuth=tx_az[order],
        tx_elevation=tx_el[order],
        is_los=is_los[order],
        path_loss_db=pl_db[order],
    )
    return link_from_paths(rx_geometry, tx_geometry, paths, distance_m)


@dataclass(frozen=True)
class SystemDims:
    """Antenna, reflecting-element, RF-chain, and stream counts."""

    n_t: int
    n_r: int
    m: int
    n_t_rf: int
    n_r_rf: int
    n_s: int

    def __post_init__(self):
        for name in ("n_t", "n_r", "m", "n_t_rf", "n_r_rf", "n_s"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_t_rf > self.n_t:
            raise ValueError("n_t_rf cannot exceed n_t")
        if self.n_r_rf > self.n_r:
            raise ValueError("n_r_rf cannot exceed n_r")
        if self.n_s > min(self.n_t_rf, self.n_r_rf):
            raise ValueError("n_s cannot exceed either RF chain count")


@dataclass(frozen=True)
class ArrayGeometries:
    """UPA layouts for the three terminals."""

    tx: UpaGeometry
    rx: UpaGeometry
    irs: UpaGeometry

    @staticmethod
    def from_dims(dims: SystemDims, spacing_over_wavelength: float = 0.5) -> "ArrayGeometries":
        return ArrayGeometries(
            tx=squarest_geometry(dims.n_t, spacing_over_wavelength),
            rx=squarest_geometry(dims.n_r, spacing_over_wavelength),
            irs=squarest_geometry(dims.m, spacing_over_wavelength),
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """Propagation scenario: path count, terminal distances, blockage.

    Distances (meters) are drawn per realization: d_TI and d_IR uniform over
    their ranges, then d_TR uniform over [d_TI + d_IR - d_tr_slack_m,
    d_TI + d_IR]. The direct link is all-NLOS and additionally attenuated by
    penetration_tr_db; the two reflected links carry one LOS path each.
    """

    n_path: int = 8
    d_ti_range_m: tuple[float, float] = (50.0, 60.0)
    d_ir_range_m: tuple[float, float] = (10.0, 20.0)
    d_tr_slack_m: float = 10.0
    penetration_tr_db: float = 40.1
    los_params: PathLossParams = field(default=LOS_PATH_LOSS)
    nlos_params: PathLossParams = field(default=NLOS_PATH_LOSS)

    def __post_init__(self):
        if self.n_path < 1:
            raise ValueError("n_path must be at least 1")
        for name in ("d_ti_range_m", "d_ir_range_m"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi):
                raise ValueError(f"{name} must satisfy 0 < low <= high")
        if self.d_tr_slack_m < 0:
            raise ValueError("d_tr_slack_m must be nonnegative")


@dataclass(frozen=True)
class ChannelTriple:
    """The three links of one realization: direct (h_tr), TX-to-surface
    (h_ti), surface-to-RX (h_ir)."""

    h_tr: LinkChannel
    h_ti: LinkChannel
    h_ir: LinkChannel

    def __post_init__(self):
        n_r, n_t = self.h_tr.matrix.shape
        m = self.h_ti.matrix.shape[0]
        if self.h_ti.matrix.shape != (m, n_t):
            raise ValueError("h_ti shape inconsistent with h_tr")
        if self.h_ir.matrix.shape != (n_r, m):
            raise ValueError("h_ir shape inconsistent with h_tr/h_ti")

    @property
    def n_t(self) -> int:
        return self.h_tr.matrix.shape[1]

    @property
    def n_r(self) -> int:
        return self.h_tr.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.h_ir.matrix.shape[1]


def sample_channel_triple(
    dims: SystemDims,
    geometries: ArrayGeometries,
    scenario: ScenarioConfig,
    rng: np.random.Generator,
) -> ChannelTriple:
    """Draw distances and the three link channels for one realization.

    Draw order is fixed (distances, then direct, TX-surface, surface-RX
    links) so a given generator state always yields the same triple.
    """
    if geometries.tx.count != dims.n_t:
        raise ValueError("tx geometry does not match n_t")
    if geometries.rx.count != dims.n_r:
        raise ValueError("rx geometry does not match n_r")
    if geometries.irs.count != dims.m:
        raise ValueError("irs geometry does not match m")

    d_ti = rng.uniform(*scenario.d_ti_range_m)
    d_ir = rng.uniform(*scenario.d_ir_range_m)
    total = d_ti + d_ir
    d_tr = rng.uniform(max(total - scenario.d_tr_slack_m, 1e-3), total)

    common = dict(n_path=scenario.n_path, rng=rng,
                  los_params=scenario.los_params, nlos_params=scenario.nlos_params)
    h_tr = sample_link_channel(
        geometries.rx, geometries.tx, distance_m=d_tr,
        penetration_db=scenario.penetration_tr_db, los_first_path=False, **common)
    h_ti = sample_link_channel(
        geometries.irs, geometries.tx, distance_m=d_ti,
        penetration_db=0.0, los_first_path=True, **common)
    h_ir = sample_link_channel(
        geometries.rx, geometries.irs, distance_m=d_ir,
        penetration_db=0.0, los_first_path=True, **common)
    return ChannelTriple(h_tr=h_tr, h_ti=h_ti, h_ir=h_ir)
