"""Frequency-domain self-interference channel: direct leakage plus surface paths.

A :class:`Scene` freezes the whole channel at construction: the direct
antenna-to-antenna leakage coefficient, per-element incident channels ``h``
(transmit antenna to element) and reflected channels ``g`` (element to receive
antenna), one complex value per grid frequency.  The composite transfer
function under a surface configuration is

    H(f) = direct(f) + sum_i h_i(f) * gamma_i(state_i, f) * g_i(f)

with ``gamma_i`` the two-state element reflection from :mod:`ris_sic.cell`.
All SI magnitudes are transfer functions relative to unit transmit amplitude,
so results are in dB; add the transmit power to obtain dBm.

Geometry: the surface lies in the x-z plane centered at the origin, elements
on a regular pitch grid; the two antennas sit at ``y = distance`` separated
along x.  Per-element amplitudes follow the free-space budget of
:func:`ris_sic.budget.fspl_db` at the exact element-antenna distance (the
antennas are inside the Fraunhofer distance of the full surface, so no
plane-wave approximation is made), and phases follow the propagation delay.

Static multipath ("clutter") is modeled as a small set of frozen scattering
taps per path: complex Gaussian gains at random excess delays, scaled to a
configurable power relative to the deterministic path.  At any single
frequency this is complex Gaussian clutter; across frequency it decorrelates
on the physical coherence-bandwidth scale set by the delay spread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .budget import fspl_db
from .cell import UnitCellModel
from .model import FrequencyGrid, RisConfig, SiReading
from .units import C0_M_PER_S, db_to_linear

DEFAULT_CENTER_HZ = 5.385e9


# --------------------------------------------------------------------------
# scene parameters (mirrors the scene-file sections, see ris_sic.sceneio)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Geometry:
    nx: int = 16
    ny: int = 16
    pitch_m: float = C0_M_PER_S / (2.0 * DEFAULT_CENTER_HZ)
    antenna_distance_m: float = 1.0
    antenna_separation_m: float = 0.025
    tx_gain_dbi: float = 3.0
    rx_gain_dbi: float = 3.0
    element_gain_dbi: float = 2.0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"surface dimensions must be >= 1, got {self.nx}x{self.ny}")
        if self.pitch_m <= 0.0:
            raise ValueError(f"pitch_m must be positive, got {self.pitch_m}")
        if self.antenna_distance_m <= 0.0:
            raise ValueError(
                f"antenna_distance_m must be positive, got {self.antenna_distance_m}"
            )
        if self.antenna_separation_m < 0.0:
            raise ValueError("antenna_separation_m must be non-negative")


@dataclass(frozen=True)
class CellParams:
    amplitude_on: float = 0.85
    amplitude_off: float = 0.92
    phase_target_deg: float = 180.0
    quality_factor: float = 8.0


@dataclass(frozen=True)
class Calibration:
    alpha_iso_db: float = 44.0
    p_tx_dbm: float = 10.0


@dataclass(frozen=True)
class ClutterParams:
    relative_power_db: float = -14.0  # -inf disables clutter entirely
    delay_spread_s: float = 30e-9
    taps: int = 8
    seed: int = 101

    def __post_init__(self):
        if self.taps < 1:
            raise ValueError(f"taps must be >= 1, got {self.taps}")
        if self.delay_spread_s < 0.0:
            raise ValueError("delay_spread_s must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def enabled(self) -> bool:
        return self.relative_power_db != float("-inf")


@dataclass(frozen=True)
class GridSpec:
    center_hz: float = DEFAULT_CENTER_HZ
    bandwidth_hz: float = 0.0
    points: int = 1

    def __post_init__(self):
        if self.center_hz <= 0.0:
            raise ValueError(f"center_hz must be positive, got {self.center_hz}")
        if self.bandwidth_hz < 0.0:
            raise ValueError(f"bandwidth_hz must be non-negative, got {self.bandwidth_hz}")
        if self.bandwidth_hz == 0.0 and self.points != 1:
            raise ValueError("narrowband grid (bandwidth 0) must have exactly 1 point")
        if self.bandwidth_hz > 0.0 and self.points < 2:
            raise ValueError("wideband grid needs points >= 2")
        if self.bandwidth_hz >= 2.0 * self.center_hz:
            raise ValueError("bandwidth exceeds the positive-frequency span")

    def to_grid(self) -> FrequencyGrid:
        if self.bandwidth_hz == 0.0:
            return FrequencyGrid.narrowband(self.center_hz)
        return FrequencyGrid.wideband(self.center_hz, self.bandwidth_hz, self.points)


@dataclass(frozen=True)
class SceneParams:
    geometry: Geometry = Geometry()
    cell: CellParams = CellParams()
    calibration: Calibration = Calibration()
    clutter: ClutterParams = ClutterParams()
    grid: GridSpec = GridSpec()


def default_scene_params() -> SceneParams:
    """The shipped desk-scale setup: 16x16 surface, 1 m antenna standoff,
    5.385 GHz carrier, 44 dB baseline isolation."""
    return SceneParams()


# --------------------------------------------------------------------------
# generative channel model (supports off-grid evaluation for snapshots)
# --------------------------------------------------------------------------

def _fspl_amplitude(d_m, f_hz, g_a_dbi: float, g_b_dbi: float):
    """Linear amplitude of one free-space hop; broadcasts over arrays."""
    loss_db = (
        20.0 * np.log10(d_m)
        + 20.0 * np.log10(f_hz)
        + 20.0 * np.log10(4.0 * math.pi / C0_M_PER_S)
        - g_a_dbi
        - g_b_dbi
    )
    return 10.0 ** (-loss_db / 20.0)


def _tap_response(gains: np.ndarray, delays: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Frozen clutter taps evaluated on a frequency axis.

    gains/delays have shape (..., M); the result has shape (..., K) and unit
    average power per path.
    """
    m = gains.shape[-1]
    phase = np.exp(-2j * np.pi * delays[..., :, None] * freqs[None, :])
    return np.einsum("...m,...mk->...k", gains, phase) / math.sqrt(m)


@dataclass(frozen=True)
class _ChannelModel:
    """Deterministic generator for the channel at arbitrary frequencies."""

    d_direct_m: float
    d_tx_m: np.ndarray  # (N,)
    d_rx_m: np.ndarray  # (N,)
    tx_gain_dbi: float
    rx_gain_dbi: float
    element_gain_dbi: float
    alpha_amp: float
    center_hz: float
    direct_scale: float
    clutter_amp: float  # linear, relative to each deterministic path; 0 = off
    direct_tap_gain: np.ndarray  # (M,) complex
    direct_tap_delay: np.ndarray  # (M,)
    h_tap_gain: np.ndarray  # (N, M) complex
    h_tap_delay: np.ndarray  # (N, M)
    g_tap_gain: np.ndarray  # (N, M) complex
    g_tap_delay: np.ndarray  # (N, M)

    def direct_at(self, freqs: np.ndarray) -> np.ndarray:
        det = self.alpha_amp * np.exp(-2j * np.pi * freqs * self.d_direct_m / C0_M_PER_S)
        if self.clutter_amp > 0.0:
            det = det + self.alpha_amp * self.clutter_amp * _tap_response(
                self.direct_tap_gain, self.direct_tap_delay, freqs
            )
        return self.direct_scale * det

    def _hop(self, d_m, freqs, g_near_dbi, tap_gain, tap_delay):
        amp = _fspl_amplitude(d_m[:, None], freqs[None, :], g_near_dbi, self.element_gain_dbi)
        coeff = amp * np.exp(-2j * np.pi * freqs[None, :] * d_m[:, None] / C0_M_PER_S)
        if self.clutter_amp > 0.0:
            ref = _fspl_amplitude(d_m, self.center_hz, g_near_dbi, self.element_gain_dbi)
            coeff = coeff + (self.clutter_amp * ref)[:, None] * _tap_response(
                tap_gain, tap_delay, freqs
            )
        return coeff

    def channels_at(self, freqs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(direct, h, g) sampled at the given frequencies."""
        freqs = np.asarray(freqs, dtype=np.float64)
        direct = self.direct_at(freqs)
        h = self._hop(self.d_tx_m, freqs, self.tx_gain_dbi, self.h_tap_gain, self.h_tap_delay)
        g = self._hop(self.d_rx_m, freqs, self.rx_gain_dbi, self.g_tap_gain, self.g_tap_delay)
        return direct, h, g


# --------------------------------------------------------------------------
# scene
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Scene:
    """Frozen frequency-domain SI channel description.

    ``direct`` has shape (K,), ``h`` and ``g`` have shape (N, K) with
    N = nx*ny elements in row-major element order and K grid frequencies.
    Immutable after construction; all evaluation operations are pure.
    """

    grid: FrequencyGrid
    direct: np.ndarray
    h: np.ndarray
    g: np.ndarray
    cell: UnitCellModel
    nx: int
    ny: int
    params: Optional[SceneParams] = None
    channel_model: Optional[_ChannelModel] = None

    def __post_init__(self):
        k = self.grid.k
        n = self.nx * self.ny
        direct = np.array(self.direct, dtype=np.complex128)
        h = np.array(self.h, dtype=np.complex128)
        g = np.array(self.g, dtype=np.complex128)
        if direct.shape != (k,):
            raise ValueError(f"direct must have shape ({k},), got {direct.shape}")
        if h.shape != (n, k) or g.shape != (n, k):
            raise ValueError(f"h and g must have shape ({n}, {k})")
        for arr, name in ((direct, "direct"), (h, "h"), (g, "g")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny

    @classmethod
    def from_arrays(cls, grid, direct, h, g, cell, nx, ny) -> "Scene":
        """Synthetic scene from explicit channel arrays (tests, what-ifs)."""
        return cls(grid=grid, direct=direct, h=h, g=g, cell=cell, nx=nx, ny=ny)

    def channels_at(self, freqs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Channel coefficients at arbitrary frequencies (built scenes only)."""
        if self.channel_model is None:
            raise ValueError("scene has no generative model; off-grid evaluation unsupported")
        return self.channel_model.channels_at(freqs)


def build_scene(params: SceneParams, seed: Optional[int] = None) -> Scene:
    """Construct the calibrated scene for a parameter set.

    Deterministic given the clutter seed (``seed`` overrides
    ``params.clutter.seed`` when provided).  The direct path is scaled so its
    center-frequency magnitude equals ``-alpha_iso_db`` exactly.
    """
    geo, cal, clu, gridspec = params.geometry, params.calibration, params.clutter, params.grid
    grid = gridspec.to_grid()
    cell = UnitCellModel.with_phase_target(
        center_hz=gridspec.center_hz,
        phase_target_deg=params.cell.phase_target_deg,
        quality_factor=params.cell.quality_factor,
        amplitude_on=params.cell.amplitude_on,
        amplitude_off=params.cell.amplitude_off,
    )

    n = geo.nx * geo.ny
    ix, iy = np.divmod(np.arange(n), geo.ny)
    ex = (ix - (geo.nx - 1) / 2.0) * geo.pitch_m
    ez = (iy - (geo.ny - 1) / 2.0) * geo.pitch_m
    tx = np.array([-geo.antenna_separation_m / 2.0, geo.antenna_distance_m, 0.0])
    rx = np.array([+geo.antenna_separation_m / 2.0, geo.antenna_distance_m, 0.0])
    d_tx = np.sqrt((ex - tx[0]) ** 2 + tx[1] ** 2 + (ez - tx[2]) ** 2)
    d_rx = np.sqrt((ex - rx[0]) ** 2 + rx[1] ** 2 + (ez - rx[2]) ** 2)
    if min(d_tx.min(), d_rx.min()) < 1e-9:
        raise ValueError("degenerate geometry: an antenna coincides with a surface element")

    m = clu.taps
    if clu.enabled:
        rng = np.random.default_rng(np.random.SeedSequence(clu.seed if seed is None else seed))

        def _cgauss(shape):
            return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)

        direct_tap_gain = _cgauss((m,))
        direct_tap_delay = rng.uniform(0.0, clu.delay_spread_s, size=(m,))
        h_tap_gain = _cgauss((n, m))
        h_tap_delay = rng.uniform(0.0, clu.delay_spread_s, size=(n, m))
        g_tap_gain = _cgauss((n, m))
        g_tap_delay = rng.uniform(0.0, clu.delay_spread_s, size=(n, m))
        clutter_amp = db_to_linear(clu.relative_power_db)
    else:
        direct_tap_gain = np.zeros((m,), dtype=np.complex128)
        direct_tap_delay = np.zeros((m,))
        h_tap_gain = np.zeros((n, m), dtype=np.complex128)
        h_tap_delay = np.zeros((n, m))
        g_tap_gain = np.zeros((n, m), dtype=np.complex128)
        g_tap_delay = np.zeros((n, m))
        clutter_amp = 0.0

    model = _ChannelModel(
        d_direct_m=geo.antenna_separation_m,
        d_tx_m=d_tx,
        d_rx_m=d_rx,
        tx_gain_dbi=geo.tx_gain_dbi,
        rx_gain_dbi=geo.rx_gain_dbi,
        element_gain_dbi=geo.element_gain_dbi,
        alpha_amp=db_to_linear(-cal.alpha_iso_db),
        center_hz=gridspec.center_hz,
        direct_scale=1.0,
        clutter_amp=clutter_amp,
        direct_tap_gain=direct_tap_gain,
        direct_tap_delay=direct_tap_delay,
        h_tap_gain=h_tap_gain,
        h_tap_delay=h_tap_delay,
        g_tap_gain=g_tap_gain,
        g_tap_delay=g_tap_delay,
    )
    # Calibrate the direct leakage at the center frequency only.
    uncal = model.direct_at(np.array([gridspec.center_hz]))[0]
    model = replace(model, direct_scale=db_to_linear(-cal.alpha_iso_db) / abs(uncal))

    direct, h, g = model.channels_at(grid.points)
    scene = Scene(
        grid=grid, direct=direct, h=h, g=g, cell=cell,
        nx=geo.nx, ny=geo.ny, params=params, channel_model=model,
    )
    achieved = 20.0 * math.log10(abs(model.direct_at(np.array([gridspec.center_hz]))[0]))
    if abs(achieved + cal.alpha_iso_db) > 0.1:
        raise RuntimeError(
            f"direct-path calibration failed: {achieved:.4f} dB vs target {-cal.alpha_iso_db} dB"
        )
    return scene


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

def transfer_vector(direct, h, g, cell: UnitCellModel, freqs, flat_states) -> np.ndarray:
    """Composite transfer function H at every frequency for one configuration.

    Single canonical kernel: every SI evaluation in the package goes through
    this, so readings from different entry points agree bit-exactly.
    """
    freqs = np.asarray(freqs, dtype=np.float64)
    gamma_on = cell.reflection(True, freqs)
    gamma_off = cell.reflection(False, freqs)
    gam = np.where(flat_states[:, None], gamma_on[None, :], gamma_off[None, :])
    return direct + np.sum(h * gam * g, axis=0)


def _check_dims(scene: Scene, config: RisConfig):
    if (config.nx, config.ny) != (scene.nx, scene.ny):
        raise ValueError(
            f"configuration is {config.nx}x{config.ny} but the scene expects "
            f"{scene.nx}x{scene.ny}"
        )


def composite_transfer(scene: Scene, config: RisConfig, point_index: int) -> complex:
    """H(f_k) = direct + sum_i h_i * gamma_i * g_i at one grid point."""
    _check_dims(scene, config)
    k = scene.grid.k
    if not 0 <= point_index < k:
        raise IndexError(f"point_index {point_index} outside grid of {k} points")
    full = transfer_vector(scene.direct, scene.h, scene.g, scene.cell,
                           scene.grid.points, config.flat())
    return complex(full[point_index])


def si_per_point_db(scene: Scene, config: RisConfig) -> np.ndarray:
    """20*log10 |H| per grid point (amplitude dB; -inf where H vanishes)."""
    _check_dims(scene, config)
    full = transfer_vector(scene.direct, scene.h, scene.g, scene.cell,
                           scene.grid.points, config.flat())
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.abs(full))


def si_magnitude_db(scene: Scene, config: RisConfig) -> SiReading:
    """SI reading for a configuration: worst (highest) point across the grid."""
    return SiReading.from_per_point(si_per_point_db(scene, config))
