"""Multi-photon scattering amplitudes of the superradiant emission burst.

A symmetric state with m register excitations decays into an m-photon
wavepacket whose spectral amplitude is a sum over photon orderings of
products of collectively broadened resonances.  In the low-excitation
(Holstein-Primakoff) limit the amplitude factorizes into identical
Lorentzian single-photon lines of width N gamma_1d / 2.

All amplitudes are reduced: the single-photon coupling constant is absorbed
into the quadrature weights through the waveguide decay rate, so mode sums
become sum(weights * |amplitude|^2) without further prefactors.  The
emission time enters only as a global phase and defaults to zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

MAX_EXACT_PHOTONS = 8
MAX_GRID_PHOTONS = 5


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Quadrature grid over photon detunings delta_omega = omega - omega_a.

    The default grid compactifies the real line with delta = s tan(v),
    s = N gamma_1d / 2, and applies trapezoid weights in v; the Jacobian and
    the mode-density factor gamma_1d / (2 pi) are folded into the weights.
    On this grid the single-photon Lorentzian integrand is constant in v, so
    its norm is exact up to the (tiny) endpoint truncation.
    """

    n_atoms: int
    detunings: np.ndarray
    weights: np.ndarray
    gamma_1d: float = 1.0
    emission_time: float = 0.0
    span_halfwidths: float | None = None  # None marks the compactified grid

    def __post_init__(self):
        det = np.asarray(self.detunings, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if det.shape != wts.shape or det.ndim != 1:
            raise ValueError("detunings and weights must be matching 1-D arrays")
        if np.any(wts <= 0):
            raise ValueError("weights must be positive")
        if not np.allclose(det, -det[::-1], atol=1e-9 * (1 + det.max(initial=0.0))):
            raise ValueError("grid must be symmetric about zero detuning")
        det = det.copy()
        wts = wts.copy()
        det.flags.writeable = False
        wts.flags.writeable = False
        object.__setattr__(self, "detunings", det)
        object.__setattr__(self, "weights", wts)

    @property
    def n_points(self) -> int:
        return self.detunings.size

    def single_photon_norm(self) -> float:
        """sum(w |C|^2) for the collective Lorentzian line; should be 1."""
        line = lorentzian_mode(self.detunings, self.n_atoms, self.gamma_1d)
        return float(np.sum(self.weights * np.abs(line) ** 2))

    def refined(self, factor: int = 2) -> "FrequencyGrid":
        return build_grid(
            self.n_atoms,
            n_points=(self.n_points - 1) * factor + 1,
            gamma_1d=self.gamma_1d,
            emission_time=self.emission_time,
            span_halfwidths=self.span_halfwidths,
        )


def build_grid(
    n_atoms: int,
    n_points: int = 4097,
    gamma_1d: float = 1.0,
    emission_time: float = 0.0,
    span_halfwidths: float | None = None,
) -> FrequencyGrid:
    """Build the default compactified grid, or a uniform one of finite span.

    A finite span_halfwidths produces a plain uniform trapezoid grid over
    +/- span_halfwidths * (N gamma_1d / 2); it truncates the Lorentzian tails
    and is only meant for convergence diagnostics.
    """
    if n_points < 3 or n_points % 2 == 0:
        raise ValueError("n_points must be odd and >= 3")
    scale = 0.5 * n_atoms * gamma_1d
    if span_halfwidths is None:
        v_max = 0.5 * math.pi * (1.0 - 1e-9)
        v = np.linspace(-v_max, v_max, n_points)
        det = scale * np.tan(v)
        jac = scale / np.cos(v) ** 2
        dv = v[1] - v[0]
        trap = np.full(n_points, dv)
        trap[0] = trap[-1] = 0.5 * dv
        weights = (gamma_1d / (2.0 * math.pi)) * jac * trap
    else:
        half = span_halfwidths * scale
        det = np.linspace(-half, half, n_points)
        dd = det[1] - det[0]
        trap = np.full(n_points, dd)
        trap[0] = trap[-1] = 0.5 * dd
        weights = (gamma_1d / (2.0 * math.pi)) * trap
    det = det - det[::-1]  # enforce exact antisymmetry against rounding
    det *= 0.5
    return FrequencyGrid(
        n_atoms=n_atoms,
        detunings=det,
        weights=weights,
        gamma_1d=gamma_1d,
        emission_time=emission_time,
        span_halfwidths=span_halfwidths,
    )


def lorentzian_mode(detunings, n_atoms: int, gamma_1d: float = 1.0) -> np.ndarray:
    """Reduced single-photon line C(dw) = i sqrt(N) / (i dw + N gamma_1d / 2)."""
    d = np.asarray(detunings, dtype=float)
    return 1j * math.sqrt(n_atoms) / (1j * d + 0.5 * n_atoms * gamma_1d)


def _permutation_sum(detunings, n_atoms: int, n_r: np.ndarray, gamma_1d: float) -> np.ndarray:
    """Sum over photon orderings of the product of partial-sum resonances.

    Each ordering contributes prod_r i sqrt(r n_r[r]) / (i sum_{l<=r} dw_l
    + r gamma_1d n_r[r] / 2); n_r is the ladder of collective enhancement
    factors, N - r + 1 for the exact amplitude and N for the linearized one.
    """
    d = np.asarray(detunings, dtype=float)
    m = d.shape[-1]
    r = np.arange(1, m + 1, dtype=float)
    numer = np.prod(1j * np.sqrt(r * n_r))
    half_rates = 0.5 * gamma_1d * r * n_r
    total = np.zeros(d.shape[:-1], dtype=complex)
    for perm in itertools.permutations(range(m)):
        cums = np.cumsum(d[..., perm], axis=-1)
        denom = 1j * cums + half_rates
        total = total + numer / np.prod(denom, axis=-1)
    return total


def amplitude_exact(detunings, n_atoms: int, gamma_1d: float = 1.0) -> np.ndarray:
    """Exact reduced m-photon amplitude (emission-time phase excluded).

    detunings has the photon coordinates on its last axis; m <= 8 because of
    the m! permutation sum.
    """
    d = np.asarray(detunings, dtype=float)
    m = d.shape[-1]
    if m < 1:
        raise ValueError("need at least one photon")
    if m > MAX_EXACT_PHOTONS:
        raise ValueError(f"permutation sum limited to m <= {MAX_EXACT_PHOTONS}")
    if m > n_atoms:
        raise ValueError("cannot emit more photons than atoms")
    n_r = n_atoms - np.arange(1, m + 1, dtype=float) + 1.0
    return _permutation_sum(d, n_atoms, n_r, gamma_1d)


def amplitude_hp(detunings, n_atoms: int, gamma_1d: float = 1.0) -> np.ndarray:
    """Linearized amplitude sqrt(m!) prod_r C(dw_r): a single-mode wavepacket."""
    d = np.asarray(detunings, dtype=float)
    m = d.shape[-1]
    if m < 1:
        raise ValueError("need at least one photon")
    lines = lorentzian_mode(d, n_atoms, gamma_1d)
    return math.sqrt(math.factorial(m)) * np.prod(lines, axis=-1)


def amplitude_exact_linearized(detunings, n_atoms: int, gamma_1d: float = 1.0) -> np.ndarray:
    """Permutation-sum code path with every ladder factor replaced by N.

    Mathematically identical to amplitude_hp; kept as a cross-check of the
    permutation sum.
    """
    d = np.asarray(detunings, dtype=float)
    m = d.shape[-1]
    n_r = np.full(m, float(n_atoms))
    return _permutation_sum(d, n_atoms, n_r, gamma_1d)


def two_photon_reference(delta_1, delta_2, n_atoms: int, gamma_1d: float = 1.0) -> np.ndarray:
    """Explicit two-photon expression with the collective correction factor.

    Written as the linear product times [1 + gamma_1d (N_1 - N_2) /
    (i(dw_1 + dw_2) + gamma_1d N_2)]; algebraically equal to the m = 2
    permutation sum.
    """
    d1 = np.asarray(delta_1, dtype=float)
    d2 = np.asarray(delta_2, dtype=float)
    n1 = float(n_atoms)
    n2 = float(n_atoms - 1)
    base = -math.sqrt(2.0 * n1 * n2) / (
        (1j * d1 + 0.5 * gamma_1d * n1) * (1j * d2 + 0.5 * gamma_1d * n1)
    )
    correction = 1.0 + gamma_1d * (n1 - n2) / (1j * (d1 + d2) + gamma_1d * n2)
    return base * correction


@dataclass(frozen=True)
class OverlapResult:
    overlap: float
    deficit: float  # 1 - overlap


def overlap_hp_closed(m: int, n_atoms: int) -> OverlapResult:
    """Closed-form overlap of the exact and linearized m-photon wavepackets.

    overlap = 2^m prod_{r=1..m} sqrt(N N_r) / (N + N_r).
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m > n_atoms:
        raise ValueError("cannot emit more photons than atoms")
    value = 1.0
    for r in range(1, m + 1):
        n_r = n_atoms - r + 1
        value *= 2.0 * math.sqrt(n_atoms * n_r) / (n_atoms + n_r)
    return OverlapResult(overlap=value, deficit=1.0 - value)


def _product_grid_reduce(grid: FrequencyGrid, m: int, integrand, chunk_size: int = 4):
    """Accumulate sum over grid^m of weights-product times integrand(dets).

    integrand receives a detuning stack of shape (..., m).  The first photon
    coordinate is chunked to bound memory for m >= 3.
    """
    d = grid.detunings
    w = grid.weights
    n = d.size
    if m == 1:
        return np.sum(w * integrand(d[:, None]))
    total = 0.0 + 0.0j
    rest_axes = [d] * (m - 1)
    w_rest = w
    for _ in range(m - 2):
        w_rest = np.multiply.outer(w_rest, w)
    for start in range(0, n, chunk_size):
        stop = min(start + chunk_size, n)
        mesh = np.meshgrid(d[start:stop], *rest_axes, indexing="ij")
        dets = np.stack(mesh, axis=-1)
        vals = integrand(dets)
        weighted = np.tensordot(w[start:stop], vals * w_rest, axes=(0, 0))
        total += np.sum(weighted)
    return total


def overlap_hp_numeric(
    m: int,
    n_atoms: int,
    grid: FrequencyGrid,
    refine_check: bool = False,
    refine_tol: float = 1e-4,
) -> float:
    """Quadrature of sum_q conj(A) A_HP / m! over the m-photon grid.

    The result is real and positive up to quadrature noise.  With
    refine_check=True the value is recomputed on a doubled grid and the
    difference must stay below refine_tol.
    """
    if m < 1 or m > MAX_GRID_PHOTONS:
        raise ValueError(f"grid overlap limited to 1 <= m <= {MAX_GRID_PHOTONS}")
    if m > n_atoms:
        raise ValueError("cannot emit more photons than atoms")

    def integrand(dets):
        return np.conj(amplitude_exact(dets, n_atoms, grid.gamma_1d)) * amplitude_hp(
            dets, n_atoms, grid.gamma_1d
        )

    total = _product_grid_reduce(grid, m, integrand) / math.factorial(m)
    if abs(total.imag) > 1e-6:
        raise RuntimeError(f"overlap quadrature has imaginary part {total.imag:.2e}")
    value = float(total.real)
    if refine_check:
        fine = overlap_hp_numeric(m, n_atoms, grid.refined(), refine_check=False)
        if abs(fine - value) > refine_tol:
            raise ValueError(
                f"grid too coarse: overlap changed by {abs(fine - value):.2e} on refinement"
            )
    return value


def grid_norm_squared(m: int, n_atoms: int, grid: FrequencyGrid, kind: str = "exact") -> float:
    """Sum over grid^m of w^m |A|^2 / m!; equals 1 for a faithful grid."""
    func = amplitude_exact if kind == "exact" else amplitude_hp

    def integrand(dets):
        return np.abs(func(dets, n_atoms, grid.gamma_1d)) ** 2

    total = _product_grid_reduce(grid, m, integrand) / math.factorial(m)
    return float(total.real)


@dataclass(frozen=True, eq=False)
class WavepacketGrid:
    """Spectral amplitude of an m-photon component on a frequency grid.

    For m <= 3 the dense amplitude tensor over grid^m is stored; above that
    only on-demand evaluation through sample() is provided.
    """

    photons: int
    grid: FrequencyGrid
    weight: complex = 1.0
    amplitudes: np.ndarray | None = None
    norm_squared: float | None = None

    def sample(self, detunings) -> np.ndarray:
        phase = np.exp(
            -1j
            * self.grid.emission_time
            * np.sum(np.asarray(detunings, dtype=float), axis=-1)
        )
        return (
            self.weight
            * phase
            * amplitude_exact(detunings, self.grid.n_atoms, self.grid.gamma_1d)
        )


def build_wavepacket(
    m: int,
    n_atoms: int,
    grid: FrequencyGrid,
    weight: complex = 1.0,
    dense_limit: int = 3,
    compute_norm: bool = True,
) -> WavepacketGrid:
    if m < 1:
        raise ValueError("need at least one photon")
    amps = None
    if m <= dense_limit:
        mesh = np.meshgrid(*([grid.detunings] * m), indexing="ij")
        dets = np.stack(mesh, axis=-1)
        amps = amplitude_exact(dets, n_atoms, grid.gamma_1d)
    norm_sq = grid_norm_squared(m, n_atoms, grid) if compute_norm else None
    return WavepacketGrid(
        photons=m, grid=grid, weight=weight, amplitudes=amps, norm_squared=norm_sq
    )


@dataclass(frozen=True)
class SuperpositionOutput:
    components: tuple[WavepacketGrid, ...]
    single_mode_fidelity: float


def superposition_output(target, n_atoms: int, grid: FrequencyGrid, compute_norms: bool = False) -> SuperpositionOutput:
    """Photon-number components of the emitted field for an atomic target.

    Each m > 0 component carries weight d_m; the single-mode fidelity
    estimate is sum_m |d_m|^2 overlap(m, N) with the closed-form overlaps.
    """
    components = []
    fidelity = 0.0
    for m, d in enumerate(target.coefficients):
        fidelity += abs(d) ** 2 * overlap_hp_closed(m, n_atoms).overlap
        if m >= 1 and abs(d) > 0:
            components.append(
                build_wavepacket(
                    m, n_atoms, grid, weight=d, compute_norm=compute_norms
                )
            )
    return SuperpositionOutput(
        components=tuple(components), single_mode_fidelity=fidelity
    )
