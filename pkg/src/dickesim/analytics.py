"""Closed-form error rates, infidelity scalings and feasibility estimates.

The preparation error budget combines three loss channels per ladder step:
spontaneous emission from the detuned intermediate dark state, and photons
leaked through the two superradiant admixtures outside the protected
subspace.  The full (non-asymptotic) rate formulas are implemented; the
familiar limits are exposed as separate convenience evaluators so they can
be tested against the full forms instead of silently assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import PhysicalParams
from .photonics import overlap_hp_closed
from .protocol import effective_rabi, optimal_detuning

SPEED_OF_LIGHT = 2.99792458e8  # m/s


@dataclass(frozen=True)
class ErrorBudget:
    """Per-step loss rates (units of gamma_1d) and the resulting infidelity."""

    m: int
    n_atoms: int
    omega_r: float
    delta_e: float
    rate_psi_e: float
    rate_chi_s: float
    rate_chi_g: float
    t_op: float
    post_selected: bool = False

    def __post_init__(self):
        for name in ("rate_psi_e", "rate_chi_s", "rate_chi_g", "t_op"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total_rate(self) -> float:
        return self.rate_psi_e + self.rate_chi_s + self.rate_chi_g

    @property
    def per_step_infidelity(self) -> float:
        return self.t_op * self.total_rate

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "n_atoms": self.n_atoms,
            "omega_r": self.omega_r,
            "delta_e": self.delta_e,
            "rate_psi_e": self.rate_psi_e,
            "rate_chi_s": self.rate_chi_s,
            "rate_chi_g": self.rate_chi_g,
            "t_op": self.t_op,
            "per_step_infidelity": self.per_step_infidelity,
            "post_selected": self.post_selected,
        }


def error_rates(
    m: int,
    n_atoms: int,
    omega_r: float,
    delta_e: float,
    params: PhysicalParams,
    post_selected: bool = False,
) -> ErrorBudget:
    """Full per-step error budget for climbing rung m.

    rate_psi_e = gamma* m w^2 / (4 (N_m + 1) (delta^2 + gamma*^2)) and the
    superradiant leakage rates carry (gamma* + N gamma_1d) Lorentzians; the
    post-selected variant keeps only the gamma*-proportional parts of the
    latter.  t_op is the pi transfer time of the two-photon transition, so
    the per-step infidelity t_op * (sum of rates) does not depend on omega_r.
    """
    if delta_e == 0:
        raise ValueError("delta_e must be non-zero")
    if m < 1 or m > n_atoms:
        raise ValueError(f"m = {m} outside 1..{n_atoms}")
    g_star = params.gamma_star
    g_1d = params.gamma_1d
    w2 = abs(omega_r) ** 2
    n_m = n_atoms - m + 1

    den_e = delta_e**2 + g_star**2
    rate_psi_e = g_star * m * w2 / (4.0 * (n_m + 1) * den_e)

    g_tot = g_star + n_atoms * g_1d
    den_chi = delta_e**2 + g_tot**2
    prefactor = g_star if post_selected else g_tot
    rate_chi_s = prefactor * m * w2 / (4.0 * n_atoms**2 * den_chi)
    rate_chi_g = prefactor * m * w2 / (4.0 * den_chi) + prefactor * m * w2 / (
        4.0 * n_atoms * den_chi
    )

    t_op = math.pi / effective_rabi(m, n_atoms, omega_r, delta_e)
    return ErrorBudget(
        m=m,
        n_atoms=n_atoms,
        omega_r=abs(omega_r),
        delta_e=delta_e,
        rate_psi_e=rate_psi_e,
        rate_chi_s=rate_chi_s,
        rate_chi_g=rate_chi_g,
        t_op=t_op,
        post_selected=post_selected,
    )


def asymptotic_per_step(delta_e: float, params: PhysicalParams) -> float:
    """Limit form (pi/2)(gamma*/delta + delta/gamma_1d), valid for
    gamma_1d >> delta >> gamma* and N >> m."""
    return 0.5 * math.pi * (
        params.gamma_star / abs(delta_e) + abs(delta_e) / params.gamma_1d
    )


def chi_rate_bare_linewidth(
    m: int, n_atoms: int, omega_r: float, delta_e: float, params: PhysicalParams
) -> float:
    """Superradiant-leakage variant with the bare collective linewidth
    N gamma_1d in the Lorentzian (gamma* dropped); exposed for comparison
    with the dressed-linewidth rate used in the budget."""
    n_gamma = n_atoms * params.gamma_1d
    return (
        n_gamma * m * abs(omega_r) ** 2 / (4.0 * (delta_e**2 + n_gamma**2))
    )


@dataclass(frozen=True)
class InfidelityTotals:
    m_max: int
    n_atoms: int
    delta_opt: float
    one_minus_f1: float
    one_minus_f2: float
    single_mode_overlap: float
    combined_fidelity: float


def total_infidelities(m_max: int, n_atoms: int, params: PhysicalParams) -> InfidelityTotals:
    """Protocol-level scalings: 1-F1 = m_max per-step infidelity at the
    optimal detuning, 1-F2 = m_max^2 gamma*/(N gamma_1d), combined with the
    single-mode overlap into one product fidelity estimate."""
    if m_max < 0 or m_max > n_atoms:
        raise ValueError(f"m_max = {m_max} outside 0..{n_atoms}")
    delta_opt = optimal_detuning(params)
    if m_max == 0:
        return InfidelityTotals(
            m_max=0,
            n_atoms=n_atoms,
            delta_opt=delta_opt,
            one_minus_f1=0.0,
            one_minus_f2=0.0,
            single_mode_overlap=1.0,
            combined_fidelity=1.0,
        )
    budget = error_rates(1, n_atoms, 0.1 * delta_opt, delta_opt, params)
    one_minus_f1 = m_max * budget.per_step_infidelity
    one_minus_f2 = m_max**2 * params.gamma_star / (n_atoms * params.gamma_1d)
    overlap = overlap_hp_closed(m_max, n_atoms).overlap
    combined = max(0.0, 1.0 - one_minus_f1) * max(0.0, 1.0 - one_minus_f2) * overlap
    return InfidelityTotals(
        m_max=m_max,
        n_atoms=n_atoms,
        delta_opt=delta_opt,
        one_minus_f1=one_minus_f1,
        one_minus_f2=one_minus_f2,
        single_mode_overlap=overlap,
        combined_fidelity=combined,
    )


@dataclass(frozen=True)
class WaveguideSpec:
    """Photonic-crystal waveguide and atom numbers for feasibility estimates."""

    group_index: float          # n_g = c / v_g
    mode_area_um2: float        # effective mode area
    lambda0_um: float           # free-space wavelength
    cavity_factor: float        # dimensionless enhancement xi
    refractive_index: float     # n_r, sets lambda_a = lambda0 / n_r
    q_factor: float
    gamma_a: float              # free-space emission rate, rad/s
    alpha: float = 1.0          # gamma* = alpha gamma_a

    def __post_init__(self):
        for name in (
            "group_index",
            "mode_area_um2",
            "lambda0_um",
            "cavity_factor",
            "refractive_index",
            "q_factor",
            "gamma_a",
            "alpha",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def cross_section_um2(self) -> float:
        """Radiative cross-section 3 lambda0^2 / (2 pi)."""
        return 3.0 * self.lambda0_um**2 / (2.0 * math.pi)

    @property
    def lambda_a_um(self) -> float:
        return self.lambda0_um / self.refractive_index

    @property
    def group_velocity(self) -> float:
        return SPEED_OF_LIGHT / self.group_index


# Cs atoms coupled to a SiN alligator waveguide: the reference operating point.
CS_SIN_PRESET = WaveguideSpec(
    group_index=10.0,
    mode_area_um2=0.2,
    lambda0_um=0.894,
    cavity_factor=5.0,
    refractive_index=2.0,
    q_factor=1e6,
    gamma_a=2.0 * math.pi * 5.02e6,
    alpha=1.0,
)


@dataclass(frozen=True)
class PurcellEstimate:
    ratio: float     # gamma_1d / gamma_a
    p1d: float       # ratio / alpha


def purcell_ratio(spec: WaveguideSpec) -> PurcellEstimate:
    """gamma_1d / gamma_a = xi n_g sigma / (2 A_m), and P_1D = ratio / alpha."""
    ratio = (
        spec.cavity_factor
        * spec.group_index
        * spec.cross_section_um2
        / (2.0 * spec.mode_area_um2)
    )
    return PurcellEstimate(ratio=ratio, p1d=ratio / spec.alpha)


@dataclass(frozen=True)
class FeasibilityLimits:
    l_prop_over_lambda_a: float
    n_max_retardation: float
    epsilon_prop: float


def propagation_and_retardation(
    spec: WaveguideSpec,
    n_atoms: int,
    gamma_1d_ratio: float | None = None,
    spacing_lambda_a: float = 0.5,
) -> FeasibilityLimits:
    """Finite-Q propagation length, retardation atom-number bound, and the
    relative perturbation scale of propagation loss.

    L_prop / lambda_a = Q / (2 pi n_g); the retardation bound requires the
    collective rate to stay below the inverse photon transit time across the
    ensemble at the given atomic spacing (default lambda_a / 2), giving
    N_max = sqrt(v_g / (gamma_1d spacing)); epsilon_prop = N lambda_a/L_prop.
    """
    if n_atoms < 1:
        raise ValueError("n_atoms must be positive")
    l_over_lambda = spec.q_factor / (2.0 * math.pi * spec.group_index)
    ratio = gamma_1d_ratio if gamma_1d_ratio is not None else purcell_ratio(spec).ratio
    gamma_1d = ratio * spec.gamma_a  # rad/s
    spacing_m = spacing_lambda_a * spec.lambda_a_um * 1e-6
    n_max = math.sqrt(spec.group_velocity / (gamma_1d * spacing_m))
    eps_prop = n_atoms / l_over_lambda
    return FeasibilityLimits(
        l_prop_over_lambda_a=l_over_lambda,
        n_max_retardation=n_max,
        epsilon_prop=eps_prop,
    )
