"""Flux control of the ancilla transmon: flux -> E_J -> omega_a -> J_n, and its inverse."""

import math
from dataclasses import dataclass, replace

from .star import effective_coupling


class CouplingRangeError(ValueError):
    """Requested coupling is not reachable; ``interval`` holds the achievable (lo, hi)."""

    def __init__(self, message, interval):
        super().__init__(f"{message}; achievable interval {interval}")
        self.interval = interval


@dataclass(frozen=True)
class TransmonParams:
    ej_max: float
    ec: float
    flux: float = 0.0
    flux_quantum: float = 1.0

    def __post_init__(self):
        if not (self.ej_max > 0 and self.ec > 0 and self.flux_quantum > 0):
            raise ValueError("ej_max, ec and flux_quantum must be positive")
        if not math.isfinite(self.flux):
            raise ValueError("flux must be finite")

    def at_flux(self, flux):
        return replace(self, flux=flux)


def josephson_energy(params):
    return params.ej_max * abs(math.cos(math.pi * params.flux / params.flux_quantum))


def qubit_frequency(params):
    """Leading-order transmon frequency sqrt(8 E_J E_C) (no -E_C correction)."""
    return math.sqrt(8.0 * josephson_energy(params) * params.ec)


def coupling_at_flux(params, n, f, omega_r, flux=None):
    if flux is not None:
        params = params.at_flux(flux)
    return effective_coupling(n, f, qubit_frequency(params) - omega_r)


def _crossing_flux(params, omega_r):
    """Flux where omega_a = omega_r, or None if omega_a(0) <= omega_r."""
    if qubit_frequency(params.at_flux(0.0)) <= omega_r:
        return None
    # omega_a^2 = 8 E_C E_J,max cos(pi x)  on x = flux / flux_quantum in [0, 1/2]
    ratio = omega_r**2 / (8.0 * params.ec * params.ej_max)
    return params.flux_quantum * math.acos(ratio) / math.pi


def achievable_range(params, n, f, omega_r, sign):
    """Closed/open interval of couplings of the given sign reachable for flux in [0, Phi0/2].

    Returns ``(lo, hi, flux_lo, flux_hi)``, with J monotone between the flux ends,
    or None if that sign cannot be reached.
    """
    half = 0.5 * params.flux_quantum
    cross = _crossing_flux(params, omega_r)
    if sign < 0:
        if cross is None:
            return None
        a, b = 0.0, cross
    else:
        a = 0.0 if cross is None else cross
        b = half
        if a >= b:
            return None
    ja = coupling_at_flux(params, n, f, omega_r, a)
    jb = coupling_at_flux(params, n, f, omega_r, b)
    # J jumps from -f/sqrt(n) to +f/sqrt(n) at the crossing; use one-sided limits
    if cross is not None:
        if sign < 0:
            jb = -f / math.sqrt(n)
        else:
            ja = f / math.sqrt(n)
    return min(ja, jb), max(ja, jb), a, b


def flux_for_coupling(target_j, n, f, omega_r, params):
    """Flux in [0, Phi0/2] giving coupling ``target_j``, by bisection on the monotone branch.

    The sign of ``target_j`` selects the branch: J < 0 needs omega_a >= omega_r,
    J > 0 needs omega_a < omega_r.
    """
    if f <= 0.0:
        if target_j == 0.0:
            return 0.0
        raise CouplingRangeError("no coupling without ancilla-resonator coupling f", (0.0, 0.0))
    sign = -1 if target_j < 0 else 1
    rng = achievable_range(params, n, f, omega_r, sign)
    if rng is None:
        other = achievable_range(params, n, f, omega_r, -sign)
        raise CouplingRangeError(
            f"sign of target {target_j} unreachable", other[:2] if other else (0.0, 0.0)
        )
    lo_j, hi_j, a, b = rng
    if not lo_j <= target_j <= hi_j:
        raise CouplingRangeError(f"target {target_j} outside reachable couplings", (lo_j, hi_j))

    def g(x):
        return coupling_at_flux(params, n, f, omega_r, x) - target_j

    ga = g(a)
    if ga == 0.0:
        return a
    if sign > 0 and a > 0.0:
        ga = f / math.sqrt(n) - target_j
    # bisect to float resolution
    while True:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0) == (ga > 0):
            a, ga = mid, gm
        else:
            b = mid
    return a if abs(g(a)) <= abs(g(b)) else b
