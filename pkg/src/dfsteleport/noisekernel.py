"""Bath kernels and decoherence factors for Ohmic dephasing environments.

Internal units set ``omega0 = hbar = k_B = 1``; every time argument is the
dimensionless ``omega0 * tau`` appearing on all reported axes.  The spectral
density is Ohmic with exponential cutoff,

    J(w) = gamma * w * exp(-w / lambda_c),

and the time-dependent decay rate of a dephasing wing is

    rate(t) = 4 * int_0^inf J(w) coth(w / 2T) sin(w t) / w  dw,

with ``coth -> 1`` at zero temperature.  Its running integral fixes the
magnitude of the decoherence factors; the accompanying bath-induced phase is

    phase(tau) = 4 * int_0^tau [ int_0^inf J(w) (1 - cos(w t)) / w  dw ] dt.

Zero-temperature Ohmic baths admit closed forms (``rate = 4*gamma*L^2*t /
(1 + L^2 t^2)``, running integral ``2*gamma*ln(1 + L^2 tau^2)``, phase
``4*gamma*(L tau - atan(L tau))``); finite temperature falls back to
quadrature.  Both backends are exposed through a ``method`` switch so each can
oracle-check the other.

The frequency integrals are truncated at ``max(40*lambda_c, 40/t)`` (the Ohmic
envelope makes the discarded tail < 1e-17 relative) and evaluated on composite
Gauss-Legendre panels no wider than half an oscillation period ``pi/t``, then
re-evaluated on doubled panel counts until two passes agree to the requested
relative tolerance.

Everything here is a pure function of immutable parameter records; sweeps over
time grids can be parallelized freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

REL_TOL = 1e-8
_ABS_FLOOR = 1e-14
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class NumericAccuracyError(RuntimeError):
    """Quadrature failed to converge within the refinement budget.

    Carries the best available value in ``estimate`` and the disagreement of
    the last two refinement passes in ``error_estimate``.
    """

    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class NoiseParams:
    """Dephasing-bath description for one wing.

    gamma        dimensionless system-bath coupling strength
    lambda_c     cutoff frequency, in units of omega0
    temperature  bath temperature in units of hbar*omega0/k_B (0 allowed)
    omega0       qubit transition frequency (1 in internal units)
    """

    gamma: float
    lambda_c: float
    temperature: float = 0.0
    omega0: float = 1.0

    def __post_init__(self):
        if not (self.gamma >= 0.0 and np.isfinite(self.gamma)):
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")
        if not (self.lambda_c > 0.0 and np.isfinite(self.lambda_c)):
            raise ValueError(f"lambda_c must be > 0, got {self.lambda_c!r}")
        if not (self.temperature >= 0.0 and np.isfinite(self.temperature)):
            raise ValueError(f"temperature must be >= 0, got {self.temperature!r}")
        if not (self.omega0 > 0.0 and np.isfinite(self.omega0)):
            raise ValueError(f"omega0 must be > 0, got {self.omega0!r}")


@dataclass(frozen=True)
class DecoherenceFactors:
    """Coherence multipliers of both wings at the measurement instant tau.

    ``f`` and ``g`` scale the single-flip coherences and ``a`` the double-flip
    coherence of the sender's two-qubit block; ``b`` scales the receiver's
    single-qubit coherence.  Magnitudes never exceed one, and factors produced
    from one sender bath satisfy |a| = |f|**4 and |f| = |g|.
    """

    f: complex
    g: complex
    a: complex
    b: complex
    tau: float

    def __post_init__(self):
        for name in ("f", "g", "a", "b"):
            z = complex(getattr(self, name))
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                raise ValueError(f"factor {name} is not finite")
            if abs(z) > 1.0 + 1e-9:
                raise ValueError(f"factor {name} has magnitude {abs(z)!r} > 1")
        if self.tau < 0.0:
            raise ValueError("tau must be >= 0")


def spectral_density(params: NoiseParams, omega: np.ndarray | float) -> np.ndarray | float:
    """Ohmic spectral density gamma * w * exp(-w / lambda_c)."""
    w = np.asarray(omega, dtype=float)
    out = params.gamma * w * np.exp(-w / params.lambda_c)
    return out if out.ndim else float(out)


def _coth_over_one(omega: np.ndarray, temperature: float) -> np.ndarray:
    # coth(w/2T); tanh keeps both the w->0 and w->inf ends overflow-free
    if temperature == 0.0:
        return np.ones_like(omega)
    return 1.0 / np.tanh(omega / (2.0 * temperature))


def _panel_integral(fn: Callable[[np.ndarray], np.ndarray], upper: float, n_panels: int) -> float:
    edges = np.linspace(0.0, upper, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.dot(fn(pts), wts))


def _frequency_integral(fn, params: NoiseParams, t: float) -> float:
    """Converged integral of ``fn`` over (0, omega_max) for an Ohmic-enveloped integrand."""
    omega_max = max(40.0 * params.lambda_c, 40.0 / t)
    width = min(np.pi / t, 0.5 * params.lambda_c)
    n = int(np.clip(np.ceil(omega_max / width), 32, 20000))
    previous = _panel_integral(fn, omega_max, n)
    for refinement in (2, 4, 8):
        current = _panel_integral(fn, omega_max, refinement * n)
        err = abs(current - previous)
        if err <= REL_TOL * abs(current) + _ABS_FLOOR:
            return current
        previous = current
    raise NumericAccuracyError(
        f"frequency integral did not converge (last change {err:.3e})",
        estimate=current,
        error_estimate=err,
    )


def _resolve_method(params: NoiseParams, method: str) -> str:
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        return "closed" if params.temperature == 0.0 else "quadrature"
    return method


def decay_rate(params: NoiseParams, t: float, method: str = "auto") -> float:
    """Instantaneous dephasing rate of one wing at time ``t``.

    ``auto`` selects the zero-temperature Ohmic closed form
    4*gamma*L^2*t/(1 + L^2 t^2) when exact, quadrature otherwise.
    """
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0 or params.gamma == 0.0:
        return 0.0
    if _resolve_method(params, method) == "closed":
        if params.temperature != 0.0:
            raise ValueError("closed form is only exact at zero temperature")
        lt2 = (params.lambda_c * t) ** 2
        return 4.0 * params.gamma * params.lambda_c**2 * t / (1.0 + lt2)

    def integrand(w):
        return (
            4.0
            * params.gamma
            * np.exp(-w / params.lambda_c)
            * _coth_over_one(w, params.temperature)
            * np.sin(w * t)
        )

    return _frequency_integral(integrand, params, t)


def cumulative_decay(params: NoiseParams, tau: float, method: str = "auto") -> float:
    """Running integral of ``decay_rate`` from 0 to ``tau``.

    Quadrature swaps the time and frequency integrals, which turns the nested
    integral into the single frequency integral with kernel
    (1 - cos(w*tau))/w; the zero-temperature closed form is
    2*gamma*ln(1 + L^2 tau^2).
    """
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0 or params.gamma == 0.0:
        return 0.0
    if _resolve_method(params, method) == "closed":
        if params.temperature != 0.0:
            raise ValueError("closed form is only exact at zero temperature")
        return 2.0 * params.gamma * np.log1p((params.lambda_c * tau) ** 2)

    def integrand(w):
        # 1 - cos as 2 sin^2 avoids cancellation at small w*tau
        return (
            4.0
            * params.gamma
            * np.exp(-w / params.lambda_c)
            * _coth_over_one(w, params.temperature)
            * 2.0
            * np.sin(0.5 * w * tau) ** 2
            / w
        )

    return _frequency_integral(integrand, params, tau)


def phase_integral(params: NoiseParams, tau: float, method: str = "auto") -> float:
    """Accumulated bath-induced (Lamb-like) phase up to ``tau``.

    The phase kernel carries no temperature dependence, so the Ohmic closed
    form 4*gamma*(L*tau - atan(L*tau)) is exact at any temperature and is what
    ``auto`` uses; the quadrature backend integrates
    4*gamma*exp(-w/L)*(tau - sin(w*tau)/w) for cross-checking.
    """
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0 or params.gamma == 0.0:
        return 0.0
    if method == "auto" or method == "closed":
        x = params.lambda_c * tau
        if x < 1e-3:
            core = x**3 / 3.0 - x**5 / 5.0
        else:
            core = x - np.arctan(x)
        return 4.0 * params.gamma * core
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")

    def integrand(w):
        x = w * tau
        small = x < 1e-4
        with np.errstate(invalid="ignore", divide="ignore"):
            direct = tau - np.sin(x) / w
        series = tau * x**2 / 6.0 * (1.0 - x**2 / 20.0)
        return 4.0 * params.gamma * np.exp(-w / params.lambda_c) * np.where(small, series, direct)

    return _frequency_integral(integrand, params, tau)


def factors_at(alice: NoiseParams, bob: NoiseParams, tau: float, method: str = "auto") -> DecoherenceFactors:
    """Decoherence factors of both wings at the measurement instant ``tau``.

    With ``G`` the sender's cumulative decay, ``P`` the sender's accumulated
    phase and ``H`` the receiver's cumulative decay:

        f = exp(-i*w0*tau - G + i*P)      single-flip coherences
        g = exp(+i*w0*tau - G + i*P)
        a = exp(-2i*w0*tau - 4*G)         double-flip coherence
        b = exp(-i*w0*tau - H)            receiver coherence

    The double-flip exponent accumulates four times the single-flip decay and
    no bath phase; the up-down/down-up coherence it leaves untouched is
    handled in the channel layer.
    """
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    g_alice = cumulative_decay(alice, tau, method=method)
    p_alice = phase_integral(alice, tau, method=method)
    g_bob = cumulative_decay(bob, tau, method=method)
    wa = alice.omega0 * tau
    wb = bob.omega0 * tau
    return DecoherenceFactors(
        f=np.exp(complex(-g_alice, -wa + p_alice)),
        g=np.exp(complex(-g_alice, +wa + p_alice)),
        a=np.exp(complex(-4.0 * g_alice, -2.0 * wa)),
        b=np.exp(complex(-g_bob, -wb)),
        tau=tau,
    )
