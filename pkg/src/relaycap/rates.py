"""Capacity bounds for the Gaussian multicast relay channel.

All values are in nats per channel use.  Every bound is available in two
modes: ``exact`` evaluates ``C(x) = log(1 + x) / 2`` and ``low_snr`` replaces
it by its linearization ``x / 2``.  One mode applies to every link of a bound;
mixing is not possible through this API.

Destinations are indexed from 0.  Each bound returns a :class:`RateReport`
that keeps the per-destination cut terms so callers can see which cut binds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError, UnsupportedTopologyError
from .geometry import SnrVector

NATS_PER_BIT = math.log(2.0)


class RateMode(str, enum.Enum):
    EXACT = "exact"
    LOW_SNR = "low_snr"


def _mode(mode) -> RateMode:
    try:
        return RateMode(mode)
    except ValueError:
        raise InvalidInputError(f"unknown rate mode {mode!r}") from None


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise InvalidInputError(f"rho must lie in [0, 1], got {rho}")
    return rho


def capacity(snr: float, mode=RateMode.EXACT) -> float:
    """Link capacity ``log(1 + snr)/2``, or ``snr/2`` in low-SNR mode."""
    if not snr >= 0.0:
        raise InvalidInputError(f"snr must be >= 0, got {snr}")
    if _mode(mode) is RateMode.LOW_SNR:
        return 0.5 * snr
    return 0.5 * math.log1p(snr)


def to_bits(nats: float) -> float:
    return nats / NATS_PER_BIT


# -- per-destination SNR combinations -------------------------------------


def f_j(rho: float, S: SnrVector, j: int) -> float:
    """Broadcast-cut SNR with coherent combining at destination ``j``."""
    rho = _check_rho(rho)
    a, b = S.snr_s[j], S.snr_r[j]
    return a + b + 2.0 * rho * math.sqrt(a * b)


def g_j(rho: float, S: SnrVector, j: int) -> float:
    """Multiple-access-side cut-set term at destination ``j``."""
    rho = _check_rho(rho)
    return (1.0 - rho * rho) * (S.snr_s[j] + S.snr_sr)


def g_star_j(rho: float, S: SnrVector, j: int = 0) -> float:
    """Relay decoding term of DF; identical for every destination."""
    rho = _check_rho(rho)
    return (1.0 - rho * rho) * S.snr_sr


def h_j(S: SnrVector, j: int) -> float:
    """Effective SNR of quantize-forward with Gaussian quantization."""
    a, b, c = S.snr_s[j], S.snr_r[j], S.snr_sr
    return a + b * c / (a + b + c + 1.0)


# -- reports ---------------------------------------------------------------


@dataclass(frozen=True)
class RateReport:
    """A bound value with its per-destination cut breakdown.

    ``per_dest`` holds ``(j, first_term, second_term)``; single-cut bounds put
    ``math.inf`` in the second slot.  ``labels`` names the two slots and
    ``bottleneck`` is ``(j, label)`` of the binding term, ties resolved toward
    the lowest ``j`` and then the first slot.
    """

    bound: str
    value: float
    per_dest: Tuple[Tuple[int, float, float], ...]
    bottleneck: Tuple[int, str]
    labels: Tuple[str, Optional[str]]
    mode: RateMode
    rho_used: Optional[float] = None
    extras: dict = field(default_factory=dict)

    @property
    def bits(self) -> float:
        return to_bits(self.value)

    def to_dict(self, bits: bool = False) -> dict:
        conv = to_bits if bits else (lambda x: x)

        def term(x):
            return None if math.isinf(x) else conv(x)

        out = {
            "bound": self.bound,
            "mode": self.mode.value,
            "unit": "bits" if bits else "nats",
            "value": conv(self.value),
            "rho_used": self.rho_used,
            "bottleneck": {"destination": self.bottleneck[0], "cut": self.bottleneck[1]},
            "per_destination": [
                {"destination": j, self.labels[0]: term(t1)}
                | ({self.labels[1]: term(t2)} if self.labels[1] else {})
                for j, t1, t2 in self.per_dest
            ],
        }
        if self.extras:
            out["extras"] = dict(self.extras)
        return out


def _report(bound, terms, labels, mode, rho=None, extras=None) -> RateReport:
    best = None
    for j, t1, t2 in terms:
        for slot, t in ((0, t1), (1, t2)):
            if best is None or t < best[0]:
                best = (t, j, slot)
    value, j, slot = best
    return RateReport(
        bound=bound,
        value=value,
        per_dest=tuple(terms),
        bottleneck=(j, labels[slot]),
        labels=labels,
        mode=mode,
        rho_used=rho,
        extras=extras or {},
    )


def rate_cs(rho: float, S: SnrVector, mode=RateMode.EXACT) -> RateReport:
    """Cut-set bound at a fixed source/relay correlation ``rho``."""
    mode = _mode(mode)
    rho = _check_rho(rho)
    terms = [
        (j, capacity(f_j(rho, S, j), mode), capacity(g_j(rho, S, j), mode))
        for j in range(S.n)
    ]
    return _report("cs", terms, ("broadcast", "multiple_access"), mode, rho)


def rate_df(rho: float, S: SnrVector, mode=RateMode.EXACT) -> RateReport:
    """Decode-forward rate at a fixed correlation ``rho``."""
    mode = _mode(mode)
    rho = _check_rho(rho)
    relay_term = capacity(g_star_j(rho, S), mode)
    terms = [(j, capacity(f_j(rho, S, j), mode), relay_term) for j in range(S.n)]
    return _report("df", terms, ("broadcast", "relay_decode"), mode, rho)


def rate_dt(S: SnrVector, mode=RateMode.EXACT) -> RateReport:
    """Direct transmission with the relay silent."""
    mode = _mode(mode)
    terms = [(j, capacity(S.snr_s[j], mode), math.inf) for j in range(S.n)]
    return _report("dt", terms, ("direct", None), mode)


def rate_qf(S: SnrVector, mode=RateMode.EXACT) -> RateReport:
    """Quantize-forward rate with Gaussian inputs and optimized quantizer noise."""
    mode = _mode(mode)
    terms = [(j, capacity(h_j(S, j), mode), math.inf) for j in range(S.n)]
    return _report("qf", terms, ("quantize_forward", None), mode)


def rate_2h(S: SnrVector, mode=RateMode.LOW_SNR) -> RateReport:
    """Two-hop rate: every destination decodes from the relay only."""
    mode = _mode(mode)
    hop1 = capacity(S.snr_sr, mode)
    terms = [(j, hop1, capacity(S.snr_r[j], mode)) for j in range(S.n)]
    return _report("2h", terms, ("source_hop", "relay_hop"), mode)


def rdf_objective(beta: float, S: SnrVector) -> float:
    """Low-SNR routing DF rate for a fixed split ``beta`` of the source power."""
    if S.n != 1:
        raise UnsupportedTopologyError(f"RDF is defined for one destination, got {S.n}")
    if not 0.0 <= beta <= 1.0:
        raise InvalidInputError(f"beta must lie in [0, 1], got {beta}")
    routed = min(S.snr_r[0], beta * S.snr_sr)
    return 0.5 * (routed + (1.0 - beta) * S.snr_s[0])


def rdf_best_beta(S: SnrVector) -> float:
    """Maximizing split of the piecewise-linear RDF objective.

    Increasing ``beta`` pays ``SNR_sr - SNR_s1`` per unit until the relay hop
    saturates at ``beta = SNR_r1 / SNR_sr``, then costs ``SNR_s1``.
    """
    if S.n != 1:
        raise UnsupportedTopologyError(f"RDF is defined for one destination, got {S.n}")
    if S.snr_sr <= 0.0 or S.snr_sr < S.snr_s[0]:
        return 0.0
    return min(1.0, S.snr_r[0] / S.snr_sr)


def rate_rdf(S: SnrVector, beta: Optional[float] = None, mode=RateMode.LOW_SNR) -> RateReport:
    """Routing DF rate for ``N = 1``; ``beta=None`` picks the optimal split."""
    if _mode(mode) is not RateMode.LOW_SNR:
        raise InvalidInputError("RDF is only defined in low_snr mode")
    if S.n != 1:
        raise UnsupportedTopologyError(f"RDF is defined for one destination, got {S.n}")
    if beta is None:
        beta = rdf_best_beta(S)
    value = rdf_objective(beta, S)
    return _report(
        "rdf", [(0, value, math.inf)], ("routed", None), RateMode.LOW_SNR,
        extras={"beta": beta},
    )


# -- covariance parameterization of the cut-set bound ----------------------


@dataclass(frozen=True)
class CovMatrix2:
    """Covariance of ``(X_s, X_r)`` with the diagonal fixed to the powers."""

    q11: float
    q22: float
    q12: float

    def __post_init__(self):
        if self.q11 < 0.0 or self.q22 < 0.0:
            raise InvalidInputError("covariance diagonal must be non-negative")
        slack = 1e-12 * max(1.0, self.q11 * self.q22)
        if self.q12 * self.q12 > self.q11 * self.q22 + slack:
            raise InvalidInputError(
                f"covariance not positive semidefinite: q12^2={self.q12**2} > q11*q22={self.q11 * self.q22}"
            )

    @classmethod
    def from_rho(cls, p_s: float, p_r: float, rho: float) -> "CovMatrix2":
        return cls(p_s, p_r, rho * math.sqrt(p_s * p_r))

    @property
    def rho(self) -> float:
        denom = math.sqrt(self.q11 * self.q22)
        return 0.0 if denom == 0.0 else min(1.0, max(-1.0, self.q12 / denom))

    def as_array(self) -> np.ndarray:
        return np.array([[self.q11, self.q12], [self.q12, self.q22]])


def assemble_cov(q: CovMatrix2, a_sj: float, a_rj: float, a_sr: float) -> np.ndarray:
    """Joint covariance of ``(Y_r, Y_j, X_r)`` for unit-variance receiver noise."""
    a_tilde = np.array([[a_sr, 0.0], [a_sj, a_rj], [0.0, 1.0]])
    return a_tilde @ q.as_array() @ a_tilde.T + np.diag([1.0, 1.0, 0.0])


def rate_cs_cov(
    q: CovMatrix2,
    a_s: Sequence[float],
    a_r: Sequence[float],
    a_sr: float,
    mode=RateMode.EXACT,
) -> RateReport:
    """Cut-set bound written in terms of the input covariance ``q``.

    The broadcast cut is ``log(a^T Q a + 1)/2`` and the multiple-access cut is
    ``log(det Q_(Y_r, Y_j, X_r) / P_r)/2``.  In low-SNR mode the SNR inside
    each logarithm is taken instead.
    """
    mode = _mode(mode)
    if q.q22 == 0.0:
        raise ZeroDivisionError("relay power P_r must be positive in the covariance form")
    a_s = np.atleast_1d(np.asarray(a_s, dtype=float))
    a_r = np.atleast_1d(np.asarray(a_r, dtype=float))
    if a_s.shape != a_r.shape:
        raise InvalidInputError("a_s and a_r must have the same length")
    qx = q.as_array()
    terms = []
    for j, (asj, arj) in enumerate(zip(a_s, a_r)):
        a = np.array([asj, arj])
        bc_snr = max(0.0, float(a @ qx @ a))
        mac_snr = max(0.0, float(np.linalg.det(assemble_cov(q, asj, arj, a_sr))) / q.q22 - 1.0)
        terms.append((j, capacity(bc_snr, mode), capacity(mac_snr, mode)))
    return _report("cs_cov", terms, ("broadcast", "multiple_access"), mode, q.rho)


BOUNDS_WITH_RHO = {"cs": rate_cs, "df": rate_df}
BOUNDS_WITHOUT_RHO: dict[str, Callable[..., RateReport]] = {
    "dt": rate_dt,
    "qf": rate_qf,
    "2h": rate_2h,
    "rdf": rate_rdf,
}
