"""Numerical certificates for concavity and quasi-concavity claims.

Three kinds of evidence are produced:

* bordered-Hessian minor signs from central finite differences, a sufficient
  condition for quasi-concavity on an open convex domain;
* definition-based sampling tests, ``f(mix) >= min(f(x1), f(x2))`` for
  quasi-concavity and ``f(mix) >= lam f(x1) + (1 - lam) f(x2)`` for
  concavity, on random pairs;
* the concavity of ``log det Q - log det Q[idx, idx]`` over positive-definite
  matrices.

Every test is deterministic in ``(seed, trials)``: trial ``i`` draws from a
PCG64 stream seeded with ``(seed, i)``, so trials may run in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from . import rates
from .errors import InvalidInputError
from .geometry import ChannelParams, NodeLayout, SnrVector, distance, snr_vector
from .rates import RateMode
from .search import golden_section_max

DEFAULT_LOWER = 1e-2
INDETERMINATE = 1e-12


@dataclass
class CertResult:
    """Outcome of a certificate.

    ``verdict`` is ``"pass"``, ``"fail"`` or ``"indeterminate"``; it is
    ``"pass"`` exactly when ``violations`` is empty.  Each violation is a
    ``(points, quantity, value)`` triple.  For minor tests a fail means the
    sign pattern does not hold, which does not by itself refute
    quasi-concavity.
    """

    verdict: str
    trials: int
    violations: list = field(default_factory=list)
    minor_signs: Optional[list] = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def summary(self) -> str:
        s = f"{self.verdict} ({self.trials} trials, {len(self.violations)} violations)"
        if self.violations:
            *pts, what, val = self.violations[0]
            s += f"; first: {what}={_plain(val)!r} at {_plain(pts[-1])!r}"
        return s


def _plain(obj):
    """numpy scalars and arrays to Python floats and tuples, for printing."""
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return tuple(_plain(v) for v in obj)
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _merge(results: Dict[str, CertResult]) -> CertResult:
    violations = []
    verdict = "pass"
    for name, r in results.items():
        violations.extend((name,) + tuple(v) for v in r.violations)
        if r.verdict == "fail":
            verdict = "fail"
        elif r.verdict == "indeterminate" and verdict == "pass":
            verdict = "indeterminate"
    return CertResult(verdict, sum(r.trials for r in results.values()), violations,
                      details=results)


# -- finite differences ----------------------------------------------------


def _steps(x: np.ndarray, step) -> np.ndarray:
    if step is None:
        return 1e-4 * np.maximum(1.0, np.abs(x))
    step = np.broadcast_to(np.asarray(step, dtype=float), x.shape).copy()
    if np.any(step <= 0):
        raise InvalidInputError("finite-difference step must be positive")
    return step


def _check_domain(x, h, domain):
    if domain is None:
        return
    for xi, hi, (lo, up) in zip(x, h, domain):
        if xi - 2 * hi < lo or xi + 2 * hi > up:
            raise InvalidInputError(f"point {x} is within 2 steps of the domain boundary")


def gradient_fd(f, x, step=None, domain=None) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = _steps(x, step)
    _check_domain(x, h, domain)
    g = np.empty(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h[i]
        g[i] = (f(x + e) - f(x - e)) / (2 * h[i])
    return g


def hessian_fd(f, x, step=None, domain=None) -> np.ndarray:
    """Central second differences, symmetrized as ``(H + H.T) / 2``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = _steps(x, step)
    _check_domain(x, h, domain)
    n = x.size
    f0 = f(x)
    H = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        H[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / h[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            H[i, j] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (
                4 * h[i] * h[j]
            )
            H[j, i] = H[i, j]
    return (H + H.T) / 2


def bordered_hessian(f, x, step=None, domain=None) -> np.ndarray:
    """``[[0, grad^T], [grad, H]]`` from central differences."""
    g = gradient_fd(f, x, step, domain)
    H = hessian_fd(f, x, step, domain)
    n = g.size
    B = np.zeros((n + 1, n + 1))
    B[0, 1:] = g
    B[1:, 0] = g
    B[1:, 1:] = H
    return B


def leading_minors(B: np.ndarray):
    """Determinants ``D_k`` of the ``k x k`` leading blocks, ``k = 2..n+1``."""
    B = np.asarray(B, dtype=float)
    return [(k, float(np.linalg.det(B[:k, :k]))) for k in range(2, B.shape[0] + 1)]


def minor_sign_test(B: np.ndarray, threshold: float = INDETERMINATE) -> CertResult:
    """Alternating pattern ``(-1)**k * D_k < 0`` on the bordered Hessian ``B``.

    Minors smaller than ``threshold`` in magnitude make the verdict
    ``"indeterminate"`` rather than pass.
    """
    signs = leading_minors(B)
    violations = []
    verdict = "pass"
    for k, d in signs:
        if abs(d) < threshold:
            violations.append(((k,), "indeterminate_minor", d))
            if verdict == "pass":
                verdict = "indeterminate"
        elif (-1) ** k * d >= 0:
            violations.append(((k,), "wrong_sign_minor", d))
            verdict = "fail"
    return CertResult(verdict, 1, violations, minor_signs=signs)


# -- function library ------------------------------------------------------


@dataclass(frozen=True)
class FuncSpec:
    """A test function with its sampling domain ``[(lo, hi), ...]``."""

    id: str
    arity: int
    domain_box: Tuple[Tuple[float, float], ...]
    constants: dict
    func: Callable[[np.ndarray], float]

    def __call__(self, x) -> float:
        return self.func(np.asarray(x, dtype=float))


LEMMA6_IDS = ("ab", "ab_over_sum_k", "k1_over_a_plus_sqrt", "neg_one_minus_b", "coherent_sum")


def function_spec(id: str, constants: Optional[dict] = None) -> FuncSpec:
    """Build one of the named test functions.

    The five quasi-concave building blocks take ``(a, b)`` or ``(a, b, c)``;
    ``one_minus_b`` is the un-negated fourth block, which is quasi-convex.
    """
    c = {"k": 1.0, "k1": 1.0, "k2": 1.0}
    c.update(constants or {})
    lo, hi = DEFAULT_LOWER, 10.0
    box2 = ((lo, hi), (lo, hi))
    # b plays the role of rho^2 for the fourth block
    box_b_unit = ((lo, hi), (lo, 1.0 - lo))
    k, k1, k2 = c["k"], c["k1"], c["k2"]
    if min(k, k1, k2) <= 0:
        raise InvalidInputError("constants k, k1, k2 must be positive")
    table = {
        "ab": (2, box2, lambda x: x[0] * x[1]),
        "ab_over_sum_k": (2, box2, lambda x: x[0] * x[1] / (x[0] + x[1] + k)),
        "k1_over_a_plus_sqrt": (2, box2, lambda x: k1 / x[0] + 2 * math.sqrt(k2 * x[1] / x[0])),
        "neg_one_minus_b": (2, box_b_unit, lambda x: -(1 - x[1]) * (k1 + k2 / x[0])),
        "one_minus_b": (2, box_b_unit, lambda x: (1 - x[1]) * (k1 + k2 / x[0])),
        "coherent_sum": (3, ((lo, hi),) * 3, lambda x: x[0] + x[1] + 2 * math.sqrt(x[0] * x[1] * x[2])),
        # (SNR_sj, SNR_rj, rho^2)
        "f_j": (3, ((lo, hi), (lo, hi), (0.0, 1.0)),
                lambda x: x[0] + x[1] + 2 * math.sqrt(x[2] * x[0] * x[1])),
        # (rho^2, SNR_sj, SNR_sr)
        "g_j": (3, ((0.0, 1.0), (lo, hi), (lo, hi)), lambda x: (1 - x[0]) * (x[1] + x[2])),
        # (rho^2, SNR_sr)
        "g_star_j": (2, ((0.0, 1.0), (lo, hi)), lambda x: (1 - x[0]) * x[1]),
        # (SNR_rj, SNR_sr) with SNR_sj = k - 1
        "h_j": (2, box2, lambda x: (k - 1) + x[0] * x[1] / (x[0] + x[1] + k)),
    }
    if id not in table:
        raise InvalidInputError(f"unknown function id {id!r}")
    arity, box, func = table[id]
    return FuncSpec(id, arity, box, c, func)


def printed_bordered_hessian(id: str, x, constants: Optional[dict] = None) -> np.ndarray:
    """Closed-form bordered Hessians of the five quasi-concave building blocks.

    For ``ab`` the matrix carries a scale ``c`` (``x[2]``, default 1) in its
    off-diagonal entries, exactly as it is usually printed; its sign pattern
    equals that of ``ab`` itself.
    """
    cst = {"k": 1.0, "k1": 1.0, "k2": 1.0}
    cst.update(constants or {})
    k, k1, k2 = cst["k"], cst["k1"], cst["k2"]
    x = list(map(float, x))
    a, b = x[0], x[1]
    if id == "ab":
        c = x[2] if len(x) > 2 else 1.0
        return np.array([[0, b * c, a * c], [b * c, 0, c], [a * c, c, 0]], dtype=float)
    if id == "ab_over_sum_k":
        s = a + b + k
        off = (2 * a * b + s * k) / s**3
        return np.array([
            [0, b * (b + k) / s**2, a * (a + k) / s**2],
            [b * (b + k) / s**2, -2 * b * (b + k) / s**3, off],
            [a * (a + k) / s**2, off, -2 * a * (a + k) / s**3],
        ])
    if id == "k1_over_a_plus_sqrt":
        r = math.sqrt(k2 * a * b)
        fa = -(k1 + r) / a**2
        fb = math.sqrt(k2 / (a * b))
        fab = -math.sqrt(k2) / (2 * a**1.5 * math.sqrt(b))
        return np.array([
            [0, fa, fb],
            [fa, (4 * k1 + 3 * r) / (2 * a**3), fab],
            [fb, fab, -math.sqrt(k2) / (2 * b**1.5 * math.sqrt(a))],
        ])
    if id == "neg_one_minus_b":
        fa = (1 - b) * k2 / a**2
        fb = k1 + k2 / a
        return np.array([
            [0, fa, fb],
            [fa, -2 * (1 - b) * k2 / a**3, -k2 / a**2],
            [fb, -k2 / a**2, 0],
        ])
    if id == "coherent_sum":
        c = x[2]
        return np.array([
            [0, 1 + math.sqrt(b * c / a), 1 + math.sqrt(a * c / b), math.sqrt(a * b / c)],
            [1 + math.sqrt(b * c / a), -math.sqrt(b * c) / (2 * a**1.5),
             0.5 * math.sqrt(c / (a * b)), 0.5 * math.sqrt(b / (a * c))],
            [1 + math.sqrt(a * c / b), 0.5 * math.sqrt(c / (a * b)),
             -math.sqrt(a * c) / (2 * b**1.5), 0.5 * math.sqrt(a / (b * c))],
            [math.sqrt(a * b / c), 0.5 * math.sqrt(b / (a * c)),
             0.5 * math.sqrt(a / (b * c)), -math.sqrt(a * b) / (2 * c**1.5)],
        ])
    raise InvalidInputError(f"no closed-form bordered Hessian for {id!r}")


def _trial_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng((int(seed), int(i)))


def _uniform(rng, box) -> np.ndarray:
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    return lo + (hi - lo) * rng.random(lo.size)


def _interior_box(box, margin_rel=1e-3):
    """Shrink every interval so finite-difference stencils stay inside."""
    out = []
    for lo, hi in box:
        pad = max(margin_rel * (hi - lo), 4e-4 * max(1.0, abs(lo), abs(hi)))
        out.append((lo + pad, hi - pad))
    return tuple(out)


def lemma6_certify(id: str, constants: Optional[dict] = None, trials: int = 1000, seed: int = 0,
                   domain_box=None, step=None) -> CertResult:
    """Bordered-Hessian sign pattern at ``trials`` uniform points of the domain."""
    if id not in LEMMA6_IDS and id != "one_minus_b":
        raise InvalidInputError(f"{id!r} is not one of {LEMMA6_IDS}")
    spec = function_spec(id, constants)
    box = tuple(domain_box) if domain_box is not None else spec.domain_box
    sample_box = _interior_box(box)
    violations = []
    verdicts = set()
    for i in range(trials):
        x = _uniform(_trial_rng(seed, i), sample_box)
        r = minor_sign_test(bordered_hessian(spec, x, step, box))
        verdicts.add(r.verdict)
        if not r.passed:
            violations.append((tuple(x), f"minor_pattern_{r.verdict}", r.minor_signs))
    verdict = "fail" if "fail" in verdicts else "indeterminate" if violations else "pass"
    return CertResult(verdict, trials, violations)


# -- definition-based sampling --------------------------------------------


def _sample_test(kind, f, domain_box, trials, seed, tol, mix=None) -> CertResult:
    box = tuple(tuple(map(float, b)) for b in domain_box)
    mix = np.ones(len(box), dtype=bool) if mix is None else np.asarray(mix, dtype=bool)
    if mix.size != len(box):
        raise InvalidInputError("mix mask length must match the domain dimension")
    violations = []
    for i in range(trials):
        rng = _trial_rng(seed, i)
        x1 = _uniform(rng, box)
        x2 = np.where(mix, _uniform(rng, box), x1)
        lam = rng.random()
        xm = np.where(mix, lam * x1 + (1 - lam) * x2, x1)
        f1, f2, fm = f(x1), f(x2), f(xm)
        if kind == "quasiconcave":
            floor = min(f1, f2)
        else:
            floor = lam * f1 + (1 - lam) * f2
        if fm < floor - tol:
            violations.append(((tuple(x1), tuple(x2), lam), f"{kind}_gap", floor - fm))
    return CertResult("fail" if violations else "pass", trials, violations)


def quasiconcavity_sample_test(f, domain_box, trials=1000, seed=0, tol=1e-9, mix=None) -> CertResult:
    """Sampled check of ``f(lam x1 + (1-lam) x2) >= min(f(x1), f(x2)) - tol``.

    Coordinates with ``mix[i] == False`` are drawn once per trial and shared by
    both points, which tests the claim at a fixed value of those coordinates.
    """
    return _sample_test("quasiconcave", f, domain_box, trials, seed, tol, mix)


def concavity_sample_test(f, domain_box, trials=1000, seed=0, tol=1e-9, mix=None) -> CertResult:
    """Sampled check of ``f(lam x1 + (1-lam) x2) >= lam f(x1) + (1-lam) f(x2) - tol``."""
    return _sample_test("concave", f, domain_box, trials, seed, tol, mix)


def _random_pd(rng, dim) -> np.ndarray:
    A = rng.normal(size=(dim, dim))
    return A @ A.T + 0.1 * np.eye(dim)


def logdet_ratio(Q: np.ndarray, minor: Sequence[int]) -> float:
    """``log det Q - log det Q[minor, minor]``; an empty minor has determinant 1."""
    _, full = np.linalg.slogdet(Q)
    if len(minor) == 0:
        return float(full)
    idx = np.asarray(minor)
    _, part = np.linalg.slogdet(Q[np.ix_(idx, idx)])
    return float(full - part)


def logdet_ratio_concavity(dim: int, trials: int = 1000, seed: int = 0, minor=None,
                           negate: bool = False, tol: float = 1e-9) -> CertResult:
    """Concavity of :func:`logdet_ratio` along random segments of PD matrices."""
    if not 1 <= dim <= 4:
        raise InvalidInputError("dim must be between 1 and 4")
    if minor is None:
        minor = () if dim == 1 else (0,)
    minor = tuple(int(i) for i in minor)
    if any(not 0 <= i < dim for i in minor) or len(set(minor)) != len(minor) or len(minor) >= dim + 1:
        raise InvalidInputError(f"invalid minor index set {minor}")
    sign = -1.0 if negate else 1.0
    violations = []
    for i in range(trials):
        rng = _trial_rng(seed, i)
        Q1, Q2 = _random_pd(rng, dim), _random_pd(rng, dim)
        lam = rng.random()
        f1 = sign * logdet_ratio(Q1, minor)
        f2 = sign * logdet_ratio(Q2, minor)
        fm = sign * logdet_ratio(lam * Q1 + (1 - lam) * Q2, minor)
        floor = lam * f1 + (1 - lam) * f2
        if fm < floor - tol:
            violations.append(((Q1.tolist(), Q2.tolist(), lam), "concave_gap", floor - fm))
    return CertResult("fail" if violations else "pass", trials, violations)


# -- claims about the rate expressions -------------------------------------


def _tent(x):
    return min(x, 2.0 - x)


def lemma5_composition_checks(trials: int = 1000, seed: int = 0, tol: float = 1e-9) -> CertResult:
    """Sampling checks of the compositions that preserve quasi-concavity."""
    tent_box = ((0.0, 2.0),)
    ab = function_spec("ab")

    def affine(x):
        return 3.0 * ab(x) - 7.0

    def min_of_tents(x):
        return min(_tent(x[0]), _tent(x[1]), _tent(0.5 * (x[0] + x[1]) + 0.3))

    def capacity_of_fj(x):
        # x = (SNR_sj, SNR_rj) at rho = 0.7
        S = SnrVector(0.0, [x[0]], [x[1]])
        return rates.capacity(rates.f_j(0.7, S, 0))

    def sup_over_rho(x):
        # h(S) = max over rho of a function quasi-concave in (rho^2, S)
        S = SnrVector(x[0], [x[1]], [x[2]])
        return golden_section_max(lambda r: rates.rate_df(r, S).value, 0.0, 1.0, tol=1e-12)[1]

    src, dest = np.array([0.0, 0.0]), np.array([1.0, 0.5])

    def f_of_distance(x):
        # f(g(r), rho^2) with g(r) = ||r - dest||^2 convex and f non-increasing in g
        r, rho2 = x[:2], x[2]
        d_alpha = float(np.sum((r - dest) ** 2))
        k_s = 1.0 / float(np.sum((src - dest) ** 2))
        return k_s + 1.0 / d_alpha + 2.0 * math.sqrt(rho2 * k_s / d_alpha)

    checks = {
        "affine_rescale": (affine, function_spec("ab").domain_box),
        "minimum": (min_of_tents, tent_box * 2),
        "nondecreasing_outer": (capacity_of_fj, ((0.0, 10.0), (0.0, 10.0))),
        "supremum": (sup_over_rho, ((0.0, 10.0),) * 3),
        "convex_inner": (f_of_distance, ((-2.0, 3.0), (-2.0, 3.0), (0.0, 1.0))),
    }
    results = {
        name: quasiconcavity_sample_test(f, box, trials, seed, tol)
        for name, (f, box) in checks.items()
    }
    return _merge(results)


def lemma1_eigen_check(trials: int = 100, seed: int = 0, rel_tol: float = 1e-4,
                       det_tol: float = 1e-6) -> CertResult:
    """Finite-difference Hessian of ``f_j`` in ``(SNR_sj, SNR_rj)``.

    Expected: one zero eigenvalue (``|det| < det_tol * ||H||^2``) and trace
    ``-(rho/2)(a^2 + b^2)/(ab)^(3/2)``.
    """
    violations = []
    for i in range(trials):
        rng = _trial_rng(seed, i)
        a, b = 0.1 + 9.9 * rng.random(2)
        rho = 0.1 + 0.9 * rng.random()

        def f(x):
            return rates.f_j(rho, SnrVector(0.0, [x[0]], [x[1]]), 0)

        H = hessian_fd(f, [a, b])
        expected = -(rho / 2) * (a * a + b * b) / (a * b) ** 1.5
        trace = float(np.trace(H))
        if abs(trace - expected) > rel_tol * abs(expected):
            violations.append(((a, b, rho), "trace_rel_error", abs(trace - expected) / abs(expected)))
        det = float(np.linalg.det(H))
        if abs(det) >= det_tol * float(np.sum(H * H)):
            violations.append(((a, b, rho), "det", det))
    return CertResult("fail" if violations else "pass", trials, violations)


def cs_equivalence_check(trials: int = 1000, seed: int = 0, tol: float = 1e-9,
                         mode=RateMode.EXACT) -> CertResult:
    """Covariance form of the cut-set bound against the ``(rho, S)`` form."""
    violations = []
    for i in range(trials):
        rng = _trial_rng(seed, i)
        n = int(rng.integers(1, 6))
        p_s, p_r = 0.01 + 9.99 * rng.random(2)
        rho = rng.random()
        a_s = 0.01 + 2.99 * rng.random(n)
        a_r = 0.01 + 2.99 * rng.random(n)
        a_sr = 0.01 + 2.99 * rng.random()
        q = rates.CovMatrix2.from_rho(p_s, p_r, rho)
        cov = rates.rate_cs_cov(q, a_s, a_r, a_sr, mode).value
        S = SnrVector(a_sr**2 * p_s, a_s**2 * p_s, a_r**2 * p_r)
        direct = rates.rate_cs(rho, S, mode).value
        if abs(cov - direct) >= tol:
            violations.append(((n, p_s, p_r, rho), "abs_diff", abs(cov - direct)))
    return CertResult("fail" if violations else "pass", trials, violations)


@dataclass(frozen=True)
class Claim:
    """A sampled claim: ``kind`` is ``quasiconcave`` or ``concave``.

    ``expect`` is ``"pass"`` for claimed properties and ``"fail"`` for known
    counterexamples.
    """

    name: str
    kind: str
    func: Callable[[np.ndarray], float]
    domain_box: tuple
    mix: Optional[tuple] = None
    expect: str = "pass"
    description: str = ""

    def run(self, trials=1000, seed=0, tol=1e-9) -> CertResult:
        test = quasiconcavity_sample_test if self.kind == "quasiconcave" else concavity_sample_test
        return test(self.func, self.domain_box, trials, seed, tol, self.mix)


# Square geometry used by the position claims; matches the square_2d preset.
_SQUARE_SOURCE = (0.0, 0.0)
_SQUARE_DESTS = ((10.0, 0.0), (0.0, 10.0), (10.0, 10.0), (-10.0, 10.0), (-10.0, 0.0))
_SQUARE_BOX = ((-12.0, 12.0), (-12.0, 12.0))
_LINE_BOX = ((-0.5, 1.5),)


def _rate_claims(n: int = 2) -> Dict[str, Claim]:
    m = 2 * n + 1
    snr_box = ((0.0, 10.0),) * m
    rho_box = ((0.0, 1.0),)
    claims = {}
    for mode in RateMode:
        tag = "" if mode is RateMode.EXACT else "_low_snr"
        for name, fn in (("cs", rates.rate_cs), ("df", rates.rate_df)):
            def at(x, fn=fn, mode=mode):
                return fn(x[0], SnrVector.from_array(x[1:]), mode).value

            def at_rho2(x, fn=fn, mode=mode):
                return fn(math.sqrt(x[0]), SnrVector.from_array(x[1:]), mode).value

            def at_power(x, fn=fn, mode=mode):
                # x = (rho^2, P_s, P_r, gains...) with gains held fixed per trial
                g = x[3:]
                S = SnrVector(g[0] ** 2 * x[1], g[1 : 1 + n] ** 2 * x[1], g[1 + n :] ** 2 * x[2])
                return fn(math.sqrt(x[0]), S, mode).value

            claims[f"{name}_concave_rho{tag}"] = Claim(
                f"{name}_concave_rho{tag}", "concave", at, rho_box + snr_box,
                (True,) + (False,) * m)
            claims[f"{name}_concave_S{tag}"] = Claim(
                f"{name}_concave_S{tag}", "concave", at, rho_box + snr_box,
                (False,) + (True,) * m)
            claims[f"{name}_qc_rho2_S{tag}"] = Claim(
                f"{name}_qc_rho2_S{tag}", "quasiconcave", at_rho2, rho_box + snr_box)
            claims[f"{name}_qc_rho2_P{tag}"] = Claim(
                f"{name}_qc_rho2_P{tag}", "quasiconcave", at_power,
                rho_box + ((0.0, 10.0),) * 2 + ((0.1, 3.0),) * m,
                (True, True, True) + (False,) * m)

        def qf(x, mode=mode):
            return rates.rate_qf(SnrVector.from_array(x), mode).value

        # SNR_s entries fixed, SNR_sr and SNR_r entries mixed
        claims[f"qf_qc_relay_snrs{tag}"] = Claim(
            f"qf_qc_relay_snrs{tag}", "quasiconcave", qf, snr_box,
            (True,) + (False,) * n + (True,) * n)

        def dt(x, mode=mode):
            return rates.rate_dt(SnrVector.from_array(x), mode).value

        claims[f"dt_concave_S{tag}"] = Claim(f"dt_concave_S{tag}", "concave", dt, snr_box)

        for geo, (src, dests, box) in {
            "line": ((0.0,), ((1.0,),), _LINE_BOX),
            "square": (_SQUARE_SOURCE, _SQUARE_DESTS, _SQUARE_BOX),
        }.items():
            layout = NodeLayout(src, dests)
            params = ChannelParams()

            def cs_r(x, layout=layout, params=params, mode=mode):
                S = snr_vector(layout.with_relay(x[1:]), params)
                return rates.rate_cs(x[0], S, mode).value

            def df_rho2_r(x, layout=layout, params=params, mode=mode):
                S = snr_vector(layout.with_relay(x[1:]), params)
                return rates.rate_df(math.sqrt(x[0]), S, mode).value

            def df_best_r(x, layout=layout, params=params, mode=mode):
                S = snr_vector(layout.with_relay(x), params)
                return golden_section_max(lambda r: rates.rate_df(r, S, mode).value,
                                          0.0, 1.0, tol=1e-12)[1]

            def fj_rho2_r(x, layout=layout, params=params):
                S = snr_vector(layout.with_relay(x[1:]), params)
                return rates.f_j(math.sqrt(x[0]), S, 0)

            d = len(box)
            claims[f"cs_qc_r_fixed_rho_{geo}{tag}"] = Claim(
                f"cs_qc_r_fixed_rho_{geo}{tag}", "quasiconcave", cs_r, rho_box + box,
                (False,) + (True,) * d)
            claims[f"df_qc_rho2_r_{geo}{tag}"] = Claim(
                f"df_qc_rho2_r_{geo}{tag}", "quasiconcave", df_rho2_r, rho_box + box)
            claims[f"df_coherent_qc_r_{geo}{tag}"] = Claim(
                f"df_coherent_qc_r_{geo}{tag}", "quasiconcave", df_best_r, box)
            if mode is RateMode.EXACT:
                claims[f"fj_qc_rho2_r_{geo}"] = Claim(
                    f"fj_qc_rho2_r_{geo}", "quasiconcave", fj_rho2_r, rho_box + box)

    gstar = function_spec("g_star_j")
    claims["gstar_qc_rho2_snr"] = Claim("gstar_qc_rho2_snr", "quasiconcave", gstar, gstar.domain_box)
    gtilde = function_spec("one_minus_b")
    claims["gtilde"] = Claim(
        "gtilde", "quasiconcave", gtilde, ((DEFAULT_LOWER, 10.0), (0.0, 1.0)), expect="fail",
        description="(1 - rho^2)(k1 + k2 / D^alpha) over (D^alpha, rho^2); quasi-convex")
    return claims


CLAIMS: Dict[str, Claim] = _rate_claims()


def theorem_suite(trials: int = 1000, seed: int = 0, tol: float = 1e-9) -> Dict[str, CertResult]:
    """Run every registered claim; keys match :data:`CLAIMS`."""
    return {name: claim.run(trials, seed, tol) for name, claim in CLAIMS.items()}


def suite_ok(results: Dict[str, CertResult]) -> bool:
    """True when every claim matches its expectation (counterexamples must fail)."""
    return all(
        (r.verdict == "fail") if CLAIMS[name].expect == "fail" else r.passed
        for name, r in results.items()
    )


def interior_destination_check(layout: NodeLayout, relay, params: ChannelParams,
                               trials: int = 1000, seed: int = 0, mode=RateMode.LOW_SNR,
                               tol: float = 1e-12) -> CertResult:
    """Add one destination at a random convex combination of the existing ones.

    Pass when the non-coherent DF rate with the relay at ``relay`` does not drop.
    """
    base = rates.rate_df(0.0, snr_vector(layout.with_relay(relay), params), mode).value
    verts = np.array(layout.destinations)
    violations = []
    for i in range(trials):
        rng = _trial_rng(seed, i)
        w = rng.dirichlet(np.ones(len(verts)))
        p = tuple(w @ verts)
        if min(distance(p, q) for q in layout.nodes() + (tuple(relay),)) == 0.0:
            continue
        extended = NodeLayout(layout.source, layout.destinations + (p,), relay)
        v = rates.rate_df(0.0, snr_vector(extended, params), mode).value
        if v < base - tol:
            violations.append((p, "rate_drop", base - v))
    return CertResult("fail" if violations else "pass", trials, violations)
