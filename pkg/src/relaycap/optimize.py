"""Maximization over the correlation coefficient and the relay position.

Bounds are concave in ``rho``, so :func:`maximize_rho` runs a golden-section
search on ``[0, 1]``.  DF and fixed-``rho`` cut-set rates are quasi-concave in
the relay position, which means a coarse grid followed by one downhill-simplex
refinement finds the global maximum.  The coherent cut-set bound has no such
guarantee, so it is refined from several of the best grid cells.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from . import rates
from .errors import InvalidInputError, SingularityError
from .geometry import ChannelParams, NodeLayout, as_position, distance, snr_vector
from .qcverify import CertResult
from .rates import RateMode
from .search import golden_section_max


class Bound(str, enum.Enum):
    DF_COHERENT = "df_coherent"
    DF_NONCOHERENT = "df_noncoherent"
    DF_FIXED_RHO = "df_fixed_rho"
    CS_FIXED_RHO = "cs_fixed_rho"
    CS_COHERENT = "cs_coherent"
    TWO_HOP = "two_hop"
    RDF = "rdf"


def _bound(bound) -> Bound:
    try:
        return Bound(bound)
    except ValueError:
        raise InvalidInputError(f"unknown relay bound {bound!r}") from None


@dataclass(frozen=True)
class SearchBox:
    """Axis-aligned box of candidate relay positions."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        lo, hi = as_position(self.lower), as_position(self.upper)
        if len(lo) != len(hi):
            raise InvalidInputError("box bounds have different dimensions")
        if not all(a < b for a, b in zip(lo, hi)):
            raise InvalidInputError(f"box needs lower < upper componentwise, got {lo} and {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def diagonal(self) -> float:
        return distance(self.lower, self.upper)

    def axes(self, resolution: Sequence[int]):
        return tuple(np.linspace(a, b, n) for a, b, n in zip(self.lower, self.upper, resolution))


@dataclass
class OptResult:
    """Result of a maximization.

    ``value`` is the objective re-evaluated at ``argmax``.  ``achieved_tol`` is
    the final bracket width (golden section) or simplex diameter.
    """

    argmax: Tuple[float, ...]
    value: float
    evaluations: int
    achieved_tol: float
    extras: dict = field(default_factory=dict)
    basins: list = field(default_factory=list)

    def to_dict(self, bits: bool = False) -> dict:
        conv = rates.to_bits if bits else (lambda x: x)
        out = {
            "argmax": list(self.argmax),
            "value": conv(self.value),
            "unit": "bits" if bits else "nats",
            "evaluations": self.evaluations,
            "achieved_tol": self.achieved_tol,
        }
        if self.extras:
            out["extras"] = dict(self.extras)
        if self.basins:
            out["basins"] = [{"argmax": list(x), "value": conv(v)} for x, v in self.basins]
        return out


# -- correlation coefficient -----------------------------------------------


def maximize_rho(objective, S, mode=RateMode.EXACT, tol=1e-10) -> OptResult:
    """Golden-section search for the best ``rho`` in ``[0, 1]``.

    ``objective`` is ``"cs"``, ``"df"`` or a callable ``(rho, S, mode)``
    returning a :class:`~relaycap.rates.RateReport`.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    if isinstance(objective, str):
        try:
            objective = rates.BOUNDS_WITH_RHO[objective]
        except KeyError:
            raise InvalidInputError(f"no rho-dependent bound named {objective!r}") from None

    def f(rho):
        v = objective(rho, S, mode).value
        if not math.isfinite(v):
            raise FloatingPointError(f"non-finite objective at rho={rho}")
        return v

    rho, value, n, width = golden_section_max(f, 0.0, 1.0, tol=tol)
    return OptResult((rho,), value, n, width)


# -- relay position --------------------------------------------------------


def relay_objective(bound, layout: NodeLayout, params: ChannelParams, mode=RateMode.LOW_SNR,
                    rho: Optional[float] = None, margin: float = 0.0,
                    rho_tol: float = 1e-10) -> Callable:
    """Return ``pos -> (value, extras)`` for ``bound`` with the relay at ``pos``.

    Positions within ``margin`` of the source or a destination raise
    :class:`SingularityError`.
    """
    bound = _bound(bound)
    mode = rates._mode(mode)
    if bound in (Bound.CS_FIXED_RHO, Bound.DF_FIXED_RHO):
        if rho is None:
            raise InvalidInputError(f"{bound.value} needs a rho value")
        rho = rates._check_rho(rho)
    if bound is Bound.RDF:
        if layout.n_destinations != 1:
            raise rates.UnsupportedTopologyError("RDF placement needs exactly one destination")
        if mode is not RateMode.LOW_SNR:
            raise InvalidInputError("RDF is only defined in low_snr mode")
    fixed = layout.nodes()

    def evaluate(pos):
        pos = as_position(pos)
        for k, node in enumerate(fixed):
            if distance(pos, node) <= margin:
                who = "s" if k == 0 else k - 1
                raise SingularityError(f"relay within {margin} of node {who!r}", ("r", who))
        S = snr_vector(layout.with_relay(pos), params)
        if bound is Bound.DF_NONCOHERENT:
            return rates.rate_df(0.0, S, mode).value, {}
        if bound is Bound.DF_FIXED_RHO:
            return rates.rate_df(rho, S, mode).value, {}
        if bound is Bound.CS_FIXED_RHO:
            return rates.rate_cs(rho, S, mode).value, {}
        if bound is Bound.TWO_HOP:
            return rates.rate_2h(S, mode).value, {}
        if bound is Bound.RDF:
            rep = rates.rate_rdf(S)
            return rep.value, {"beta": rep.extras["beta"]}
        inner = maximize_rho("df" if bound is Bound.DF_COHERENT else "cs", S, mode, tol=rho_tol)
        return inner.value, {"rho": inner.argmax[0]}

    return evaluate


@dataclass
class SweepGrid:
    """Objective values on a rectilinear grid; ``nan`` marks invalid cells."""

    axes: Tuple[np.ndarray, ...]
    values: np.ndarray
    label: str = ""

    @property
    def shape(self):
        return self.values.shape

    @property
    def valid(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def position(self, index) -> Tuple[float, ...]:
        return tuple(float(ax[i]) for ax, i in zip(self.axes, index))

    def cells(self):
        """Row-major iteration over ``(position, value or None)``."""
        for index in itertools.product(*(range(len(ax)) for ax in self.axes)):
            v = self.values[index]
            yield self.position(index), (None if np.isnan(v) else float(v))

    def max_cell(self):
        if not self.valid.any():
            raise InvalidInputError("every grid cell is invalid")
        flat = int(np.nanargmax(self.values))
        index = np.unravel_index(flat, self.shape)
        return self.position(index), float(self.values[index])


def _resolution(res, dim) -> Tuple[int, ...]:
    if isinstance(res, (int, np.integer)):
        res = (int(res),) * dim
    res = tuple(int(n) for n in res)
    if len(res) != dim:
        raise InvalidInputError(f"resolution needs {dim} entries, got {len(res)}")
    if any(n < 2 for n in res):
        raise InvalidInputError("resolution must be >= 2 per axis")
    return res


def sweep_function(func, box: SearchBox, resolution, workers: int = 1, label: str = "") -> SweepGrid:
    """Evaluate ``func(pos) -> float`` on a row-major grid over ``box``.

    Cells where ``func`` raises :class:`InvalidInputError` are stored as
    ``nan``.  With ``workers > 1`` cells are evaluated in threads but written
    to preallocated slots, so the result matches a sequential run exactly.
    """
    res = _resolution(resolution, box.dim)
    axes = box.axes(res)
    points = list(itertools.product(*axes))

    def cell(p):
        try:
            return float(func(p))
        except InvalidInputError:
            return math.nan

    out = np.empty(len(points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, v in enumerate(pool.map(cell, points)):
                out[i] = v
    else:
        for i, p in enumerate(points):
            out[i] = cell(p)
    return SweepGrid(axes, out.reshape(res), label)


def default_margin(box: SearchBox) -> float:
    return 1e-3 * box.diagonal


def sweep_grid(bound, layout: NodeLayout, params: ChannelParams, box: SearchBox, resolution,
               mode=RateMode.LOW_SNR, rho=None, margin=None, workers=1) -> SweepGrid:
    """Grid of ``bound`` over relay positions in ``box``."""
    if margin is None:
        margin = default_margin(box)
    obj = relay_objective(bound, layout, params, mode, rho=rho, margin=margin)
    return sweep_function(lambda p: obj(p)[0], box, resolution, workers, label=_bound(bound).value)


def _default_resolution(dim: int) -> Tuple[int, ...]:
    return {1: (101,), 2: (41, 41), 3: (15, 15, 15)}[dim]


def _refine(obj, start, spacing, box: SearchBox, tol, max_evals):
    """Nelder-Mead from ``start``; returns ``(x, value, nfev, diameter)``."""
    lo, hi = np.array(box.lower), np.array(box.upper)
    x0 = np.array(start)
    simplex = [x0]
    for i, h in enumerate(spacing):
        v = x0.copy()
        v[i] = v[i] + h if v[i] + h <= hi[i] else v[i] - h
        simplex.append(v)

    def neg(x):
        try:
            return -obj(tuple(x))[0]
        except InvalidInputError:
            return math.inf

    res = minimize(
        neg, x0, method="Nelder-Mead", bounds=list(zip(lo, hi)),
        options={"initial_simplex": np.array(simplex), "xatol": tol, "fatol": math.inf,
                 "maxfev": max_evals},
    )
    verts = res.final_simplex[0]
    diam = max(float(np.linalg.norm(a - b)) for a, b in itertools.combinations(verts, 2))
    return tuple(float(c) for c in res.x), -float(res.fun), int(res.nfev), diam


def optimize_relay(bound, layout: NodeLayout, params: ChannelParams, box: SearchBox,
                   mode=RateMode.LOW_SNR, tol=1e-6, resolution=None, rho=None, margin=None,
                   top_k=5, max_evals=10_000) -> OptResult:
    """Best relay position for ``bound`` inside ``box``.

    Coarse grid, then Nelder-Mead from the best cell (from the ``top_k`` best
    cells for ``cs_coherent``).  The returned value is never below the best
    grid cell.
    """
    bound = _bound(bound)
    if box.dim != layout.dim:
        raise InvalidInputError(f"box has dimension {box.dim}, layout has {layout.dim}")
    if margin is None:
        margin = default_margin(box)
    res = _resolution(resolution or _default_resolution(box.dim), box.dim)
    obj = relay_objective(bound, layout, params, mode, rho=rho, margin=margin)
    grid = sweep_function(lambda p: obj(p)[0], box, res)
    n_evals = grid.values.size
    if not grid.valid.any():
        raise InvalidInputError("no valid relay position in the search box")
    spacing = [(b - a) / (n - 1) for a, b, n in zip(box.lower, box.upper, res)]

    order = np.argsort(np.where(grid.valid, -grid.values, np.inf), axis=None, kind="stable")
    n_starts = top_k if bound is Bound.CS_COHERENT else 1
    starts = [grid.position(np.unravel_index(i, grid.shape)) for i in order[:n_starts]
              if grid.valid.flat[i]]

    basins = []
    best = None
    for start in starts:
        x, v, nfev, diam = _refine(obj, start, spacing, box, tol, max_evals)
        n_evals += nfev
        basins.append((x, v))
        if best is None or v > best[1]:
            best = (x, v, diam)

    x, v, diam = best
    best_cell, best_cell_value = grid.max_cell()
    if best_cell_value > v:
        x, diam = best_cell, max(spacing)
    value, extras = obj(x)
    n_evals += 1
    if bound is not Bound.CS_COHERENT:
        basins = []
    else:
        basins = _distinct_basins(basins, tol)
    return OptResult(tuple(x), value, n_evals, diam, extras, basins)


def _distinct_basins(found, tol):
    out = []
    for x, v in sorted(found, key=lambda t: -t[1]):
        if all(distance(x, y) > max(10 * tol, 1e-6) for y, _ in out):
            out.append((x, v))
    return out


# -- superlevel-set probe --------------------------------------------------


def _directions(dim, n_random, seed):
    dirs = [tuple(int(i == k) for i in range(dim)) for k in range(dim)]
    if dim >= 2:
        for a, b in itertools.combinations(range(dim), 2):
            for sign in (1, -1):
                d = [0] * dim
                d[a], d[b] = 1, sign
                dirs.append(tuple(d))
    rng = np.random.default_rng(seed)
    tries = 0
    while dim >= 2 and n_random > 0 and tries < 1000:
        tries += 1
        d = tuple(int(c) for c in rng.integers(-3, 4, size=dim))
        if not any(d) or math.gcd(*d) != 1 or d[next(i for i, c in enumerate(d) if c)] < 0:
            continue
        if d not in dirs:
            dirs.append(d)
            n_random -= 1
    return dirs


def _grid_lines(shape, direction):
    shape = np.array(shape)
    step = np.array(direction)
    for start in itertools.product(*(range(n) for n in shape)):
        start = np.array(start)
        prev = start - step
        if np.all(prev >= 0) and np.all(prev < shape):
            continue
        line = []
        idx = start
        while np.all(idx >= 0) and np.all(idx < shape):
            line.append(tuple(int(i) for i in idx))
            idx = idx + step
        if len(line) >= 3:
            yield line


def superlevel_convexity_probe(grid: SweepGrid, level: float, n_random_directions: int = 6,
                               seed: int = 0) -> CertResult:
    """Check that ``{value >= level}`` is one contiguous run on every grid line.

    Lines follow the axes, the diagonals and ``n_random_directions`` random
    lattice directions.  Invalid cells are skipped.  A failure records the
    first ``(inside, outside, inside)`` triple found.
    """
    dim = len(grid.shape)
    lines_checked = 0
    violations = []
    for direction in _directions(dim, n_random_directions, seed):
        for line in _grid_lines(grid.shape, direction):
            vals = [(idx, grid.values[idx]) for idx in line if not np.isnan(grid.values[idx])]
            lines_checked += 1
            inside = [k for k, (_, v) in enumerate(vals) if v >= level]
            if len(inside) < 2:
                continue
            for k in range(inside[0] + 1, inside[-1]):
                if vals[k][1] < level:
                    triple = [vals[inside[0]], vals[k], vals[inside[-1]]]
                    violations.append((
                        tuple(grid.position(i) for i, _ in triple),
                        "superlevel_gap",
                        tuple(float(v) for _, v in triple),
                    ))
                    return CertResult("fail", lines_checked, violations)
    return CertResult("pass", lines_checked, violations)
