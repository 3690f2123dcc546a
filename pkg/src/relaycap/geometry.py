"""Node placement, path-loss gains and the SNR vector.

Nodes are addressed by key: ``"s"`` for the source, ``"r"`` for the relay and
an integer ``j`` (0-based) for destination ``j``.  Every rate formula in
:mod:`relaycap.rates` consumes only the :class:`SnrVector` built here, so the
geometry layer is the single place where distances enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidInputError, SingularityError

NodeKey = Union[str, int]
Position = Tuple[float, ...]

SOURCE = "s"
RELAY = "r"


def as_position(coords) -> Position:
    """Validate ``coords`` as a 1-3 dimensional finite point."""
    if type(coords) is tuple and 1 <= len(coords) <= 3 and all(
        type(c) is float and math.isfinite(c) for c in coords
    ):
        return coords
    arr = np.atleast_1d(np.asarray(coords, dtype=float))
    if arr.ndim != 1 or not 1 <= arr.size <= 3:
        raise InvalidInputError(f"position must have 1 to 3 coordinates, got {coords!r}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"position has non-finite coordinates: {coords!r}")
    return tuple(float(c) for c in arr)


def distance(a, b) -> float:
    """Euclidean distance between two positions of equal dimension."""
    a = as_position(a)
    b = as_position(b)
    if len(a) != len(b):
        raise InvalidInputError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return math.dist(a, b)


@dataclass(frozen=True)
class NodeLayout:
    """Positions of the source, the relay and ``N >= 1`` destinations.

    ``relay`` may be ``None`` for a layout whose relay position is still to be
    chosen (see :func:`relaycap.optimize.optimize_relay`); use
    :meth:`with_relay` to place it.
    """

    source: Position
    destinations: Tuple[Position, ...]
    relay: Position | None = None

    def __post_init__(self):
        object.__setattr__(self, "source", as_position(self.source))
        dests = tuple(as_position(d) for d in self.destinations)
        if not dests:
            raise InvalidInputError("layout needs at least one destination")
        object.__setattr__(self, "destinations", dests)
        if self.relay is not None:
            object.__setattr__(self, "relay", as_position(self.relay))
        dims = {len(self.source)} | {len(d) for d in dests}
        if self.relay is not None:
            dims.add(len(self.relay))
        if len(dims) != 1:
            raise InvalidInputError(f"mixed position dimensions in layout: {sorted(dims)}")
        for j, d in enumerate(dests):
            if distance(d, self.source) == 0.0:
                raise SingularityError(f"destination {j} coincides with the source", ("s", j))
            if self.relay is not None and distance(d, self.relay) == 0.0:
                raise SingularityError(f"destination {j} coincides with the relay", ("r", j))

    @property
    def dim(self) -> int:
        return len(self.source)

    @property
    def n_destinations(self) -> int:
        return len(self.destinations)

    def with_relay(self, relay) -> "NodeLayout":
        relay = as_position(relay)
        if len(relay) != self.dim:
            raise InvalidInputError(f"relay has dimension {len(relay)}, layout has {self.dim}")
        for j, d in enumerate(self.destinations):
            if math.dist(d, relay) == 0.0:
                raise SingularityError(f"destination {j} coincides with the relay", ("r", j))
        # skip re-validating the fixed nodes; only the relay changed
        new = object.__new__(NodeLayout)
        object.__setattr__(new, "source", self.source)
        object.__setattr__(new, "destinations", self.destinations)
        object.__setattr__(new, "relay", relay)
        return new

    def position(self, node: NodeKey) -> Position:
        if node == SOURCE:
            return self.source
        if node == RELAY:
            if self.relay is None:
                raise InvalidInputError("relay position not set")
            return self.relay
        if isinstance(node, (int, np.integer)) and 0 <= node < len(self.destinations):
            return self.destinations[node]
        raise InvalidInputError(f"unknown node {node!r}")

    def nodes(self):
        """Fixed (non-relay) node positions, used for singularity margins."""
        return (self.source,) + self.destinations


@dataclass(frozen=True)
class ChannelParams:
    """Path-loss exponent, fading gains and transmit powers.

    ``xi`` overrides the fading gain of individual ordered pairs; every other
    pair uses ``xi_default``.
    """

    alpha: float = 2.0
    p_s: float = 1.0
    p_r: float = 1.0
    xi_default: float = 1.0
    xi: Mapping[Tuple[NodeKey, NodeKey], float] = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha < 1.0:
            raise InvalidInputError(f"alpha must be >= 1, got {self.alpha}")
        for name in ("p_s", "p_r"):
            p = getattr(self, name)
            if not math.isfinite(p) or p < 0.0:
                raise InvalidInputError(f"{name} must be a finite non-negative power, got {p}")
        if not self.xi_default > 0.0 or not math.isfinite(self.xi_default):
            raise InvalidInputError(f"xi_default must be positive, got {self.xi_default}")
        for pair, value in self.xi.items():
            if not value > 0.0 or not math.isfinite(value):
                raise InvalidInputError(f"xi{pair} must be positive, got {value}")
        object.__setattr__(self, "xi", dict(self.xi))

    def fading(self, u: NodeKey, v: NodeKey) -> float:
        return self.xi.get((u, v), self.xi_default)

    def power(self, u: NodeKey) -> float:
        if u == SOURCE:
            return self.p_s
        if u == RELAY:
            return self.p_r
        raise InvalidInputError(f"node {u!r} does not transmit")


@dataclass(frozen=True)
class SnrVector:
    """Receiver SNRs ``(SNR_sr, SNR_s1..SNR_sN, SNR_r1..SNR_rN)``."""

    snr_sr: float
    snr_s: Tuple[float, ...]
    snr_r: Tuple[float, ...]

    def __post_init__(self):
        snr_s = tuple(float(x) for x in np.atleast_1d(self.snr_s))
        snr_r = tuple(float(x) for x in np.atleast_1d(self.snr_r))
        object.__setattr__(self, "snr_sr", float(self.snr_sr))
        object.__setattr__(self, "snr_s", snr_s)
        object.__setattr__(self, "snr_r", snr_r)
        if len(snr_s) != len(snr_r) or not snr_s:
            raise InvalidInputError("snr_s and snr_r must have the same non-zero length")
        for x in (self.snr_sr,) + snr_s + snr_r:
            if not (math.isfinite(x) and x >= 0.0):
                raise InvalidInputError(f"SNR entries must be finite and >= 0, got {x}")

    @property
    def n(self) -> int:
        return len(self.snr_s)

    def as_array(self) -> np.ndarray:
        return np.array((self.snr_sr,) + self.snr_s + self.snr_r)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "SnrVector":
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 3 or values.size % 2 == 0:
            raise InvalidInputError("SNR array must have length 2N+1")
        n = (values.size - 1) // 2
        return cls(values[0], values[1 : 1 + n], values[1 + n :])


def channel_gain(u: NodeKey, v: NodeKey, layout: NodeLayout, params: ChannelParams) -> float:
    """Amplitude gain ``sqrt(xi) / D**(alpha/2)`` of the link ``u -> v``."""
    d = distance(layout.position(u), layout.position(v))
    if d == 0.0:
        raise SingularityError(f"nodes {u!r} and {v!r} coincide", (u, v))
    return math.sqrt(params.fading(u, v)) / d ** (params.alpha / 2.0)


def snr(u: NodeKey, v: NodeKey, layout: NodeLayout, params: ChannelParams) -> float:
    """Receive SNR ``xi * P_u / D**alpha`` of the link ``u -> v``."""
    d = distance(layout.position(u), layout.position(v))
    if d == 0.0:
        raise SingularityError(f"nodes {u!r} and {v!r} coincide", (u, v))
    return params.fading(u, v) * params.power(u) / d**params.alpha


def snr_vector(layout: NodeLayout, params: ChannelParams) -> SnrVector:
    """Assemble the SNR vector in destination order of ``layout``."""
    if layout.relay is None:
        raise InvalidInputError("relay position not set")
    n = layout.n_destinations
    return SnrVector(
        snr(SOURCE, RELAY, layout, params),
        [snr(SOURCE, j, layout, params) for j in range(n)],
        [snr(RELAY, j, layout, params) for j in range(n)],
    )
