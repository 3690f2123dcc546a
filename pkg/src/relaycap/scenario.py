"""Scenario configuration: JSON ingestion, validation and built-in presets.

A configuration file is one JSON object::

    {
      "nodes": [{"id": "s", "role": "source", "pos": [0]},
                {"id": "r", "role": "relay", "pos": [0.5]},
                {"id": "d1", "role": "destination", "pos": [1]}],
      "alpha": 2, "xi_default": 1,
      "xi_overrides": [{"from": "s", "to": "d1", "value": 0.5}],
      "p_s": 1, "p_r": 1, "mode": "low_snr", "bound": "df", "rho": 0,
      "box": {"lower": [0], "upper": [1]}, "resolution": [101],
      "tol": 1e-6, "seed": 1
    }

Every field except ``nodes`` is optional.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple, Union

from .errors import ConfigError, InvalidInputError
from .geometry import ChannelParams, NodeLayout, distance
from .optimize import Bound, SearchBox
from .rates import RateMode

RATE_BOUNDS = ("cs", "dt", "df", "qf", "rdf", "2h")
RELAY_BOUNDS = tuple(b.value for b in Bound)


@dataclass(frozen=True)
class ScenarioConfig:
    layout: NodeLayout
    params: ChannelParams = field(default_factory=ChannelParams)
    mode: RateMode = RateMode.LOW_SNR
    bounds: Tuple[str, ...] = ("df",)
    rho: Union[float, str] = 0.0
    box: Optional[SearchBox] = None
    resolution: Optional[Tuple[int, ...]] = None
    tol: float = 1e-6
    seed: int = 0
    destination_ids: Tuple[str, ...] = ()

    def with_overrides(self, **kw) -> "ScenarioConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        if not kw:
            return self
        cfg = replace(self, **kw)
        validate(cfg)
        return cfg


def _rho(value) -> Union[float, str]:
    if value == "optimize":
        return "optimize"
    try:
        rho = float(value)
    except (TypeError, ValueError):
        raise ConfigError("rho", f"must be a number in [0, 1] or 'optimize', got {value!r}") from None
    if not 0.0 <= rho <= 1.0:
        raise ConfigError("rho", f"must lie in [0, 1], got {rho}")
    return rho


def validate(cfg: ScenarioConfig) -> None:
    """Check cross-field preconditions; raise :class:`ConfigError`."""
    _rho(cfg.rho)
    for b in cfg.bounds:
        if b not in RATE_BOUNDS and b not in RELAY_BOUNDS:
            raise ConfigError("bound", f"unknown bound {b!r}")
    if cfg.box is not None and cfg.box.dim != cfg.layout.dim:
        raise ConfigError("box", f"dimension {cfg.box.dim} does not match layout dimension {cfg.layout.dim}")
    if cfg.resolution is not None:
        if cfg.box is not None and len(cfg.resolution) != cfg.box.dim:
            raise ConfigError("resolution", "needs one entry per box axis")
        if any(n < 2 for n in cfg.resolution):
            raise ConfigError("resolution", "must be >= 2 per axis")
    if not cfg.tol > 0:
        raise ConfigError("tol", "must be positive")


def _number(doc, key, default):
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(key, f"must be a finite number, got {value!r}")
    return float(value)


def from_dict(doc: dict) -> ScenarioConfig:
    """Build and validate a :class:`ScenarioConfig` from parsed JSON."""
    if not isinstance(doc, dict):
        raise ConfigError("config", "top level must be a JSON object")
    nodes = doc.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise ConfigError("nodes", "must be a non-empty array")
    source = relay = None
    dests: List[Tuple[str, list]] = []
    keys = {}
    for k, node in enumerate(nodes):
        if not isinstance(node, dict) or "role" not in node or "pos" not in node:
            raise ConfigError(f"nodes[{k}]", "needs 'role' and 'pos'")
        nid = str(node.get("id", k))
        if nid in keys:
            raise ConfigError(f"nodes[{k}].id", f"duplicate id {nid!r}")
        role = node["role"]
        if role == "source":
            if source is not None:
                raise ConfigError("nodes", "more than one source")
            source = node["pos"]
            keys[nid] = "s"
        elif role == "relay":
            if relay is not None:
                raise ConfigError("nodes", "more than one relay")
            relay = node["pos"]
            keys[nid] = "r"
        elif role == "destination":
            keys[nid] = len(dests)
            dests.append((nid, node["pos"]))
        else:
            raise ConfigError(f"nodes[{k}].role", f"unknown role {role!r}")
    if source is None:
        raise ConfigError("nodes", "no source node")
    if not dests:
        raise ConfigError("nodes", "no destination node")
    try:
        layout = NodeLayout(source, tuple(p for _, p in dests), relay)
    except InvalidInputError as exc:
        raise ConfigError("nodes", str(exc)) from None
    if layout.relay is not None and distance(layout.relay, layout.source) == 0.0:
        raise ConfigError("nodes", "relay coincides with the source")

    xi = {}
    for k, ov in enumerate(doc.get("xi_overrides", []) or []):
        try:
            pair = (keys[str(ov["from"])], keys[str(ov["to"])])
            value = float(ov["value"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"xi_overrides[{k}]", "needs known 'from'/'to' ids and a numeric 'value'") from None
        xi[pair] = value
    alpha = _number(doc, "alpha", 2.0)
    if alpha < 1.0:
        raise ConfigError("alpha", f"must be >= 1, got {alpha}")
    p_s, p_r = _number(doc, "p_s", 1.0), _number(doc, "p_r", 1.0)
    for name, p in (("p_s", p_s), ("p_r", p_r)):
        if p < 0:
            raise ConfigError(name, f"must be non-negative, got {p}")
    try:
        params = ChannelParams(alpha, p_s, p_r, _number(doc, "xi_default", 1.0), xi)
    except InvalidInputError as exc:
        raise ConfigError("xi", str(exc)) from None

    try:
        mode = RateMode(doc.get("mode", "low_snr"))
    except ValueError:
        raise ConfigError("mode", f"must be 'exact' or 'low_snr', got {doc.get('mode')!r}") from None
    bound = doc.get("bound", "df")
    bounds = tuple(bound) if isinstance(bound, list) else (bound,)

    box = None
    if "box" in doc and doc["box"] is not None:
        try:
            box = SearchBox(tuple(doc["box"]["lower"]), tuple(doc["box"]["upper"]))
        except (KeyError, TypeError, InvalidInputError) as exc:
            raise ConfigError("box", str(exc)) from None
    resolution = doc.get("resolution")
    if resolution is not None:
        if isinstance(resolution, int):
            resolution = [resolution] * layout.dim
        try:
            resolution = tuple(int(n) for n in resolution)
        except (TypeError, ValueError):
            raise ConfigError("resolution", "must be an array of integers") from None
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed", "must be an integer")
    cfg = ScenarioConfig(
        layout=layout, params=params, mode=mode, bounds=bounds, rho=_rho(doc.get("rho", 0.0)),
        box=box, resolution=resolution, tol=_number(doc, "tol", 1e-6), seed=seed,
        destination_ids=tuple(nid for nid, _ in dests),
    )
    validate(cfg)
    return cfg


def load(path) -> ScenarioConfig:
    """Read a JSON configuration file.  I/O failures propagate as ``OSError``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    return from_dict(doc)


# -- presets ---------------------------------------------------------------

# Destinations on the boundary of the square [-10, 10]^2 around the source.
SQUARE_2D_DESTINATIONS = ((10.0, 0.0), (0.0, 10.0), (10.0, 10.0), (-10.0, 10.0), (-10.0, 0.0))

# Five vertices of a triangular bipyramid that contains the source.
POLY_3D_DESTINATIONS = (
    (10.0, 0.0, 0.0),
    (0.0, 10.0, 0.0),
    (-10.0, -10.0, 0.0),
    (0.0, 0.0, 10.0),
    (2.0, 2.0, -10.0),
)

PRESETS = {
    "one_d_relay": dict(
        description="relay channel on a line: source at 0, destination at 1",
        source=(0.0,), destinations=((1.0,),), relay=(0.5,),
        box=((0.0,), (1.0,)), resolution=(101,),
    ),
    "square_2d": dict(
        description="five destinations on the square [-10, 10]^2, source at the origin",
        source=(0.0, 0.0), destinations=SQUARE_2D_DESTINATIONS, relay=(0.0, 5.0),
        box=((-10.0, -10.0), (10.0, 10.0)), resolution=(51, 51),
    ),
    "poly_3d": dict(
        description="five destinations at the vertices of a bipyramid around the source",
        source=(0.0, 0.0, 0.0), destinations=POLY_3D_DESTINATIONS, relay=(1.0, 1.0, 1.0),
        box=((-10.0, -10.0, -10.0), (10.0, 10.0, 10.0)), resolution=(21, 21, 21),
    ),
}


def preset(name: str) -> ScenarioConfig:
    """Built-in scenario with ``P_s = P_r = 1``, ``alpha = 2``, ``xi = 1``, low SNR."""
    try:
        p = PRESETS[name]
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    layout = NodeLayout(p["source"], p["destinations"], p["relay"])
    return ScenarioConfig(
        layout=layout,
        params=ChannelParams(alpha=2.0, p_s=1.0, p_r=1.0),
        mode=RateMode.LOW_SNR,
        bounds=("df",),
        rho=0.0,
        box=SearchBox(*p["box"]),
        resolution=p["resolution"],
        destination_ids=tuple(f"d{j + 1}" for j in range(len(p["destinations"]))),
    )
