"""Interchange topology: mainline directions, ramp movements, and the ramp graph.

An interchange is described by N mainline collection points ("directions",
one gantry each) and M movements. Each movement is a directed ramp path from
an upstream gantry to a downstream gantry. The movement set doubles as the
node set of the graph used by the downstream forecaster.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class MovementDef:
    """One directed ramp path through the interchange."""

    id: str
    upstream: str
    downstream: str
    label: str = ""

    def __post_init__(self):
        if self.upstream == self.downstream:
            raise ValueError(
                f"movement {self.id!r}: upstream and downstream must differ "
                f"(both {self.upstream!r})"
            )


@dataclass(frozen=True)
class InterchangeSpec:
    """Static interchange structure: gantry directions and ramp movements.

    Immutable after construction; safe to share across threads.
    """

    name: str
    directions: tuple[str, ...]
    movements: tuple[MovementDef, ...]
    interval_sec: int

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        object.__setattr__(self, "movements", tuple(self.movements))
        violations = []
        if len(self.directions) < 2:
            violations.append(f"need at least 2 directions, got {len(self.directions)}")
        if len(self.movements) < 1:
            violations.append("need at least 1 movement")
        if len(set(self.directions)) != len(self.directions):
            violations.append("direction identifiers must be unique")
        ids = [m.id for m in self.movements]
        if len(set(ids)) != len(ids):
            violations.append("movement identifiers must be unique")
        known = set(self.directions)
        for m in self.movements:
            for end, which in ((m.upstream, "upstream"), (m.downstream, "downstream")):
                if end not in known:
                    violations.append(
                        f"movement {m.id!r} references unknown {which} direction {end!r}"
                    )
        if not isinstance(self.interval_sec, int) or self.interval_sec <= 0:
            violations.append(f"interval_sec must be a positive integer, got {self.interval_sec!r}")
        if violations:
            raise ValueError("invalid interchange spec: " + "; ".join(violations))

    @property
    def n_directions(self) -> int:
        return len(self.directions)

    @property
    def n_movements(self) -> int:
        return len(self.movements)

    @property
    def movement_ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.movements)


@dataclass(frozen=True)
class Adjacency:
    """Binary ramp graph: symmetric, zero diagonal, values in {0, 1}."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency values must be 0 or 1")
        if np.diag(a).any():
            raise ValueError("adjacency diagonal must be zero")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        object.__setattr__(self, "matrix", a.astype(np.float64))


def full_adjacency(spec: InterchangeSpec) -> Adjacency:
    """Fully connected ramp graph: every pair of distinct movements linked."""
    m = spec.n_movements
    a = np.ones((m, m)) - np.eye(m)
    return Adjacency(a)


def movement_endpoints(spec: InterchangeSpec, movement_id: str) -> tuple[str, str]:
    """Return the (upstream, downstream) gantry pair of a movement."""
    for m in spec.movements:
        if m.id == movement_id:
            return m.upstream, m.downstream
    raise KeyError(f"unknown movement {movement_id!r}")


def load_interchange(path: str | Path) -> InterchangeSpec:
    """Load and validate an interchange spec from its JSON file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from exc

    for key in ("name", "interval_sec", "directions", "movements"):
        if key not in raw:
            raise ValueError(f"{path}: missing required field {key!r}")
    movements = []
    for i, m in enumerate(raw["movements"]):
        for key in ("id", "upstream", "downstream"):
            if key not in m:
                raise ValueError(f"{path}: movements[{i}] missing field {key!r}")
        movements.append(
            MovementDef(
                id=m["id"],
                upstream=m["upstream"],
                downstream=m["downstream"],
                label=m.get("label", ""),
            )
        )
    return InterchangeSpec(
        name=raw["name"],
        directions=tuple(raw["directions"]),
        movements=tuple(movements),
        interval_sec=int(raw["interval_sec"]),
    )


def save_interchange(spec: InterchangeSpec, path: str | Path) -> None:
    """Write a spec back to JSON; inverse of :func:`load_interchange`."""
    doc = {
        "name": spec.name,
        "interval_sec": spec.interval_sec,
        "directions": list(spec.directions),
        "movements": [
            {"id": m.id, "upstream": m.upstream, "downstream": m.downstream, "label": m.label}
            for m in spec.movements
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def default_interchange(interval_sec: int = 300) -> InterchangeSpec:
    """Four-leg interchange: 8 gantries (entry+exit per leg), 12 movements.

    Each leg contributes one entry gantry and one exit gantry; a movement
    connects every entry to each of the three other legs' exits, labeled
    "E to W" style.
    """
    legs = ("E", "W", "N", "S")
    directions = tuple(f"{leg}-in" for leg in legs) + tuple(f"{leg}-out" for leg in legs)
    movements = tuple(
        MovementDef(
            id=f"{a}{b}".lower(),
            upstream=f"{a}-in",
            downstream=f"{b}-out",
            label=f"{a} to {b}",
        )
        for a in legs
        for b in legs
        if a != b
    )
    return InterchangeSpec(
        name="four-leg-interchange",
        directions=directions,
        movements=movements,
        interval_sec=interval_sec,
    )
