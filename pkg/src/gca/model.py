"""Immutable network model: buses, branches, generators.

Conventions used throughout the package:

- bus ids are the external (file) numbers; internal indices are the
  0-based positions in ``Network.buses``
- a branch is identified by the triple ``(from_bus, to_bus, circuit_id)``
- power is in MW, reactance in per unit on ``base_mva``
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

BranchKey = tuple[int, int, str]


class GcaError(Exception):
    """Base class for all errors raised by this package."""


class CaseParseError(GcaError):
    """A case file could not be parsed."""


class CaseValidationError(GcaError):
    """A parsed case violates a model invariant."""


class BusType(enum.Enum):
    PQ = "PQ"
    PV = "PV"
    SLACK = "slack"


@dataclass(frozen=True)
class Bus:
    id: int
    base_kv: float
    bus_type: BusType
    load_mw: float = 0.0


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    circuit_id: str
    reactance_pu: float
    rating_mva: float = 0.0  # 0 means "no rating given" (unbounded)
    in_service: bool = True

    @property
    def key(self) -> BranchKey:
        return (self.from_bus, self.to_bus, self.circuit_id)

    @property
    def label(self) -> str:
        return f"{self.from_bus}-{self.to_bus}-{self.circuit_id}"


@dataclass(frozen=True)
class Generator:
    bus: int
    p_mw: float
    p_max_mw: float


def branch_label(key: BranchKey) -> str:
    return f"{key[0]}-{key[1]}-{key[2]}"


def parse_branch_label(text: str) -> BranchKey:
    """Parse a ``from-to-circuit`` triple such as ``136-133-1``."""
    parts = text.strip().split("-")
    if len(parts) != 3:
        raise GcaError(f"bad branch triple {text!r}: expected from-to-circuit")
    try:
        return (int(parts[0]), int(parts[1]), parts[2])
    except ValueError as exc:
        raise GcaError(f"bad branch triple {text!r}: bus numbers must be integers") from exc


@dataclass(frozen=True)
class Network:
    """A validated, immutable grid snapshot.

    Validation happens at construction; any instance in circulation
    satisfies the model invariants (unique ids, resolvable endpoints,
    positive reactances, exactly one slack bus). The instance may be
    shared freely across threads and processes.
    """

    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    generators: tuple[Generator, ...]
    base_mva: float = 100.0
    name: str = "case"

    def __post_init__(self) -> None:
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "generators", tuple(self.generators))
        self._validate()

    def _validate(self) -> None:
        if self.base_mva <= 0:
            raise CaseValidationError(f"base MVA must be > 0, got {self.base_mva}")
        if not self.buses:
            raise CaseValidationError("network has no buses")
        seen_bus: set[int] = set()
        for bus in self.buses:
            if bus.id in seen_bus:
                raise CaseValidationError(f"duplicate bus id {bus.id}")
            seen_bus.add(bus.id)
            if bus.base_kv <= 0:
                raise CaseValidationError(f"bus {bus.id}: base kV must be > 0, got {bus.base_kv}")
        slacks = [bus.id for bus in self.buses if bus.bus_type is BusType.SLACK]
        if len(slacks) != 1:
            raise CaseValidationError(
                f"expected exactly one slack bus, found {len(slacks)} ({slacks})"
            )
        seen_branch: set[BranchKey] = set()
        for pos, br in enumerate(self.branches):
            where = f"branch {pos} ({br.label})"
            if br.from_bus == br.to_bus:
                raise CaseValidationError(f"{where}: from_bus equals to_bus")
            if br.from_bus not in seen_bus or br.to_bus not in seen_bus:
                raise CaseValidationError(f"{where}: endpoint is not a known bus")
            if br.key in seen_branch:
                raise CaseValidationError(f"{where}: duplicate (from, to, circuit) key")
            seen_branch.add(br.key)
            if not (br.reactance_pu > 0) or not math.isfinite(br.reactance_pu):
                raise CaseValidationError(
                    f"{where}: reactance must be strictly positive, got {br.reactance_pu}"
                )
            if br.rating_mva < 0:
                raise CaseValidationError(f"{where}: rating must be >= 0, got {br.rating_mva}")
        for pos, gen in enumerate(self.generators):
            if gen.bus not in seen_bus:
                raise CaseValidationError(f"generator {pos}: bus {gen.bus} does not exist")
            if gen.p_mw > gen.p_max_mw + 1e-6:
                raise CaseValidationError(
                    f"generator {pos} at bus {gen.bus}: dispatch {gen.p_mw} MW "
                    f"exceeds p_max {gen.p_max_mw} MW"
                )

    # -- index maps ------------------------------------------------------

    @cached_property
    def bus_index(self) -> dict[int, int]:
        """External bus id -> internal 0-based index (bijective)."""
        return {bus.id: i for i, bus in enumerate(self.buses)}

    @cached_property
    def slack_index(self) -> int:
        for i, bus in enumerate(self.buses):
            if bus.bus_type is BusType.SLACK:
                return i
        raise CaseValidationError("no slack bus")  # unreachable after validation

    @cached_property
    def branch_by_key(self) -> dict[BranchKey, int]:
        """Branch key -> position in ``branches``; both orientations resolve."""
        index: dict[BranchKey, int] = {}
        for pos, br in enumerate(self.branches):
            index[br.key] = pos
            reverse = (br.to_bus, br.from_bus, br.circuit_id)
            index.setdefault(reverse, pos)
        return index

    def resolve_branch(self, key: BranchKey) -> int:
        try:
            return self.branch_by_key[key]
        except KeyError:
            raise GcaError(f"unknown branch {branch_label(key)}") from None

    # -- in-service view -------------------------------------------------

    @cached_property
    def active_positions(self) -> tuple[int, ...]:
        """Positions of in-service branches, in canonical (sorted key) order.

        The canonical order makes every downstream float accumulation
        independent of the branch ordering in the source file.
        """
        active = [pos for pos, br in enumerate(self.branches) if br.in_service]
        active.sort(key=lambda pos: self.branches[pos].key)
        return tuple(active)

    @cached_property
    def active_keys(self) -> tuple[BranchKey, ...]:
        return tuple(self.branches[pos].key for pos in self.active_positions)

    @cached_property
    def active_row(self) -> dict[BranchKey, int]:
        """Branch key -> row in the active-branch arrays and matrices."""
        rows: dict[BranchKey, int] = {}
        for row, key in enumerate(self.active_keys):
            rows[key] = row
            rows.setdefault((key[1], key[0], key[2]), row)
        return rows

    @cached_property
    def active_from(self) -> np.ndarray:
        return np.array(
            [self.bus_index[self.branches[pos].from_bus] for pos in self.active_positions],
            dtype=np.intp,
        )

    @cached_property
    def active_to(self) -> np.ndarray:
        return np.array(
            [self.bus_index[self.branches[pos].to_bus] for pos in self.active_positions],
            dtype=np.intp,
        )

    @cached_property
    def active_susceptance(self) -> np.ndarray:
        """Per-unit series susceptance magnitude 1/x per active branch."""
        return np.array(
            [1.0 / self.branches[pos].reactance_pu for pos in self.active_positions]
        )

    @cached_property
    def active_rating(self) -> np.ndarray:
        return np.array([self.branches[pos].rating_mva for pos in self.active_positions])

    @cached_property
    def injections_mw(self) -> np.ndarray:
        """Net MW injection per bus: generation minus load."""
        inj = np.zeros(len(self.buses))
        for bus_pos, bus in enumerate(self.buses):
            inj[bus_pos] -= bus.load_mw
        for gen in self.generators:
            inj[self.bus_index[gen.bus]] += gen.p_mw
        return inj

    def active_rows_for(self, keys) -> list[int]:
        rows = []
        for key in keys:
            row = self.active_row.get(tuple(key))
            if row is None:
                pos = self.branch_by_key.get(tuple(key))
                if pos is None:
                    raise GcaError(f"unknown branch {branch_label(tuple(key))}")
                raise GcaError(f"branch {branch_label(tuple(key))} is out of service")
            rows.append(row)
        return rows

    # -- derived networks --------------------------------------------------

    def restricted_to(self, bus_ids: set[int], drop_branches: set[BranchKey] = frozenset()) -> "Network":
        """Sub-network induced on ``bus_ids``, minus ``drop_branches``.

        Keeps only in-service branches with both endpoints inside the set.
        The slack bus must be inside the set.
        """
        drop = {tuple(k) for k in drop_branches}
        buses = tuple(b for b in self.buses if b.id in bus_ids)
        branches = tuple(
            br
            for br in self.branches
            if br.in_service
            and br.from_bus in bus_ids
            and br.to_bus in bus_ids
            and br.key not in drop
            and (br.to_bus, br.from_bus, br.circuit_id) not in drop
        )
        generators = tuple(g for g in self.generators if g.bus in bus_ids)
        return Network(buses, branches, generators, self.base_mva, self.name)
