"""MATPOWER plain-text case parsing, serialization, and canonical dumps.

Supported subset: the ``mpc.baseMVA``, ``mpc.bus``, ``mpc.gen`` and
``mpc.branch`` matrices with the standard column layout. Only series
reactance drives the DC model; resistance, shunts, taps and phase shift
are read and ignored. RATE_A is the branch rating; 0 means unrated.

MATPOWER has no circuit-id column, so parallel branches between the same
bus pair get circuit ids "1", "2", ... in row order, making every
``(from, to, circuit)`` triple unique.
"""

from __future__ import annotations

import json
from pathlib import Path

from .dcpf import solve_dc
from .model import (
    Branch,
    BranchKey,
    Bus,
    BusType,
    CaseParseError,
    CaseValidationError,
    Generator,
    Network,
)

_BUS_TYPES = {1: BusType.PQ, 2: BusType.PV, 3: BusType.SLACK}

# column positions (0-based) in the MATPOWER v2 tables
_BUS_I, _BUS_TYPE, _BUS_PD, _BUS_BASEKV = 0, 1, 2, 9
_GEN_BUS, _GEN_PG, _GEN_STATUS, _GEN_PMAX = 0, 1, 7, 8
_BR_F, _BR_T, _BR_X, _BR_RATE_A, _BR_STATUS = 0, 1, 3, 5, 10


def _strip_comments(text: str) -> str:
    lines = []
    for line in text.splitlines():
        cut = line.find("%")
        lines.append(line if cut < 0 else line[:cut])
    return "\n".join(lines)


def _extract_tables(text: str) -> tuple[dict[str, list[list[float]]], float, str]:
    """Pull the numeric matrices and baseMVA out of the case text."""
    clean = _strip_comments(text)
    name = "case"
    for line in clean.splitlines():
        line = line.strip()
        if line.startswith("function") and "=" in line:
            name = line.split("=")[-1].strip().rstrip(";").strip()
            break

    tables: dict[str, list[list[float]]] = {}
    base_mva = None
    pos = 0
    while True:
        start = clean.find("mpc.", pos)
        if start < 0:
            break
        eq = clean.find("=", start)
        if eq < 0:
            break
        field = clean[start + 4 : eq].strip()
        rest = clean[eq + 1 :].lstrip()
        if rest.startswith("["):
            end = clean.find("];", eq)
            if end < 0:
                raise CaseParseError(f"unterminated matrix mpc.{field}")
            body = clean[clean.find("[", eq) + 1 : end]
            rows = []
            for raw in body.replace("\n", ";").split(";"):
                tokens = raw.split()
                if not tokens:
                    continue
                try:
                    rows.append([float(tok) for tok in tokens])
                except ValueError as exc:
                    raise CaseParseError(
                        f"mpc.{field}: non-numeric token in row {raw.strip()!r}"
                    ) from exc
            tables[field] = rows
            pos = end + 2
        else:
            stop = clean.find(";", eq)
            value = clean[eq + 1 : stop if stop > 0 else None].strip().strip("'\"")
            if field == "baseMVA":
                try:
                    base_mva = float(value)
                except ValueError as exc:
                    raise CaseParseError(f"bad baseMVA value {value!r}") from exc
            pos = (stop + 1) if stop > 0 else len(clean)
    if base_mva is None:
        raise CaseParseError("case defines no mpc.baseMVA")
    return tables, base_mva, name


def _require(row: list[float], count: int, table: str, rownum: int) -> None:
    if len(row) < count:
        raise CaseParseError(
            f"mpc.{table} row {rownum}: expected at least {count} columns, got {len(row)}"
        )


def loads_case(text: str, name: str | None = None) -> Network:
    """Build a validated ``Network`` from MATPOWER case text."""
    tables, base_mva, parsed_name = _extract_tables(text)
    for required in ("bus", "gen", "branch"):
        if required not in tables:
            raise CaseParseError(f"case defines no mpc.{required} table")

    buses = []
    for i, row in enumerate(tables["bus"]):
        _require(row, 10, "bus", i)
        code = int(row[_BUS_TYPE])
        if code not in _BUS_TYPES:
            raise CaseValidationError(
                f"bus row {i} (bus {int(row[_BUS_I])}): unsupported bus type {code}"
            )
        buses.append(
            Bus(
                id=int(row[_BUS_I]),
                base_kv=row[_BUS_BASEKV],
                bus_type=_BUS_TYPES[code],
                load_mw=row[_BUS_PD],
            )
        )

    generators = []
    for i, row in enumerate(tables["gen"]):
        _require(row, 9, "gen", i)
        if row[_GEN_STATUS] <= 0:  # out-of-service units contribute nothing
            continue
        generators.append(
            Generator(bus=int(row[_GEN_BUS]), p_mw=row[_GEN_PG], p_max_mw=row[_GEN_PMAX])
        )

    branches = []
    circuit_counter: dict[tuple[int, int], int] = {}
    for i, row in enumerate(tables["branch"]):
        _require(row, 11, "branch", i)
        f, t = int(row[_BR_F]), int(row[_BR_T])
        pair = (min(f, t), max(f, t))
        circuit_counter[pair] = circuit_counter.get(pair, 0) + 1
        branches.append(
            Branch(
                from_bus=f,
                to_bus=t,
                circuit_id=str(circuit_counter[pair]),
                reactance_pu=row[_BR_X],
                rating_mva=row[_BR_RATE_A],
                in_service=row[_BR_STATUS] > 0,
            )
        )

    return Network(
        buses=tuple(buses),
        branches=tuple(branches),
        generators=tuple(generators),
        base_mva=base_mva,
        name=name or parsed_name,
    )


def load_case(path: str | Path) -> Network:
    """Parse a MATPOWER case file into a validated ``Network``."""
    p = Path(path)
    if not p.is_file():
        raise CaseParseError(f"case file not found: {p}")
    return loads_case(p.read_text(), name=p.stem)


def pre_outage_flows(net: Network) -> dict[BranchKey, float]:
    """Signed base-case MW flow per in-service branch (positive from -> to)."""
    return solve_dc(net).flows_by_key()


# -- serialization ---------------------------------------------------------

_BUS_CODE = {BusType.PQ: 1, BusType.PV: 2, BusType.SLACK: 3}


def _num(v: float) -> str:
    r = repr(float(v))
    return r[:-2] if r.endswith(".0") else r


def to_case_text(net: Network) -> str:
    """Serialize back to MATPOWER case text.

    Unmodeled columns are written as neutral defaults; reloading the
    result reproduces the model field for field.
    """
    out = [f"function mpc = {net.name}", "mpc.version = '2';", f"mpc.baseMVA = {_num(net.base_mva)};", ""]
    out.append("mpc.bus = [")
    for b in net.buses:
        out.append(
            f"\t{b.id}\t{_BUS_CODE[b.bus_type]}\t{_num(b.load_mw)}\t0\t0\t0\t1\t1\t0\t{_num(b.base_kv)}\t1\t1.1\t0.9;"
        )
    out.append("];")
    out.append("")
    out.append("mpc.gen = [")
    for g in net.generators:
        out.append(f"\t{g.bus}\t{_num(g.p_mw)}\t0\t0\t0\t1\t{_num(net.base_mva)}\t1\t{_num(g.p_max_mw)}\t0;")
    out.append("];")
    out.append("")
    out.append("mpc.branch = [")
    for br in net.branches:
        status = 1 if br.in_service else 0
        out.append(
            f"\t{br.from_bus}\t{br.to_bus}\t0\t{_num(br.reactance_pu)}\t0\t{_num(br.rating_mva)}\t0\t0\t0\t0\t{status}\t-360\t360;"
        )
    out.append("];")
    out.append("")
    return "\n".join(out)


def write_case(net: Network, path: str | Path) -> None:
    Path(path).write_text(to_case_text(net))


def network_to_dict(net: Network) -> dict:
    """Canonical JSON-ready dump with stable key ordering for diffing."""
    return {
        "name": net.name,
        "base_mva": net.base_mva,
        "buses": [
            {
                "id": b.id,
                "base_kv": b.base_kv,
                "bus_type": b.bus_type.value,
                "load_mw": b.load_mw,
            }
            for b in net.buses
        ],
        "branches": [
            {
                "from_bus": br.from_bus,
                "to_bus": br.to_bus,
                "circuit_id": br.circuit_id,
                "reactance_pu": br.reactance_pu,
                "rating_mva": br.rating_mva,
                "in_service": br.in_service,
            }
            for br in net.branches
        ],
        "generators": [
            {"bus": g.bus, "p_mw": g.p_mw, "p_max_mw": g.p_max_mw} for g in net.generators
        ],
    }


def network_to_json(net: Network) -> str:
    return json.dumps(network_to_dict(net), indent=2) + "\n"
