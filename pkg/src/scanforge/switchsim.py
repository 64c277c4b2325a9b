"""Switch-level MOS network simulator with strength-based resolution.

Transistors are strength-rated switches: an NMOS conducts when its gate is 1,
a PMOS when its gate is 0, and an unknown gate conducts "maybe", contributing
X. Node values carry a numeric strength rank:

    supply    3.0                      (VDD/GND, immovable)
    driven    2.0 + w/(2*W_max)        in (2.0, 2.5], scales with width
    charged   1.0                      (storage-node charge)
    floating  0.0                      (undriven, logic X)

A conducting transistor whose source side is driven-or-stronger contributes
the passed logic at the transistor's OWN driven rank: delivered strength is
set by the switch's width, which is how a double-width device overpowers a
width-1 driver in a ratioed fight. A charged source side charge-shares at
rank 1; a floating side contributes nothing. Pass degradation (an NMOS
passing 1 or a PMOS passing 0) halves the effective width, lowering the rank
but keeping it above charge strength. External input pins drive their node
at width-1.0 rank. Each node resolves to its strongest contribution;
equal-rank disagreement resolves to X.

Evaluation nests two fixed-point loops. The outer loop freezes every
transistor's conduction state (on / off / maybe) from the current node
values. The inner loop then solves the channel network by synchronous
message passing over channel edges (parallel transistors joining the same
node pair, e.g. a transmission gate, form one edge): the message an edge
sends into a node is computed from the far node's value EXCLUDING that same
edge's reverse message, so a value never reflects back through the device
that delivered it. Supplies are pinned and never relay. On the
tree-structured channel graphs of CMOS latches this converges exactly and
independently of transistor list order; a network that never stabilizes
(e.g. a ring oscillator) raises OscillationError with the unsettled nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence

from .cells import FFVariant
from .errors import ScanforgeError
from .logic import Bit, X

RANK_FLOATING = 0.0
RANK_CHARGED = 1.0
RANK_DRIVEN_BASE = 2.0
RANK_SUPPLY = 3.0

# Driven ranks span (2.0, 2.5] so even the widest device stays below supply.
_DRIVEN_SPAN = 0.5
INPUT_DRIVE_WIDTH = 1.0
DEGRADED_WIDTH_FACTOR = 0.5

VDD = "VDD"
GND = "GND"

_OFF, _MAYBE, _ON = 0, 1, 2


class NetworkSyntaxError(ScanforgeError):
    code = "switchsim.syntax"


class DanglingNodeError(ScanforgeError):
    code = "switchsim.dangling_node"


class MissingSupplyError(ScanforgeError):
    code = "switchsim.missing_supply"


class StimulusError(ScanforgeError):
    code = "switchsim.stimulus"


class OscillationError(ScanforgeError):
    """No fixed point within max_iters; carries the still-changing nodes."""

    code = "switchsim.oscillation"

    def __init__(self, nodes: Iterable[str]):
        self.nodes = frozenset(nodes)
        super().__init__(
            "no fixed point, oscillating nodes: " + ", ".join(sorted(self.nodes))
        )


class TransistorType(str, Enum):
    NMOS = "N"
    PMOS = "P"


@dataclass(frozen=True)
class Transistor:
    id: str
    ttype: TransistorType
    gate: str
    src: str
    drn: str
    width: float


@dataclass(frozen=True)
class NodeValue:
    logic: Bit
    rank: float


@dataclass(frozen=True)
class TransistorNetwork:
    nodes: tuple[str, ...]  # includes VDD/GND
    storage: frozenset[str]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    transistors: tuple[Transistor, ...]

    @property
    def w_max(self) -> float:
        return max((t.width for t in self.transistors), default=1.0)

    def driven_rank(self, width: float) -> float:
        return RANK_DRIVEN_BASE + _DRIVEN_SPAN * (width / self.w_max)


@lru_cache(maxsize=None)
def _channel_edges(net: TransistorNetwork) -> tuple[tuple[str, str, tuple[int, ...]], ...]:
    """Channel edges: transistor indices grouped by unordered node pair."""
    groups: dict[frozenset, list[int]] = {}
    order: list[frozenset] = []
    for idx, t in enumerate(net.transistors):
        key = frozenset((t.src, t.drn))
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(idx)
    edges = []
    for key in order:
        a, b = sorted(key)
        edges.append((a, b, tuple(groups[key])))
    return tuple(edges)


def _conduction(ttype: TransistorType, gate_logic: Bit) -> int:
    if gate_logic is None:
        return _MAYBE
    if ttype == TransistorType.NMOS:
        return _ON if gate_logic == 1 else _OFF
    return _ON if gate_logic == 0 else _OFF


def _resolve(contribs: list[tuple[Bit, float]]) -> tuple[Bit, float]:
    if not contribs:
        return (X, RANK_FLOATING)
    top = max(rank for _, rank in contribs)
    logic: Bit = None
    first = True
    for cl, rank in contribs:
        if rank != top:
            continue
        if cl is None:
            return (X, top)
        if first:
            logic, first = cl, False
        elif cl != logic:
            return (X, top)
    return (logic, top)


def settle(
    net: TransistorNetwork,
    inputs: Mapping[str, Bit],
    charge: Optional[Mapping[str, Bit]] = None,
    max_iters: int = 100,
) -> dict[str, NodeValue]:
    """Evaluate to a fixed point and return every node's resolved value.

    ``inputs`` must cover every io-in node; ``charge`` gives storage-node
    contents from the previous phase (missing entries float as X charge).
    """
    for name in inputs:
        if name not in net.nodes:
            raise StimulusError(f"unknown input node {name!r}")
    missing = [n for n in net.inputs if n not in inputs]
    if missing:
        raise StimulusError(f"uncovered input nodes: {', '.join(sorted(missing))}")
    if max_iters < 1:
        raise StimulusError("max_iters must be >= 1")

    charge = charge or {}
    input_rank = net.driven_rank(INPUT_DRIVE_WIDTH)
    base: dict[str, list[tuple[Bit, float]]] = {}
    for name in net.inputs:
        base[name] = [(inputs[name], input_rank)]
    for name in net.storage:
        base.setdefault(name, []).append((charge.get(name, X), RANK_CHARGED))

    edges = _channel_edges(net)
    incident: dict[str, list[int]] = {n: [] for n in net.nodes}
    for ei, (a, b, _) in enumerate(edges):
        incident[a].append(ei)
        incident[b].append(ei)

    nmos = TransistorType.NMOS
    transistors = net.transistors

    def node_value(
        name: str, msgs: dict[tuple[int, str], Optional[tuple[Bit, float]]],
        exclude: int,
    ) -> tuple[Bit, float]:
        if name == VDD:
            return (1, RANK_SUPPLY)
        if name == GND:
            return (0, RANK_SUPPLY)
        contribs = list(base.get(name, ()))
        for ej in incident[name]:
            if ej == exclude:
                continue
            m = msgs[(ej, name)]
            if m is not None:
                contribs.append(m)
        return _resolve(contribs)

    def solve_channels(
        conduction: tuple[int, ...]
    ) -> dict[str, tuple[Bit, float]]:
        msgs: dict[tuple[int, str], Optional[tuple[Bit, float]]] = {}
        for ei, (a, b, _) in enumerate(edges):
            msgs[(ei, a)] = None
            msgs[(ei, b)] = None
        for _ in range(max_iters):
            new_msgs: dict[tuple[int, str], Optional[tuple[Bit, float]]] = {}
            for ei, (a, b, devs) in enumerate(edges):
                for src_n, dst_n in ((a, b), (b, a)):
                    logic, rank = node_value(src_n, msgs, exclude=ei)
                    contribs: list[tuple[Bit, float]] = []
                    for ti in devs:
                        state = conduction[ti]
                        if state == _OFF:
                            continue
                        t = transistors[ti]
                        if rank >= RANK_DRIVEN_BASE:
                            if state == _ON:
                                width = t.width
                                if logic == 1 and t.ttype == nmos:
                                    width *= DEGRADED_WIDTH_FACTOR
                                elif logic == 0 and t.ttype != nmos:
                                    width *= DEGRADED_WIDTH_FACTOR
                                contribs.append((logic, net.driven_rank(width)))
                            else:
                                contribs.append((X, net.driven_rank(t.width)))
                        elif rank == RANK_CHARGED:
                            contribs.append(
                                (X if state == _MAYBE else logic, RANK_CHARGED)
                            )
                    new_msgs[(ei, dst_n)] = _resolve(contribs) if contribs else None
            if new_msgs == msgs:
                break
            msgs = new_msgs
        else:
            moving = {
                node
                for (ei, node), m in new_msgs.items()
                if msgs[(ei, node)] != m
            }
            raise OscillationError(moving)
        return {n: node_value(n, msgs, exclude=-1) for n in net.nodes}

    values: dict[str, tuple[Bit, float]] = {
        n: (X, RANK_FLOATING) for n in net.nodes
    }
    values[VDD] = (1, RANK_SUPPLY)
    values[GND] = (0, RANK_SUPPLY)
    for name, contribs in base.items():
        values[name] = _resolve(contribs)

    prev = values
    for _ in range(max_iters):
        conduction = tuple(
            _conduction(t.ttype, values[t.gate][0]) for t in transistors
        )
        new_values = solve_channels(conduction)
        if new_values == values:
            return {n: NodeValue(*v) for n, v in values.items()}
        prev, values = values, new_values
    raise OscillationError({n for n in prev if prev[n] != values[n]})


class SwitchFF:
    """Stateful wrapper: one flip-flop network stepped phase by phase.

    Storage-node charge persists between phases. An optional shared ``cache``
    dict memoizes (inputs, charge) -> settled values, which collapses the
    cost of long stimulus runs to the tiny reachable state space.
    """

    def __init__(self, net: TransistorNetwork, cache: Optional[dict] = None):
        self.net = net
        self.charge: dict[str, Bit] = {n: X for n in net.storage}
        self.cache = cache if cache is not None else {}
        self._storage_order = tuple(sorted(net.storage))

    def step_phase(self, pins: Mapping[str, Bit]) -> dict[str, NodeValue]:
        inputs = {n: pins.get(n, X) for n in self.net.inputs}
        key = (
            tuple(inputs[n] for n in self.net.inputs),
            tuple(self.charge[n] for n in self._storage_order),
        )
        hit = self.cache.get(key)
        if hit is None:
            settled = settle(self.net, inputs, self.charge)
            new_charge = {n: settled[n].logic for n in self._storage_order}
            hit = (settled, new_charge)
            self.cache[key] = hit
        settled, new_charge = hit
        self.charge = dict(new_charge)
        return settled


def run_clocked(
    net: TransistorNetwork,
    stimulus: Sequence[tuple[Bit, Bit, Bit, Bit]],
    cache: Optional[dict] = None,
) -> list[Bit]:
    """Drive (CLK, DI, SI, SE) phases and return Q's logic after each phase."""
    ff = SwitchFF(net, cache)
    waveform: list[Bit] = []
    for clk, di, si, se in stimulus:
        settled = ff.step_phase({"CLK": clk, "DI": di, "SI": si, "SE": se})
        waveform.append(settled["Q"].logic)
    return waveform


def run_cycles(
    net: TransistorNetwork,
    stimulus: Sequence[tuple[Bit, Bit, Bit]],
    cache: Optional[dict] = None,
) -> list[Bit]:
    """Full clock cycles (CLK high then low); Q sampled after each falling phase."""
    ff = SwitchFF(net, cache)
    waveform: list[Bit] = []
    for di, si, se in stimulus:
        ff.step_phase({"CLK": 1, "DI": di, "SI": si, "SE": se})
        settled = ff.step_phase({"CLK": 0, "DI": di, "SI": si, "SE": se})
        waveform.append(settled["Q"].logic)
    return waveform


def load_network(text: str) -> TransistorNetwork:
    """Parse the .tnl format; see the bundled *_sff.tnl fixtures."""
    nodes: list[str] = []
    node_set: set[str] = set()
    storage: set[str] = set()
    inputs: list[str] = []
    outputs: list[str] = []
    transistors: list[Transistor] = []
    tran_ids: set[str] = set()
    supplies: set[str] = set()

    def declare(name: str, lineno: int) -> None:
        if name in node_set:
            raise NetworkSyntaxError(f"line {lineno}: node {name!r} declared twice")
        node_set.add(name)
        nodes.append(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        pos = raw.find("#")
        body = raw if pos < 0 else raw[:pos]
        toks = body.split()
        if not toks:
            continue
        word = toks[0]
        if word == "node":
            if len(toks) == 2:
                declare(toks[1], lineno)
            elif len(toks) == 3 and toks[2] == "storage":
                declare(toks[1], lineno)
                storage.add(toks[1])
            else:
                raise NetworkSyntaxError(
                    f"line {lineno}: expected 'node <name> [storage]'"
                )
        elif word == "supply":
            if len(toks) != 2 or toks[1] not in (VDD, GND):
                raise NetworkSyntaxError(
                    f"line {lineno}: expected 'supply VDD' or 'supply GND'"
                )
            declare(toks[1], lineno)
            supplies.add(toks[1])
        elif word == "t":
            if len(toks) != 7:
                raise NetworkSyntaxError(
                    f"line {lineno}: expected 't <id> <N|P> <gate> <src> <drn> <width>'"
                )
            _, tid, ttype_s, gate, src, drn, width_s = toks
            if tid in tran_ids:
                raise NetworkSyntaxError(
                    f"line {lineno}: transistor {tid!r} declared twice"
                )
            tran_ids.add(tid)
            try:
                ttype = TransistorType(ttype_s)
            except ValueError:
                raise NetworkSyntaxError(
                    f"line {lineno}: transistor type must be N or P"
                ) from None
            try:
                width = float(width_s)
            except ValueError:
                raise NetworkSyntaxError(
                    f"line {lineno}: bad width {width_s!r}"
                ) from None
            if width <= 0:
                raise NetworkSyntaxError(f"line {lineno}: width must be > 0")
            for name in (gate, src, drn):
                if name not in node_set:
                    raise DanglingNodeError(
                        f"line {lineno}: transistor {tid!r} references "
                        f"undeclared node {name!r}"
                    )
            if gate in (src, drn):
                raise NetworkSyntaxError(
                    f"line {lineno}: transistor {tid!r} gate shorts its own channel"
                )
            if src == drn:
                raise NetworkSyntaxError(
                    f"line {lineno}: transistor {tid!r} channel terminals are shorted"
                )
            transistors.append(Transistor(tid, ttype, gate, src, drn, width))
        elif word == "io":
            if len(toks) != 3 or toks[1] not in ("in", "out"):
                raise NetworkSyntaxError(
                    f"line {lineno}: expected 'io <in|out> <name>'"
                )
            name = toks[2]
            if name not in node_set:
                raise DanglingNodeError(
                    f"line {lineno}: io references undeclared node {name!r}"
                )
            if name in supplies:
                raise NetworkSyntaxError(f"line {lineno}: supply cannot be io")
            (inputs if toks[1] == "in" else outputs).append(name)
        else:
            raise NetworkSyntaxError(f"line {lineno}: unknown directive {word!r}")

    for name in (VDD, GND):
        if name not in supplies:
            raise MissingSupplyError(f"missing 'supply {name}' declaration")
    for name in storage:
        if name in supplies:
            raise NetworkSyntaxError(f"supply {name} cannot be a storage node")

    return TransistorNetwork(
        nodes=tuple(nodes),
        storage=frozenset(storage),
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        transistors=tuple(transistors),
    )


def load_network_file(path: str) -> TransistorNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return load_network(fh.read())


def bundled_network(variant: FFVariant) -> TransistorNetwork:
    """The shipped transistor-level encoding of one scan flip-flop variant."""
    name = f"{variant.value}_sff.tnl"
    text = (resources.files(__package__) / "data" / name).read_text("utf-8")
    return load_network(text)
