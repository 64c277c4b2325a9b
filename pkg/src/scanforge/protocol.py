"""Cycle-based logic simulation: functional runs and the scan test protocol.

One cycle = apply primary inputs, settle combinational logic (zero delay, in
topological order), clock every flip-flop through a rising then a falling
edge, re-settle, and record the end-of-cycle net values. Toggle counts (0<->1
flips between consecutive end-of-cycle records) feed the power engine.

The scan test per vector is launch-off-shift: n shift cycles with SE=1
feeding SI (leftmost pattern bit first, the nth shift doubling as launch), SE
dropping after the final shift edge, one capture cycle with SE=0, then n
shift cycles with SE=1 unloading at SO. The response bit of the FF nearest SO
is visible at the end of the capture cycle, so a vector's response string is
SO at capture end plus SO at the end of the first n-1 unload cycles. With
pipelining the unload cycles double as the next vector's shift-in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .cells import GateType
from .errors import ScanforgeError
from .ffmodel import Edge, FFState, ff_step
from .logic import X, Bit, and2, buf, inv, nand2, nor2, or2, toggled, xor2
from .netlist import Netlist, PatternSet, PatternWidthError, ScanFF
from .scan import ScanChainPlan, verify_chain


class ProtocolError(ScanforgeError):
    code = "protocol.run"


class Phase(str, Enum):
    SHIFT_IN = "shift_in"
    LAUNCH = "launch"
    CAPTURE = "capture"
    SHIFT_OUT = "shift_out"
    FUNCTIONAL = "functional"


_GATE_FN = {
    GateType.INV: inv,
    GateType.BUF: buf,
    GateType.NAND2: nand2,
    GateType.NOR2: nor2,
    GateType.AND2: and2,
    GateType.OR2: or2,
    GateType.XOR2: xor2,
}


@dataclass(frozen=True)
class CycleRecord:
    index: int
    phase: Phase
    se: Bit
    si: Bit
    so: Bit
    values: dict[str, Bit]  # end-of-cycle net values


@dataclass
class ProtocolTrace:
    netlist_name: str
    records: list[CycleRecord] = field(default_factory=list)
    net_toggles: dict[str, int] = field(default_factory=dict)
    net_drivers: dict[str, GateType] = field(default_factory=dict)
    ff_internal_toggles: dict[str, int] = field(default_factory=dict)
    ff_contentions: dict[str, int] = field(default_factory=dict)
    phase_counts: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def cycles(self) -> int:
        return len(self.records)

    @property
    def total_net_toggles(self) -> int:
        return sum(self.net_toggles.values())

    @property
    def contention_cycles(self) -> int:
        return sum(self.ff_contentions.values())

    def output_waveform(self, net: str) -> list[Bit]:
        return [r.values[net] for r in self.records]


class CycleSim:
    """Incremental simulator; drives one netlist cycle by cycle."""

    def __init__(
        self,
        n: Netlist,
        warmup_cycles: int = 4,
        init: Optional[Mapping[str, Bit]] = None,
    ):
        self.netlist = n
        self.order = n.comb_order()
        self.warmup_cycles = warmup_cycles
        self.values: dict[str, Bit] = {net: X for net in n.nets()}
        self.ff_states: dict[str, FFState] = {}
        ff_ids = {f.id for f in n.flops}
        if init:
            for fid in init:
                if fid not in ff_ids:
                    raise ProtocolError(f"{fid!r} is not a flip-flop instance")
        for f in n.flops:
            variant = f.variant if isinstance(f, ScanFF) else None
            seed = init.get(f.id, X) if init else X
            self.ff_states[f.id] = FFState(variant=variant, master=seed, slave=seed)
            self.values[f.q] = seed
        self.trace = ProtocolTrace(netlist_name=n.name)
        self.trace.net_drivers = {g.out: g.gtype for g in n.gates}
        self.chain_nets: dict[str, str] = {}
        self._warned: set[str] = set()
        self._prev_values: Optional[dict[str, Bit]] = None

    def _eval_comb(self) -> None:
        values = self.values
        for g in self.order:
            fn = _GATE_FN[g.gtype]
            if len(g.ins) == 1:
                values[g.out] = fn(values[g.ins[0]])
            else:
                values[g.out] = fn(values[g.ins[0]], values[g.ins[1]])

    def cycle(self, pi_values: Mapping[str, Bit], phase: Phase) -> CycleRecord:
        values = self.values
        for net, bit in pi_values.items():
            if net not in self.netlist.inputs:
                raise ProtocolError(f"{net!r} is not a primary input")
            values[net] = bit
        self._eval_comb()

        index = len(self.trace.records)
        states = self.ff_states
        for f in self.netlist.flops:
            if isinstance(f, ScanFF):
                di, si, se = values[f.di], values[f.si], values[f.se]
            else:
                di, si, se = values[f.di], X, X
            if (
                index >= self.warmup_cycles
                and di is X
                and f.id not in self._warned
            ):
                self._warned.add(f.id)
                self.trace.warnings.append(
                    f"flip-flop {f.id} data input is X at cycle {index}"
                )
            states[f.id] = ff_step(states[f.id], di, si, se, Edge.RISING)
        for f in self.netlist.flops:
            states[f.id] = ff_step(states[f.id], X, edge=Edge.FALLING)
            values[f.q] = states[f.id].slave
        self._eval_comb()

        snapshot = dict(values)
        trace = self.trace
        if self._prev_values is not None:
            prev = self._prev_values
            for net, now in snapshot.items():
                if toggled(prev[net], now):
                    trace.net_toggles[net] = trace.net_toggles.get(net, 0) + 1
        self._prev_values = snapshot

        record = CycleRecord(
            index=index,
            phase=phase,
            se=self._net_or_x("se"),
            si=self._net_or_x("si"),
            so=self._net_or_x("so"),
            values=snapshot,
        )
        trace.records.append(record)
        trace.phase_counts[phase.value] = trace.phase_counts.get(phase.value, 0) + 1
        return record

    def _net_or_x(self, role: str) -> Bit:
        net = self.chain_nets.get(role)
        return self.values[net] if net is not None else X

    def finish(self) -> ProtocolTrace:
        trace = self.trace
        for fid, st in self.ff_states.items():
            trace.ff_internal_toggles[fid] = st.internal_toggle_count
            if st.variant is not None:
                trace.ff_contentions[fid] = st.contention_count
        return trace


def sim_functional(
    n: Netlist,
    stimulus: Sequence[Mapping[str, Bit]],
    cycles: Optional[int] = None,
    warmup_cycles: int = 4,
    init: Optional[Mapping[str, Bit]] = None,
) -> ProtocolTrace:
    """Run normal operation; per-cycle input maps, last map held if short.

    Scan-inserted netlists are fine here as long as the stimulus pins SE to 0.
    init seeds flip-flop state by instance id; unlisted FFs start at X.
    """
    if cycles is None:
        cycles = len(stimulus)
    if cycles < 1:
        raise ProtocolError("cycles must be >= 1")
    if not stimulus:
        raise ProtocolError("stimulus must supply at least one input map")
    sim = CycleSim(n, warmup_cycles, init)
    for i in range(cycles):
        pi = stimulus[i] if i < len(stimulus) else stimulus[-1]
        sim.cycle(pi, Phase.FUNCTIONAL)
    return sim.finish()


def cycle_budget(chain_length: int, num_vectors: int, pipelined: bool) -> int:
    """Clock cycles to apply and unload all vectors through an n-FF chain."""
    if chain_length < 1:
        raise ProtocolError("chain_length must be >= 1")
    if num_vectors < 1:
        raise ProtocolError("num_vectors must be >= 1")
    if pipelined:
        return chain_length + num_vectors * (chain_length + 1)
    return num_vectors * (2 * chain_length + 1)


def run_scan_test(
    n: Netlist,
    patterns: PatternSet,
    pipelined: bool = False,
    pi_defaults: Optional[Mapping[str, Bit]] = None,
    plan: Optional[ScanChainPlan] = None,
) -> tuple[ProtocolTrace, list[str]]:
    """Shift-in / capture / shift-out every vector; return trace + responses.

    Primary inputs other than SI/SE hold 0 unless overridden in pi_defaults.
    """
    if plan is None:
        plan = verify_chain(n)
    length = len(plan.order)
    if patterns.chain_length != length:
        raise PatternWidthError(
            f"patterns are width {patterns.chain_length}, chain length is {length}"
        )

    base_pi: dict[str, Bit] = {
        net: 0 for net in n.inputs if net not in (plan.chain_in, plan.enable)
    }
    if pi_defaults:
        for net, bit in pi_defaults.items():
            if net not in base_pi:
                raise ProtocolError(f"{net!r} is not a free primary input")
            base_pi[net] = bit

    sim = CycleSim(n)
    sim.chain_nets = {"si": plan.chain_in, "se": plan.enable, "so": plan.chain_out}

    responses = ["" for _ in patterns.vectors]
    pending: Optional[int] = None  # vector index still unloading at SO

    def shift_cycle(si_bit: Bit, phase: Phase) -> CycleRecord:
        pi = dict(base_pi)
        pi[plan.chain_in] = si_bit
        pi[plan.enable] = 1
        return sim.cycle(pi, phase)

    def unload_collect(record: CycleRecord) -> None:
        nonlocal pending
        if pending is not None:
            responses[pending] += "x" if record.so is X else str(record.so)
            if len(responses[pending]) == length:
                pending = None

    for v, vector in enumerate(patterns.vectors):
        for k, ch in enumerate(vector):
            phase = Phase.LAUNCH if k == length - 1 else Phase.SHIFT_IN
            rec = shift_cycle(int(ch), phase)
            if pipelined:
                unload_collect(rec)
        pi = dict(base_pi)
        pi[plan.chain_in] = 0
        pi[plan.enable] = 0
        rec = sim.cycle(pi, Phase.CAPTURE)
        responses[v] = "x" if rec.so is X else str(rec.so)
        # A one-flop chain is fully unloaded by the capture cycle itself.
        pending = v if length > 1 else None
        if not pipelined:
            for _ in range(length):
                rec = shift_cycle(0, Phase.SHIFT_OUT)
                unload_collect(rec)
            pending = None
    if pipelined:
        for _ in range(length):
            rec = shift_cycle(0, Phase.SHIFT_OUT)
            unload_collect(rec)

    return sim.finish(), responses


def flush_chain(n: Netlist, bits: str, plan: Optional[ScanChainPlan] = None) -> str:
    """Shift the bits through the whole chain with no capture; return what SO saw.

    With an n-FF chain the first bit appears at SO at the end of shift cycle
    n, so 2n-1 shift cycles run and the last n end-of-cycle SO values are the
    flushed word.
    """
    if plan is None:
        plan = verify_chain(n)
    length = len(plan.order)
    if len(bits) != length:
        raise PatternWidthError(
            f"flush word is width {len(bits)}, chain length is {length}"
        )
    sim = CycleSim(n)
    sim.chain_nets = {"si": plan.chain_in, "se": plan.enable, "so": plan.chain_out}
    base_pi: dict[str, Bit] = {
        net: 0 for net in n.inputs if net not in (plan.chain_in, plan.enable)
    }
    seen: list[Bit] = []
    stream = [int(c) for c in bits] + [0] * (length - 1)
    for k, b in enumerate(stream):
        pi = dict(base_pi)
        pi[plan.chain_in] = b
        pi[plan.enable] = 1
        rec = sim.cycle(pi, Phase.SHIFT_IN if k < length else Phase.SHIFT_OUT)
        if length <= k + 1 < 2 * length:
            seen.append(rec.so)
    return "".join("x" if b is X else str(b) for b in seen)
