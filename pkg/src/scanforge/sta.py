"""Static timing analysis: longest combinational path and clock limits.

The clock-period model is t_clk_min = t_cq + t_comb + t_su with t_comb the
largest sum of gate delays over any register-to-register, input-to-register,
register-to-output, or input-to-output path. Scan shifting adds direct Q->SI
hops, so test mode admits zero-gate register-to-register paths.

Per-variant flip-flop path delay is tracked two ways: t_pd_ns is the library
row's published figure and t_pd_sum_ns is t_su + t_cq recomputed from the
stored fields. Cross-variant gains quote the published figure; both appear in
reports so a discrepancy between them is visible rather than silent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cells import (
    CellLibrary,
    FFVariant,
    Mode,
    Stage,
    resolve_library,
)
from .errors import ScanforgeError
from .netlist import Gate, Netlist, ScanFF


class TimingError(ScanforgeError):
    code = "sta.analysis"


@dataclass(frozen=True)
class TimingReport:
    netlist_name: str
    variant: FFVariant
    stage: Stage
    mode: Mode
    t_comb_ns: float
    t_su_ns: float
    t_cq_ns: float
    t_clk_min_ns: float
    f_max_hz: float
    t_pd_ns: float  # library row's published su+cq figure
    t_pd_sum_ns: float  # t_su_ns + t_cq_ns recomputed
    critical_path: tuple[str, ...]  # instance ids, launch/capture FFs included


def _longest_paths(
    n: Netlist,
    mode: Mode,
    input_arrival_ns: float,
    output_required_ns: float,
    gate_delay: dict[str, float],
) -> tuple[float, tuple[str, ...]]:
    """Longest gate-delay sum over the four path classes, with its path."""
    # dist[net] = best delay from any launch point to this net
    # pred[net] = (gate id, chosen input net) for path reconstruction
    dist: dict[str, float] = {}
    origin: dict[str, Optional[str]] = {}
    pred: dict[str, tuple[str, str]] = {}

    for net in n.inputs:
        dist[net] = input_arrival_ns
        origin[net] = None
    for f in n.flops:
        dist[f.q] = 0.0
        origin[f.q] = f.id

    for g in n.comb_order():
        best_in = None
        best = None
        for net in g.ins:
            if net in dist and (best is None or dist[net] > best):
                best = dist[net]
                best_in = net
        if best is None:
            continue
        d = best + gate_delay[g.id]
        if g.out not in dist or d > dist[g.out]:
            dist[g.out] = d
            origin[g.out] = origin[best_in]
            pred[g.out] = (g.id, best_in)

    # endpoint candidates: (delay, net, capturing instance id or None)
    ends: list[tuple[float, str, Optional[str]]] = []
    for f in n.flops:
        if f.di in dist:
            ends.append((dist[f.di], f.di, f.id))
        if mode is Mode.TEST and isinstance(f, ScanFF) and f.si in dist:
            ends.append((dist[f.si], f.si, f.id))
    for net in n.outputs:
        if net in dist:
            ends.append((dist[net] + output_required_ns, net, None))

    if not ends:
        return 0.0, ()

    t_comb, end_net, capture_id = max(ends, key=lambda e: e[0])
    path: list[str] = [] if capture_id is None else [capture_id]
    net = end_net
    while net in pred:
        gid, net = pred[net]
        path.append(gid)
    if origin.get(net) is not None:
        path.append(origin[net])
    path.reverse()
    return t_comb, tuple(path)


def analyze_timing(
    n: Netlist,
    variant: FFVariant,
    stage: Stage,
    mode: Mode,
    library: Optional[CellLibrary] = None,
    input_arrival_ns: float = 0.0,
    output_required_ns: float = 0.0,
) -> TimingReport:
    """Longest-path analysis of one netlist under one FF variant and mode.

    All flip-flops are timed with the requested variant's parameters, which
    keeps cross-variant comparisons on the same netlist apples to apples.
    """
    lib = resolve_library(library)
    timing = lib.ff(variant, stage).mode(mode)
    gate_delay = {g.id: lib.gate(g.gtype).delay_ns for g in n.gates}

    t_comb, path = _longest_paths(
        n, mode, input_arrival_ns, output_required_ns, gate_delay
    )
    t_clk_min = timing.t_cq + t_comb + timing.t_su
    return TimingReport(
        netlist_name=n.name,
        variant=variant,
        stage=stage,
        mode=mode,
        t_comb_ns=t_comb,
        t_su_ns=timing.t_su,
        t_cq_ns=timing.t_cq,
        t_clk_min_ns=t_clk_min,
        f_max_hz=1e9 / t_clk_min,
        t_pd_ns=timing.t_pd,
        t_pd_sum_ns=timing.t_pd_sum,
        critical_path=path,
    )


def time_gain(reference: TimingReport, candidate: TimingReport) -> float:
    """Flip-flop delay advantage of candidate over reference, in ns.

    Positive means the candidate is faster. The netlist drops out: both
    reports share t_comb, so the difference is pure flip-flop path delay,
    quoted from the library rows' published figures.
    """
    if reference.mode is not candidate.mode or reference.stage is not candidate.stage:
        raise TimingError(
            "time gain requires reports for the same mode and stage, got "
            f"{reference.stage}/{reference.mode} vs {candidate.stage}/{candidate.mode}"
        )
    if reference.netlist_name != candidate.netlist_name:
        raise TimingError(
            "time gain requires reports for the same netlist, got "
            f"{reference.netlist_name!r} vs {candidate.netlist_name!r}"
        )
    return reference.t_pd_ns - candidate.t_pd_ns


def zero_cloud_netlist(variant: FFVariant = FFVariant.MUX) -> Netlist:
    """Two scan FFs wired Q to DI with no gates between: t_comb is zero."""
    return Netlist(
        name="zero_cloud",
        inputs=("SI", "SE"),
        outputs=("Q2",),
        instances=(
            ScanFF("f1", variant, "Q1", "Q2", "SI", "SE"),
            ScanFF("f2", variant, "Q2", "Q1", "Q1", "SE"),
        ),
    )


def path_delay_sum(n: Netlist, path: tuple[str, ...], library: Optional[CellLibrary] = None) -> float:
    """Sum of gate delays along a critical path (FF entries contribute 0)."""
    lib = resolve_library(library)
    by_id = {inst.id: inst for inst in n.instances}
    total = 0.0
    for iid in path:
        inst = by_id[iid]
        if isinstance(inst, Gate):
            total += lib.gate(inst.gtype).delay_ns
    return total
