"""Scan-chain design-for-test toolkit.

Parses gate-level netlists, stitches flip-flops into scan chains, simulates
the shift/capture test protocol, validates transistor-level scan flip-flop
encodings against the behavioral model, and reports timing and power across
the multiplexer-based, gate-diffusion-input, and approximate flip-flop
variants.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .cells import (
    CellConfigError,
    CellLibrary,
    ComparisonRow,
    FFVariant,
    FFVariantParams,
    GateParams,
    GateType,
    Mode,
    ModeTiming,
    ScalingFactors,
    Stage,
    builtin_params,
    comparison_table,
    load_library,
    resolve_library,
    scale_params,
)
from .errors import ScanforgeError
from .ffmodel import Edge, FFState, ff_cycle, ff_selected_input, ff_step
from .logic import X, Bit
from .netlist import (
    CombinationalCycleError,
    Dff,
    DuplicateInstanceError,
    Gate,
    MultiplyDrivenNetError,
    Netlist,
    NetlistSyntaxError,
    PatternSet,
    PatternSyntaxError,
    PatternWidthError,
    ScanFF,
    UndrivenNetError,
    load_netlist,
    load_patterns,
    parse_netlist,
    parse_patterns,
    save_netlist,
    serialize_netlist,
)
from .power import (
    PowerModelError,
    PowerReport,
    estimate_power,
    power_gain,
    weighted_transition_count,
)
from .protocol import (
    CycleRecord,
    CycleSim,
    Phase,
    ProtocolError,
    ProtocolTrace,
    cycle_budget,
    flush_chain,
    run_scan_test,
    sim_functional,
)
from .scan import (
    BrokenChainError,
    MixedVariantError,
    MultipleChainsError,
    NameCollisionError,
    ScanChainPlan,
    ScanPlanError,
    default_plan,
    insert_scan,
    verify_chain,
)
from .sta import (
    TimingError,
    TimingReport,
    analyze_timing,
    time_gain,
    zero_cloud_netlist,
)
from .switchsim import (
    DanglingNodeError,
    MissingSupplyError,
    NetworkSyntaxError,
    NodeValue,
    OscillationError,
    StimulusError,
    SwitchFF,
    Transistor,
    TransistorNetwork,
    TransistorType,
    bundled_network,
    load_network,
    load_network_file,
    run_clocked,
    run_cycles,
    settle,
)
from .vcd import dump_vcd, to_vcd

__all__ = [
    "__version__",
    "Bit",
    "X",
    "ScanforgeError",
    "FFVariant",
    "Stage",
    "Mode",
    "GateType",
    "ModeTiming",
    "FFVariantParams",
    "GateParams",
    "ScalingFactors",
    "CellLibrary",
    "CellConfigError",
    "ComparisonRow",
    "builtin_params",
    "comparison_table",
    "scale_params",
    "load_library",
    "resolve_library",
    "Netlist",
    "Gate",
    "Dff",
    "ScanFF",
    "PatternSet",
    "NetlistSyntaxError",
    "DuplicateInstanceError",
    "MultiplyDrivenNetError",
    "UndrivenNetError",
    "CombinationalCycleError",
    "PatternSyntaxError",
    "PatternWidthError",
    "parse_netlist",
    "serialize_netlist",
    "load_netlist",
    "save_netlist",
    "parse_patterns",
    "load_patterns",
    "Edge",
    "FFState",
    "ff_selected_input",
    "ff_step",
    "ff_cycle",
    "TransistorType",
    "Transistor",
    "TransistorNetwork",
    "NodeValue",
    "NetworkSyntaxError",
    "DanglingNodeError",
    "MissingSupplyError",
    "StimulusError",
    "OscillationError",
    "SwitchFF",
    "settle",
    "run_clocked",
    "run_cycles",
    "load_network",
    "load_network_file",
    "bundled_network",
    "ScanChainPlan",
    "ScanPlanError",
    "NameCollisionError",
    "BrokenChainError",
    "MultipleChainsError",
    "MixedVariantError",
    "default_plan",
    "insert_scan",
    "verify_chain",
    "Phase",
    "CycleRecord",
    "CycleSim",
    "ProtocolTrace",
    "ProtocolError",
    "sim_functional",
    "run_scan_test",
    "flush_chain",
    "cycle_budget",
    "TimingReport",
    "TimingError",
    "analyze_timing",
    "time_gain",
    "zero_cloud_netlist",
    "PowerReport",
    "PowerModelError",
    "estimate_power",
    "power_gain",
    "weighted_transition_count",
    "to_vcd",
    "dump_vcd",
]
