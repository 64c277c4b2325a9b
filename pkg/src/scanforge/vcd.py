"""Waveform dump in VCD text form, one timestep per simulated cycle.

Output is deterministic: nets are sorted by name, identifier codes are
assigned in that order, and only value changes are emitted after the initial
dump, so identical traces produce byte-identical files.
"""

from __future__ import annotations

from .logic import Bit
from .protocol import ProtocolTrace

_ID_CHARS = [chr(c) for c in range(33, 127)]


def _id_code(index: int) -> str:
    base = len(_ID_CHARS)
    out = _ID_CHARS[index % base]
    index //= base
    while index:
        index -= 1
        out = _ID_CHARS[index % base] + out
        index //= base
    return out


def _vcd_bit(b: Bit) -> str:
    return "x" if b is None else str(b)


def to_vcd(trace: ProtocolTrace, module: str = "") -> str:
    if not trace.records:
        raise ValueError("trace has no cycles to dump")
    nets = sorted(trace.records[0].values)
    codes = {net: _id_code(i) for i, net in enumerate(nets)}

    lines = [
        "$version scanforge $end",
        "$timescale 1ns $end",
        f"$scope module {module or trace.netlist_name} $end",
    ]
    for net in nets:
        lines.append(f"$var wire 1 {codes[net]} {net} $end")
    lines.append("$upscope $end")
    lines.append("$enddefinitions $end")

    lines.append("#0")
    lines.append("$dumpvars")
    prev = trace.records[0].values
    for net in nets:
        lines.append(f"{_vcd_bit(prev[net])}{codes[net]}")
    lines.append("$end")

    for record in trace.records[1:]:
        changes = [
            f"{_vcd_bit(record.values[net])}{codes[net]}"
            for net in nets
            if record.values[net] != prev[net]
        ]
        lines.append(f"#{record.index}")
        lines.extend(changes)
        prev = record.values
    return "\n".join(lines) + "\n"


def dump_vcd(trace: ProtocolTrace, path: str, module: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_vcd(trace, module))
