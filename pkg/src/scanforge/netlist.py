"""Structural netlist data model plus the .snl and .pat file formats.

A netlist is a flat module of 1/2-input gates, plain D flip-flops, and scan
flip-flops, all clocked by one implicit global net CLK (never written in the
file). Nets are implicitly declared by first use; ports are declared by
``input``/``output`` lines. Declaration order is meaningful: it defines the
default scan-stitch order and is preserved by the serializer.

Grammar (.snl), one directive per line, '#' starts a comment:

    module <name>
    input <net> [<net> ...]
    output <net> [<net> ...]
    gate <id> <TYPE> <out> <in> [<in>]
    dff <id> <Q> <DI>
    scanff <id> <MUX|GDI|APPROX> <Q> <DI> <SI> <SE>
    endmodule

Pattern files (.pat) hold one bit vector per line, leftmost bit shifted
first, with an optional ``-> <expected>`` response suffix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .cells import FFVariant, GateType
from .errors import ScanforgeError

CLK_NET = "CLK"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_$.\[\]]*\Z")
_TOKEN_RE = re.compile(r"\S+")


class NetlistSyntaxError(ScanforgeError):
    """Malformed .snl text; carries the 1-based line and column."""

    code = "netlist.syntax"

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateInstanceError(ScanforgeError):
    code = "netlist.duplicate_instance"


class MultiplyDrivenNetError(ScanforgeError):
    code = "netlist.multiply_driven"


class UndrivenNetError(ScanforgeError):
    """A net is read (instance input or module output) but nothing drives it."""

    code = "netlist.undriven"


class CombinationalCycleError(ScanforgeError):
    code = "netlist.comb_cycle"


class PatternSyntaxError(ScanforgeError):
    code = "patterns.syntax"


class PatternWidthError(ScanforgeError):
    code = "patterns.width"


@dataclass(frozen=True)
class Gate:
    id: str
    gtype: GateType
    out: str
    ins: tuple[str, ...]

    @property
    def output_net(self) -> str:
        return self.out

    @property
    def input_nets(self) -> tuple[str, ...]:
        return self.ins


@dataclass(frozen=True)
class Dff:
    id: str
    q: str
    di: str

    @property
    def output_net(self) -> str:
        return self.q

    @property
    def input_nets(self) -> tuple[str, ...]:
        return (self.di,)


@dataclass(frozen=True)
class ScanFF:
    id: str
    variant: FFVariant
    q: str
    di: str
    si: str
    se: str

    @property
    def output_net(self) -> str:
        return self.q

    @property
    def input_nets(self) -> tuple[str, ...]:
        return (self.di, self.si, self.se)


Instance = Union[Gate, Dff, ScanFF]
Flop = Union[Dff, ScanFF]


@dataclass(frozen=True)
class Netlist:
    name: str
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    instances: tuple[Instance, ...] = ()

    @property
    def gates(self) -> tuple[Gate, ...]:
        return tuple(i for i in self.instances if isinstance(i, Gate))

    @property
    def flops(self) -> tuple[Flop, ...]:
        """Flip-flops in declaration order (the default scan-chain order)."""
        return tuple(i for i in self.instances if isinstance(i, (Dff, ScanFF)))

    def drivers(self) -> dict[str, Instance]:
        """Map net -> driving instance (module inputs are not included)."""
        return {i.output_net: i for i in self.instances}

    def nets(self) -> set[str]:
        nets = set(self.inputs) | set(self.outputs)
        for inst in self.instances:
            nets.add(inst.output_net)
            nets.update(inst.input_nets)
        return nets

    def comb_order(self) -> tuple[Gate, ...]:
        """Gates in topological order (flip-flops cut). Raises on a cycle."""
        return _topo_gates(self)


def _topo_gates(n: Netlist) -> tuple[Gate, ...]:
    gates = n.gates
    produced_by = {g.out: idx for idx, g in enumerate(gates)}
    indegree = [0] * len(gates)
    readers: list[list[int]] = [[] for _ in gates]
    for idx, g in enumerate(gates):
        for net in g.ins:
            src = produced_by.get(net)
            if src is not None:
                indegree[idx] += 1
                readers[src].append(idx)
    ready = [i for i in range(len(gates)) if indegree[i] == 0]
    order: list[Gate] = []
    head = 0
    while head < len(ready):
        idx = ready[head]
        head += 1
        order.append(gates[idx])
        for succ in readers[idx]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                ready.append(succ)
    if len(order) != len(gates):
        stuck = sorted(gates[i].id for i in range(len(gates)) if indegree[i] > 0)
        raise CombinationalCycleError(
            f"combinational cycle through gates: {', '.join(stuck)}"
        )
    return tuple(order)


def validate_netlist(n: Netlist) -> None:
    """Enforce the structural invariants; raises the specific error kind."""
    seen_ids: set[str] = set()
    for inst in n.instances:
        if inst.id in seen_ids:
            raise DuplicateInstanceError(f"duplicate instance id {inst.id!r}")
        seen_ids.add(inst.id)

    driven: set[str] = set()
    for net in n.inputs:
        if net in driven:
            raise MultiplyDrivenNetError(f"net {net!r} declared input twice")
        driven.add(net)
    for inst in n.instances:
        out = inst.output_net
        if out in driven:
            raise MultiplyDrivenNetError(
                f"net {out!r} has more than one driver (instance {inst.id!r})"
            )
        driven.add(out)

    for inst in n.instances:
        for net in inst.input_nets:
            if net not in driven:
                raise UndrivenNetError(
                    f"net {net!r} read by instance {inst.id!r} has no driver"
                )
    for net in n.outputs:
        if net not in driven:
            raise UndrivenNetError(f"output net {net!r} has no driver")

    _topo_gates(n)


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


@dataclass
class _Tok:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[list[_Tok]]:
    """Token rows for nonblank lines, with 1-based positions."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        toks = [
            _Tok(m.group(), lineno, m.start() + 1) for m in _TOKEN_RE.finditer(body)
        ]
        if toks:
            rows.append(toks)
    return rows


def _require_ident(tok: _Tok, what: str) -> str:
    if not _IDENT_RE.match(tok.text):
        raise NetlistSyntaxError(
            f"bad {what} {tok.text!r}", tok.line, tok.column
        )
    if tok.text == CLK_NET:
        raise NetlistSyntaxError(
            f"{CLK_NET} is the implicit clock and may not be named", tok.line, tok.column
        )
    return tok.text


def _require_arity(row: list[_Tok], count: int) -> None:
    if len(row) != count:
        raise NetlistSyntaxError(
            f"{row[0].text!r} expects {count - 1} arguments, got {len(row) - 1}",
            row[0].line,
            row[0].column,
        )


def parse_netlist(text: str) -> Netlist:
    rows = _tokenize(text)
    if not rows:
        raise NetlistSyntaxError("empty file, expected 'module'", 1)
    pos = 0

    head = rows[pos]
    if head[0].text != "module":
        raise NetlistSyntaxError(
            f"expected 'module', got {head[0].text!r}", head[0].line, head[0].column
        )
    _require_arity(head, 2)
    name = _require_ident(head[1], "module name")
    pos += 1

    inputs: list[str] = []
    outputs: list[str] = []
    instances: list[Instance] = []
    output_decls: set[str] = set()
    ended = False

    while pos < len(rows):
        row = rows[pos]
        pos += 1
        word = row[0].text
        if word == "endmodule":
            _require_arity(row, 1)
            ended = True
            break
        if word == "module":
            raise NetlistSyntaxError("nested module", row[0].line, row[0].column)
        if word == "input" or word == "output":
            if len(row) < 2:
                raise NetlistSyntaxError(
                    f"{word!r} expects at least one net", row[0].line, row[0].column
                )
            for tok in row[1:]:
                net = _require_ident(tok, "net name")
                if word == "input":
                    inputs.append(net)
                else:
                    if net in output_decls:
                        raise NetlistSyntaxError(
                            f"net {net!r} declared output twice", tok.line, tok.column
                        )
                    output_decls.add(net)
                    outputs.append(net)
        elif word == "gate":
            if len(row) < 4:
                raise NetlistSyntaxError(
                    "'gate' expects <id> <TYPE> <out> <in>...", row[0].line, row[0].column
                )
            gid = _require_ident(row[1], "instance id")
            try:
                gtype = GateType(row[2].text.upper())
            except ValueError:
                raise NetlistSyntaxError(
                    f"unknown gate type {row[2].text!r}", row[2].line, row[2].column
                ) from None
            _require_arity(row, 4 + gtype.num_inputs)
            out = _require_ident(row[3], "net name")
            ins = tuple(_require_ident(tok, "net name") for tok in row[4:])
            instances.append(Gate(gid, gtype, out, ins))
        elif word == "dff":
            _require_arity(row, 4)
            instances.append(
                Dff(
                    _require_ident(row[1], "instance id"),
                    _require_ident(row[2], "net name"),
                    _require_ident(row[3], "net name"),
                )
            )
        elif word == "scanff":
            _require_arity(row, 7)
            fid = _require_ident(row[1], "instance id")
            try:
                variant = FFVariant(row[2].text.lower())
            except ValueError:
                raise NetlistSyntaxError(
                    f"unknown scan flip-flop variant {row[2].text!r}",
                    row[2].line,
                    row[2].column,
                ) from None
            nets = [_require_ident(tok, "net name") for tok in row[3:7]]
            instances.append(ScanFF(fid, variant, *nets))
        else:
            raise NetlistSyntaxError(
                f"unknown directive {word!r}", row[0].line, row[0].column
            )

    if not ended:
        last = rows[-1][0]
        raise NetlistSyntaxError("missing 'endmodule'", last.line, last.column)
    if pos < len(rows):
        tok = rows[pos][0]
        raise NetlistSyntaxError("text after 'endmodule'", tok.line, tok.column)

    n = Netlist(
        name=name,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        instances=tuple(instances),
    )
    validate_netlist(n)
    return n


def serialize_netlist(n: Netlist) -> str:
    lines = [f"module {n.name}"]
    if n.inputs:
        lines.append("input " + " ".join(n.inputs))
    if n.outputs:
        lines.append("output " + " ".join(n.outputs))
    for inst in n.instances:
        if isinstance(inst, Gate):
            lines.append(
                f"gate {inst.id} {inst.gtype.value} {inst.out} " + " ".join(inst.ins)
            )
        elif isinstance(inst, Dff):
            lines.append(f"dff {inst.id} {inst.q} {inst.di}")
        else:
            lines.append(
                f"scanff {inst.id} {inst.variant.value.upper()} "
                f"{inst.q} {inst.di} {inst.si} {inst.se}"
            )
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PatternSet:
    chain_length: int
    vectors: tuple[str, ...]
    expected: tuple[Optional[str], ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.expected:
            object.__setattr__(self, "expected", (None,) * len(self.vectors))


_BITS_RE = re.compile(r"[01]+\Z")


def parse_patterns(text: str, chain_length: int) -> PatternSet:
    """Parse a .pat file; every vector must be exactly chain_length bits."""
    if chain_length < 1:
        raise ValueError("chain_length must be >= 1")
    vectors: list[str] = []
    expected: list[Optional[str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw).strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) == 1:
            vec, exp = parts[0], None
        elif len(parts) == 3 and parts[1] == "->":
            vec, exp = parts[0], parts[2]
        else:
            raise PatternSyntaxError(
                f"line {lineno}: expected '<bits>' or '<bits> -> <bits>'"
            )
        for s in (vec, exp):
            if s is None:
                continue
            if not _BITS_RE.match(s):
                raise PatternSyntaxError(
                    f"line {lineno}: illegal character in {s!r} (bits are 0/1)"
                )
            if len(s) != chain_length:
                raise PatternWidthError(
                    f"line {lineno}: vector {s!r} has width {len(s)}, "
                    f"chain length is {chain_length}"
                )
        vectors.append(vec)
        expected.append(exp)
    return PatternSet(
        chain_length=chain_length, vectors=tuple(vectors), expected=tuple(expected)
    )


def load_netlist(path: str) -> Netlist:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_netlist(fh.read())


def save_netlist(n: Netlist, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_netlist(n))


def load_patterns(path: str, chain_length: int) -> PatternSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_patterns(fh.read(), chain_length)
