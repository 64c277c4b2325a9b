"""Flip-flop and gate characterization data.

Holds per-variant scan flip-flop timing/power/area parameters for the two
design stages (schematic-level and layout-extracted), default combinational
gate delay/energy numbers, technology scaling, and the published comparison
rows used by the `compare` report.

The flip-flop numbers are stored exactly as characterized. Some rows print a
propagation delay t_pd that differs from t_su + t_cq by more than rounding;
those rows are flagged (`ModeTiming.inconsistent`) rather than repaired, so
downstream consumers can decide which figure to trust.

Libraries load from `.cellcfg` files (INI syntax, sections like
``[gate.NAND2]`` and ``[ff.APPROX.post_layout.functional]``); any key present
in the file overrides the builtin value.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional

from .errors import ScanforgeError

ENV_CELLS = "SCANFORGE_CELLS"

# Printed t_pd and t_su + t_cq may disagree by up to this much before a row
# is flagged as inconsistent. The epsilon absorbs float noise so a sum that
# is off by exactly the tolerance does not flag.
CONSISTENCY_TOL_NS = 0.005
_TOL_EPS = 1e-9

F_REF_HZ = 1e9


class CellConfigError(ScanforgeError):
    """Malformed or out-of-range data in a .cellcfg file."""

    code = "cells.config"


class FFVariant(str, Enum):
    MUX = "mux"
    GDI = "gdi"
    APPROX = "approx"

    def __str__(self) -> str:
        return self.value


class Stage(str, Enum):
    PRE_LAYOUT = "pre_layout"
    POST_LAYOUT = "post_layout"

    def __str__(self) -> str:
        return self.value


class Mode(str, Enum):
    FUNCTIONAL = "functional"
    TEST = "test"

    def __str__(self) -> str:
        return self.value


class GateType(str, Enum):
    INV = "INV"
    BUF = "BUF"
    NAND2 = "NAND2"
    NOR2 = "NOR2"
    AND2 = "AND2"
    OR2 = "OR2"
    XOR2 = "XOR2"

    def __str__(self) -> str:
        return self.value

    @property
    def num_inputs(self) -> int:
        return 1 if self in (GateType.INV, GateType.BUF) else 2


@dataclass(frozen=True)
class ModeTiming:
    """One characterized row: a (variant, stage, mode) operating point."""

    t_su: float  # setup time, ns
    t_cq: float  # clock-to-Q delay, ns
    t_pd: float  # printed path delay, ns (nominally t_su + t_cq)
    avg_power_uw: float  # average power at f_ref, microwatts

    def __post_init__(self) -> None:
        if self.t_su < 0:
            raise CellConfigError(f"t_su must be >= 0, got {self.t_su}")
        if self.t_cq <= 0:
            raise CellConfigError(f"t_cq must be > 0, got {self.t_cq}")
        if self.avg_power_uw <= 0:
            raise CellConfigError(f"avg_power must be > 0, got {self.avg_power_uw}")

    @property
    def t_pd_sum(self) -> float:
        """Path delay recomputed as t_su + t_cq."""
        return self.t_su + self.t_cq

    @property
    def inconsistent(self) -> bool:
        """True when printed t_pd disagrees with t_su + t_cq beyond tolerance."""
        return abs(self.t_pd - self.t_pd_sum) > CONSISTENCY_TOL_NS + _TOL_EPS


@dataclass(frozen=True)
class FFVariantParams:
    variant: FFVariant
    stage: Stage
    functional: ModeTiming
    test: ModeTiming
    area: float  # transistor-count units
    f_ref_hz: float = F_REF_HZ

    def mode(self, mode: Mode) -> ModeTiming:
        return self.functional if mode == Mode.FUNCTIONAL else self.test

    def energy_per_cycle_fj(self, mode: Mode) -> float:
        """Energy drawn by one FF in one clock cycle of the given mode.

        Average power is calibrated at f_ref, so energy/cycle = P / f_ref.
        With power in uW and f_ref in Hz the result is in fJ after the 1e9
        unit shuffle (1 uW / 1 GHz = 1 fJ).
        """
        return self.mode(mode).avg_power_uw * 1e9 / self.f_ref_hz


@dataclass(frozen=True)
class GateParams:
    delay_ns: float
    energy_per_toggle_fj: float

    def __post_init__(self) -> None:
        if self.delay_ns <= 0:
            raise CellConfigError(f"gate delay must be > 0, got {self.delay_ns}")
        if self.energy_per_toggle_fj < 0:
            raise CellConfigError(
                f"gate energy must be >= 0, got {self.energy_per_toggle_fj}"
            )


@dataclass(frozen=True)
class ScalingFactors:
    delay_factor: float = 1.0
    power_factor: float = 1.0
    area_factor: float = 1.0

    def __post_init__(self) -> None:
        for name in ("delay_factor", "power_factor", "area_factor"):
            if getattr(self, name) <= 0:
                raise CellConfigError(f"{name} must be > 0, got {getattr(self, name)}")

    def inverse(self) -> "ScalingFactors":
        return ScalingFactors(
            1.0 / self.delay_factor, 1.0 / self.power_factor, 1.0 / self.area_factor
        )


def scale_params(p: FFVariantParams, f: ScalingFactors) -> FFVariantParams:
    """Project params to another technology node by dividing out the factors."""

    def scale_mode(m: ModeTiming) -> ModeTiming:
        return ModeTiming(
            t_su=m.t_su / f.delay_factor,
            t_cq=m.t_cq / f.delay_factor,
            t_pd=m.t_pd / f.delay_factor,
            avg_power_uw=m.avg_power_uw / f.power_factor,
        )

    return replace(
        p,
        functional=scale_mode(p.functional),
        test=scale_mode(p.test),
        area=p.area / f.area_factor,
    )


def _row(t_su: float, t_cq: float, t_pd: float, power: float) -> ModeTiming:
    return ModeTiming(t_su, t_cq, t_pd, power)


# Characterized flip-flop rows, stored verbatim (known t_pd inconsistencies
# included and flagged, never repaired here).
_BUILTIN_FFS: dict[tuple[FFVariant, Stage], FFVariantParams] = {}


def _add_builtin(
    variant: FFVariant,
    stage: Stage,
    functional: ModeTiming,
    test: ModeTiming,
    area: float,
) -> None:
    _BUILTIN_FFS[(variant, stage)] = FFVariantParams(
        variant=variant, stage=stage, functional=functional, test=test, area=area
    )


_add_builtin(
    FFVariant.MUX,
    Stage.PRE_LAYOUT,
    functional=_row(0.058, 0.141, 0.19, 2.65),
    test=_row(0.06, 0.14, 0.2, 2.1),
    area=16,
)
_add_builtin(
    FFVariant.GDI,
    Stage.PRE_LAYOUT,
    functional=_row(0.18, 0.14, 0.32, 0.56),
    test=_row(0.38, 0.13, 0.51, 0.57),
    area=12,
)
_add_builtin(
    FFVariant.APPROX,
    Stage.PRE_LAYOUT,
    functional=_row(0.06, 0.14, 0.2, 0.41),
    test=_row(0.04, 0.14, 0.18, 0.44),
    area=14,
)
_add_builtin(
    FFVariant.MUX,
    Stage.POST_LAYOUT,
    functional=_row(0.088, 0.283, 0.371, 3.62),
    test=_row(0.085, 0.05, 0.365, 3.81),
    area=16,
)
_add_builtin(
    FFVariant.GDI,
    Stage.POST_LAYOUT,
    functional=_row(0.66, 0.284, 1.05, 1.06),
    test=_row(0.77, 0.282, 0.94, 1.37),
    area=12,
)
_add_builtin(
    FFVariant.APPROX,
    Stage.POST_LAYOUT,
    functional=_row(0.055, 0.3, 0.35, 0.51),
    test=_row(0.04, 0.3, 0.34, 0.56),
    area=14,
)

# Synthetic combinational cell data (no published source; see default.cellcfg).
_BUILTIN_GATES: dict[GateType, GateParams] = {
    GateType.INV: GateParams(0.03, 0.3),
    GateType.BUF: GateParams(0.05, 0.4),
    GateType.NAND2: GateParams(0.05, 0.5),
    GateType.NOR2: GateParams(0.06, 0.55),
    GateType.AND2: GateParams(0.07, 0.6),
    GateType.OR2: GateParams(0.08, 0.65),
    GateType.XOR2: GateParams(0.09, 0.8),
}


@dataclass(frozen=True)
class ComparisonRow:
    """One row of the published design-comparison table."""

    label: str
    t_pd: float  # ns
    avg_power_uw: Optional[float]  # None where the source reports no figure
    area: float


_COMPARISON_ROWS: tuple[ComparisonRow, ...] = (
    ComparisonRow("mishra2010modified", 0.077, None, 26),
    ComparisonRow("kumar2009robust", 0.043, 8.98, 33),
    ComparisonRow("ahlawat2018high", 0.674, None, 38),
    ComparisonRow("mux", 0.36, 3.81, 16),
    ComparisonRow("gdi", 0.94, 1.37, 12),
    ComparisonRow("approx", 0.34, 0.56, 14),
)


def comparison_table() -> tuple[ComparisonRow, ...]:
    """The six published comparison rows (prior designs + the three variants)."""
    return _COMPARISON_ROWS


@dataclass(frozen=True)
class CellLibrary:
    """Immutable lookup table of FF params and gate params."""

    ffs: Mapping[tuple[FFVariant, Stage], FFVariantParams]
    gates: Mapping[GateType, GateParams]

    def ff(self, variant: FFVariant, stage: Stage) -> FFVariantParams:
        return self.ffs[(variant, stage)]

    def gate(self, gate_type: GateType) -> GateParams:
        return self.gates[gate_type]

    @staticmethod
    def builtin() -> "CellLibrary":
        return CellLibrary(ffs=dict(_BUILTIN_FFS), gates=dict(_BUILTIN_GATES))


def builtin_params(variant: FFVariant, stage: Stage) -> FFVariantParams:
    return _BUILTIN_FFS[(variant, stage)]


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise CellConfigError(f"[{section}] {key}: not a number: {raw!r}") from None


def load_library(path: str | Path) -> CellLibrary:
    """Load a .cellcfg file as overrides on top of the builtin library.

    Sections: ``[gate.<TYPE>]`` with keys delay_ns / energy_per_toggle_fj,
    and ``[ff.<VARIANT>.<stage>.<mode>]`` with keys t_su / t_cq / t_pd /
    avg_power_uw (ns, ns, ns, uW). ``[ff.<VARIANT>.<stage>]`` accepts an
    ``area`` key. Unspecified keys keep their builtin values.
    """
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise CellConfigError(f"cannot read cell config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise CellConfigError(f"bad cell config {path}: {exc}") from exc

    ffs = dict(_BUILTIN_FFS)
    gates = dict(_BUILTIN_GATES)

    for section in parser.sections():
        parts = section.split(".")
        values = dict(parser.items(section))
        if parts[0] == "gate" and len(parts) == 2:
            try:
                gtype = GateType(parts[1].upper())
            except ValueError:
                raise CellConfigError(f"unknown gate type in [{section}]") from None
            base = gates[gtype]
            gates[gtype] = GateParams(
                delay_ns=_parse_float(section, "delay_ns", values["delay_ns"])
                if "delay_ns" in values
                else base.delay_ns,
                energy_per_toggle_fj=_parse_float(
                    section, "energy_per_toggle_fj", values["energy_per_toggle_fj"]
                )
                if "energy_per_toggle_fj" in values
                else base.energy_per_toggle_fj,
            )
        elif parts[0] == "ff" and len(parts) in (3, 4):
            try:
                variant = FFVariant(parts[1].lower())
                stage = Stage(parts[2].lower())
            except ValueError:
                raise CellConfigError(
                    f"unknown variant or stage in [{section}]"
                ) from None
            params = ffs[(variant, stage)]
            if len(parts) == 3:
                if "area" in values:
                    params = replace(
                        params, area=_parse_float(section, "area", values["area"])
                    )
            else:
                try:
                    mode = Mode(parts[3].lower())
                except ValueError:
                    raise CellConfigError(f"unknown mode in [{section}]") from None
                base = params.mode(mode)
                row = ModeTiming(
                    t_su=_parse_float(section, "t_su", values["t_su"])
                    if "t_su" in values
                    else base.t_su,
                    t_cq=_parse_float(section, "t_cq", values["t_cq"])
                    if "t_cq" in values
                    else base.t_cq,
                    t_pd=_parse_float(section, "t_pd", values["t_pd"])
                    if "t_pd" in values
                    else base.t_pd,
                    avg_power_uw=_parse_float(
                        section, "avg_power_uw", values["avg_power_uw"]
                    )
                    if "avg_power_uw" in values
                    else base.avg_power_uw,
                )
                params = replace(params, **{mode.value: row})
            ffs[(variant, stage)] = params
        else:
            raise CellConfigError(f"unrecognized section [{section}]")

    return CellLibrary(ffs=ffs, gates=gates)


def resolve_library(
    explicit: "CellLibrary | str | Path | None" = None,
) -> CellLibrary:
    """Pick the cell library: explicit object or path, else $SCANFORGE_CELLS, else builtin."""
    if isinstance(explicit, CellLibrary):
        return explicit
    path = explicit or os.environ.get(ENV_CELLS)
    if path:
        return load_library(path)
    return CellLibrary.builtin()
