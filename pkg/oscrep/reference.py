"""Embedded benchmark rows: printed parameters, printed rho, printed
energies, and the bracketed direct-integration reference where present.

The numbers live in ``data/reference_tables.csv`` as the printed strings;
this module parses them into typed rows and can export the dataset back
out losslessly (byte-identical CSV).  Table 1 prints the energy itself;
tables 2-4 print -E, so the signed ``e_paper``/``e_ad`` here are the
negated cell values.  Rows flagged ``strong_limit`` carry the g -> inf
coefficient C instead of an energy; the l = 1 and l = 3 entries of that
block are additionally flagged ``excluded`` because their printed values
are dimensionally inconsistent with the l = 0 one and are not asserted.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

from .model import CoulombPower, Escp

_FIELDS = ("table", "row", "kind", "param1", "param2", "l",
           "rho_paper", "E_paper", "E_ad", "flags")


@dataclass(frozen=True)
class ReferenceRow:
    table: int
    row: int
    kind: str
    param1: str  # printed g (table 1) or B (tables 2-4)
    param2: str  # printed nu or c
    l: int
    rho_paper: float | None
    e_paper: float | None  # signed, solver convention
    e_ad: float | None     # bracketed reference energy, signed
    flags: tuple[str, ...]
    raw: tuple[str, ...]   # the CSV cells, for lossless export

    @property
    def spec(self):
        if self.kind == "coulomb-power":
            return CoulombPower(g=float(self.param1), nu=float(self.param2))
        return Escp(B=float(self.param1), c=float(self.param2))

    @property
    def strong_limit(self) -> bool:
        return "strong_limit" in self.flags

    @property
    def excluded(self) -> bool:
        return "excluded" in self.flags

    @property
    def rho_asserted(self) -> bool:
        return self.rho_paper is not None and "rho_not_asserted" not in self.flags


def _parse(cells: tuple[str, ...]) -> ReferenceRow:
    table = int(cells[0])
    sign = 1.0 if table == 1 else -1.0
    rho = float(cells[6]) if cells[6] else None
    e_paper = sign * float(cells[7]) if cells[7] else None
    e_ad = sign * float(cells[8]) if cells[8] else None
    return ReferenceRow(
        table=table,
        row=int(cells[1]),
        kind=cells[2],
        param1=cells[3],
        param2=cells[4],
        l=int(cells[5]),
        rho_paper=rho,
        e_paper=e_paper,
        e_ad=e_ad,
        flags=tuple(f for f in cells[9].split(";") if f),
        raw=cells,
    )


def data_text() -> str:
    return (resources.files("oscrep") / "data" / "reference_tables.csv").read_text()


def load_rows(table: int | None = None) -> tuple[ReferenceRow, ...]:
    reader = csv.reader(io.StringIO(data_text()))
    header = tuple(next(reader))
    if header != _FIELDS:
        raise ValueError(f"unexpected reference header {header!r}")
    rows = tuple(_parse(tuple(cells)) for cells in reader if cells)
    if table is None:
        return rows
    return tuple(r for r in rows if r.table == table)


def dump_rows(rows) -> str:
    """Inverse of load_rows: reproduces the data file byte for byte."""
    lines = [",".join(_FIELDS)]
    lines.extend(",".join(r.raw) for r in rows)
    return "\n".join(lines) + "\n"
