"""
Diagnostics CSV: one DiagnosticsRecord per row in a fixed column order.
"""

import csv
from collections.abc import Iterable
from pathlib import Path

import numpy as np
from django.conf import settings

from ..exceptions import SchemaError
from ..numerics.functionals import COLUMNS, DiagnosticsRecord


class DiagnosticsCsvService:
    def __init__(self, digits: int | None = None):
        self.digits = digits or settings.BOUSSINESQ_CSV_DIGITS

    def format_value(self, value: float) -> str:
        return format(float(value), f".{self.digits}g")

    def format_row(self, record: DiagnosticsRecord) -> list[str]:
        return [self.format_value(v) for v in record.as_row()]

    def write(self, path: str | Path, records: Iterable[DiagnosticsRecord]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            for record in records:
                writer.writerow(self.format_row(record))
        return path

    def append(self, path: str | Path, record: DiagnosticsRecord) -> None:
        path = Path(path)
        if not path.exists():
            self.write(path, [record])
            return
        with path.open("a", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(self.format_row(record))

    def read_rows(self, path: str | Path) -> list[list[str]]:
        path = Path(path)
        try:
            with path.open(newline="") as fh:
                rows = list(csv.reader(fh))
        except OSError as e:
            raise SchemaError(f"Cannot read diagnostics {path}: {e}") from e
        if not rows:
            raise SchemaError(f"{path} is empty")
        header = [name.strip() for name in rows[0]]
        if header != COLUMNS:
            missing = [c for c in COLUMNS if c not in header]
            extra = [c for c in header if c not in COLUMNS]
            raise SchemaError(
                f"{path} columns do not match the diagnostics schema "
                f"(missing={missing}, unexpected={extra})"
            )
        return rows[1:]

    def read(self, path: str | Path) -> dict[str, np.ndarray]:
        """Columns keyed by name."""
        body = self.read_rows(path)
        try:
            table = np.array([[float(v) for v in row] for row in body if row], dtype=float)
        except ValueError as e:
            raise SchemaError(f"{path} has a non-numeric value: {e}") from e
        if table.size == 0:
            table = np.empty((0, len(COLUMNS)))
        if table.shape[1] != len(COLUMNS):
            raise SchemaError(f"{path} rows have {table.shape[1]} fields, expected {len(COLUMNS)}")
        return {name: table[:, i] for i, name in enumerate(COLUMNS)}

    def read_records(self, path: str | Path) -> list[DiagnosticsRecord]:
        series = self.read(path)
        return [
            DiagnosticsRecord(*(float(series[name][i]) for name in COLUMNS))
            for i in range(series["t"].size)
        ]

    def truncate_after(self, path: str | Path, t: float) -> int:
        """Drop rows later than t; returns how many rows remain."""
        path = Path(path)
        rows = self.read_rows(path)
        kept = [row for row in rows if row and float(row[0]) <= t]
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            writer.writerows(kept)
        return len(kept)
