"""Text serialization of density operators and tabular report output.

State files look like::

    # optional comments
    kind bipartite
    n_paths 2
    0.5 0 0 0 0 0 0.5 0
    ...

``kind`` is ``bipartite`` (N^2 rows) or ``reduced`` (N rows). Each row holds
the row's complex entries as whitespace-separated ``re im`` pairs, written
with 17 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .qcore import BipartiteState, ReducedState, validate_state


class StateFileError(ValueError):
    """Malformed state file; carries the offending line number when known."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = f"{self.path or '<input>'}" + (f":{line}" if line is not None else "")
        super().__init__(f"{where}: {message}")


def format_state(rho: np.ndarray, n_paths: int, kind: str) -> str:
    lines = [f"kind {kind}", f"n_paths {n_paths}"]
    for row in np.asarray(rho, dtype=complex):
        lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def save_state(state, path) -> None:
    kind = "bipartite" if isinstance(state, BipartiteState) else "reduced"
    Path(path).write_text(format_state(state.rho, state.n_paths, kind))


def parse_state_text(text: str, path=None):
    """Parse state-file text into ``(kind, n_paths, matrix)`` without validation."""
    header: dict[str, str] = {}
    rows = []
    dim = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] in ("kind", "n_paths"):
            if rows:
                raise StateFileError(f"header field {fields[0]!r} after matrix rows", path, lineno)
            if len(fields) != 2:
                raise StateFileError(f"expected '{fields[0]} <value>'", path, lineno)
            header[fields[0]] = fields[1]
            continue
        if "n_paths" not in header:
            raise StateFileError("matrix row before 'n_paths' header", path, lineno)
        if dim is None:
            try:
                n = int(header["n_paths"])
            except ValueError:
                raise StateFileError(f"n_paths is not an integer: {header['n_paths']!r}", path) from None
            kind = header.get("kind", "bipartite")
            if kind not in ("bipartite", "reduced"):
                raise StateFileError(f"unknown kind {kind!r}", path)
            dim = n * n if kind == "bipartite" else n
        if len(fields) != 2 * dim:
            raise StateFileError(f"expected {2 * dim} numbers ({dim} re/im pairs), found {len(fields)}", path, lineno)
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise StateFileError(f"bad number ({exc})", path, lineno) from None
        rows.append(np.array(values[0::2]) + 1j * np.array(values[1::2]))
    if dim is None:
        raise StateFileError("no matrix rows", path)
    if len(rows) != dim:
        raise StateFileError(f"expected {dim} rows, found {len(rows)}", path)
    return header.get("kind", "bipartite"), int(header["n_paths"]), np.array(rows)


def load_state(path) -> BipartiteState:
    kind, n, rho = parse_state_text(Path(path).read_text(), path)
    if kind != "bipartite":
        raise StateFileError("expected a bipartite state file", path)
    return validate_state(rho, n)


def load_reduced(path) -> ReducedState:
    kind, n, rho = parse_state_text(Path(path).read_text(), path)
    if kind != "reduced":
        raise StateFileError("expected a reduced (single-particle) state file", path)
    return ReducedState.from_matrix(rho, n)


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def rows_to_csv(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row[h]) for h in header])
    return buf.getvalue()


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def save_report(report, path, fmt: str = "json") -> None:
    """Write a :class:`~interfvis.optimizer.VisibilityReport` as JSON or a one-row CSV."""
    data = report.as_dict()
    if fmt == "json":
        text = to_json(data)
    elif fmt == "csv":
        text = rows_to_csv([data], REPORT_CSV_HEADER)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    Path(path).write_text(text)


REPORT_CSV_HEADER = [
    "n_paths",
    "v_a",
    "v_b",
    "v_ab",
    "v_a_tilde",
    "v_b_tilde",
    "v_ab_tilde",
    "margin_a",
    "margin_b",
    "violation",
]
