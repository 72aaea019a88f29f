"""CSV report emission with a fixed, byte-reproducible format."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

__all__ = ["emit_report", "format_value"]


def format_value(x):
    """Render one cell: floats with 15 significant digits, booleans lower case."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if x == 0:
            return "0"
        return f"{x:.15g}"
    if isinstance(x, (complex, np.complexfloating)):
        return f"{format_value(x.real)}{'+' if x.imag >= 0 else '-'}{format_value(abs(x.imag))}j"
    return str(x)


def emit_report(rows, path, header, comments=()):
    """Write ``rows`` under ``header`` as UTF-8 CSV with LF line endings.

    ``rows`` holds sequences aligned with ``header`` or dicts keyed by it.
    ``comments`` are written first as ``# ...`` lines (used for seeds).
    Returns the path written.  An unwritable path raises ``OSError``.
    """
    header = list(header)
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                extra = set(row) - set(header)
                if extra:
                    raise ValueError(f"row has keys outside the header: {sorted(extra)}")
                row = [row.get(h) for h in header]
            elif len(row) != len(header):
                raise ValueError(f"row of length {len(row)} does not match header of {len(header)}")
            writer.writerow([format_value(x) for x in row])
    return path
