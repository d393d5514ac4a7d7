"""Result persistence: CSV and JSON-lines with exact numeric round-trips.

Numbers are written with 17 significant digits (enough for float64
round-trips).  Files are written atomically (temp file + rename); a failed
write leaves nothing behind.  Writers assume single-writer-per-file: the
runner serializes writes per output path, and concurrent writers must
target distinct files.
"""

from __future__ import annotations

import json
import os
from typing import Iterable, Mapping


def format_number(x) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _render_csv(records: list[Mapping], header_lines: Iterable[str]) -> str:
    lines = [f"# {h}" for h in header_lines]
    if records:
        cols = list(records[0].keys())
        for r in records:
            if list(r.keys()) != cols:
                raise ValueError("records are not homogeneous")
        lines.append(",".join(cols))
        for r in records:
            lines.append(",".join(format_number(r[c]) for c in cols))
    else:
        lines.append("")
    return "\n".join(lines) + "\n"


def _render_jsonl(records: list[Mapping], header_lines: Iterable[str]) -> str:
    out = [json.dumps({"header": list(header_lines)}, sort_keys=True)]
    for r in records:
        out.append(json.dumps(dict(r), sort_keys=True))
    return "\n".join(out) + "\n"


def write_records(records, fmt: str, path: str, header_lines: Iterable[str] = ()) -> None:
    """Write homogeneous records to path as csv or json-lines, atomically."""
    records = [dict(r) for r in records]
    if fmt == "csv":
        text = _render_csv(records, header_lines)
    elif fmt == "json-lines":
        text = _render_jsonl(records, header_lines)
    else:
        raise ValueError(f"format must be 'csv' or 'json-lines', got {fmt!r}")
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_jsonl(path: str) -> list[dict]:
    out = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out
