# -*- encoding: utf-8 -*-
"""
Report serialization: canonical hashes, CSV with comment headers, JSON summaries.

Every output file carries the tool version and the hash of the config that
produced it. Floats are written with ``repr`` (shortest round-trip form, '.'
decimal separator, no locale), so identical inputs give byte-identical files.

File names follow ``{experiment}-{spec_hash}-{params}.csv``.

Usage:
    name = report_filename("reflectionless", spec, {"eps": 1e-4})
    write_csv(out_dir / name, {"config_hash": h}, report.columns(), report.rows())
"""

import csv
import hashlib
import io
import json
import re
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, TextIO, Union

from matrix_weyl import __version__
from matrix_weyl.potentials import PotentialSpec

PathLike = Union[str, Path]


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj: Any, size: int = 8) -> str:
    """Hex blake2b digest of the canonical JSON form of obj."""
    return hashlib.blake2b(canonical_json(obj).encode(), digest_size=size).hexdigest()


def spec_hash(spec: PotentialSpec) -> str:
    return digest(spec.to_dict())


def _param_token(value: Any) -> str:
    if isinstance(value, float):
        text = f"{value:g}"
    elif isinstance(value, (list, tuple)):
        text = "+".join(_param_token(v) for v in value)
    else:
        text = str(value)
    return re.sub(r"[^A-Za-z0-9.+-]", "", text)


def report_filename(
    experiment: str, spec: PotentialSpec, params: Mapping[str, Any], suffix: str = ".csv",
) -> str:
    """``{experiment}-{spec_hash}-{k=v_...}{suffix}`` with parameters in key order."""
    tokens = "_".join(f"{k}={_param_token(params[k])}" for k in sorted(params))
    stem = f"{experiment}-{spec_hash(spec)}"
    return f"{stem}-{tokens}{suffix}" if tokens else f"{stem}{suffix}"


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, complex):
        raise TypeError("complex values must be split into _re/_im columns")
    return str(value)


def header_lines(meta: Mapping[str, Any]) -> list[str]:
    lines = [f"# tool: matrix-weyl {__version__}"]
    lines += [f"# {k}: {meta[k]}" for k in sorted(meta)]
    return lines


def write_csv_stream(
    stream: TextIO,
    meta: Mapping[str, Any],
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> None:
    for line in header_lines(meta):
        stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def write_csv(
    path: PathLike,
    meta: Mapping[str, Any],
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> Path:
    """Write a CSV file with a comment header; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        write_csv_stream(fh, meta, columns, rows)
    return path


def csv_text(meta: Mapping[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    write_csv_stream(buf, meta, columns, rows)
    return buf.getvalue()


def read_csv(path: PathLike) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Inverse of write_csv: (header meta, columns, rows as strings)."""
    meta: dict[str, str] = {}
    body: list[str] = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition(": ")
                meta[key] = value
            else:
                body.append(line)
    reader = list(csv.reader(body))
    return meta, (reader[0] if reader else []), reader[1:]


def write_json(path: PathLike, payload: Mapping[str, Any], meta: Mapping[str, Any]) -> Path:
    """JSON summary with the same metadata as the CSV header under ``meta``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"meta": {"tool": f"matrix-weyl {__version__}", **meta}, **payload}
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path
