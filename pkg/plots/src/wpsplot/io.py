"""Artifact readers: documented CSV schemas and the binary field format.

CSV schemas (header-checked, never guessed):

    tails.csv      T,tail_norm
    remainder.csv  t,masked_norm,total_norm,ratio
    classify.csv   t,mask_a,mask_R,masked_norm,ratio,verdict_contrib
    trajectory.csv t,norm,boundary_mass

Field files (.wpf): magic "WPF1", little-endian header
<u32 dim, u32 N, f64 L, u32 c_x, u32 c_xi>, then the complex values
row-major as little-endian complex128.
"""

from __future__ import annotations

import csv
import struct

import numpy as np


class SchemaError(Exception):
    """Input artifact does not match a documented schema."""


def read_csv_table(path, expected_header: list) -> dict:
    """Read a CSV whose header must match exactly; returns column arrays.

    Numeric columns come back as float arrays; non-numeric ones as lists.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}")
    if not rows:
        raise SchemaError(f"{path}: empty file, expected header {','.join(expected_header)}")
    header = rows[0]
    if header != expected_header:
        missing = [c for c in expected_header if c not in header]
        extra = [c for c in header if c not in expected_header]
        raise SchemaError(
            f"{path}: header mismatch; expected {expected_header}, found {header}"
            f" (missing: {missing or 'none'}, unexpected: {extra or 'none'})"
        )
    if len(rows) < 2:
        raise SchemaError(f"{path}: no data rows")
    cols = {name: [] for name in header}
    for lineno, row in enumerate(rows[1:], 2):
        if len(row) != len(header):
            raise SchemaError(f"{path}: line {lineno} has {len(row)} fields, expected {len(header)}")
        for name, val in zip(header, row):
            cols[name].append(val)
    out = {}
    for name, vals in cols.items():
        try:
            out[name] = np.array([float(v) for v in vals])
        except ValueError:
            out[name] = vals
    return out


_FIELD_MAGIC = b"WPF1"


def load_field_file(path) -> dict:
    """Parse a .wpf phase-space field snapshot.

    Returns {"dim", "N", "L", "c_x", "c_xi", "values", "x_axis", "xi_axis"}.
    """
    try:
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _FIELD_MAGIC:
                raise SchemaError(f"{path}: bad magic {magic!r}, expected {_FIELD_MAGIC!r}")
            header = fh.read(24)
            if len(header) != 24:
                raise SchemaError(f"{path}: truncated header")
            dim, n, L, c_x, c_xi = struct.unpack("<IIdII", header)
            payload = fh.read()
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}")
    nx, nxi = n // c_x, n // c_xi
    count = nx**dim * nxi**dim
    values = np.frombuffer(payload, dtype="<c16")
    if values.size != count:
        raise SchemaError(f"{path}: expected {count} values, found {values.size}")
    values = values.reshape((nx,) * dim + (nxi,) * dim)
    dx = 2.0 * L / n
    dxi = np.pi / L
    x_axis = (-L + dx * np.arange(n))[::c_x]
    xi_axis = (dxi * (np.arange(n) - n // 2))[::c_xi]
    return {
        "dim": dim,
        "N": n,
        "L": L,
        "c_x": c_x,
        "c_xi": c_xi,
        "values": values,
        "x_axis": x_axis,
        "xi_axis": xi_axis,
    }
