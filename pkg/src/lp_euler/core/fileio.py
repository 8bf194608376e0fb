"""
Binary field files.

A field file starts with one line of JSON::

    {"L": 1.0, "crc32": "1a2b3c4d", "d": 2, "kind": "spectral",
     "layout": "row-major", "n": 64, "scalar": "f64le"}

followed by the raw little-endian payload: ``n^d`` doubles of samples for
``kind="real"``, or ``2 n^d`` doubles (interleaved real and imaginary parts)
for ``kind="spectral"``. The CRC32 covers the payload only. Spectral files
round-trip bit for bit.

Vector fields are stored as a directory holding one field file per
component plus a ``manifest.json``.
"""

import json
import os
import zlib

import numpy as np

from .grid import Grid
from .field import SpectralField, VectorField, forward_transform
from ..errors import FieldFormatError


__all__ = [
    "encode_field",
    "decode_field",
    "write_field",
    "read_field",
    "write_vector_field",
    "read_vector_field",
]

_HEADER_KEYS = ("L", "crc32", "d", "kind", "layout", "n", "scalar")


def _crc32(payload):
    return format(zlib.crc32(payload) & 0xFFFFFFFF, "08x")


def encode_field(field, kind="spectral"):
    """Return the bytes of a field file for ``field``."""
    if kind == "spectral":
        payload = np.ascontiguousarray(field.coeffs, dtype="<c16")
        payload = payload.view("<f8").tobytes()
    elif kind == "real":
        payload = np.ascontiguousarray(field.samples(), dtype="<f8")
        payload = payload.tobytes()
    else:
        raise ValueError(f"kind must be 'real' or 'spectral', got {kind!r}")
    header = {
        "L": field.grid.L,
        "crc32": _crc32(payload),
        "d": field.grid.d,
        "kind": kind,
        "layout": "row-major",
        "n": field.grid.n,
        "scalar": "f64le",
    }
    line = json.dumps(header, sort_keys=True) + "\n"
    return line.encode("ascii") + payload


def decode_field(data, kind="scalar"):
    """Parse the bytes of a field file, see :func:`read_field`."""
    newline = data.find(b"\n")
    if newline < 0:
        raise FieldFormatError("header", "missing header line")
    try:
        header = json.loads(data[:newline].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise FieldFormatError("header", f"malformed header ({err})")
    if not isinstance(header, dict):
        raise FieldFormatError("header", "header is not a JSON object")
    missing = [key for key in _HEADER_KEYS if key not in header]
    if missing:
        raise FieldFormatError("header", f"missing keys {missing}")
    if header["d"] not in (1, 2, 3):
        raise FieldFormatError("dimension", "unsupported dimension")
    if header["layout"] != "row-major" or header["scalar"] != "f64le":
        raise FieldFormatError("header", "unsupported layout or scalar")
    if header["kind"] not in ("real", "spectral"):
        raise FieldFormatError("header", f"unknown kind {header['kind']!r}")
    try:
        grid = Grid(d=header["d"], n=header["n"], L=header["L"])
    except (TypeError, ValueError) as err:
        raise FieldFormatError("header", str(err))

    payload = data[newline + 1:]
    doubles = grid.size * (2 if header["kind"] == "spectral" else 1)
    if len(payload) != 8 * doubles:
        raise FieldFormatError(
            "payload length",
            f"payload length {len(payload)} bytes, expected {8 * doubles}",
        )
    if _crc32(payload) != str(header["crc32"]).lower():
        raise FieldFormatError("checksum", "CRC32 mismatch")

    values = np.frombuffer(payload, dtype="<f8")
    if header["kind"] == "spectral":
        coeffs = values.view("<c16").reshape(grid.shape)
        return SpectralField(grid, coeffs, kind=kind)
    return forward_transform(values.reshape(grid.shape), grid, kind=kind)


def write_field(field, path, kind="spectral"):
    """
    Write a scalar field to ``path``.

    Parameters
    ----------
    field: :class:`.SpectralField`
    path: str or path-like
    kind: str, optional
        ``"spectral"`` (default, bit exact) or ``"real"`` (samples).
    """
    with open(path, "wb") as file:
        file.write(encode_field(field, kind=kind))


def read_field(path, kind="scalar"):
    """
    Read a field file.

    Raises
    ------
    FieldFormatError
        With ``code`` ``"header"``, ``"dimension"``, ``"payload length"``
        or ``"checksum"``.
    """
    with open(path, "rb") as file:
        data = file.read()
    return decode_field(data, kind=kind)


def write_vector_field(u, directory, kind="spectral"):
    """
    Write one field file per component into ``directory`` and a
    ``manifest.json`` listing them. Returns the list of written paths.
    """
    os.makedirs(directory, exist_ok=True)
    names = [f"u{a}.fld" for a in range(u.d)]
    paths = []
    for name, comp in zip(names, u):
        path = os.path.join(directory, name)
        write_field(comp, path, kind=kind)
        paths.append(path)
    manifest = {"components": names, "grid": u.grid.to_dict()}
    manifest_path = os.path.join(directory, "manifest.json")
    with open(manifest_path, "w") as file:
        json.dump(manifest, file, sort_keys=True, indent=2)
        file.write("\n")
    paths.append(manifest_path)
    return paths


def read_vector_field(directory):
    """Read a vector field written by :func:`write_vector_field`."""
    manifest_path = os.path.join(directory, "manifest.json")
    try:
        with open(manifest_path, "r") as file:
            manifest = json.load(file)
        names = manifest["components"]
    except (json.JSONDecodeError, KeyError, TypeError) as err:
        raise FieldFormatError("header", f"bad vector manifest ({err})")
    return VectorField(
        [read_field(os.path.join(directory, name)) for name in names]
    )
