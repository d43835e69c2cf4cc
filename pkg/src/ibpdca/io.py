"""File formats: matrix CSV, ``T3`` tensor text files and binary PGM images.

Matrix CSV
    Comma-separated rows of decimal floats, no header.
T3
    First line ``T3 <n1> <n2> <n3>``, then ``n1*n2*n3`` whitespace-separated
    values, frontal slice by frontal slice, each slice in row-major order.
PGM
    Binary ``P5`` with ``maxval <= 255``; pixels are read as floats in
    ``[0, 255]`` without normalization.

Floats are written with 17 significant digits so reading back reproduces
the array bit for bit.
"""

import os

import numpy as np

from .exceptions import FormatError, NonFiniteError


def _fmt(v):
    return format(float(v), ".17g")


def _check_finite(X, what):
    if not np.isfinite(X).all():
        raise NonFiniteError(f"{what} contains NaN or infinite values")


def write_matrix_csv(path, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise FormatError(f"matrix CSV needs a 2-D array, got shape {X.shape}")
    _check_finite(X, "matrix")
    with open(path, "w") as fh:
        for row in X:
            fh.write(",".join(_fmt(v) for v in row))
            fh.write("\n")


def read_matrix_csv(path):
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise FormatError(f"{path}: empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FormatError(f"{path}: rows have different lengths")
    X = np.array(rows, dtype=np.float64)
    _check_finite(X, path)
    return X


def write_t3(path, T):
    T = np.asarray(T, dtype=np.float64)
    if T.ndim != 3:
        raise FormatError(f"T3 needs a 3-D array, got shape {T.shape}")
    _check_finite(T, "tensor")
    n1, n2, n3 = T.shape
    with open(path, "w") as fh:
        fh.write(f"T3 {n1} {n2} {n3}\n")
        for k in range(n3):
            for row in T[:, :, k]:
                fh.write(" ".join(_fmt(v) for v in row))
                fh.write("\n")


def read_t3(path):
    with open(path) as fh:
        header = fh.readline().split()
        body = fh.read().split()
    if len(header) != 4 or header[0] != "T3":
        raise FormatError(f"{path}: expected header 'T3 <n1> <n2> <n3>'")
    try:
        n1, n2, n3 = (int(h) for h in header[1:])
    except ValueError:
        raise FormatError(f"{path}: non-integer dimensions in header") from None
    if min(n1, n2, n3) < 1:
        raise FormatError(f"{path}: dimensions must be positive")
    if len(body) != n1 * n2 * n3:
        raise FormatError(f"{path}: expected {n1 * n2 * n3} values, found {len(body)}")
    try:
        vals = np.array([float(v) for v in body])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    _check_finite(vals, path)
    return np.ascontiguousarray(vals.reshape(n3, n1, n2).transpose(1, 2, 0))


def _pgm_tokens(data, count):
    """Read ``count`` header tokens, skipping ``#`` comments; return tokens and offset."""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise FormatError("truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    (magic, w, h, maxval), offset = _pgm_tokens(data, 4)
    if magic != b"P5":
        raise FormatError(f"{path}: only binary P5 PGM is supported")
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise FormatError(f"{path}: malformed PGM header") from None
    if w < 1 or h < 1 or not 0 < maxval <= 255:
        raise FormatError(f"{path}: unsupported PGM dimensions or maxval")
    raster = data[offset:offset + w * h]
    if len(raster) != w * h:
        raise FormatError(f"{path}: expected {w * h} pixels, found {len(raster)}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).astype(np.float64)


def write_pgm(path, X):
    """Write a matrix as an 8-bit P5 image, rounding and clipping to [0, 255]."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise FormatError(f"PGM needs a 2-D array, got shape {X.shape}")
    _check_finite(X, "image")
    pix = np.clip(np.rint(X), 0, 255).astype(np.uint8)
    h, w = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())


def read_array(path):
    """Read a CSV, T3 or PGM file, chosen by extension."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".csv":
        return read_matrix_csv(path)
    if ext == ".t3":
        return read_t3(path)
    if ext == ".pgm":
        return read_pgm(path)
    raise FormatError(f"unknown file extension {ext!r} (expected .csv, .t3 or .pgm)")


def write_array(path, X):
    X = np.asarray(X)
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".csv":
        return write_matrix_csv(path, X)
    if ext == ".t3":
        return write_t3(path, X)
    if ext == ".pgm":
        return write_pgm(path, X)
    raise FormatError(f"unknown file extension {ext!r} (expected .csv, .t3 or .pgm)")
