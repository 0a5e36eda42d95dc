"""Arithmetic in GF(2^8).

The field is fixed to the reduction polynomial x^8+x^4+x^3+x+1 (0x11B) with
generator 0x03 for the log/antilog tables, so fragment files are bit-exact
across builds.  Tables are built once at import; all operations are pure.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

REDUCTION_POLY = 0x11B
GENERATOR = 0x03


def _build_tables() -> tuple[np.ndarray, np.ndarray]:
    # exp is doubled so exp[log a + log b] never needs a mod-255 reduction
    exp = np.zeros(510, dtype=np.uint8)
    log = np.zeros(256, dtype=np.uint8)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        # multiply by the generator 0x03 = x * 2 ^ x, reduced mod 0x11B
        x2 = x << 1
        if x2 & 0x100:
            x2 ^= REDUCTION_POLY
        x = (x2 ^ x) & 0xFF
    exp[255:510] = exp[0:255]
    return exp, log


EXP_TABLE, LOG_TABLE = _build_tables()

# 64 KiB product table: MUL_TABLE[a, b] == mul(a, b).  Row a doubles as the
# multiply-by-a lookup table used by the vectorized codec paths.
MUL_TABLE = EXP_TABLE[LOG_TABLE[:, None].astype(np.intp) + LOG_TABLE[None, :].astype(np.intp)]
MUL_TABLE[0, :] = 0
MUL_TABLE[:, 0] = 0
MUL_TABLE.setflags(write=False)

INV_TABLE = np.zeros(256, dtype=np.uint8)
INV_TABLE[1:] = EXP_TABLE[255 - LOG_TABLE[1:].astype(np.intp)]
INV_TABLE.setflags(write=False)


def add(a: int, b: int) -> int:
    """Field addition: bitwise XOR (its own inverse)."""
    return a ^ b


def mul(a: int, b: int) -> int:
    """Field multiplication via the log/antilog tables."""
    return int(MUL_TABLE[a, b])


def inv(a: int) -> int:
    """Multiplicative inverse; zero has none."""
    if a == 0:
        raise ZeroDivisionError("no inverse of zero")
    return int(INV_TABLE[a])


def power(a: int, e: int) -> int:
    """a**e in the field, e >= 0."""
    if e == 0:
        return 1
    if a == 0:
        return 0
    return int(EXP_TABLE[(int(LOG_TABLE[a]) * e) % 255])


def horner_eval(coeffs: list[int] | bytes, x: int) -> int:
    """Evaluate c_0 + c_1*x + ... + c_m*x^m, coefficients constant-first."""
    if len(coeffs) == 0:
        raise ParameterError("empty coefficient list")
    acc = 0
    for c in reversed(coeffs):
        acc = mul(acc, x) ^ c
    return acc


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over the field; small matrices only (n, k <= 255)."""
    rows, inner = a.shape
    inner2, cols = b.shape
    if inner != inner2:
        raise ParameterError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    out = np.zeros((rows, cols), dtype=np.uint8)
    for t in range(inner):
        out ^= MUL_TABLE[np.ix_(a[:, t], b[t, :])]
    return out


def invert_matrix(m: np.ndarray) -> np.ndarray:
    """Invert a square matrix over the field by Gauss-Jordan elimination."""
    n = m.shape[0]
    if m.shape != (n, n):
        raise ParameterError(f"matrix is not square: {m.shape}")
    a = m.astype(np.uint8).copy()
    out = np.eye(n, dtype=np.uint8)
    for col in range(n):
        pivot = col + int(np.argmax(a[col:, col] != 0)) if a[col:, col].any() else -1
        if pivot < 0 or a[pivot, col] == 0:
            raise ParameterError("singular matrix")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            out[[col, pivot]] = out[[pivot, col]]
        scale = inv(int(a[col, col]))
        a[col] = MUL_TABLE[scale, a[col]]
        out[col] = MUL_TABLE[scale, out[col]]
        for row in range(n):
            if row != col and a[row, col] != 0:
                factor = int(a[row, col])
                a[row] ^= MUL_TABLE[factor, a[col]]
                out[row] ^= MUL_TABLE[factor, out[col]]
    return out
