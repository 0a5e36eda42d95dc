"""Reference fragmentation schemes used for cross-checks and benchmarks.

Four classic constructions sit behind the same split/reconstruct shape:

* perfect secret sharing: every byte becomes a point on a fresh random
  polynomial, any k of n points recover it, fewer reveal nothing;
* matrix dispersal: data times a Vandermonde generator matrix, compact and
  recoverable from any k rows, but patterns in the input survive in the
  fragments when the matrix is reused;
* encrypt-then-disperse: symmetric encryption, matrix dispersal of the
  ciphertext, and perfect sharing of the key embedded in the fragments;
* all-or-nothing: the key is masked with a digest of the ciphertext, so no
  fragment is useful until every ciphertext byte is present; parity rows
  extend the k parts to n.

The cipher and digest are pluggable; the defaults bind AES-128-CTR and
SHA-256.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .erasure import ParityParams, parity_fragments
from .errors import ParameterError, ThresholdError
from .gf256 import MUL_TABLE, inv, invert_matrix, mul
from .erasure import vandermonde


class SchemeId(str, Enum):
    SSS = "sss"
    IDA = "ida"
    SSMS = "ssms"
    AONT_RS = "aont-rs"
    PROPOSED = "proposed"


# ---------------------------------------------------------------------------
# cipher / digest plumbing
# ---------------------------------------------------------------------------


class AesCtrCipher:
    """AES-128 in CTR mode; the nonce travels with each fragment."""

    key_size = 16
    nonce_size = 16

    def generate_key(self, rng: random.Random) -> bytes:
        return rng.randbytes(self.key_size)

    def encrypt(self, key: bytes, data: bytes, rng: random.Random) -> tuple[bytes, bytes]:
        nonce = rng.randbytes(self.nonce_size)
        enc = Cipher(algorithms.AES(key), modes.CTR(nonce)).encryptor()
        return enc.update(data) + enc.finalize(), nonce

    def decrypt(self, key: bytes, nonce: bytes, data: bytes) -> bytes:
        dec = Cipher(algorithms.AES(key), modes.CTR(nonce)).decryptor()
        return dec.update(data) + dec.finalize()


class NullCipher:
    """Identity cipher for composition tests; never use outside tests."""

    key_size = 16
    nonce_size = 0

    def generate_key(self, rng: random.Random) -> bytes:
        return rng.randbytes(self.key_size)

    def encrypt(self, key: bytes, data: bytes, rng: random.Random) -> tuple[bytes, bytes]:
        return data, b""

    def decrypt(self, key: bytes, nonce: bytes, data: bytes) -> bytes:
        return data


def sha256_digest(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


# ---------------------------------------------------------------------------
# fragment records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SssFragment:
    x: int  # evaluation point, 1..n
    data: bytes
    k: int
    n: int
    payload_length: int

    @property
    def index(self) -> int:
        return self.x - 1


@dataclass(frozen=True)
class IdaFragment:
    index: int
    row: bytes  # the generator matrix row this fragment was combined with
    data: bytes
    k: int
    n: int
    payload_length: int


@dataclass(frozen=True)
class SsmsFragment:
    index: int
    row: bytes
    key_x: int
    key_share: bytes
    nonce: bytes
    data: bytes
    k: int
    n: int
    payload_length: int


@dataclass(frozen=True)
class AontFragment:
    index: int  # indices >= k are parity rows
    data: bytes
    k: int
    n: int
    payload_length: int
    package_length: int
    key_length: int
    nonce: bytes


# ---------------------------------------------------------------------------
# Shamir secret sharing
# ---------------------------------------------------------------------------

_SSS_CHUNK = 4 << 20


def sss_split(secret: bytes, k: int, n: int, rng: random.Random) -> list[SssFragment]:
    """Share a byte string so any k of n fragments reconstruct it.

    Per byte position a fresh polynomial of degree k-1 with the secret byte
    as constant term is evaluated at x = 1..n; fragment t carries all the
    values at x = t.
    """
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > 255:
        raise ParameterError(f"field exhausted: n must be at most 255, got {n}")
    if len(secret) == 0:
        raise ParameterError("nothing to share")
    length = len(secret)
    data = np.frombuffer(secret, dtype=np.uint8)
    shares = [np.empty(length, dtype=np.uint8) for _ in range(n)]
    # chunked so coefficient storage stays bounded for large payloads
    for lo in range(0, length, _SSS_CHUNK):
        hi = min(lo + _SSS_CHUNK, length)
        span = hi - lo
        coeffs = [
            np.frombuffer(rng.randbytes(span), dtype=np.uint8) for _ in range(k - 1)
        ]
        for t in range(n):
            x = t + 1
            acc = np.zeros(span, dtype=np.uint8)
            for c in reversed(coeffs):
                acc = MUL_TABLE[x][acc] ^ c
            acc = MUL_TABLE[x][acc] ^ data[lo:hi]
            shares[t][lo:hi] = acc
    return [
        SssFragment(x=t + 1, data=shares[t].tobytes(), k=k, n=n, payload_length=length)
        for t in range(n)
    ]


def sss_reconstruct(fragments: list[SssFragment] | list[tuple[int, bytes]], k: int) -> bytes:
    """Lagrange-interpolate the shared bytes at x = 0."""
    pairs = [
        (f.x, f.data) if isinstance(f, SssFragment) else (int(f[0]), bytes(f[1]))
        for f in fragments
    ]
    if len(pairs) < k:
        raise ThresholdError(f"need at least {k} fragments, got {len(pairs)}")
    xs = [x for x, _ in pairs]
    if len(set(xs)) != len(xs):
        raise ParameterError(f"duplicate x coordinates: {sorted(xs)}")
    lengths = {len(d) for _, d in pairs}
    if len(lengths) > 1:
        raise ParameterError(f"fragment lengths differ: {sorted(lengths)}")
    out = np.zeros(lengths.pop(), dtype=np.uint8)
    for t, (xt, data) in enumerate(pairs):
        num, den = 1, 1
        for u, (xu, _) in enumerate(pairs):
            if u != t:
                num = mul(num, xu)
                den = mul(den, xt ^ xu)
        weight = mul(num, inv(den))
        out ^= MUL_TABLE[weight][np.frombuffer(data, dtype=np.uint8)]
    return out.tobytes()


# ---------------------------------------------------------------------------
# information dispersal
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdaMatrix:
    """n x k generator whose every k x k row submatrix is invertible."""

    rows: np.ndarray
    construction: str = "vandermonde"

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def k(self) -> int:
        return self.rows.shape[1]


def build_ida_matrix(k: int, n: int) -> IdaMatrix:
    rows = vandermonde(n, k)
    rows.setflags(write=False)
    return IdaMatrix(rows=rows)


def ida_split(data: bytes, k: int, n: int, matrix: IdaMatrix | None = None) -> list[IdaFragment]:
    """Disperse data into n fragments of ceil(|d|/k) bytes, any k recover it."""
    if matrix is None:
        matrix = build_ida_matrix(k, n)
    if matrix.n != n or matrix.k != k:
        raise ParameterError(
            f"matrix is {matrix.n}x{matrix.k}, parameters ask {n}x{k}"
        )
    if len(data) == 0:
        raise ParameterError("nothing to disperse")
    length = len(data)
    groups = -(-length // k)
    padded = np.zeros(groups * k, dtype=np.uint8)
    padded[:length] = np.frombuffer(data, dtype=np.uint8)
    cols = padded.reshape(groups, k)
    out = []
    for t in range(n):
        acc = np.zeros(groups, dtype=np.uint8)
        for s in range(k):
            coeff = int(matrix.rows[t, s])
            if coeff:
                acc ^= MUL_TABLE[coeff][cols[:, s]]
        out.append(
            IdaFragment(
                index=t,
                row=matrix.rows[t].tobytes(),
                data=acc.tobytes(),
                k=k,
                n=n,
                payload_length=length,
            )
        )
    return out


def ida_reconstruct(fragments: list[IdaFragment]) -> bytes:
    """Invert the k x k submatrix formed by the received rows."""
    if not fragments:
        raise ThresholdError("no fragments")
    k = fragments[0].k
    if any(f.k != k or f.payload_length != fragments[0].payload_length for f in fragments):
        raise ParameterError("fragments carry inconsistent parameters")
    if len(fragments) < k:
        raise ThresholdError(f"need at least {k} fragments, got {len(fragments)}")
    chosen = fragments[:k]
    matrix = np.stack([np.frombuffer(f.row, dtype=np.uint8) for f in chosen])
    inverse = invert_matrix(matrix)
    stack = [np.frombuffer(f.data, dtype=np.uint8) for f in chosen]
    groups = len(stack[0])
    cols = np.empty((groups, k), dtype=np.uint8)
    for s in range(k):
        acc = np.zeros(groups, dtype=np.uint8)
        for t in range(k):
            coeff = int(inverse[s, t])
            if coeff:
                acc ^= MUL_TABLE[coeff][stack[t]]
        cols[:, s] = acc
    return cols.reshape(-1)[: fragments[0].payload_length].tobytes()


# ---------------------------------------------------------------------------
# encrypt-then-disperse (key shared alongside)
# ---------------------------------------------------------------------------


def ssms_split(
    data: bytes,
    k: int,
    n: int,
    rng: random.Random,
    cipher: AesCtrCipher | NullCipher | None = None,
) -> list[SsmsFragment]:
    """Encrypt, disperse the ciphertext, and embed one key share per fragment."""
    cipher = cipher or AesCtrCipher()
    key = cipher.generate_key(rng)
    ciphertext, nonce = cipher.encrypt(key, data, rng)
    body = ida_split(ciphertext, k, n)
    key_shares = sss_split(key, k, n, rng)
    return [
        SsmsFragment(
            index=t,
            row=body[t].row,
            key_x=key_shares[t].x,
            key_share=key_shares[t].data,
            nonce=nonce,
            data=body[t].data,
            k=k,
            n=n,
            payload_length=len(data),
        )
        for t in range(n)
    ]


def ssms_reconstruct(
    fragments: list[SsmsFragment], cipher: AesCtrCipher | NullCipher | None = None
) -> bytes:
    cipher = cipher or AesCtrCipher()
    if not fragments:
        raise ThresholdError("no fragments")
    k = fragments[0].k
    if len(fragments) < k:
        raise ThresholdError(f"need at least {k} fragments, got {len(fragments)}")
    length = fragments[0].payload_length
    body = [
        IdaFragment(
            index=f.index, row=f.row, data=f.data, k=f.k, n=f.n, payload_length=length
        )
        for f in fragments
    ]
    ciphertext = ida_reconstruct(body)
    key = sss_reconstruct([(f.key_x, f.key_share) for f in fragments], k)
    return cipher.decrypt(key, fragments[0].nonce, ciphertext)


# ---------------------------------------------------------------------------
# all-or-nothing transform + parity
# ---------------------------------------------------------------------------


def aont_rs_split(
    data: bytes,
    k: int,
    n: int,
    rng: random.Random,
    cipher: AesCtrCipher | NullCipher | None = None,
    digest=sha256_digest,
) -> list[AontFragment]:
    """Mask the key with a ciphertext digest, cut into k parts, add parity."""
    cipher = cipher or AesCtrCipher()
    key = cipher.generate_key(rng)
    if len(digest(b"")) < len(key):
        raise ParameterError("digest is shorter than the key")
    ciphertext, nonce = cipher.encrypt(key, data, rng)
    mask = digest(ciphertext)[: len(key)]
    masked_key = bytes(a ^ b for a, b in zip(key, mask))
    package = ciphertext + masked_key
    part = -(-len(package) // k)
    package = package + b"\x00" * (part * k - len(package))
    parts = [package[i * part : (i + 1) * part] for i in range(k)]

    common = dict(
        k=k,
        n=n,
        payload_length=len(data),
        package_length=len(ciphertext) + len(key),
        key_length=len(key),
        nonce=nonce,
    )
    out = [AontFragment(index=t, data=parts[t], **common) for t in range(k)]
    if n > k:
        for pf in parity_fragments(parts, ParityParams(k=k, n=n)):
            out.append(AontFragment(index=pf.index, data=pf.data, **common))
    return out


def aont_rs_reconstruct(
    fragments: list[AontFragment],
    cipher: AesCtrCipher | NullCipher | None = None,
    digest=sha256_digest,
) -> bytes:
    cipher = cipher or AesCtrCipher()
    if not fragments:
        raise ThresholdError("no fragments")
    k, n = fragments[0].k, fragments[0].n
    primaries: dict[int, bytes] = {}
    extras: list[tuple[int, bytes]] = []
    for f in fragments:
        if f.index < k:
            primaries[f.index] = f.data
        else:
            extras.append((f.index, f.data))
    if len(primaries) < k:
        if len(primaries) + len(extras) < k:
            raise ThresholdError(
                f"need at least {k} fragments, got {len(primaries) + len(extras)}"
            )
        rows = [(i, d) for i, d in primaries.items()] + extras
        recovered = rs_decode_parts(rows, k, n)
        primaries = dict(enumerate(recovered))
    package = b"".join(primaries[i] for i in range(k))
    package = package[: fragments[0].package_length]
    key_length = fragments[0].key_length
    ciphertext, masked_key = package[:-key_length], package[-key_length:]
    mask = digest(ciphertext)[:key_length]
    key = bytes(a ^ b for a, b in zip(masked_key, mask))
    return cipher.decrypt(key, fragments[0].nonce, ciphertext)


def rs_decode_parts(rows: list[tuple[int, bytes]], k: int, n: int) -> list[bytes]:
    from .erasure import rs_decode

    return rs_decode(rows, ParityParams(k=k, n=n))
