"""Binary extension fields GF(2^l) with elements stored as ints / uint64."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

# Low-weight irreducible moduli, stored without the leading x^l term.
DEFAULT_TAILS = {
    8: 0x1B,  # x^8 + x^4 + x^3 + x + 1
    16: 0x2B,  # x^16 + x^5 + x^3 + x + 1
    32: 0x8D,  # x^32 + x^7 + x^3 + x^2 + 1
    64: 0x1B,  # x^64 + x^4 + x^3 + x + 1
}


def clmul(a: int, b: int) -> int:
    """Carry-less product of two nonnegative ints."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def is_irreducible(modulus: int) -> bool:
    """Rabin's test over GF(2); ``modulus`` includes its leading term."""
    deg = modulus.bit_length() - 1
    if deg < 1:
        return False

    def mulmod(a: int, b: int) -> int:
        return poly_mod(clmul(a, b), modulus)

    def frob(x: int, times: int) -> int:
        for _ in range(times):
            x = mulmod(x, x)
        return x

    def gcd(a: int, b: int) -> int:
        while b:
            a, b = b, poly_mod(a, b)
        return a

    if frob(2, deg) != 2:
        return False
    primes = [p for p in range(2, deg + 1) if deg % p == 0 and all(p % q for q in range(2, p))]
    for p in primes:
        h = frob(2, deg // p) ^ 2
        if gcd(modulus, h) != 1:
            return False
    return True


@numba.njit(cache=True)
def _clmul64(a, b):
    lo = np.uint64(0)
    hi = np.uint64(0)
    one = np.uint64(1)
    for i in range(64):
        if (b >> np.uint64(i)) & one:
            lo ^= a << np.uint64(i)
            if i > 0:
                hi ^= a >> np.uint64(64 - i)
    return lo, hi


@numba.njit(cache=True)
def gf_mul_u64(a, b, bits, tail):
    """Product in GF(2^bits) modulo x^bits + tail."""
    if bits == 64:
        lo, hi = _clmul64(a, b)
        while hi != 0:
            l2, h2 = _clmul64(hi, tail)
            lo ^= l2
            hi = h2
        return lo
    lo, hi = _clmul64(a, b)
    # fold everything at or above x^bits back down via x^bits = tail
    mask = (np.uint64(1) << np.uint64(bits)) - np.uint64(1)
    while True:
        top = (lo >> np.uint64(bits)) | (hi << np.uint64(64 - bits))
        if top == 0:
            return lo
        l2, h2 = _clmul64(top, tail)
        lo = (lo & mask) ^ l2
        hi = h2


@dataclass(frozen=True)
class GF2Field:
    bits: int = 64
    tail: int | None = None

    def __post_init__(self):
        if not 1 <= self.bits <= 64:
            raise ValueError("field size must be between 2^1 and 2^64")
        if self.tail is None:
            if self.bits not in DEFAULT_TAILS:
                raise ValueError(f"no default modulus for GF(2^{self.bits}); pass tail explicitly")
            object.__setattr__(self, "tail", DEFAULT_TAILS[self.bits])
        if not 0 < self.tail < 1 << self.bits:
            raise ValueError("modulus tail must be a nonzero polynomial of degree below bits")

    @property
    def order(self) -> int:
        return 1 << self.bits

    @property
    def modulus(self) -> int:
        return (1 << self.bits) | self.tail

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return poly_mod(clmul(a, b), self.modulus)

    def pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.pow(a, self.order - 2)

    def random(self, rng: np.random.Generator, size=None):
        """Uniform elements as uint64 (a scalar int when ``size`` is None)."""
        if self.bits == 64:
            x = rng.integers(0, 2**64, size=size, dtype=np.uint64, endpoint=False)
        else:
            x = rng.integers(0, 1 << self.bits, size=size, dtype=np.uint64)
        return int(x) if size is None else x

    def mul_fast(self, a: int, b: int) -> int:
        return int(gf_mul_u64(np.uint64(a), np.uint64(b), self.bits, np.uint64(self.tail)))
