"""Dense elements of GF(2^l)[Z_2^d] with XOR-convolution products."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .field import GF2Field, gf_mul_u64


@numba.njit(cache=True)
def xor_convolve(a, b, bits, tail):
    size = a.shape[0]
    out = np.zeros(size, dtype=np.uint64)
    for u in range(size):
        au = a[u]
        if au == 0:
            continue
        for v in range(size):
            bv = b[v]
            if bv != 0:
                out[u ^ v] ^= gf_mul_u64(au, bv, bits, tail)
    return out


@numba.njit(cache=True)
def scale_vec(a, c, bits, tail):
    out = np.empty_like(a)
    for i in range(a.shape[0]):
        out[i] = gf_mul_u64(a[i], c, bits, tail)
    return out


@dataclass(frozen=True, eq=False)
class GroupAlgebraElement:
    """Coefficient vector indexed by bit-vectors of length ``dim``."""

    field: GF2Field
    dim: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (1 << self.dim,):
            raise ValueError(f"expected {1 << self.dim} coefficients, got {self.coeffs.shape}")

    @classmethod
    def zero(cls, field: GF2Field, dim: int) -> GroupAlgebraElement:
        return cls(field, dim, np.zeros(1 << dim, dtype=np.uint64))

    @classmethod
    def basis(cls, field: GF2Field, dim: int, index: int, scale: int = 1) -> GroupAlgebraElement:
        c = np.zeros(1 << dim, dtype=np.uint64)
        c[index] = scale
        return cls(field, dim, c)

    @classmethod
    def scalar(cls, field: GF2Field, dim: int, value: int) -> GroupAlgebraElement:
        return cls.basis(field, dim, 0, value)

    def _check(self, other: GroupAlgebraElement) -> None:
        if self.dim != other.dim or self.field != other.field:
            raise ValueError("group algebra elements live in different rings")

    def __add__(self, other: GroupAlgebraElement) -> GroupAlgebraElement:
        self._check(other)
        return GroupAlgebraElement(self.field, self.dim, self.coeffs ^ other.coeffs)

    __sub__ = __add__

    def __mul__(self, other: GroupAlgebraElement) -> GroupAlgebraElement:
        self._check(other)
        f = self.field
        return GroupAlgebraElement(f, self.dim, xor_convolve(self.coeffs, other.coeffs, f.bits, np.uint64(f.tail)))

    def scale(self, c: int) -> GroupAlgebraElement:
        f = self.field
        return GroupAlgebraElement(f, self.dim, scale_vec(self.coeffs, np.uint64(c), f.bits, np.uint64(f.tail)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.dim == other.dim and self.field == other.field and bool(np.array_equal(self.coeffs, other.coeffs))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __repr__(self) -> str:
        nz = {int(i): int(self.coeffs[i]) for i in np.flatnonzero(self.coeffs)}
        return f"GroupAlgebraElement(dim={self.dim}, nonzero={nz})"


def lift_variable(field: GF2Field, dim: int, r: int, v: int) -> GroupAlgebraElement:
    """The substitution r * (e_0 + e_v) used for each input variable."""
    if not 0 < v < 1 << dim:
        raise ValueError("v must be a nonzero vector of the group")
    c = np.zeros(1 << dim, dtype=np.uint64)
    c[0] = r
    c[v] = r
    return GroupAlgebraElement(field, dim, c)
