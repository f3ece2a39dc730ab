"""Two abelian actions on lines, given by integer homomorphisms of F_n.

Row i of the matrix lists the translation of each basis letter on line i.
The core of the product of the two lines is the whole plane or empty, and
its covolume is the index of the image lattice in Z^2.
"""
from __future__ import annotations

from dataclasses import dataclass

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

EMPTY = "EMPTY"
NONEMPTY = "NONEMPTY"


class LineActionError(ValueError):
    def __init__(self, code: str, msg: str):
        super().__init__(f"{code}: {msg}")
        self.code = code


@dataclass(frozen=True)
class LatticeHom:
    matrix: tuple

    @classmethod
    def of(cls, rows) -> "LatticeHom":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if len(rows) != 2 or len(rows[0]) != len(rows[1]) or not rows[0]:
            raise LineActionError("SHAPE", "expected a 2 x n integer matrix")
        for i, r in enumerate(rows):
            if not any(r):
                raise LineActionError("ZERO_ROW", f"row {i} is identically zero")
        return cls(rows)

    @property
    def n(self) -> int:
        return len(self.matrix[0])

    def rank(self) -> int:
        return Matrix(self.matrix).rank()


def _hom(L) -> LatticeHom:
    return L if isinstance(L, LatticeHom) else LatticeHom.of(L)


def classify_empty(L) -> str:
    """EMPTY iff the two rows are rationally proportional."""
    return EMPTY if _hom(L).rank() == 1 else NONEMPTY


def elementary_divisors(L) -> tuple:
    snf = smith_normal_form(Matrix(_hom(L).matrix), domain=ZZ)
    return tuple(abs(int(snf[i, i])) for i in range(2))


def lattice_index(L) -> int:
    """Index of L(Z^n) in Z^2, the product of the Smith divisors."""
    L = _hom(L)
    if L.rank() < 2:
        raise LineActionError("RANK_DEFICIENT", "image lattice has rank < 2")
    d1, d2 = elementary_divisors(L)
    return d1 * d2


def abelian_core_covolume(L):
    """EMPTY for proportional rows, else the lattice index."""
    L = _hom(L)
    if classify_empty(L) == EMPTY:
        return EMPTY
    return lattice_index(L)
