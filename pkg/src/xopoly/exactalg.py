"""Exact arithmetic over the Gaussian rationals Q(i).

Dense univariate polynomials (:class:`Poly`), Laurent polynomials
(:class:`LaurentPoly`), Wronskians built with ``d/dz`` or ``D = z d/dz``,
fraction-free determinants and square-free decomposition.  Everything here
is exact; floating point never enters this module.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Sequence, TypeVar, Union

Number = Union[int, Fraction, "GaussianRational"]

# degree reported for the zero polynomial
ZERO_DEGREE = -1


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class GaussianRational:
    """An element ``re + i*im`` of Q(i) with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x)

    @classmethod
    def unimodular(cls, m: int, n: int) -> "GaussianRational":
        """``(m + n i)/(m - n i)``, which has modulus exactly one."""
        if m == 0 and n == 0:
            raise ValueError("(m, n) must not both vanish")
        return cls(m, n) / cls(m, -n)

    def __repr__(self):
        if self.im == 0:
            return f"GQ({self.re})"
        return f"GQ({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if o.im == 0:
            return GaussianRational(self.re * o.re, self.im * o.re)
        if self.im == 0:
            return GaussianRational(self.re * o.re, self.re * o.im)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """``|x|^2``, exact."""
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if o.im == 0:
            if o.re == 0:
                raise ZeroDivisionError("division by zero in Q(i)")
            return GaussianRational(self.re / o.re, self.im / o.re)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def to_json(self) -> list:
        return [self.re.numerator, self.re.denominator,
                self.im.numerator, self.im.denominator]

    @classmethod
    def from_json(cls, v: Sequence[int]) -> "GaussianRational":
        a, b, c, d = v
        return cls(Fraction(a, b), Fraction(c, d))


GQ = GaussianRational
ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def _coerce_or_none(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, complex):
        return GaussianRational(Fraction(x.real), Fraction(x.imag))
    return None


def _strip(coeffs: Iterable) -> tuple:
    cs = [GaussianRational.coerce(c) for c in coeffs]
    while cs and not cs[-1]:
        cs.pop()
    return tuple(cs)


class Poly:
    """Dense polynomial in z over Q(i); ``coeffs[j]`` multiplies ``z**j``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _strip(coeffs)

    @classmethod
    def monomial(cls, d: int, c=1) -> "Poly":
        if d < 0:
            raise ValueError("negative exponent in Poly")
        return cls([0] * d + [c])

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    @property
    def lc(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, j: int) -> GaussianRational:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return ZERO

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(("Poly", self.coeffs))

    def __repr__(self):
        return f"Poly({format_terms(self.coeffs, 0)})"

    def __add__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly([self[j] + o[j] for j in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly([self[j] - o[j] for j in range(n)])

    def __rsub__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return Poly([c * other for c in self.coeffs])
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return Poly(_convolve(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([1])
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other):
        return poly_divmod(self, other)

    def __floordiv__(self, other):
        return poly_divmod(self, other)[0]

    def __mod__(self, other):
        return poly_divmod(self, other)[1]

    def __call__(self, z):
        """Exact Horner evaluation at a point of Q(i)."""
        z = GaussianRational.coerce(z)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def diff(self) -> "Poly":
        return diff(self)

    def conj(self) -> "Poly":
        return Poly([c.conjugate() for c in self.coeffs])

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self * self.lc.inverse()

    def is_real(self) -> bool:
        return all(c.im == 0 for c in self.coeffs)

    def real_part(self) -> "Poly":
        return Poly([GaussianRational(c.re) for c in self.coeffs])

    def imag_part(self) -> "Poly":
        return Poly([GaussianRational(c.im) for c in self.coeffs])

    def valuation(self) -> int:
        """Order of vanishing at z = 0 (ZERO_DEGREE for the zero poly)."""
        for j, c in enumerate(self.coeffs):
            if c:
                return j
        return ZERO_DEGREE

    def taylor_shift(self, c) -> "Poly":
        """Return the polynomial ``p(z + c)``."""
        c = GaussianRational.coerce(c)
        out = list(self.coeffs)
        n = len(out)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                out[j] = out[j] + c * out[j + 1]
        return Poly(out)

    def to_laurent(self) -> "LaurentPoly":
        return LaurentPoly(self.coeffs, 0)

    def to_json(self) -> dict:
        return {"lo": 0, "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "Poly":
        if obj.get("lo", 0) != 0:
            lp = LaurentPoly.from_json(obj)
            return lp.to_poly()
        return cls([GaussianRational.from_json(v) for v in obj["coeffs"]])


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return Poly([x])
    return None


def _convolve(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def format_terms(coeffs: Sequence, lo: int, var: str = "z") -> str:
    parts = []
    for j, c in enumerate(coeffs):
        if not c:
            continue
        e = lo + j
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        parts.append(f"{c}{'*' + mono if mono else ''}")
    return " + ".join(parts) if parts else "0"


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db = b.degree
    inv = b.lc.inverse()
    if len(rem) - 1 < db:
        return Poly(), a
    quo = [ZERO] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k]
        if not c:
            continue
        q = c * inv
        quo[k - db] = q
        for j, bc in enumerate(b.coeffs):
            if bc:
                rem[k - db + j] = rem[k - db + j] - q * bc
    return Poly(quo), Poly(rem[:db])


def exact_div(a: Poly, b: Poly) -> Poly:
    q, r = poly_divmod(a, b)
    if not r.is_zero():
        raise ArithmeticError("polynomial division is not exact")
    return q


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q(i) (zero if both inputs vanish)."""
    while not b.is_zero():
        a, b = b, poly_divmod(a, b)[1]
    return a.monic()


def diff(p: Poly) -> Poly:
    """Exact derivative d/dz."""
    return Poly([c * j for j, c in enumerate(p.coeffs)][1:])


def diff_n(p: Poly, k: int) -> Poly:
    for _ in range(k):
        p = diff(p)
    return p


class LaurentPoly:
    """Laurent polynomial ``sum_j coeffs[j] z**(lo + j)`` over Q(i)."""

    __slots__ = ("coeffs", "lo")

    def __init__(self, coeffs: Iterable = (), lo: int = 0):
        cs = [GaussianRational.coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        k = 0
        while k < len(cs) and not cs[k]:
            k += 1
        cs = cs[k:]
        self.coeffs = tuple(cs)
        self.lo = lo + k if cs else 0

    @classmethod
    def monomial(cls, d: int, c=1) -> "LaurentPoly":
        return cls([c], d)

    @classmethod
    def from_dict(cls, terms: dict) -> "LaurentPoly":
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        return cls([terms.get(e, 0) for e in range(lo, hi + 1)], lo)

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1 if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, e: int) -> GaussianRational:
        j = e - self.lo
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return ZERO

    def terms(self):
        for j, c in enumerate(self.coeffs):
            if c:
                yield self.lo + j, c

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.lo == other.lo and self.coeffs == other.coeffs
        if isinstance(other, Poly):
            return self == other.to_laurent()
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == LaurentPoly([other])
        return NotImplemented

    def __hash__(self):
        return hash(("LaurentPoly", self.lo, self.coeffs))

    def __repr__(self):
        return f"LaurentPoly({format_terms(self.coeffs, self.lo)})"

    def _binop(self, o: "LaurentPoly", op) -> "LaurentPoly":
        if not self.coeffs:
            lo = o.lo
        elif not o.coeffs:
            lo = self.lo
        else:
            lo = min(self.lo, o.lo)
        hi = max(self.hi if self.coeffs else lo, o.hi if o.coeffs else lo)
        return LaurentPoly([op(self[e], o[e]) for e in range(lo, hi + 1)], lo)

    def __add__(self, other):
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        return self._binop(o, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        return self._binop(o, lambda x, y: x - y)

    def __rsub__(self, other):
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return LaurentPoly([-c for c in self.coeffs], self.lo)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return LaurentPoly([c * other for c in self.coeffs], self.lo)
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        return LaurentPoly(_convolve(self.coeffs, o.coeffs), self.lo + o.lo)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = LaurentPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``z**k``."""
        return LaurentPoly(self.coeffs, self.lo + k)

    def __call__(self, z):
        z = GaussianRational.coerce(z)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc * z ** self.lo

    def logd(self) -> "LaurentPoly":
        return logd_op(self)

    def dagger(self) -> "LaurentPoly":
        """``P(z) -> conj(P(1/conj z))``: coefficient at j becomes conj of coefficient at -j."""
        return LaurentPoly([c.conjugate() for c in reversed(self.coeffs)], -self.hi)

    def conj(self) -> "LaurentPoly":
        return LaurentPoly([c.conjugate() for c in self.coeffs], self.lo)

    def to_poly(self) -> Poly:
        if self.coeffs and self.lo < 0:
            raise ValueError("Laurent polynomial has negative powers")
        return Poly([0] * self.lo + list(self.coeffs)) if self.coeffs else Poly()

    def numerator(self) -> Poly:
        """The polynomial ``z**(-lo) * P`` (nonzero constant term unless P = 0)."""
        return Poly(self.coeffs)

    def to_json(self) -> dict:
        return {"lo": self.lo, "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentPoly":
        return cls([GaussianRational.from_json(v) for v in obj["coeffs"]], obj.get("lo", 0))


def _as_laurent(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, Poly):
        return x.to_laurent()
    if isinstance(x, (int, Fraction, GaussianRational)):
        return LaurentPoly([x])
    return None


def logd_op(p: LaurentPoly) -> LaurentPoly:
    """Apply ``D = z d/dz`` once: z**k -> k z**k."""
    return LaurentPoly([c * (p.lo + j) for j, c in enumerate(p.coeffs)], p.lo)


def laurent_exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if b.is_zero():
        raise ZeroDivisionError("Laurent division by zero")
    if a.is_zero():
        return LaurentPoly()
    q = exact_div(a.numerator(), b.numerator())
    return LaurentPoly(q.coeffs, a.lo - b.lo)


T = TypeVar("T")


def det_bareiss(matrix: Sequence[Sequence[T]], exact_div: Callable[[T, T], T],
                one: T, is_zero: Callable[[T], bool]) -> T:
    """Fraction-free (Bareiss) determinant over an integral domain."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return one
    sign = 1
    prev = one
    for k in range(n - 1):
        if is_zero(m[k][k]):
            piv = next((i for i in range(k + 1, n) if not is_zero(m[i][k])), None)
            if piv is None:
                return m[k][k] * 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = exact_div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def det_leibniz(matrix: Sequence[Sequence[T]], zero: T) -> T:
    """Permutation expansion; only for small oracles."""
    n = len(matrix)
    total = zero
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = None
        for r in range(n):
            term = matrix[r][perm[r]] if term is None else term * matrix[r][perm[r]]
        if term is None:
            continue
        total = total - term if inv % 2 else total + term
    return total


def poly_det(matrix: Sequence[Sequence[Poly]]) -> Poly:
    return det_bareiss(matrix, exact_div, Poly([1]), Poly.is_zero)


def laurent_det(matrix: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    return det_bareiss(matrix, laurent_exact_div, LaurentPoly([1]), LaurentPoly.is_zero)


def wronskian(fs: Sequence[Poly]) -> Poly:
    """det[d^r f_c / dz^r] with rows r = 0..n-1 and columns in argument order."""
    n = len(fs)
    if n == 0:
        return Poly([1])
    cols = []
    for f in fs:
        col = [f]
        for _ in range(n - 1):
            col.append(diff(col[-1]))
        cols.append(col)
    return poly_det([[cols[c][r] for c in range(n)] for r in range(n)])


def d_wronskian(fs: Sequence[LaurentPoly]) -> LaurentPoly:
    """Same as :func:`wronskian` with ``D = z d/dz`` in place of ``d/dz``."""
    n = len(fs)
    if n == 0:
        return LaurentPoly([1])
    cols = []
    for f in fs:
        col = [f]
        for _ in range(n - 1):
            col.append(logd_op(col[-1]))
        cols.append(col)
    return laurent_det([[cols[c][r] for c in range(n)] for r in range(n)])


def squarefree_decompose(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: monic, pairwise coprime, square-free factors with multiplicities."""
    if p.is_zero():
        raise ValueError("square-free decomposition of the zero polynomial")
    if p.degree == 0:
        return []
    out = []
    a = p.monic()
    b = diff(a)
    c = poly_gcd(a, b)
    w = exact_div(a, c)
    y = exact_div(b, c)
    z = y - diff(w)
    k = 1
    while w.degree > 0:
        g = poly_gcd(w, z)
        if g.degree > 0:
            out.append((g, k))
        w = exact_div(w, g)
        y = exact_div(z, g)
        z = y - diff(w)
        k += 1
    return out


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, diff(p)]
    while not seq[-1].is_zero():
        r = poly_divmod(seq[-2], seq[-1])[1]
        seq.append(-r)
    return seq[:-1]


def _sign_changes(vals: Sequence[Fraction]) -> int:
    signs = [v > 0 for v in vals if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _real_eval(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c.re
    return acc


def count_real_roots(p: Poly, lo: Fraction | None = None, hi: Fraction | None = None) -> int:
    """Number of distinct real roots of ``p`` in ``(lo, hi]`` (whole line by default).

    Real roots of a polynomial with Gaussian-rational coefficients are the
    real roots of gcd(Re p, Im p), which has rational coefficients; those are
    counted with a Sturm chain.
    """
    if p.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    g = p.real_part() if p.is_real() else poly_gcd(p.real_part(), p.imag_part())
    if g.degree <= 0:
        return 0
    g = exact_div(g, poly_gcd(g, diff(g)))
    seq = sturm_sequence(g)

    def at(x):
        if x is None:
            return None
        return _sign_changes([_real_eval(s, x) for s in seq])

    def at_inf(sign: int):
        vals = []
        for s in seq:
            lead = s.lc.re
            vals.append(lead if (sign > 0 or s.degree % 2 == 0) else -lead)
        return _sign_changes(vals)

    left = at_inf(-1) if lo is None else at(Fraction(lo))
    right = at_inf(1) if hi is None else at(Fraction(hi))
    return left - right


def poly_to_json_str(p: Poly | LaurentPoly) -> str:
    return json.dumps(p.to_json())


def laurent_from_any(obj: dict) -> LaurentPoly:
    return LaurentPoly.from_json(obj)
