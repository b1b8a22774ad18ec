"""Arithmetic in GF(p^t) with an explicit polynomial basis.

An element with coefficient vector (c_0, ..., c_{t-1}) w.r.t. the basis
(1, x, ..., x^{t-1}) is stored as the integer code sum(c_i * p^i).  Code 0 is
zero, code 1 is one and code p is the basis generator x.  The same integer is
the element's serialized form in every file format of this package.

The default modulus for GF(p^t) is the Conway polynomial from the shipped
table (data/conway_polynomials.txt), which makes x primitive and makes the
subfield embeddings of nested specs compatible.  A custom irreducible modulus
may be supplied instead; embeddings are then only available if the modulus
happens to satisfy the same norm-compatibility.
"""

from __future__ import annotations

import functools
from importlib import resources

import numpy as np

from .errors import (
    BadDivisorError,
    BlockingSetsError,
    NoTableEntryError,
    NotPrimeError,
    RangeError,
    ReduciblePolynomialError,
    SpecMismatchError,
    ZeroInverseError,
)

SIZE_LIMIT = 2 ** 20        # largest supported field order
_TABLE_LIMIT = 1024         # build q x q lookup tables up to this order


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- dense polynomial helpers over GF(p), coefficient lists constant-first ---

def _poly_mul_mod(a, b, f, p):
    t = len(f) - 1
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    for i in range(len(res) - 1, t - 1, -1):
        c = res[i]
        if c:
            res[i] = 0
            for j in range(t):
                res[i - t + j] = (res[i - t + j] - c * f[j]) % p
    res = res[:t]
    res.extend([0] * (t - len(res)))
    return res


def _poly_pow_mod(a, n, f, p):
    t = len(f) - 1
    r = [1] + [0] * (t - 1)
    b = _poly_mul_mod(a, r, f, p)
    while n:
        if n & 1:
            r = _poly_mul_mod(r, b, f, p)
        n >>= 1
        if n:
            b = _poly_mul_mod(b, b, f, p)
    return r


def _poly_gcd(a, b, p):
    a, b = a[:], b[:]
    while any(b):
        while b and b[-1] == 0:
            b.pop()
        inv = pow(b[-1], p - 2, p)
        while len(a) >= len(b) and any(a):
            while a and a[-1] == 0:
                a.pop()
            if len(a) < len(b):
                break
            c = (a[-1] * inv) % p
            s = len(a) - len(b)
            for i, bi in enumerate(b):
                a[s + i] = (a[s + i] - c * bi) % p
        a, b = b, a
    return a


def _is_irreducible(f, p):
    """Rabin test: x^(p^t) = x mod f and gcd(x^(p^(t/r)) - x, f) = 1."""
    t = len(f) - 1
    if t == 1:
        return True
    x = [0, 1] + [0] * (t - 2)
    xq = _poly_pow_mod(x, p ** t, f, p)
    if xq != x:
        return False
    for r in _prime_factors(t):
        xe = _poly_pow_mod(x, p ** (t // r), f, p)
        d = [(xe[i] - x[i]) % p for i in range(t)]
        g = _poly_gcd(list(f), d, p)
        if _poly_degree(g) > 0:
            return False
    return True


def _poly_degree(a):
    for i in range(len(a) - 1, -1, -1):
        if a[i]:
            return i
    return -1


@functools.cache
def _conway_table():
    """Parse the shipped table. Returns (version, {(p, t): coeff tuple})."""
    text = resources.files("blockingsets").joinpath(
        "data/conway_polynomials.txt").read_text()
    version = "unknown"
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("#"):
            if "version" in line:
                version = line.split("version", 1)[1].strip()
            continue
        if not line:
            continue
        parts = [int(tok) for tok in line.split()]
        p, t, coeffs = parts[0], parts[1], tuple(parts[2:])
        if len(coeffs) != t + 1 or coeffs[-1] != 1:
            raise BlockingSetsError(f"malformed conway table line: {line!r}")
        table[(p, t)] = coeffs
    return version, table


def conway_table_version() -> str:
    return _conway_table()[0]


def conway_polynomial(p: int, t: int) -> tuple[int, ...]:
    """Shipped Conway polynomial for GF(p^t), constant term first."""
    try:
        return _conway_table()[1][(p, t)]
    except KeyError:
        raise NoTableEntryError(
            f"no conway polynomial shipped for p={p}, t={t}") from None


class FieldElement:
    """A single element; thin wrapper over (spec, integer code)."""

    __slots__ = ("field", "code")

    def __init__(self, field: "FieldSpec", code: int):
        self.field = field
        self.code = code

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.decode(self.code)

    def _check(self, other):
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other)}")
        if other.field is not self.field and other.field != self.field:
            raise SpecMismatchError(
                f"mixed fields {self.field} and {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.add(self.code, other.code))

    def __sub__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.sub(self.code, other.code))

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.mul(self.code, other.code))

    def __truediv__(self, other):
        other = self._check(other)
        return FieldElement(
            self.field, self.field.mul(self.code, self.field.inv(other.code)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.code, n))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.code))

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        return (isinstance(other, FieldElement)
                and other.field == self.field and other.code == self.code)

    def __hash__(self):
        return hash((self.field.p, self.field.t, self.code))

    def __int__(self):
        return self.code

    def __repr__(self):
        return f"{self.field!r}:{self.code}"


class FieldSpec:
    """GF(p^t) with a fixed polynomial basis.

    All arithmetic methods operate on integer codes; the FieldElement wrapper
    exists for operator convenience.  Instances are immutable and hashable.
    """

    def __init__(self, p: int, t: int, modulus=None):
        if not _is_prime(p):
            raise NotPrimeError(f"p={p} is not prime")
        if t < 1:
            raise RangeError(f"extension degree t={t} must be >= 1")
        q = p ** t
        if q > SIZE_LIMIT:
            raise RangeError(f"field order {q} exceeds the {SIZE_LIMIT} cap")
        if modulus is None:
            modulus = conway_polynomial(p, t)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != t + 1 or modulus[-1] != 1:
            raise ReduciblePolynomialError(
                f"modulus must be monic of degree {t}: {modulus}")
        if not _is_irreducible(list(modulus), p):
            raise ReduciblePolynomialError(
                f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.t = t
        self.q = q
        self.modulus = modulus
        # x^(t+i) mod f for i in 0..t-2, as coefficient tuples
        self._xpow_red = self._reduction_rows()
        self._mul_cache = {}
        self._tables = None
        self._embeddings = {}

    def _reduction_rows(self):
        p, t, f = self.p, self.t, self.modulus
        rows = []
        cur = [(-f[i]) % p for i in range(t)]  # x^t mod f
        rows.append(tuple(cur))
        for _ in range(t - 2):
            nxt = [0] + cur[:-1]
            c = cur[-1]
            if c:
                for j in range(t):
                    nxt[j] = (nxt[j] - c * f[j]) % p
            cur = nxt
            rows.append(tuple(cur))
        return rows

    # --- code <-> coefficient vector ---

    def decode(self, code: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.t):
            code, r = divmod(code, p)
            out.append(r)
        return tuple(out)

    def encode(self, coeffs) -> int:
        p = self.p
        code = 0
        for c in reversed(list(coeffs)):
            code = code * p + (c % p)
        return code

    # --- scalar arithmetic on codes ---

    def add(self, a: int, b: int) -> int:
        p = self.p
        if self.t == 1:
            return (a + b) % p
        ca, cb = self.decode(a), self.decode(b)
        return self.encode((x + y) % p for x, y in zip(ca, cb))

    def neg(self, a: int) -> int:
        p = self.p
        if self.t == 1:
            return (-a) % p
        return self.encode((-x) % p for x in self.decode(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        p, t = self.p, self.t
        if t == 1:
            return (a * b) % p
        if a == 0 or b == 0:
            return 0
        ca, cb = self.decode(a), self.decode(b)
        prod = [0] * (2 * t - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        out = [c % p for c in prod[:t]]
        for i, red in enumerate(self._xpow_red):
            c = prod[t + i] % p if t + i < len(prod) else 0
            if c:
                for j in range(t):
                    out[j] = (out[j] + c * red[j]) % p
        return self.encode(out)

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            n >>= 1
            if n:
                a = self.mul(a, a)
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroInverseError("0 has no multiplicative inverse")
        return self.pow(a, self.q - 2)

    def frobenius(self, a: int, e: int = 1) -> int:
        return self.pow(a, self.p ** e)

    # --- elements ---

    @property
    def zero(self):
        return FieldElement(self, 0)

    @property
    def one(self):
        return FieldElement(self, 1)

    @property
    def x(self):
        """The basis generator (the class of x)."""
        return FieldElement(self, self.p if self.t > 1 else (-self.modulus[0]) % self.p)

    def element(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise SpecMismatchError("element from a different field")
            return value
        if isinstance(value, (int, np.integer)):
            code = int(value)
            if not 0 <= code < self.q:
                raise RangeError(f"code {code} outside [0, {self.q})")
            return FieldElement(self, code)
        return FieldElement(self, self.encode(value))

    def elements(self):
        return (FieldElement(self, c) for c in range(self.q))

    # --- subfields ---

    def subfield(self, e: int) -> "FieldSpec":
        if self.t % e:
            raise BadDivisorError(f"{e} does not divide t={self.t}")
        return make_field(self.p, e)

    def in_subfield(self, a: int, e: int) -> bool:
        """True iff a lies in the subfield GF(p^e); Frobenius fixed-point test."""
        if self.t % e:
            raise BadDivisorError(f"{e} does not divide t={self.t}")
        return self.frobenius(a, e) == a

    def embedding(self, e: int):
        """(embed, retract) arrays for GF(p^e) -> GF(p^t).

        embed[c] is the big-field code of the subfield element with code c;
        retract[big_code] is the subfield code, or -1 off the image.  Uses the
        norm-compatible generator beta = x^((q-1)/(p^e-1)); requires the
        subfield modulus to vanish at beta (always true for table moduli).
        """
        if self.t % e:
            raise BadDivisorError(f"{e} does not divide t={self.t}")
        if e in self._embeddings:
            return self._embeddings[e]
        sub = self.subfield(e)
        beta = self.pow(self.x.code, (self.q - 1) // (sub.q - 1)) \
            if self.t > 1 else self.x.code
        # sanity: beta must be a root of the subfield modulus inside this field
        acc = 0
        for c in reversed(sub.modulus):
            acc = self.add(self.mul(acc, beta), c % self.p)
        if acc != 0:
            raise SpecMismatchError(
                f"modulus of GF({self.p}^{e}) has no compatible root; "
                "embeddings need table moduli")
        beta_pows = [1]
        for _ in range(e - 1):
            beta_pows.append(self.mul(beta_pows[-1], beta))
        embed = np.zeros(sub.q, dtype=np.int64)
        for c in range(sub.q):
            digs = sub.decode(c)
            acc = 0
            for d, bp in zip(digs, beta_pows):
                if d:
                    acc = self.add(acc, self.mul(d % self.p, bp))
            embed[c] = acc
        retract = np.full(self.q, -1, dtype=np.int64)
        retract[embed] = np.arange(sub.q)
        self._embeddings[e] = (embed, retract)
        return embed, retract

    # --- lookup tables for batched work ---

    @property
    def has_tables(self) -> bool:
        return self.q <= _TABLE_LIMIT

    def tables(self):
        """(ADD, MUL, NEG, INV) numpy arrays; built once, q <= 1024 only."""
        if self._tables is not None:
            return self._tables
        if not self.has_tables:
            raise RangeError(f"no lookup tables for q={self.q} > {_TABLE_LIMIT}")
        q = self.q
        if self.t == 1:
            idx = np.arange(q, dtype=np.int64)
            add = (idx[:, None] + idx[None, :]) % q
            mul = (idx[:, None] * idx[None, :]) % q
        else:
            # digitwise add via base-p decomposition
            p, t = self.p, self.t
            digs = np.zeros((q, t), dtype=np.int64)
            tmp = np.arange(q, dtype=np.int64)
            for i in range(t):
                digs[:, i] = tmp % p
                tmp //= p
            s = (digs[:, None, :] + digs[None, :, :]) % p
            add = np.zeros((q, q), dtype=np.int64)
            for i in range(t - 1, -1, -1):
                add = add * p + s[:, :, i]
            # multiplication through discrete logs when x is primitive,
            # scalar products otherwise
            exp = [1]
            xc = self.x.code
            for _ in range(q - 2):
                exp.append(self.mul(exp[-1], xc))
            if len(set(exp)) == q - 1:
                exp = np.array(exp, dtype=np.int64)
                log = np.zeros(q, dtype=np.int64)
                log[exp] = np.arange(q - 1)
                mul = exp[(log[:, None] + log[None, :]) % (q - 1)]
                mul[0, :] = 0
                mul[:, 0] = 0
            else:
                mul = np.zeros((q, q), dtype=np.int64)
                for a in range(1, q):
                    mul[a, :] = [self.mul(a, b) for b in range(q)]
        neg = np.array([self.neg(a) for a in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = self.inv(a)
        self._tables = (np.ascontiguousarray(add, dtype=np.int64),
                        np.ascontiguousarray(mul, dtype=np.int64), neg, inv)
        return self._tables

    # --- identity ---

    def __eq__(self, other):
        return (isinstance(other, FieldSpec) and other.p == self.p
                and other.t == self.t and other.modulus == self.modulus)

    def __hash__(self):
        return hash((self.p, self.t, self.modulus))

    def __repr__(self):
        return f"GF({self.p})" if self.t == 1 else f"GF({self.p}^{self.t})"


@functools.cache
def _make_field_cached(p, t, modulus):
    return FieldSpec(p, t, modulus)


def make_field(p: int, t: int, modulus=None) -> FieldSpec:
    """Construct (or fetch the cached) GF(p^t) spec."""
    if modulus is not None:
        modulus = tuple(int(c) for c in modulus)
    return _make_field_cached(int(p), int(t), modulus)
