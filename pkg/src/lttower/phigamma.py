"""The ring O_E at finite precision, with Frobenius and the cyclotomic Gamma-action.

Modulo p^N every element of O_E is a Laurent series in pi (pi = pi_eps)
with finitely many negative terms, so an element is stored as coefficients
on a window [L, D] of exponents.  ``head`` is the largest exponent through
which the coefficients are exact; ``exact`` marks a Laurent polynomial that
fits entirely in the window.  Coefficients that would land below L raise
WindowUnderflow instead of being dropped.

Coefficients are in Z_p (Witt vectors of F_p), so phi and gamma_a fix them.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .linalg import kernel_local, nullspace_mod_p, solve_mod_p
from .padic import NonUnitError, PadicContext, PadicInt, PrecisionError

BIG = 10 ** 9  # head of an exact element


class WindowUnderflow(PrecisionError):
    """A significant coefficient falls below the window's lowest exponent."""


class WindowTooSmall(PrecisionError):
    pass


@dataclass(frozen=True)
class OEWindow:
    ctx: PadicContext
    L: int
    D: int

    def __post_init__(self):
        if self.L > 0 or self.D < 1 or self.L > self.D:
            raise ValueError("window needs L <= 0 < D")

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def m(self) -> int:
        return self.ctx.modulus

    @property
    def width(self) -> int:
        return self.D - self.L + 1


@dataclass(frozen=True, eq=False)
class OEElement:
    win: OEWindow
    c: np.ndarray  # c[i] is the coefficient of pi^(L + i)
    head: int
    exact: bool

    def coeff(self, e: int) -> int:
        if e > self.known_to:
            raise PrecisionError(f"coefficient of pi^{e} is beyond the known range")
        if e < self.win.L:
            return 0
        return int(self.c[e - self.win.L])

    @property
    def known_to(self) -> int:
        return BIG if self.exact else self.head

    def coeffs(self) -> dict:
        top = min(self.head, self.win.D)
        return {e: int(self.c[e - self.win.L]) for e in range(self.win.L, top + 1)
                if self.c[e - self.win.L]}

    def valuation(self):
        """Lowest exponent with a nonzero coefficient, or None if none is known."""
        nz = np.nonzero(self.c[: self._top() - self.win.L + 1])[0]
        return int(nz[0]) + self.win.L if nz.size else None

    def residue_valuation(self):
        """Lowest exponent whose coefficient is a unit (the valuation of x mod p)."""
        nz = np.nonzero(self.c[: self._top() - self.win.L + 1] % self.win.p)[0]
        return int(nz[0]) + self.win.L if nz.size else None

    def _top(self) -> int:
        return min(self.head, self.win.D)

    def is_zero(self) -> bool:
        return self.exact and not self.c.any()

    def same_as(self, other: "OEElement") -> bool:
        """Equality on the exponents known for both."""
        top = min(self._top(), other._top())
        n = top - self.win.L + 1
        return bool((self.c[:n] == other.c[:n]).all())

    def __add__(self, o):
        return oe_add(self, _lift(self.win, o))

    __radd__ = __add__

    def __neg__(self):
        return OEElement(self.win, (-self.c) % self.win.m, self.head, self.exact)

    def __sub__(self, o):
        return oe_add(self, -_lift(self.win, o))

    def __rsub__(self, o):
        return oe_add(_lift(self.win, o), -self)

    def __mul__(self, o):
        return oe_mul(self, _lift(self.win, o))

    __rmul__ = __mul__

    def __repr__(self):
        terms = " + ".join(f"{v}*pi^{e}" for e, v in self.coeffs().items()) or "0"
        tail = "" if self.exact else f" + O(pi^{self.head + 1})"
        return f"OE({terms}{tail})"


def _lift(win: OEWindow, x) -> OEElement:
    if isinstance(x, OEElement):
        if x.win != win:
            raise ValueError("elements live in different windows")
        return x
    if isinstance(x, PadicInt):
        x = x.residue
    return constant(win, int(x))


def _make(win: OEWindow, full: np.ndarray, lo: int, head: int, exact: bool) -> OEElement:
    """Build from coefficients ``full`` starting at exponent ``lo``."""
    m = win.m
    full = np.asarray(full, dtype=object) % m if full.dtype == object else full % m
    below = win.L - lo
    if below > 0:
        if np.any(full[:below] % m != 0):
            e = lo + int(np.nonzero(full[:below] % m)[0][0])
            raise WindowUnderflow(f"coefficient at pi^{e} lies below the window start {win.L}")
        full = full[below:]
        lo = win.L
    out = np.zeros(win.width, dtype=np.int64)
    start = lo - win.L
    take = max(0, min(len(full), win.width - start))
    out[start:start + take] = [int(v) for v in full[:take]]
    overflow = len(full) > take and any(int(v) % m for v in full[take:])
    if overflow:
        exact = False
    head = min(head, win.D)
    if exact:
        head = win.D
    else:
        out[head - win.L + 1:] = 0
    return OEElement(win, out, head, exact)


def from_coeffs(win: OEWindow, coeffs: dict, head: int | None = None) -> OEElement:
    """Element with the given coefficients; exact unless ``head`` is given."""
    if not coeffs:
        return _make(win, np.zeros(1, dtype=np.int64), win.L, win.D if head is None else head, head is None)
    lo, hi = min(coeffs), max(coeffs)
    full = np.zeros(hi - lo + 1, dtype=object)
    for e, v in coeffs.items():
        full[e - lo] = v
    return _make(win, full, lo, win.D if head is None else head, head is None)


def constant(win: OEWindow, a: int) -> OEElement:
    return from_coeffs(win, {0: a % win.m})


def pi_eps(win: OEWindow, k: int = 1) -> OEElement:
    return from_coeffs(win, {k: 1})


def one(win: OEWindow) -> OEElement:
    return constant(win, 1)


def _conv(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    if m * m * max(len(a), len(b)) < 2 ** 62:
        return np.convolve(a.astype(np.int64), b.astype(np.int64)) % m
    return np.array(np.convolve(a.astype(object), b.astype(object)), dtype=object) % m


def oe_add(x: OEElement, y: OEElement) -> OEElement:
    head = min(x.known_to, y.known_to)
    return _make(x.win, (x.c + y.c) % x.win.m, x.win.L, head, x.exact and y.exact)


def oe_mul(x: OEElement, y: OEElement) -> OEElement:
    win = x.win
    vx, vy = x.valuation(), y.valuation()
    if vx is None and vy is None and x.exact and y.exact:
        return constant(win, 0)
    # an unknown tail pi^{h+1}(...) of one factor meets the other factor's lowest term
    vx = x.head + 1 if vx is None else vx
    vy = y.head + 1 if vy is None else vy
    head = min(vx + y.known_to, vy + x.known_to)
    full = _conv(x.c, y.c, win.m)
    return _make(win, full, 2 * win.L, head, x.exact and y.exact)


def shift(x: OEElement, k: int) -> OEElement:
    """pi^k * x."""
    return _make(x.win, x.c, x.win.L + k, x.known_to + k if not x.exact else BIG, x.exact)


def oe_inv(x: OEElement) -> OEElement:
    """Inverse of a unit of O_E (x mod p nonzero)."""
    win = x.win
    p, m = win.p, win.m
    v = x.residue_valuation()
    if v is None:
        if x.exact:
            raise NonUnitError("x is divisible by p, not a unit of O_E")
        raise WindowTooSmall("x mod p vanishes on the known range; cannot decide")
    c = x.coeff(v)
    cinv = pow(c, -1, m)
    u = shift(x, -v) * cinv  # u = 1 + y with y_0 = 0
    y = u - 1
    acc, term = one(win), one(win)
    for _ in range(4 * win.width * win.ctx.N + 8):
        term = -(term * y)
        if not term.c.any():
            if not term.exact:
                # the rest is term * u^{-1}, which starts no lower than this
                v_acc = min(acc.valuation() or 0, 0)
                acc = _make(win, acc.c, win.L, min(acc.known_to, term.head + v_acc), False)
            break
        acc = acc + term
    else:
        raise WindowTooSmall("geometric series did not terminate inside the window")
    out = shift(acc, -v) * cinv
    check = oe_mul(out, x)
    if not check.same_as(one(win)):
        raise ArithmeticError("inverse failed verification")
    return out


# -- Frobenius -------------------------------------------------------------------

@dataclass(frozen=True)
class _Images:
    lo: int
    rows: np.ndarray  # rows[n - L] holds the image of pi^n from exponent lo


_PHI_CACHE: dict = {}


def _phi_pi_inverse(win: OEWindow) -> dict:
    """phi(pi)^{-1} as an exact Laurent polynomial mod p^N."""
    p, N, m = win.p, win.ctx.N, win.m
    # phi(pi) = pi^p (1 + w), w = sum_{i<p} C(p,i) pi^{i-p}; every coefficient of w is divisible by p
    w = {i - p: comb(p, i) % m for i in range(1, p)}
    inv, term = {0: 1}, {0: 1}
    for _ in range(1, N):
        nxt: dict = {}
        for a, ca in term.items():
            for b, cb in w.items():
                nxt[a + b] = (nxt.get(a + b, 0) - ca * cb) % m
        term = {e: c for e, c in nxt.items() if c}
        for e, c in term.items():
            inv[e] = (inv.get(e, 0) + c) % m
    return {e - p: c for e, c in inv.items() if c}


def _poly_mul(a: dict, b: dict, m: int) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = (out.get(i + j, 0) + x * y) % m
    return {e: c for e, c in out.items() if c}


def _phi_images(win: OEWindow) -> _Images:
    if win in _PHI_CACHE:
        return _PHI_CACHE[win]
    p, N, m = win.p, win.ctx.N, win.m
    phi_pi = {i: comb(p, i) % m for i in range(1, p + 1)}
    inv = _phi_pi_inverse(win)
    lo = p * win.L - (p - 1) * (N - 1)
    hi = p * win.D
    rows = np.zeros((win.width, hi - lo + 1), dtype=np.int64)
    pos, neg = {0: 1}, {0: 1}
    for n in range(0, win.D + 1):
        for e, c in pos.items():
            rows[n - win.L, e - lo] = c
        pos = _poly_mul(pos, phi_pi, m)
    for n in range(-1, win.L - 1, -1):
        neg = _poly_mul(neg, inv, m)
        for e, c in neg.items():
            rows[n - win.L, e - lo] = c
    out = _Images(lo, rows)
    _PHI_CACHE[win] = out
    return out


def phi(x: OEElement) -> OEElement:
    """Frobenius: coefficients fixed, pi -> (1 + pi)^p - 1."""
    win = x.win
    p, N, m = win.p, win.ctx.N, win.m
    img = _phi_images(win)
    top = min(x.head, win.D)
    lam = x.c[: top - win.L + 1].astype(object)
    full = np.array(lam @ img.rows[: len(lam)].astype(object), dtype=object) % m
    if x.exact:
        head, exact = BIG, True
    else:
        # phi(pi)^{h+1} starts at p(h+1) - (p-1)(N-1) modulo p^N
        head, exact = p * (x.head + 1) - (p - 1) * (N - 1) - 1, False
    return _make(win, full, img.lo, head, exact)


def frobenius_lift_ok(x: OEElement) -> bool:
    """phi(x) == x^p mod p on the known range."""
    lhs = phi(x)
    rhs = one(x.win)
    for _ in range(x.win.p):
        rhs = rhs * x
    top = min(lhs._top(), rhs._top())
    n = top - x.win.L + 1
    return bool(((lhs.c[:n] - rhs.c[:n]) % x.win.p == 0).all())


# -- Gamma ------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaCertificate:
    a: int  # integer approximant used
    k: int  # (1+pi)^{p^k} == 1 mod (p^N, pi^{degree+1}), so a mod p^k determines gamma_a
    degree: int


def _unit_residue(a, p: int) -> tuple[int, int | None]:
    """(integer, known p-adic digits or None if exact)."""
    if isinstance(a, PadicInt):
        if a.ctx.p != p:
            raise ValueError("prime mismatch")
        return a.residue, a.ctx.N
    return int(a), None


def stability_exponent(win: OEWindow, degree: int) -> int:
    p, N = win.p, win.ctx.N
    k = 0
    while any(comb(p ** k, i) % win.m for i in range(1, degree + 1)):
        k += 1
    return k


def gamma_certificate(a, win: OEWindow) -> GammaCertificate:
    p = win.p
    a_int, digits = _unit_residue(a, p)
    if a_int % p == 0:
        raise NonUnitError(f"a = {a_int} is not a p-adic unit")
    degree = win.D - win.L + 1
    k = stability_exponent(win, degree)
    if digits is not None and digits < k:
        raise PrecisionError(
            f"gamma_a needs a mod {p}^{k} on this window; a is known to {digits} digits")
    return GammaCertificate(a_int % p ** k, k, degree)


_GAMMA_CACHE: dict = {}


def _gamma_images(win: OEWindow, cert: GammaCertificate) -> np.ndarray:
    key = (win, cert.a)
    if key in _GAMMA_CACHE:
        return _GAMMA_CACHE[key]
    m, W = win.m, cert.degree
    # gamma(pi) = pi * u with u = sum_{i>=1} C(a, i) pi^{i-1}
    u = np.array([comb(cert.a, i + 1) % m for i in range(W + 1)], dtype=object)
    uinv = _series_inverse(u, m)
    rows = np.zeros((win.width, win.width), dtype=np.int64)
    pw = np.zeros(W + 1, dtype=object)
    pw[0] = 1
    for n in range(0, win.D + 1):
        _place(rows, n, pw, win)
        pw = _series_mul(pw, u, m)
    pw = np.zeros(W + 1, dtype=object)
    pw[0] = 1
    for n in range(-1, win.L - 1, -1):
        pw = _series_mul(pw, uinv, m)
        _place(rows, n, pw, win)
    _GAMMA_CACHE[key] = rows
    return rows


def _place(rows, n, series, win):
    # pi^n * series, kept on [L, D]
    for j, c in enumerate(series):
        e = n + j
        if e > win.D:
            break
        if e >= win.L:
            rows[n - win.L, e - win.L] = int(c)


def _series_mul(a, b, m):
    W = len(a)
    out = np.zeros(W, dtype=object)
    for i in range(W):
        if a[i]:
            out[i:] = (out[i:] + a[i] * b[: W - i]) % m
    return out


def _series_inverse(a, m):
    W = len(a)
    inv0 = pow(int(a[0]), -1, m)
    out = np.zeros(W, dtype=object)
    out[0] = inv0
    for i in range(1, W):
        s = sum(a[j] * out[i - j] for j in range(1, i + 1))
        out[i] = (-s * inv0) % m
    return out


def gamma(a, x: OEElement, cert: GammaCertificate | None = None) -> OEElement:
    """gamma_a: coefficients fixed, pi -> (1 + pi)^a - 1."""
    win = x.win
    cert = cert or gamma_certificate(a, win)
    rows = _gamma_images(win, cert)
    top = min(x.head, win.D)
    lam = x.c[: top - win.L + 1].astype(object)
    full = np.array(lam @ rows[: len(lam)].astype(object), dtype=object) % win.m
    exact = False
    if x.exact:
        vals = [e for e in x.coeffs()]
        # a polynomial in pi maps to a polynomial when a is a positive integer that fits
        exact = (not vals or min(vals) >= 0) and cert.a * max(vals or [0]) <= win.D
    head = x.head if not x.exact else win.D
    return _make(win, full, win.L, head, exact)


@dataclass
class CommuteReport:
    a: int
    certificate: GammaCertificate
    checked: int
    agree: int
    compared_to: list  # exponent through which each pair was compared

    @property
    def ok(self) -> bool:
        return self.checked > 0 and self.agree == self.checked


def phi_safe_valuations(win: OEWindow) -> dict:
    """Least v_p of the coefficient at pi^{-n} keeping phi(lambda pi^{-n}) in the window."""
    p, N = win.p, win.ctx.N
    out = {}
    for n in range(1, -win.L + 1):
        t = 0
        while t < N and -p * n - (p - 1) * max(0, N - 1 - t) < win.L:
            t += 1
        out[-n] = t
    return out


def random_element(win: OEWindow, rng: random.Random, lowest: int | None = None) -> OEElement:
    """Random element known through the top of the window.

    Coefficients at negative exponents carry the p-adic decay that keeps
    phi of the element inside the window (the tail condition of O_E).
    """
    p, N, m = win.p, win.ctx.N, win.m
    safe = phi_safe_valuations(win)
    lo = win.L if lowest is None else lowest
    coeffs = {}
    for e in range(lo, win.D + 1):
        t = safe.get(e, 0)
        if t >= N:
            continue
        coeffs[e] = p ** t * rng.randrange(p ** (N - t)) % m
    return from_coeffs(win, coeffs, head=win.D)


def phi_gamma_commute(a, win: OEWindow, samples: Sequence[OEElement] = (),
                      rng: random.Random | None = None, n_random: int = 20) -> CommuteReport:
    cert = gamma_certificate(a, win)
    xs = [pi_eps(win)] + list(samples)
    if rng is not None:
        xs += [random_element(win, rng) for _ in range(n_random)]
    agree, upto = 0, []
    for x in xs:
        lhs = phi(gamma(a, x, cert))
        rhs = gamma(a, phi(x), cert)
        upto.append(min(lhs._top(), rhs._top()))
        agree += lhs.same_as(rhs)
    return CommuteReport(cert.a, cert, len(xs), agree, upto)


def gamma_composition_ok(a, b, x: OEElement) -> bool:
    win = x.win
    ab = _unit_residue(a, win.p)[0] * _unit_residue(b, win.p)[0]
    return gamma(a, gamma(b, x)).same_as(gamma(ab, x))


def phi_preserves_pi_ideal(win: OEWindow) -> bool:
    """phi(pi) lies in pi * Z_p[[pi]], hence phi(pi A+) is inside pi A+."""
    img = phi(pi_eps(win))
    v = img.valuation()
    return v is not None and v >= 1 and all(e >= 1 for e in img.coeffs())


# -- phi-fixed points ------------------------------------------------------------------

@dataclass
class PhiFixedReport:
    p: int
    N: int
    window: tuple
    solutions: list  # each a dict exponent -> coefficient
    all_constant: bool
    count: int
    oracle_count: int  # from the kernel of phi - 1 over Z/p^N (local Smith form)

    @property
    def ok(self) -> bool:
        return self.all_constant and self.count == self.p ** self.N == self.oracle_count


def _fixed_point_matrix(win: OEWindow) -> tuple[np.ndarray, int]:
    """Matrix of phi - 1 on coefficients at exponents [L, D], rows from img.lo to D."""
    img = _phi_images(win)
    top = win.D
    nrows = top - img.lo + 1
    A = img.rows[:, :nrows].T.copy()  # rows = exponents, cols = unknowns
    for n in range(win.L, win.D + 1):
        A[n - img.lo, n - win.L] -= 1
    return A % win.m, img.lo


def phi_fixed(win: OEWindow) -> PhiFixedReport:
    """Solve phi(x) = x for x supported on [L, D], mod p, p^2, ..., p^N.

    Contributions of exponents above D land above D (phi(pi)^{D+1} starts at
    p(D+1) - (p-1)(N-1) > D), so equations at exponents <= D are exact.
    """
    p, N = win.p, win.ctx.N
    if p * (win.D + 1) - (p - 1) * (N - 1) <= win.D:
        raise WindowTooSmall("window head is too low for the truncated equations to be exact")
    A, _ = _fixed_point_matrix(win)
    n = A.shape[1]
    # successive approximation: solutions mod p^k, each lifted through the mod-p kernel
    K1 = nullspace_mod_p(A, p)
    sols = [np.zeros(n, dtype=object)]
    for k in range(N):
        mod_next = p ** (k + 1)
        nxt = {}
        for x in sols:
            r = (A.astype(object) @ x) % mod_next
            # x + p^k y solves mod p^{k+1} iff A y == -r / p^k mod p
            rhs = [(-int(v) // p ** k) % p for v in r]
            y0 = solve_mod_p(A, rhs, p)
            if y0 is None:
                continue
            for comb_ in _span_mod_p(K1, p):
                y = (y0 + comb_) % p
                z = (x + p ** k * y.astype(object)) % mod_next
                nxt[tuple(int(v) for v in z)] = z
        sols = list(nxt.values())
    solutions = [{e: int(v) for e, v in zip(range(win.L, win.D + 1), z) if v} for z in sols]
    all_const = all(set(s) <= {0} for s in solutions)
    gens, orders = kernel_local(A, p, N)
    oracle = 1
    for o in orders:
        oracle *= p ** o
    return PhiFixedReport(p, N, (win.L, win.D), solutions, all_const, len(solutions), oracle)


def _span_mod_p(B: np.ndarray, p: int):
    if B.shape[0] > 6:
        raise WindowTooSmall("mod-p kernel too large to enumerate")
    n = B.shape[1]
    for coeffs in np.ndindex(*([p] * B.shape[0])):
        v = np.zeros(n, dtype=np.int64)
        for c, row in zip(coeffs, B):
            v = (v + c * row) % p
        yield v


# -- (phi, Gamma)-modules ------------------------------------------------------------------

@dataclass
class PhiGammaModuleData:
    rank: int
    Phi: list  # rank x rank of OEElement
    Gamma: list = field(default_factory=list)  # [(a, rank x rank of OEElement)]


def det(M: list) -> OEElement:
    r = len(M)
    if r == 1:
        return M[0][0]
    total = None
    for j in range(r):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def etale_check(data: PhiGammaModuleData):
    """True / False, or None when the window cannot decide.

    The module is etale iff det(Phi) is a unit of O_E, i.e. nonzero mod p.
    """
    d = det(data.Phi)
    if d.residue_valuation() is not None:
        return True
    return False if d.exact else None


def mat_apply(M: list, v: list) -> list:
    out = []
    for row in M:
        acc = None
        for a, b in zip(row, v):
            t = a * b
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def frobenius_map(data: PhiGammaModuleData, v: list) -> list:
    """v -> Phi * phi(v) in the standard basis."""
    return mat_apply(data.Phi, [phi(x) for x in v])


def module_semilinearity_check(data: PhiGammaModuleData, vectors: Sequence[list],
                               scalars: Sequence[OEElement]) -> bool:
    for v in vectors:
        Fv = frobenius_map(data, v)
        for lam in scalars:
            lhs = frobenius_map(data, [lam * x for x in v])
            rhs = [phi(lam) * y for y in Fv]
            if not all(a.same_as(b) for a, b in zip(lhs, rhs)):
                return False
        for w in vectors:
            lhs = frobenius_map(data, [a + b for a, b in zip(v, w)])
            rhs = [a + b for a, b in zip(Fv, frobenius_map(data, w))]
            if not all(a.same_as(b) for a, b in zip(lhs, rhs)):
                return False
    return True


def module_commutation_check(data: PhiGammaModuleData) -> bool:
    """Phi * phi(G_a) == G_a * gamma_a(Phi) for every listed a."""
    r = data.rank
    for a, G in data.Gamma:
        lhs = [[None] * r for _ in range(r)]
        rhs = [[None] * r for _ in range(r)]
        phiG = [[phi(x) for x in row] for row in G]
        gPhi = [[gamma(a, x) for x in row] for row in data.Phi]
        for i in range(r):
            for j in range(r):
                lhs[i][j] = _dot([data.Phi[i][k] for k in range(r)], [phiG[k][j] for k in range(r)])
                rhs[i][j] = _dot([G[i][k] for k in range(r)], [gPhi[k][j] for k in range(r)])
                if not lhs[i][j].same_as(rhs[i][j]):
                    return False
    return True


def _dot(a, b):
    acc = None
    for x, y in zip(a, b):
        t = x * y
        acc = t if acc is None else acc + t
    return acc


def diagonal_module(entries: Sequence[OEElement]) -> PhiGammaModuleData:
    r = len(entries)
    win = entries[0].win
    zero = constant(win, 0)
    Phi = [[entries[i] if i == j else zero for j in range(r)] for i in range(r)]
    return PhiGammaModuleData(r, Phi)
