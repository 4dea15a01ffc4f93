"""Exact sign computations over scaled integers.

A second, independent arithmetic stack used by the brute-force reference
and by environment validation.  Every finite double is a dyadic rational,
so lifting operands to a common power-of-two scale turns sign computations
into arbitrary-precision integer work: exact, with no shared code path
with the expansion-based predicates the query engine relies on.

Each helper first evaluates in floating point with a conservative forward
error bound and only falls back to integers near the uncertainty region.
"""

from __future__ import annotations

import math

_EPS = sys_eps = 2.0 ** -53
# |fl(a*d - b*c) - (a*d - b*c)| <= 4 eps (|a*d| + |b*c|) covers the two
# products, the subtraction, and the operand differences feeding them
_FILTER = 2.0 ** -48


def _scaled(values):
    shift = 0
    mantissas = []
    for v in values:
        m, e = math.frexp(v)
        mi = int(m * 9007199254740992.0)  # m * 2^53
        mantissas.append((mi, e))
        if mi and 53 - e > shift:
            shift = 53 - e
    return [mi << (shift - 53 + e) if mi else 0 for mi, e in mantissas]


def cross_sign(ax, ay, bx, by, cx, cy):
    """Exact sign of (b-a) x (c-a)."""
    d1 = (bx - ax) * (cy - ay)
    d2 = (by - ay) * (cx - ax)
    det = d1 - d2
    scale = abs(d1) + abs(d2)
    if 1e-250 < scale < 1e290:
        bound = _FILTER * scale
        if det > bound:
            return 1
        if det < -bound:
            return -1
    iax, iay, ibx, iby, icx, icy = _scaled((ax, ay, bx, by, cx, cy))
    det = (ibx - iax) * (icy - iay) - (iby - iay) * (icx - iax)
    return (det > 0) - (det < 0)


def compare_dot(ax, ay, bx, by, cx, cy):
    """Exact sign of (b-a) . (c-a); positive when the angle at a is acute."""
    d1 = (bx - ax) * (cx - ax)
    d2 = (by - ay) * (cy - ay)
    s = d1 + d2
    scale = abs(d1) + abs(d2)
    if 1e-250 < scale < 1e290:
        bound = _FILTER * scale
        if s > bound:
            return 1
        if s < -bound:
            return -1
    iax, iay, ibx, iby, icx, icy = _scaled((ax, ay, bx, by, cx, cy))
    s = (ibx - iax) * (icx - iax) + (iby - iay) * (icy - iay)
    return (s > 0) - (s < 0)


def on_segment(qx, qy, ax, ay, bx, by):
    """True iff q lies on the closed segment [a, b] (exact)."""
    if cross_sign(ax, ay, bx, by, qx, qy) != 0:
        return False
    return (min(ax, bx) <= qx <= max(ax, bx)
            and min(ay, by) <= qy <= max(ay, by))


def segments_cross(ax, ay, bx, by, cx, cy, dx, dy):
    """True iff the open segments ab and cd intersect transversally."""
    o1 = cross_sign(ax, ay, bx, by, cx, cy)
    o2 = cross_sign(ax, ay, bx, by, dx, dy)
    if o1 * o2 >= 0:
        return False
    o3 = cross_sign(cx, cy, dx, dy, ax, ay)
    o4 = cross_sign(cx, cy, dx, dy, bx, by)
    return o3 * o4 < 0


def point_in_ring(qx, qy, xs, ys):
    """Exact point-vs-simple-ring classification.

    Returns 1 strictly inside, 0 on the boundary, -1 strictly outside.
    xs/ys are the ring's vertex coordinate sequences.
    """
    n = len(xs)
    inside = False
    j = n - 1
    for i in range(n):
        xi = xs[i]
        yi = ys[i]
        xj = xs[j]
        yj = ys[j]
        if on_segment(qx, qy, xj, yj, xi, yi):
            return 0
        # half-open crossing rule on y spans; the x comparison reduces to an
        # exact orientation sign
        if (yi > qy) != (yj > qy):
            s = cross_sign(xj, yj, xi, yi, qx, qy)
            if yi > yj:
                if s > 0:
                    inside = not inside
            else:
                if s < 0:
                    inside = not inside
        j = i
    return 1 if inside else -1


class Rational:
    """Unreduced exact rational p/q over Python ints (q kept positive)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if den < 0:
            num = -num
            den = -den
        self.num = num
        self.den = den

    def __lt__(self, other):
        return self.num * other.den < other.num * self.den

    def __le__(self, other):
        return self.num * other.den <= other.num * self.den

    def __eq__(self, other):
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        g = math.gcd(self.num, self.den)
        return hash((self.num // g, self.den // g)) if g else hash((0, 0))

    def __float__(self):
        if self.num.bit_length() < 512 and self.den.bit_length() < 512:
            return self.num / self.den
        # keep the quotient in range before converting
        g = math.gcd(self.num, self.den)
        n = self.num // g
        d = self.den // g
        shift = max(n.bit_length(), d.bit_length()) - 500
        if shift > 0:
            n >>= shift
            d >>= shift
            if d == 0:
                d = 1
        return n / d

    def __repr__(self):
        return f"Rational({self.num}, {self.den})"
