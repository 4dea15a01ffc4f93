"""Adaptive-precision geometric predicates.

The orientation test returns the exact sign of the 2x2 determinant
|b-a, c-a| for double inputs.  A cheap floating-point evaluation with a
forward error bound handles the vast majority of calls; inputs that land
inside the uncertainty interval escalate through progressively more
precise stages built on nonoverlapping floating-point expansions, ending
with a fully exact evaluation.  The error-bound constants are derived at
import time from the runtime's actual floating-point format instead of
being hardcoded.

The in-circle test uses the same filter idea with a single exact fallback
stage over arbitrary-precision integers (every finite double is a dyadic
rational, so scaling by a power of two makes the computation exact).
"""

from __future__ import annotations

import math

# Derive machine epsilon (2^-p for p-bit significand) and the splitter used
# by the exact product routines.  Loop taken from the classic predicate
# initialization: it must run on the same FP format the predicates use.
_every_other = True
_epsilon = 1.0
_splitter = 1.0
_check = 1.0
while True:
    _lastcheck = _check
    _epsilon *= 0.5
    if _every_other:
        _splitter *= 2.0
    _every_other = not _every_other
    _check = 1.0 + _epsilon
    if _check == 1.0 or _check == _lastcheck:
        break
_splitter += 1.0

_resulterrbound = (3.0 + 8.0 * _epsilon) * _epsilon
_ccwerrbound_a = (3.0 + 16.0 * _epsilon) * _epsilon
_ccwerrbound_b = (2.0 + 12.0 * _epsilon) * _epsilon
_ccwerrbound_c = (9.0 + 64.0 * _epsilon) * _epsilon * _epsilon
_iccerrbound_a = (10.0 + 96.0 * _epsilon) * _epsilon

CCW = 1
CW = -1
COLLINEAR = 0


def _two_sum(a, b):
    x = a + b
    bvirt = x - a
    avirt = x - bvirt
    return x, (a - avirt) + (b - bvirt)


def _fast_two_sum(a, b):
    # requires |a| >= |b|
    x = a + b
    return x, b - (x - a)


def _two_diff(a, b):
    x = a - b
    bvirt = a - x
    avirt = x + bvirt
    return x, (a - avirt) + (bvirt - b)


def _two_diff_tail(a, b, x):
    bvirt = a - x
    avirt = x + bvirt
    return (a - avirt) + (bvirt - b)


def _split(a):
    c = _splitter * a
    abig = c - a
    ahi = c - abig
    return ahi, a - ahi


def _two_product(a, b):
    x = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = x - ahi * bhi
    err -= alo * bhi
    err -= ahi * blo
    return x, alo * blo - err


def _two_two_diff(a1, a0, b1, b0):
    # (a1,a0) - (b1,b0) -> 4-component expansion, smallest first
    _i, x0 = _two_diff(a0, b0)
    _j, _0 = _two_sum(a1, _i)
    _k, x1 = _two_diff(_0, b1)
    x3, x2 = _two_sum(_j, _k)
    return x3, x2, x1, x0


def _expansion_sum_zeroelim(e, f):
    """Merge two nonoverlapping expansions, dropping zero components."""
    elen = len(e)
    flen = len(f)
    enow = e[0]
    fnow = f[0]
    eindex = findex = 0
    if (fnow > enow) == (fnow > -enow):
        q = enow
        eindex = 1
        enow = e[1] if elen > 1 else 0.0
    else:
        q = fnow
        findex = 1
        fnow = f[1] if flen > 1 else 0.0
    h = []
    if eindex < elen and findex < flen:
        if (fnow > enow) == (fnow > -enow):
            qnew, hh = _fast_two_sum(enow, q)
            eindex += 1
            enow = e[eindex] if eindex < elen else 0.0
        else:
            qnew, hh = _fast_two_sum(fnow, q)
            findex += 1
            fnow = f[findex] if findex < flen else 0.0
        q = qnew
        if hh != 0.0:
            h.append(hh)
        while eindex < elen and findex < flen:
            if (fnow > enow) == (fnow > -enow):
                qnew, hh = _two_sum(q, enow)
                eindex += 1
                enow = e[eindex] if eindex < elen else 0.0
            else:
                qnew, hh = _two_sum(q, fnow)
                findex += 1
                fnow = f[findex] if findex < flen else 0.0
            q = qnew
            if hh != 0.0:
                h.append(hh)
    while eindex < elen:
        qnew, hh = _two_sum(q, enow)
        eindex += 1
        enow = e[eindex] if eindex < elen else 0.0
        q = qnew
        if hh != 0.0:
            h.append(hh)
    while findex < flen:
        qnew, hh = _two_sum(q, fnow)
        findex += 1
        fnow = f[findex] if findex < flen else 0.0
        q = qnew
        if hh != 0.0:
            h.append(hh)
    if q != 0.0 or not h:
        h.append(q)
    return h


def _orientation_adaptive(ax, ay, bx, by, cx, cy, detsum):
    acx = ax - cx
    bcx = bx - cx
    acy = ay - cy
    bcy = by - cy

    detleft, detlefttail = _two_product(acx, bcy)
    detright, detrighttail = _two_product(acy, bcx)
    b3, b2, b1, b0 = _two_two_diff(detleft, detlefttail, detright, detrighttail)
    bexp = (b0, b1, b2, b3)

    det = b0 + b1 + b2 + b3
    errbound = _ccwerrbound_b * detsum
    if det >= errbound or -det >= errbound:
        return det

    acxtail = _two_diff_tail(ax, cx, acx)
    bcxtail = _two_diff_tail(bx, cx, bcx)
    acytail = _two_diff_tail(ay, cy, acy)
    bcytail = _two_diff_tail(by, cy, bcy)
    if acxtail == 0.0 and acytail == 0.0 and bcxtail == 0.0 and bcytail == 0.0:
        return det

    errbound = _ccwerrbound_c * detsum + _resulterrbound * abs(det)
    det += (acx * bcytail + bcy * acxtail) - (acy * bcxtail + bcx * acytail)
    if det >= errbound or -det >= errbound:
        return det

    s1, s0 = _two_product(acxtail, bcy)
    t1, t0 = _two_product(acytail, bcx)
    u3, u2, u1, u0 = _two_two_diff(s1, s0, t1, t0)
    c1 = _expansion_sum_zeroelim(bexp, (u0, u1, u2, u3))

    s1, s0 = _two_product(acx, bcytail)
    t1, t0 = _two_product(acy, bcxtail)
    u3, u2, u1, u0 = _two_two_diff(s1, s0, t1, t0)
    c2 = _expansion_sum_zeroelim(c1, (u0, u1, u2, u3))

    s1, s0 = _two_product(acxtail, bcytail)
    t1, t0 = _two_product(acytail, bcxtail)
    u3, u2, u1, u0 = _two_two_diff(s1, s0, t1, t0)
    d = _expansion_sum_zeroelim(c2, (u0, u1, u2, u3))
    return d[-1]


def _orientation_exact_int(ax, ay, bx, by, cx, cy):
    """Integer-arithmetic orientation; exact over the doubles' full
    exponent range, unlike the expansion path whose products can underflow
    or overflow."""
    iax, iay, ibx, iby, icx, icy = scale_to_ints((ax, ay, bx, by, cx, cy))[0]
    det = (ibx - iax) * (icy - iay) - (iby - iay) * (icx - iax)
    return CCW if det > 0 else (COLLINEAR if det == 0 else CW)


def orientation(ax, ay, bx, by, cx, cy):
    """Exact sign of orient2d(a, b, c): CCW (+1), CW (-1) or COLLINEAR (0)."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright

    if detleft > 0.0:
        if detright <= 0.0:
            if detright == 0.0 and ay != cy and bx != cx:
                return _orientation_exact_int(ax, ay, bx, by, cx, cy)
            return CCW if det > 0.0 else (COLLINEAR if det == 0.0 else CW)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            if detright == 0.0 and ay != cy and bx != cx:
                return _orientation_exact_int(ax, ay, bx, by, cx, cy)
            return CCW if det > 0.0 else (COLLINEAR if det == 0.0 else CW)
        detsum = -detleft - detright
    else:
        # a zero product with nonzero factors means underflow, not zero
        if ax != cx and by != cy:
            return _orientation_exact_int(ax, ay, bx, by, cx, cy)
        if detright == 0.0 and ay != cy and bx != cx:
            return _orientation_exact_int(ax, ay, bx, by, cx, cy)
        return CCW if det > 0.0 else (COLLINEAR if det == 0.0 else CW)

    # the expansion stages assume normalized arithmetic: escalate straight
    # to integers near the subnormal range or past the overflow range
    if not 1e-150 < detsum < 1e290:
        return _orientation_exact_int(ax, ay, bx, by, cx, cy)

    errbound = _ccwerrbound_a * detsum
    if det >= errbound or -det >= errbound:
        return CCW if det > 0.0 else CW

    # adaptive path: exact splitting also needs every nonzero coordinate
    # difference to stay well clear of the subnormal range
    for diff in (ax - cx, bx - cx, ay - cy, by - cy):
        if diff != 0.0 and -1e-290 < diff < 1e-290:
            return _orientation_exact_int(ax, ay, bx, by, cx, cy)
    det = _orientation_adaptive(ax, ay, bx, by, cx, cy, detsum)
    # expansions lose exactness once the true value sinks under the
    # subnormal floor, which mixed coordinate scales can force at any
    # detsum; confirm deep cancellations with integer arithmetic
    if det > detsum * 1e-30:
        return CCW
    if -det > detsum * 1e-30:
        return CW
    return _orientation_exact_int(ax, ay, bx, by, cx, cy)


def orientation_points(a, b, c):
    """orientation() over objects with .x/.y attributes."""
    return orientation(a.x, a.y, b.x, b.y, c.x, c.y)


# ---------------------------------------------------------------------------
# Exact evaluation over scaled integers.  Any finite double equals m * 2^e
# with integer m, so multiplying a set of doubles by a common power of two
# turns them into integers without rounding; integer arithmetic then gives
# exact signs.  Used as the final in-circle stage and by callers needing
# exact derived quantities.

def scale_to_ints(values):
    """Map finite doubles to exact integers under one common scale 2^k.

    Returns (ints, k) with v == ints[i] * 2^-k for every input.
    """
    shift = 0
    mantissas = []
    for v in values:
        m, e = math.frexp(v)  # v = m * 2^e with 0.5 <= |m| < 1
        mi = int(m * 9007199254740992.0)  # m * 2^53, integral and exact
        mantissas.append((mi, e))
        if mi and 53 - e > shift:
            shift = 53 - e
    return [mi << (shift - 53 + e) if mi else 0 for mi, e in mantissas], shift


def _ray_cross_exact_int(ox, oy, ux, uy, px, py):
    iox, ioy, iux, iuy, ipx, ipy = scale_to_ints((ox, oy, ux, uy, px, py))[0]
    det = iux * (ipy - ioy) - iuy * (ipx - iox)
    return (det > 0) - (det < 0)


def _ray_dot_exact_int(ox, oy, ux, uy, px, py):
    iox, ioy, iux, iuy, ipx, ipy = scale_to_ints((ox, oy, ux, uy, px, py))[0]
    dot = iux * (ipx - iox) + iuy * (ipy - ioy)
    return (dot > 0) - (dot < 0)


def ray_side(ox, oy, ux, uy, px, py):
    """Exact sign of cross(u, p - o): +1 when p lies left of the ray
    (o, u), -1 right, 0 on its supporting line."""
    dx = px - ox
    dy = py - oy
    t1 = ux * dy
    t2 = uy * dx
    det = t1 - t2
    scale = abs(t1) + abs(t2)
    if not scale < 1e290 or (scale < 1e-150 and scale != 0.0):
        return _ray_cross_exact_int(ox, oy, ux, uy, px, py)
    bound = 2.0 ** -48 * scale
    if det > bound:
        return 1
    if -det > bound:
        return -1
    for v in (ux, uy, dx, dy):
        if v != 0.0 and -1e-290 < v < 1e-290:
            return _ray_cross_exact_int(ox, oy, ux, uy, px, py)
    # exact: u times exact differences (p - o) carried with tails
    dx, dxt = _two_diff(px, ox)
    dy, dyt = _two_diff(py, oy)
    p1, p1t = _two_product(ux, dy)
    p2, p2t = _two_product(ux, dyt)
    q1, q1t = _two_product(uy, dx)
    q2, q2t = _two_product(uy, dxt)
    left = _expansion_sum_zeroelim((p1t, p1), (p2t, p2))
    right = _expansion_sum_zeroelim((q1t, q1), (q2t, q2))
    total = _expansion_sum_zeroelim(left, [-v for v in right])
    top = total[-1]
    if top > scale * 1e-30:
        return 1
    if -top > scale * 1e-30:
        return -1
    return _ray_cross_exact_int(ox, oy, ux, uy, px, py)


def ray_forward(ox, oy, ux, uy, px, py):
    """Exact sign of dot(u, p - o): +1 when p lies forward of o along u."""
    dx = px - ox
    dy = py - oy
    t1 = ux * dx
    t2 = uy * dy
    s = t1 + t2
    scale = abs(t1) + abs(t2)
    if not scale < 1e290 or (scale < 1e-150 and scale != 0.0):
        return _ray_dot_exact_int(ox, oy, ux, uy, px, py)
    bound = 2.0 ** -48 * scale
    if s > bound:
        return 1
    if -s > bound:
        return -1
    for v in (ux, uy, dx, dy):
        if v != 0.0 and -1e-290 < v < 1e-290:
            return _ray_dot_exact_int(ox, oy, ux, uy, px, py)
    dx, dxt = _two_diff(px, ox)
    dy, dyt = _two_diff(py, oy)
    p1, p1t = _two_product(ux, dx)
    p2, p2t = _two_product(ux, dxt)
    q1, q1t = _two_product(uy, dy)
    q2, q2t = _two_product(uy, dyt)
    left = _expansion_sum_zeroelim((p1t, p1), (p2t, p2))
    right = _expansion_sum_zeroelim((q1t, q1), (q2t, q2))
    total = _expansion_sum_zeroelim(left, right)
    top = total[-1]
    if top > scale * 1e-30:
        return 1
    if -top > scale * 1e-30:
        return -1
    return _ray_dot_exact_int(ox, oy, ux, uy, px, py)


def in_circle(ax, ay, bx, by, cx, cy, dx, dy):
    """Exact sign of the in-circle determinant.

    Positive iff d lies strictly inside the circle through a, b, c taken in
    counterclockwise order; negative iff strictly outside; zero on the circle.
    """
    adx = ax - dx
    bdx = bx - dx
    cdx = cx - dx
    ady = ay - dy
    bdy = by - dy
    cdy = cy - dy

    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady

    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy

    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = (alift * (bdxcdy - cdxbdy)
           + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))

    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if permanent < 1e-150:
        # products this small may have underflowed; the filter bound no
        # longer dominates their rounding error
        return _in_circle_exact(ax, ay, bx, by, cx, cy, dx, dy)
    errbound = _iccerrbound_a * permanent
    if det > errbound or -det > errbound:
        return 1 if det > 0.0 else -1

    return _in_circle_exact(ax, ay, bx, by, cx, cy, dx, dy)


def _in_circle_exact(ax, ay, bx, by, cx, cy, dx, dy):
    ints, _ = scale_to_ints((ax, ay, bx, by, cx, cy, dx, dy))
    iax, iay, ibx, iby, icx, icy, idx, idy = ints
    adx = iax - idx
    ady = iay - idy
    bdx = ibx - idx
    bdy = iby - idy
    cdx = icx - idx
    cdy = icy - idy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return (det > 0) - (det < 0)
