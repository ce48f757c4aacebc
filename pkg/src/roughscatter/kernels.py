"""Hot ray-tracing kernels shared by every tracer in the package.

The functions here are deliberately scalar and allocation-free: they are
compiled with numba (see backend.py), and the identical source runs
un-jitted when ROUGHSCATTER_DISABLE_JIT is set.  Curves are packed into
rows of a float64 array (see geometry.pack):

    row[0]          tag: 0 segment, 1 circular arc, 2 elliptic arc,
                         3 parabolic arc
    segment         row[1:5] = p0x, p0y, p1x, p1y
    circular arc    row[1:6] = cx, cy, radius, angle0, span
    elliptic arc    row[1:8] = f1x, f1y, f2x, f2y, lam, angle0, span
                    semi-axes sqrt(1+lam) / sqrt(lam), focal half-distance 1;
                    extent is the polar angle of the point around focus 1
    parabolic arc   row[1:8] = fx, fy, ax, ay, delta, angle0, span
                    (ax, ay) is the unit opening direction, delta the
                    focus-vertex distance; extent is the polar angle of the
                    point around the focus

Angular extents are closed intervals [angle0, angle0 + span] modulo 2*pi
with a 1e-12 endpoint tolerance; segments use a 1e-12 relative parameter
tolerance at their endpoints.

Columns 10..13 hold the curve's two endpoints (NaN for closed curves);
they drive the corner rule: a hit landing on a shared endpoint of two
walls reflects off both, which is the limit of the nearby regular
trajectories (only right-or-wider corners occur in this package's hollows).
"""

import math

import numpy as np

from .backend import jit

TAG_SEGMENT = 0
TAG_CIRCLE = 1
TAG_ELLIPSE = 2
TAG_PARABOLA = 3

ROW_LEN = 14

# trace status codes
OK = 0
MAX_BOUNCES = 1
NEAR_TANGENT = 2
ESCAPED = 3
DEGENERATE_EXIT = 4

T_MIN = 1e-9  # re-hit guard after a reflection
TANGENCY_TOL = 1e-9  # |<n, dir>| below this discards the trajectory
ANG_TOL = 1e-12  # closed-endpoint tolerance on angular extents
SEG_TOL = 1e-12  # relative endpoint tolerance along segments
EDGE_TOL = 1e-12  # opening-endpoint tolerance: exits this close are degenerate
CORNER_TOL2 = 1e-24  # squared distance identifying endpoint (corner) hits

TWO_PI = 2.0 * math.pi


@jit
def _in_span(ang, a0, span):
    d = (ang - a0) % TWO_PI
    return d <= span + ANG_TOL or d >= TWO_PI - ANG_TOL


@jit
def _curve_roots(row, ox, oy, dx, dy, tmin):
    """Forward ray parameters hitting one packed curve, within its extent.

    Returns (count, t0, t1) with the valid parameters sorted ascending;
    count is 0, 1 or 2.
    """
    tag = int(row[0])
    if tag == TAG_SEGMENT:
        ex = row[3] - row[1]
        ey = row[4] - row[2]
        den = dx * ey - dy * ex
        if abs(den) < 1e-300:
            return 0, 0.0, 0.0
        rx = row[1] - ox
        ry = row[2] - oy
        t = (rx * ey - ry * ex) / den
        s = (dy * rx - dx * ry) / den
        if t > tmin and -SEG_TOL <= s <= 1.0 + SEG_TOL:
            return 1, t, 0.0
        return 0, 0.0, 0.0

    if tag == TAG_CIRCLE:
        cx = row[1]
        cy = row[2]
        r = row[3]
        a0 = row[4]
        span = row[5]
        qx = ox - cx
        qy = oy - cy
        b = qx * dx + qy * dy
        c = qx * qx + qy * qy - r * r
        disc = b * b - c
        if disc < 0.0:
            return 0, 0.0, 0.0
        sq = math.sqrt(disc)
        n = 0
        t0 = 0.0
        t1 = 0.0
        for k in range(2):
            t = -b - sq if k == 0 else -b + sq
            if t > tmin:
                hx = ox + t * dx
                hy = oy + t * dy
                if _in_span(math.atan2(hy - cy, hx - cx), a0, span):
                    if n == 0:
                        t0 = t
                    else:
                        t1 = t
                    n += 1
        return n, t0, t1

    if tag == TAG_ELLIPSE:
        f1x = row[1]
        f1y = row[2]
        mx = 0.5 * (f1x + row[3])
        my = 0.5 * (f1y + row[4])
        ux = 0.5 * (row[3] - f1x)
        uy = 0.5 * (row[4] - f1y)
        lam = row[5]
        a0 = row[6]
        span = row[7]
        a2 = 1.0 + lam
        b2 = lam
        lox = (ox - mx) * ux + (oy - my) * uy
        loy = -(ox - mx) * uy + (oy - my) * ux
        ldx = dx * ux + dy * uy
        ldy = -dx * uy + dy * ux
        qa = ldx * ldx / a2 + ldy * ldy / b2
        qb = 2.0 * (lox * ldx / a2 + loy * ldy / b2)
        qc = lox * lox / a2 + loy * loy / b2 - 1.0
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0 or qa == 0.0:
            return 0, 0.0, 0.0
        sq = math.sqrt(disc)
        n = 0
        t0 = 0.0
        t1 = 0.0
        for k in range(2):
            t = (-qb - sq) / (2.0 * qa) if k == 0 else (-qb + sq) / (2.0 * qa)
            if t > tmin:
                hx = ox + t * dx
                hy = oy + t * dy
                if _in_span(math.atan2(hy - f1y, hx - f1x), a0, span):
                    if n == 0:
                        t0 = t
                    else:
                        t1 = t
                    n += 1
        return n, t0, t1

    # parabolic arc
    fx = row[1]
    fy = row[2]
    ax = row[3]
    ay = row[4]
    delta = row[5]
    a0 = row[6]
    span = row[7]
    lox = (ox - fx) * ax + (oy - fy) * ay
    loy = -(ox - fx) * ay + (oy - fy) * ax
    ldx = dx * ax + dy * ay
    ldy = -dx * ay + dy * ax
    qa = ldy * ldy
    qb = 2.0 * loy * ldy - 4.0 * delta * ldx
    qc = loy * loy - 4.0 * delta * (lox + delta)
    n = 0
    t0 = 0.0
    t1 = 0.0
    if qa < 1e-20:
        if abs(qb) < 1e-300:
            return 0, 0.0, 0.0
        t = -qc / qb
        if t > tmin:
            hx = ox + t * dx
            hy = oy + t * dy
            if _in_span(math.atan2(hy - fy, hx - fx), a0, span):
                return 1, t, 0.0
        return 0, 0.0, 0.0
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return 0, 0.0, 0.0
    sq = math.sqrt(disc)
    for k in range(2):
        t = (-qb - sq) / (2.0 * qa) if k == 0 else (-qb + sq) / (2.0 * qa)
        if t > tmin:
            hx = ox + t * dx
            hy = oy + t * dy
            if _in_span(math.atan2(hy - fy, hx - fx), a0, span):
                if n == 0:
                    t0 = t
                else:
                    t1 = t
                n += 1
    return n, t0, t1


@jit
def _raw_normal(row, hx, hy):
    """Unit normal of the curve at a point on it (arbitrary orientation)."""
    tag = int(row[0])
    if tag == TAG_SEGMENT:
        ex = row[3] - row[1]
        ey = row[4] - row[2]
        nx = -ey
        ny = ex
    elif tag == TAG_CIRCLE:
        nx = hx - row[1]
        ny = hy - row[2]
    elif tag == TAG_ELLIPSE:
        mx = 0.5 * (row[1] + row[3])
        my = 0.5 * (row[2] + row[4])
        ux = 0.5 * (row[3] - row[1])
        uy = 0.5 * (row[4] - row[2])
        lam = row[5]
        lx = (hx - mx) * ux + (hy - my) * uy
        ly = -(hx - mx) * uy + (hy - my) * ux
        gx = 2.0 * lx / (1.0 + lam)
        gy = 2.0 * ly / lam
        nx = gx * ux - gy * uy
        ny = gx * uy + gy * ux
    else:
        ax = row[3]
        ay = row[4]
        delta = row[5]
        ly = -(hx - row[1]) * ay + (hy - row[2]) * ax
        gx = -4.0 * delta
        gy = 2.0 * ly
        nx = gx * ax - gy * ay
        ny = gx * ay + gy * ax
    norm = math.sqrt(nx * nx + ny * ny)
    return nx / norm, ny / norm


@jit
def _hit_normal(row, ox, oy, dx, dy, t):
    """Unit normal at the hit point, oriented against the ray direction."""
    nx, ny = _raw_normal(row, ox + t * dx, oy + t * dy)
    if nx * dx + ny * dy > 0.0:
        nx = -nx
        ny = -ny
    return nx, ny


@jit
def _near_endpoint(row, px, py):
    d0 = (px - row[10]) ** 2 + (py - row[11]) ** 2
    d1 = (px - row[12]) ** 2 + (py - row[13]) ** 2
    return d0 < CORNER_TOL2 or d1 < CORNER_TOL2


@jit
def _corner_second_reflection(curves, ci, px, py, odx, ody, dx, dy):
    """Second reflection when a hit lands on a shared wall endpoint.

    (odx, ody) is the direction before the first reflection, (dx, dy)
    after it; returns the possibly updated direction and a flag.
    """
    for j in range(curves.shape[0]):
        if j != ci and _near_endpoint(curves[j], px, py):
            mx, my = _raw_normal(curves[j], px, py)
            # orient into the billiard region: against the incoming ray
            if mx * odx + my * ody > 0.0:
                mx = -mx
                my = -my
            nd = mx * dx + my * dy
            if nd < -TANGENCY_TOL:
                dx -= 2.0 * nd * mx
                dy -= 2.0 * nd * my
                inv = 1.0 / math.sqrt(dx * dx + dy * dy)
                return dx * inv, dy * inv, True
            return dx, dy, False
    return dx, dy, False


@jit
def first_hit(curves, ox, oy, dx, dy, tmin):
    """Minimal forward hit over all packed curves: (index, t), index -1 if none."""
    best_t = math.inf
    best_i = -1
    for i in range(curves.shape[0]):
        n, t0, _t1 = _curve_roots(curves[i], ox, oy, dx, dy, tmin)
        if n > 0 and t0 < best_t:
            best_t = t0
            best_i = i
    return best_i, best_t


@jit
def trace_hollow(curves, a, xi, phi, max_bounces):
    """Billiard map through a hollow in its local frame.

    The particle enters at (xi, 0) with velocity (sin phi, cos phi) and the
    cavity lies in y > 0; the map returns when the particle crosses y = 0
    downward inside the opening (-a, a).  The exit angle satisfies
    exit velocity = -(sin phi_out, cos phi_out).

    Returns (status, xi_out, phi_out, bounces, path_length).  An empty
    curve table means a flat mirror: one specular bounce at the entry point.
    """
    if curves.shape[0] == 0:
        return OK, xi, -phi, 1, 0.0
    px = xi
    py = 0.0
    dx = math.sin(phi)
    dy = math.cos(phi)
    plen = 0.0
    bounces = 0
    while True:
        ci, t = first_hit(curves, px, py, dx, dy, T_MIN)
        if dy < 0.0:
            te = -py / dy
            if te > T_MIN and te <= t:
                x = px + te * dx
                if abs(x) < a - EDGE_TOL:
                    phi_out = math.atan2(-dx, -dy)
                    return OK, x, phi_out, bounces, plen + te
                if abs(x) <= a + 1e-9:
                    return DEGENERATE_EXIT, np.nan, np.nan, bounces, plen + te
                return ESCAPED, np.nan, np.nan, bounces, plen + te
        if ci < 0:
            return ESCAPED, np.nan, np.nan, bounces, plen
        nx, ny = _hit_normal(curves[ci], px, py, dx, dy, t)
        nd = nx * dx + ny * dy
        if abs(nd) < TANGENCY_TOL:
            return NEAR_TANGENT, np.nan, np.nan, bounces, plen
        px += t * dx
        py += t * dy
        plen += t
        odx = dx
        ody = dy
        dx -= 2.0 * nd * nx
        dy -= 2.0 * nd * ny
        inv = 1.0 / math.sqrt(dx * dx + dy * dy)
        dx *= inv
        dy *= inv
        bounces += 1
        if _near_endpoint(curves[ci], px, py):
            dx, dy, again = _corner_second_reflection(curves, ci, px, py, odx, ody, dx, dy)
            if again:
                bounces += 1
        if bounces > max_bounces:
            return MAX_BOUNCES, np.nan, np.nan, bounces, plen


@jit
def trace_hollow_batch(curves, a, xi, phi, max_bounces, status, xi_out, phi_out, nb, plen):
    for i in range(xi.shape[0]):
        s, xo, po, b, pl = trace_hollow(curves, a, xi[i], phi[i], max_bounces)
        status[i] = s
        xi_out[i] = xo
        phi_out[i] = po
        nb[i] = b
        plen[i] = pl


@jit
def trace_hollow_path(curves, a, xi, phi, max_bounces, buf):
    """trace_hollow recording the polyline of reflection points into buf.

    buf must have shape (max_bounces + 2, 2).  Returns
    (status, xi_out, phi_out, bounces, path_length, n_points).
    """
    px = xi
    py = 0.0
    buf[0, 0] = px
    buf[0, 1] = py
    npts = 1
    if curves.shape[0] == 0:
        buf[1, 0] = px
        buf[1, 1] = py
        return OK, xi, -phi, 1, 0.0, 2
    dx = math.sin(phi)
    dy = math.cos(phi)
    plen = 0.0
    bounces = 0
    while True:
        ci, t = first_hit(curves, px, py, dx, dy, T_MIN)
        if dy < 0.0:
            te = -py / dy
            if te > T_MIN and te <= t:
                x = px + te * dx
                buf[npts, 0] = x
                buf[npts, 1] = 0.0
                npts += 1
                if abs(x) < a - EDGE_TOL:
                    phi_out = math.atan2(-dx, -dy)
                    return OK, x, phi_out, bounces, plen + te, npts
                if abs(x) <= a + 1e-9:
                    return DEGENERATE_EXIT, np.nan, np.nan, bounces, plen + te, npts
                return ESCAPED, np.nan, np.nan, bounces, plen + te, npts
        if ci < 0:
            return ESCAPED, np.nan, np.nan, bounces, plen, npts
        nx, ny = _hit_normal(curves[ci], px, py, dx, dy, t)
        nd = nx * dx + ny * dy
        if abs(nd) < TANGENCY_TOL:
            return NEAR_TANGENT, np.nan, np.nan, bounces, plen, npts
        px += t * dx
        py += t * dy
        plen += t
        buf[npts, 0] = px
        buf[npts, 1] = py
        npts += 1
        odx = dx
        ody = dy
        dx -= 2.0 * nd * nx
        dy -= 2.0 * nd * ny
        inv = 1.0 / math.sqrt(dx * dx + dy * dy)
        dx *= inv
        dy *= inv
        bounces += 1
        if _near_endpoint(curves[ci], px, py):
            dx, dy, again = _corner_second_reflection(curves, ci, px, py, odx, ody, dx, dy)
            if again:
                bounces += 1
        if bounces > max_bounces:
            return MAX_BOUNCES, np.nan, np.nan, bounces, plen, npts


@jit
def trace_body_one(
    side_off,
    open_lo,
    open_hi,
    open_center,
    open_scale,
    open_tmpl,
    tmpl_ptr,
    tmpl_len,
    tmpl_a,
    tmpl_curves,
    side_i,
    s,
    phi,
    max_bounces,
):
    """One whole-body scattering event in side-local coordinates.

    s is the arclength position along side side_i; openings are sorted by
    their lower end within each side's slice of the opening arrays.  A
    covered point reflects specularly in place; a point inside an opening
    delegates to the placed hollow's template trace.  Returns
    (status, s_out, phi_out, bounces, path_length) with path_length in
    world units.
    """
    k0 = side_off[side_i]
    k1 = side_off[side_i + 1]
    lo = k0
    hi = k1
    while lo < hi:
        mid = (lo + hi) // 2
        if open_lo[mid] <= s:
            lo = mid + 1
        else:
            hi = mid
    j = lo - 1
    if j >= k0 and s < open_hi[j]:
        sc = open_scale[j]
        tid = open_tmpl[j]
        a = tmpl_a[tid]
        xi_loc = (s - open_center[j]) / sc
        if abs(xi_loc) < a - EDGE_TOL:
            cur = tmpl_curves[tmpl_ptr[tid] : tmpl_ptr[tid] + tmpl_len[tid]]
            st, xo, po, b, pl = trace_hollow(cur, a, xi_loc, phi, max_bounces)
            if st == OK:
                return st, open_center[j] + sc * xo, po, b, pl * sc
            return st, np.nan, np.nan, b, pl * sc
    return OK, s, -phi, 1, 0.0


@jit
def trace_body_batch(
    side_off,
    open_lo,
    open_hi,
    open_center,
    open_scale,
    open_tmpl,
    tmpl_ptr,
    tmpl_len,
    tmpl_a,
    tmpl_curves,
    side_idx,
    s,
    phi,
    max_bounces,
    status,
    s_out,
    phi_out,
    nb,
    plen,
):
    for i in range(s.shape[0]):
        st, so, po, b, pl = trace_body_one(
            side_off,
            open_lo,
            open_hi,
            open_center,
            open_scale,
            open_tmpl,
            tmpl_ptr,
            tmpl_len,
            tmpl_a,
            tmpl_curves,
            side_idx[i],
            s[i],
            phi[i],
            max_bounces,
        )
        status[i] = st
        s_out[i] = so
        phi_out[i] = po
        nb[i] = b
        plen[i] = pl


@jit
def cross_polygon_batch(vx, vy, tx, ty, nx, ny, side_idx, s, phi, side_out, s_out, chord):
    """Straight chords across a convex polygon (no obstacle inside).

    Entry on side side_idx at arclength s, moving inward with angle
    coordinate phi relative to that side's outer normal; writes the exit
    side, exit arclength and chord length.
    """
    nsides = vx.shape[0]
    for i in range(s.shape[0]):
        si = side_idx[i]
        px = vx[si] + s[i] * tx[si]
        py = vy[si] + s[i] * ty[si]
        sphi = math.sin(phi[i])
        cphi = math.cos(phi[i])
        wx = sphi * tx[si] - cphi * nx[si]
        wy = sphi * ty[si] - cphi * ny[si]
        best_t = math.inf
        best_j = -1
        best_s = 0.0
        for j in range(nsides):
            if j == si:
                continue
            ex = vx[(j + 1) % nsides] - vx[j]
            ey = vy[(j + 1) % nsides] - vy[j]
            den = wx * ey - wy * ex
            if abs(den) < 1e-300:
                continue
            rx = vx[j] - px
            ry = vy[j] - py
            t = (rx * ey - ry * ex) / den
            u = (wy * rx - wx * ry) / den
            if t > 1e-12 and -1e-12 <= u <= 1.0 + 1e-12 and t < best_t:
                best_t = t
                best_j = j
                best_s = u * math.sqrt(ex * ex + ey * ey)
        side_out[i] = best_j
        s_out[i] = best_s
        chord[i] = best_t
