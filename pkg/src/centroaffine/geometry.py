"""Volumes, mixed curvature integrals, polar bodies and Aleksandrov bodies."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .body import Body, FieldTable, validate, validation_grid
from .sphere import Grid, build_grid, differentiate, integrate

__all__ = [
    "MixedCurvatureInput",
    "mixed_input",
    "volume",
    "polar_volume",
    "surface_area",
    "surface_area_image",
    "centroid",
    "mixed_curvature",
    "mixed_integral",
    "polar_body",
    "radial_function",
    "aleksandrov_body",
    "aleksandrov_gap",
    "PolarRefinementError",
]

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class PolarRefinementError(RuntimeError):
    """Local refinement of a support-ratio maximum did not converge."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


def volume(fields: FieldTable) -> float:
    """Vol(K) as the cone-measure mass divided by n."""
    return integrate(fields.grid, fields.cone_density) / fields.dim


def polar_volume(fields: FieldTable) -> float:
    """Vol(K°) = (1/n) * integral of K0 against the cone measure of K."""
    return integrate(fields.grid, fields.K0 * fields.cone_density) / fields.dim


def surface_area(fields: FieldTable) -> float:
    return integrate(fields.grid, fields.curvature_function)


def surface_area_image(fields: FieldTable, matrix) -> float:
    """S(TK) from the fields of K alone.

    S(TK) = n V(TK, ..., TK, B) = |det T| * integral of |T^{-T} u| f_K(u),
    i.e. the mixed volume of K with the ellipsoid T^{-1} B.
    """
    t = np.asarray(matrix, dtype=float)
    w = fields.grid.nodes @ np.linalg.inv(t)  # rows are (T^{-T} u)^T
    return abs(np.linalg.det(t)) * integrate(fields.grid,
                                             np.linalg.norm(w, axis=1) * fields.curvature_function)


def centroid(fields: FieldTable) -> np.ndarray:
    """Center of mass, (1/((n+1)Vol)) * integral of X(u) h(u) f_K(u)."""
    g = fields.grid
    x = fields.boundary_points
    dens = fields.cone_density
    moment = np.array([integrate(g, x[:, k] * dens) for k in range(g.dim)])
    return moment / ((g.dim + 1) * volume(fields))


# --------------------------------------------------------- mixed curvature


@dataclass(frozen=True, eq=False)
class MixedCurvatureInput:
    """Values and covariant Hessians of n-1 smooth functions on one grid.

    The functions need not be support functions.
    """

    grid: Grid = field(repr=False)
    values: tuple = field(repr=False)
    hessians: tuple = field(repr=False)

    def matrices(self):
        eye = np.eye(self.grid.dim - 1)[None]
        return [hs + v[:, None, None] * eye for v, hs in zip(self.values, self.hessians)]


def mixed_input(grid: Grid, *functions, hessians=None) -> MixedCurvatureInput:
    """Bundle node samples with their Hessians (spectral unless supplied)."""
    vals = tuple(np.asarray(f, dtype=float) for f in functions)
    if hessians is None:
        hessians = tuple(differentiate(grid, f)[1] for f in vals)
    return MixedCurvatureInput(grid, vals, tuple(hessians))


def mixed_curvature(mci: MixedCurvatureInput) -> np.ndarray:
    """s(f_1, ..., f_{n-1}) at every node.

    Circle: f'' + f.  Sphere: the mixed discriminant
    D(A, B) = (a11 b22 + a22 b11 - a12 b21 - a21 b12) / 2 of
    A = Hess f_1 + f_1 I and B = Hess f_2 + f_2 I.
    """
    n = mci.grid.dim
    if len(mci.values) != n - 1:
        raise ValueError(f"mixed curvature on S^{n - 1} takes {n - 1} functions, "
                         f"got {len(mci.values)}")
    mats = mci.matrices()
    if n == 2:
        return mats[0][:, 0, 0]
    a, b = mats
    return 0.5 * (a[:, 0, 0] * b[:, 1, 1] + a[:, 1, 1] * b[:, 0, 0]
                  - a[:, 0, 1] * b[:, 1, 0] - a[:, 1, 0] * b[:, 0, 1])


def mixed_integral(f0, rest: MixedCurvatureInput) -> float:
    """V(f0, f1, ..., f_{n-1}) = (1/n) * integral of f0 * s(f1, ..., f_{n-1})."""
    f0 = np.asarray(f0, dtype=float)
    if f0.shape != (rest.grid.size,):
        raise ValueError("f0 must have one value per node of the mixed-curvature grid")
    return integrate(rest.grid, f0 * mixed_curvature(rest)) / rest.grid.dim


# ------------------------------------------------------------ polar bodies


def _ratio(body, u, v):
    return np.einsum("ij,ij->i", u, v) / body.support(u)


def _max_ratio_circle(body: Body, v, coarse):
    """max over unit u of (u.v)/h(u) for unit rows of v, plus the argmax angle."""
    alpha = np.arctan2(coarse[:, 1], coarse[:, 0])
    hc = body.support(coarse)
    best_val = np.empty(v.shape[0])
    best_ang = np.empty(v.shape[0])
    for lo in range(0, v.shape[0], 1024):
        chunk = v[lo:lo + 1024]
        table = (chunk @ coarse.T) / hc[None, :]
        j = np.argmax(table, axis=1)
        best_val[lo:lo + 1024] = table[np.arange(j.size), j]
        best_ang[lo:lo + 1024] = alpha[j]

    def g(ang):
        u = np.column_stack([np.cos(ang), np.sin(ang)])
        return _ratio(body, u, v)

    span = 2.0 * np.pi / coarse.shape[0]
    a, b = best_ang - span, best_ang + span
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = g(c), g(d)
    for _ in range(80):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new = np.where(left, b - GOLDEN * (b - a), a + GOLDEN * (b - a))
        fnew = g(new)
        c, d, fc, fd = (np.where(left, new, d), np.where(left, c, new),
                        np.where(left, fnew, fd), np.where(left, fc, fnew))
        for val, ang in ((fc, c), (fd, d)):
            better = val > best_val
            best_val = np.where(better, val, best_val)
            best_ang = np.where(better, ang, best_ang)
        if np.max(b - a) < 1e-13:
            break
    return best_val, best_ang


def _tangent_basis(w):
    # any orthonormal pair perpendicular to w, rowwise
    ref = np.where(np.abs(w[:, 2:3]) < 0.9, np.array([[0.0, 0.0, 1.0]]), np.array([[1.0, 0.0, 0.0]]))
    e1 = np.cross(w, ref)
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(w, e1)
    return np.stack([e1, e2], axis=1)


def _ratio_jet(body, w, v, fd_step=1e-4):
    """Value, Euclidean gradient and Hessian of g(w) = (w.v)/H(w)."""
    if body.analytic:
        hv, gh, hh = body.jet(w)
    else:
        hv = body.support(w)
        eye = np.eye(3)
        gh = np.empty_like(w)
        hh = np.empty((w.shape[0], 3, 3))
        for i in range(3):
            ei = fd_step * eye[i]
            gh[:, i] = (body.support(w + ei) - body.support(w - ei)) / (2 * fd_step)
            for j in range(i, 3):
                ej = fd_step * eye[j]
                val = (body.support(w + ei + ej) - body.support(w + ei - ej)
                       - body.support(w - ei + ej) + body.support(w - ei - ej)) / (4 * fd_step**2)
                hh[:, i, j] = hh[:, j, i] = val
    a = np.einsum("ij,ij->i", w, v)
    gval = a / hv
    grad = v / hv[:, None] - (a / hv**2)[:, None] * gh
    outer = v[:, :, None] * gh[:, None, :]
    hess = (-(outer + outer.transpose(0, 2, 1)) / hv[:, None, None] ** 2
            - (a / hv**2)[:, None, None] * hh
            + (2 * a / hv**3)[:, None, None] * gh[:, :, None] * gh[:, None, :])
    return gval, grad, hess


def _max_ratio_sphere(body: Body, v, coarse, max_iter=40):
    hc = body.support(coarse)
    best_val = np.empty(v.shape[0])
    w = np.empty_like(v)
    for lo in range(0, v.shape[0], 512):
        chunk = v[lo:lo + 512]
        table = (chunk @ coarse.T) / hc[None, :]
        j = np.argmax(table, axis=1)
        best_val[lo:lo + 512] = table[np.arange(j.size), j]
        w[lo:lo + 512] = coarse[j]

    active = np.ones(v.shape[0], dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        wi, vi = w[idx], v[idx]
        gval, grad, hess = _ratio_jet(body, wi, vi)
        basis = _tangent_basis(wi)
        gt = np.einsum("iak,ik->ia", basis, grad)
        ht = np.einsum("iak,ikl,ibl->iab", basis, hess, basis)
        # concave model near the maximum; fall back to gradient ascent otherwise
        eig = np.linalg.eigvalsh(ht)
        ok = eig[:, -1] < 0
        step = np.zeros_like(gt)
        if np.any(ok):
            step[ok] = -np.linalg.solve(ht[ok], gt[ok][:, :, None])[:, :, 0]
        if np.any(~ok):
            step[~ok] = 1e-2 * gt[~ok] / np.maximum(np.linalg.norm(gt[~ok], axis=1), 1e-300)[:, None]
        cur = np.maximum(gval, best_val[idx])
        scale = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        for _ in range(30):
            trial = wi + scale[:, None] * np.einsum("ia,iak->ik", step, basis)
            trial /= np.linalg.norm(trial, axis=1)[:, None]
            tv = _ratio(body, trial, vi)
            good = (tv >= cur) & ~accepted
            w[idx[good]] = trial[good]
            best_val[idx[good]] = tv[good]
            accepted |= good
            if accepted.all():
                break
            scale = np.where(accepted, scale, 0.5 * scale)
        small = np.linalg.norm(step, axis=1) * scale < 1e-12
        flat = ~accepted
        active[idx[small | flat]] = False
    _, grad, _ = _ratio_jet(body, w, v)
    basis = _tangent_basis(w)
    gnorm = np.linalg.norm(np.einsum("iak,ik->ia", basis, grad), axis=1) / np.abs(best_val)
    bad = np.flatnonzero(gnorm > 1e-6)
    if bad.size:
        i = int(bad[0])
        raise PolarRefinementError(
            f"support-ratio refinement did not converge for direction {v[i].tolist()} "
            f"(relative tangential gradient {gnorm[i]:.3g})", direction=v[i].copy())
    return best_val, w


def _argmax_normals(body: Body, unit, coarse):
    """Maximum of (u.v)/h(u) over unit u and the maximizing u, for unit rows v."""
    if body.dim == 2:
        val, ang = _max_ratio_circle(body, unit, coarse)
        return val, np.column_stack([np.cos(ang), np.sin(ang)])
    return _max_ratio_sphere(body, unit, coarse)


def _max_support_ratio(body: Body, v, coarse):
    v = np.atleast_2d(np.asarray(v, dtype=float))
    r = np.linalg.norm(v, axis=1)
    val, _ = _argmax_normals(body, v / r[:, None], coarse)
    return r * val


def _tangents(w):
    """Orthonormal basis of the plane perpendicular to each row, shape (m, n, n-1)."""
    if w.shape[1] == 2:
        return np.stack([-w[:, 1], w[:, 0]], axis=1)[:, :, None]
    return _tangent_basis(w).transpose(0, 2, 1)


def _polar_jet(body: Body, v, coarse, newton_steps=3):
    """Value, gradient and Hessian of the gauge function of K, which is h_{K°}.

    At the maximizing normal u the boundary point X(u) = grad H(u) of K is
    parallel to v, the gradient of h_{K°} is u/H(u), and differentiating
    that relation along u gives the Hessian.  The normal is first polished
    by Newton's method on the parallelism condition.
    """
    r = np.linalg.norm(v, axis=1)
    unit = v / r[:, None]
    _, u = _argmax_normals(body, unit, coarse)
    e = _tangents(unit)
    for _ in range(newton_steps):
        _, x, hess_h = body.jet(u)
        t = _tangents(u)
        res = np.einsum("ika,ik->ia", e, x)
        jac = np.einsum("ika,ikl,ilb->iab", e, hess_h, t)
        step = -np.linalg.solve(jac, res[:, :, None])[:, :, 0]
        u = u + np.einsum("ika,ia->ik", t, step)
        u /= np.linalg.norm(u, axis=1)[:, None]
    hv, x, hess_h = body.jet(u)
    t = _tangents(u)
    value = r * np.einsum("ij,ij->i", unit, u) / hv
    grad = u / hv[:, None]
    # A [R t | X] = [t/H - u (X.t)/H^2 | 0] determines the Hessian A at y = X
    cols = np.concatenate([np.einsum("ikl,ila->ika", hess_h, t), x[:, :, None]], axis=2)
    xt = np.einsum("ik,ika->ia", x, t)
    rhs = np.concatenate([t / hv[:, None, None] - u[:, :, None] * xt[:, None, :] / hv[:, None, None] ** 2,
                          np.zeros_like(x)[:, :, None]], axis=2)
    a = np.linalg.solve(cols.transpose(0, 2, 1), rhs.transpose(0, 2, 1)).transpose(0, 2, 1)
    a = 0.5 * (a + a.transpose(0, 2, 1))
    # the Hessian is homogeneous of degree -1
    hess = a * (np.linalg.norm(x, axis=1) / r)[:, None, None]
    return value, grad, hess


def _coarse_nodes(dim, grid):
    if grid is not None:
        return np.asarray(grid.nodes)
    return (validation_grid(2) if dim == 2 else build_grid(3, (48, 96))).nodes


def polar_body(body: Body, grid: Grid | None = None) -> Body:
    """Numerical polar body K° with h_{K°}(v) = max_u (u.v)/h_K(u).

    The maximum is located on the nodes of ``grid`` (used as the coarse
    candidate set) and then polished: golden-section search in angle on the
    circle, damped Newton on the sphere.  When ``body`` has closed-form
    derivatives the polar gets an exact jet through the implicit relation
    between the maximizing normal and the boundary of K; otherwise its
    derivatives are spectral.  The body is validated like any other.
    """
    coarse = _coarse_nodes(body.dim, grid)

    def support(v):
        return _max_support_ratio(body, v, coarse)

    jet = (lambda v: _polar_jet(body, v, coarse)) if body.analytic else None
    out = Body(body.dim, "polar_numeric", {"base": body}, support, jet)
    validate(out)
    return out


def radial_function(body: Body, v, grid: Grid | None = None):
    """rho_K(v) = min over u.v > 0 of h(u)/(u.v), for unit vector(s) v."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    coarse = _coarse_nodes(body.dim, grid)
    rho = 1.0 / _max_support_ratio(body, v / np.linalg.norm(v, axis=1)[:, None], coarse)
    return rho if rho.size > 1 else float(rho[0])


# ------------------------------------------------------- Aleksandrov bodies


def aleksandrov_body(f, grid: Grid) -> Body:
    """Polygonal Aleksandrov body of node samples ``f`` on a circle grid.

    A_f is the polar of the convex hull of {u_i / f(u_i)}: the
    intersection of the half-planes x.u_i <= f(u_i).  Its support function
    is evaluated exactly as the max over the polygon's vertices.
    """
    if grid.dim != 2:
        raise ValueError("Aleksandrov bodies are implemented for the circle only")
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.size,) or not np.all(f > 0):
        raise ValueError("f must be positive with one value per node")
    pts = grid.nodes / f[:, None]
    hull = ConvexHull(pts)
    hv = hull.vertices  # counterclockwise in 2-D
    if hv.size < 3:
        raise ValueError("degenerate dual hull")
    p = pts[hv]
    q = np.roll(p, -1, axis=0)
    # vertex of A_f where the support lines for consecutive hull points meet
    det = p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
    if np.any(np.abs(det) < 1e-300):
        raise ValueError("degenerate dual hull (unbounded ratio)")
    verts = np.column_stack([(q[:, 1] - p[:, 1]) / det, (p[:, 0] - q[:, 0]) / det])

    def support(v):
        return np.max(v @ verts.T, axis=1)

    return Body(2, "polygonal2d",
                {"vertices": verts.tolist(), "active_nodes": sorted(int(i) for i in hv)},
                support, None)


def aleksandrov_gap(f, grid: Grid) -> float:
    """max(f - h_{A_f}) over the nodes; zero when f is itself a support function."""
    f = np.asarray(f, dtype=float)
    return float(np.max(f - aleksandrov_body(f, grid).support(grid.nodes)))
