"""Convex bodies given by support functions, and their pointwise fields.

Every body carries the 1-homogeneous extension H(v) = |v| h(v/|v|) of its
support function.  Families with closed forms also supply the Euclidean
gradient and Hessian of H; on the unit sphere these give the boundary
point X(u) = grad H(u) and the matrix Hess_S h + h*I (the restriction of
the Euclidean Hessian to the tangent plane).  Linear images and
translates are built on that single mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .sphere import Grid, build_grid, differentiate

__all__ = [
    "Body",
    "BodyValidationError",
    "FieldTable",
    "make_ellipsoid",
    "make_fourier",
    "make_sphharm",
    "linear_image",
    "translate",
    "evaluate_fields",
    "curvature_extrema",
    "refined_extrema",
    "validation_grid",
]

FAMILIES = ("ellipsoid", "fourier2d", "sphharm3d", "linear_image", "translate",
            "polar_numeric", "polygonal2d")

VALIDATION_RESOLUTION = {2: (512,), 3: (96, 192)}


class BodyValidationError(ValueError):
    """A support function that fails positivity or convexity at a node."""

    def __init__(self, message, node=None, direction=None, quantity=None, value=None):
        super().__init__(message)
        self.node = node
        self.direction = direction
        self.quantity = quantity
        self.value = value


@lru_cache(maxsize=None)
def validation_grid(dim: int) -> Grid:
    return build_grid(dim, VALIDATION_RESOLUTION[dim])


@dataclass(frozen=True, eq=False)
class Body:
    """A convex body with the origin in its interior.

    ``support(v)`` evaluates the homogeneous support function on an array
    of shape (m, dim).  ``jet(v)``, when available, returns the value,
    Euclidean gradient (m, dim) and Hessian (m, dim, dim) of the same
    extension.
    """

    dim: int
    family: str
    params: dict = field(repr=False)
    support_fn: Callable = field(repr=False)
    jet_fn: Callable | None = field(repr=False, default=None)

    def support(self, v) -> np.ndarray:
        v = np.atleast_2d(np.asarray(v, dtype=float))
        return self.support_fn(v)

    __call__ = support

    @property
    def analytic(self) -> bool:
        return self.jet_fn is not None

    def jet(self, v):
        if self.jet_fn is None:
            raise NotImplementedError(f"{self.family} body has no closed-form derivatives")
        v = np.atleast_2d(np.asarray(v, dtype=float))
        return self.jet_fn(v)

    def descriptor(self) -> dict:
        """JSON-friendly description of the construction."""
        out = {"family": self.family, "dim": self.dim}
        for key, val in self.params.items():
            if isinstance(val, Body):
                out[key] = val.descriptor()
            elif isinstance(val, np.ndarray):
                out[key] = val.tolist()
            else:
                out[key] = val
        return out


# ----------------------------------------------------------------- families


def make_ellipsoid(axes) -> Body:
    """Centered ellipsoid with semi-axes along the coordinate directions."""
    a = np.asarray(axes, dtype=float).ravel()
    if a.size not in (2, 3):
        raise ValueError("ellipsoids are supported in dimensions 2 and 3")
    if np.any(a <= 0) or not np.all(np.isfinite(a)):
        raise ValueError(f"semi-axes must be positive, got {a.tolist()}")
    d = a**2

    def support(v):
        return np.sqrt(np.einsum("ij,j,ij->i", v, d, v))

    def jet(v):
        hv = support(v)
        dv = v * d
        grad = dv / hv[:, None]
        hess = (np.diag(d)[None] - dv[:, :, None] * dv[:, None, :] / hv[:, None, None] ** 2)
        return hv, grad, hess / hv[:, None, None]

    return Body(a.size, "ellipsoid", {"axes": a.tolist()}, support, jet)


def _fourier_series(c0, coeffs, theta):
    h = np.full_like(theta, float(c0))
    dh = np.zeros_like(theta)
    d2h = np.zeros_like(theta)
    for k, ak, bk in coeffs:
        c, s = np.cos(k * theta), np.sin(k * theta)
        h += ak * c + bk * s
        dh += k * (-ak * s + bk * c)
        d2h += -k * k * (ak * c + bk * s)
    return h, dh, d2h


def make_fourier(c0, coeffs=()) -> Body:
    """Planar body with h(theta) = c0 + sum_k (a_k cos k theta + b_k sin k theta).

    ``coeffs`` is a sequence of (k, a_k, b_k).  Raises BodyValidationError
    when h or h'' + h is not positive on the validation grid.
    """
    terms = tuple((int(k), float(a), float(b)) for k, a, b in coeffs)
    if any(k < 1 for k, _, _ in terms):
        raise ValueError("Fourier modes must have k >= 1")

    def support(v):
        r = np.hypot(v[:, 0], v[:, 1])
        h, _, _ = _fourier_series(c0, terms, np.arctan2(v[:, 1], v[:, 0]))
        return r * h

    def jet(v):
        r = np.hypot(v[:, 0], v[:, 1])
        th = np.arctan2(v[:, 1], v[:, 0])
        h, dh, d2h = _fourier_series(c0, terms, th)
        u = np.column_stack([np.cos(th), np.sin(th)])
        up = np.column_stack([-np.sin(th), np.cos(th)])
        grad = h[:, None] * u + dh[:, None] * up
        hess = ((d2h + h) / r)[:, None, None] * up[:, :, None] * up[:, None, :]
        return r * h, grad, hess

    body = Body(2, "fourier2d", {"c0": float(c0), "coeffs": [list(t) for t in terms]},
                support, jet)
    validate(body)
    return body


def _real_sh_norm(l, m):
    m = abs(m)
    base = (2 * l + 1) / (4.0 * np.pi) * factorial(l - m) / factorial(l + m)
    return np.sqrt(base) * (np.sqrt(2.0) if m else 1.0)


@lru_cache(maxsize=None)
def _legendre_derivs(l, m):
    q = np.polynomial.legendre.Legendre.basis(l).deriv(m).convert(kind=np.polynomial.Polynomial)
    return q, q.deriv(1), q.deriv(2)


def _sh_jet(l, m, w):
    """Value, gradient and Hessian of a polynomial extension of real Y_lm.

    On the unit sphere sin^|m|(theta) e^{i|m|phi} = (x + iy)^|m|, so
    N * Re/Im((x+iy)^|m|) * P_l^{(|m|)}(z) restricts to the orthonormal real
    harmonic (no Condon-Shortley phase).
    """
    am = abs(m)
    norm = _real_sh_norm(l, m)
    q, dq, d2q = _legendre_derivs(l, am)
    z = w[:, 2]
    zeta = w[:, 0] + 1j * w[:, 1]
    part = np.real if m >= 0 else np.imag
    n = w.shape[0]
    a = part(zeta**am) if am else np.ones(n)
    grad_a = np.zeros((n, 3))
    hess_a = np.zeros((n, 3, 3))
    if am >= 1:
        p1 = am * zeta ** (am - 1)
        grad_a[:, 0] = part(p1)
        grad_a[:, 1] = part(1j * p1)
    if am >= 2:
        p2 = am * (am - 1) * zeta ** (am - 2)
        hess_a[:, 0, 0] = part(p2)
        hess_a[:, 0, 1] = hess_a[:, 1, 0] = part(1j * p2)
        hess_a[:, 1, 1] = -part(p2)
    qz, dqz, d2qz = q(z), dq(z), d2q(z)
    ez = np.array([0.0, 0.0, 1.0])
    val = a * qz
    grad = grad_a * qz[:, None] + (a * dqz)[:, None] * ez
    cross = dqz[:, None, None] * (grad_a[:, :, None] * ez[None, None, :]
                                  + ez[None, :, None] * grad_a[:, None, :])
    hess = hess_a * qz[:, None, None] + cross
    hess[:, 2, 2] += a * d2qz
    return norm * val, norm * grad, norm * hess


def _homogenize(v, jet_on_sphere):
    """Jet of H(v) = |v| P(v/|v|) from the jet of P at the unit vector."""
    r = np.linalg.norm(v, axis=1)
    w = v / r[:, None]
    p, gp, hp = jet_on_sphere(w)
    dim = v.shape[1]
    proj = np.eye(dim)[None] - w[:, :, None] * w[:, None, :]
    radial = p - np.einsum("ij,ij->i", w, gp)
    grad = p[:, None] * w + np.einsum("ijk,ik->ij", proj, gp)
    inner = hp + radial[:, None, None] * np.eye(dim)[None]
    hess = np.einsum("iab,ibc,icd->iad", proj, inner, proj) / r[:, None, None]
    return r * p, grad, hess


def make_sphharm(c0, coeffs=()) -> Body:
    """Body in R^3 with h(u) = c0 + sum c_lm Y_lm(u), real orthonormal harmonics.

    ``coeffs`` is a sequence of (l, m, c) with l >= 1 and |m| <= l.
    """
    terms = tuple((int(l), int(m), float(c)) for l, m, c in coeffs)
    for l, m, _ in terms:
        if l < 1 or abs(m) > l:
            raise ValueError(f"invalid harmonic index (l={l}, m={m})")

    def on_sphere(w):
        p = np.full(w.shape[0], float(c0))
        gp = np.zeros_like(w)
        hp = np.zeros((w.shape[0], 3, 3))
        for l, m, c in terms:
            a, g, h = _sh_jet(l, m, w)
            p += c * a
            gp += c * g
            hp += c * h
        return p, gp, hp

    def jet(v):
        return _homogenize(v, on_sphere)

    def support(v):
        r = np.linalg.norm(v, axis=1)
        return r * on_sphere(v / r[:, None])[0]

    body = Body(3, "sphharm3d", {"c0": float(c0), "coeffs": [list(t) for t in terms]},
                support, jet)
    validate(body)
    return body


def linear_image(body: Body, matrix) -> Body:
    """The body A K, with h_{AK}(v) = h_K(A^T v)."""
    a = np.asarray(matrix, dtype=float)
    if a.shape != (body.dim, body.dim):
        raise ValueError(f"matrix must be {body.dim}x{body.dim}")
    det = np.linalg.det(a)
    if not np.isfinite(det) or abs(det) < 1e-300 or np.linalg.cond(a) > 1e12:
        raise ValueError("linear_image needs an invertible matrix")
    at = a.T

    def support(v):
        return body.support_fn(v @ a)

    jet = None
    if body.analytic:
        def jet(v):
            hv, g, hs = body.jet_fn(v @ a)
            return hv, g @ at, np.einsum("ab,ibc,cd->iad", a, hs, at)

    out = Body(body.dim, "linear_image", {"base": body, "matrix": a.tolist()}, support, jet)
    validate(out)
    return out


def translate(body: Body, t) -> Body:
    """The body K + t; raises if the origin leaves the interior."""
    t = np.asarray(t, dtype=float).ravel()
    if t.size != body.dim:
        raise ValueError(f"translation must have {body.dim} components")

    def support(v):
        return body.support_fn(v) + v @ t

    jet = None
    if body.analytic:
        def jet(v):
            hv, g, hs = body.jet_fn(v)
            return hv + v @ t, g + t[None, :], hs

    out = Body(body.dim, "translate", {"base": body, "t": t.tolist()}, support, jet)
    validate(out)
    return out


# ------------------------------------------------------------------- fields


@dataclass(frozen=True, eq=False)
class FieldTable:
    """Per-node geometry of a body on a grid.

    ``hessian`` is the covariant Hessian of h in the grid frame, so the
    curvature matrix is ``hessian + h * I`` and ``curvature_function`` is
    its determinant (the reciprocal Gauss curvature as a function of the
    normal).
    """

    grid: Grid = field(repr=False)
    h: np.ndarray = field(repr=False)
    gradient: np.ndarray = field(repr=False)
    hessian: np.ndarray = field(repr=False)
    curvature_function: np.ndarray = field(repr=False)
    gauss_curvature: np.ndarray = field(repr=False)
    K0: np.ndarray = field(repr=False)
    cone_density: np.ndarray = field(repr=False)
    method: str = "analytic"
    body: dict | None = None
    source: "Body | None" = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def curvature_matrix(self) -> np.ndarray:
        return self.hessian + self.h[:, None, None] * np.eye(self.dim - 1)[None]

    @property
    def boundary_points(self) -> np.ndarray:
        """X(u) = h(u) u + tangential gradient, the boundary point with normal u."""
        g = self.grid
        return self.h[:, None] * g.nodes + np.einsum("ia,iak->ik", self.gradient, g.frame)


def _det(m):
    if m.shape[-1] == 1:
        return m[:, 0, 0].copy()
    return m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]


def _check_convex(grid, h, curv, label):
    bad = np.flatnonzero(~(h > 0))
    if bad.size:
        i = int(bad[0])
        raise BodyValidationError(
            f"{label}: support function not positive at node {i} "
            f"(direction {np.round(grid.nodes[i], 6).tolist()}, h = {h[i]:.6g})",
            node=i, direction=grid.nodes[i].copy(), quantity="h", value=float(h[i]))
    if curv.shape[-1] == 1:
        eig_min = curv[:, 0, 0]
    else:
        eig_min = np.linalg.eigvalsh(curv)[:, 0]
    bad = np.flatnonzero(~(eig_min > 0))
    if bad.size:
        i = int(bad[np.argmin(eig_min[bad])])
        raise BodyValidationError(
            f"{label}: Hess h + h I not positive definite at node {i} "
            f"(direction {np.round(grid.nodes[i], 6).tolist()}, "
            f"smallest eigenvalue = {eig_min[i]:.6g})",
            node=i, direction=grid.nodes[i].copy(), quantity="hess_h_plus_h",
            value=float(eig_min[i]))


def _raw_fields(body: Body, grid: Grid, method: str):
    if body.dim != grid.dim:
        raise ValueError(f"body dimension {body.dim} does not match grid dimension {grid.dim}")
    if method == "auto":
        method = "analytic" if body.analytic else "spectral"
    if method == "analytic":
        hv, grad_e, hs = body.jet(grid.nodes)
        gradient = np.einsum("iak,ik->ia", grid.frame, grad_e)
        curv = np.einsum("iak,ikl,ibl->iab", grid.frame, hs, grid.frame)
        hessian = curv - hv[:, None, None] * np.eye(grid.dim - 1)[None]
    elif method == "spectral":
        hv = body.support(grid.nodes)
        gradient, hessian = differentiate(grid, hv)
        curv = hessian + hv[:, None, None] * np.eye(grid.dim - 1)[None]
    else:
        raise ValueError(f"unknown method {method!r}")
    return method, hv, gradient, hessian, curv


def validate(body: Body, grid: Grid | None = None) -> None:
    """Raise BodyValidationError unless h > 0 and Hess h + h I > 0 on ``grid``."""
    grid = grid or validation_grid(body.dim)
    _, hv, _, _, curv = _raw_fields(body, grid, "auto")
    _check_convex(grid, hv, curv, body.family)


def evaluate_fields(body: Body, grid: Grid, method: str = "auto") -> FieldTable:
    """All pointwise fields of ``body`` at the nodes of ``grid``.

    ``method`` is "analytic" (closed-form jets), "spectral" (differentiate
    node samples of h) or "auto" (analytic when available).
    """
    method, hv, gradient, hessian, curv = _raw_fields(body, grid, method)
    _check_convex(grid, hv, curv, body.family)
    fk = _det(curv)
    gauss = 1.0 / fk
    k0 = gauss / hv ** (grid.dim + 1)
    return FieldTable(grid, hv, gradient, hessian, fk, gauss, k0, hv * fk,
                      method, body.descriptor(), body)


# ----------------------------------------------------------------- extrema


def _refine_1d(values, i, kind):
    n = values.size
    ym, y0, yp = values[(i - 1) % n], values[i], values[(i + 1) % n]
    a = 0.5 * (ym + yp - 2.0 * y0)
    b = 0.5 * (yp - ym)
    sign = 1.0 if kind == "min" else -1.0
    if sign * a <= 0:
        return y0
    x = -b / (2.0 * a)
    if abs(x) > 1.0:
        return y0
    return y0 - b * b / (4.0 * a)


def _refine_2d(grid, values, i, kind):
    nt, nphi = grid.shape
    it, ip = divmod(i, nphi)
    if it == 0 or it == nt - 1:
        return values[i]
    f = values.reshape(nt, nphi)
    rows, rhs = [], []
    s0 = np.sin(grid.theta[it])
    dphi = 2.0 * np.pi / nphi
    for dt_ in (-1, 0, 1):
        for dp in (-1, 0, 1):
            x = grid.theta[it + dt_] - grid.theta[it]
            y = dp * dphi * s0
            rows.append([1.0, x, y, 0.5 * x * x, x * y, 0.5 * y * y])
            rhs.append(f[it + dt_, (ip + dp) % nphi])
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    c, g = coef[0], coef[1:3]
    hmat = np.array([[coef[3], coef[4]], [coef[4], coef[5]]])
    eig = np.linalg.eigvalsh(hmat)
    sign = 1.0 if kind == "min" else -1.0
    if np.any(sign * eig <= 0):
        return values[i]
    step = np.linalg.solve(hmat, -g)
    span = np.array([abs(grid.theta[it + 1] - grid.theta[it - 1]), 2 * dphi * s0])
    if np.any(np.abs(step) > span):
        return values[i]
    return c + 0.5 * g @ step


def refined_extrema(grid: Grid, values):
    """Grid min and max of ``values``, each polished by a local quadratic fit.

    The polished values never move inside the raw grid range.
    """
    values = np.asarray(values, dtype=float)
    imin, imax = int(np.argmin(values)), int(np.argmax(values))
    if grid.dim == 2:
        lo = _refine_1d(values, imin, "min")
        hi = _refine_1d(values, imax, "max")
    else:
        lo = _refine_2d(grid, values, imin, "min")
        hi = _refine_2d(grid, values, imax, "max")
    return min(float(lo), float(values[imin])), max(float(hi), float(values[imax]))


def _unit_tangents(w):
    """Orthonormal basis of the plane perpendicular to each row, shape (m, n, n-1)."""
    if w.shape[1] == 2:
        return np.stack([-w[:, 1], w[:, 0]], axis=1)[:, :, None]
    ref = np.where(np.abs(w[:, 2:3]) < 0.9, np.array([[0.0, 0.0, 1.0]]), np.array([[1.0, 0.0, 0.0]]))
    e1 = np.cross(w, ref)
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    return np.stack([e1, np.cross(w, e1)], axis=2)


def centro_affine_curvature_at(body: Body, u) -> np.ndarray:
    """K0 at arbitrary unit normals, from the closed-form jet of ``body``."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    hv, _, hess = body.jet(u)
    t = _unit_tangents(u)
    curv = np.einsum("ika,ikl,ilb->iab", t, hess, t)
    return 1.0 / (_det(curv) * hv ** (body.dim + 1))


def _polish(body, grid, values, i, kind):
    sign = 1.0 if kind == "min" else -1.0
    u0 = grid.nodes[i]
    if grid.dim == 2:
        step = 2.0 * np.pi / grid.size
        a0 = np.arctan2(u0[1], u0[0])

        def obj(a):
            return sign * centro_affine_curvature_at(body, [np.cos(a), np.sin(a)])[0]

        res = minimize_scalar(obj, bounds=(a0 - step, a0 + step), method="bounded",
                              options={"xatol": 1e-13})
        return sign * res.fun
    # sphere: quadratic fits on a shrinking 3x3 stencil in the tangent plane,
    # each stencil evaluated in one batched call
    t = _unit_tangents(u0[None])[0]
    offsets = np.array([(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)], dtype=float)
    design = np.column_stack([np.ones(9), offsets, offsets**2, offsets[:, 0] * offsets[:, 1]])
    center, best = np.zeros(2), sign * values[i]
    size = 0.5 * np.pi / grid.shape[0]
    for _ in range(8):
        z = center + size * offsets
        w = u0 + z @ t.T
        vals = sign * centro_affine_curvature_at(body, w / np.linalg.norm(w, axis=1)[:, None])
        best = min(best, float(vals.min()))
        c = np.linalg.lstsq(design, vals, rcond=None)[0]
        hess = np.array([[2 * c[3], c[5]], [c[5], 2 * c[4]]])
        if np.all(np.linalg.eigvalsh(hess) > 0):
            move = -np.linalg.solve(hess, c[1:3])
            if np.linalg.norm(move) > 2.0:
                move *= 2.0 / np.linalg.norm(move)
        else:
            move = offsets[int(np.argmin(vals))]
        center = center + size * move
        size *= 0.25
    w = u0 + t @ center
    best = min(best, sign * float(centro_affine_curvature_at(body, w / np.linalg.norm(w))[0]))
    return sign * best


def curvature_extrema(fields: FieldTable):
    """(m, M): minimum and maximum of the centro-affine curvature K0.

    When the body behind ``fields`` has a closed-form jet, the grid extrema
    are polished by continuous optimization of K0 near the extremal node;
    otherwise by a local quadratic fit.  Either way the result never moves
    inside the raw grid range.
    """
    body = fields.source
    if body is None or not body.analytic:
        return refined_extrema(fields.grid, fields.K0)
    k0 = fields.K0
    imin, imax = int(np.argmin(k0)), int(np.argmax(k0))
    lo = _polish(body, fields.grid, k0, imin, "min")
    hi = _polish(body, fields.grid, k0, imax, "max")
    return min(float(lo), float(k0[imin])), max(float(hi), float(k0[imax]))
