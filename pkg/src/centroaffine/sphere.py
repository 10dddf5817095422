"""Quadrature grids and spectral calculus on S^1 and S^2.

The circle uses the uniform (trapezoidal) rule with Fourier collocation
differentiation.  The 2-sphere uses a Gauss-Legendre rule in cos(theta)
times a uniform rule in phi; derivatives in phi are Fourier collocation
and derivatives in the polar direction are polynomial (barycentric)
differentiation in x = cos(theta) applied separately to the even-m and
odd-m parts of the samples.  Splitting by azimuthal parity is what keeps
the polar derivative spectrally accurate: the even part is a smooth
function of x, the odd part is sin(theta) times a smooth function of x.

Derivatives are returned in the orthonormal frame (e_theta, e_phi), so the
covariant Hessian is an ordinary symmetric 2x2 matrix at every node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Grid", "build_grid", "integrate", "differentiate", "sphere_measure"]

MIN_RESOLUTION = 8


def sphere_measure(dim: int) -> float:
    """Total measure of S^{dim-1} (2*pi or 4*pi)."""
    if dim == 2:
        return 2.0 * np.pi
    if dim == 3:
        return 4.0 * np.pi
    raise ValueError(f"unsupported dimension {dim}")


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def fourier_diff_matrices(n: int):
    """First and second Fourier differentiation matrices for n equispaced points.

    ``n`` must be even.  Off-diagonal entries follow the classical closed
    forms for the periodic sinc interpolant on [0, 2*pi).
    """
    if n % 2:
        raise ValueError("Fourier differentiation needs an even number of points")
    step = 2.0 * np.pi / n
    k = np.arange(n)
    diff = k[:, None] - k[None, :]
    sign = np.where(diff % 2 == 0, 1.0, -1.0)
    off = diff != 0
    half = 0.5 * diff * step
    d1 = np.zeros((n, n))
    d2 = np.zeros((n, n))
    d1[off] = 0.5 * sign[off] / np.tan(half[off])
    d2[off] = -0.5 * sign[off] / np.sin(half[off]) ** 2
    # diagonals from the negative row sum (exact annihilation of constants);
    # the closed-form diagonal -pi^2/(3 step^2) - 1/6 loses ~N^2 eps against it
    np.fill_diagonal(d1, -d1.sum(axis=1))
    np.fill_diagonal(d2, -d2.sum(axis=1))
    return d1, d2


def legendre_diff_matrices(x, quad_weights):
    """Barycentric differentiation matrices on Gauss-Legendre nodes ``x``.

    Uses the closed-form barycentric weights (-1)^j sqrt((1 - x_j^2) w_j)
    and the standard recursion for the second-derivative matrix, which is
    more accurate than squaring the first-derivative matrix.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    order = np.argsort(x)
    bary = np.empty(n)
    bary[order] = (-1.0) ** np.arange(n) * np.sqrt((1.0 - x[order] ** 2) * quad_weights[order])
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d1 = (bary[None, :] / bary[:, None]) / dx
    np.fill_diagonal(d1, 0.0)
    np.fill_diagonal(d1, -d1.sum(axis=1))
    d2 = 2.0 * d1 * (np.diag(d1)[:, None] - 1.0 / dx)
    np.fill_diagonal(d2, 0.0)
    np.fill_diagonal(d2, -d2.sum(axis=1))
    return d1, d2


@dataclass(frozen=True)
class Grid:
    """Quadrature nodes, weights and derivative operators on S^{dim-1}.

    ``nodes`` has shape (M, dim) and ``frame`` has shape (M, dim-1, dim):
    ``frame[i, a]`` is the a-th orthonormal tangent vector at node i.  For
    dim=3 the nodes are stored row-major over (theta, phi).
    """

    dim: int
    resolution: tuple
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    frame: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray | None = field(repr=False, default=None)
    ops: dict = field(repr=False, default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def shape(self) -> tuple:
        """Logical array shape of node samples, (N,) or (N_theta, N_phi)."""
        return tuple(self.resolution)

    def key(self):
        return (self.dim, tuple(self.resolution))


def build_grid(dim: int, resolution) -> Grid:
    """Build a quadrature grid on S^{dim-1}.

    Parameters
    ----------
    dim : int
        2 (circle) or 3 (2-sphere).
    resolution : int or tuple
        ``N`` (or ``(N,)``) for the circle, ``(N_theta, N_phi)`` for the sphere.
        Every component must be at least 8; N and N_phi must be even.

    Returns
    -------
    Grid
    """
    res = (resolution,) if np.isscalar(resolution) else tuple(int(r) for r in resolution)
    if dim not in (2, 3):
        raise ValueError(f"unsupported dimension {dim}; expected 2 or 3")
    if any(r < MIN_RESOLUTION for r in res):
        raise ValueError(f"resolution components must be >= {MIN_RESOLUTION}, got {res}")

    if dim == 2:
        if len(res) != 1:
            raise ValueError("circle grids take a single resolution N")
        (n,) = res
        if n % 2:
            raise ValueError("circle resolution must be even")
        theta = 2.0 * np.pi * np.arange(n) / n
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        frame = np.column_stack([-np.sin(theta), np.cos(theta)])[:, None, :]
        weights = np.full(n, 2.0 * np.pi / n)
        d1, d2 = fourier_diff_matrices(n)
        ops = {"d1": _frozen(d1), "d2": _frozen(d2)}
        return Grid(2, (int(n),), _frozen(nodes), _frozen(weights), _frozen(frame),
                    _frozen(theta), None, ops)

    if len(res) != 2:
        raise ValueError("sphere grids take a resolution (N_theta, N_phi)")
    n_theta, n_phi = res
    if n_phi % 2:
        raise ValueError("N_phi must be even")
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    # ascending theta means descending x
    x, wx = x[::-1].copy(), wx[::-1].copy()
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    st, ct, sp, cp = np.sin(tt), np.cos(tt), np.sin(pp), np.cos(pp)
    nodes = np.stack([st * cp, st * sp, ct], axis=-1).reshape(-1, 3)
    e_theta = np.stack([ct * cp, ct * sp, -st], axis=-1).reshape(-1, 3)
    e_phi = np.stack([-sp, cp, np.zeros_like(pp)], axis=-1).reshape(-1, 3)
    frame = np.stack([e_theta, e_phi], axis=1)
    weights = (wx[:, None] * np.full(n_phi, 2.0 * np.pi / n_phi)[None, :]).ravel()
    dx1, dx2 = legendre_diff_matrices(x, wx)
    dp1, dp2 = fourier_diff_matrices(n_phi)
    ops = {
        "dx1": _frozen(dx1), "dx2": _frozen(dx2),
        "dp1": _frozen(dp1), "dp2": _frozen(dp2),
        "x": _frozen(x), "s": _frozen(np.sin(theta)),
    }
    return Grid(3, (int(n_theta), int(n_phi)), _frozen(nodes), _frozen(weights),
                _frozen(frame), _frozen(theta), _frozen(phi), ops)


def _check_values(grid: Grid, values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        v = v.reshape(-1)
    if v.size != grid.size:
        raise ValueError(f"expected {grid.size} node values, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("node values must be finite")
    return v


def integrate(grid: Grid, values) -> float:
    """Quadrature sum of per-node values against the sphere measure."""
    v = _check_values(grid, values)
    return float(np.dot(grid.weights, v))


def _polar_derivatives(grid: Grid, f):
    """d/dtheta and d2/dtheta2 of samples f with shape (N_theta, N_phi)."""
    ops = grid.ops
    x = ops["x"][:, None]
    s = ops["s"][:, None]
    dx1, dx2 = ops["dx1"], ops["dx2"]
    half = f.shape[1] // 2
    flipped = np.roll(f, -half, axis=1)  # samples at phi + pi
    even = 0.5 * (f + flipped)
    odd = 0.5 * (f - flipped) / s

    ge, gee = dx1 @ even, dx2 @ even
    go, goo = dx1 @ odd, dx2 @ odd
    f_t = -s * ge + (x * odd - s**2 * go)
    f_tt = (-x * ge + s**2 * gee) + (-s * odd - 3.0 * s * x * go + s**3 * goo)
    return f_t, f_tt


def differentiate(grid: Grid, values, mixed_order: str = "theta-phi"):
    """Spectral gradient and covariant Hessian in the grid's orthonormal frame.

    Parameters
    ----------
    grid : Grid
    values : array_like
        One sample per node of a smooth function on the sphere.
    mixed_order : {"theta-phi", "phi-theta"}
        For the 2-sphere, which derivative is applied first when forming the
        mixed term; both orders agree to round-off on smooth inputs.

    Returns
    -------
    gradient : ndarray, shape (M, dim-1)
    hessian : ndarray, shape (M, dim-1, dim-1)
    """
    v = _check_values(grid, values)
    if grid.dim == 2:
        d1 = grid.ops["d1"] @ v
        d2 = grid.ops["d2"] @ v
        return d1[:, None], d2[:, None, None]

    if "dx1" not in grid.ops:
        raise ValueError("grid is missing its polar differentiation operators")
    f = v.reshape(grid.shape)
    dp1, dp2 = grid.ops["dp1"], grid.ops["dp2"]
    s = grid.ops["s"][:, None]
    cot = grid.ops["x"][:, None] / s

    f_t, f_tt = _polar_derivatives(grid, f)
    # the azimuthal mean is annihilated exactly; this keeps f_pp / sin^2
    # at round-off level near the poles
    f_osc = f - f.mean(axis=1, keepdims=True)
    f_p = f_osc @ dp1.T
    f_pp = f_osc @ dp2.T
    if mixed_order == "theta-phi":
        f_tp = (f_t - f_t.mean(axis=1, keepdims=True)) @ dp1.T
    elif mixed_order == "phi-theta":
        f_tp, _ = _polar_derivatives(grid, f_p)
    else:
        raise ValueError(f"unknown mixed_order {mixed_order!r}")

    h11 = f_tt
    h12 = (f_tp - cot * f_p) / s
    h22 = f_pp / s**2 + cot * f_t
    grad = np.stack([f_t.ravel(), (f_p / s).ravel()], axis=-1)
    hess = np.empty((grid.size, 2, 2))
    hess[:, 0, 0] = h11.ravel()
    hess[:, 0, 1] = hess[:, 1, 0] = h12.ravel()
    hess[:, 1, 1] = h22.ravel()
    return grad, hess
