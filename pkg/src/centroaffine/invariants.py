"""Scalar centro-affine invariants of a body.

All invariants are integrals against the cone measure mu_K of functions of
the centro-affine curvature K0.  Two probability measures recur:

* ``mu' = mu_K / (n Vol K)``, the normalized cone measure, and
* ``nu = K0 mu_K / (n Vol K°)``, the cone measure of the polar pulled back
  to the boundary of K.

Limit sequences are evaluated through ``ln E[K0^eps]`` with
``log1p(E[expm1(eps ln K0)])`` so that exponents as small as 2**-48 keep
full relative precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .body import Body, FieldTable, curvature_extrema, evaluate_fields
from .geometry import mixed_curvature, mixed_input, polar_volume, surface_area, volume
from .sphere import Grid, build_grid, differentiate, integrate

__all__ = [
    "omega_p",
    "affine_isoperimetric_ratio",
    "omega_2n",
    "omega_2n_fields",
    "entropy_omega_K",
    "kl_divergence",
    "lambda_K",
    "log_moment",
    "LimitSequence",
    "limit_sequence",
    "InvariantReport",
    "invariant_report",
    "SEQUENCE_KINDS",
]

SEQUENCE_KINDS = ("a", "b", "c", "d")
P_MAX_LIMIT = 48


def omega_p(fields: FieldTable, p: float) -> float:
    """p-affine surface area, the integral of K0^(p/(n+p)) against mu_K."""
    n = fields.dim
    if p == -n:
        raise ValueError(f"Omega_p is undefined for p = -n = {-n}")
    if np.isinf(p):
        raise ValueError("p must be finite")
    return integrate(fields.grid, fields.K0 ** (p / (n + p)) * fields.cone_density)


def affine_isoperimetric_ratio(fields: FieldTable) -> float:
    """Omega_1^(n+1) / Vol^(n-1)."""
    n = fields.dim
    return omega_p(fields, 1.0) ** (n + 1) / volume(fields) ** (n - 1)


def omega_2n_fields(fields: FieldTable) -> float:
    """Second-variation invariant from a field table.

    With f = h sqrt(K0), returns
    n(n-1)/2 Vol(K°) - (n-1)/2 * integral of f s(f, h, ..., h),
    where the Hessian of f is always spectral and the Hessian of h is the
    one carried by ``fields``.
    """
    g = fields.grid
    n = g.dim
    f = fields.h * np.sqrt(fields.K0)
    _, hess_f = differentiate(g, f)
    if n == 2:
        mci = mixed_input(g, f, hessians=(hess_f,))
    else:
        mci = mixed_input(g, f, fields.h, hessians=(hess_f, fields.hessian))
    second = integrate(g, f * mixed_curvature(mci))
    return 0.5 * n * (n - 1) * polar_volume(fields) - 0.5 * (n - 1) * second


def omega_2n(body: Body, grid: Grid) -> float:
    """Omega_{2,n}(K) on ``grid``; zero exactly on centered ellipsoids.

    Raises
    ------
    FloatingPointError
        If the spectral Hessian of f = h sqrt(K0) is not finite, which
        happens when K0 is too rough for the resolution.
    """
    fields = evaluate_fields(body, grid)
    with np.errstate(all="raise"):
        try:
            return omega_2n_fields(fields)
        except (FloatingPointError, ValueError) as exc:
            raise FloatingPointError(
                f"Omega_2,n could not be differentiated at resolution {grid.resolution}; "
                "increase the resolution") from exc


def entropy_omega_K(fields: FieldTable) -> float:
    """Paouris-Werner invariant from its entropy form.

    ln Omega_K = -(1/Vol K°) * integral of K0 ln K0 against mu_K.
    """
    vp = polar_volume(fields)
    return float(np.exp(-integrate(fields.grid, fields.K0 * np.log(fields.K0) * fields.cone_density) / vp))


def kl_divergence(fields: FieldTable) -> float:
    """Kullback-Leibler divergence between the two cone-measure probabilities."""
    n = fields.dim
    v, vp = volume(fields), polar_volume(fields)
    integrand = fields.K0 * np.log(fields.K0 * v / vp) * fields.cone_density
    return integrate(fields.grid, integrand) / (n * vp)


def lambda_K(fields: FieldTable) -> float:
    """exp of the normalized cone-measure average of ln K0."""
    n = fields.dim
    return float(np.exp(integrate(fields.grid, np.log(fields.K0) * fields.cone_density)
                        / (n * volume(fields))))


def log_moment(fields: FieldTable, eps, measure: str = "cone") -> np.ndarray:
    """ln E[K0^eps] under the normalized cone measure or its K0-weighted twin.

    Parameters
    ----------
    eps : float or array_like
    measure : {"cone", "polar"}
        "cone" integrates against mu_K / (n Vol K), "polar" against
        K0 mu_K / (n Vol K°).
    """
    g = fields.grid
    w = g.weights * fields.cone_density
    if measure == "polar":
        w = w * fields.K0
    elif measure != "cone":
        raise ValueError(f"unknown measure {measure!r}")
    w = w / w.sum()
    lk = np.log(fields.K0)
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    return np.log1p(np.expm1(eps[:, None] * lk[None, :]) @ w)


# ---------------------------------------------------------------- sequences


@dataclass(frozen=True)
class LimitSequence:
    """Terms of one limit construction in both exponent variants.

    ``stated_log`` and ``corrected_log`` hold natural logs of the terms;
    the tails are one Richardson step in 2**-p applied to those logs.
    For kind "a" the two variants coincide.
    """

    kind: str
    p: np.ndarray = field(repr=False)
    ladder: np.ndarray = field(repr=False)
    stated_log: np.ndarray = field(repr=False)
    corrected_log: np.ndarray = field(repr=False)
    stated_target: str = ""
    corrected_target: str = ""

    @property
    def stated_terms(self) -> np.ndarray:
        return np.exp(self.stated_log)

    @property
    def corrected_terms(self) -> np.ndarray:
        return np.exp(self.corrected_log)

    @staticmethod
    def _tail(logs):
        if logs.size < 2:
            return float(np.exp(logs[-1]))
        return float(np.exp(2.0 * logs[-1] - logs[-2]))

    @property
    def stated_tail(self) -> float:
        return self._tail(self.stated_log)

    @property
    def corrected_tail(self) -> float:
        return self._tail(self.corrected_log)

    def pairs(self, variant: str = "corrected"):
        terms = self.corrected_terms if variant == "corrected" else self.stated_terms
        return list(zip(self.p.tolist(), terms.tolist()))


def limit_sequence(fields: FieldTable, kind: str, p_max: int = 20) -> LimitSequence:
    """Terms of the limit constructions of Omega_K and Lambda.

    Kinds
    -----
    a : (Omega_p / (n Vol K°))^(n+p) with p = 2**j, j = 0..p_max.
        Converges to Omega_K.
    b : Omega_{n(2^p-1)}(K) / (n Vol K°) raised to 2**p (stated) or
        n 2**p (corrected).  Stated converges to Omega_K^(1/n), corrected
        to Omega_K.
    c : corrected term (Omega_{-(n+2^p)}(K) / (n Vol K°))^(2^p), converging
        to 1/Omega_K.  The stated orientation (K° over n Vol K) is computed
        through Omega_q(K°) = Omega_{n^2/q}(K) and converges to
        1/Omega_{K°} = Lambda^-n.
    d : stated term (Omega_{-n/2^p}(K) / (n Vol K))^(2^p), converging to
        1/Lambda; the corrected term is its reciprocal, converging to Lambda.
    """
    if kind not in SEQUENCE_KINDS:
        raise ValueError(f"unknown sequence kind {kind!r}; expected one of {SEQUENCE_KINDS}")
    p_max = int(p_max)
    if not 1 <= p_max <= P_MAX_LIMIT:
        raise ValueError(f"p_max must lie in 1..{P_MAX_LIMIT}")
    n = fields.dim
    if kind == "a":
        j = np.arange(0, p_max + 1)
        pp = 2.0**j
        eps = -n / (n + pp)
        logs = (n + pp) * log_moment(fields, eps, "polar")
        return LimitSequence("a", j, pp, logs, logs.copy(), "Omega_K", "Omega_K")

    j = np.arange(1, p_max + 1)
    two = 2.0**j
    inv = 2.0**-j
    if kind == "b":
        lm = log_moment(fields, -inv, "polar")
        return LimitSequence("b", j, n * (two - 1), two * lm, n * two * lm,
                             "Omega_K^(1/n)", "Omega_K")
    if kind == "c":
        corrected = two * log_moment(fields, n * inv, "polar")
        stated = two * log_moment(fields, -n * inv, "cone")
        return LimitSequence("c", j, -(n + two), stated, corrected,
                             "1/Omega_{K°} = Lambda^-n", "1/Omega_K")
    stated = two * log_moment(fields, -1.0 / (two - 1.0), "cone")
    return LimitSequence("d", j, -n * inv, stated, -stated, "1/Lambda", "Lambda")


# ------------------------------------------------------------------- report

DEFAULT_P_LIST = (-0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 9.0)


def _scalars(body: Body, grid: Grid, p_list, p_max):
    fields = evaluate_fields(body, grid)
    n = grid.dim
    m, big_m = curvature_extrema(fields)
    out = {
        "vol": volume(fields),
        "vol_polar": polar_volume(fields),
        "surface": surface_area(fields),
        "omega_1": omega_p(fields, 1.0),
        "omega_n": omega_p(fields, float(n)),
        "omega_2n": omega_2n_fields(fields),
        "affine_isoperimetric_ratio": affine_isoperimetric_ratio(fields),
        "K0_min": m,
        "K0_max": big_m,
        "omega_K_entropy": entropy_omega_K(fields),
        "lambda": lambda_K(fields),
        "kl_divergence": kl_divergence(fields),
    }
    out["omega_p"] = {repr(float(p)): omega_p(fields, p) for p in p_list if p != -n}
    seqs = {k: limit_sequence(fields, k, p_max) for k in SEQUENCE_KINDS}
    out["omega_K_limit_a"] = seqs["a"].corrected_tail
    out["omega_K_limit_b"] = seqs["b"].corrected_tail
    out["omega_K_limit_c"] = 1.0 / seqs["c"].corrected_tail
    out["lambda_limit"] = seqs["d"].corrected_tail
    return fields, out, seqs


@dataclass
class InvariantReport:
    """Every scalar invariant of one body at a fine resolution.

    ``deltas`` holds |fine - coarse| for each scalar, the convergence
    metadata that accompanies each number.
    """

    body: dict
    resolution: tuple
    coarse_resolution: tuple
    values: dict
    sequences: dict
    deltas: dict

    def to_dict(self) -> dict:
        seqs = {}
        for kind, s in self.sequences.items():
            seqs[kind] = {
                "p": s.p.tolist(),
                "stated_terms": s.stated_terms.tolist(),
                "corrected_terms": s.corrected_terms.tolist(),
                "stated_tail": s.stated_tail,
                "corrected_tail": s.corrected_tail,
                "stated_target": s.stated_target,
                "corrected_target": s.corrected_target,
            }
        return {
            "body": self.body,
            "resolution": list(self.resolution),
            "coarse_resolution": list(self.coarse_resolution),
            **self.values,
            "sequences": seqs,
            "resolution_drift": self.deltas,
        }


def invariant_report(body: Body, coarse, fine, p_list=DEFAULT_P_LIST, p_max: int = 20) -> InvariantReport:
    """Evaluate every invariant at two resolutions and record the drift."""
    _, lo, _ = _scalars(body, build_grid(body.dim, coarse), p_list, p_max)
    fields, hi, seqs = _scalars(body, build_grid(body.dim, fine), p_list, p_max)
    deltas = {}
    for key, val in hi.items():
        if isinstance(val, dict):
            deltas[key] = {k: abs(v - lo[key][k]) for k, v in val.items()}
        else:
            deltas[key] = abs(val - lo[key])
    return InvariantReport(body.descriptor(), fields.grid.resolution,
                           build_grid(body.dim, coarse).resolution, hi, seqs, deltas)
