"""Numerical estimation of the spectral coupling constant C.

C is a supremum over (p, Q, tau) of a weighted two-dimensional momentum
integral.  Comparing C with the prefactor pi/(1+1/M) of the logarithmic
free term gives an empirical criterion for extending the energy bound to
mass ratios below the analytic threshold.  By rotational invariance the
total momentum Q is aligned with the first axis and by reflection symmetry
the transverse component of p is kept nonnegative, which reduces the
search to four dimensions: (|Q|, p_par, p_perp, tau).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._parallel import parallel_map
from ._quad import adaptive_gk15, arc_adaptive_batch
from .corefuncs import ModelParams, QuadratureSpec

__all__ = [
    "GridSpec", "CSearchConfig", "CEstimate",
    "TailBoundExceeded", "BoundaryMaximizerWarning",
    "weight", "c_integrand", "inner_integral", "inner_integral_tail_bound",
    "estimate_C", "scan_C_vs_M", "coarse_config", "fine_config",
]


class TailBoundExceeded(RuntimeError):
    """The certified truncation tail exceeds the configured allowance."""


class BoundaryMaximizerWarning(UserWarning):
    """The estimated maximiser sits on the search-box boundary."""


@dataclass(frozen=True)
class GridSpec:
    """One search-grid axis."""

    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.hi < self.lo:
            raise ValueError("need lo <= hi")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "log" and not self.lo > 0:
            raise ValueError("log spacing requires lo > 0")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class CSearchConfig:
    """Search configuration for the C estimate.

    mu and lam are recorded in every estimate: the construction does not
    single out a canonical evaluation point, so both stay explicit
    configuration.  q_mag_max truncates the momentum integral; the
    truncation carries a certified closed-form tail bound.
    """

    mu: float = -1.0
    lam: float = 1.0
    q_mag_max: float = 1000.0
    tau_grid: GridSpec = field(default_factory=lambda: GridSpec(1e-3, 1e3, 7, "log"))
    qmag_grid: GridSpec = field(default_factory=lambda: GridSpec(0.0, 8.0, 5))
    ppar_grid: GridSpec = field(default_factory=lambda: GridSpec(-8.0, 8.0, 9))
    pperp_grid: GridSpec = field(default_factory=lambda: GridSpec(0.0, 8.0, 5))
    refine_iters: int = 2
    stability_rel_tol: float = 0.02
    quad: QuadratureSpec = field(default_factory=lambda: QuadratureSpec(
        rel_tol=1e-7, abs_tol=1e-13, max_subdivisions=80,
        tail_truncation_rel=1e-2))

    def __post_init__(self):
        if not self.mu < 0:
            raise ValueError("mu must be negative")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not self.q_mag_max ** 2 > self.lam:
            raise ValueError("q_mag_max**2 must exceed lam")
        if self.pperp_grid.lo < 0:
            raise ValueError("pperp grid must be confined to >= 0")
        if self.tau_grid.spacing != "log":
            raise ValueError("tau grid must be log spaced")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")


def coarse_config(mu: float = -1.0, lam: float = 1.0) -> CSearchConfig:
    """Default coarse search box, scaled to the evaluation point."""
    s = math.sqrt(max(lam, -mu))
    return CSearchConfig(
        mu=mu, lam=lam, q_mag_max=1000.0 * s,
        tau_grid=GridSpec(1e-3 * abs(mu), 1e3 * abs(mu), 7, "log"),
        qmag_grid=GridSpec(0.0, 8.0 * s, 5),
        ppar_grid=GridSpec(-8.0 * s, 8.0 * s, 9),
        pperp_grid=GridSpec(0.0, 8.0 * s, 5),
        refine_iters=2,
    )


def fine_config(mu: float = -1.0, lam: float = 1.0) -> CSearchConfig:
    """Denser grids, larger truncation radius, one extra refinement round."""
    s = math.sqrt(max(lam, -mu))
    return CSearchConfig(
        mu=mu, lam=lam, q_mag_max=3000.0 * s,
        tau_grid=GridSpec(1e-3 * abs(mu), 1e3 * abs(mu), 13, "log"),
        qmag_grid=GridSpec(0.0, 8.0 * s, 9),
        ppar_grid=GridSpec(-8.0 * s, 8.0 * s, 17),
        pperp_grid=GridSpec(0.0, 8.0 * s, 9),
        refine_iters=3,
        quad=QuadratureSpec(rel_tol=1e-9, abs_tol=1e-14,
                            max_subdivisions=160, tail_truncation_rel=1e-3),
    )


@dataclass(frozen=True)
class CEstimate:
    """Result of the supremum search.

    refinement_trace holds the running maximum per refinement level and is
    nondecreasing by construction.  truncation_error_bound is the certified
    tail bound of the momentum integral at the maximiser.
    """

    value: float
    argmax: dict
    prefactor: float
    ratio: float
    refinement_trace: tuple
    truncation_error_bound: float
    mu: float
    lam: float
    mass_ratio: float


def weight(s, mu: float, lam: float):
    """Spectral weight sqrt((s - mu)/log(1 + (s - mu)/lam)).

    Finite and positive for all s >= 0 because -mu > 0; tends to
    sqrt(lam) as (s - mu)/lam -> 0 and grows like sqrt(s/log s).
    """
    if not mu < 0:
        raise ValueError("mu must be negative")
    if not lam > 0:
        raise ValueError("lam must be positive")
    sa = np.asarray(s, dtype=float)
    if np.any(sa < 0):
        raise ValueError("s must be nonnegative")
    x = (sa - mu) / lam
    out = np.sqrt(lam * x / np.log1p(x))
    if np.ndim(s) == 0:
        return float(out)
    return out


def _abs_sigma_minus(php_sq, b, qhsq, B, M):
    """|sigma^-| = 2M|b| / (a^2 - 4b^2) with a = (M+1)(p_hat^2+q_hat^2) + B.

    The denominator is strictly positive: a >= 2(M+1)|b| > 2|b| by
    Cauchy-Schwarz, and B >= 0.
    """
    a = (M + 1.0) * (php_sq + qhsq) + B
    return 2.0 * M * np.abs(b) / (a * a - 4.0 * b * b)


def _shift(vec, Q, M):
    return np.asarray(vec, dtype=float) + np.asarray(Q, dtype=float) / (M + 2.0)


def c_integrand(p, q, Q, tau, cfg: CSearchConfig, params: ModelParams):
    """Integrand of the momentum integral inside the supremum.

    weight(tau + q^2) / q^2 * (2/M)|p_hat . q_hat| /
        (D^2 - (4/M^2)(p_hat . q_hat)^2),

    where p_hat = p + Q/(M+2), q_hat = q + Q/(M+2) and
    D = (1+1/M)(p_hat^2 + q_hat^2) + Q^2/(M+2) + tau - mu.  Defined on the
    integration domain q^2 > lam only.  Broadcasts over leading axes of
    p, q, Q (shape (..., 2)) and tau.
    """
    M = params.mass_ratio
    q = np.asarray(q, dtype=float)
    qsq = q[..., 0] ** 2 + q[..., 1] ** 2
    if np.any(qsq <= cfg.lam):
        raise ValueError("q**2 must exceed the infrared cutoff lam")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    Q = np.asarray(Q, dtype=float)
    p_hat = _shift(p, Q, M)
    q_hat = _shift(q, Q, M)
    php_sq = p_hat[..., 0] ** 2 + p_hat[..., 1] ** 2
    qhsq = q_hat[..., 0] ** 2 + q_hat[..., 1] ** 2
    b = p_hat[..., 0] * q_hat[..., 0] + p_hat[..., 1] * q_hat[..., 1]
    Qsq = Q[..., 0] ** 2 + Q[..., 1] ** 2
    B = (M / (M + 2.0)) * Qsq + M * (tau - cfg.mu)
    val = (weight(tau + qsq, cfg.mu, cfg.lam) / qsq
           * _abs_sigma_minus(php_sq, b, qhsq, B, M))
    if val.ndim == 0:
        return float(val)
    return val


def inner_integral_tail_bound(p, Q, tau: float, cfg: CSearchConfig,
                              params: ModelParams) -> float:
    """Closed-form bound on the integral mass beyond |q| = q_mag_max.

    Pointwise, the integrand is at most
        weight(tau+q^2) / q^2 * 2|p_hat| / ((M+2) |q_hat|^3),
    and integrating the radial comparison function gives

        2 pi |p_hat| sqrt(1 + (tau-mu)/R^2)
        / ((M+2) sqrt(log(1 + (R^2-mu)/lam)) (R - |Q|/(M+2))^2).

    Valid for R > 2|Q|/(M+2).
    """
    M = params.mass_ratio
    p_hat = _shift(p, Q, M)
    php = math.hypot(float(p_hat[0]), float(p_hat[1]))
    if php == 0.0:
        return 0.0
    cnorm = math.hypot(float(Q[0]), float(Q[1])) / (M + 2.0)
    R = cfg.q_mag_max
    if R <= 2.0 * cnorm:
        raise TailBoundExceeded(
            f"truncation radius {R} is too small for |Q| = {cnorm * (M + 2.0):.3g}; "
            "the certified tail bound degenerates")
    w_top = math.sqrt(1.0 + (tau - cfg.mu) / R ** 2)
    w_bot = math.sqrt(math.log1p((R ** 2 - cfg.mu) / cfg.lam))
    return 2.0 * math.pi * php * w_top / ((M + 2.0) * w_bot * (R - cnorm) ** 2)


def _angular_kernel(r: np.ndarray, p_hat, c_vec, B: float, M: float,
                    quad: QuadratureSpec) -> np.ndarray:
    """Circle integral of |sigma^-| at radii r (batched).

    The integrand has |.|-kinks where p_hat . q_hat(theta) changes sign;
    the two zero angles are located analytically and the circle is split
    there, so each arc is analytic and the panel quadrature converges
    fast.  Anchoring the arcs at the direction of p_hat makes the result
    equivariant under joint rotations, which keeps the rotational
    invariance of the integral at round-off level.
    """
    php = math.hypot(p_hat[0], p_hat[1])
    psi = math.atan2(p_hat[1], p_hat[0])
    d = p_hat[0] * c_vec[0] + p_hat[1] * c_vec[1]
    kappa = np.clip(-d / (r * php), -1.0, 1.0)
    aoff = np.arccos(kappa)

    def eval_theta(theta):
        qhx = r[:, None] * np.cos(theta) + c_vec[0]
        qhy = r[:, None] * np.sin(theta) + c_vec[1]
        qhsq = qhx * qhx + qhy * qhy
        b = p_hat[0] * qhx + p_hat[1] * qhy
        return _abs_sigma_minus(php * php, b, qhsq, B, M)

    tol_r = 0.1 * quad.rel_tol
    pos = arc_adaptive_batch(eval_theta, psi - aoff, psi + aoff,
                             tol_r, quad.abs_tol, quad.max_subdivisions)
    neg = arc_adaptive_batch(eval_theta, psi + aoff, psi - aoff + 2.0 * math.pi,
                             tol_r, quad.abs_tol, quad.max_subdivisions)
    return pos + neg


def inner_integral(p, Q, tau: float, cfg: CSearchConfig, params: ModelParams,
                   _with_tail: bool = False):
    """Momentum integral of :func:`c_integrand` over lam < q^2 <= q_mag_max^2.

    Evaluated in polar coordinates: analytic-arc angular quadrature inside
    an adaptive radial integral in log(q^2).  The discarded tail carries
    the certified bound of :func:`inner_integral_tail_bound`; if that
    bound exceeds the configured relative allowance, TailBoundExceeded is
    raised rather than silently accepting the truncation.
    """
    M = params.mass_ratio
    p = np.asarray(p, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    c_vec = Q / (M + 2.0)
    p_hat = p + c_vec
    php = math.hypot(float(p_hat[0]), float(p_hat[1]))
    if php == 0.0:
        return (0.0, 0.0) if _with_tail else 0.0
    tail = inner_integral_tail_bound(p, Q, tau, cfg, params)
    B = (M / (M + 2.0)) * float(Q @ Q) + M * (tau - cfg.mu)
    quad = cfg.quad

    def radial(eta):
        s = np.exp(eta)
        r = np.sqrt(s)
        circ = _angular_kernel(r, (float(p_hat[0]), float(p_hat[1])),
                               (float(c_vec[0]), float(c_vec[1])), B, M, quad)
        # measure: dq = (1/2) ds dtheta in s = q^2; the 1/q^2 of the
        # integrand cancels the jacobian of eta = log s
        return 0.5 * weight(tau + s, cfg.mu, cfg.lam) * circ

    val = adaptive_gk15(radial, math.log(cfg.lam), 2.0 * math.log(cfg.q_mag_max),
                        quad.rel_tol, quad.abs_tol, quad.max_subdivisions)
    if tail > quad.tail_truncation_rel * val + quad.abs_tol:
        raise TailBoundExceeded(
            f"certified tail {tail:.3e} exceeds allowance "
            f"{quad.tail_truncation_rel:.1e} relative to integral {val:.3e}; "
            "increase q_mag_max")
    if _with_tail:
        return val, tail
    return val


def _objective(z, cfg: CSearchConfig, params: ModelParams) -> float:
    q_mag, p_par, p_perp, tau = z
    psq = p_par * p_par + p_perp * p_perp
    inner = inner_integral((p_par, p_perp), (q_mag, 0.0), tau, cfg, params)
    return weight(tau + psq, cfg.mu, cfg.lam) * inner


def estimate_C(cfg: CSearchConfig, params: ModelParams,
               threads: int = 1) -> CEstimate:
    """Estimate C = sup weight(tau + p^2) * inner_integral over the box.

    Coarse grid scan over (|Q|, p_par, p_perp, tau) followed by
    refine_iters rounds of simplex descent restarted from the best five
    points (tau searched in log scale).  The running maximum per level is
    recorded in refinement_trace.  Grid evaluation is an order-independent
    parallel map; results do not depend on the thread count.
    """
    M = params.mass_ratio
    qmag = cfg.qmag_grid.values()
    ppar = cfg.ppar_grid.values()
    pperp = cfg.pperp_grid.values()
    tau = cfg.tau_grid.values()
    mesh = np.stack(np.meshgrid(qmag, ppar, pperp, tau, indexing="ij"),
                    axis=-1).reshape(-1, 4)

    chunks = [c for c in np.array_split(np.arange(len(mesh)),
                                        max(1, 4 * threads)) if len(c)]
    def run_chunk(idx):
        return [_objective(mesh[i], cfg, params) for i in idx]
    values = np.array([v for chunk in parallel_map(run_chunk, chunks, threads)
                       for v in chunk])

    order = np.argsort(-values, kind="stable")
    candidates = [(float(values[i]), tuple(mesh[i])) for i in order[:5]]
    trace = [(0, candidates[0][0])]

    lo = np.array([qmag[0], ppar[0], pperp[0], math.log(tau[0])])
    hi = np.array([qmag[-1], ppar[-1], pperp[-1], math.log(tau[-1])])

    def neg_obj(x):
        return -_objective((x[0], x[1], x[2], math.exp(x[3])), cfg, params)

    for level in range(1, cfg.refine_iters + 1):
        shrink = 0.25 ** (level - 1)
        new_candidates = []
        for val0, z0 in candidates:
            x0 = np.array([z0[0], z0[1], z0[2], math.log(z0[3])])
            simplex = [x0]
            for i in range(4):
                step = 0.2 * shrink * (hi[i] - lo[i])
                v = x0.copy()
                v[i] = v[i] + step if v[i] + step <= hi[i] else v[i] - step
                simplex.append(v)
            res = minimize(neg_obj, x0, method="Nelder-Mead",
                           bounds=list(zip(lo, hi)),
                           options={"initial_simplex": np.array(simplex),
                                    "maxfev": 200, "xatol": 1e-8,
                                    "fatol": 1e-14, "adaptive": False})
            x = np.clip(res.x, lo, hi)
            new_candidates.append(
                (float(-res.fun), (float(x[0]), float(x[1]), float(x[2]),
                                   float(math.exp(x[3])))))
        candidates = sorted(candidates + new_candidates,
                            key=lambda t: -t[0])[:5]
        trace.append((level, candidates[0][0]))

    best_val, best_z = candidates[0]
    q_best, ppar_best, pperp_best, tau_best = best_z
    _, tail = inner_integral((ppar_best, pperp_best), (q_best, 0.0), tau_best,
                             cfg, params, _with_tail=True)

    # flag maximisers on genuine box boundaries (the lower edges of |Q| and
    # p_perp are symmetry reductions, not boundaries of the search space)
    edges = []
    span = hi - lo
    x_best = np.array([q_best, ppar_best, pperp_best, math.log(tau_best)])
    checks = [("q_mag high", hi[0] - x_best[0], span[0]),
              ("p_par low", x_best[1] - lo[1], span[1]),
              ("p_par high", hi[1] - x_best[1], span[1]),
              ("p_perp high", hi[2] - x_best[2], span[2]),
              ("tau low", x_best[3] - lo[3], span[3]),
              ("tau high", hi[3] - x_best[3], span[3])]
    for name, dist, width in checks:
        if width > 0 and dist < 1e-6 * width:
            edges.append(name)
    if edges:
        warnings.warn(
            f"maximiser sits on the search-box boundary ({', '.join(edges)}); "
            "the reported value may underestimate the supremum",
            BoundaryMaximizerWarning, stacklevel=2)
    if len(trace) >= 2:
        v_prev, v_last = trace[-2][1], trace[-1][1]
        if v_last > 0 and (v_last - v_prev) > cfg.stability_rel_tol * v_last:
            warnings.warn(
                f"refinement not yet stable: last two levels differ by "
                f"{(v_last - v_prev) / v_last:.2%}", UserWarning, stacklevel=2)

    prefactor = math.pi / (1.0 + 1.0 / M)
    return CEstimate(
        value=best_val,
        argmax={"Q_mag": q_best, "p_par": ppar_best, "p_perp": pperp_best,
                "tau": tau_best},
        prefactor=prefactor,
        ratio=best_val / prefactor,
        refinement_trace=tuple((int(l), float(v)) for l, v in trace),
        truncation_error_bound=tail,
        mu=cfg.mu, lam=cfg.lam, mass_ratio=M,
    )


def scan_C_vs_M(M_values, cfg: CSearchConfig,
                params_template: ModelParams | None = None,
                threads: int = 1) -> list[dict]:
    """One C estimate per mass ratio; row errors are captured, not raised.

    Emits the ratio column C/(pi/(1+1/M)) that supports an empirical
    critical-mass readout (smallest M with ratio < 1).
    """
    if len(M_values) == 0:
        raise ValueError("M_values must be nonempty")
    eb = params_template.binding_energy if params_template else -1.0
    rows = []
    for M in M_values:
        row = {"M": float(M), "mu": cfg.mu, "lambda": cfg.lam}
        try:
            est = estimate_C(cfg, ModelParams(float(M), eb), threads=threads)
            row.update({
                "C": est.value, "prefactor": est.prefactor, "ratio": est.ratio,
                "Q_mag": est.argmax["Q_mag"], "p_par": est.argmax["p_par"],
                "p_perp": est.argmax["p_perp"], "tau": est.argmax["tau"],
                "error": None,
            })
        except Exception as exc:  # noqa: BLE001 - per-row capture is the contract
            row.update({"C": None, "prefactor": math.pi / (1.0 + 1.0 / M),
                        "ratio": None, "Q_mag": None, "p_par": None,
                        "p_perp": None, "tau": None, "error": str(exc)})
        rows.append(row)
    return rows
