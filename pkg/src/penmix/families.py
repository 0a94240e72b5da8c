"""Location-scale component families, mixture densities and tail envelopes.

A standard density f(z) (location 0, scale 1) is described by a
:class:`FamilySpec`, which also carries envelope constants (v0, v1, beta)
bounding it by min(v0, v1*|z|**-beta).  Components are rescaled as
f((x-mu)/sigma)/sigma and mixed with simplex weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._util import golden_section_max

FAMILY_KINDS = ("normal", "laplace", "logistic", "student-t", "uniform")

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_DENSITY_FLOOR = 1e-300


def _t_norm_const(df: float) -> float:
    return math.exp(math.lgamma(0.5 * (df + 1.0)) - math.lgamma(0.5 * df)) / math.sqrt(df * math.pi)


def peak_density(kind: str, df: float | None = None) -> float:
    """Exact mode height of the standard density f(z)."""
    if kind == "normal":
        return 1.0 / math.sqrt(2.0 * math.pi)
    if kind == "laplace":
        return 0.5
    if kind == "logistic":
        return 0.25
    if kind == "student-t":
        return _t_norm_const(_require_df(df))
    if kind == "uniform":
        return 1.0
    raise ValueError(f"unsupported family kind: {kind!r}")


def _require_df(df: float | None) -> float:
    if df is None:
        raise ValueError("student-t family requires df")
    if not df >= 1.0:
        raise ValueError(f"student-t df must be >= 1, got {df}")
    return float(df)


@dataclass(frozen=True)
class FamilySpec:
    """A standard density plus tail-envelope constants.

    The envelope constants promise f(z) <= min(v0, v1*|z|**-beta); use
    :func:`fit_envelope` to compute them and :func:`check_envelope` to
    verify the inequality on a grid.  Construction enforces the cheap
    invariants only (positivity, beta > 1, v0 at least the mode height).
    """

    kind: str
    v0: float
    v1: float
    beta: float
    df: float | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unsupported family kind: {self.kind!r}")
        if self.kind == "student-t":
            _require_df(self.df)
        elif self.df is not None:
            raise ValueError(f"df is only meaningful for student-t, got {self.df} for {self.kind}")
        if not self.v0 > 0.0 or not self.v1 > 0.0:
            raise ValueError("envelope constants v0, v1 must be positive")
        if not self.beta > 1.0:
            raise ValueError(f"tail exponent beta must exceed 1, got {self.beta}")
        if self.v0 < peak_density(self.kind, self.df) - 1e-12:
            raise ValueError(
                f"v0={self.v0} is below the mode height {peak_density(self.kind, self.df)} "
                f"of the standard {self.kind} density"
            )


@dataclass(frozen=True)
class ComponentParams:
    """Location/scale of one mixture component."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class MixtureParams:
    """Full mixture parameter vector: simplex weights plus per-component (mu, sigma)."""

    weights: tuple[float, ...]
    components: tuple[ComponentParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.weights) != len(self.components):
            raise ValueError("weights and components must have equal length")
        if len(self.weights) == 0:
            raise ValueError("mixture needs at least one component")
        if any(w < 0.0 for w in self.weights):
            raise ValueError(f"weights must be nonnegative, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got sum {sum(self.weights)!r}")

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def mus(self) -> np.ndarray:
        return np.array([c.mu for c in self.components])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([c.sigma for c in self.components])

    @classmethod
    def from_arrays(cls, weights, mus, sigmas) -> "MixtureParams":
        comps = tuple(ComponentParams(float(m), float(s)) for m, s in zip(mus, sigmas, strict=True))
        return cls(tuple(float(w) for w in weights), comps)

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "components": [{"mu": c.mu, "sigma": c.sigma} for c in self.components],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "MixtureParams":
        comps = tuple(ComponentParams(float(c["mu"]), float(c["sigma"])) for c in obj["components"])
        return cls(tuple(float(w) for w in obj["weights"]), comps)


@dataclass(frozen=True)
class ScaleOrderStats:
    """Minimum, maximum and min/max ratio of the component scales."""

    sigma_min: float
    sigma_max: float
    ratio: float


def scale_order_stats(theta: MixtureParams) -> ScaleOrderStats:
    sigmas = theta.sigmas
    smin = float(sigmas.min())
    smax = float(sigmas.max())
    return ScaleOrderStats(smin, smax, smin / smax)


# ---------------------------------------------------------------------------
# standard densities


def standard_density(spec: FamilySpec, z):
    """Standard density f(z) at location 0, scale 1.  Vectorized over z."""
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    kind = spec.kind
    if kind == "normal":
        out = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    elif kind == "laplace":
        out = 0.5 * np.exp(-np.abs(z))
    elif kind == "logistic":
        e = np.exp(-np.abs(z))
        out = e / (1.0 + e) ** 2
    elif kind == "student-t":
        df = spec.df
        out = _t_norm_const(df) * np.power(1.0 + z * z / df, -0.5 * (df + 1.0))
    elif kind == "uniform":
        out = np.where(np.abs(z) <= 0.5, 1.0, 0.0)
    else:  # pragma: no cover - guarded at construction
        raise ValueError(kind)
    return float(out[0]) if scalar else out


def standard_logpdf(spec: FamilySpec, z):
    """log f(z), stable far into the tails (returns -inf only off uniform support)."""
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    kind = spec.kind
    if kind == "normal":
        out = -0.5 * z * z - _LOG_SQRT_2PI
    elif kind == "laplace":
        out = -np.abs(z) - math.log(2.0)
    elif kind == "logistic":
        a = np.abs(z)
        out = -a - 2.0 * np.log1p(np.exp(-a))
    elif kind == "student-t":
        df = spec.df
        out = math.log(_t_norm_const(df)) - 0.5 * (df + 1.0) * np.log1p(z * z / df)
    elif kind == "uniform":
        out = np.where(np.abs(z) <= 0.5, 0.0, -np.inf)
    else:  # pragma: no cover
        raise ValueError(kind)
    return float(out[0]) if scalar else out


def standard_cdf(spec: FamilySpec, z):
    """CDF of the standard density.  Vectorized over z."""
    z = np.asarray(z, dtype=float)
    kind = spec.kind
    if kind == "normal":
        return special.ndtr(z)
    if kind == "laplace":
        return np.where(z < 0.0, 0.5 * np.exp(z), 1.0 - 0.5 * np.exp(-z))
    if kind == "logistic":
        return special.expit(z)
    if kind == "student-t":
        return special.stdtr(spec.df, z)
    if kind == "uniform":
        return np.clip(z + 0.5, 0.0, 1.0)
    raise ValueError(kind)  # pragma: no cover


def standard_ppf(spec: FamilySpec, u):
    """Inverse CDF of the standard density on (0, 1).  Vectorized over u."""
    u = np.asarray(u, dtype=float)
    kind = spec.kind
    if kind == "normal":
        return special.ndtri(u)
    if kind == "laplace":
        return np.where(u < 0.5, np.log(2.0 * u), -np.log(2.0 * (1.0 - u)))
    if kind == "logistic":
        return special.logit(u)
    if kind == "student-t":
        return special.stdtrit(spec.df, u)
    if kind == "uniform":
        return u - 0.5
    raise ValueError(kind)  # pragma: no cover


# ---------------------------------------------------------------------------
# component and mixture densities


def component_density(spec: FamilySpec, p: ComponentParams, x):
    """Density of one component, f((x - mu)/sigma)/sigma."""
    if not p.sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {p.sigma}")
    x = np.asarray(x, dtype=float)
    return standard_density(spec, (x - p.mu) / p.sigma) / p.sigma


def mixture_density(spec: FamilySpec, theta: MixtureParams, x):
    """Mixture density sum_m alpha_m * f_m(x; mu_m, sigma_m)."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    for w, comp in zip(theta.weights, theta.components):
        if w > 0.0:
            out += w * component_density(spec, comp, x)
    return float(out[0]) if scalar else out


def log_component_matrix(spec: FamilySpec, theta: MixtureParams, x: np.ndarray) -> np.ndarray:
    """Matrix L[i, m] = log(alpha_m) + log f_m(x_i), computed in log space."""
    x = np.asarray(x, dtype=float)
    cols = []
    for w, comp in zip(theta.weights, theta.components):
        logw = math.log(w) if w > 0.0 else -np.inf
        cols.append(logw + standard_logpdf(spec, (x - comp.mu) / comp.sigma) - math.log(comp.sigma))
    return np.column_stack(cols)


def log_likelihood(spec: FamilySpec, theta: MixtureParams, data) -> float:
    """Sum of log mixture densities over the sample.

    Densities are floored at 1e-300 so optimizer landscapes stay finite;
    points with exactly zero density (outside a uniform mixture's support)
    still contribute -inf.
    """
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise ValueError("log_likelihood requires a non-empty sample")
    dens = mixture_density(spec, theta, data)
    if spec.kind == "uniform" and np.any(dens == 0.0):
        return -math.inf
    return float(np.sum(np.log(np.maximum(dens, _DENSITY_FLOOR))))


# ---------------------------------------------------------------------------
# tail envelopes


def _tail_sup_diverges(kind: str, df: float | None, beta: float) -> bool:
    # sup |z|^beta f(z): polynomial t-tails decay like |z|^-(df+1); every
    # other built-in decays faster than any power (or has compact support).
    if kind == "student-t":
        return beta > df + 1.0 + 1e-12
    return False


def fit_envelope(kind: str, beta: float, df: float | None = None) -> FamilySpec:
    """Fit envelope constants (v0, v1) for a family and tail exponent beta.

    v0 is the exact mode height; v1 is the grid-plus-golden-section supremum
    of |z|^beta * f(z) inflated by a 1.01 safety factor so the envelope
    inequality keeps holding on arbitrarily fine verification grids.
    """
    if not beta > 1.0:
        raise ValueError(f"beta must exceed 1, got {beta}")
    if kind not in FAMILY_KINDS:
        raise ValueError(f"unsupported family kind: {kind!r}")
    if kind == "student-t":
        df = _require_df(df)
        if _tail_sup_diverges(kind, df, beta):
            raise ValueError(
                f"student-t(df={df}) tails decay like |z|^-{df + 1:g}; "
                f"sup |z|^{beta:g} f(z) diverges, families are incompatible"
            )

    probe = FamilySpec(kind=kind, v0=peak_density(kind, df), v1=1.0, beta=beta, df=df)

    if kind == "uniform":
        z_hi = 0.5
    elif kind == "student-t":
        z_hi = 1e8
    else:
        z_hi = max(50.0, 10.0 * beta)

    # v0: mode height; the grid pass is a cross-check of the closed form.
    grid0 = np.concatenate(([0.0], np.logspace(-8, math.log10(z_hi), 200)))
    v0 = float(np.max(standard_density(probe, grid0)))
    v0 = max(v0, peak_density(kind, df))

    def log_gain(logz: float) -> float:
        z = math.exp(logz)
        lp = standard_logpdf(probe, z)
        return beta * logz + lp if math.isfinite(lp) else -math.inf

    logz_grid = np.linspace(math.log(1e-12), math.log(z_hi), 400)
    vals = np.array([log_gain(lz) for lz in logz_grid])
    i = int(np.argmax(vals))
    lo = logz_grid[max(i - 1, 0)]
    hi = logz_grid[min(i + 1, len(logz_grid) - 1)]
    _, refined = golden_section_max(log_gain, lo, hi, tol=1e-12)
    v1 = 1.01 * math.exp(max(refined, vals[i]))

    spec = FamilySpec(kind=kind, v0=v0, v1=v1, beta=beta, df=df)
    ok, _ = check_envelope(spec)
    if not ok:  # pragma: no cover - the safety factor prevents this
        raise RuntimeError(f"fitted envelope fails verification for {kind}, beta={beta}")
    return spec


def check_envelope(spec: FamilySpec, z_lo: float = -100.0, z_hi: float = 100.0,
                   points: int = 10_000, slack: float = 1e-12) -> tuple[bool, float]:
    """Verify f(z) <= min(v0, v1*|z|**-beta) + slack on a grid.

    Returns (holds, worst_excess) where worst_excess is max(f - bound).
    """
    z = np.linspace(z_lo, z_hi, points)
    f = standard_density(spec, z)
    with np.errstate(divide="ignore"):
        bound = np.minimum(spec.v0, spec.v1 * np.abs(z) ** (-spec.beta))
    excess = float(np.max(f - bound))
    return excess <= slack, excess


def envelope_radius_tilde(spec: FamilySpec, sigma: float) -> float:
    """Half-width (v1/v0)^(1/beta) * sigma^(1 - 2/beta) of the step bound
    whose outside level is v0*sigma; requires beta > 2."""
    if not spec.beta > 2.0:
        raise ValueError(f"envelope_radius_tilde requires beta > 2, got {spec.beta}")
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    return (spec.v1 / spec.v0) ** (1.0 / spec.beta) * sigma ** (1.0 - 2.0 / spec.beta)


def envelope_radius(spec: FamilySpec, kappa0: float, sigma: float) -> float:
    """Half-width (v1/kappa0)^(1/beta) * sigma^(1 - 1/beta) of the step bound
    whose outside level is the constant kappa0."""
    if not kappa0 > 0.0:
        raise ValueError(f"kappa0 must be positive, got {kappa0}")
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    return (spec.v1 / kappa0) ** (1.0 / spec.beta) * sigma ** (1.0 - 1.0 / spec.beta)


def mixture_cdf(spec: FamilySpec, theta: MixtureParams, x):
    """Mixture CDF sum_m alpha_m * F((x - mu_m)/sigma_m)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x, dtype=float)
    for w, comp in zip(theta.weights, theta.components):
        if w > 0.0:
            out = out + w * standard_cdf(spec, (x - comp.mu) / comp.sigma)
    return out


def family_to_dict(spec: FamilySpec) -> dict:
    return {"kind": spec.kind, "df": spec.df, "v0": spec.v0, "v1": spec.v1, "beta": spec.beta}


def family_from_dict(obj: dict) -> FamilySpec:
    if "v0" in obj and "v1" in obj:
        return FamilySpec(kind=obj["kind"], v0=float(obj["v0"]), v1=float(obj["v1"]),
                          beta=float(obj["beta"]), df=obj.get("df"))
    return fit_envelope(obj["kind"], float(obj.get("beta", 3.0)), df=obj.get("df"))
