"""Penalty (reward) families on mixture scale parameters, their sample-size
schedules, and numeric validators for the regularity conditions A6-A12 that
the consistency theory places on them.

Two regimes are provided: a ratio regime, where the reward depends on theta
only through y = sigma_min/sigma_max, and a scale regime, where the reward is
a product of per-component factors.  Each has a smooth built-in family and a
0/1 hard-constraint specialization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._util import golden_section_max
from .families import MixtureParams, scale_order_stats

REGIMES = ("none", "ratio", "scale", "hard_ratio", "hard_floor")

# Probe defaults for the validators: log-spaced y, doubling n, small
# exponent grids.  Falsifiers, not proofs; see the *Report docstrings.
DELTA_GRID = (0.25, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class RatioPenaltyFamily:
    """Reward r_bar * y^(alpha-1) * e^(n^d_tilde), capped at r_bar.

    With hard_cutoff set to b0, the reward is instead the 0/1 indicator of
    y >= b_n with b_n = b0 * exp(-n^d_tilde) (clamped at 1, since y <= 1).
    """

    r_bar: float = 1.0
    alpha: float = 4.0
    d_tilde: float = 0.25
    hard_cutoff: Optional[float] = None

    def __post_init__(self):
        if not self.r_bar > 0.0:
            raise ValueError(f"r_bar must be positive, got {self.r_bar}")
        if not 0.0 <= self.d_tilde < 1.0:
            raise ValueError(f"d_tilde must lie in [0, 1), got {self.d_tilde}")
        if self.hard_cutoff is not None and not self.hard_cutoff > 0.0:
            raise ValueError(f"hard_cutoff must be positive, got {self.hard_cutoff}")


@dataclass(frozen=True)
class ScalePenaltyFamily:
    """Per-scale reward factor s(y) = exp(-b/y) * y^-(a+1), applied to each sigma_m."""

    a: float = 1.0
    b: float = 1.0
    d: float = 0.5

    def __post_init__(self):
        if not self.a > 0.0:
            raise ValueError(f"a must be positive, got {self.a}")
        if not self.b > 0.0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not 0.0 <= self.d < 1.0:
            raise ValueError(f"d must lie in [0, 1), got {self.d}")


@dataclass(frozen=True)
class Schedules:
    """Sample-size schedules b_n = b0*e^(-n^d_tilde), c_n = c0*e^(-n^d) and
    A_n = a0 * n^((2+zeta)/(beta-1))."""

    b0: float = 1.0
    c0: float = 1.0
    d_tilde: float = 0.25
    d: float = 0.5
    a0: float = 10.0
    zeta: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.d_tilde < self.d < 1.0):
            raise ValueError(
                f"schedule exponents must satisfy 0 <= d_tilde < d < 1, "
                f"got d_tilde={self.d_tilde}, d={self.d}"
            )
        for name in ("b0", "c0", "a0", "zeta"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    def to_dict(self) -> dict:
        return {"b0": self.b0, "c0": self.c0, "d_tilde": self.d_tilde,
                "d": self.d, "a0": self.a0, "zeta": self.zeta}

    @classmethod
    def from_dict(cls, obj: dict) -> "Schedules":
        defaults = cls()
        return cls(**{k: float(obj.get(k, getattr(defaults, k))) for k in
                      ("b0", "c0", "d_tilde", "d", "a0", "zeta")})


def schedule_b(s: Schedules, n: int) -> float:
    return s.b0 * math.exp(-float(n) ** s.d_tilde)


def schedule_c(s: Schedules, n: int) -> float:
    return s.c0 * math.exp(-float(n) ** s.d)


def schedule_A(s: Schedules, beta: float, n: int) -> float:
    if not beta > 1.0:
        raise ValueError(f"schedule_A requires beta > 1, got {beta}")
    return s.a0 * float(n) ** ((2.0 + s.zeta) / (beta - 1.0))


@dataclass(frozen=True)
class PenaltySpec:
    """One penalty regime bound to the component count it is validated against."""

    regime: str
    m: int
    ratio: Optional[RatioPenaltyFamily] = None
    scale: Optional[ScalePenaltyFamily] = None
    schedules: Schedules = field(default_factory=Schedules)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}, expected one of {REGIMES}")
        if self.m < 1:
            raise ValueError(f"component count must be >= 1, got {self.m}")
        if self.regime in ("ratio", "hard_ratio") and self.ratio is None:
            raise ValueError(f"regime {self.regime!r} requires a RatioPenaltyFamily")
        if self.regime == "hard_ratio" and self.ratio.hard_cutoff is None:
            raise ValueError("hard_ratio regime requires ratio.hard_cutoff")
        if self.regime == "ratio" and self.ratio.hard_cutoff is not None:
            raise ValueError("smooth ratio regime must not set ratio.hard_cutoff")
        if self.regime == "scale" and self.scale is None:
            raise ValueError("scale regime requires a ScalePenaltyFamily")

    # -- constructors -------------------------------------------------------
    @classmethod
    def none(cls, m: int) -> "PenaltySpec":
        return cls("none", m)

    @classmethod
    def ratio_penalty(cls, fam: RatioPenaltyFamily, m: int,
                      schedules: Schedules | None = None) -> "PenaltySpec":
        return cls("ratio", m, ratio=fam, schedules=schedules or Schedules())

    @classmethod
    def scale_penalty(cls, fam: ScalePenaltyFamily, m: int,
                      schedules: Schedules | None = None) -> "PenaltySpec":
        return cls("scale", m, scale=fam, schedules=schedules or Schedules())

    @classmethod
    def hard_ratio(cls, m: int, b0: float = 1.0, d_tilde: float = 0.25) -> "PenaltySpec":
        fam = RatioPenaltyFamily(r_bar=1.0, alpha=m + 2, d_tilde=d_tilde, hard_cutoff=b0)
        sched = Schedules(b0=b0, d_tilde=d_tilde, d=max(0.5, (d_tilde + 1.0) / 2.0))
        return cls("hard_ratio", m, ratio=fam, schedules=sched)

    @classmethod
    def hard_floor(cls, m: int, c0: float = 1.0, d: float = 0.5) -> "PenaltySpec":
        sched = Schedules(c0=c0, d=d, d_tilde=d / 2.0)
        return cls("hard_floor", m, schedules=sched)

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        if self.regime == "ratio":
            params = {"r_bar": self.ratio.r_bar, "alpha": self.ratio.alpha,
                      "d_tilde": self.ratio.d_tilde}
        elif self.regime == "hard_ratio":
            params = {"b0": self.ratio.hard_cutoff, "d_tilde": self.ratio.d_tilde}
        elif self.regime == "scale":
            params = {"a": self.scale.a, "b": self.scale.b, "d": self.scale.d}
        elif self.regime == "hard_floor":
            params = {"c0": self.schedules.c0, "d": self.schedules.d}
        else:
            params = {}
        return {"regime": self.regime, "m": self.m, "params": params,
                "schedules": self.schedules.to_dict()}

    @classmethod
    def from_dict(cls, obj: dict, m: int | None = None) -> "PenaltySpec":
        regime = obj["regime"]
        if regime not in REGIMES:
            raise ValueError(f"unknown regime {regime!r}, expected one of {REGIMES}")
        m_obj = obj.get("m", m)
        if m_obj is None:
            raise ValueError("penalty spec needs a component count 'm'")
        if m is not None and int(m_obj) != int(m):
            raise ValueError(f"penalty spec is for m={m_obj}, requested m={m}")
        m_val = int(m_obj)
        params = obj.get("params", {})
        sched = Schedules.from_dict(obj.get("schedules", {}))
        if regime == "none":
            return cls("none", m_val, schedules=sched)
        if regime == "ratio":
            fam = RatioPenaltyFamily(r_bar=float(params.get("r_bar", 1.0)),
                                     alpha=float(params["alpha"]),
                                     d_tilde=float(params.get("d_tilde", sched.d_tilde)))
            return cls("ratio", m_val, ratio=fam, schedules=sched)
        if regime == "hard_ratio":
            b0 = float(params.get("b0", sched.b0))
            d_tilde = float(params.get("d_tilde", sched.d_tilde))
            fam = RatioPenaltyFamily(r_bar=1.0, alpha=m_val + 2, d_tilde=d_tilde,
                                     hard_cutoff=b0)
            return cls("hard_ratio", m_val, ratio=fam, schedules=sched)
        if regime == "scale":
            fam = ScalePenaltyFamily(a=float(params["a"]), b=float(params["b"]),
                                     d=float(params.get("d", sched.d)))
            return cls("scale", m_val, scale=fam, schedules=sched)
        # hard_floor
        c0 = float(params.get("c0", sched.c0))
        d = float(params.get("d", sched.d))
        sched = Schedules(b0=sched.b0, c0=c0, d_tilde=min(sched.d_tilde, d / 2.0),
                          d=d, a0=sched.a0, zeta=sched.zeta)
        return cls("hard_floor", m_val, schedules=sched)


PRESETS = ("none", "ratio", "scale", "hard_ratio", "hard_floor")


def preset(name: str, m: int) -> PenaltySpec:
    """Bundled penalty presets; `ratio` uses alpha = m + 2, `scale` a = b = 1."""
    if name == "none":
        return PenaltySpec.none(m)
    if name == "ratio":
        return PenaltySpec.ratio_penalty(RatioPenaltyFamily(r_bar=1.0, alpha=m + 2, d_tilde=0.25), m)
    if name == "scale":
        return PenaltySpec.scale_penalty(ScalePenaltyFamily(a=1.0, b=1.0, d=0.5), m)
    if name == "hard_ratio":
        return PenaltySpec.hard_ratio(m, b0=1.0, d_tilde=0.25)
    if name == "hard_floor":
        return PenaltySpec.hard_floor(m, c0=1.0, d=0.5)
    raise ValueError(f"unknown preset {name!r}, expected one of {PRESETS}")


# ---------------------------------------------------------------------------
# rewards (log domain internally; e^(n^d_tilde) overflows fast otherwise)


def _log_ratio_reward_y(fam: RatioPenaltyFamily, n: int, y: float) -> float:
    if fam.hard_cutoff is not None:
        bn = min(fam.hard_cutoff * math.exp(-float(n) ** fam.d_tilde), 1.0)
        return 0.0 if y >= bn else -math.inf
    raw = (fam.alpha - 1.0) * math.log(y) + float(n) ** fam.d_tilde
    return math.log(fam.r_bar) + min(raw, 0.0)


def ratio_reward(fam: RatioPenaltyFamily, n: int, theta: MixtureParams) -> float:
    """Reward as a function of y = sigma_min/sigma_max; in {0, 1} for the hard form."""
    y = scale_order_stats(theta).ratio
    lr = _log_ratio_reward_y(fam, n, y)
    return math.exp(lr) if math.isfinite(lr) else 0.0


def _log_scale_reward_y(fam: ScalePenaltyFamily, y: float) -> float:
    return -fam.b / y - (fam.a + 1.0) * math.log(y)


def scale_reward(fam: ScalePenaltyFamily, n: int, theta: MixtureParams) -> float:
    """Product over components of exp(-b/sigma_m) * sigma_m^-(a+1)."""
    lr = sum(_log_scale_reward_y(fam, float(s)) for s in theta.sigmas)
    return math.exp(lr) if math.isfinite(lr) else 0.0


def hard_ratio_cutoff(spec: PenaltySpec, n: int) -> float:
    """Effective feasibility cutoff for the hard ratio regime (clamped at 1)."""
    return min(schedule_b_from(spec, n), 1.0)


def schedule_b_from(spec: PenaltySpec, n: int) -> float:
    b0 = spec.ratio.hard_cutoff if (spec.ratio and spec.ratio.hard_cutoff) else spec.schedules.b0
    d_tilde = spec.ratio.d_tilde if spec.ratio else spec.schedules.d_tilde
    return b0 * math.exp(-float(n) ** d_tilde)


def log_reward(spec: PenaltySpec, n: int, theta: MixtureParams) -> float:
    """Log of the applicable reward; -inf when the reward is zero, 0 for regime none."""
    if spec.regime == "none":
        return 0.0
    if spec.regime in ("ratio", "hard_ratio"):
        y = scale_order_stats(theta).ratio
        if spec.regime == "hard_ratio":
            return 0.0 if y >= hard_ratio_cutoff(spec, n) else -math.inf
        return _log_ratio_reward_y(spec.ratio, n, y)
    if spec.regime == "scale":
        return sum(_log_scale_reward_y(spec.scale, float(s)) for s in theta.sigmas)
    # hard_floor
    cn = schedule_c(spec.schedules, n)
    return 0.0 if float(theta.sigmas.min()) >= cn else -math.inf


def is_feasible(spec: PenaltySpec, n: int, theta: MixtureParams) -> bool:
    """True unless a hard regime's constraint excludes theta."""
    return math.isfinite(log_reward(spec, n, theta)) or spec.regime == "scale"


# ---------------------------------------------------------------------------
# validators


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of one grid-based regularity check.

    The checks are falsifiers: `passed` for a quantified condition means
    "no counterexample found on the probe grid with the reported
    witnesses", never a proof.
    """

    assumption: str
    passed: bool
    witnesses: dict
    counterexample: Optional[dict] = None
    detail: str = ""


@dataclass(frozen=True)
class ProbeGrid:
    """Grid resolution for the validators."""

    y_min: float = 1e-12
    y_points: int = 200
    n_max_pow: int = 20
    sigma_log_min: float = -27.0   # natural-log bounds for the sigma sweep
    sigma_log_max: float = 7.0
    sigma_points: int = 80

    def refined(self, k: int = 3) -> "ProbeGrid":
        return ProbeGrid(self.y_min, self.y_points * k, self.n_max_pow,
                         self.sigma_log_min, self.sigma_log_max, self.sigma_points * k)

    @property
    def n_values(self) -> np.ndarray:
        return 2 ** np.arange(0, self.n_max_pow + 1)

    @property
    def log_y(self) -> np.ndarray:
        return np.linspace(math.log(self.y_min), 0.0, self.y_points)


def validate_assumption6(fam: RatioPenaltyFamily, m: int,
                         probe: ProbeGrid | None = None) -> ValidationReport:
    """Check the reward envelope 0 <= reward(y, n) <= min(R_bar, r_w * y^(m+delta) * e^(n^dt)).

    For the smooth family the witnesses (R_bar, r_w, dt) are the family's own
    constants and delta is searched over DELTA_GRID (largest passing wins);
    the check fails exactly when alpha <= m + 1.  For the hard family the
    witness coefficient is derived from the worst-case n in closed form and
    confirmed on the grid.
    """
    probe = probe or ProbeGrid()
    log_y = probe.log_y
    n_vals = probe.n_values.astype(float)
    n_pows_sched = n_vals ** fam.d_tilde

    if fam.hard_cutoff is None:
        # reward: log r_bar + min((alpha-1)*log y + n^dt, 0)
        raw = (fam.alpha - 1.0) * log_y[None, :] + n_pows_sched[:, None]
        log_reward_grid = math.log(fam.r_bar) + np.minimum(raw, 0.0)
        best = None
        last_cex = None
        for delta in DELTA_GRID:
            log_bound = np.minimum(
                math.log(fam.r_bar),
                math.log(fam.r_bar) + (m + delta) * log_y[None, :] + n_pows_sched[:, None],
            )
            bad = log_reward_grid > log_bound + 1e-9
            if not bad.any():
                best = delta
            else:
                i, j = np.argwhere(bad)[-1]
                last_cex = {"n": int(n_vals[i]), "y": math.exp(log_y[j]),
                            "log_reward": float(log_reward_grid[i, j]),
                            "log_bound": float(log_bound[i, j]), "delta": delta}
        if best is not None:
            return ValidationReport(
                "A6", True,
                {"R_bar": fam.r_bar, "r_bar": fam.r_bar, "delta": best, "d_tilde": fam.d_tilde},
                detail=f"smooth family passes with delta={best} (alpha-1 >= m+delta)")
        return ValidationReport(
            "A6", False, {"R_bar": fam.r_bar, "r_bar": fam.r_bar, "d_tilde": fam.d_tilde},
            counterexample=last_cex,
            detail="reward exceeds the y^(m+delta) envelope as y -> 0; need alpha > m + 1")

    # Hard form: indicator(y >= b_n).  Witness exponent dt_w strictly between
    # the schedule's d_tilde and 1 makes e^(n^dt_w) eventually dominate
    # b_n^-(m+delta); the binding n is the minimizer of
    # g(n) = (m+delta)*log(b_n) + n^dt_w, located in closed form.
    b0 = fam.hard_cutoff
    dt_s = fam.d_tilde
    dt_w = (dt_s + 1.0) / 2.0
    delta = DELTA_GRID[0]
    p = m + delta

    def log_g(nf: float) -> float:
        return p * (math.log(b0) - nf ** dt_s) + nf ** dt_w

    candidates = [1.0, float(n_vals[-1])]
    if dt_s > 0.0:
        n_star = (p * dt_s / dt_w) ** (1.0 / (dt_w - dt_s))
        candidates += [max(1.0, math.floor(n_star)), math.ceil(n_star)]
    log_r_w = math.log(1.01) - min(log_g(c) for c in candidates)

    ok = True
    cex = None
    for nf, npow_s in zip(n_vals, n_pows_sched):
        log_bn = math.log(b0) - npow_s
        if log_bn > 0.0:
            continue  # b_n > 1: no feasible y, reward identically 0
        # reward = 1 on y >= b_n; the bound is increasing in y, so y = b_n binds
        log_bound = min(0.0, log_r_w + p * log_bn + nf ** dt_w)
        if 0.0 > log_bound + 1e-9:
            ok = False
            cex = {"n": int(nf), "y": math.exp(log_bn), "log_bound": float(log_bound)}
            break
    return ValidationReport(
        "A6", ok,
        {"R_bar": 1.0, "r_bar": math.exp(log_r_w), "delta": delta, "d_tilde": dt_w},
        counterexample=cex,
        detail="hard cutoff: indicator reward bounded via worst-case n analysis"
               f" (witness exponent {dt_w})")


def validate_assumption8(spec: PenaltySpec, theta0: MixtureParams,
                         n_max: int = 2 ** 20) -> ValidationReport:
    """Check that the reward at the true parameter has a positive floor for
    all sample sizes beyond some N on the probe range, and does not decay.

    Rewards depend on theta only through the scale multiset, so label
    permutations of theta0 give identical values.
    """
    n_vals = [1]
    while n_vals[-1] < n_max:
        n_vals.append(min(n_vals[-1] * 2, n_max))
    vals = [math.exp(min(log_reward(spec, n, theta0), 0.0))
            if math.isfinite(log_reward(spec, n, theta0)) else 0.0
            for n in n_vals]
    # exp(min(.,0)) caps harmless overflow for regime none (log_reward == 0)
    first_n = None
    for i in range(len(n_vals)):
        tail = vals[i:]
        if min(tail) > 0.0 and all(b >= a - 1e-12 for a, b in zip(tail, tail[1:])):
            first_n = n_vals[i]
            floor = min(tail)
            break
    if first_n is None:
        return ValidationReport(
            "A8", False, {"n_max": n_max},
            counterexample={"n": n_vals[int(np.argmin(vals))], "reward": min(vals)},
            detail="no N on the probe range gives a positive, non-decaying reward floor")
    return ValidationReport(
        "A8", True,
        {"first_passing_n": first_n, "reward_floor": floor, "n_max": n_max},
        detail=f"reward at theta0 is >= {floor:.6g} for n >= {first_n}")


def validate_assumption9(fam: RatioPenaltyFamily, s: Schedules, m: int,
                         probe: ProbeGrid | None = None) -> ValidationReport:
    """Sweep (sigma_min, sigma_max, n) with sigma_min >= c_n and check the
    implication: reward > sigma_min^m  =>  sigma_max < sigma_min^Delta / b_n,
    searching Delta over DELTA_GRID (smallest passing Delta reported).
    """
    if not fam.d_tilde < s.d:
        raise ValueError(
            f"schedule exponents must satisfy d_tilde < d, got {fam.d_tilde} >= {s.d}")
    probe = probe or ProbeGrid()
    n_vals = probe.n_values.astype(float)
    log_sig = np.linspace(probe.sigma_log_min, probe.sigma_log_max, probe.sigma_points)

    pairs_i, pairs_j = np.triu_indices(len(log_sig))  # sigma_min index <= sigma_max index
    ls_min = log_sig[pairs_i]
    ls_max = log_sig[pairs_j]
    log_y = ls_min - ls_max

    last_cex = None
    for delta in DELTA_GRID:
        found = None
        for nf in n_vals:
            log_cn = math.log(s.c0) - nf ** s.d
            log_bn = math.log(s.b0) - nf ** fam.d_tilde
            mask = ls_min >= log_cn
            if not mask.any():
                continue
            if fam.hard_cutoff is not None:
                log_bn_fam = math.log(fam.hard_cutoff) - nf ** fam.d_tilde
                log_rew = np.where(log_y >= min(log_bn_fam, 0.0), 0.0, -np.inf)
            else:
                log_rew = math.log(fam.r_bar) + np.minimum(
                    (fam.alpha - 1.0) * log_y + nf ** fam.d_tilde, 0.0)
            premise = mask & (log_rew > m * ls_min)
            conclusion = ls_max < delta * ls_min - log_bn + 1e-9
            bad = premise & ~conclusion
            if bad.any():
                k = int(np.argwhere(bad)[0])
                found = {"n": int(nf), "sigma_min": math.exp(ls_min[k]),
                         "sigma_max": math.exp(ls_max[k]), "delta": delta}
                break
        if found is None:
            return ValidationReport(
                "A9", True, {"delta": delta, "c0": s.c0, "b0": s.b0},
                detail=f"no counterexample on the probe grid with Delta={delta}")
        last_cex = found
    return ValidationReport(
        "A9", False, {"c0": s.c0, "b0": s.b0}, counterexample=last_cex,
        detail="implication fails on the probe grid for every Delta in the search grid")


def validate_assumptions_10_11_12(fam: ScalePenaltyFamily, theta0: MixtureParams,
                                  probe: ProbeGrid | None = None) -> dict[str, ValidationReport]:
    """Check the scale-regime conditions: bounded positive per-scale factor
    (A10), a finite supremum of factor/y^m with m = theta0's component count
    (A11), and a positive reward at the true parameter (A12)."""
    m = theta0.m
    log_y = np.linspace(math.log(1e-12), math.log(1e12), 600)

    def sup_of(extra_pow: float) -> tuple[float, bool]:
        # log factor/y^extra_pow on the grid + golden refinement
        vals = -fam.b * np.exp(-log_y) - (fam.a + 1.0 + extra_pow) * log_y
        i = int(np.argmax(vals))
        interior = 0 < i < len(log_y) - 1
        lo = log_y[max(i - 1, 0)]
        hi = log_y[min(i + 1, len(log_y) - 1)]
        _, ref = golden_section_max(
            lambda ly: -fam.b * math.exp(-ly) - (fam.a + 1.0 + extra_pow) * ly, lo, hi)
        return math.exp(max(ref, vals[i])), interior

    s_bar, interior10 = sup_of(0.0)
    a10 = ValidationReport(
        "A10", bool(s_bar > 0.0 and math.isfinite(s_bar) and interior10),
        {"S_bar": s_bar},
        detail="per-scale factor is bounded and attains a positive interior maximum"
        if interior10 else "maximum at grid boundary suggests divergence")

    ratio_sup, interior11 = sup_of(float(m))
    a11 = ValidationReport(
        "A11", bool(math.isfinite(ratio_sup) and interior11),
        {"s_bar": ratio_sup, "d": fam.d},
        detail="sup factor(y)/y^m is finite and n-independent, so any d in [0,1) works"
        if interior11 else "maximum at grid boundary suggests divergence")

    lr = sum(_log_scale_reward_y(fam, float(sig)) for sig in theta0.sigmas)
    floor = math.exp(lr) if math.isfinite(lr) else 0.0
    a12 = ValidationReport(
        "A12", bool(floor > 0.0), {"reward_floor": floor},
        detail=f"reward at theta0 equals {floor:.6g} for every n")

    return {"A10": a10, "A11": a11, "A12": a12}
