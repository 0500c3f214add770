"""Regression engines and hypothesis tests.

* OLS through a pivoted QR decomposition (never the normal equations),
  with standard errors, t statistics, and p-values per coefficient.
* Proportional-odds ordinal logistic regression: thresholds are kept
  ordered by parameterizing them as a base value plus exponentiated
  increments; the likelihood and its analytic gradient feed a BFGS ascent
  that stops once the gradient max-norm drops below 1e-6.
* Rank prediction (rounded-and-clamped for OLS, per-class argmax for the
  ordinal model) plus a k-fold holdout harness.
* Welch's unequal-variance t-test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import linalg as sla
from scipy import optimize
from scipy import stats as sps

from .dataset import Dataset
from .errors import (
    ColumnMismatch,
    ConfigError,
    DegenerateSample,
    NonConvergence,
    RankDeficient,
    Separation,
    TooFewRows,
)
from .features import FeatureMatrix
from .model import RANK_MAX, RANK_MIN

GRADIENT_TOL = 1e-6
MAX_ITERATIONS = 500
#: a standardized coefficient this large means the likelihood is running away
SEPARATION_NORM = 50.0

OLS = "ols"
ORDINAL = "ordinal"


@dataclass(frozen=True)
class DesignMatrix:
    """Rows = politicians; columns = named features/covariates (+ intercept)."""

    row_ids: tuple[int, ...]
    columns: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    dropped: tuple[int, ...] = ()

    def __post_init__(self):
        if self.X.shape != (len(self.row_ids), len(self.columns)):
            raise ValueError("X shape does not match row/column labels")
        if not np.isfinite(self.X).all():
            raise ValueError("design matrix contains non-finite entries")
        if "intercept" in self.columns:
            col = self.X[:, self.columns.index("intercept")]
            if not np.all(col == 1.0):
                raise ValueError("intercept column must be all ones")

    @property
    def n_rows(self) -> int:
        return len(self.row_ids)

    def take(self, rows: np.ndarray) -> "DesignMatrix":
        return DesignMatrix(
            row_ids=tuple(self.row_ids[i] for i in rows),
            columns=self.columns,
            X=self.X[rows],
            y=self.y[rows],
        )


def promotion_to_rank5_year(ds: Dataset, pid: int) -> int | None:
    """First calendar year a spell at rank >= 5 starts, if any."""
    years = [s.start.year for s in ds.spells_of(pid) if s.rank >= 5]
    return min(years) if years else None


def assemble_design(
    ds: Dataset,
    fm: FeatureMatrix,
    ranks: Mapping[int, int],
    include_covariates: bool = True,
    promo_mode: str = "drop",
) -> DesignMatrix:
    """Stack feature vectors and covariates; the outcome is the final rank.

    Politicians without a final rank are dropped.  With covariates on,
    rows missing the rank-5 promotion year are dropped by default
    (``promo_mode="drop"``) or kept with a zero-plus-indicator column
    (``promo_mode="indicator"``).
    """
    if promo_mode not in ("drop", "indicator"):
        raise ConfigError(f"promo_mode must be 'drop' or 'indicator', got {promo_mode!r}")
    feature_names = [f"f{i}" for i in range(fm.width)]
    rows = []
    ids = []
    outcomes = []
    dropped = []
    for pos, pid in enumerate(fm.node_order):
        if pid not in ranks:
            dropped.append(pid)
            continue
        cells = list(fm.values[pos])
        if include_covariates:
            p = ds.politicians[pid]
            promo = promotion_to_rank5_year(ds, pid)
            if promo is None and promo_mode == "drop":
                dropped.append(pid)
                continue
            cells += [float(p.birth_year), float(p.party_join_year)]
            if promo_mode == "indicator":
                cells += [float(promo or 0), 1.0 if promo is None else 0.0]
            else:
                cells += [float(promo)]
        cells.append(1.0)
        rows.append(cells)
        ids.append(pid)
        outcomes.append(ranks[pid])
    columns = list(feature_names)
    if include_covariates:
        columns += ["birth_year", "party_join_year", "promotion_to_rank5_year"]
        if promo_mode == "indicator":
            columns.append("never_rank5")
    columns.append("intercept")
    return DesignMatrix(
        row_ids=tuple(ids),
        columns=tuple(columns),
        X=np.array(rows, dtype=np.float64).reshape(len(rows), len(columns)),
        y=np.array(outcomes, dtype=np.int64),
        dropped=tuple(dropped),
    )


@dataclass(frozen=True)
class ModelFit:
    kind: str
    names: tuple[str, ...]           # columns multiplied by `coef`
    coef: np.ndarray
    n_rows: int
    se: np.ndarray | None = None
    t: np.ndarray | None = None
    p: np.ndarray | None = None
    r_squared: float | None = None
    log_likelihood: float | None = None
    thresholds: np.ndarray | None = None
    levels: tuple[int, ...] | None = None


def significance_stars(p: float) -> str:
    if p < 0.005:
        return "**"
    if p < 0.05:
        return "*"
    if p < 0.15:
        return "."
    return ""


def _qr_solve(X: np.ndarray, y: np.ndarray, columns) -> tuple[np.ndarray, np.ndarray]:
    """Least squares by pivoted QR; returns (beta, (X'X)^-1)."""
    n, p = X.shape
    q, r, piv = sla.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = max(n, p) * np.finfo(float).eps * (diag[0] if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < p:
        raise RankDeficient([columns[i] for i in piv[rank:]])
    beta_p = sla.solve_triangular(r, q.T @ y)
    rinv = sla.solve_triangular(r, np.eye(p))
    cov_p = rinv @ rinv.T
    beta = np.empty(p)
    beta[piv] = beta_p
    cov = np.empty((p, p))
    cov[np.ix_(piv, piv)] = cov_p
    return beta, cov


def fit_ols(design: DesignMatrix) -> ModelFit:
    """Least squares with coefficient standard errors and p-values."""
    X, y = design.X, design.y.astype(np.float64)
    n, p = X.shape
    if n < p:
        raise TooFewRows(f"{n} rows for {p} columns")
    beta, xtx_inv = _qr_solve(X, y, design.columns)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst > 0:
        r_squared = 1.0 - ssr / sst
    else:
        r_squared = 1.0 if ssr < 1e-12 else 0.0
    dof = n - p
    if dof > 0:
        sigma2 = ssr / dof
        se = np.sqrt(np.maximum(sigma2 * np.diag(xtx_inv), 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(se > 0, beta / se, np.inf * np.sign(beta))
        pvals = 2.0 * sps.t.sf(np.abs(t), dof)
    else:
        se = np.full(p, np.nan)
        t = np.full(p, np.nan)
        pvals = np.full(p, np.nan)
    return ModelFit(
        kind=OLS, names=design.columns, coef=beta, n_rows=n,
        se=se, t=t, p=pvals, r_squared=r_squared,
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _thresholds_from_free(free: np.ndarray) -> np.ndarray:
    # free = (tau_0, log increments); exponentiation keeps thresholds ordered
    return np.concatenate([free[:1], free[:1] + np.cumsum(np.exp(free[1:]))])


class _OrdinalProblem:
    """Negative log-likelihood and gradient for the proportional-odds model."""

    def __init__(self, X: np.ndarray, y_idx: np.ndarray, k_levels: int):
        self.X = X
        self.y = y_idx
        self.k = k_levels
        self.p = X.shape[1]

    def split(self, params):
        return params[: self.p], params[self.p:]

    def _bounds(self, tau, xb):
        hi = np.where(self.y < self.k - 1, tau[np.minimum(self.y, self.k - 2)] , np.inf)
        lo = np.where(self.y > 0, tau[np.maximum(self.y - 1, 0)], -np.inf)
        return lo - xb, hi - xb

    def value(self, params) -> float:
        beta, free = self.split(params)
        tau = _thresholds_from_free(free)
        z_lo, z_hi = self._bounds(tau, self.X @ beta)
        prob = _sigmoid(z_hi) - _sigmoid(z_lo)
        return -float(np.sum(np.log(np.maximum(prob, 1e-300))))

    def gradient(self, params) -> np.ndarray:
        beta, free = self.split(params)
        tau = _thresholds_from_free(free)
        xb = self.X @ beta
        z_lo, z_hi = self._bounds(tau, xb)
        f_hi = np.where(np.isfinite(z_hi), _sigmoid(z_hi) * (1 - _sigmoid(z_hi)), 0.0)
        f_lo = np.where(np.isfinite(z_lo), _sigmoid(z_lo) * (1 - _sigmoid(z_lo)), 0.0)
        prob = np.maximum(_sigmoid(z_hi) - _sigmoid(z_lo), 1e-300)
        # d logL / d beta_j = sum_i x_ij (f_lo - f_hi) / P
        g_beta = self.X.T @ ((f_lo - f_hi) / prob)
        # d logL / d tau_m picks up f_hi from rows in class m, -f_lo from class m+1
        g_tau = np.zeros(self.k - 1)
        np.add.at(g_tau, np.minimum(self.y, self.k - 2),
                  np.where(self.y < self.k - 1, f_hi / prob, 0.0))
        np.add.at(g_tau, np.maximum(self.y - 1, 0),
                  -np.where(self.y > 0, f_lo / prob, 0.0))
        # chain rule through the increment parameterization
        suffix = np.cumsum(g_tau[::-1])[::-1]
        g_free = np.empty(self.k - 1)
        g_free[0] = suffix[0]
        g_free[1:] = np.exp(free[1:]) * suffix[1:]
        return -np.concatenate([g_beta, g_free])


def ordinal_start_params(y_idx: np.ndarray, k: int, p: int) -> np.ndarray:
    freq = np.bincount(y_idx, minlength=k) / len(y_idx)
    cum = np.clip(np.cumsum(freq)[:-1], 1e-6, 1 - 1e-6)
    tau = np.log(cum / (1 - cum))
    # collapse non-increasing starts before taking log-diffs
    tau = np.maximum.accumulate(tau + 1e-9 * np.arange(k - 1))
    free = np.concatenate([tau[:1], np.log(np.maximum(np.diff(tau), 1e-6))])
    return np.concatenate([np.zeros(p), free])


def fit_ordinal_logit(design: DesignMatrix) -> ModelFit:
    """Maximum-likelihood proportional-odds fit.

    The intercept column is absorbed into the thresholds and therefore
    excluded from the linear term.  Columns are standardized internally
    and estimates mapped back to the original scale.
    """
    keep = [i for i, c in enumerate(design.columns) if c != "intercept"]
    names = tuple(design.columns[i] for i in keep)
    X = design.X[:, keep]
    levels = tuple(int(v) for v in np.unique(design.y))
    if len(levels) < 2:
        raise ConfigError("ordinal outcome needs at least two distinct levels")
    y_idx = np.searchsorted(np.array(levels), design.y)
    k = len(levels)

    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    flat = [names[i] for i in range(len(names)) if sd[i] == 0.0]
    if flat:
        raise RankDeficient(flat)
    Xs = (X - mu) / sd

    problem = _OrdinalProblem(Xs, y_idx, k)
    x0 = ordinal_start_params(y_idx, k, Xs.shape[1])
    result = optimize.minimize(
        problem.value, x0, jac=problem.gradient, method="BFGS",
        options={"gtol": GRADIENT_TOL, "maxiter": MAX_ITERATIONS},
    )
    if np.max(np.abs(result.jac)) >= GRADIENT_TOL:
        result = optimize.minimize(
            problem.value, result.x, jac=problem.gradient, method="BFGS",
            options={"gtol": GRADIENT_TOL, "maxiter": MAX_ITERATIONS},
        )
    beta_s, free = problem.split(result.x)
    if np.max(np.abs(beta_s)) > SEPARATION_NORM:
        raise Separation(
            f"standardized coefficient magnitude {np.max(np.abs(beta_s)):.1f} diverged"
        )
    if np.max(np.abs(result.jac)) >= GRADIENT_TOL:
        raise NonConvergence(
            f"gradient max-norm {np.max(np.abs(result.jac)):.2e} after {MAX_ITERATIONS} iterations"
        )
    tau_s = _thresholds_from_free(free)
    beta = beta_s / sd
    tau = tau_s + float(np.sum(beta_s * mu / sd))
    return ModelFit(
        kind=ORDINAL, names=names, coef=beta, n_rows=len(design.row_ids),
        log_likelihood=-float(result.fun), thresholds=tau, levels=levels,
    )


def class_probabilities(fit: ModelFit, design: DesignMatrix) -> np.ndarray:
    """Per-row class probability matrix (columns follow fit.levels)."""
    if fit.kind != ORDINAL:
        raise ValueError("class probabilities are defined for ordinal fits only")
    idx = _match_columns(fit.names, design.columns)
    xb = design.X[:, idx] @ fit.coef
    cdf = _sigmoid(fit.thresholds[None, :] - xb[:, None])
    cum = np.hstack([np.zeros((len(xb), 1)), cdf, np.ones((len(xb), 1))])
    return np.diff(cum, axis=1)


def _match_columns(needed: tuple[str, ...], available: tuple[str, ...]) -> list[int]:
    try:
        return [available.index(name) for name in needed]
    except ValueError as exc:
        raise ColumnMismatch(f"design is missing a fitted column: {exc}") from None


def predict_rank(fit: ModelFit, design: DesignMatrix) -> np.ndarray:
    """Predicted rank level per row."""
    if fit.kind == OLS:
        if fit.names != design.columns:
            raise ColumnMismatch(f"fit columns {fit.names} != design columns {design.columns}")
        raw = design.X @ fit.coef
        return np.clip(np.floor(raw + 0.5), RANK_MIN, RANK_MAX).astype(np.int64)
    probs = class_probabilities(fit, design)
    levels = np.array(fit.levels)
    return levels[np.argmax(probs, axis=1)]


def _fit(kind: str, design: DesignMatrix) -> ModelFit:
    if kind == OLS:
        return fit_ols(design)
    if kind == ORDINAL:
        return fit_ordinal_logit(design)
    raise ConfigError(f"unknown model kind {kind!r}")


def accuracy(fit: ModelFit, design: DesignMatrix) -> float:
    return float(np.mean(predict_rank(fit, design) == design.y))


def majority_share(y: np.ndarray) -> float:
    _values, counts = np.unique(y, return_counts=True)
    return float(counts.max() / len(y))


@dataclass(frozen=True)
class HoldoutResult:
    in_sample: float
    out_of_sample: float
    fold_accuracies: tuple[float, ...]


def holdout_eval(
    design: DesignMatrix,
    kind: str = OLS,
    folds: int = 10,
    seed: int = 0,
    mode: str = "kfold",
) -> HoldoutResult:
    """Cross-validated rank-prediction accuracy.

    ``kfold`` shuffles once and scores each of `folds` disjoint folds
    against a fit on its complement; ``repeated`` draws `folds`
    independent (1/folds)-sized holdouts instead.
    """
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    n = design.n_rows
    if n < folds:
        raise TooFewRows(f"{n} rows cannot fill {folds} folds")
    if mode not in ("kfold", "repeated"):
        raise ConfigError(f"mode must be 'kfold' or 'repeated', got {mode!r}")
    rng = np.random.default_rng(seed)
    splits = []
    if mode == "kfold":
        perm = rng.permutation(n)
        splits = [np.sort(part) for part in np.array_split(perm, folds)]
    else:
        size = max(1, n // folds)
        for _ in range(folds):
            perm = rng.permutation(n)
            splits.append(np.sort(perm[:size]))
    accs = []
    all_rows = np.arange(n)
    for test_rows in splits:
        train_rows = np.setdiff1d(all_rows, test_rows)
        fit = _fit(kind, design.take(train_rows))
        accs.append(accuracy(fit, design.take(test_rows)))
    full_fit = _fit(kind, design)
    return HoldoutResult(
        in_sample=accuracy(full_fit, design),
        out_of_sample=float(np.mean(accs)),
        fold_accuracies=tuple(accs),
    )


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float


def welch_t_test(sample_a, sample_b) -> WelchResult:
    """Unequal-variance t-test with Welch-Satterthwaite degrees of freedom."""
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise DegenerateSample(f"sample sizes {len(a)}, {len(b)}; need >= 2 each")
    va = float(a.var(ddof=1))
    vb = float(b.var(ddof=1))
    if va == 0.0 and vb == 0.0:
        raise DegenerateSample("both samples have zero variance")
    qa, qb = va / len(a), vb / len(b)
    t = float((a.mean() - b.mean()) / np.sqrt(qa + qb))
    df = (qa + qb) ** 2 / (qa**2 / (len(a) - 1) + qb**2 / (len(b) - 1))
    if t == 0.0:
        return WelchResult(t=0.0, df=float(df), p=1.0)
    p = float(2.0 * sps.t.sf(abs(t), df))
    return WelchResult(t=t, df=float(df), p=p)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    se_slope: float
    se_intercept: float
    t_slope: float
    t_intercept: float
    p_slope: float
    p_intercept: float
    df: int
    r_squared: float


def linear_fit(x, y) -> LinearFit:
    """Simple y = a + b x least squares with standard errors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    design = DesignMatrix(
        row_ids=tuple(range(len(x))),
        columns=("x", "intercept"),
        X=np.column_stack([x, np.ones(len(x))]),
        y=y,
    )
    fit = fit_ols(design)
    return LinearFit(
        slope=float(fit.coef[0]), intercept=float(fit.coef[1]),
        se_slope=float(fit.se[0]), se_intercept=float(fit.se[1]),
        t_slope=float(fit.t[0]), t_intercept=float(fit.t[1]),
        p_slope=float(fit.p[0]), p_intercept=float(fit.p[1]),
        df=len(x) - 2, r_squared=float(fit.r_squared),
    )


def format_fit_report(fit: ModelFit) -> str:
    """Text table: coefficient, SE, t, p per row, plus fit diagnostics."""
    lines = [f"model: {fit.kind}    rows: {fit.n_rows}"]
    if fit.r_squared is not None:
        lines.append(f"r_squared: {fit.r_squared:.6f}")
    if fit.log_likelihood is not None:
        lines.append(f"log_likelihood: {fit.log_likelihood:.6f}")
    lines.append(f"{'term':<28}{'estimate':>16}{'se':>14}{'t':>12}{'p':>12}")
    for i, name in enumerate(fit.names):
        if fit.se is not None:
            lines.append(
                f"{name:<28}{fit.coef[i]:>16.6g}{fit.se[i]:>14.4g}"
                f"{fit.t[i]:>12.4g}{fit.p[i]:>12.4g} {significance_stars(fit.p[i])}"
            )
        else:
            lines.append(f"{name:<28}{fit.coef[i]:>16.6g}")
    if fit.thresholds is not None:
        for j, tau in enumerate(fit.thresholds):
            lines.append(f"{f'threshold_{j}':<28}{tau:>16.6g}")
    if fit.levels is not None:
        lines.append(f"levels: {','.join(str(v) for v in fit.levels)}")
    return "\n".join(lines) + "\n"
