# app/services/econometrics_service.py
import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import solve_triangular
from scipy.special import betainc
from scipy.stats import binom

from app.core.exceptions import DataError, InsufficientDataError, NumericalError, RankDeficiencyError
from app.models.econometrics_models import BinomialSignificance, GrangerRow, NestedFTest, OlsFit
from app.models.lexicon_models import DIMENSIONS

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
TABLE_ONE_STARS = ((0.001, "***"), (0.05, "**"), (0.1, "*"))
TABLE_TWO_STARS = ((0.05, "**"), (0.1, "*"))
GRANGER_SERIES = ("OF", *DIMENSIONS)


def t_two_sided_p(t: float, dof: int) -> float:
    """P(|T| >= |t|) for Student-t with dof degrees of freedom"""
    if math.isnan(t):
        return 1.0
    if math.isinf(t):
        return 0.0
    return float(betainc(dof / 2.0, 0.5, dof / (dof + t * t)))


def f_survival(f: float, d1: int, d2: int) -> float:
    """P(F >= f) for the F(d1, d2) distribution"""
    if d1 <= 0 or f <= 0.0 or math.isnan(f):
        return 1.0
    if math.isinf(f):
        return 0.0
    return float(betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)))


def stars(p: Optional[float], thresholds) -> str:
    if p is None:
        return ""
    for limit, mark in thresholds:
        if p < limit:
            return mark
    return ""


def ols(y: Sequence[float], X, names: Optional[Sequence[str]] = None) -> OlsFit:
    """Least squares with an intercept, solved through a QR factorisation of the design.

    Columns are scaled to unit length before factorising, so the rank check and
    the t statistics do not depend on the units of any regressor.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    n, cols = X.shape
    if len(y) != n:
        raise DataError(f"response has {len(y)} rows but the design has {n}")
    names = list(names) if names is not None else [f"x{i + 1}" for i in range(cols)]
    if len(names) != cols:
        raise ValueError(f"{len(names)} names given for {cols} columns")
    k = cols + 1
    if n <= k:
        raise InsufficientDataError(f"OLS needs more than {k} rows for {k} parameters, got {n}")

    design = np.column_stack([np.ones(n), X])
    all_names = ["Intercept", *names]
    norms = np.linalg.norm(design, axis=0)
    for j, norm in enumerate(norms):
        if norm == 0.0:
            raise RankDeficiencyError(all_names[j])
    q, r = np.linalg.qr(design / norms)
    for j, value in enumerate(np.abs(np.diag(r))):
        if value <= RANK_TOL:
            raise RankDeficiencyError(all_names[j])

    beta = solve_triangular(r, q.T @ y) / norms
    residuals = y - design @ beta
    rss = float(residuals @ residuals)
    dof = n - k
    sigma2 = rss / dof
    r_inv = solve_triangular(r, np.eye(k))
    std_errors = np.sqrt(sigma2 * np.sum(r_inv * r_inv, axis=1)) / norms

    t_stats: List[float] = []
    p_values: List[float] = []
    for coef, se in zip(beta, std_errors):
        if se > 0:
            t = float(coef / se)
        else:
            t = 0.0 if coef == 0 else math.copysign(math.inf, coef)
        t_stats.append(t)
        p_values.append(t_two_sided_p(t, dof))

    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        raise NumericalError("response is constant; R² and the F statistic are undefined")
    r2 = 1.0 - rss / tss
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / dof
    d1 = k - 1
    if d1 == 0:
        f_stat = 0.0
    elif rss == 0.0:
        f_stat = math.inf
    else:
        f_stat = ((tss - rss) / d1) / sigma2

    return OlsFit(
        names=all_names,
        coefficients=[float(b) for b in beta],
        std_errors=[float(s) for s in std_errors],
        t_stats=t_stats,
        p_values=p_values,
        rss=rss,
        residual_std_err=math.sqrt(sigma2),
        r2=r2,
        adj_r2=adj_r2,
        f_stat=f_stat,
        f_dof=(d1, dof),
        f_p_value=f_survival(f_stat, d1, dof),
        n_obs=n,
    )


def regress_of_on_gpoms(panel: pd.DataFrame):
    """Regress OF on the six GPOMS dimensions; returns the fit and its rendered table"""
    if len(panel) < 10:
        raise InsufficientDataError(f"OF regression needs at least 10 panel rows, got {len(panel)}")
    fit = ols(panel["OF"].to_numpy(), panel[list(DIMENSIONS)].to_numpy(), names=DIMENSIONS)
    logger.info(f"📐 OF ~ GPOMS: adj R²={fit.adj_r2:.3f}, F={fit.f_stat:.3f}, p={fit.f_p_value:.3g}")
    return fit, render_regression_table(fit)


def lag_matrix(values: np.ndarray, n: int, start: int) -> np.ndarray:
    """Columns values[t-1] .. values[t-n] for t = start .. len(values) - 1"""
    T = len(values)
    return np.column_stack([values[start - i:T - i] for i in range(1, n + 1)])


def granger_bivariate(d: Sequence[float], x: Sequence[float], lags: Sequence[int],
                      series_name: str = "x") -> List[GrangerRow]:
    """Does x Granger-cause d? One F test per lag, both models on the same T - n rows"""
    d = np.asarray(d, dtype=float)
    x = np.asarray(x, dtype=float)
    if len(d) != len(x):
        raise DataError(f"series lengths differ ({len(d)} vs {len(x)})")
    T = len(d)
    rows: List[GrangerRow] = []
    for n in lags:
        if T - n <= 2 * n + 2:
            rows.append(GrangerRow(lag=n, series_name=series_name,
                                   error=f"insufficient sample: {T - n} rows for lag {n}, need more than {2 * n + 2}"))
            continue
        y = d[n:]
        d_lags = lag_matrix(d, n, n)
        x_lags = lag_matrix(x, n, n)
        d_names = [f"D_lag{i}" for i in range(1, n + 1)]
        x_names = [f"{series_name}_lag{i}" for i in range(1, n + 1)]
        try:
            restricted = ols(y, d_lags, names=d_names)
            unrestricted = ols(y, np.column_stack([d_lags, x_lags]), names=d_names + x_names)
        except (RankDeficiencyError, NumericalError) as e:
            rows.append(GrangerRow(lag=n, series_name=series_name, error=e.detail))
            continue
        dof2 = T - n - 2 * n - 1
        rss_r = restricted.rss
        rss_u = min(unrestricted.rss, rss_r)
        if rss_u == 0.0:
            f_stat = math.inf if rss_r > 0 else 0.0
        else:
            f_stat = ((rss_r - rss_u) / n) / (rss_u / dof2)
        rows.append(GrangerRow(
            lag=n, series_name=series_name, f_stat=f_stat, p_value=f_survival(f_stat, n, dof2),
            rss_restricted=rss_r, rss_unrestricted=rss_u, dof=(n, dof2), n_obs=T - n,
        ))
    return rows


def granger_panel(panel: pd.DataFrame, lags: Sequence[int],
                  series: Sequence[str] = GRANGER_SERIES) -> Dict[str, List[GrangerRow]]:
    """Granger test of every mood column against the index delta D"""
    d = panel["D"].to_numpy()
    results = {name: granger_bivariate(d, panel[name].to_numpy(), lags, series_name=name) for name in series}
    failed = sum(1 for rows in results.values() for row in rows if not row.ok)
    if failed:
        logger.warning(f"⚠️ {failed} Granger fit(s) could not be computed")
    logger.info(f"🔁 Granger tests: {len(series)} series x {len(lags)} lag(s) on {len(panel)} rows")
    return results


def _columns_nested(X_full: np.ndarray, X_reduced: np.ndarray) -> bool:
    return all(
        any(np.allclose(X_reduced[:, j], X_full[:, i]) for i in range(X_full.shape[1]))
        for j in range(X_reduced.shape[1])
    )


def nested_f_test(y, X_full, X_reduced, label: str = "") -> NestedFTest:
    y = np.asarray(y, dtype=float)
    X_full = np.asarray(X_full, dtype=float).reshape(len(y), -1)
    X_reduced = np.asarray(X_reduced, dtype=float).reshape(len(y), -1)
    if not _columns_nested(X_full, X_reduced):
        raise DataError("reduced design is not nested in the full design")
    q = X_full.shape[1] - X_reduced.shape[1]
    full = ols(y, X_full)
    reduced = ols(y, X_reduced)
    dof = full.f_dof[1]
    rss_full = min(full.rss, reduced.rss)
    if q == 0:
        f_stat = 0.0
    elif rss_full == 0.0:
        f_stat = math.inf
    else:
        f_stat = max(0.0, ((reduced.rss - rss_full) / q) / (rss_full / dof))
    return NestedFTest(f_stat=f_stat, p_value=f_survival(f_stat, q, dof), q=q, dof=(q, dof),
                       rss_reduced=reduced.rss, rss_full=rss_full, label=label)


def calm_happy_nested_test(panel: pd.DataFrame, n_lags: int = 3) -> NestedFTest:
    """Does adding lagged Happy to lagged D and Calm improve the prediction of D?"""
    T = len(panel)
    if T - n_lags <= 3 * n_lags + 2:
        raise InsufficientDataError(f"nested F-test needs more than {4 * n_lags + 2} panel rows, got {T}")
    y = panel["D"].to_numpy()[n_lags:]
    d_lags = lag_matrix(panel["D"].to_numpy(), n_lags, n_lags)
    calm_lags = lag_matrix(panel["Calm"].to_numpy(), n_lags, n_lags)
    happy_lags = lag_matrix(panel["Happy"].to_numpy(), n_lags, n_lags)
    reduced = np.column_stack([d_lags, calm_lags])
    result = nested_f_test(y, np.column_stack([reduced, happy_lags]), reduced, label="Calm+Happy vs Calm")
    logger.info(f"🧪 Nested F-test {result.label}: F={result.f_stat:.3f}, p={result.p_value:.3f}")
    return result


def binomial_significance(successes: int, trials: int, p: float = 0.5, n_periods: float = 1.0) -> BinomialSignificance:
    """Probability of exactly `successes` hits by chance, and of that happening in any of n_periods windows"""
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, trials], got {successes}/{trials}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not n_periods > 0:
        raise ValueError(f"n_periods must be positive, got {n_periods}")
    exact = float(binom.pmf(successes, trials, p))
    adjusted = 1.0 - (1.0 - exact) ** n_periods
    return BinomialSignificance(successes=successes, trials=trials, p=p, n_periods=n_periods,
                                exact_prob=exact, window_adjusted_prob=adjusted)


def format_p(p: float) -> str:
    return f"{p:.2e}" if p < 0.001 else f"{p:.3f}"


def render_regression_table(fit: OlsFit) -> str:
    lines = [
        "MULTIPLE REGRESSION RESULTS FOR OPINIONFINDER VS. 6 GPOMS MOOD DIMENSIONS",
        f"{'Parameters':<14}{'Coeff.':>10}{'Std.Err.':>10}{'t':>10}{'p':>11}",
    ]
    for i, name in enumerate(fit.names):
        label = "α" if name == "Intercept" else f"{name} (X{i})"
        p = fit.p_values[i]
        row = (f"{label:<14}{fit.coefficients[i]:>10.3f}{fit.std_errors[i]:>10.3f}"
               f"{fit.t_stats[i]:>10.3f}{format_p(p):>11} {stars(p, TABLE_ONE_STARS)}")
        lines.append(row.rstrip())
    d1, d2 = fit.f_dof
    lines.append(f"Residual Std.Err {fit.residual_std_err:.3f}, Adj.R2 {fit.adj_r2:.3f}, "
                 f"F{d1},{d2} = {fit.f_stat:.3f}, p = {format_p(fit.f_p_value)}")
    lines.append("(p-value < 0.001: ***, p-value < 0.05: **, p-value < 0.1: *)")
    return "\n".join(lines) + "\n"


def _lag_label(lag: int) -> str:
    return "1 day" if lag == 1 else f"{lag} days"


def render_granger_table(results: Dict[str, List[GrangerRow]]) -> str:
    names = list(results)
    lags = sorted({row.lag for rows in results.values() for row in rows})
    lines = [
        "STATISTICAL SIGNIFICANCE (P-VALUES) OF BIVARIATE GRANGER-CAUSALITY",
        f"{'Lag':<8}" + "".join(f"{name:>10}" for name in names),
    ]
    for lag in lags:
        cells = []
        for name in names:
            row = next((r for r in results[name] if r.lag == lag), None)
            if row is None or not row.ok:
                cells.append(f"{'n/a':<5}".rjust(10))
            else:
                cells.append(f"{row.p_value:.3f}{stars(row.p_value, TABLE_TWO_STARS):<2}".rjust(10))
        lines.append((f"{_lag_label(lag):<8}" + "".join(cells)).rstrip())
    lines.append("(p-value < 0.05: **, p-value < 0.1: *)")
    return "\n".join(lines) + "\n"


def render_nested_test(result: NestedFTest) -> str:
    return (f"Nested F-test ({result.label}): F{result.dof[0]},{result.dof[1]} = {result.f_stat:.3f}, "
            f"p = {format_p(result.p_value)}\n")


def render_binomial(result: BinomialSignificance) -> str:
    return (f"Binomial significance: {result.successes}/{result.trials} at p={result.p}: "
            f"exact {result.exact_prob:.4f}, over {result.n_periods} period(s) {result.window_adjusted_prob:.4f}\n")


class GrangerReport(NamedTuple):
    results: Dict[str, List[GrangerRow]]
    nested: NestedFTest
    text: str


class EconometricsService:
    """Significance tests run on a normalized panel"""

    def __init__(self, lags: Sequence[int], n_lags: int = 3):
        if not lags or min(lags) < 1:
            raise ValueError(f"Granger lags must be positive, got {list(lags)}")
        self.lags = sorted(set(lags))
        self.n_lags = n_lags

    def granger(self, panel: pd.DataFrame) -> GrangerReport:
        """Bivariate Granger table for every mood series plus the Calm+Happy nested F-test"""
        results = granger_panel(panel, self.lags)
        nested = calm_happy_nested_test(panel, self.n_lags)
        text = render_granger_table(results) + "\n" + render_nested_test(nested)
        return GrangerReport(results, nested, text)

    def regress(self, panel: pd.DataFrame):
        return regress_of_on_gpoms(panel)
