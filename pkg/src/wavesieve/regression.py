"""Truncated least-squares regression over wavelet sieves.

The estimator minimizes the empirical squared error over the linear span of
the sieve's design functions, solved by singular value decomposition with a
relative cutoff (minimum-norm solution), and predictions are clamped to
[-rho, rho].  The level rule picks j with 2^j <= n^(1/(d+2r)) < 2^(j+1).
"""

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .wavelets import WaveletSieve, filter_by_name

__all__ = [
    "Dataset", "RegressionFit", "SvdReport",
    "design_matrix", "svd_lstsq", "fit", "truncate_value", "predict", "predict_batch",
    "default_rho", "auto_rho", "select_level", "l2_error_mc",
    "dataset_from_csv", "fit_to_json", "fit_from_json",
]


@dataclass(frozen=True)
class Dataset:
    """Design sites X (one row per observation) and responses y."""
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y lengths differ")
        if X.size and not np.all(np.isfinite(X)):
            raise ValueError("non-finite design value")
        if y.size and not np.all(np.isfinite(y)):
            raise ValueError("non-finite response value")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.y.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class SvdReport:
    rank: int
    condition: float
    dropped: np.ndarray
    total_columns: int

    @property
    def degenerate(self):
        return self.rank == 0


@dataclass(frozen=True)
class RegressionFit:
    """Fitted sieve coefficients plus the truncation bound used at prediction."""
    sieve: object
    coeffs: np.ndarray
    rho: float
    svd_report: SvdReport


def _design(X, sieve, table):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != sieve.d:
        raise ValueError(f"points have dimension {X.shape[1]}, sieve expects {sieve.d}")
    scale = 2.0 ** sieve.j
    out = np.full((X.shape[0], sieve.size), sieve.scale)
    for i in range(sieve.d):
        out *= table.eval(scale * X[:, i, None] - sieve.K[None, :, i])
    return out


def design_matrix(data, sieve, table):
    """Matrix with entry (s, gamma) = Phi_{j,gamma}(X_s); columns follow the
    sieve's lexicographic translation order."""
    return _design(data.X, sieve, table)


def svd_lstsq(B, y, svd_rtol=1e-10):
    """Minimum-norm least squares by singular value decomposition.

    Singular values below svd_rtol times the largest are dropped and
    reported.  Returns (coefficients, SvdReport); a fully degenerate matrix
    yields all-zero coefficients with rank 0.
    """
    B = np.asarray(B, dtype=float)
    y = np.asarray(y, dtype=float)
    U, s, Vt = np.linalg.svd(B, full_matrices=False)
    smax = float(s[0]) if s.size else 0.0
    keep = s > svd_rtol * smax if smax > 0.0 else np.zeros(s.shape, dtype=bool)
    if not np.any(keep):
        return np.zeros(B.shape[1]), SvdReport(0, np.inf, s.copy(), B.shape[1])
    coeffs = Vt[keep].T @ ((U[:, keep].T @ y) / s[keep])
    report = SvdReport(int(keep.sum()), float(smax / s[keep].min()),
                       s[~keep].copy(), B.shape[1])
    return coeffs, report


def fit(data, sieve, table, rho=np.inf, svd_rtol=1e-10):
    """Truncated least-squares fit of the sieve coefficients on a dataset."""
    if len(data) < 1:
        raise ValueError("need at least one observation")
    if rho < 0:
        raise ValueError("truncation bound must be non-negative")
    B = design_matrix(data, sieve, table)
    coeffs, report = svd_lstsq(B, data.y, svd_rtol)
    if report.degenerate:
        warnings.warn("degenerate design: all singular values dropped", stacklevel=2)
    return RegressionFit(sieve, coeffs, float(rho), report)


def truncate_value(y, bound):
    """Clamp y to [-bound, bound]."""
    if bound < 0:
        raise ValueError("truncation bound must be non-negative")
    return float(max(min(y, bound), -bound))


def predict(fit_result, table, x):
    """Truncated prediction at one point: clamp(sum_gamma a_gamma Phi(x))."""
    row = _design(np.asarray(x, dtype=float).reshape(1, -1), fit_result.sieve, table)
    return truncate_value(float(row[0] @ fit_result.coeffs), fit_result.rho)


def predict_batch(fit_result, table, X):
    """Truncated predictions for an array of points."""
    raw = _design(X, fit_result.sieve, table) @ fit_result.coeffs
    return np.clip(raw, -fit_result.rho, fit_result.rho)


def default_rho(sample_size, c):
    """Truncation bound growing like c * log(sample size)."""
    if sample_size < 2:
        raise ValueError("sample_size must be at least 2")
    if c <= 0:
        raise ValueError("c must be positive")
    return c * math.log(sample_size)


def auto_rho(y, sample_size):
    """Default bound max(log n, 2 max|y|): grows logarithmically but stays
    non-binding on well-scaled problems."""
    c = max(1.0, 2.0 * float(np.max(np.abs(y))) / math.log(sample_size))
    return default_rho(sample_size, c)


def select_level(sample_size, d, r):
    """The unique j with 2^j <= sample_size^(1/(d+2r)) < 2^(j+1)."""
    if sample_size < 2:
        raise ValueError("sample_size must be at least 2")
    if not 0.0 < r <= 1.0:
        raise ValueError("smoothness exponent r must lie in (0, 1]")
    if d < 1:
        raise ValueError("dimension must be at least 1")
    e = math.log2(sample_size) / (d + 2.0 * r)
    # absorb float noise when the target is an exact power of two
    return int(math.floor(e + 1e-12))


def l2_error_mc(fit_result, table, m_true, test_X):
    """Monte Carlo squared error: mean over test points of
    (prediction - m_true)^2."""
    test_X = np.asarray(test_X, dtype=float)
    if test_X.ndim == 1:
        test_X = test_X[:, None]
    if test_X.shape[0] == 0:
        raise ValueError("test set is empty")
    pred = predict_batch(fit_result, table, test_X)
    truth = np.array([float(m_true(*row)) for row in test_X])
    return float(np.mean((pred - truth) ** 2))


# ---------------------------------------------------------------------------
# io

def dataset_from_csv(path):
    """Read x_1,...,x_d,y rows (optional header starting with a letter)."""
    rows = []
    with open(path) as fh:
        for line in fh:
            body = line.strip()
            if not body:
                continue
            if body[0].isalpha():
                continue
            rows.append([float(v) for v in body.split(",")])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    arr = np.array(rows)
    return Dataset(arr[:, :-1], arr[:, -1])


def fit_to_json(fit_result, path=None):
    """Serialize a fit; returns the dict and optionally writes it."""
    sieve = fit_result.sieve
    rep = fit_result.svd_report
    doc = {
        "filter": sieve.filter.name,
        "d": sieve.d,
        "j": sieve.j,
        "w": sieve.w,
        "rho": None if math.isinf(fit_result.rho) else fit_result.rho,
        "svd_report": {
            "rank": rep.rank,
            "condition": None if math.isinf(rep.condition) else rep.condition,
            "dropped": [float(v) for v in rep.dropped],
            "total_columns": rep.total_columns,
        },
        "coefficients": [
            {"gamma": [int(v) for v in gamma], "a": float(a)}
            for gamma, a in zip(sieve.K, fit_result.coeffs)
        ],
    }
    if path is not None:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
    return doc


def fit_from_json(doc_or_path):
    """Rebuild a RegressionFit from its JSON form."""
    if isinstance(doc_or_path, (str, bytes)):
        with open(doc_or_path) as fh:
            doc = json.load(fh)
    else:
        doc = doc_or_path
    filt = filter_by_name(doc["filter"])
    K = np.array([entry["gamma"] for entry in doc["coefficients"]],
                 dtype=np.int64).reshape(-1, doc["d"])
    sieve = WaveletSieve(filt, doc["d"], doc["j"], doc["w"], K)
    coeffs = np.array([entry["a"] for entry in doc["coefficients"]])
    rep = doc["svd_report"]
    report = SvdReport(rep["rank"],
                       math.inf if rep["condition"] is None else rep["condition"],
                       np.array(rep["dropped"]), rep["total_columns"])
    rho = math.inf if doc["rho"] is None else float(doc["rho"])
    return RegressionFit(sieve, coeffs, rho, report)
