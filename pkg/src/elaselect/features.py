"""The ten ELA features used for BBOB classification.

Each feature works on a sample ``(X, y)`` with ``X`` of shape ``(n, d)``.
Degenerate inputs that still form a legal sample (constant fitness, IC
conditions never met on the grid) produce boundary values and a diagnostic
string instead of raising; see :class:`FeatureVector.diagnostics`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

FEATURE_NAMES = ("disp", "skew", "lr2", "int", "max", "eps_s", "eps_ratio", "nbc", "pca", "qr2")

IC_SETTLING = 0.05
IC_RATIO = 0.5

_CHUNK = 512


class FeatureError(ValueError):
    """A feature could not be computed; ``feature`` names the culprit."""

    def __init__(self, feature: str, message: str):
        super().__init__(f"{feature}: {message}")
        self.feature = feature


@dataclass(frozen=True)
class FeatureMeta:
    function_id: int
    instance_id: int
    dimension: int
    sample_size: int
    repetition: int
    seed: int


@dataclass(frozen=True)
class FeatureVector:
    values: dict
    meta: FeatureMeta
    diagnostics: tuple = ()

    def __post_init__(self):
        if set(self.values) != set(FEATURE_NAMES):
            raise ValueError(f"feature vector must hold exactly {FEATURE_NAMES}")

    def as_array(self, names=FEATURE_NAMES) -> np.ndarray:
        return np.array([self.values[k] for k in names], dtype=float)


@dataclass(frozen=True)
class LinearFit:
    intercept: float
    coefficients: np.ndarray
    adj_r2: float
    rank_deficient: bool = False


@dataclass(frozen=True, eq=False)
class InfoContentCurve:
    epsilons: np.ndarray
    H: np.ndarray
    M: np.ndarray


def _check_sample(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"incompatible sample shapes X{X.shape}, y{y.shape}")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("sample contains non-finite values")
    return X, y


# ---------------------------------------------------------------------------
# meta-model features


def fit_least_squares(design, y):
    """Least-squares fit with adjusted R^2.

    ``design`` must carry the all-ones column first. Returns
    ``(coefficients, adj_r2, rank_deficient)``; rank-deficient designs are
    solved in the least-norm sense.
    """
    A = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = A.shape
    if n <= p:
        raise ValueError(f"need more rows than columns, got {n}x{p}")
    coef, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    rss = float(resid @ resid)
    dev = y - y.mean()
    tss = float(dev @ dev)
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    p_free = p - 1
    if n - p_free - 1 > 0:
        adj = 1.0 - (1.0 - r2) * (n - 1) / (n - p_free - 1)
    else:
        adj = r2
    return coef, adj, rank < p


def linear_fit(X, y) -> LinearFit:
    X, y = _check_sample(X, y)
    A = np.column_stack([np.ones(len(y)), X])
    coef, adj, deficient = fit_least_squares(A, y)
    return LinearFit(float(coef[0]), coef[1:], float(adj), deficient)


def feat_linear(X, y):
    """``(lr2, int, max)`` of the model ``y ~ 1 + x``."""
    fit = linear_fit(X, y)
    return fit.adj_r2, fit.intercept, float(np.max(np.abs(fit.coefficients)))


def feat_quadratic(X, y) -> float:
    """Adjusted R^2 of ``y ~ 1 + sum x_i + sum x_i^2`` (no interactions)."""
    X, y = _check_sample(X, y)
    n, d = X.shape
    if n <= 2 * d + 1:
        raise FeatureError("qr2", f"need n > 2d+1 = {2 * d + 1} rows, got {n}")
    A = np.column_stack([np.ones(n), X, X ** 2])
    return float(fit_least_squares(A, y)[1])


# ---------------------------------------------------------------------------
# distribution / distance features


def feat_skewness(y):
    """Moment skewness ``m3 / m2**1.5``; returns ``(value, degenerate)``."""
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        raise FeatureError("skew", "need at least 3 values")
    c = y - y.mean()
    m2 = float(np.mean(c ** 2))
    if m2 == 0.0 or m2 <= (np.finfo(float).eps * np.max(np.abs(y))) ** 2:
        return 0.0, True
    m3 = float(np.mean(c ** 3))
    return m3 / m2 ** 1.5, False


def _mean_pairwise(X) -> float:
    n = X.shape[0]
    total = 0.0
    for lo in range(0, n, _CHUNK):
        block = cdist(X[lo:lo + _CHUNK], X[lo:])
        # keep strictly upper-triangular pairs
        total += float(np.triu(block, k=1).sum())
    return total / (n * (n - 1) / 2)


def best_subset(y, fraction: float = 0.02) -> np.ndarray:
    """Indices of the ``ceil(fraction * n)`` best (smallest) values, ties by index."""
    y = np.asarray(y, dtype=float)
    m = math.ceil(round(fraction * y.size, 9))
    return np.argsort(y, kind="stable")[:m]


def feat_dispersion(X, y, fraction: float = 0.02) -> float:
    X, y = _check_sample(X, y)
    idx = best_subset(y, fraction)
    if idx.size < 2:
        raise FeatureError("disp", f"best subset holds {idx.size} point(s); need n >= 100")
    overall = _mean_pairwise(X)
    if overall == 0.0:
        raise FeatureError("disp", "all points coincide")
    return _mean_pairwise(X[idx]) / overall


def nearest_better(X, y) -> np.ndarray:
    """Index of each point's nearest strictly-better point, ``-1`` if none."""
    X, y = _check_sample(X, y)
    n = len(y)
    out = np.full(n, -1, dtype=np.int64)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        dist = cdist(X[lo:hi], X, "sqeuclidean")
        dist[~(y[None, :] < y[lo:hi, None])] = np.inf
        nb = np.argmin(dist, axis=1)
        has = np.isfinite(dist[np.arange(hi - lo), nb])
        out[lo:hi] = np.where(has, nb, -1)
    return out


def _pearson(a, b):
    a = a - a.mean()
    b = b - b.mean()
    den = math.sqrt(float(a @ a) * float(b @ b))
    if den == 0.0:
        return None
    return float(a @ b) / den


def feat_nbc(X, y):
    """Correlation of fitness and nearest-better indegree; ``(value, degenerate)``."""
    X, y = _check_sample(X, y)
    if len(y) < 3:
        raise FeatureError("nbc", "need at least 3 points")
    nb = nearest_better(X, y)
    indeg = np.bincount(nb[nb >= 0], minlength=len(y)).astype(float)
    r = _pearson(y, indeg)
    if r is None:
        return 0.0, True
    return r, False


def feat_pca(X, y, include_y: bool = True) -> float:
    """Variance share of the first principal component of ``[X | y]`` (or ``X``)."""
    X, y = _check_sample(X, y)
    data = np.column_stack([X, y]) if include_y else X
    cov = np.atleast_2d(np.cov(data, rowvar=False, ddof=1))
    eig = np.linalg.eigvalsh(cov)
    total = float(np.sum(eig))
    if not total > 0:
        raise FeatureError("pca", "zero total variance")
    return float(eig[-1]) / total


# ---------------------------------------------------------------------------
# information content


def ic_epsilons(count: int = 1000, lo_exp: float = -5.0, hi_exp: float = 15.0) -> np.ndarray:
    """The default grid ``{0} U {10**t}`` with ``count`` log-spaced values."""
    return np.concatenate([[0.0], 10.0 ** np.linspace(lo_exp, hi_exp, count)])


def nn_tour(X, start: int = 0) -> np.ndarray:
    """Greedy nearest-neighbour ordering starting at ``start``; ties by lower index."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 0 <= start < n:
        raise ValueError(f"start index {start} outside [0, {n})")
    order = np.empty(n, dtype=np.int64)
    remaining = np.ones(n, dtype=bool)
    cur = start
    for step in range(n):
        order[step] = cur
        remaining[cur] = False
        if step == n - 1:
            break
        diff = X - X[cur]
        d2 = np.einsum("ij,ij->i", diff, diff)
        d2[~remaining] = np.inf
        cur = int(np.argmin(d2))
    return order


def tour_slopes(X, y, start: int = 0):
    """Slopes along the tour and the number of zero-length steps dropped."""
    X, y = _check_sample(X, y)
    order = nn_tour(X, start)
    step = np.linalg.norm(np.diff(X[order], axis=0), axis=1)
    dy = np.diff(y[order])
    keep = step > 0
    return dy[keep] / step[keep], int(np.count_nonzero(~keep))


# symbol pairs (a, b) with a != b, encoded as 3 * (a + 1) + (b + 1)
_UNEQUAL_CODES = np.array([3 * (a + 1) + (b + 1)
                           for a in (-1, 0, 1) for b in (-1, 0, 1) if a != b])


def info_content_curve(slopes, epsilons, n_points: int | None = None) -> InfoContentCurve:
    """Entropy ``H`` and partial information ``M`` for each epsilon.

    ``M`` is normalized by ``n_points - 1`` (defaults to ``len(slopes)``).
    """
    slopes = np.asarray(slopes, dtype=float)
    eps = np.asarray(epsilons, dtype=float)
    L = slopes.size
    denom = (n_points - 1) if n_points is not None else L
    mag = np.abs(slopes)
    sgn = np.sign(slopes).astype(np.int8)
    H = np.zeros(eps.size)
    M = np.zeros(eps.size)
    for k, e in enumerate(eps):
        sym = np.where(mag > e, sgn, 0).astype(np.int8)
        if L >= 2:
            codes = 3 * (sym[:-1] + 1) + (sym[1:] + 1)
            counts = np.bincount(codes, minlength=9)[_UNEQUAL_CODES]
            p = counts[counts > 0] / (L - 1)
            H[k] = float(-np.sum(p * np.log(p)) / np.log(6.0))
        nz = sym[sym != 0]
        runs = 0 if nz.size == 0 else 1 + int(np.count_nonzero(nz[1:] != nz[:-1]))
        M[k] = runs / denom if denom > 0 else 0.0
    return InfoContentCurve(eps, H, M)


def ic_sensitivities(curve: InfoContentCurve):
    """``(eps_s, eps_ratio, notes)`` from an IC curve.

    A condition met only at epsilon 0, or never, maps to the log10 of the
    smallest / largest positive grid value.
    """
    eps = curve.epsilons
    pos = eps[eps > 0]
    lo, hi = math.log10(pos.min()), math.log10(pos.max())
    notes = []

    hit = eps[curve.H < IC_SETTLING]
    if hit.size == 0:
        eps_s = hi
        notes.append("eps_s: H never below settling threshold; set to grid maximum")
    elif hit.min() == 0.0:
        eps_s = lo
        notes.append("eps_s: settled at epsilon 0; set to grid minimum")
    else:
        eps_s = math.log10(hit.min())

    m0 = curve.M[eps == 0.0]
    m0 = float(m0[0]) if m0.size else float(curve.M[0])
    hit = eps[curve.M > IC_RATIO * m0]
    if hit.size == 0:
        eps_ratio = lo
        notes.append("eps_ratio: M(0) is zero; set to grid minimum")
    elif hit.max() == 0.0:
        eps_ratio = lo
        notes.append("eps_ratio: only epsilon 0 qualifies; set to grid minimum")
    else:
        eps_ratio = math.log10(hit.max())
    return eps_s, eps_ratio, notes


def feat_information_content(X, y, start_index: int = 0, epsilons=None):
    """``(eps_s, eps_ratio, curve, notes)`` from a nearest-neighbour tour."""
    X, y = _check_sample(X, y)
    if epsilons is None:
        epsilons = ic_epsilons()
    slopes, dropped = tour_slopes(X, y, start_index)
    curve = info_content_curve(slopes, epsilons, n_points=len(y))
    eps_s, eps_ratio, notes = ic_sensitivities(curve)
    if dropped:
        notes = [f"ic: {dropped} zero-length tour step(s) excluded"] + notes
    return eps_s, eps_ratio, curve, notes


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureSettings:
    """Knobs that change feature values; recorded alongside every dataset."""

    pca_include_y: bool = True
    ic_count: int = 1000
    ic_lo_exp: float = -5.0
    ic_hi_exp: float = 15.0
    ic_start: int = 0
    disp_fraction: float = 0.02

    def epsilons(self) -> np.ndarray:
        return ic_epsilons(self.ic_count, self.ic_lo_exp, self.ic_hi_exp)


def compute_feature_vector(X, y, meta: FeatureMeta,
                           settings: FeatureSettings = FeatureSettings()) -> FeatureVector:
    X, y = _check_sample(X, y)
    n, d = X.shape
    if n < 2 * d + 2:
        raise ValueError(f"sample needs at least 2d+2 = {2 * d + 2} rows, got {n}")
    values: dict = {}
    notes: list = []

    def guarded(name, fn, *args, **kw):
        try:
            return fn(*args, **kw)
        except FeatureError:
            raise
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise FeatureError(name, str(exc)) from exc

    values["disp"] = guarded("disp", feat_dispersion, X, y, settings.disp_fraction)
    values["skew"], degenerate = guarded("skew", feat_skewness, y)
    if degenerate:
        notes.append("skew: zero variance; set to 0")
    values["lr2"], values["int"], values["max"] = guarded("lr2", feat_linear, X, y)
    eps_s, eps_ratio, _, ic_notes = guarded(
        "eps_s", feat_information_content, X, y, settings.ic_start, settings.epsilons())
    values["eps_s"], values["eps_ratio"] = eps_s, eps_ratio
    notes.extend(ic_notes)
    values["nbc"], degenerate = guarded("nbc", feat_nbc, X, y)
    if degenerate:
        notes.append("nbc: zero variance in fitness or indegree; set to 0")
    values["pca"] = guarded("pca", feat_pca, X, y, settings.pca_include_y)
    values["qr2"] = guarded("qr2", feat_quadratic, X, y)
    return FeatureVector({k: float(values[k]) for k in FEATURE_NAMES}, meta, tuple(notes))
