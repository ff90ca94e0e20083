"""The 24 noiseless BBOB functions with deterministic instance generation.

Function definitions follow the COCO/BBOB noiseless definitions (Hansen et al.,
2009). Instance parameters do not reproduce COCO's internal generator: every
randomized quantity is drawn from a numpy ``PCG64`` stream seeded by
``(function_id, instance_id, dimension, component)``, so instances are a pure
function of their id.

All evaluators are vectorized over rows: ``X`` has shape ``(n, d)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "ProblemId",
    "ProblemInstance",
    "make_instance",
    "evaluate",
    "t_osz",
    "t_asy",
    "lambda_alpha",
    "f_pen",
    "FUNCTION_NAMES",
    "MIN_DIM",
    "MAX_DIM",
]

MIN_DIM = 2
MAX_DIM = 40

FUNCTION_NAMES = {
    1: "sphere",
    2: "ellipsoidal",
    3: "rastrigin",
    4: "bueche_rastrigin",
    5: "linear_slope",
    6: "attractive_sector",
    7: "step_ellipsoidal",
    8: "rosenbrock",
    9: "rosenbrock_rotated",
    10: "ellipsoidal_rotated",
    11: "discus",
    12: "bent_cigar",
    13: "sharp_ridge",
    14: "different_powers",
    15: "rastrigin_rotated",
    16: "weierstrass",
    17: "schaffers_f7",
    18: "schaffers_f7_ill",
    19: "griewank_rosenbrock",
    20: "schwefel",
    21: "gallagher_101",
    22: "gallagher_21",
    23: "katsuura",
    24: "lunacek_bi_rastrigin",
}


class ProblemId(NamedTuple):
    function_id: int
    instance_id: int
    dimension: int

    def validate(self) -> "ProblemId":
        if not 1 <= int(self.function_id) <= 24:
            raise ValueError(f"function_id must be in 1..24, got {self.function_id}")
        if int(self.instance_id) < 1:
            raise ValueError(f"instance_id must be >= 1, got {self.instance_id}")
        if not MIN_DIM <= int(self.dimension) <= MAX_DIM:
            raise ValueError(
                f"dimension must be in {MIN_DIM}..{MAX_DIM}, got {self.dimension}"
            )
        return self


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """One transformed BBOB problem. Arrays are read-only."""

    id: ProblemId
    x_opt: np.ndarray
    f_opt: float
    R: np.ndarray
    Q: np.ndarray
    aux: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.id.dimension

    def __call__(self, x):
        return evaluate(self, x)


# ---------------------------------------------------------------------------
# transformations


def t_osz(x):
    """Oscillation transform, elementwise. ``t_osz(0) == 0``."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    xhat = np.log(ax, out=np.zeros_like(x), where=ax > 0)
    pos = x > 0
    c1 = np.where(pos, 10.0, 5.5)
    c2 = np.where(pos, 7.9, 3.1)
    return np.sign(x) * np.exp(xhat + 0.049 * (np.sin(c1 * xhat) + np.sin(c2 * xhat)))


def t_asy(x, beta: float):
    """Asymmetric transform on the last axis; non-positive entries pass through."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    ramp = np.linspace(0.0, 1.0, d) if d > 1 else np.zeros(1)
    pos = x > 0
    xp = np.where(pos, x, 0.0)
    out = np.where(pos, xp ** (1.0 + beta * ramp * np.sqrt(xp)), x)
    return out


def lambda_alpha(alpha: float, d: int) -> np.ndarray:
    """Diagonal matrix with entries ``alpha ** ((i - 1) / (2 (d - 1)))``."""
    return np.diag(_lambda_diag(alpha, d))


def _lambda_diag(alpha: float, d: int) -> np.ndarray:
    if d == 1:
        return np.ones(1)
    return alpha ** (0.5 * np.arange(d) / (d - 1))


def f_pen(x):
    """Boundary penalty ``sum(max(0, |x_i| - 5)^2)`` over the last axis."""
    x = np.asarray(x, dtype=float)
    return np.sum(np.maximum(0.0, np.abs(x) - 5.0) ** 2, axis=-1)


def _ramp(d: int) -> np.ndarray:
    # (i - 1) / (d - 1) for i = 1..d
    return np.arange(d) / (d - 1)


# ---------------------------------------------------------------------------
# instance generation

_STREAM_FOPT, _STREAM_XOPT, _STREAM_R, _STREAM_Q, _STREAM_SIGNS, _STREAM_AUX = range(6)


def _rng(pid: ProblemId, component: int) -> np.random.Generator:
    seq = np.random.SeedSequence(
        [int(pid.function_id), int(pid.instance_id), int(pid.dimension), component]
    )
    return np.random.Generator(np.random.PCG64(seq))


def _gram_schmidt(a: np.ndarray) -> np.ndarray:
    """Orthonormalize the rows of ``a`` (classical Gram-Schmidt, re-orthogonalized)."""
    b = np.array(a, dtype=float)
    for i in range(b.shape[0]):
        for _ in range(2):
            for j in range(i):
                b[i] -= np.dot(b[i], b[j]) * b[j]
        b[i] /= np.linalg.norm(b[i])
    return b


def _rotation(pid: ProblemId, component: int) -> np.ndarray:
    d = pid.dimension
    return _gram_schmidt(_rng(pid, component).standard_normal((d, d)))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _gallagher_aux(pid: ProblemId, R: np.ndarray, n_peaks: int, top_alpha: float,
                   spread: float) -> dict:
    d = pid.dimension
    rng = _rng(pid, _STREAM_AUX)
    alphas = 1000.0 ** (2.0 * np.arange(n_peaks - 1) / (n_peaks - 2))
    alphas = np.concatenate([[top_alpha], rng.permutation(alphas)])
    diag = np.empty((n_peaks, d))
    for i, a in enumerate(alphas):
        diag[i] = rng.permutation(_lambda_diag(a, d) / a ** 0.25)
    weights = np.concatenate([[10.0], 1.1 + 8.0 * np.arange(n_peaks - 1) / (n_peaks - 2)])
    peaks = rng.uniform(-spread, spread, size=(n_peaks, d))
    peaks[0] = np.round(0.8 * peaks[0], 4)
    return {
        "peaks": _readonly(peaks),
        "peak_weights": _readonly(weights),
        "peak_scales": _readonly(diag),
        "peak_rot": _readonly(peaks @ R.T),
    }


def make_instance(pid) -> ProblemInstance:
    """Build the deterministic instance ``(function_id, instance_id, dimension)``."""
    pid = ProblemId(*(int(v) for v in pid)).validate()
    fid, d = pid.function_id, pid.dimension

    f_opt = float(np.clip(np.round(100.0 * _rng(pid, _STREAM_FOPT).standard_cauchy(), 2),
                          -1000.0, 1000.0))
    x_opt = np.round(_rng(pid, _STREAM_XOPT).uniform(-4.0, 4.0, size=d), 2)
    R = _rotation(pid, _STREAM_R)
    Q = _rotation(pid, _STREAM_Q)
    signs = _rng(pid, _STREAM_SIGNS).choice([-1.0, 1.0], size=d)
    aux: dict = {}

    if fid == 4:
        x_opt[0::2] = np.abs(x_opt[0::2])
    elif fid == 5:
        x_opt = 5.0 * signs
    elif fid == 8:
        x_opt = 0.75 * x_opt
    elif fid in (9, 19):
        scale = max(1.0, np.sqrt(d) / 8.0)
        x_opt = R.T @ np.full(d, 0.5) / scale
    elif fid == 20:
        x_opt = 0.5 * 4.2096874633 * signs
    elif fid == 21:
        aux = _gallagher_aux(pid, R, 101, 1000.0, 5.0)
        x_opt = aux["peaks"][0].copy()
    elif fid == 22:
        aux = _gallagher_aux(pid, R, 21, 1000.0 ** 2, 4.9)
        x_opt = aux["peaks"][0].copy()
    elif fid == 24:
        x_opt = 0.5 * 2.5 * signs

    if fid in (5, 20, 24):
        aux = {"signs": _readonly(signs)}

    return ProblemInstance(pid, _readonly(x_opt), f_opt, _readonly(R), _readonly(Q), aux)


# ---------------------------------------------------------------------------
# base functions; each takes (inst, X[n, d]) and returns f(X) - f_opt


def _f1(p, X):
    return np.sum((X - p.x_opt) ** 2, axis=1)


def _f2(p, X):
    z = t_osz(X - p.x_opt)
    return (z ** 2) @ (1e6 ** _ramp(X.shape[1]))


def _rastrigin(z):
    d = z.shape[1]
    return 10.0 * (d - np.sum(np.cos(2 * np.pi * z), axis=1)) + np.sum(z ** 2, axis=1)


def _f3(p, X):
    d = X.shape[1]
    z = _lambda_diag(10.0, d) * t_asy(t_osz(X - p.x_opt), 0.2)
    return _rastrigin(z)


def _f4(p, X):
    d = X.shape[1]
    z = t_osz(X - p.x_opt)
    s = np.broadcast_to(_lambda_diag(10.0, d), z.shape).copy()
    odd = np.zeros(d, dtype=bool)
    odd[0::2] = True  # 1-based odd indices
    boost = (z > 0) & odd
    s[boost] *= 10.0
    return _rastrigin(s * z) + 100.0 * f_pen(X)


def _f5(p, X):
    d = X.shape[1]
    s = p.aux["signs"] * 10.0 ** _ramp(d)
    z = np.where(p.x_opt * X < 25.0, X, p.x_opt)
    return np.sum(5.0 * np.abs(s) - s * z, axis=1)


def _f6(p, X):
    d = X.shape[1]
    z = ((X - p.x_opt) @ p.R.T * _lambda_diag(10.0, d)) @ p.Q.T
    s = np.where(z * p.x_opt > 0, 100.0, 1.0)
    return t_osz(np.sum((s * z) ** 2, axis=1)) ** 0.9


def _f7(p, X):
    d = X.shape[1]
    zhat = (X - p.x_opt) @ p.R.T * _lambda_diag(10.0, d)
    ztil = np.where(np.abs(zhat) > 0.5, np.floor(0.5 + zhat), np.floor(0.5 + 10.0 * zhat) / 10.0)
    z = ztil @ p.Q.T
    core = 0.1 * np.maximum(np.abs(zhat[:, 0]) / 1e4, (z ** 2) @ (100.0 ** _ramp(d)))
    return core + f_pen(X)


def _rosenbrock(z):
    return np.sum(100.0 * (z[:, :-1] ** 2 - z[:, 1:]) ** 2 + (z[:, :-1] - 1.0) ** 2, axis=1)


def _f8(p, X):
    d = X.shape[1]
    z = max(1.0, np.sqrt(d) / 8.0) * (X - p.x_opt) + 1.0
    return _rosenbrock(z)


def _f9(p, X):
    d = X.shape[1]
    z = max(1.0, np.sqrt(d) / 8.0) * (X @ p.R.T) + 0.5
    return _rosenbrock(z)


def _f10(p, X):
    z = t_osz((X - p.x_opt) @ p.R.T)
    return (z ** 2) @ (1e6 ** _ramp(X.shape[1]))


def _f11(p, X):
    z = t_osz((X - p.x_opt) @ p.R.T)
    return 1e6 * z[:, 0] ** 2 + np.sum(z[:, 1:] ** 2, axis=1)


def _f12(p, X):
    z = t_asy((X - p.x_opt) @ p.R.T, 0.5) @ p.R.T
    return z[:, 0] ** 2 + 1e6 * np.sum(z[:, 1:] ** 2, axis=1)


def _f13(p, X):
    d = X.shape[1]
    z = ((X - p.x_opt) @ p.R.T * _lambda_diag(10.0, d)) @ p.Q.T
    return z[:, 0] ** 2 + 100.0 * np.sqrt(np.sum(z[:, 1:] ** 2, axis=1))


def _f14(p, X):
    d = X.shape[1]
    z = (X - p.x_opt) @ p.R.T
    return np.sqrt(np.sum(np.abs(z) ** (2.0 + 4.0 * _ramp(d)), axis=1))


def _f15(p, X):
    d = X.shape[1]
    u = t_asy(t_osz((X - p.x_opt) @ p.R.T), 0.2)
    z = (u @ p.Q.T * _lambda_diag(10.0, d)) @ p.R.T
    return _rastrigin(z)


_W_K = np.arange(12)
_W_A = 0.5 ** _W_K
_W_B = 3.0 ** _W_K
_W_F0 = float(np.sum(_W_A * np.cos(np.pi * _W_B)))


def _f16(p, X):
    d = X.shape[1]
    u = t_osz((X - p.x_opt) @ p.R.T)
    z = (u @ p.Q.T * _lambda_diag(0.01, d)) @ p.R.T
    s = np.cos(2 * np.pi * _W_B * (z[..., None] + 0.5)) @ _W_A
    return 10.0 * (np.sum(s, axis=1) / d - _W_F0) ** 3 + 10.0 / d * f_pen(X)


def _schaffers(p, X, cond):
    d = X.shape[1]
    u = t_asy((X - p.x_opt) @ p.R.T, 0.5)
    z = (u @ p.Q.T) * _lambda_diag(cond, d)
    s = np.sqrt(z[:, :-1] ** 2 + z[:, 1:] ** 2)
    inner = np.sqrt(s) + np.sqrt(s) * np.sin(50.0 * s ** 0.2) ** 2
    return np.mean(inner, axis=1) ** 2 + 10.0 * f_pen(X)


def _f17(p, X):
    return _schaffers(p, X, 10.0)


def _f18(p, X):
    return _schaffers(p, X, 1000.0)


def _f19(p, X):
    d = X.shape[1]
    z = max(1.0, np.sqrt(d) / 8.0) * (X @ p.R.T) + 0.5
    s = 100.0 * (z[:, :-1] ** 2 - z[:, 1:]) ** 2 + (z[:, :-1] - 1.0) ** 2
    return 10.0 / (d - 1) * np.sum(s / 4000.0 - np.cos(s), axis=1) + 10.0


def _f20(p, X):
    d = X.shape[1]
    two_abs = 2.0 * np.abs(p.x_opt)
    xhat = 2.0 * p.aux["signs"] * X
    zhat = xhat.copy()
    zhat[:, 1:] += 0.25 * (xhat[:, :-1] - two_abs[:-1])
    z = 100.0 * (_lambda_diag(10.0, d) * (zhat - two_abs) + two_abs)
    core = -np.sum(z * np.sin(np.sqrt(np.abs(z))), axis=1) / (100.0 * d) + 4.189828872724339
    return core + 100.0 * f_pen(z / 100.0)


def _gallagher(p, X):
    d = X.shape[1]
    a = p.aux
    xr = X @ p.R.T
    best = np.zeros(X.shape[0])
    for w, c, y in zip(a["peak_weights"], a["peak_scales"], a["peak_rot"]):
        q = ((xr - y) ** 2) @ c
        np.maximum(best, w * np.exp(-q / (2.0 * d)), out=best)
    return t_osz(10.0 - best) ** 2 + f_pen(X)


_K_POW = 2.0 ** np.arange(1, 33)


def _f23(p, X):
    d = X.shape[1]
    z = ((X - p.x_opt) @ p.R.T * _lambda_diag(100.0, d)) @ p.Q.T
    t = z[..., None] * _K_POW
    inner = np.sum(np.abs(t - np.round(t)) / _K_POW, axis=2)
    terms = (1.0 + np.arange(1, d + 1) * inner) ** (10.0 / d ** 1.2)
    return 10.0 / d ** 2 * np.prod(terms, axis=1) - 10.0 / d ** 2 + f_pen(X)


def _f24(p, X):
    d = X.shape[1]
    mu0 = 2.5
    s = 1.0 - 1.0 / (2.0 * np.sqrt(d + 20.0) - 8.2)
    mu1 = -np.sqrt((mu0 ** 2 - 1.0) / s)
    xhat = 2.0 * p.aux["signs"] * X
    z = ((xhat - mu0) @ p.R.T * _lambda_diag(100.0, d)) @ p.Q.T
    sph = np.minimum(np.sum((xhat - mu0) ** 2, axis=1), d + s * np.sum((xhat - mu1) ** 2, axis=1))
    return sph + 10.0 * (d - np.sum(np.cos(2 * np.pi * z), axis=1)) + 1e4 * f_pen(X)


_BASE: dict[int, Callable] = {
    1: _f1, 2: _f2, 3: _f3, 4: _f4, 5: _f5, 6: _f6, 7: _f7, 8: _f8,
    9: _f9, 10: _f10, 11: _f11, 12: _f12, 13: _f13, 14: _f14, 15: _f15, 16: _f16,
    17: _f17, 18: _f18, 19: _f19, 20: _f20, 21: _gallagher, 22: _gallagher, 23: _f23,
    24: _f24,
}


def evaluate(inst: ProblemInstance, x):
    """Evaluate ``inst`` at a point (shape ``(d,)``) or at rows of ``X`` (``(n, d)``).

    Returns a float for a single point and an ``(n,)`` array otherwise.
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X2 = np.atleast_2d(X)
    if X2.ndim != 2 or X2.shape[1] != inst.dimension:
        raise ValueError(
            f"expected points of dimension {inst.dimension}, got shape {X.shape}"
        )
    f = _BASE[inst.id.function_id](inst, X2) + inst.f_opt
    return float(f[0]) if single else f
