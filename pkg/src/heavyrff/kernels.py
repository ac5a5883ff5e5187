"""Exact evaluation of the five shift-invariant kernels.

Families: Gaussian e^{-||D||_M^2 / 2}, l1-Laplacian e^{-||D||_1},
Laplacian e^{-||D||_M}, Exponential-power e^{-||D||_M^alpha}, and the
Matern family built on the modified Bessel function of the second kind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.spatial.distance import cdist

from .multivariate import ShapeMatrix

__all__ = [
    "GAUSSIAN",
    "L1_LAPLACIAN",
    "LAPLACIAN",
    "EXP_POWER",
    "MATERN",
    "KernelSpec",
    "mahalanobis_norm",
    "bessel_k",
    "matern_profile",
    "kernel_profile",
    "kernel_eval",
    "kernel_matrix",
]

GAUSSIAN = "gaussian"
L1_LAPLACIAN = "l1_laplacian"
LAPLACIAN = "laplacian"
EXP_POWER = "exp_power"
MATERN = "matern"

FAMILIES = (GAUSSIAN, L1_LAPLACIAN, LAPLACIAN, EXP_POWER, MATERN)


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus exactly the parameters that family needs."""

    family: str
    shape: ShapeMatrix
    alpha: float | None = None  # exp_power only, in (0, 2]
    nu: float | None = None     # matern only, > 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == EXP_POWER:
            if self.alpha is None or not (0.0 < self.alpha <= 2.0):
                raise ValueError(f"exp_power needs alpha in (0, 2], got {self.alpha}")
        elif self.alpha is not None:
            raise ValueError(f"alpha is only valid for exp_power, not {self.family}")
        if self.family == MATERN:
            if self.nu is None or not self.nu > 0.0:
                raise ValueError(f"matern needs nu > 0, got {self.nu}")
        elif self.nu is not None:
            raise ValueError(f"nu is only valid for matern, not {self.family}")

    @property
    def dim(self) -> int:
        return self.shape.dim


def mahalanobis_norm(shape: ShapeMatrix, u: np.ndarray) -> float | np.ndarray:
    """sqrt(u^T M u), computed through the symmetric square root for stability."""
    return shape.norm(u)


def bessel_k(nu: float, x: float | np.ndarray) -> float | np.ndarray:
    """Modified Bessel function of the second kind K_nu(x) for x > 0.

    Evaluated through the exponentially scaled routine so that large
    arguments (x up to ~700) keep full relative accuracy instead of
    underflowing inside the unscaled evaluation.
    """
    if not nu > 0:
        raise ValueError(f"order must be positive, got {nu}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("bessel_k requires x > 0")
    out = special.kve(nu, x) * np.exp(-x)
    return float(out) if out.ndim == 0 else out


def _matern_bessel(nu: float, r: np.ndarray) -> np.ndarray:
    """General-nu Matern profile (2^{1-nu}/Gamma(nu)) t^nu K_nu(t), t = sqrt(2 nu) r."""
    t = np.sqrt(2.0 * nu) * r
    out = np.ones_like(t)
    pos = t > 0.0
    tp = t[pos]
    # log-space for the t^nu prefactor; kve keeps the e^{-t} decay separate
    log_pref = (1.0 - nu) * np.log(2.0) - special.gammaln(nu) + nu * np.log(tp)
    out[pos] = np.exp(log_pref - tp) * special.kve(nu, tp)
    return out


def _matern_closed(nu: float, r: np.ndarray) -> np.ndarray:
    if nu == 0.5:
        return np.exp(-r)
    if nu == 1.5:
        t = np.sqrt(3.0) * r
        return (1.0 + t) * np.exp(-t)
    if nu == 2.5:
        t = np.sqrt(5.0) * r
        return (1.0 + t + t * t / 3.0) * np.exp(-t)
    raise ValueError(f"no closed form for nu={nu}")


def matern_profile(nu: float, r: float | np.ndarray, method: str = "auto") -> float | np.ndarray:
    """Matern correlation as a function of the Mahalanobis distance r >= 0.

    ``method`` selects the closed forms (nu in {1/2, 3/2, 5/2}), the general
    Bessel path, or ``auto`` (closed form when available).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("distance must be non-negative")
    if method == "closed" or (method == "auto" and nu in (0.5, 1.5, 2.5)):
        out = _matern_closed(nu, r)
    elif method in ("auto", "bessel"):
        out = _matern_bessel(nu, r)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if out.ndim == 0 else out


def kernel_profile(spec: KernelSpec, r: float | np.ndarray) -> float | np.ndarray:
    """Kernel value as a function of the relevant distance.

    ``r`` is the Mahalanobis distance for all families except l1_laplacian,
    where it is the l1 distance.
    """
    r = np.asarray(r, dtype=float)
    if spec.family == GAUSSIAN:
        out = np.exp(-0.5 * r * r)
    elif spec.family in (LAPLACIAN, L1_LAPLACIAN):
        out = np.exp(-r)
    elif spec.family == EXP_POWER:
        out = np.exp(-(r ** spec.alpha))
    else:
        out = np.asarray(matern_profile(spec.nu, r))
    return float(out) if out.ndim == 0 else out


def kernel_eval(spec: KernelSpec, x: np.ndarray, z: np.ndarray) -> float:
    """Exact kernel value K(x, z)."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != z.shape or x.shape[-1] != spec.dim:
        raise ValueError(f"dimension mismatch: {x.shape} vs {z.shape}, d={spec.dim}")
    if not (np.isfinite(x).all() and np.isfinite(z).all()):
        raise ValueError("inputs must be finite")
    delta = x - z
    if spec.family == L1_LAPLACIAN:
        r = np.abs(delta).sum()
    else:
        r = spec.shape.norm(delta)
    return float(kernel_profile(spec, r))


def kernel_matrix(spec: KernelSpec, X: np.ndarray,
                  Z: np.ndarray | None = None) -> np.ndarray:
    """Dense kernel matrix with entries K(X_i, Z_j); Z defaults to X."""
    X = np.asarray(X, dtype=float)
    Z = X if Z is None else np.asarray(Z, dtype=float)
    if X.shape[1] != spec.dim or Z.shape[1] != spec.dim:
        raise ValueError(
            f"column counts {X.shape[1]}, {Z.shape[1]} must equal d={spec.dim}")
    if spec.family == L1_LAPLACIAN:
        R = cdist(X, Z, metric="cityblock")
    else:
        Xs = X @ spec.shape.sqrtM
        Zs = Xs if Z is X else Z @ spec.shape.sqrtM
        R = cdist(Xs, Zs, metric="euclidean")
    return kernel_profile(spec, R)
