"""Spherical random-feature and neural-tangent kernels and their spectra.

Sphere convention: ``S^d`` is the unit sphere in ``R^(d+1)`` (so degree-1
harmonics have dimension d+1); uniform samples are normalized Gaussians.

Spectrum convention.  For relu features drawn uniformly on the sphere, all
zonal objects diagonalize in spherical harmonics, and eigenvalues reduce to
one-dimensional Gegenbauer-weighted integrals of a profile (the classical
zonal-average identity).  Two related operators appear:

- the *first-order zonal operator* T with kernel ``s(x.y)`` (relu of the
  inner product); its degree-k eigenvalue is the Gegenbauer coefficient of
  the relu profile.
- the *random-feature integral operator* with kernel
  ``avg_w s(w.x) s(w.y)``; it equals T composed with itself, so its
  eigenvalues are the squares of T's.

The closed form

    lambda_k = (d-1)/(2 pi) * 2**-k * G(d/2) G(k-1) / (G(k/2) G((k+d+2)/2))

(``G`` the gamma function, k >= 2) tabulates the first-order convention:
``lambda_k = zonal_relu_scale(d) * eig_k(T)``.  The quadrature oracle
:func:`funk_hecke_eigenvalue` evaluates the same quantity independently
(Gauss-Jacobi instead of gamma functions) and is authoritative where the
two disagree: it vanishes identically for odd k >= 3, where the closed form
does not, and it carries a sign at some even degrees.  Degrees 0 and 1 sit
outside the closed form's validity and are always taken from the oracle.

``nystrom_spectrum`` discretizes the operator matching the tabulated
convention (the scaled first-order operator for the sphere kind), so its
plateau heights line up with ``exact_eigenvalue`` and plateau widths with
``multiplicity``.  Feature-space kernels (Gaussian random features, NTK,
Monte-Carlo customs) are positive semidefinite and are checked as such; the
first-order operator is symmetric but indefinite at the sign-flagged
degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import lgamma, pi
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

__all__ = [
    "KernelError",
    "UnsupportedDegreeError",
    "QuadratureError",
    "multiplicity",
    "exact_eigenvalue",
    "exact_eigenvalue_log",
    "gegenbauer_ratio",
    "funk_hecke_eigenvalue",
    "zonal_relu_scale",
    "arccos_kernel",
    "uniform_sphere_points",
    "KernelSpec",
    "mc_kernel",
    "GramResult",
    "ntk_gram",
    "NtkSandwich",
    "nystrom_spectrum",
    "DegreeEigenvalue",
    "KernelSpectrum",
    "exact_spectrum",
    "projection_tail_bound",
    "PROJECTION_COMPLEMENT_NORM",
]


class KernelError(ValueError):
    """Invalid kernel parameters or unusable spectra."""


class UnsupportedDegreeError(KernelError):
    """Closed-form eigenvalue requested outside its validity range (k < 2)."""


class QuadratureError(RuntimeError):
    """Quadrature refinement did not converge to the requested tolerance."""


#: Operator norm of the projection onto the orthogonal complement of any
#: closed eigenspace span (the companion constant to the tail bound).
PROJECTION_COMPLEMENT_NORM = 1.0


# ---------------------------------------------------------------------------
# Exact combinatorics and closed-form eigenvalues
# ---------------------------------------------------------------------------


def multiplicity(d: int, k: int) -> int:
    """Dimension N(d,k) of degree-k spherical harmonics on S^d, exactly.

    ``N(d,k) = (2k+d-1)/k * binom(k+d-2, d-1)`` for k >= 1 and N(d,0) = 1.
    Computed in exact rational arithmetic (arbitrary precision).
    """
    if d < 1 or k < 0:
        raise KernelError(f"need d >= 1 and k >= 0, got d={d}, k={k}")
    if k == 0:
        return 1
    val = Fraction(2 * k + d - 1, k) * math.comb(k + d - 2, d - 1)
    if val.denominator != 1:
        raise KernelError(f"multiplicity N({d},{k}) did not reduce to an integer")
    return int(val)


def exact_eigenvalue_log(d: int, k: int) -> float:
    """Natural log of the closed-form degree-k eigenvalue (k >= 2)."""
    if d < 1:
        raise KernelError(f"need d >= 1, got {d}")
    if k < 2:
        raise UnsupportedDegreeError(
            f"closed form is valid for k >= 2 only, got k={k}; use the quadrature oracle")
    if d == 1:
        return -math.inf  # the (d-1) prefactor vanishes on the circle
    return (math.log(d - 1) - math.log(2 * pi) - k * math.log(2.0)
            + lgamma(d / 2) + lgamma(k - 1) - lgamma(k / 2) - lgamma((k + d + 2) / 2))


def exact_eigenvalue(d: int, k: int) -> float:
    """Closed-form degree-k eigenvalue, evaluated through log-gamma.

    Values whose logs fall below the float range are reported as 0.0; use
    :func:`exact_eigenvalue_log` when the magnitude itself matters.
    """
    lg = exact_eigenvalue_log(d, k)
    if lg < math.log(1e-300):
        return 0.0
    return math.exp(lg)


def zonal_relu_scale(d: int) -> float:
    """Scale ``G(d/2) / (sqrt(pi) G((d-1)/2))`` relating the tabulated
    eigenvalues to the raw zonal-average spectrum (equals 1/pi at d=2)."""
    if d < 2:
        raise KernelError("zonal scale defined for d >= 2")
    return math.exp(lgamma(d / 2) - 0.5 * math.log(pi) - lgamma((d - 1) / 2))


# ---------------------------------------------------------------------------
# Funk-Hecke quadrature oracle
# ---------------------------------------------------------------------------


def gegenbauer_ratio(d: int, k: int, t) -> np.ndarray:
    """Normalized zonal polynomial ``C_k^{(d-1)/2}(t) / C_k^{(d-1)/2}(1)``.

    The d=1 limit degenerates to the Chebyshev polynomial of degree k.
    """
    t = np.asarray(t, dtype=float)
    if k == 0:
        return np.ones_like(t)
    if d == 1:
        return special.eval_chebyt(k, t)
    nu = (d - 1) / 2.0
    return special.eval_gegenbauer(k, nu, t) / special.eval_gegenbauer(k, nu, 1.0)


def _relu_profile_integral(d: int, k: int, npts: int) -> float:
    """``int_0^1 t G_k(t) (1-t^2)^((d-2)/2) dt`` by Gauss-Jacobi.

    On [0,1] only the (1-t) factor of the weight is singular; it is absorbed
    into a Jacobi weight so the rule converges geometrically (and is exact
    for even d, where the remaining integrand is polynomial).
    """
    alpha = (d - 2) / 2.0
    x, w = special.roots_jacobi(npts, alpha, 0.0)
    t = (x + 1.0) / 2.0
    vals = t * gegenbauer_ratio(d, k, t) * (1.0 + t) ** alpha
    return float(0.5 ** (alpha + 1.0) * np.dot(w, vals))


def _kernel_profile_integral(d: int, k: int, profile, npts: int) -> float:
    """``int_{-1}^1 prof(t) G_k(t) (1-t^2)^((d-2)/2) dt`` for smooth profiles."""
    alpha = (d - 2) / 2.0
    x, w = special.roots_jacobi(npts, alpha, alpha)
    vals = np.asarray(profile(x), dtype=float) * gegenbauer_ratio(d, k, x)
    return float(np.dot(w, vals))


def funk_hecke_eigenvalue(d: int, k: int, quadrature_points: int = 200,
                          profile: Optional[Callable] = None,
                          profile_kind: str = "activation",
                          rel_tol: float = 1e-6) -> float:
    """Degree-k eigenvalue by one-dimensional Gegenbauer-weighted quadrature.

    With the default relu activation profile this reproduces the tabulated
    convention ``(d-1)/(2 pi) * integral`` (signed).  With
    ``profile_kind="kernel"`` the given zonal kernel profile is integrated
    against the surface-ratio prefactor, yielding the eigenvalue of the
    corresponding integral operator on the uniformly-measured sphere.

    Two refinement levels are compared; disagreement beyond ``rel_tol``
    relative raises :class:`QuadratureError` rather than returning a silent
    wrong digit.
    """
    if d < 1 or k < 0:
        raise KernelError(f"need d >= 1 and k >= 0, got d={d}, k={k}")
    if quadrature_points < 64:
        raise KernelError("quadrature_points must be >= 64")

    if profile_kind == "activation":
        if profile is not None:
            raise KernelError("custom profiles use profile_kind='kernel'")
        pref = (d - 1) / (2.0 * pi)
        coarse = pref * _relu_profile_integral(d, k, quadrature_points)
        fine = pref * _relu_profile_integral(d, k, 2 * quadrature_points)
    elif profile_kind == "kernel":
        if profile is None:
            raise KernelError("profile_kind='kernel' needs a profile callable")
        # int (1-t^2)^((d-2)/2) dt = sqrt(pi) G(d/2) / G((d+1)/2), the
        # surface ratio |S^(d-1)|/|S^d| is its reciprocal
        pref = math.exp(lgamma((d + 1) / 2) - 0.5 * math.log(pi) - lgamma(d / 2))
        coarse = pref * _kernel_profile_integral(d, k, profile, quadrature_points)
        fine = pref * _kernel_profile_integral(d, k, profile, 2 * quadrature_points)
    else:
        raise KernelError(f"unknown profile_kind {profile_kind!r}")

    scale = max(abs(fine), abs(coarse))
    if scale > 1e-13 and abs(fine - coarse) > rel_tol * scale:
        raise QuadratureError(
            f"quadrature for (d={d}, k={k}) did not converge: {coarse} vs {fine}")
    return fine


# ---------------------------------------------------------------------------
# Kernels: closed form, Monte-Carlo features, Gram matrices
# ---------------------------------------------------------------------------


def arccos_kernel(phi: float) -> float:
    """Angle form of the relu random-feature kernel for rotationally
    symmetric weights: ``((pi - phi)/pi) cos(phi) + sin(phi)/pi``.

    Normalized to 1 at phi=0; independent of the ambient dimension.
    """
    if not -1e-12 <= phi <= pi + 1e-12:
        raise KernelError(f"angle must lie in [0, pi], got {phi}")
    phi = min(max(phi, 0.0), pi)
    return (pi - phi) / pi * math.cos(phi) + math.sin(phi) / pi


def uniform_sphere_points(n: int, d: int, rng) -> np.ndarray:
    """n uniform points on S^d (unit vectors in R^(d+1))."""
    pts = rng.standard_normal((n, d + 1))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family selector.

    kinds:
      - ``random_feature_relu_sphere``: inputs on S^d in R^(d+1), weights
        uniform on the same sphere, no bias.  Spectrum tables and Nystrom
        use the matching first-order zonal operator.
      - ``random_feature_relu_gaussian``: inputs in R^d, weights Gaussian
        with variance 2 (so unit inputs reproduce :func:`arccos_kernel`),
        no bias.
      - ``ntk_relu``: tangent kernel of ``a s(w.x + b)`` at symmetric
        ``|a| = a0`` and unit ``(w, b)``.
      - ``custom_mc``: user feature sampler ``sampler(rng, m) -> (W, b)``
        with an activation callable.
    """

    kind: str
    d: int
    a0: Optional[float] = None
    sampler: Optional[Callable] = field(default=None, compare=False)
    activation: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        kinds = ("random_feature_relu_sphere", "random_feature_relu_gaussian",
                 "ntk_relu", "custom_mc")
        if self.kind not in kinds:
            raise KernelError(f"kind must be one of {kinds}, got {self.kind!r}")
        if self.d < 1:
            raise KernelError("d must be >= 1")
        if self.kind == "ntk_relu" and (self.a0 is None or self.a0 <= 0):
            raise KernelError("ntk_relu needs a positive a0")
        if self.kind == "custom_mc" and self.sampler is None:
            raise KernelError("custom_mc needs a sampler")


def _relu(z):
    return np.maximum(z, 0.0)


def _feature_matrix(spec: KernelSpec, X: np.ndarray, samples: int, rng):
    """Feature activations (n_points, samples) plus the raw parameter draws."""
    if spec.kind == "random_feature_relu_sphere":
        W = uniform_sphere_points(samples, spec.d, rng)
        if X.shape[1] != spec.d + 1:
            raise KernelError(f"sphere kind expects points in R^{spec.d + 1}")
        return _relu(X @ W.T), (W, None)
    if spec.kind == "random_feature_relu_gaussian":
        W = math.sqrt(2.0) * rng.standard_normal((samples, X.shape[1]))
        return _relu(X @ W.T), (W, None)
    if spec.kind == "custom_mc":
        W, b = spec.sampler(rng, samples)
        act = spec.activation if spec.activation is not None else _relu
        return act(X @ np.asarray(W).T + (0.0 if b is None else np.asarray(b))), (W, b)
    raise KernelError(f"no plain feature map for kind {spec.kind!r}")


def mc_kernel(spec: KernelSpec, x, y, samples: int = 10_000,
              seed: int = 0) -> Tuple[float, float]:
    """Unbiased Monte-Carlo kernel value with its standard error.

    The same parameter draw is used for both arguments, so estimates at
    (x, y) and (y, x) under one seed coincide exactly.
    """
    if samples < 100:
        raise KernelError("samples must be >= 100")
    x = np.atleast_1d(np.asarray(x, float))
    y = np.atleast_1d(np.asarray(y, float))
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    X = np.vstack([x, y])
    if spec.kind == "ntk_relu":
        prods = _ntk_gram_matrix(X, spec.a0, samples, rng, return_products=True)
    else:
        feats, _ = _feature_matrix(spec, X, samples, rng)
        prods = feats[0] * feats[1]
    est = float(prods.mean())
    se = float(prods.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return est, se


@dataclass
class GramResult:
    matrix: np.ndarray
    eigenvalues: np.ndarray  # nonincreasing
    points: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def psd_floor(self) -> float:
        """Most negative eigenvalue, to compare against -1e-8 * trace."""
        return float(self.eigenvalues[-1])


def _gram_result(K: np.ndarray, points: np.ndarray) -> GramResult:
    K = 0.5 * (K + K.T)
    ev = np.linalg.eigvalsh(K)[::-1]
    return GramResult(matrix=K, eigenvalues=ev, points=points)


def _ntk_features(X: np.ndarray, a0: float, samples: int, rng):
    d = X.shape[1]
    wb = uniform_sphere_points(samples, d, rng)     # unit (w, b) in R^(d+1)
    a = a0 * rng.choice([-1.0, 1.0], size=samples)
    pre = X @ wb[:, :d].T + wb[:, d]
    return pre, a


def _ntk_gram_matrix(X, a0, samples, rng, return_products=False):
    pre, a = _ntk_features(X, a0, samples, rng)
    feat = _relu(pre)
    dfeat = (pre > 0).astype(float)
    inner = X @ X.T + 1.0
    if return_products:
        # per-sample products for the two-point Monte-Carlo estimate
        rf = feat[0] * feat[1]
        grad = (a**2) * dfeat[0] * dfeat[1] * inner[0, 1]
        return rf + grad
    K_rf = feat @ feat.T / samples
    K_grad = ((dfeat * a**2) @ dfeat.T / samples) * inner
    return K_rf, K_rf + K_grad


@dataclass
class NtkSandwich:
    k_rf: GramResult
    k_ntk: GramResult
    a0: float
    lower_min: float            # min eig of K_ntk - K_rf
    stated_upper_min: float     # min eig of (1+a0^2) K_rf - K_ntk
    reversed_upper_min: float   # min eig of K_ntk - (1+a0^2) K_rf
    offending_vector: Optional[np.ndarray]

    def tolerance(self) -> float:
        return -1e-8 * self.k_ntk.trace

    @property
    def lower_ok(self) -> bool:
        return self.lower_min >= self.tolerance()

    @property
    def stated_upper_ok(self) -> bool:
        return self.stated_upper_min >= self.tolerance()

    @property
    def reversed_upper_ok(self) -> bool:
        return self.reversed_upper_min >= self.tolerance()


def ntk_gram(points, a0: float, param_samples: int = 8192, seed: int = 0) -> NtkSandwich:
    """Tangent and random-feature Gram matrices from one parameter sample.

    Parameters are drawn with ``|a| = a0`` and unit ``(w, b)``.  The report
    carries both orderings of the comparison with ``(1+a0^2) K_rf``: the
    difference ``K_ntk - K_rf`` is positive semidefinite by construction,
    and under the unit-parameter hypothesis the gradient term dominates
    ``a0^2 K_rf`` (Cauchy-Schwarz against the unit parameter vector plus
    1-homogeneity), making ``K_ntk - (1+a0^2) K_rf`` positive semidefinite
    as well.  The opposite ordering is evaluated and reported, not assumed.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise KernelError("points must be a (n, d) array")
    if a0 <= 0:
        raise KernelError("a0 must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    K_rf, K_ntk = _ntk_gram_matrix(X, a0, param_samples, rng)
    rf, ntk = _gram_result(K_rf, X), _gram_result(K_ntk, X)
    lower_evals, lower_vecs = np.linalg.eigh(K_ntk - K_rf)
    stated = np.linalg.eigvalsh((1 + a0**2) * K_rf - K_ntk)
    reversed_ = np.linalg.eigvalsh(K_ntk - (1 + a0**2) * K_rf)
    tol = -1e-8 * ntk.trace
    offending = None
    if lower_evals[0] < tol:
        offending = lower_vecs[:, 0]
    return NtkSandwich(k_rf=rf, k_ntk=ntk, a0=float(a0),
                       lower_min=float(lower_evals[0]),
                       stated_upper_min=float(stated[0]),
                       reversed_upper_min=float(reversed_[0]),
                       offending_vector=offending)


MAX_NYSTROM_POINTS = 5000


def nystrom_spectrum(spec: KernelSpec, n: int, seed: int = 0,
                     mc_samples: int = 8192) -> np.ndarray:
    """Nonincreasing eigenvalues of Gram/n on n uniform sphere samples.

    For the sphere random-feature kind the Gram realizes the scaled
    first-order zonal operator (closed form ``zonal_relu_scale(d) *
    relu(x.y)``), whose spectrum the eigenvalue tables follow; its top
    eigenvalues form plateaus of width ``multiplicity(d, k)``.  Other kinds
    build their (positive semidefinite) feature kernels by Monte-Carlo.
    """
    if n < 1 or n > MAX_NYSTROM_POINTS:
        raise KernelError(f"n must lie in [1, {MAX_NYSTROM_POINTS}]")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    if spec.kind == "random_feature_relu_sphere":
        # points on S^d in R^(d+1), matching the spectrum tables
        X = uniform_sphere_points(n, spec.d, rng)
        scale = zonal_relu_scale(spec.d) if spec.d >= 2 else 1.0
        K = scale * _relu(X @ X.T)
    elif spec.kind == "ntk_relu":
        # unit inputs in R^d; the bias coordinate is appended internally
        X = uniform_sphere_points(n, spec.d - 1, rng)
        _, K = _ntk_gram_matrix(X, spec.a0, mc_samples, rng)
    else:
        X = uniform_sphere_points(n, spec.d - 1, rng)
        feats, _ = _feature_matrix(spec, X, mc_samples, rng)
        K = feats @ feats.T / mc_samples
    return _gram_result(K / n, X).eigenvalues


# ---------------------------------------------------------------------------
# Assembled spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeEigenvalue:
    k: int
    value: float       # oracle-arbitrated, signed
    mult: int


@dataclass
class KernelSpectrum:
    """Eigenvalues per harmonic degree plus the flattened repeated sequence.

    ``flags`` records degrees where the closed form and the quadrature
    oracle disagree (odd degrees where the oracle vanishes, sign flips at
    even degrees); the stored value is always the oracle's, never an
    average of the two.
    """

    d: int
    degrees: List[DegreeEigenvalue]
    flags: Dict[int, dict]

    def mu(self) -> np.ndarray:
        """Eigenvalues repeated with multiplicity, sorted nonincreasing."""
        reps = np.concatenate([
            np.full(entry.mult, entry.value) for entry in self.degrees
        ]) if self.degrees else np.zeros(0)
        return np.sort(reps)[::-1]

    def trace_sum(self) -> float:
        return float(sum(e.mult * e.value for e in self.degrees))

    def degree_values(self) -> Dict[int, float]:
        return {e.k: e.value for e in self.degrees}


_ORACLE_ZERO_TOL = 1e-12


def exact_spectrum(d: int, max_degree: int, quadrature_points: int = 200) -> KernelSpectrum:
    """Spectrum for degrees 0..max_degree in the first-order convention.

    Degrees 0 and 1 come from the quadrature oracle (outside the closed
    form's range).  At k >= 2 the closed form is evaluated as written and
    the oracle arbitrates: oracle-zero degrees store 0 and are flagged with
    both values; sign disagreements store the signed oracle value and are
    flagged; magnitude disagreements beyond 1e-6 relative are flagged, with
    the oracle value stored.
    """
    if d < 2:
        raise KernelError("spectra are tabulated for d >= 2")
    degrees: List[DegreeEigenvalue] = []
    flags: Dict[int, dict] = {}
    for k in range(max_degree + 1):
        oracle = funk_hecke_eigenvalue(d, k, quadrature_points)
        if k < 2:
            value = oracle
        else:
            formula = exact_eigenvalue(d, k)
            if abs(oracle) <= _ORACLE_ZERO_TOL and formula > _ORACLE_ZERO_TOL:
                value = 0.0
                flags[k] = {"formula": formula, "oracle": oracle, "reason": "oracle_zero"}
            elif not math.isclose(abs(oracle), formula, rel_tol=1e-6, abs_tol=1e-300):
                value = oracle
                flags[k] = {"formula": formula, "oracle": oracle, "reason": "magnitude"}
            elif oracle < 0:
                value = oracle
                flags[k] = {"formula": formula, "oracle": oracle, "reason": "sign"}
            else:
                value = formula
        degrees.append(DegreeEigenvalue(k=k, value=value, mult=multiplicity(d, k)))
    return KernelSpectrum(d=d, degrees=degrees, flags=flags)


def projection_tail_bound(spectrum: KernelSpectrum, n: int) -> float:
    """Tail bound ``1 / sqrt(mu_(n+1))`` in the flattened indexing.

    ``mu_(n+1)`` is the (n+1)-th largest eigenvalue counted with
    multiplicity.  Pairs with the complement-projection norm
    :data:`PROJECTION_COMPLEMENT_NORM`.
    """
    mu = spectrum.mu()
    if not 0 <= n < mu.size:
        raise KernelError(f"n+1 = {n + 1} exceeds the computed spectrum length {mu.size}")
    val = mu[n]
    if val <= 0:
        raise KernelError(f"mu_(n+1) = {val} is not positive; tail bound undefined")
    return 1.0 / math.sqrt(val)
