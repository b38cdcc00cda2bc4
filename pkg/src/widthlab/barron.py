"""Finite two-layer networks and their complexity measures.

Data space is ``[-1,1]^d`` (or ``[0,1]^d``) with the sup norm; inner weights
are measured in the dual l1 norm throughout (``q=1``), with ``q=2``
available.  The path norm of a network ``f(x) = (1/m) sum a_i s(w_i.x+b_i)``
is ``(1/m) sum |a_i| (|w_i|_q + off(b_i))`` where the offset term is ``|b|``
for relu, ``1`` for bounded sigmoidal activations and ``|b|+1`` for general
unbounded Lipschitz activations.  The path norm is the complexity proxy that
drives every bound in this module:

- Rademacher complexity of the unit path-norm ball is estimated empirically
  (supremum over signed normalized single neurons, the extreme points of the
  ball) and compared against the closed form ``2 L sqrt(2 log(2d) / n)``.
- Functions with integrable ``|fhat(xi)| |xi|`` admit network representations;
  ``fourier_barron_bound`` evaluates that integral.
- On ``[0,1]`` the representation cost is equivalent to
  ``|f(0)| + |f'(0)| + total variation of f'``; ``bv_norm_1d`` computes it
  and ``canonical_network_1d`` materializes the witnessing network.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np
from scipy import integrate

__all__ = [
    "ActivationSpec",
    "TwoLayerNetwork",
    "path_norm",
    "lipschitz_bound",
    "rademacher_bound",
    "rademacher_estimate",
    "RademacherEstimate",
    "FourierData",
    "FourierBound",
    "fourier_barron_bound",
    "PiecewiseLinear1D",
    "bv_norm_1d",
    "canonical_network_1d",
    "relu_net_integral_1d",
    "sample_unit_path_norm_networks",
    "mc_integration_gap",
    "GapReport",
]


class OptimizationError(RuntimeError):
    """Raised when every restart of an inner optimizer produced junk."""


# ---------------------------------------------------------------------------
# Activations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ActivationSpec:
    """Activation with its Lipschitz constant and path-weight offset rule.

    ``kind`` is one of ``"relu"`` (positively 1-homogeneous, offset |b|) or
    ``"tanh"`` (bounded sigmoidal, offset 1).  Custom Lipschitz activations
    can be registered via :meth:`custom`; unbounded non-homogeneous ones get
    the generic offset ``|b| + 1``.
    """

    kind: str = "relu"
    lipschitz: float = 1.0
    _fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    _dfn: Optional[Callable] = field(default=None, compare=False, repr=False)
    bounded: bool = False

    @classmethod
    def relu(cls) -> "ActivationSpec":
        return cls(kind="relu", lipschitz=1.0)

    @classmethod
    def tanh(cls) -> "ActivationSpec":
        return cls(kind="tanh", lipschitz=1.0, bounded=True)

    @classmethod
    def custom(cls, name, fn, dfn, lipschitz, bounded=False) -> "ActivationSpec":
        return cls(kind=name, lipschitz=float(lipschitz), _fn=fn, _dfn=dfn, bounded=bounded)

    def apply(self, z):
        if self.kind == "relu":
            return np.maximum(z, 0.0)
        if self.kind == "tanh":
            return np.tanh(z)
        if self._fn is None:
            raise ValueError(f"unknown activation {self.kind!r}")
        return self._fn(z)

    def derivative(self, z):
        # relu derivative at 0 is taken as 0 (a measure-zero convention)
        if self.kind == "relu":
            return (np.asarray(z) > 0).astype(float)
        if self.kind == "tanh":
            return 1.0 - np.tanh(z) ** 2
        if self._dfn is None:
            raise ValueError(f"unknown activation {self.kind!r}")
        return self._dfn(z)

    def path_offset(self, b):
        """Contribution of the bias to the per-neuron path weight."""
        if self.kind == "relu":
            return np.abs(b)
        if self.bounded:
            return np.ones_like(np.asarray(b, dtype=float))
        return np.abs(b) + 1.0


RELU = ActivationSpec.relu()
TANH = ActivationSpec.tanh()


# ---------------------------------------------------------------------------
# Networks
# ---------------------------------------------------------------------------


@dataclass
class TwoLayerNetwork:
    """``f(x) = (1/m) sum_i a_i s(w_i . x + b_i)`` (the 1/m factor only when
    ``averaged``)."""

    outer: np.ndarray          # (m,)
    inner: np.ndarray          # (m, d)
    bias: np.ndarray           # (m,)
    activation: ActivationSpec = RELU
    averaged: bool = True

    def __post_init__(self):
        self.outer = np.atleast_1d(np.asarray(self.outer, dtype=float))
        self.inner = np.asarray(self.inner, dtype=float)
        if self.inner.ndim == 1:
            self.inner = self.inner.reshape(len(self.outer), -1)
        self.bias = np.atleast_1d(np.asarray(self.bias, dtype=float))
        if not (len(self.outer) == self.inner.shape[0] == len(self.bias)):
            raise ValueError("outer, inner, bias must agree on the number of neurons")

    @property
    def width(self) -> int:
        return len(self.outer)

    @property
    def dim(self) -> int:
        return self.inner.shape[1] if self.width else 0

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x.reshape(1, -1) if single else x
        if self.width == 0:
            out = np.zeros(X.shape[0])
        else:
            pre = X @ self.inner.T + self.bias
            out = self.activation.apply(pre) @ self.outer
            if self.averaged:
                out = out / self.width
        return float(out[0]) if single else out

    def scale_outer(self, factor: float) -> "TwoLayerNetwork":
        return TwoLayerNetwork(self.outer * factor, self.inner.copy(), self.bias.copy(),
                               self.activation, self.averaged)

    def concat(self, other: "TwoLayerNetwork") -> "TwoLayerNetwork":
        """Union of neuron lists realizing the sum of the two functions.

        For averaged networks the outer weights are rescaled by the width
        ratios so that evaluation adds exactly; the path norm then adds too.
        """
        if self.activation != other.activation or self.averaged != other.averaged:
            raise ValueError("can only concatenate networks with matching conventions")
        if self.width == 0:
            return other
        if other.width == 0:
            return self
        if self.averaged:
            m = self.width + other.width
            oa = self.outer * (m / self.width)
            ob = other.outer * (m / other.width)
        else:
            oa, ob = self.outer, other.outer
        return TwoLayerNetwork(
            np.concatenate([oa, ob]),
            np.vstack([self.inner, other.inner]),
            np.concatenate([self.bias, other.bias]),
            self.activation, self.averaged,
        )

    # wire format: {"activation": ..., "averaged": ..., "neurons": [[a, [w...], b], ...]}
    def to_dict(self) -> dict:
        return {
            "activation": self.activation.kind,
            "averaged": self.averaged,
            "neurons": [[float(a), [float(v) for v in w], float(b)]
                        for a, w, b in zip(self.outer, self.inner, self.bias)],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "TwoLayerNetwork":
        kind = payload.get("activation", "relu")
        act = {"relu": RELU, "tanh": TANH}.get(kind)
        if act is None:
            raise ValueError(f"unsupported activation in network payload: {kind!r}")
        neurons = payload["neurons"]
        if neurons:
            outer = np.array([n[0] for n in neurons], dtype=float)
            inner = np.array([n[1] for n in neurons], dtype=float)
            bias = np.array([n[2] for n in neurons], dtype=float)
        else:
            outer, inner, bias = np.zeros(0), np.zeros((0, 0)), np.zeros(0)
        return cls(outer, inner, bias, act, bool(payload.get("averaged", True)))


def path_norm(net: TwoLayerNetwork, q: int = 1) -> float:
    """``(1/m) sum |a_i| (|w_i|_q + off(b_i))``, the width-free complexity."""
    if q not in (1, 2):
        raise ValueError("q must be 1 or 2")
    if net.width == 0:
        return 0.0
    wnorm = np.abs(net.inner).sum(axis=1) if q == 1 else np.sqrt((net.inner**2).sum(axis=1))
    total = float(np.sum(np.abs(net.outer) * (wnorm + net.activation.path_offset(net.bias))))
    return total / net.width if net.averaged else total


def lipschitz_bound(net: TwoLayerNetwork, q: int = 1) -> float:
    """Upper bound on the Lipschitz constant w.r.t. the sup norm (q=1 duality)."""
    return net.activation.lipschitz * path_norm(net, q=q)


# ---------------------------------------------------------------------------
# Rademacher complexity of the unit path-norm ball
# ---------------------------------------------------------------------------


def rademacher_bound(n: int, d: int, lipschitz: float = 1.0) -> float:
    """Closed-form bound ``2 L sqrt(2 log(2d) / n)`` on signed empirical means
    over the unit path-norm ball, for samples inside [-1,1]^d."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    return 2.0 * lipschitz * math.sqrt(2.0 * math.log(2.0 * d) / n)


@dataclass
class RademacherEstimate:
    estimate: float            # average of the per-draw suprema
    bound: float               # closed-form bound
    draws: np.ndarray          # per-draw suprema
    n: int
    d: int
    seed: int

    @property
    def violations(self) -> int:
        return int(np.sum(self.draws > self.bound))


def _sup_relu_draw(X, xi, restarts, steps, rng):
    """max over normalized relu neurons +-s(w.x+b)/(|w|_1+|b|) of the signed
    empirical mean.

    Projected subgradient ascent on the l1 sphere of (w, b); the normalized
    objective is scale-free by positive homogeneity, so the projection is a
    radial rescale.
    """
    n, d = X.shape
    W = rng.standard_normal((restarts, d + 1))
    W /= np.abs(W).sum(axis=1, keepdims=True)
    # deterministic starts: the best vertex of the l1 ball for the linear
    # relaxation sup_{|w|_1<=1} w.(mean of xi_i x_i), and the constant neuron
    lin = X.T @ xi / n
    j = int(np.argmax(np.abs(lin)))
    sj = np.sign(lin[j]) or 1.0
    extra = np.zeros((4, d + 1))
    extra[0, j] = sj
    extra[1, j] = -sj
    extra[2, d] = 1.0
    extra[3, d] = -1.0
    W0 = np.vstack([W, extra])
    best = 0.0
    for sign in (1.0, -1.0):
        P = W0.copy()
        step = 0.5
        for _ in range(steps):
            pre = X @ P[:, :d].T + P[:, d]
            mask = (pre > 0).astype(float) * xi[:, None]
            grad = np.column_stack([(X.T @ mask).T, mask.sum(axis=0)]) * (sign / n)
            P = P + step * grad
            norms = np.abs(P).sum(axis=1, keepdims=True)
            norms[norms == 0.0] = 1.0
            P /= norms
            step *= 0.93
        pre = X @ P[:, :d].T + P[:, d]
        vals = sign * (xi @ np.maximum(pre, 0.0)) / n
        if not np.all(np.isfinite(vals)):
            raise OptimizationError("non-finite objective in rademacher ascent")
        best = max(best, float(vals.max()))
    return best


def _sup_smooth_draw(X, xi, activation, restarts, steps, rng):
    """Ascent on +-s(w.x+b)/(|w|_1+1) for bounded sigmoidal activations."""
    n, d = X.shape
    P0 = rng.standard_normal((restarts, d + 1))
    best = 0.0
    for sign in (1.0, -1.0):
        Q = P0.copy()
        step = 0.5
        for _ in range(steps):
            w, b = Q[:, :d], Q[:, d]
            pre = X @ w.T + b
            c = np.abs(w).sum(axis=1) + 1.0
            h = (xi @ activation.apply(pre)) / n
            dact = activation.derivative(pre) * xi[:, None]
            hw = (X.T @ dact).T / n
            hb = dact.sum(axis=0) / n
            gw = sign * (hw * c[:, None] - h[:, None] * np.sign(w)) / (c**2)[:, None]
            gb = sign * hb / c
            Q = Q + step * np.column_stack([gw, gb])
            step *= 0.95
        w, b = Q[:, :d], Q[:, d]
        vals = sign * (xi @ activation.apply(X @ w.T + b)) / n / (np.abs(w).sum(axis=1) + 1.0)
        if not np.all(np.isfinite(vals)):
            raise OptimizationError("non-finite objective in rademacher ascent")
        best = max(best, float(vals.max()))
    return best


def rademacher_estimate(sample, activation: ActivationSpec = RELU, restarts: int = 16,
                        seed: int = 0, sign_draws: int = 32, steps: int = 60,
                        ) -> RademacherEstimate:
    """Monte-Carlo Rademacher complexity of the unit path-norm ball.

    For each sign vector the supremum over the ball is reduced to signed
    normalized single neurons (the ball's extreme points) and maximized by
    multi-start ascent.  The returned per-draw values are optimizer lower
    bounds on the true suprema; each must stay below the closed-form bound.
    """
    X = np.asarray(sample, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.size == 0:
        raise ValueError("sample must be nonempty")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n, d = X.shape
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(n, d)))
    draws = np.empty(sign_draws)
    for i in range(sign_draws):
        xi = rng.choice([-1.0, 1.0], size=n)
        if activation.kind == "relu":
            draws[i] = _sup_relu_draw(X, xi, restarts, steps, rng)
        else:
            draws[i] = _sup_smooth_draw(X, xi, activation, restarts, steps, rng)
    return RademacherEstimate(
        estimate=float(draws.mean()),
        bound=rademacher_bound(n, d, activation.lipschitz),
        draws=draws, n=n, d=d, seed=seed,
    )


# ---------------------------------------------------------------------------
# Fourier integrability criterion
# ---------------------------------------------------------------------------


@dataclass
class FourierData:
    """Spectral data: point masses plus an optional magnitude density.

    Convention: ``f(x) = int fhat(xi) exp(i <xi,x>) dxi + sum_j mass_j
    exp(i <xi_j, x>)``.  ``density`` evaluates ``|fhat|``; it is either a
    univariate density on the line (``density_kind="univariate"``) or a
    radial profile ``|fhat|(xi) = g(|xi|_2)`` in dimension ``dim``
    (``density_kind="radial"``).
    """

    atoms: List[Tuple[np.ndarray, complex]] = field(default_factory=list)
    density: Optional[Callable[[float], float]] = None
    density_kind: str = "univariate"
    dim: int = 1


@dataclass
class FourierBound:
    value: float
    quad_error: float
    diverged: bool


def _sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def fourier_barron_bound(f: FourierData) -> FourierBound:
    """First spectral moment ``sum |mass| |xi| + int |fhat(xi)| |xi| dxi``.

    Finiteness certifies representability by a two-layer network of
    comparable weight budget.  A divergent tail is reported as ``inf`` with
    the ``diverged`` flag instead of an exception.
    """
    total = 0.0
    for xi, mass in f.atoms:
        total += abs(complex(mass)) * float(np.linalg.norm(np.atleast_1d(xi)))
    err = 0.0
    diverged = False
    if f.density is not None:
        g = f.density
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if f.density_kind == "univariate":
                pos, e1 = integrate.quad(lambda r: g(r) * abs(r), 0, np.inf, limit=200)
                neg, e2 = integrate.quad(lambda r: g(-r) * abs(r), 0, np.inf, limit=200)
                part, err = pos + neg, e1 + e2
            elif f.density_kind == "radial":
                area = _sphere_area(f.dim)
                part, err = integrate.quad(lambda r: g(r) * r**f.dim, 0, np.inf, limit=200)
                part, err = area * part, area * err
            else:
                raise ValueError(f"unknown density_kind {f.density_kind!r}")
        nonconvergent = any(issubclass(w.category, integrate.IntegrationWarning)
                            for w in caught)
        if nonconvergent or not math.isfinite(part) or (part > 0 and err > 0.1 * max(part, 1.0)):
            diverged = True
            total = math.inf
        else:
            total += part
    return FourierBound(value=total, quad_error=err, diverged=diverged)


# ---------------------------------------------------------------------------
# One-dimensional second-derivative norm
# ---------------------------------------------------------------------------


@dataclass
class PiecewiseLinear1D:
    """Continuous piecewise-linear function on [0,1]: knots (0=t0<...<tM=1)
    and values at the knots."""

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.knots = np.asarray(self.knots, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.knots[0] != 0.0 or self.knots[-1] != 1.0 or np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must increase strictly from 0 to 1")
        if len(self.knots) != len(self.values):
            raise ValueError("knots and values must have equal length")

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.knots)

    def evaluate(self, x):
        return np.interp(x, self.knots, self.values)

    @classmethod
    def from_network(cls, net: TwoLayerNetwork) -> "PiecewiseLinear1D":
        """Exact piecewise-linear form of a one-dimensional relu network."""
        if net.activation.kind != "relu" or net.dim not in (0, 1):
            raise ValueError("exact conversion needs a 1D relu network")
        kinks = []
        for w, b in zip(net.inner.ravel(), net.bias):
            if w != 0.0:
                t = -b / w
                if 0.0 < t < 1.0:
                    kinks.append(t)
        knots = np.unique(np.concatenate([[0.0, 1.0], np.asarray(kinks, dtype=float)]))
        return cls(knots=knots, values=np.asarray(net.evaluate(knots.reshape(-1, 1))))

    def integral(self) -> float:
        """Exact integral over [0,1] (trapezoid is exact per linear segment)."""
        return float(np.sum(np.diff(self.knots) * (self.values[:-1] + self.values[1:]) / 2.0))


def bv_norm_1d(f: PiecewiseLinear1D) -> float:
    """``|f(0)| + |f'(0+)| + sum of |slope jumps|`` on [0,1].

    The jump sum is the total variation of f', i.e. the total mass of f''.
    Equivalent, with explicit constants tested in both directions, to the
    minimal network representation cost on [0,1].
    """
    s = f.slopes
    jumps = float(np.abs(np.diff(s)).sum()) if len(s) > 1 else 0.0
    return float(abs(f.values[0]) + abs(s[0]) + jumps)


def canonical_network_1d(f: PiecewiseLinear1D) -> TwoLayerNetwork:
    """Explicit relu representation ``f(0) s(1) + f'(0) s(x) + sum_j d_j s(x - t_j)``.

    Reproduces f exactly on [0,1]; its path norm is
    ``|f(0)| + |f'(0)| + sum |d_j| (1 + t_j)``, which sits between one and
    two times :func:`bv_norm_1d`.
    """
    s = f.slopes
    outer = [float(f.values[0]), float(s[0])]
    inner = [[0.0], [1.0]]
    bias = [1.0, 0.0]
    for t, d in zip(f.knots[1:-1], np.diff(s)):
        outer.append(float(d))
        inner.append([1.0])
        bias.append(-float(t))
    return TwoLayerNetwork(np.array(outer), np.array(inner), np.array(bias),
                           RELU, averaged=False)


def relu_net_integral_1d(net: TwoLayerNetwork) -> float:
    """Exact integral of a 1D relu network over [0,1]."""
    return PiecewiseLinear1D.from_network(net).integral()


# ---------------------------------------------------------------------------
# Uniform Monte-Carlo integration gap
# ---------------------------------------------------------------------------


def sample_unit_path_norm_networks(d: int, count: int, width: int, rng,
                                   activation: ActivationSpec = RELU,
                                   ) -> List[TwoLayerNetwork]:
    """Random networks rescaled to path norm at most 1 (outer-weight scaling)."""
    nets = []
    for _ in range(count):
        net = TwoLayerNetwork(rng.standard_normal(width),
                              rng.standard_normal((width, d)),
                              rng.standard_normal(width),
                              activation, averaged=True)
        pn = path_norm(net)
        target = rng.uniform(0.3, 1.0)
        if pn > 0:
            net = net.scale_outer(target / pn)
        nets.append(net)
    return nets


@dataclass
class GapReport:
    sup_gap: float
    gaps: np.ndarray
    bound: float


def mc_integration_gap(nets_with_integrals: Iterable[Tuple[TwoLayerNetwork, float]],
                       sample) -> GapReport:
    """Worst |sample mean - integral| over networks of path norm <= 1.

    Each network comes with its reference integral over the sample's domain
    (exact for 1D relu networks via :func:`relu_net_integral_1d`).  The
    supremum over the unit ball is controlled by the Rademacher-based bound
    reported alongside.
    """
    X = np.asarray(sample, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    n, d = X.shape
    gaps = []
    for net, ref in nets_with_integrals:
        if path_norm(net) > 1.0 + 1e-9:
            raise ValueError("network outside the unit path-norm ball")
        gaps.append(abs(float(np.mean(net.evaluate(X))) - float(ref)))
    gaps = np.asarray(gaps)
    return GapReport(sup_gap=float(gaps.max()) if gaps.size else 0.0, gaps=gaps,
                     bound=rademacher_bound(n, d))
