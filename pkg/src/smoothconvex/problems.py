"""Loss functions, data ingestion, constant estimation, and synthetic problems.

Datasets are stored sparse (index:value pairs, 1-based); iterates and
per-problem matrices are dense, which is the right trade at desk scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, DomainError, InputError, Point, make_rng


class ParseError(InputError):
    """Malformed dataset text; message carries the 1-based line number."""


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


@dataclass
class LabeledDataset:
    rows: list  # list of list[(index, value)], indices 1-based strictly increasing
    labels: np.ndarray
    d: int

    @property
    def n(self) -> int:
        return len(self.rows)

    def is_classification(self) -> bool:
        return bool(np.all(np.isin(self.labels, (-1.0, 1.0))))

    def to_dense(self) -> np.ndarray:
        X = np.zeros((self.n, self.d))
        for i, row in enumerate(self.rows):
            for j, v in row:
                X[i, j - 1] = v
        return X


def load_libsvm(path, normalize: bool = False) -> LabeledDataset:
    """Read a text file with one example per line: "label idx:val idx:val ...".

    Comments after '#' are ignored; indices are 1-based and must be strictly
    increasing within a row; a zero label is rejected.  With normalize=True
    every row is scaled to unit l2 norm.
    """
    rows, labels = [], []
    d = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                label = float(parts[0])
            except ValueError:
                raise ParseError(f"line {lineno}: bad label {parts[0]!r}") from None
            if label == 0.0:
                raise ParseError(f"line {lineno}: zero label")
            row = []
            prev = 0
            for tok in parts[1:]:
                idx_s, _, val_s = tok.partition(":")
                try:
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise ParseError(f"line {lineno}: bad feature token {tok!r}") from None
                if idx <= prev:
                    raise ParseError(f"line {lineno}: feature indices must increase (got {idx} after {prev})")
                prev = idx
                row.append((idx, val))
                d = max(d, idx)
            if normalize and row:
                nrm = math.sqrt(sum(v * v for _, v in row))
                if nrm > 0:
                    row = [(i, v / nrm) for i, v in row]
            rows.append(row)
            labels.append(label)
    if not rows:
        raise InputError("no examples")
    return LabeledDataset(rows=rows, labels=np.asarray(labels, dtype=np.float64), d=d)


# ---------------------------------------------------------------------------
# Finite-sum problems
# ---------------------------------------------------------------------------


@dataclass
class Constants:
    L: float                  # Gram-spectrum smoothness bound (covers every component)
    lam: float                # strong-convexity modulus of the full objective
    G: float                  # gradient-norm bound over the sampled region
    sigma: float              # stochastic-gradient standard deviation at the origin
    L_comp: float | None = None  # tight max component smoothness (2·max‖x_i‖² etc.)
    L_full: float | None = None  # tight full-objective smoothness (Gram/n spectrum)

    @property
    def kappa(self) -> float:
        return self.L / self.lam if self.lam > 0 else math.inf


@dataclass
class FiniteSumProblem:
    """F(w) = (1/n) Σ f_i(w) + (λ/2)‖w‖², components carrying the regularizer.

    loss: "logistic" with f_i(w) = log(1+exp(−y_i⟨w,x_i⟩)), or
          "squared"  with f_i(w) = (y_i − ⟨w,x_i⟩)².
    """

    X: np.ndarray
    y: np.ndarray
    lam_reg: float
    loss: str
    constants: Constants | None = None

    def __post_init__(self):
        if self.loss not in ("logistic", "squared"):
            raise ConfigurationError(f"unknown loss {self.loss!r}")
        if self.lam_reg < 0:
            raise ConfigurationError("regularizer must be nonnegative")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    # -- per-component access (regularizer included) -------------------------

    def component_value(self, i: int, w: Point) -> float:
        m = float(self.y[i] * (self.X[i] @ w))
        if self.loss == "logistic":
            base = float(np.logaddexp(0.0, -m))
        else:
            base = float((self.y[i] - self.X[i] @ w) ** 2)
        return base + 0.5 * self.lam_reg * float(w @ w)

    def component_grad(self, i: int, w: Point) -> Point:
        if self.loss == "logistic":
            m = float(self.y[i] * (self.X[i] @ w))
            coef = -self.y[i] / (1.0 + math.exp(min(m, 700.0)))
            base = coef * self.X[i]
        else:
            base = -2.0 * float(self.y[i] - self.X[i] @ w) * self.X[i]
        return base + self.lam_reg * w

    # -- full objective -------------------------------------------------------

    def full_value(self, w: Point) -> float:
        z = self.X @ w
        if self.loss == "logistic":
            base = float(np.mean(np.logaddexp(0.0, -self.y * z)))
        else:
            base = float(np.mean((self.y - z) ** 2))
        return base + 0.5 * self.lam_reg * float(w @ w)

    def full_grad(self, w: Point) -> Point:
        z = self.X @ w
        if self.loss == "logistic":
            coefs = -self.y / (1.0 + np.exp(np.minimum(self.y * z, 700.0)))
        else:
            coefs = -2.0 * (self.y - z)
        return (self.X.T @ coefs) / self.n + self.lam_reg * w

    def all_component_grads(self, w: Point) -> np.ndarray:
        """n × d matrix of component gradients (regularizer included)."""
        z = self.X @ w
        if self.loss == "logistic":
            coefs = -self.y / (1.0 + np.exp(np.minimum(self.y * z, 700.0)))
        else:
            coefs = -2.0 * (self.y - z)
        return coefs[:, None] * self.X + self.lam_reg * w[None, :]

    def anchored_component_diff(self, i: int, w: Point, center: Point) -> Point:
        """∇f_i(w) − ∇f_i(center), the variance-reduced stochastic part."""
        xi = self.X[i]
        if self.loss == "squared":
            return (2.0 * float(xi @ (w - center))) * xi + self.lam_reg * (w - center)
        mw = float(self.y[i] * (xi @ w))
        mc = float(self.y[i] * (xi @ center))
        coef = (-self.y[i] / (1.0 + math.exp(min(mw, 700.0)))
                + self.y[i] / (1.0 + math.exp(min(mc, 700.0))))
        return coef * xi + self.lam_reg * (w - center)

    # -- stochastic access ----------------------------------------------------

    def component(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.n))

    def stochastic_grad(self, w: Point, rng: np.random.Generator) -> Point:
        return self.component_grad(self.component(rng), w)


def _power_iteration_gram(X: np.ndarray, steps: int = 100, max_steps: int = 10_000,
                          tol: float = 1e-10, seed: int = 0) -> float:
    """Largest eigenvalue of XᵀX by power iteration."""
    rng = make_rng(seed)
    v = rng.standard_normal(X.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for it in range(max_steps):
        w = X.T @ (X @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v_new = w / nw
        lam_new = float(v_new @ (X.T @ (X @ v_new)))
        done = abs(lam_new - lam) <= tol * max(1.0, abs(lam_new))
        v, lam = v_new, lam_new
        if it + 1 >= steps and done:
            return lam
    warnings.warn("power iteration did not converge; returning best estimate",
                  RuntimeWarning)
    return lam


def estimate_constants(problem: FiniteSumProblem, radius: float = 1.0,
                       sigma_samples: int = 10_000, g_samples: int = 1_000,
                       seed: int = 0) -> Constants:
    """Estimate (L, λ, G, σ) for a finite-sum problem.

    L comes from the data Gram spectrum (power iteration): 2·λ_max(XᵀX)+λ for
    squared loss, λ_max(XᵀX)/4+λ for logistic — a bound that is valid for every
    component since x_i x_iᵀ ⪯ XᵀX.  σ is the empirical stochastic-gradient
    standard deviation at the origin; G the max gradient norm over sampled
    feasible points.
    """
    lam_max = _power_iteration_gram(problem.X, seed=seed)
    max_row = float(np.max(np.sum(problem.X**2, axis=1)))
    if problem.loss == "squared":
        L = 2.0 * lam_max + problem.lam_reg
        L_comp = 2.0 * max_row + problem.lam_reg
        L_full = 2.0 * lam_max / problem.n + problem.lam_reg
        evals = np.linalg.eigvalsh(problem.X.T @ problem.X / problem.n)
        lam = 2.0 * max(float(evals[0]), 0.0) + problem.lam_reg
    else:
        L = 0.25 * lam_max + problem.lam_reg
        L_comp = 0.25 * max_row + problem.lam_reg
        L_full = 0.25 * lam_max / problem.n + problem.lam_reg
        lam = problem.lam_reg

    rng = make_rng(seed + 1)
    w0 = np.zeros(problem.d)
    idx = rng.integers(problem.n, size=sigma_samples)
    grads0 = problem.all_component_grads(w0)
    sampled = grads0[idx]
    mean = sampled.mean(axis=0)
    sigma2 = float(np.mean(np.sum((sampled - mean) ** 2, axis=1)))

    G = 0.0
    for _ in range(g_samples):
        v = rng.standard_normal(problem.d)
        v *= radius * rng.uniform() ** (1.0 / problem.d) / max(np.linalg.norm(v), 1e-15)
        G = max(G, float(np.max(np.linalg.norm(problem.all_component_grads(v), axis=1))))

    return Constants(L=L, lam=lam, G=G, sigma=math.sqrt(sigma2), L_comp=L_comp, L_full=L_full)


def logistic_problem(data: LabeledDataset, lam: float, seed: int = 0) -> FiniteSumProblem:
    """Regularized logistic regression over a labeled dataset."""
    if not data.is_classification():
        raise InputError("logistic loss needs labels in {-1, +1}")
    prob = FiniteSumProblem(X=data.to_dense(), y=data.labels, lam_reg=float(lam),
                            loss="logistic")
    prob.constants = estimate_constants(prob, seed=seed)
    return prob


def least_squares_problem(data: LabeledDataset, lam: float, seed: int = 0) -> FiniteSumProblem:
    """Squared-loss regression over a labeled dataset."""
    prob = FiniteSumProblem(X=data.to_dense(), y=data.labels, lam_reg=float(lam),
                            loss="squared")
    prob.constants = estimate_constants(prob, seed=seed)
    return prob


def from_arrays(X: np.ndarray, y: np.ndarray, lam: float, loss: str,
                seed: int = 0) -> FiniteSumProblem:
    """Build a finite-sum problem directly from dense arrays."""
    prob = FiniteSumProblem(X=np.asarray(X, float), y=np.asarray(y, float),
                            lam_reg=float(lam), loss=loss)
    prob.constants = estimate_constants(prob, seed=seed)
    return prob


# ---------------------------------------------------------------------------
# Synthetic generators
# ---------------------------------------------------------------------------


def synthetic_classification(n: int, d: int, seed: int, row_norm: float = 1.0) -> LabeledDataset:
    """Gaussian features scaled to a fixed row norm, labels from a planted vector."""
    rng = make_rng(seed)
    X = rng.standard_normal((n, d))
    X *= row_norm / np.linalg.norm(X, axis=1, keepdims=True)
    wstar = rng.standard_normal(d)
    margins = X @ wstar + 0.3 * rng.standard_normal(n)
    y = np.where(margins >= 0, 1.0, -1.0)
    rows = [[(j + 1, float(X[i, j])) for j in range(d)] for i in range(n)]
    return LabeledDataset(rows=rows, labels=y, d=d)


def synthetic_regression(n: int, d: int, seed: int, noise: float = 0.1,
                         row_norm: float | None = None) -> LabeledDataset:
    rng = make_rng(seed)
    X = rng.standard_normal((n, d))
    if row_norm is not None:
        X *= row_norm / np.linalg.norm(X, axis=1, keepdims=True)
    wstar = rng.standard_normal(d)
    y = X @ wstar + noise * rng.standard_normal(n)
    rows = [[(j + 1, float(X[i, j])) for j in range(d)] for i in range(n)]
    return LabeledDataset(rows=rows, labels=y, d=d)


@dataclass
class OneDimTargetRisk:
    """Scalar stochastic regression ℓ(w; b) = (w − b)² with a rare high target.

    b = 1 with probability delta², else b = delta.  The expected loss, its
    minimizer, and the optimal risk are all available in closed form, which
    makes this the reference instance for target-risk-driven solvers.
    """

    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError("delta must lie in (0, 1)")

    @property
    def d(self) -> int:
        return 1

    beta: float = field(default=2.0, init=False)   # smoothness of ℓ
    alpha: float = field(default=2.0, init=False)  # strong convexity of E[ℓ]

    def sample_b(self, rng: np.random.Generator) -> float:
        return 1.0 if rng.uniform() < self.delta ** 2 else self.delta

    def sample_loss(self, w: Point, rng: np.random.Generator) -> float:
        b = self.sample_b(rng)
        return float((w[0] - b) ** 2)

    def stochastic_grad(self, w: Point, rng: np.random.Generator) -> Point:
        b = self.sample_b(rng)
        return np.array([2.0 * (w[0] - b)])

    def expected_loss(self, w) -> float:
        w0 = float(np.asarray(w).reshape(-1)[0])
        d2 = self.delta ** 2
        return d2 * (w0 - 1.0) ** 2 + (1.0 - d2) * (w0 - self.delta) ** 2

    @property
    def wstar(self) -> float:
        d2 = self.delta ** 2
        return d2 * 1.0 + (1.0 - d2) * self.delta

    @property
    def eps_opt(self) -> float:
        return self.expected_loss(np.array([self.wstar]))


def onedim_target_risk_problem(delta: float) -> OneDimTargetRisk:
    return OneDimTargetRisk(delta=delta)


@dataclass
class NoisyQuadratic:
    """f(x) = ½‖x − center‖² with bounded spherical gradient noise.

    The noise is uniform on the σ-sphere so the stochastic gradient has a hard
    norm bound (needed by the strongly-convex single-projection analysis) and
    zero mean.
    """

    center: np.ndarray
    noise: float = 0.0

    @property
    def d(self) -> int:
        return self.center.shape[0]

    @property
    def beta(self) -> float:
        return 1.0  # both smoothness and strong convexity

    def value(self, x: Point) -> float:
        d = x - self.center
        return 0.5 * float(d @ d)

    def grad(self, x: Point) -> Point:
        return x - self.center

    def stochastic_grad(self, x: Point, rng: np.random.Generator) -> Point:
        g = self.grad(x)
        if self.noise > 0:
            u = rng.standard_normal(self.d)
            g = g + self.noise * u / max(np.linalg.norm(u), 1e-15)
        return g

    def grad_bound(self, radius: float = 1.0) -> float:
        return radius + float(np.linalg.norm(self.center)) + self.noise


# ---------------------------------------------------------------------------
# Smoothed hinge loss and its risk transform
# ---------------------------------------------------------------------------


def smoothed_hinge_value(z, gamma: float):
    """(1/γ)·log(1 + exp(γ(1 − z))); stable for large γ(1−z)."""
    if gamma <= 0:
        raise ConfigurationError("smoothing parameter must be positive")
    u = gamma * (1.0 - np.asarray(z, dtype=np.float64))
    return np.logaddexp(0.0, u) / gamma


def smoothed_hinge_grad(z, gamma: float):
    """dφ/dz = −exp(γ(1−z)) / (1 + exp(γ(1−z))) ∈ [−1, 0]."""
    if gamma <= 0:
        raise ConfigurationError("smoothing parameter must be positive")
    u = gamma * (1.0 - np.asarray(z, dtype=np.float64))
    return -_sigmoid(u)


def _sigmoid(u):
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    pos = u >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-u[pos]))
    eu = np.exp(u[~pos])
    out[~pos] = eu / (1.0 + eu)
    return out


def psi_transform(eta: float, gamma: float) -> float:
    """Surrogate-to-binary excess-risk transform of the smoothed hinge loss.

    Closed form, evaluated in log-space so large γ never overflows; symmetric
    in eta and zero at eta = 0.
    """
    if gamma <= 0:
        raise ConfigurationError("smoothing parameter must be positive")
    if not -1.0 < eta < 1.0:
        raise DomainError("eta must lie in (-1, 1)")
    e = abs(float(eta))
    if e == 0.0:
        return 0.0
    # s = e^{-γ}·sqrt(e²e^{2γ} + 1 − e²); the two closed-form roots are
    # C1 = e^γ(s − e) and C2 = e^γ(s + e), with s − e evaluated via its
    # rationalized form to dodge cancellation.
    s = math.sqrt(e * e + (1.0 - e * e) * math.exp(-2.0 * gamma))
    log1p_exp_gamma = np.logaddexp(0.0, gamma)  # log(1 + e^γ)
    # term 1: log(1 + e^γ C1/(1+e)) with e^γ C1/(1+e) = (1−e)/(s+e)
    t1 = math.log1p((1.0 - e) / (s + e)) - log1p_exp_gamma
    # term 2: log(1 + e^γ C2/(1−e)) with e^γ C2/(1−e) = e^{2γ}(s+e)/(1−e)
    t2 = np.logaddexp(0.0, 2.0 * gamma + math.log((s + e) / (1.0 - e))) - log1p_exp_gamma
    return float(-(1.0 + e) / (2.0 * gamma) * t1 - (1.0 - e) / (2.0 * gamma) * t2)
