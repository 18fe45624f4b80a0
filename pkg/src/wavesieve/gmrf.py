"""Gaussian Markov random fields on graphs.

Conditional autoregression with equal neighbour weights eta on the adjacency,
conclique-blocked Gibbs sampling, an exact joint sampler as oracle, coupled
innovation pairs for dependent components, and the marginal transform onto
the unit interval.

Conditionals per node: value | rest ~ N(alpha_s + eta * sum_{t ~ s}(x_t -
alpha_t), tau2_s).  With tau2 from `tau_from_eta` the marginal variances of
the joint law equal one exactly.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .graphs import eta_range
from .rng import normal_cdf, polar_normals, stream

__all__ = [
    "GmrfSpec", "FieldSample", "ChainConfig",
    "tau_from_eta", "conditional_params", "gibbs_chain", "gibbs_chain_coupled",
    "direct_sample", "joint_covariance", "coupled_innovation_pairs",
    "to_uniform", "field_to_csv", "field_from_csv",
]

_TAG_CHAIN = 21
_TAG_DIRECT = 22
_TAG_PAIRS = 23


@dataclass(frozen=True)
class FieldSample:
    """Per-node values of one field component."""
    values: np.ndarray
    component_id: str = "field"

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


@dataclass(frozen=True)
class ChainConfig:
    iterations: int
    burn_in: int
    seed: int

    def __post_init__(self):
        if self.iterations < 0 or self.burn_in < 0:
            raise ValueError("iterations and burn_in must be non-negative")
        if self.iterations > 0 and self.burn_in >= self.iterations:
            raise ValueError("burn_in must be smaller than iterations")


def tau_from_eta(graph, eta):
    """Conditional variances making every marginal variance of the joint equal one.

    tau2_s = 1 / [(I - eta*H)^{-1}]_{ss}; requires eta strictly inside the
    admissible range of the graph.
    """
    _check_eta(graph, eta)
    n = graph.node_count
    M = np.eye(n) - eta * graph.adjacency()
    try:
        inv = np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise ValueError("I - eta*H is singular") from exc
    diag = np.diag(inv)
    if np.any(diag <= 0.0):
        raise ValueError("non-positive diagonal in (I - eta*H)^{-1}")
    return 1.0 / diag


def _check_eta(graph, eta):
    lo, hi = eta_range(graph)
    if not lo < eta < hi:
        raise ValueError(f"eta={eta} outside admissible range ({lo:.6g}, {hi:.6g})")


@dataclass(frozen=True)
class GmrfSpec:
    """Conditional autoregression on a graph: mean alpha, dependence eta,
    per-node conditional variances tau2, target marginal variance sigma2."""
    graph: object
    eta: float
    alpha: np.ndarray = None
    tau2: np.ndarray = None
    sigma2: float = 1.0

    def __post_init__(self):
        n = self.graph.node_count
        _check_eta(self.graph, self.eta)
        alpha = np.zeros(n) if self.alpha is None else np.broadcast_to(
            np.asarray(self.alpha, dtype=float), (n,)).copy()
        tau2 = tau_from_eta(self.graph, self.eta) if self.tau2 is None else np.broadcast_to(
            np.asarray(self.tau2, dtype=float), (n,)).copy()
        if np.any(tau2 <= 0.0):
            raise ValueError("all conditional variances must be positive")
        if self.sigma2 <= 0.0:
            raise ValueError("sigma2 must be positive")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "tau2", tau2)


def conditional_params(spec, state, s):
    """(mean, variance) of node s given the rest of the field frozen at `state`."""
    nbrs = spec.graph.neighbors[s]
    x = state.values if isinstance(state, FieldSample) else np.asarray(state, dtype=float)
    mean = spec.alpha[s] + spec.eta * float(np.sum(x[nbrs] - spec.alpha[nbrs]))
    return mean, float(spec.tau2[s])


def _sweep_plan(spec, partition):
    """Per-class update ingredients, precomputed once per chain."""
    plan = []
    for cls in partition.classes:
        flat = (np.concatenate([spec.graph.neighbors[s] for s in cls])
                if cls.size else np.empty(0, dtype=np.int64))
        bounds = np.zeros(cls.size + 1, dtype=np.int64)
        np.cumsum(spec.graph.degrees[cls], out=bounds[1:])
        plan.append((cls, flat, bounds, np.sqrt(spec.tau2[cls])))
    return plan


def _class_means(spec, plan_entry, x):
    cls, flat, bounds, _ = plan_entry
    if flat.size == 0:
        return spec.alpha[cls].copy()
    centered = x - spec.alpha
    csum = np.concatenate(([0.0], np.cumsum(centered[flat])))
    sums = csum[bounds[1:]] - csum[bounds[:-1]]
    return spec.alpha[cls] + spec.eta * sums


def gibbs_chain(spec, partition, cfg, trace_every=0, component_id="field"):
    """Conclique-blocked Gibbs sampler.

    Starts at alpha; each sweep visits the classes in fixed index order and
    resamples every node of the class from its conditional given the frozen
    rest (exact joint update, members are mutually non-adjacent).  Returns
    (final FieldSample, trace), where trace stacks every `trace_every`-th
    post-burn-in state, or is None when trace_every == 0.
    """
    n = spec.graph.node_count
    x = spec.alpha.copy()
    rng = stream(cfg.seed, _TAG_CHAIN)
    plan = _sweep_plan(spec, partition)
    kept = []
    for it in range(cfg.iterations):
        z = polar_normals(rng, n)
        pos = 0
        for entry in plan:
            cls, _, _, sd = entry
            x[cls] = _class_means(spec, entry, x) + sd * z[pos:pos + cls.size]
            pos += cls.size
        if trace_every and it >= cfg.burn_in and (it - cfg.burn_in) % trace_every == 0:
            kept.append(x.copy())
    trace = np.array(kept) if trace_every else None
    return FieldSample(x, component_id), trace


def gibbs_chain_coupled(spec_a, spec_b, partition, cfg, rho,
                        ids=("coupled_a", "coupled_b")):
    """Run two chains in lockstep with correlation `rho` between their
    per-node innovations at every update (Gaussian-copula coupling of the
    sweep innovations).  Returns the two final FieldSamples."""
    if not -1.0 < rho < 1.0:
        raise ValueError("|rho| must be below 1")
    if spec_a.graph is not spec_b.graph:
        raise ValueError("coupled chains must share one graph")
    n = spec_a.graph.node_count
    xa = spec_a.alpha.copy()
    xb = spec_b.alpha.copy()
    rng = stream(cfg.seed, _TAG_CHAIN)
    plan_a = _sweep_plan(spec_a, partition)
    plan_b = _sweep_plan(spec_b, partition)
    mix = np.sqrt(1.0 - rho * rho)
    for _ in range(cfg.iterations):
        u = polar_normals(rng, n)
        v = polar_normals(rng, n)
        w = rho * u + mix * v
        pos = 0
        for ea, eb in zip(plan_a, plan_b):
            cls = ea[0]
            xa[cls] = _class_means(spec_a, ea, xa) + ea[3] * u[pos:pos + cls.size]
            xb[cls] = _class_means(spec_b, eb, xb) + eb[3] * w[pos:pos + cls.size]
            pos += cls.size
    return FieldSample(xa, ids[0]), FieldSample(xb, ids[1])


def joint_covariance(spec):
    """(covariance, asymmetry) of the joint law the conditionals imply.

    The raw matrix sigma2 * (I - eta*H)^{-1} T is symmetric only when the
    diagonal of (I - eta*H)^{-1} is constant (vertex-transitive graphs, or
    tau2 adjusted accordingly); otherwise the conditionals are mutually
    incompatible and the symmetrized matrix is returned together with the
    max entrywise asymmetry residual.
    """
    n = spec.graph.node_count
    M = np.eye(n) - spec.eta * spec.graph.adjacency()
    A = np.linalg.solve(M, np.diag(spec.tau2)) * spec.sigma2
    resid = float(np.max(np.abs(A - A.T))) if n else 0.0
    return 0.5 * (A + A.T), resid


def direct_sample(spec, seed, count=None, component_id="field"):
    """Exact draw(s) from N(alpha, sigma2*(I - eta*H)^{-1} T), symmetrized.

    `count=None` returns one FieldSample; an integer returns an array of
    shape (count, n).  Warns when the implied covariance had to be
    symmetrized by more than 1e-10.
    """
    cov, resid = joint_covariance(spec)
    if resid > 1e-10:
        warnings.warn(f"joint covariance symmetrized, residual {resid:.3e}", stacklevel=2)
    try:
        L = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise ValueError("implied covariance is not positive definite") from exc
    rng = stream(seed, _TAG_DIRECT)
    n = spec.graph.node_count
    if count is None:
        z = polar_normals(rng, n)
        return FieldSample(spec.alpha + L @ z, component_id)
    z = polar_normals(rng, int(count) * n).reshape(int(count), n)
    return spec.alpha[None, :] + z @ L.T


def coupled_innovation_pairs(rho, count, seed):
    """`count` pairs of standard normals with correlation rho, shape (count, 2).

    Built as (U, rho*U + sqrt(1 - rho^2)*V) from independent U, V.
    """
    if not -1.0 < rho < 1.0:
        raise ValueError("|rho| must be below 1")
    rng = stream(seed, _TAG_PAIRS)
    u = polar_normals(rng, int(count))
    v = polar_normals(rng, int(count))
    return np.column_stack([u, rho * u + np.sqrt(1.0 - rho * rho) * v])


def to_uniform(sample, mean=0.0, sd=1.0):
    """Map a field through the normal distribution function onto (0, 1)."""
    if sd <= 0.0:
        raise ValueError("sd must be positive")
    vals = normal_cdf((sample.values - mean) / sd)
    return FieldSample(np.atleast_1d(vals), sample.component_id)


def field_to_csv(sample, path):
    with open(path, "w") as fh:
        fh.write("node_id,value\n")
        for i, v in enumerate(sample.values):
            fh.write(f"{i},{float(v)!r}\n")


def field_from_csv(path, component_id="field"):
    values = []
    with open(path) as fh:
        header = fh.readline()
        if header.strip() != "node_id,value":
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            if line.strip():
                _, v = line.split(",")
                values.append(float(v))
    return FieldSample(np.array(values), component_id)
