"""State estimators: variational fit, maximum likelihood, linear inversion.

The central estimator minimizes, over density matrices,

    alpha * sum_measured  |tr(E_i rho) - f_i| / max(|f_i|, eps)
  + beta  * sum_unmeasured tr(E_i rho)
  - gamma * log det rho

i.e. a relative-error data term (slack variables eliminated in closed form),
a penalty on probability mass assigned to observables nobody measured, and an
optional log-det barrier pulling the estimate toward full rank.  Two search
spaces are supported:

* symmetry-restricted: rho = sum_i c_i S_i over a ``SymmetricBasis``; the
  iteration is spectral projected gradient descent over the real coefficient
  vector, with the exact projection onto {trace one, PSD} (eigenvalue
  clipping against the probability simplex -- a spectral operation, so it
  never leaves the symmetry algebra).
* full space: rho = A A^dag / tr(A A^dag) over an unconstrained complex
  factor A, optimized by the same line-searched descent with the gradient in
  the factor.

The absolute values are Huber-smoothed so gradients exist everywhere, with
the width driven through a coarse-to-fine continuation (1e-3 down to 1e-6,
warm-starting each stage) because the sharp kinks otherwise stall the step
size near the optimum; reported objectives always use the exact (unsmoothed)
formula.  Both modes run several deterministic restarts (random starts plus
one seeded from linear inversion) and keep the best result.

``solve_maxlik`` provides the classical iterative maximum-likelihood baseline
and ``linear_inversion`` the plain least-squares fit (no positivity
guarantee), used both as a seed and as an independent reference in tests.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .operators import num_qubits, pauli_string
from .symmetry import SymmetricBasis

HUBER_DELTA = 1e-6          # final smoothing width for |x| in the data term
BARRIER_EIG_FLOOR = 1e-12   # eigenvalue floor applied by projections when gamma > 0
SEED_EIG_FLOOR = 1e-7       # kinder floor for restart seeds, keeps barrier gradients sane
_HUBER_STAGES = (1e-3, 3e-5, HUBER_DELTA)
_LINESEARCH_SHRINK = 0.5
_LINESEARCH_MAX_TRIALS = 60
_NONMONOTONE_MEMORY = 10
_STALL_PATIENCE = 30


@dataclass(frozen=True)
class EstimatorConfig:
    """Hyperparameters of the variational estimator.

    alpha/beta/gamma weight the data term, the unmeasured-mass term and the
    barrier; alpha = beta = 1 with gamma = 0 is the plain relative-error
    program, and the default gamma = 1e-3 adds a weak full-rank pull.
    ``frequency_floor`` is the eps in the relative weights.
    """

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1e-3
    max_iterations: int = 2000
    objective_tolerance: float = 1e-8
    feasibility_tolerance: float = 1e-8
    frequency_floor: float = 1e-6
    restarts: int = 3
    seed: int = 0


@dataclass(frozen=True)
class EstimationProblem:
    """Observable records plus the search space (basis = None means full space)."""

    records: tuple
    basis: SymmetricBasis | None
    dim: int


@dataclass(frozen=True, eq=False)
class EstimationResult:
    rho_hat: np.ndarray
    objective: float
    delta: np.ndarray            # per-measured-record relative residuals
    feasibility_residual: float
    iterations: int
    converged: bool
    mode: str


# ---------------------------------------------------------------------------
# small numeric helpers
# ---------------------------------------------------------------------------

def _huber(x: np.ndarray, delta: float = HUBER_DELTA) -> np.ndarray:
    ax = np.abs(x)
    return np.where(ax <= delta, 0.5 * x * x / delta, ax - 0.5 * delta)


def _huber_grad(x: np.ndarray, delta: float = HUBER_DELTA) -> np.ndarray:
    return np.clip(x / delta, -1.0, 1.0)


def _descend_stages(x0, value_at, gradient_at, advance, config):
    """Run ``_descend`` through the Huber continuation schedule, warm-started."""
    x = x0
    total_iters = 0
    converged = False
    for delta in _HUBER_STAGES:
        x, _, iters, converged = _descend(
            x,
            lambda c, d=delta: value_at(c, d),
            lambda c, d=delta: gradient_at(c, d),
            advance,
            config,
        )
        total_iters += iters
    return x, total_iters, converged


def _project_simplex(vals: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    srt = np.sort(vals)[::-1]
    cumsum = np.cumsum(srt) - 1.0
    ks = np.arange(1, vals.size + 1)
    mask = srt - cumsum / ks > 0
    k = ks[mask][-1]
    tau = cumsum[k - 1] / k
    return np.clip(vals - tau, 0.0, None)


@lru_cache(maxsize=8)
def _hermitian_basis(n_qubits: int) -> np.ndarray:
    """Orthonormal Hermitian basis of the full operator space (scaled Pauli strings)."""
    if n_qubits > 6:
        raise ValueError(
            "full-space estimation keeps 4^n dense basis matrices; practical up to 6 qubits"
        )
    scale = np.sqrt(2.0**n_qubits)
    mats = [
        pauli_string("".join(s)) / scale
        for s in itertools.product("IXYZ", repeat=n_qubits)
    ]
    return np.array(mats)


def _split_records(records):
    measured = [r for r in records if r.measured]
    unmeasured = [r for r in records if not r.measured]
    if not measured:
        raise ValueError("estimation needs at least one measured record")
    if any(r.frequency is None for r in measured):
        raise ValueError("measured records must carry a frequency")
    return measured, unmeasured


def _record_arrays(records, dim, config):
    measured, unmeasured = _split_records(records)
    proj = np.stack([r.projector for r in measured])
    if proj.shape[1:] != (dim, dim):
        raise ValueError(f"record projectors have shape {proj.shape[1:]}, expected ({dim}, {dim})")
    freq = np.array([r.frequency for r in measured], dtype=float)
    weight = 1.0 / np.maximum(np.abs(freq), config.frequency_floor)
    if unmeasured:
        unmeasured_sum = np.sum([r.projector for r in unmeasured], axis=0)
    else:
        unmeasured_sum = np.zeros((dim, dim), dtype=complex)
    return proj, freq, weight, unmeasured_sum


# ---------------------------------------------------------------------------
# linear inversion
# ---------------------------------------------------------------------------

def _trace_constrained_lstsq(design: np.ndarray, target: np.ndarray, traces: np.ndarray):
    """Least squares min ||D c - f|| subject to traces . c = 1.

    Returns the (minimum-norm) solution and the rank of the stacked
    [design; traces] map, which callers compare against the unknown count.
    """
    traces = np.asarray(traces, dtype=float)
    base = traces / (traces @ traces)
    _, _, vh = np.linalg.svd(traces.reshape(1, -1))
    perp = vh[1:]  # orthonormal rows spanning the trace-constraint tangent
    reduced = design @ perp.T
    z, *_ = np.linalg.lstsq(reduced, target - design @ base, rcond=None)
    solution = base + perp.T @ z
    sv = np.linalg.svd(np.vstack([design, traces.reshape(1, -1)]), compute_uv=False)
    rank = int((sv > 1e-9 * max(1.0, float(sv[0]))).sum())
    return solution, rank


def linear_inversion(records, basis: SymmetricBasis | None = None, dim: int | None = None) -> np.ndarray:
    """Plain least-squares reconstruction from measured records.

    The fit enforces unit trace but *not* positivity; the result can have
    negative eigenvalues, which is intentional (it serves as an unbiased
    reference and as a seed for the variational solvers).  Rank deficiency of
    the measurement map triggers a warning and yields the minimum-norm
    solution.
    """
    measured, _ = _split_records(records)
    if dim is None:
        dim = measured[0].projector.shape[0]
    if basis is not None:
        elements = basis.elements
        if basis.dim != dim:
            raise ValueError(f"basis dimension {basis.dim} does not match dim {dim}")
    else:
        elements = _hermitian_basis(num_qubits(dim))
    proj = np.stack([r.projector for r in measured])
    freq = np.array([r.frequency for r in measured], dtype=float)
    design = np.real(np.einsum("mab,iab->mi", proj.conj(), elements))
    traces = np.real(np.einsum("iaa->i", elements))
    coeff, rank = _trace_constrained_lstsq(design, freq, traces)
    if rank < elements.shape[0]:
        warnings.warn(
            f"measurement map is rank deficient ({rank} < {elements.shape[0]}); "
            "returning the minimum-norm solution",
            stacklevel=2,
        )
    rho = np.einsum("i,iab->ab", coeff, elements)
    return 0.5 * (rho + rho.conj().T)


# ---------------------------------------------------------------------------
# spectral projected / factored descent shared loop
# ---------------------------------------------------------------------------

def _descend(x0, value, gradient, advance, config):
    """Barzilai-Borwein descent with nonmonotone backtracking.

    ``advance(x, g, step)`` returns the trial point for one step (projection
    happens inside it); the loop only sees flat real vectors.  The line
    search may accept temporary increases, so the best visited point -- not
    the last -- is returned.
    """
    x = advance(x0, np.zeros_like(x0), 0.0)  # initial feasibility pass
    fval = value(x)
    grad = gradient(x)
    history = [fval]
    x_best, f_best = x, fval
    best_iter_ago = 0
    gnorm = float(np.linalg.norm(grad))
    step = 1.0 / max(1.0, gnorm)
    iterations = 0
    converged = False
    for iterations in range(1, config.max_iterations + 1):
        trial = advance(x, grad, step)
        direction = trial - x
        slope = float(grad @ direction)
        if not np.any(direction) or slope >= 0.0:
            converged = True
            break
        f_ref = max(history)
        lam = 1.0
        accepted = False
        for _ in range(_LINESEARCH_MAX_TRIALS):
            cand = x + lam * direction if lam < 1.0 else trial
            cand_f = value(cand)
            if cand_f <= f_ref + 1e-4 * lam * slope:
                accepted = True
                break
            lam *= _LINESEARCH_SHRINK
        if not accepted:
            converged = True
            break
        new_grad = gradient(cand)
        s = cand - x
        y = new_grad - grad
        sy = float(s @ y)
        step = float(np.clip((s @ s) / sy, 1e-13, 1e13)) if sy > 1e-30 else min(step * 2.0, 1e13)
        x, fval, grad = cand, cand_f, new_grad
        history.append(fval)
        if len(history) > _NONMONOTONE_MEMORY:
            history.pop(0)
        if fval < f_best - config.objective_tolerance * max(1.0, abs(f_best)):
            x_best, f_best = x, fval
            best_iter_ago = 0
        else:
            if fval < f_best:
                x_best, f_best = x, fval
            best_iter_ago += 1
            if best_iter_ago >= _STALL_PATIENCE:
                converged = True
                break
    return x_best, f_best, iterations, converged


# ---------------------------------------------------------------------------
# the variational estimator
# ---------------------------------------------------------------------------

def solve_vqt(problem: EstimationProblem, config: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    """Minimize the relative-error objective over the problem's search space.

    With a basis attached the search runs over real symmetry-algebra
    coefficients ("git" mode); without one it runs over an unconstrained
    full-space factor ("cvqt" mode).  Deterministic for fixed problem and
    config; ``config.restarts`` random starts plus a linear-inversion seed
    guard against flat or parametrization-induced stationary points.
    """
    if problem.basis is not None:
        return _solve_restricted(problem, config)
    return _solve_factored(problem, config)


def solve_git(records, basis: SymmetricBasis, config: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    problem = EstimationProblem(records=tuple(records), basis=basis, dim=basis.dim)
    return solve_vqt(problem, config)


def solve_cvqt(records, dim: int, config: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    problem = EstimationProblem(records=tuple(records), basis=None, dim=dim)
    return solve_vqt(problem, config)


def _exact_objective(rho, proj, freq, weight, unmeasured_sum, config):
    pred = np.real(np.einsum("mab,ab->m", proj.conj(), rho))
    delta = np.abs(pred - freq) * weight
    value = config.alpha * float(delta.sum())
    value += config.beta * float(np.vdot(unmeasured_sum, rho).real)
    if config.gamma > 0.0:
        eigs = np.linalg.eigvalsh(rho)
        if eigs[0] <= 0.0:
            return np.inf, delta
        value -= config.gamma * float(np.log(eigs).sum())
    return value, delta


def _finalize(rho, proj, freq, weight, unmeasured_sum, config, iters, converged, mode):
    rho = 0.5 * (rho + rho.conj().T)
    objective, delta = _exact_objective(rho, proj, freq, weight, unmeasured_sum, config)
    eigs = np.linalg.eigvalsh(rho)
    feas = max(abs(float(np.trace(rho).real) - 1.0), max(0.0, -float(eigs[0])))
    return EstimationResult(
        rho_hat=rho,
        objective=float(objective),
        delta=delta,
        feasibility_residual=feas,
        iterations=iters,
        converged=converged,
        mode=mode,
    )


def _solve_restricted(problem: EstimationProblem, config: EstimatorConfig) -> EstimationResult:
    basis = problem.basis
    elements = basis.elements
    r = basis.size
    proj, freq, weight, unmeasured_sum = _record_arrays(problem.records, basis.dim, config)
    design = np.real(np.einsum("mab,iab->mi", proj.conj(), elements))
    unmeasured_row = config.beta * np.real(
        np.einsum("ab,iab->i", unmeasured_sum.conj(), elements)
    )
    floor = BARRIER_EIG_FLOOR if config.gamma > 0.0 else 0.0

    def rho_of(c):
        return np.einsum("i,iab->ab", c, elements)

    def project(c, eig_floor):
        vals, vecs = np.linalg.eigh(rho_of(c))
        vals = _project_simplex(vals)
        if eig_floor > 0.0:
            vals = np.clip(vals, eig_floor, None)
            vals = vals / vals.sum()
        rho = (vecs * vals) @ vecs.conj().T
        return np.real(np.einsum("iab,ab->i", elements.conj(), rho))

    def smooth_value(c, delta):
        resid = design @ c - freq
        value = config.alpha * float((weight * _huber(resid, delta)).sum())
        value += float(unmeasured_row @ c)
        if config.gamma > 0.0:
            eigs = np.linalg.eigvalsh(rho_of(c))
            if eigs[0] <= 0.0:
                return np.inf
            value -= config.gamma * float(np.log(eigs).sum())
        return value

    def smooth_gradient(c, delta):
        resid = design @ c - freq
        g = config.alpha * (design.T @ (weight * _huber_grad(resid, delta))) + unmeasured_row
        if config.gamma > 0.0:
            vals, vecs = np.linalg.eigh(rho_of(c))
            vals = np.clip(vals, BARRIER_EIG_FLOOR, None)
            rho_inv = (vecs / vals) @ vecs.conj().T
            g = g - config.gamma * np.real(np.einsum("iab,ab->i", elements.conj(), rho_inv))
        return g

    def advance(c, g, step):
        return project(c - step * g, floor)

    traces = np.real(np.einsum("iaa->i", elements))
    seed_coeff, _ = _trace_constrained_lstsq(design, freq, traces)
    rng = np.random.default_rng(config.seed)
    starts = [project(seed_coeff, SEED_EIG_FLOOR if config.gamma > 0.0 else 0.0)]
    starts += [
        project(rng.standard_normal(r), SEED_EIG_FLOOR if config.gamma > 0.0 else 0.0)
        for _ in range(config.restarts)
    ]

    best = None
    for c0 in starts:
        c_fin, iters, conv = _descend_stages(c0, smooth_value, smooth_gradient, advance, config)
        result = _finalize(rho_of(c_fin), proj, freq, weight, unmeasured_sum, config, iters, conv, "git")
        if best is None or result.objective < best.objective - 1e-15:
            best = result
        if config.gamma == 0.0 and best.objective <= 1e-12:
            break  # data term and unmeasured mass are both nonnegative: global optimum
    return best


def _solve_factored(problem: EstimationProblem, config: EstimatorConfig) -> EstimationResult:
    dim = problem.dim
    proj, freq, weight, unmeasured_sum = _record_arrays(problem.records, dim, config)

    def unpack(x):
        half = dim * dim
        return (x[:half] + 1.0j * x[half:]).reshape(dim, dim)

    def pack(a):
        flat = a.reshape(-1)
        return np.concatenate([flat.real, flat.imag])

    def rho_of(a):
        gram = a @ a.conj().T
        return gram / np.trace(gram).real

    def smooth_value(x, delta):
        rho = rho_of(unpack(x))
        resid = np.real(np.einsum("mab,ab->m", proj.conj(), rho)) - freq
        value = config.alpha * float((weight * _huber(resid, delta)).sum())
        value += config.beta * float(np.vdot(unmeasured_sum, rho).real)
        if config.gamma > 0.0:
            eigs = np.linalg.eigvalsh(rho)
            if eigs[0] <= 0.0:
                return np.inf
            value -= config.gamma * float(np.log(eigs).sum())
        return value

    def smooth_gradient(x, delta):
        a = unpack(x)
        norm_sq = float(np.vdot(a, a).real)
        rho = (a @ a.conj().T) / norm_sq
        resid = np.real(np.einsum("mab,ab->m", proj.conj(), rho)) - freq
        front = config.alpha * np.einsum(
            "m,mab->ab", weight * _huber_grad(resid, delta), proj
        ) + config.beta * unmeasured_sum
        if config.gamma > 0.0:
            vals, vecs = np.linalg.eigh(rho)
            vals = np.clip(vals, BARRIER_EIG_FLOOR, None)
            front = front - config.gamma * (vecs / vals) @ vecs.conj().T
        mean = float(np.vdot(front, rho).real)
        grad_a = (2.0 / norm_sq) * (front @ a - mean * a)
        return pack(grad_a)

    def advance(x, g, step):
        a = unpack(x - step * g)
        norm = np.linalg.norm(a)
        if norm < 1e-150:
            a = np.eye(dim, dtype=complex)
            norm = np.linalg.norm(a)
        return pack(a / norm)

    def factor_from_state(rho):
        vals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
        vals = np.clip(vals, SEED_EIG_FLOOR if config.gamma > 0.0 else 0.0, None)
        vals = vals / vals.sum()
        return (vecs * np.sqrt(vals)) @ vecs.conj().T

    seed_rho = linear_inversion(problem.records, dim=dim)
    rng = np.random.default_rng(config.seed)
    starts = [pack(factor_from_state(seed_rho))]
    for _ in range(config.restarts):
        raw = rng.standard_normal((dim, dim)) + 1.0j * rng.standard_normal((dim, dim))
        starts.append(pack(raw / np.linalg.norm(raw)))

    best = None
    for x0 in starts:
        x_fin, iters, conv = _descend_stages(x0, smooth_value, smooth_gradient, advance, config)
        result = _finalize(
            rho_of(unpack(x_fin)), proj, freq, weight, unmeasured_sum, config, iters, conv, "cvqt"
        )
        if best is None or result.objective < best.objective - 1e-15:
            best = result
        if config.gamma == 0.0 and best.objective <= 1e-12:
            break
    return best


# ---------------------------------------------------------------------------
# iterative maximum likelihood
# ---------------------------------------------------------------------------

def solve_maxlik(records, config: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    """Diluted iterative maximum likelihood over the full state space.

    Each measured record contributes a two-outcome experiment {E_i, 1 - E_i}
    with success frequency f_i, so the update operator R is the standard
    likelihood-gradient kernel and the combined outcome set is a rescaled
    POVM.  Steps are diluted (shrunk toward the identity) whenever a full
    R rho R step would lower the likelihood.  Unmeasured records are ignored.
    Emits a warning when the records are not informationally complete.
    """
    measured, _ = _split_records(records)
    dim = measured[0].projector.shape[0]
    proj = np.stack([r.projector for r in measured])
    freq = np.array([r.frequency for r in measured], dtype=float)
    m = len(measured)

    flat = np.concatenate([proj.reshape(m, -1), np.eye(dim).reshape(1, -1)])
    rank = int(np.linalg.matrix_rank(flat, tol=1e-9))
    if rank < dim * dim:
        warnings.warn(
            f"records span only {rank} of {dim * dim} operator dimensions; "
            "maximum-likelihood solution may be non-unique",
            stacklevel=2,
        )

    eye = np.eye(dim, dtype=complex)

    def loglik(p):
        p = np.clip(p, 1e-12, 1.0 - 1e-12)
        return float(freq @ np.log(p) + (1.0 - freq) @ np.log1p(-p))

    def kernel(p):
        p = np.clip(p, 1e-12, 1.0 - 1e-12)
        pos = freq / p
        neg = (1.0 - freq) / (1.0 - p)
        r_op = np.einsum("m,mab->ab", pos - neg, proj) + neg.sum() * eye
        return r_op / m

    rho = eye / dim
    pred = np.real(np.einsum("mab,ab->m", proj.conj(), rho))
    current = loglik(pred)
    iterations = 0
    converged = False
    residual = np.inf
    for iterations in range(1, config.max_iterations + 1):
        r_op = kernel(pred)
        r_op = 0.5 * (r_op + r_op.conj().T)
        pure = r_op @ rho @ r_op
        residual = float(np.max(np.abs(pure / np.trace(pure).real - rho)))
        if residual < config.feasibility_tolerance:
            converged = True
            break
        scale = 1.0
        improved = False
        for _ in range(30):
            mix = (1.0 - scale) * eye + scale * r_op
            cand = mix @ rho @ mix.conj().T
            cand = cand / np.trace(cand).real
            cand_pred = np.real(np.einsum("mab,ab->m", proj.conj(), cand))
            cand_ll = loglik(cand_pred)
            if cand_ll > current - 1e-15:
                rho, pred, current = cand, cand_pred, cand_ll
                improved = True
                break
            scale *= 0.5
        if not improved:
            converged = True
            break

    rho = 0.5 * (rho + rho.conj().T)
    delta = np.abs(pred - freq) / np.maximum(np.abs(freq), config.frequency_floor)
    return EstimationResult(
        rho_hat=rho,
        objective=-current,
        delta=delta,
        feasibility_residual=residual,
        iterations=iterations,
        converged=converged,
        mode="maxlik",
    )
