"""Seeded Monte Carlo estimates for the restoration scenarios.

Trial ``i`` draws its four uniforms from Philox block ``i`` keyed by the
master seed, so every trial owns a fixed substream and the summary does not
depend on chunking or on how many worker threads run the kernel.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cloner import CLONER
from .kernels import get_kernel
from .restoration import get_scenario
from .states import normalized_ket, uniform_sphere_kets

DRAWS_PER_TRIAL = 4


def trial_uniforms(seed, start, stop):
    """Uniforms for trials ``start..stop-1``; row ``i`` depends only on ``(seed, start + i)``."""
    gen = np.random.Generator(np.random.Philox(key=seed, counter=start))
    return gen.random((stop - start) * DRAWS_PER_TRIAL).reshape(stop - start, DRAWS_PER_TRIAL)


def kernel_tables(name):
    """Dense arrays describing a scenario for :func:`qclone.kernels.simulate_trials`."""
    sc = get_scenario(name)
    K = len(sc.outcome_labels)
    J = max(len(v) for v in sc.steps.values())
    steps = np.zeros((K, J, 2, 2), dtype=np.complex128)
    success = np.zeros((K, J), dtype=np.uint8)
    for k, lab in enumerate(sc.outcome_labels):
        for j, st in enumerate(sc.steps[lab]):
            steps[k, j] = st.kraus
            success[k, j] = st.success
    return np.ascontiguousarray(sc.measurement_ops), steps, success


def _inputs(sampler, u):
    if isinstance(sampler, str):
        if sampler != "uniform":
            raise ValueError(f"unknown input sampler {sampler!r}")
        return uniform_sphere_kets(u[:, 0], u[:, 1])
    ket = normalized_ket(sampler)
    return np.ascontiguousarray(np.broadcast_to(ket, (u.shape[0], 2)))


def run_trials(name, sampler, trials, seed, start=0, backend=None):
    """Per-trial ``(outcome, step, ok, fidelity)`` arrays for trials ``start..start+trials-1``."""
    meas, steps, success = kernel_tables(name)
    u = trial_uniforms(seed, start, start + trials)
    inputs = _inputs(sampler, u)
    kern = get_kernel(backend)
    return kern(
        np.ascontiguousarray(CLONER), inputs, np.ascontiguousarray(u[:, 2]),
        np.ascontiguousarray(u[:, 3]), meas, steps, success,
    )


@dataclass(frozen=True)
class MonteCarloSummary:
    scenario: str
    sampler: str
    trials: int
    seed: int
    successes: int
    success_rate: float
    success_stderr: float
    outcome_frequencies: dict
    outcome_stderr: dict
    mean_fidelity: float
    fidelity_stderr: float
    min_fidelity: float

    def as_dict(self):
        return {
            "scenario": self.scenario,
            "sampler": self.sampler,
            "trials": self.trials,
            "seed": self.seed,
            "successes": self.successes,
            "success_rate": self.success_rate,
            "success_stderr": self.success_stderr,
            "outcome_frequencies": dict(self.outcome_frequencies),
            "outcome_stderr": dict(self.outcome_stderr),
            "mean_fidelity": self.mean_fidelity,
            "fidelity_stderr": self.fidelity_stderr,
            "min_fidelity": self.min_fidelity,
        }


def monte_carlo(name, sampler="uniform", trials=10000, seed=0, workers=1, chunk=50000, backend=None):
    """Estimate success rate, outcome frequencies and restoration fidelity.

    ``sampler`` is ``"uniform"`` (Bloch vector uniform on the sphere) or a
    fixed input ket. Results are identical for any ``workers``/``chunk``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sc = get_scenario(name)
    bounds = [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]

    def job(b):
        return run_trials(name, sampler, b[1] - b[0], seed, start=b[0], backend=backend)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, bounds))
    else:
        parts = [job(b) for b in bounds]
    k = np.concatenate([p[0] for p in parts])
    ok = np.concatenate([p[2] for p in parts]).astype(bool)
    fid = np.concatenate([p[3] for p in parts])

    n = trials
    ns = int(ok.sum())
    rate = ns / n
    counts = np.bincount(k, minlength=len(sc.outcome_labels))
    freqs = {lab: float(c / n) for lab, c in zip(sc.outcome_labels, counts)}
    errs = {lab: float(np.sqrt(f * (1 - f) / n)) for lab, f in freqs.items()}
    if ns:
        fs = fid[ok]
        mean_f = float(fs.mean())
        f_err = float(fs.std(ddof=1) / np.sqrt(ns)) if ns > 1 else 0.0
        min_f = float(fs.min())
    else:
        mean_f = f_err = min_f = float("nan")
    label = sampler if isinstance(sampler, str) else "fixed"
    return MonteCarloSummary(
        name, label, n, int(seed), ns, rate, float(np.sqrt(rate * (1 - rate) / n)),
        freqs, errs, mean_f, f_err, min_f,
    )
