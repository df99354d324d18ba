"""Pure numpy implementation of the trial kernel (used when the extension is not built)."""
import numpy as np


def _pick(probs, u):
    # first index whose running sum exceeds u * total, skipping zero-probability entries
    acc = np.cumsum(probs, axis=1)
    target = (u * acc[:, -1])[:, None]
    hit = (acc > target) & (probs > 0)
    k = np.argmax(hit, axis=1)
    none = ~hit.any(axis=1)
    if none.any():
        last = probs.shape[1] - 1 - np.argmax((probs[:, ::-1] > 0), axis=1)
        k[none] = last[none]
    return k


def simulate_trials(iso, inputs, u_outcome, u_step, meas, steps, success):
    """Simulate independent restoration trials.

    iso      (8, 2)         cloner isometry
    inputs   (n, 2)         normalized input kets
    u_outcome, u_step (n,)  uniforms in [0, 1) for the two sampling stages
    meas     (K, 2, 8)      output state -> target amplitudes, per first-stage outcome
    steps    (K, J, 2, 2)   second-stage Kraus operators (zero-padded)
    success  (K, J)         1 where the branch restores the input

    Returns ``(outcome, step, ok, fidelity)`` arrays of length n.
    """
    A = meas @ iso                                         # (K, 2, 2) input -> target
    cond = np.einsum("ktb,nb->nkt", A, inputs)             # (n, K, 2)
    p = (cond.real ** 2 + cond.imag ** 2).sum(axis=2)      # (n, K)
    k = _pick(p, u_outcome)
    rows = np.arange(inputs.shape[0])
    psi = cond[rows, k] / np.sqrt(p[rows, k])[:, None]     # (n, 2)
    d = np.einsum("njab,nb->nja", steps[k], psi)           # (n, J, 2)
    q = (d.real ** 2 + d.imag ** 2).sum(axis=2)
    j = _pick(q, u_step)
    fin = d[rows, j] / np.sqrt(q[rows, j])[:, None]
    ov = (np.conj(inputs) * fin).sum(axis=1)
    fid = ov.real ** 2 + ov.imag ** 2
    return k.astype(np.int64), j.astype(np.int64), success[k, j].astype(np.uint8), fid
