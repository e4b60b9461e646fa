"""Hot numeric kernels: log-space triangular recurrences and sequential samplers.

Kernels are JIT-compiled with numba when it is importable, unless the
environment variable ``OSSP_NUMBA`` is set to ``0``/``false``/``off``, in
which case a pure-numpy path is used instead.

Two families live here:

* recurrence kernels (``gfc_log_row``, ``gfc_nc_log_row``,
  ``oldest_inv_moments``): the active name is a scalar-loop version under
  numba, or a row-vectorized numpy version otherwise; both evaluate the same
  recurrence and agree to ~1e-13 relative.
* sampler kernels (``ocrp_steps``, ``ocrp_qnew``, ``crp_steps``,
  ``stable_order_steps``, ``mc_chunk``): one source serves both paths, so
  they consume an identical uniform stream and produce identical output
  whether or not the JIT is active.

``PY_IMPLS`` maps kernel names to the fallback callables for benchmarking.
"""

from __future__ import annotations

import math
import os

import numpy as np

NEG_INF = -math.inf


def numba_requested() -> bool:
    return os.environ.get("OSSP_NUMBA", "1").strip().lower() not in {"0", "false", "no", "off"}


def _make_jit():
    if not numba_requested():
        return None
    try:
        from numba import njit
    except ImportError:
        return None
    return njit(cache=True, nogil=True)


_njit = _make_jit()
NUMBA_ACTIVE = _njit is not None
if _njit is None:
    def _njit(fn):  # identity decorator: samplers run as plain Python
        return fn


# ---------------------------------------------------------------------------
# recurrence kernels
#
# gfc_log_row: log of C(n,k;alpha)/alpha^k for k = 0..n via the triangular
# recurrence D(n+1,k) = (n - k*alpha) D(n,k) + D(n,k-1), D(0,0) = 1. At
# alpha = 0 this is the unsigned Stirling recurrence, so the same cells give
# the DP limit log|s(n,k)|. All surviving terms are positive, so each cell is
# a plain log-sum-exp of two terms.
# ---------------------------------------------------------------------------


@_njit
def _lae(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


@_njit
def _gfc_log_row_scalar(n, alpha):
    row = np.full(n + 1, NEG_INF)
    row[0] = 0.0
    for nn in range(n):
        hi = min(nn + 1, n)
        for k in range(hi, 0, -1):
            keep = NEG_INF
            if row[k] > NEG_INF:
                # D(nn,k) > 0 implies k <= nn, hence nn - k*alpha > 0
                keep = row[k] + math.log(nn - k * alpha)
            row[k] = _lae(keep, row[k - 1])
        row[0] = NEG_INF
    return row


def _gfc_log_row_np(n, alpha):
    row = np.full(n + 1, NEG_INF)
    row[0] = 0.0
    ks = np.arange(1, n + 1, dtype=np.float64)
    for nn in range(n):
        hi = min(nn + 1, n)
        # clamped log keeps -inf cells -inf without tripping on nn - k*alpha <= 0
        fac = np.log(np.maximum(nn - ks[:hi] * alpha, 1e-300))
        row[1:hi + 1] = np.logaddexp(row[1:hi + 1] + fac, row[0:hi])
        row[0] = NEG_INF
    return row


@_njit
def _gfc_nc_log_row_scalar(m, alpha, gamma):
    row = np.full(m + 1, NEG_INF)
    row[0] = 0.0
    log_d0 = 0.0  # log (-gamma)_(mm)
    for mm in range(m):
        hi = min(mm + 1, m)
        for s in range(hi, 0, -1):
            keep = NEG_INF
            if row[s] > NEG_INF:
                keep = row[s] + math.log(mm - s * alpha - gamma)
            row[s] = _lae(keep, row[s - 1])
        log_d0 += math.log(mm - gamma)
        row[0] = log_d0
    return row


def _gfc_nc_log_row_np(m, alpha, gamma):
    row = np.full(m + 1, NEG_INF)
    row[0] = 0.0
    ss = np.arange(1, m + 1, dtype=np.float64)
    log_d0 = 0.0
    for mm in range(m):
        hi = min(mm + 1, m)
        fac = np.log(np.maximum(mm - ss[:hi] * alpha - gamma, 1e-300))
        row[1:hi + 1] = np.logaddexp(row[1:hi + 1] + fac, row[0:hi])
        log_d0 += math.log(mm - gamma)
        row[0] = log_d0
    return row


@_njit
def _oldest_inv_moments_scalar(nmax, alpha, theta):
    out = np.empty(nmax + 1)
    out[0] = 1.0 / theta  # K_0 = 0
    row = np.full(nmax + 1, NEG_INF)
    row[0] = 0.0
    logpref = np.empty(nmax + 1)  # sum_{i<k} log(theta + i*alpha)
    logpref[0] = 0.0
    for k in range(1, nmax + 1):
        logpref[k] = logpref[k - 1] + math.log(theta + (k - 1) * alpha)
    log_rise = 0.0  # log (theta)_(j)
    for j in range(1, nmax + 1):
        nn = j - 1
        hi = min(nn + 1, nmax)
        for k in range(hi, 0, -1):
            keep = NEG_INF
            if row[k] > NEG_INF:
                keep = row[k] + math.log(nn - k * alpha)
            row[k] = _lae(keep, row[k - 1])
        row[0] = NEG_INF
        log_rise += math.log(theta + nn)
        acc = 0.0
        for k in range(1, j + 1):
            acc += math.exp(logpref[k] + row[k] - log_rise) / (theta + alpha * k)
        out[j] = acc
    return out


def _oldest_inv_moments_np(nmax, alpha, theta):
    out = np.empty(nmax + 1)
    out[0] = 1.0 / theta
    row = np.full(nmax + 1, NEG_INF)
    row[0] = 0.0
    k = np.arange(nmax + 1, dtype=np.float64)
    logpref = np.concatenate(([0.0], np.cumsum(np.log(theta + alpha * k[:-1]))))
    inv = 1.0 / (theta + alpha * k)
    log_rise = 0.0
    for j in range(1, nmax + 1):
        nn = j - 1
        hi = min(nn + 1, nmax)
        fac = np.log(np.maximum(nn - k[1:hi + 1] * alpha, 1e-300))
        row[1:hi + 1] = np.logaddexp(row[1:hi + 1] + fac, row[0:hi])
        row[0] = NEG_INF
        log_rise += math.log(theta + nn)
        lp = logpref[1:j + 1] + row[1:j + 1] - log_rise
        out[j] = float(np.exp(lp) @ inv[1:j + 1])
    return out


# ---------------------------------------------------------------------------
# sampler kernels (shared source for both paths)
# ---------------------------------------------------------------------------


def _ocrp_steps_impl(u, alpha, theta, freqs, ids, k, next_id, assign, t0):
    """Advance the ordered CRP by len(u) steps, one uniform per step.

    freqs[j] / ids[j] hold the count and creation id of the species at order
    j (0-based, 0 = oldest); both are modified in place and must have room
    for every table the steps can open. assign[t0+t] records the creation id
    joined at step t. Returns the updated (k, next_id).
    """
    n = 0
    for j in range(k):
        n += freqs[j]
    for t in range(u.shape[0]):
        x = u[t]
        tot = theta + n
        prod = 1.0
        rj = float(n)
        acc = 0.0
        pos = -1
        is_new = True
        for j in range(k):
            q = (theta + alpha * rj) / ((1.0 + rj) * tot) * prod
            acc += q
            if x < acc:
                pos = j
                is_new = True
                break
            mj = freqs[j]
            rj1 = rj - mj
            base = alpha * rj1 + theta * mj
            q = rj * (mj - alpha) * (base + theta) / ((1.0 + rj) * tot * base) * prod
            acc += q
            if x < acc:
                pos = j
                is_new = False
                break
            prod *= rj * (base + alpha) / ((rj + 1.0) * base)
            rj = rj1
        if pos < 0:
            pos = k  # youngest new slot absorbs the rounding residue
            is_new = True
        if is_new:
            for i in range(k, pos, -1):
                freqs[i] = freqs[i - 1]
                ids[i] = ids[i - 1]
            freqs[pos] = 1
            ids[pos] = next_id
            assign[t0 + t] = next_id
            next_id += 1
            k += 1
        else:
            freqs[pos] += 1
            assign[t0 + t] = ids[pos]
        n += 1
    return k, next_id


def _ocrp_qnew_impl(freqs, k, alpha, theta, out):
    """New-table order probabilities q_new[0..k] at the current state."""
    n = 0
    for j in range(k):
        n += freqs[j]
    tot = theta + n
    prod = 1.0
    rj = float(n)
    for j in range(k):
        out[j] = (theta + alpha * rj) / ((1.0 + rj) * tot) * prod
        mj = freqs[j]
        rj1 = rj - mj
        base = alpha * rj1 + theta * mj
        prod *= rj * (base + alpha) / ((rj + 1.0) * base)
        rj = rj1
    out[k] = theta / tot * prod  # r_{k+1} = 0
    return n


def _crp_steps_impl(u, alpha, theta, sizes, assign, k, n, t0):
    """Advance the classical (unordered) CRP; cluster ids follow arrival order."""
    for t in range(u.shape[0]):
        x = u[t] * (theta + n)
        thresh = theta + k * alpha
        if x < thresh:
            sizes[k] = 1
            assign[t0 + t] = k
            k += 1
        else:
            x -= thresh
            c = 0
            while c < k - 1:
                w = sizes[c] - alpha
                if x < w:
                    break
                x -= w
                c += 1
            sizes[c] += 1
            assign[t0 + t] = c
        n += 1
    return k


def _stable_order_steps_impl(assign, u, freqs, ids, ord_of, k):
    """Insert arriving clusters into the order under the theta->0 stable rule.

    The limit of the ordered-PYP new-table law at theta=0 puts weight 1 on
    each of the k existing order slots and 1/m_k on the youngest slot, m_k
    being the current youngest species' frequency. Consumes u[t] only when
    step t opens a cluster. Returns updated k.
    """
    for t in range(assign.shape[0]):
        c = assign[t]
        if c == k:  # new cluster: ids arrive consecutively
            if k == 0:
                pos = 0
            else:
                x = u[t] * (k + 1.0 / freqs[k - 1])
                if x >= k:
                    pos = k
                else:
                    pos = int(x)
            for i in range(k, pos, -1):
                freqs[i] = freqs[i - 1]
                ids[i] = ids[i - 1]
                ord_of[ids[i]] = i
            freqs[pos] = 1
            ids[pos] = c
            ord_of[c] = pos
            k += 1
        else:
            freqs[ord_of[c]] += 1
    return k


ocrp_steps = _njit(_ocrp_steps_impl)
ocrp_qnew = _njit(_ocrp_qnew_impl)
crp_steps = _njit(_crp_steps_impl)
stable_order_steps = _njit(_stable_order_steps_impl)


def _make_mc_chunk(run_steps):
    def _mc_chunk_impl(U, alpha, theta, n, m, cond_k, cond_m1, cond_freqs,
                       freqs, ids, assign, out_kmn, out_w1, out_a1, out_w2, out_a2):
        """Acceptance-rejection attempts over the rows of U (each n+m uniforms).

        A run is accepted when its size-n state matches the condition:
        cond_freqs (when non-empty) must equal the full ordered frequency
        vector; otherwise cond_k > 0 pins K_n and cond_m1 > 0 pins M_1.
        Accepted runs continue m steps; enlarged order-1 and order-2
        outcomes are compacted into the out arrays (w2 = 0 when the enlarged
        sample has a single species). Returns the number accepted.
        """
        cnt = 0
        kc = cond_freqs.shape[0]
        for b in range(U.shape[0]):
            k, next_id = run_steps(U[b, :n], alpha, theta, freqs, ids, 0, 0, assign, 0)
            ok = True
            if kc > 0:
                if k != kc:
                    ok = False
                else:
                    for j in range(kc):
                        if freqs[j] != cond_freqs[j]:
                            ok = False
                            break
            else:
                if cond_k > 0 and k != cond_k:
                    ok = False
                if ok and cond_m1 > 0 and freqs[0] != cond_m1:
                    ok = False
            if not ok:
                continue
            kn = k
            k, next_id = run_steps(U[b, n:n + m], alpha, theta, freqs, ids, k, next_id, assign, n)
            out_kmn[cnt] = k - kn
            out_w1[cnt] = freqs[0]
            out_a1[cnt] = 1 if ids[0] >= kn else 0
            if k >= 2:
                out_w2[cnt] = freqs[1]
                out_a2[cnt] = 1 if ids[1] >= kn else 0
            else:
                out_w2[cnt] = 0
                out_a2[cnt] = 0
            cnt += 1
        return cnt

    return _mc_chunk_impl


mc_chunk = _njit(_make_mc_chunk(ocrp_steps))

# fallback aliases: plain-Python samplers and numpy recurrences
ocrp_steps_py = _ocrp_steps_impl
ocrp_qnew_py = _ocrp_qnew_impl
crp_steps_py = _crp_steps_impl
stable_order_steps_py = _stable_order_steps_impl
mc_chunk_py = _make_mc_chunk(_ocrp_steps_impl)
gfc_log_row_py = _gfc_log_row_np
gfc_nc_log_row_py = _gfc_nc_log_row_np
oldest_inv_moments_py = _oldest_inv_moments_np

if NUMBA_ACTIVE:
    gfc_log_row = _gfc_log_row_scalar
    gfc_nc_log_row = _gfc_nc_log_row_scalar
    oldest_inv_moments = _oldest_inv_moments_scalar
else:
    gfc_log_row = _gfc_log_row_np
    gfc_nc_log_row = _gfc_nc_log_row_np
    oldest_inv_moments = _oldest_inv_moments_np

PY_IMPLS = {
    "gfc_log_row": gfc_log_row_py,
    "gfc_nc_log_row": gfc_nc_log_row_py,
    "oldest_inv_moments": oldest_inv_moments_py,
    "ocrp_steps": ocrp_steps_py,
    "ocrp_qnew": ocrp_qnew_py,
    "crp_steps": crp_steps_py,
    "stable_order_steps": stable_order_steps_py,
    "mc_chunk": mc_chunk_py,
}
