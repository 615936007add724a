# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled gamma-cycle kernel.

Mirrors pycycle.run_cycle exactly (same integer state arrays, same update
order); tests/test_kernel_parity.py enforces bit-for-bit agreement.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def run_cycle(
    cnp.int16_t[::1] t_ad,
    cnp.int64_t[::1] mc_ptr,
    cnp.int32_t[::1] syn_pre,
    cnp.int32_t[::1] syn_gc,
    cnp.int64_t[::1] syn_w,
    cnp.int16_t[::1] syn_delay,
    cnp.int16_t[::1] syn_phase,
    cnp.int64_t[::1] gc_ptr,
    cnp.int64_t[::1] gc_syn,
    cnp.int32_t[::1] gc_col,
    cnp.int32_t[::1] gc_cohort,
    cnp.uint8_t[::1] gc_mature,
    cnp.int64_t[::1] gc_threshold,
    cnp.int64_t[::1] gc_refr_until,
    cnp.uint8_t[::1] gc_pending,
    cnp.int16_t[::1] gc_held,
    cnp.uint8_t[::1] gc_inh_updated,
    cnp.int16_t[::1] inh_delta,
    cnp.int16_t[::1] mc_ts_out,
    cnp.int16_t[::1] gc_ts_out,
    int cycle_index, int permissive_len, int cycle_len, int refractory,
    int phase_tol,
    bint train, int plastic_cohort, bint do_exc, bint do_inh,
    long long dp, long long dd, long long wcap, long long eta_milli,
    bint pot_exact,
):
    cdef Py_ssize_t n_mc = t_ad.shape[0]
    cdef Py_ssize_t n_gc = gc_col.shape[0]
    cdef Py_ssize_t n_syn = syn_gc.shape[0]
    cdef int plen = permissive_len
    cdef long long abs0 = <long long>cycle_index * cycle_len

    cdef cnp.ndarray pend_arr = np.empty(n_gc, dtype=np.uint8)
    cdef cnp.uint8_t[::1] pend = pend_arr
    cdef Py_ssize_t g, m, k, i
    for g in range(n_gc):
        pend[g] = gc_pending[g]
        gc_pending[g] = 0

    # --- phase 1: mitral somata ------------------------------------------
    cdef cnp.ndarray contrib_arr
    cdef cnp.int32_t[:, ::1] contrib
    cdef int d, ts, total, spike_ts
    cdef int ta
    cdef int dstop
    if train:
        for m in range(n_mc):
            mc_ts_out[m] = t_ad[m]
    else:
        contrib_arr = np.zeros((n_mc, plen), dtype=np.int32)
        contrib = contrib_arr
        for g in range(n_gc):
            if pend[g] and inh_delta[g] >= 1:
                m = gc_col[g]
                d = inh_delta[g]
                dstop = d if d < plen else plen
                for ts in range(dstop):
                    contrib[m, ts] -= 1
                if d < plen:
                    contrib[m, d] += 1
        for m in range(n_mc):
            ta = t_ad[m]
            spike_ts = -1
            for ts in range(plen):
                total = contrib[m, ts]
                if ta >= 0 and ts >= ta:
                    total += 1
                if total > 0:
                    spike_ts = ts
                    break
            mc_ts_out[m] = spike_ts

    # --- phase 2: blocking-period updates (training) ---------------------
    cdef long long raw, db
    cdef int tr
    # one update per synapse per sniff (first release after a GC spike)
    if train and do_inh and plastic_cohort >= 0:
        for g in range(n_gc):
            if pend[g] and gc_cohort[g] == plastic_cohort and gc_mature[g] == 0 \
                    and gc_inh_updated[g] == 0:
                gc_inh_updated[g] = 1
                ta = t_ad[gc_col[g]]
                if ta < 0:
                    ta = plen
                tr = inh_delta[g]
                raw = eta_milli * <long long>(ta - tr)
                if raw > 0:
                    db = (raw + 999) // 1000
                elif raw < 0:
                    db = -((-raw + 999) // 1000)
                else:
                    db = 0
                raw = tr + db
                if raw < 0:
                    raw = 0
                if raw > plen:
                    raw = plen
                inh_delta[g] = <cnp.int16_t>raw

    # --- phase 3: granule cells ------------------------------------------
    cdef cnp.ndarray arr_arr = np.empty(n_syn, dtype=np.int16)
    cdef cnp.int16_t[::1] arr = arr_arr
    cdef cnp.ndarray vbuf_arr = np.zeros((n_gc, cycle_len), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] vbuf = vbuf_arr
    cdef int a
    cdef Py_ssize_t gg
    for m in range(n_mc):
        if mc_ts_out[m] >= 0:
            for k in range(mc_ptr[m], mc_ptr[m + 1]):
                a = mc_ts_out[m] + syn_delay[k]
                arr[k] = <cnp.int16_t>a
                gg = syn_gc[k]
                if gc_mature[gg] != 0 and syn_phase[k] >= 0:
                    if a - syn_phase[k] > phase_tol or syn_phase[k] - a > phase_tol:
                        continue
                vbuf[gg, a] += syn_w[k]
        else:
            for k in range(mc_ptr[m], mc_ptr[m + 1]):
                arr[k] = -1

    cdef long long cum, theta
    cdef int first, emit, hts
    cdef bint ok
    for g in range(n_gc):
        gc_ts_out[g] = -1
        theta = gc_threshold[g]
        cum = 0
        first = -1
        for ts in range(cycle_len):
            cum += vbuf[g, ts]
            if cum >= theta:
                first = ts
                break
        if train and gc_held[g] >= 0:
            # spike phase held within the sniff
            hts = gc_held[g]
            if first < 0 or first > hts - 1:
                continue
            emit = hts
        else:
            if first < 0:
                continue
            emit = first + 1
            if abs0 + emit < gc_refr_until[g]:
                emit = <int>(gc_refr_until[g] - abs0)
            if emit > cycle_len - 1:
                continue
        gc_ts_out[g] = <cnp.int16_t>emit
        gc_pending[g] = 1
        gc_refr_until[g] = abs0 + emit + refractory
        if train:
            gc_held[g] = <cnp.int16_t>emit

        if train and do_exc and plastic_cohort >= 0 \
                and gc_cohort[g] == plastic_cohort and gc_mature[g] == 0:
            for i in range(gc_ptr[g], gc_ptr[g + 1]):
                k = gc_syn[i]
                a = arr[k]
                if pot_exact:
                    ok = a >= 0 and a == emit - 1
                else:
                    ok = a >= 0 and a <= emit - 1
                if ok:
                    syn_w[k] = syn_w[k] + dp
                    if syn_w[k] > wcap:
                        syn_w[k] = wcap
                    # stamp on first potentiation, then step toward the
                    # arrival once per sniff (first cycle only)
                    if syn_phase[k] < 0:
                        syn_phase[k] = <cnp.int16_t>a
                    elif cycle_index == 0:
                        if a > syn_phase[k]:
                            syn_phase[k] = syn_phase[k] + 1
                        elif a < syn_phase[k]:
                            syn_phase[k] = syn_phase[k] - 1
                else:
                    syn_w[k] = syn_w[k] - dd
                    if syn_w[k] < 0:
                        syn_w[k] = 0
