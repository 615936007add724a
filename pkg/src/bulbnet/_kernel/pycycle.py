"""Reference (pure numpy) implementation of one gamma-cycle update.

This module defines the kernel semantics; the Cython backend mirrors it
exactly.  All weight arithmetic is int64, so results do not depend on
summation order and the two backends agree bit for bit.

One cycle runs in three phases:

1. Permissive epoch (mitral somata).  Inhibitory synapses whose granule
   cell spiked in the previous cycle block their column's MC for
   ``delta`` timesteps from cycle start and then release (+1) for one
   timestep; ``delta == 0`` synapses are inert and ``delta ==
   permissive_len`` blocks the whole epoch with no release.  The soma
   fires at the first timestep where apical drive plus synaptic
   contributions is positive.  In training mode somatic inhibition is
   suppressed and the soma fires exactly at the apical initiation time.

2. Blocking-period plasticity (training only).  Every synapse that ran a
   block/release sequence this cycle moves its blocking period toward
   the column's apical initiation time (toward a full-epoch block when
   the apical dendrite stayed silent).

3. Inhibitory epoch (granule cells).  MC spikes arrive after per-synapse
   delays; arrivals accumulate on each GC's excitation within the cycle.
   A synapse that carries a learned timing tag only contributes once its
   GC is mature and the arrival lands within ``phase_tol`` of the tag.
   A GC whose excitation reaches threshold at the end of timestep t
   spikes at t+1 (subject to refractoriness and one spike per cycle),
   flags its inhibitory synapse, and, when plastic, potentiates causal
   arrivals (stamping their timing tags) and depresses every other
   incoming synapse.
"""
import numpy as np


def run_cycle(
    t_ad,
    mc_ptr, syn_pre, syn_gc, syn_w, syn_delay, syn_phase,
    gc_ptr, gc_syn,
    gc_col, gc_cohort, gc_mature, gc_threshold,
    gc_refr_until, gc_pending, gc_held, gc_inh_updated,
    inh_delta,
    mc_ts_out, gc_ts_out,
    cycle_index, permissive_len, cycle_len, refractory, phase_tol,
    train, plastic_cohort, do_exc, do_inh,
    dp, dd, wcap, eta_milli, pot_exact,
):
    n_mc = t_ad.shape[0]
    n_gc = gc_col.shape[0]
    plen = permissive_len
    abs0 = cycle_index * cycle_len

    pend = gc_pending.astype(bool)
    gc_pending[:] = 0

    # --- phase 1: mitral somata ------------------------------------------
    if train:
        mc_ts_out[:] = t_ad
    else:
        active = pend & (inh_delta >= 1)
        idx = np.nonzero(active)[0]
        cols = gc_col[idx]
        deltas = inh_delta[idx].astype(np.int64)
        block_diff = np.zeros((n_mc, plen + 1), np.int32)
        np.add.at(block_diff, (cols, 0), -1)
        np.add.at(block_diff, (cols, np.minimum(deltas, plen)), 1)
        contrib = np.cumsum(block_diff[:, :plen], axis=1)
        rel = idx[deltas < plen]
        np.add.at(contrib, (gc_col[rel], inh_delta[rel].astype(np.int64)), 1)
        ts_grid = np.arange(plen, dtype=np.int64)[None, :]
        tad = t_ad.astype(np.int64)[:, None]
        ad = (tad >= 0) & (ts_grid >= tad)
        total = ad.astype(np.int32) + contrib
        pos = total > 0
        has = pos.any(axis=1)
        mc_ts_out[:] = -1
        mc_ts_out[has] = np.argmax(pos[has], axis=1)

    # --- phase 2: blocking-period updates (training) ---------------------
    # one update per synapse per sniff, on the first release after a GC
    # spike; with eta = 1 the later within-sniff updates would be no-ops
    # anyway (the release is already aligned), and with eta < 1 this keeps
    # noisy sniffs from compounding into a full-tracking step
    if train and do_inh and plastic_cohort >= 0:
        upd = (pend & (gc_cohort == plastic_cohort) & (gc_mature == 0)
               & (gc_inh_updated == 0))
        idx = np.nonzero(upd)[0]
        if idx.size:
            ta = t_ad[gc_col[idx]].astype(np.int64)
            ta = np.where(ta >= 0, ta, plen)
            tr = inh_delta[idx].astype(np.int64)
            raw = eta_milli * (ta - tr)
            # round fractional magnitudes up, away from zero
            db = np.where(raw > 0, (raw + 999) // 1000, -((-raw + 999) // 1000))
            inh_delta[idx] = np.clip(tr + db, 0, plen).astype(inh_delta.dtype)
            gc_inh_updated[idx] = 1

    # --- phase 3: granule cells ------------------------------------------
    sp = mc_ts_out[syn_pre].astype(np.int64)
    live = sp >= 0
    arr = np.where(live, sp + syn_delay, -1)
    gated = live & (
        (gc_mature[syn_gc] == 0)
        | (syn_phase < 0)
        | (np.abs(arr - syn_phase) <= phase_tol)
    )

    vbuf = np.zeros((n_gc, cycle_len), np.int64)
    np.add.at(vbuf, (syn_gc[gated], arr[gated]), syn_w[gated])
    cum = np.cumsum(vbuf, axis=1)
    ge = cum >= gc_threshold[:, None]
    crossed = ge[:, -1]
    first = np.argmax(ge, axis=1)

    emit = np.where(crossed, first + 1, -1)
    emit = np.where(crossed, np.maximum(emit, gc_refr_until - abs0), -1)
    ok = crossed & (emit <= cycle_len - 1)
    if train:
        heldmask = gc_held >= 0
        h = np.nonzero(heldmask)[0]
        if h.size:
            hts = gc_held[h].astype(np.int64)
            still = cum[h, hts - 1] >= gc_threshold[h]
            emit[h] = np.where(still, hts, -1)
            ok[h] = still
    spikers = np.nonzero(ok)[0]

    gc_ts_out[:] = -1
    if spikers.size:
        es = emit[spikers]
        # structural guarantee of the delay range; checked in the reference
        # backend (the compiled kernel is held equivalent by the parity tests)
        assert int(es.min()) > permissive_len, "GC spike outside the inhibitory epoch"
        gc_ts_out[spikers] = es
        gc_pending[spikers] = 1
        gc_refr_until[spikers] = abs0 + es + refractory
        if train:
            gc_held[spikers] = es.astype(gc_held.dtype)

        if do_exc and plastic_cohort >= 0:
            plastic = spikers[
                (gc_cohort[spikers] == plastic_cohort) & (gc_mature[spikers] == 0)
            ]
            if plastic.size:
                counts = (gc_ptr[plastic + 1] - gc_ptr[plastic]).astype(np.int64)
                flat = np.concatenate(
                    [gc_syn[gc_ptr[g]:gc_ptr[g + 1]] for g in plastic]
                )
                emit_flat = np.repeat(emit[plastic], counts)
                a = arr[flat]
                if pot_exact:
                    causal = (a >= 0) & (a == emit_flat - 1)
                else:
                    causal = (a >= 0) & (a <= emit_flat - 1)
                w = syn_w[flat]
                syn_w[flat] = np.where(
                    causal, np.minimum(w + dp, wcap), np.maximum(w - dd, 0)
                )
                # timing tags: stamp on first potentiation, then step toward the
                # arrival once per sniff (first cycle) so that across noisy
                # sniffs the majority (repeated) timing wins
                tagged = flat[causal]
                a_c = a[causal]
                ph = syn_phase[tagged].astype(np.int64)
                if cycle_index == 0:
                    ph = np.where(ph < 0, a_c, ph + np.sign(a_c - ph))
                else:
                    ph = np.where(ph < 0, a_c, ph)
                syn_phase[tagged] = ph.astype(syn_phase.dtype)
