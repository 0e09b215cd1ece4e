"""Compiled window loop; same step arithmetic as `lif.Population`."""
import numpy as np
from numba import njit


@njit(cache=True)
def run_window_kernel(keep_c, keep_v, gain, i0, thr, reset, refr_steps,
                      w, bias, forced_idx, forced, init_current, record):
    batch, n_forced, steps = forced.shape
    n = w.shape[0]
    counts = np.zeros((batch, n), dtype=np.int64)
    current = init_current.copy()
    raster = np.zeros((batch, n, steps if record else 0), dtype=np.bool_)
    for b in range(batch):
        voltage = np.zeros(n)
        refr = np.zeros(n, dtype=np.int64)
        spikes = np.zeros(n, dtype=np.bool_)
        new = np.zeros(n, dtype=np.bool_)
        for i in range(steps):
            for j in range(n):
                y = bias[j]
                for k in range(n):
                    if spikes[k]:
                        y += w[k, j]
                current[b, j] = current[b, j] * keep_c[j] + i0[j] * y
                v = voltage[j] * keep_v[j] + gain[j] * current[b, j]
                if refr[j] > 0:
                    voltage[j] = reset[j]
                    refr[j] -= 1
                    new[j] = False
                elif v >= thr[j]:
                    voltage[j] = reset[j]
                    refr[j] = refr_steps[j]
                    new[j] = True
                else:
                    voltage[j] = v
                    new[j] = False
            for f in range(n_forced):
                new[forced_idx[f]] = forced[b, f, i]
            for j in range(n):
                spikes[j] = new[j]
                if new[j]:
                    counts[b, j] += 1
                    if record:
                        raster[b, j, i] = True
    return counts, current, raster
