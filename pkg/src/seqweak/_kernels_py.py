"""Pure-numpy implementations of the engine's hot kernels.

Amplitude tensors have shape ``(2, nx, ny)``: polarization index, x-pointer
index, y-pointer index; ``complex128`` and C-contiguous.
"""

import numpy as np


def couple_axis(amp, proj, steps, axis):
    """Apply ``(1 - P) ⊗ 1 + P ⊗ T(steps)`` along pointer ``axis`` (0=x, 1=y).

    Returns the new tensor and the probability pushed off the grid.
    """
    proj = np.asarray(proj, dtype=np.complex128)
    pa = np.einsum("st,tij->sij", proj, amp)
    out = amp - pa
    n = amp.shape[1 + axis]
    k = int(steps)
    if k == 0:
        return out + pa, 0.0
    src = [slice(None)] * 3
    dst = [slice(None)] * 3
    lost = [slice(None)] * 3
    if k > 0:
        src[1 + axis], dst[1 + axis], lost[1 + axis] = slice(0, n - k), slice(k, n), slice(n - k, n)
    else:
        src[1 + axis], dst[1 + axis], lost[1 + axis] = slice(-k, n), slice(0, n + k), slice(0, -k)
    out[tuple(dst)] += pa[tuple(src)]
    dropped = pa[tuple(lost)]
    return out, float(np.vdot(dropped, dropped).real)


def joint_moment(amp, xs, ys, jx, jy):
    """``Σ_s Σ_ij xs[i]^jx · ys[j]^jy · |amp[s, i, j]|²``."""
    prob = (amp.real**2 + amp.imag**2).sum(axis=0)
    return float(np.asarray(xs, dtype=float) ** jx @ prob @ np.asarray(ys, dtype=float) ** jy)
