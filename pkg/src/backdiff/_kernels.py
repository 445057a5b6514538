"""Compiled inner loops of the explicit scheme.

Dense kernels cover providers with a materialised weight matrix; stencil
kernels walk the disk offsets of local weights over the mirrored image
canvas.  All loops are single-threaded with fixed summation order so that
repeated runs are bit-identical.

Scalar flux/psi helpers exploit that difference arguments lie in (-1, 1)
and sum arguments in (0, 2), so no periodic fold is needed here; they must
agree with the general fold-based evaluation in `penaliser`.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency, keep an escape hatch
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


@njit(cache=True)
def _flux_diff(a: float, n: int, d: float) -> float:
    # d = v_j - v_i in (-1, 1); jump midpoint 0 at d == 0
    if d == 0.0:
        return 0.0
    if d < 0.0:
        return -(a * n * (-d - 1.0) ** (2 * n - 1))
    return a * n * (d - 1.0) ** (2 * n - 1)


@njit(cache=True)
def _flux_sum(a: float, n: int, s: float) -> float:
    # s = v_j + v_i in (0, 2), the base interval
    return a * n * (s - 1.0) ** (2 * n - 1)


@njit(cache=True)
def _psi_diff(a: float, n: int, d: float) -> float:
    if d < 0.0:
        d = -d
    return a * ((d - 1.0) ** (2 * n) - 1.0)


@njit(cache=True)
def _psi_sum(a: float, n: int, s: float) -> float:
    return a * ((s - 1.0) ** (2 * n) - 1.0)


# ---------------------------------------------------------------------------
# dense kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def dense_direction(v, W, a, n, out):
    N = v.size
    for i in range(N):
        vi = v[i]
        acc = 0.0
        for j in range(N):
            u = v[j]
            acc += W[i, j] * (_flux_diff(a, n, u - vi) - _flux_sum(a, n, u + vi))
        out[i] = acc


@njit(cache=True)
def dense_energy(v, W, a, n):
    N = v.size
    acc = 0.0
    for i in range(N):
        vi = v[i]
        for j in range(N):
            u = v[j]
            acc += W[i, j] * (_psi_diff(a, n, u - vi) + _psi_sum(a, n, u + vi))
    return 0.5 * acc


@njit(cache=True)
def dense_evolve(v, W, a, n, tau, n_full, rem, stop_res, energies, record, order):
    """Run the explicit scheme in place.

    n_full steps of size tau, then one step of size rem if rem > 0.
    Stops early once max |direction| < stop_res (disabled for
    stop_res <= 0).  When record is true, energies[k] receives the energy
    after k steps (index 0 holds the initial energy).  When order is
    non-empty it lists the initially ascending particle indices and strict
    ascent is re-checked after every step.

    Returns (steps done, min over all iterates, max over all iterates,
    number of order violations, stopped early flag).
    """
    N = v.size
    d = np.empty(N)
    vmin = 1.0
    vmax = 0.0
    violations = 0
    steps = 0
    stopped = False
    if record:
        energies[0] = dense_energy(v, W, a, n)
    for _ in range(n_full):
        dense_direction(v, W, a, n, d)
        res = 0.0
        for i in range(N):
            m = abs(d[i])
            if m > res:
                res = m
        if stop_res > 0.0 and res < stop_res:
            stopped = True
            break
        for i in range(N):
            v[i] += tau * d[i]
            if v[i] < vmin:
                vmin = v[i]
            if v[i] > vmax:
                vmax = v[i]
        steps += 1
        if order.size > 0:
            for k in range(N - 1):
                if not v[order[k]] < v[order[k + 1]]:
                    violations += 1
                    break
        if record:
            energies[steps] = dense_energy(v, W, a, n)
    if rem > 0.0 and not stopped:
        dense_direction(v, W, a, n, d)
        for i in range(N):
            v[i] += rem * d[i]
            if v[i] < vmin:
                vmin = v[i]
            if v[i] > vmax:
                vmax = v[i]
        steps += 1
        if order.size > 0:
            for k in range(N - 1):
                if not v[order[k]] < v[order[k + 1]]:
                    violations += 1
                    break
        if record:
            energies[steps] = dense_energy(v, W, a, n)
    return steps, vmin, vmax, violations, stopped


# ---------------------------------------------------------------------------
# stencil kernels (local disk weights over the 3x3 mirror canvas)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _mirror_pad(v2, U):
    # U has shape (3*ny, 3*nx); canvas coordinate c maps to row/col c + n
    ny, nx = v2.shape
    for y in range(ny):
        yt = ny - 1 - y          # top tile row (canvas -1-y)
        yb = 3 * ny - 1 - y      # bottom tile row (canvas 2*ny-1-y)
        yc = ny + y
        for x in range(nx):
            val = v2[y, x]
            xl = nx - 1 - x
            xr = 3 * nx - 1 - x
            xc = nx + x
            U[yc, xc] = val
            U[yc, xl] = val
            U[yc, xr] = val
            U[yt, xc] = val
            U[yt, xl] = val
            U[yt, xr] = val
            U[yb, xc] = val
            U[yb, xl] = val
            U[yb, xr] = val


@njit(cache=True)
def stencil_direction(v2, U, offs_x, offs_y, offs_g, a, n, out):
    ny, nx = v2.shape
    _mirror_pad(v2, U)
    for y in range(ny):
        for x in range(nx):
            out[y, x] = 0.0
    for k in range(offs_x.size):
        dx = offs_x[k]
        dy = offs_y[k]
        g = offs_g[k]
        # valid pixels: canvas coordinate x+dx in [-nx, 2nx), same for y
        x0 = max(0, -nx - dx)
        x1 = min(nx, 2 * nx - dx)
        y0 = max(0, -ny - dy)
        y1 = min(ny, 2 * ny - dy)
        for y in range(y0, y1):
            urow = U[y + dy + ny]
            for x in range(x0, x1):
                u = urow[x + dx + nx]
                vi = v2[y, x]
                out[y, x] += g * (_flux_diff(a, n, u - vi) - _flux_sum(a, n, u + vi))


@njit(cache=True)
def stencil_energy(v2, U, offs_x, offs_y, offs_g, a, n):
    ny, nx = v2.shape
    _mirror_pad(v2, U)
    acc = 0.0
    for k in range(offs_x.size):
        dx = offs_x[k]
        dy = offs_y[k]
        g = offs_g[k]
        x0 = max(0, -nx - dx)
        x1 = min(nx, 2 * nx - dx)
        y0 = max(0, -ny - dy)
        y1 = min(ny, 2 * ny - dy)
        for y in range(y0, y1):
            urow = U[y + dy + ny]
            for x in range(x0, x1):
                u = urow[x + dx + nx]
                vi = v2[y, x]
                acc += g * (_psi_diff(a, n, u - vi) + _psi_sum(a, n, u + vi))
    return 0.5 * acc


@njit(cache=True)
def stencil_evolve(v2, offs_x, offs_y, offs_g, a, n, tau, n_full, rem, stop_res, energies, record):
    """Explicit scheme on the pixel grid; same contract as dense_evolve
    minus the order monitor.  Returns (steps, vmin, vmax, stopped)."""
    ny, nx = v2.shape
    U = np.empty((3 * ny, 3 * nx))
    d = np.empty((ny, nx))
    vmin = 1.0
    vmax = 0.0
    steps = 0
    stopped = False
    if record:
        energies[0] = stencil_energy(v2, U, offs_x, offs_y, offs_g, a, n)
    for _ in range(n_full):
        stencil_direction(v2, U, offs_x, offs_y, offs_g, a, n, d)
        res = 0.0
        for y in range(ny):
            for x in range(nx):
                m = abs(d[y, x])
                if m > res:
                    res = m
        if stop_res > 0.0 and res < stop_res:
            stopped = True
            break
        for y in range(ny):
            for x in range(nx):
                v2[y, x] += tau * d[y, x]
                if v2[y, x] < vmin:
                    vmin = v2[y, x]
                if v2[y, x] > vmax:
                    vmax = v2[y, x]
        steps += 1
        if record:
            energies[steps] = stencil_energy(v2, U, offs_x, offs_y, offs_g, a, n)
    if rem > 0.0 and not stopped:
        stencil_direction(v2, U, offs_x, offs_y, offs_g, a, n, d)
        for y in range(ny):
            for x in range(nx):
                v2[y, x] += rem * d[y, x]
                if v2[y, x] < vmin:
                    vmin = v2[y, x]
                if v2[y, x] > vmax:
                    vmax = v2[y, x]
        steps += 1
        if record:
            energies[steps] = stencil_energy(v2, U, offs_x, offs_y, offs_g, a, n)
    return steps, vmin, vmax, stopped
