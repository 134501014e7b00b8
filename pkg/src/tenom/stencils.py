"""Candidate-stencil reconstruction kernels and smoothness indicators.

Interface values at i+1/2 are reconstructed from sliding windows of point
values.  A window of width K (K = 6 or 8) holds the points f_{i-K/2+1} ..
f_{i+K/2} ordered left to right.  From each window, a set of K-2 candidate
stencils of incremental width produces low-order interface values; Jiang-Shu
type smoothness indicators classify each candidate as smooth or nonsmooth
through a sharp cut-off on normalized scale-separation indicators.

All reconstruction coefficients and indicator quadratic forms are generated
at import time by exact rational arithmetic (moment-matching of the sliding
averages, analytic integration of squared derivatives).  Indicators are
stored as sum-of-squares factor rows so they remain nonnegative in floating
point.  Every kernel broadcasts over leading axes: a window argument of shape
(..., K) yields results of shape (...,).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "SmoothnessParams",
    "AdaptParams",
    "SUPPORTED_ORDERS",
    "candidate_offsets",
    "candidate_widths",
    "window_offsets",
    "ghost_width",
    "candidate_table",
    "candidate_flux",
    "candidate_values",
    "beta_candidate",
    "beta_global",
    "beta_all",
    "tau",
    "gamma_indicators",
    "normalize_chi",
    "cutoff_delta",
    "adapt_ct",
    "survivors",
    "optimal_weights",
    "linear_coefficients",
    "linear_flux",
    "teno_flux",
]

SUPPORTED_ORDERS = (6, 8)


@dataclass(frozen=True)
class SmoothnessParams:
    """Scale-separation constants for the nonlinear indicators."""

    c: float = 1.0
    q: int = 6
    eps: float = 1e-40


@dataclass(frozen=True)
class AdaptParams:
    """Constants of the cut-off adaptation driven by first differences."""

    xi: float = 1e-3
    cr: float = 0.23
    alpha1: float = 10.5
    alpha2: float = 3.5

    def __post_init__(self):
        if not 0.0 < 0.9 * self.cr < 1.0:
            raise ValueError(f"cr={self.cr} out of admissible range")

    @property
    def eps(self) -> float:
        """Regularization keeping 0/0 ratios of differences at 1."""
        return 0.9 * self.cr * self.xi**2 / (1.0 - 0.9 * self.cr)


DEFAULT_SMOOTH = SmoothnessParams()
DEFAULT_ADAPT = AdaptParams()

# Candidate stencils by point offsets relative to cell i (interface i+1/2).
# The first three are the classical 3-point stencils (centered, downwind,
# upwind); wider candidates always keep at least one upwind point.
_CANDIDATES = {
    6: ((-1, 0, 1), (0, 1, 2), (-2, -1, 0), (0, 1, 2, 3)),
    8: (
        (-1, 0, 1),
        (0, 1, 2),
        (-2, -1, 0),
        (0, 1, 2, 3),
        (-3, -2, -1, 0),
        (0, 1, 2, 3, 4),
    ),
}


def candidate_offsets(order: int) -> tuple[tuple[int, ...], ...]:
    """Point offsets (relative to cell i) of each candidate stencil."""
    _check_order(order)
    return _CANDIDATES[order]


def candidate_widths(order: int) -> tuple[int, ...]:
    """Point counts of the candidate stencils, in candidate order."""
    return tuple(len(s) for s in candidate_offsets(order))


def window_offsets(order: int) -> tuple[int, ...]:
    """Offsets relative to cell i covered by a width-`order` window."""
    first = 1 - (order + 1) // 2
    return tuple(range(first, first + order))


def ghost_width(order: int) -> int:
    """Ghost layers needed so every interior face has a full window."""
    return (order + 1) // 2


def _check_order(order: int) -> None:
    if order not in _CANDIDATES:
        raise ValueError(f"unsupported order {order}; expected one of {SUPPORTED_ORDERS}")


# ---------------------------------------------------------------------------
# Exact rational generation of reconstruction coefficients and indicators
# ---------------------------------------------------------------------------


def _mat_inv(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    """Invert a square Fraction matrix by Gauss-Jordan elimination."""
    n = len(mat)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = Fraction(1) / aug[col][col]
        aug[col] = [v * inv_p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * p for v, p in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _coeff_map(offsets: tuple[int, ...]) -> list[list[Fraction]]:
    """Map point values to monomial coefficients of the reconstruction.

    The degree-(r-1) polynomial p(x) (x in cell units, origin at cell i)
    is pinned by requiring its sliding unit-cell average over each stencil
    cell to equal the point value there.  Returns A with a = A f.
    """
    r = len(offsets)
    moments = [
        [
            (Fraction(2 * m + 1, 2) ** (l + 1) - Fraction(2 * m - 1, 2) ** (l + 1))
            / (l + 1)
            for l in range(r)
        ]
        for m in offsets
    ]
    return _mat_inv(moments)


def _interface_coeffs(offsets: tuple[int, ...]) -> list[Fraction]:
    """Exact coefficients c_m with p(1/2) = sum_m c_m f_m."""
    a_map = _coeff_map(offsets)
    half = [Fraction(1, 2) ** l for l in range(len(offsets))]
    return [sum(half[l] * a_map[l][m] for l in range(len(offsets))) for m in range(len(offsets))]


def _legendre_coeffs(max_deg: int) -> list[list[Fraction]]:
    """Monomial coefficients of Legendre polynomials P_0..P_max_deg."""
    polys = [[Fraction(1)], [Fraction(0), Fraction(1)]]
    for l in range(1, max_deg):
        prev, cur = polys[l - 1], polys[l]
        nxt = [Fraction(0)] * (l + 2)
        for m, c in enumerate(cur):
            nxt[m + 1] += Fraction(2 * l + 1, l + 1) * c
        for m, c in enumerate(prev):
            nxt[m] -= Fraction(l, l + 1) * c
        polys.append(nxt)
    return polys[: max_deg + 1]


def _indicator_rows_exact(offsets: tuple[int, ...]):
    """Exact sum-of-squares factors: beta(f) = sum_t scale_t^2 (lam_t . f)^2.

    beta integrates the squared derivatives (orders 1..r-1) of the candidate
    polynomial over the central cell [-1/2, 1/2], each derivative scaled by
    the grid power that makes the result dimensionless.  Each derivative's
    square integral is expanded in shifted Legendre modes: the mode weights
    lam are exact rationals and annihilate constants; only the orthogonality
    scaling is irrational.
    """
    r = len(offsets)
    a_map = _coeff_map(offsets)  # a_l = sum_m a_map[l][m] f_m
    legendre = _legendre_coeffs(max(r - 1, 1))
    rows: list[tuple[list[Fraction], float]] = []
    for j in range(1, r):
        # Monomial coefficients of the j-th derivative, per point value.
        deriv = []
        for l in range(r - j):
            fac = Fraction(1)
            for t in range(j):
                fac *= l + j - t
            deriv.append([fac * a_map[l + j][m] for m in range(r)])
        deg = r - 1 - j
        for ell in range(deg + 1):
            # lambda_ell = (2 ell + 1)/2 * int_{-1}^{1} p(xi/2) P_ell(xi) dxi
            lam = [Fraction(0)] * r
            for m_pow in range(deg + 1):
                weight = Fraction(0)
                for a_pow, pc in enumerate(legendre[ell]):
                    tot = m_pow + a_pow
                    if tot % 2 == 0:
                        weight += pc * Fraction(2, tot + 1)
                weight *= Fraction(2 * ell + 1, 2) * Fraction(1, 2**m_pow)
                if weight:
                    for m in range(r):
                        lam[m] += weight * deriv[m_pow][m]
            rows.append((lam, 1.0 / np.sqrt(2.0 * ell + 1.0)))
    return rows


def _diff_rows(offsets: tuple[int, ...], order: int) -> np.ndarray:
    """Indicator factor rows acting on consecutive window differences.

    Each exact factor row annihilates constants, so it rewrites exactly as
    a combination of first differences via rational partial sums; constant
    windows then produce beta = 0 identically in floating point.
    """
    win = window_offsets(order)
    cols = [win.index(o) for o in offsets]
    out = []
    for lam, scale in _indicator_rows_exact(offsets):
        full = [Fraction(0)] * order
        for col, v in zip(cols, lam):
            full[col] = v
        partial = []
        acc = Fraction(0)
        for v in full[:-1]:
            acc += v
            partial.append(-acc)
        assert acc + full[-1] == 0, "factor row must annihilate constants"
        out.append([float(p) * scale for p in partial])
    return np.asarray(out, dtype=np.float64)


def _embed(values: np.ndarray, offsets: tuple[int, ...], order: int) -> np.ndarray:
    """Scatter per-stencil columns into full-window columns."""
    win = window_offsets(order)
    cols = [win.index(o) for o in offsets]
    out = np.zeros(values.shape[:-1] + (order,), dtype=np.float64)
    out[..., cols] = values
    return out


def _optimal_weights_exact(order: int) -> list[Fraction]:
    """Solve the moment system matching the full-window reconstruction."""
    target = _interface_coeffs(window_offsets(order))
    cands = candidate_offsets(order)
    ncand = len(cands)
    win = window_offsets(order)
    # Rows: one equation per window column; consistent overdetermined system.
    rows = []
    rhs = []
    for col, off in enumerate(win):
        row = [Fraction(0)] * ncand
        for k, st in enumerate(cands):
            if off in st:
                row[k] = _TABLE_EXACT[order][k][st.index(off)]
        rows.append(row)
        rhs.append(target[col])
    # Gaussian elimination with column pivoting on the tall system.
    sol = [Fraction(0)] * ncand
    used_rows: list[int] = []
    for k in range(ncand):
        piv = next(
            r for r in range(len(rows)) if r not in used_rows and rows[r][k] != 0
        )
        used_rows.append(piv)
        inv_p = Fraction(1) / rows[piv][k]
        rows[piv] = [v * inv_p for v in rows[piv]]
        rhs[piv] *= inv_p
        for r in range(len(rows)):
            if r != piv and rows[r][k] != 0:
                f = rows[r][k]
                rows[r] = [v - f * p for v, p in zip(rows[r], rows[piv])]
                rhs[r] -= f * rhs[piv]
    for k, r in enumerate(used_rows):
        sol[k] = rhs[r]
    for r in range(len(rows)):
        if r not in used_rows and rhs[r] != 0:
            raise AssertionError("inconsistent moment system")
    return sol


_TABLE_EXACT = {
    order: tuple(_interface_coeffs(st) for st in _CANDIDATES[order])
    for order in SUPPORTED_ORDERS
}

_CAND_COEFFS = {
    order: np.stack(
        [
            _embed(np.array([float(c) for c in row]), st, order)
            for row, st in zip(_TABLE_EXACT[order], _CANDIDATES[order])
        ]
    )
    for order in SUPPORTED_ORDERS
}

_CAND_SOS = {
    order: tuple(_diff_rows(st, order) for st in _CANDIDATES[order])
    for order in SUPPORTED_ORDERS
}

_GLOBAL_SOS = {
    order: _diff_rows(window_offsets(order), order) for order in SUPPORTED_ORDERS
}

_OPT_EXACT = {order: _optimal_weights_exact(order) for order in SUPPORTED_ORDERS}

# Fused indicator evaluation: stack every sum-of-squares row (all candidates
# plus the full window) and segment-sum the squares with a 0/1 group matrix,
# so beta_all costs two small matrix products on the window differences.
def _fused_sos(order: int) -> tuple[np.ndarray, np.ndarray]:
    blocks = list(_CAND_SOS[order]) + [_GLOBAL_SOS[order]]
    stack = np.vstack(blocks)
    groups = np.zeros((stack.shape[0], len(blocks)))
    row = 0
    for gidx, blk in enumerate(blocks):
        groups[row : row + blk.shape[0], gidx] = 1.0
        row += blk.shape[0]
    return np.ascontiguousarray(stack.T), groups  # (K-1, T), (T, ncand+1)


_FUSED_SOS = {order: _fused_sos(order) for order in SUPPORTED_ORDERS}

_OPT_WEIGHTS = {
    order: np.array([float(d) for d in _OPT_EXACT[order]]) for order in SUPPORTED_ORDERS
}

_LINEAR_COEFFS = {
    order: np.array([float(c) for c in _interface_coeffs(window_offsets(order))])
    for order in SUPPORTED_ORDERS
}


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


def candidate_table(order: int) -> np.ndarray:
    """Reconstruction coefficients, shape (n_candidates, order).

    Row k holds the dot-product weights of candidate k embedded into full
    window columns (zero outside the candidate's support).
    """
    _check_order(order)
    return _CAND_COEFFS[order].copy()


def candidate_flux(k: int, window: np.ndarray) -> np.ndarray:
    """Interface value of candidate stencil k for the given window(s)."""
    window = np.asarray(window, dtype=np.float64)
    order = window.shape[-1]
    _check_order(order)
    if not 0 <= k < len(_CANDIDATES[order]):
        raise ValueError(f"candidate index {k} out of range for order {order}")
    return window @ _CAND_COEFFS[order][k]


def candidate_values(window: np.ndarray) -> np.ndarray:
    """All candidate interface values, shape (..., n_candidates)."""
    window = np.asarray(window, dtype=np.float64)
    _check_order(window.shape[-1])
    return window @ _CAND_COEFFS[window.shape[-1]].T


def beta_candidate(k: int, window: np.ndarray) -> np.ndarray:
    """Smoothness indicator of candidate k (nonnegative, 0 for constants)."""
    window = np.asarray(window, dtype=np.float64)
    order = window.shape[-1]
    _check_order(order)
    if not 0 <= k < len(_CANDIDATES[order]):
        raise ValueError(f"candidate index {k} out of range for order {order}")
    z = np.diff(window, axis=-1) @ _CAND_SOS[order][k].T
    return np.einsum("...t,...t->...", z, z)


def beta_global(window: np.ndarray) -> np.ndarray:
    """Smoothness indicator of the full-window interpolant."""
    window = np.asarray(window, dtype=np.float64)
    _check_order(window.shape[-1])
    z = np.diff(window, axis=-1) @ _GLOBAL_SOS[window.shape[-1]].T
    return np.einsum("...t,...t->...", z, z)


def beta_all(window: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(candidate betas (..., n_cand), full-window beta (...,))."""
    window = np.asarray(window, dtype=np.float64)
    order = window.shape[-1]
    _check_order(order)
    sos_t, groups = _FUSED_SOS[order]
    z = np.diff(window, axis=-1) @ sos_t
    np.multiply(z, z, out=z)
    packed = z @ groups
    return packed[..., :-1], packed[..., -1]


def tau(window: np.ndarray) -> np.ndarray:
    """High-order undivided-difference measure driving scale separation.

    Combines the full-window indicator with the three 3-point candidate
    indicators (centered weighted by 4) so that smooth content cancels to
    sixth order.
    """
    betas, bg = beta_all(window)
    return np.abs(bg - (betas[..., 1] + betas[..., 2] + 4.0 * betas[..., 0]) / 6.0)


_RATIO_CAP = 1e45  # keeps base^6 finite; binds only where chi < 1e-250


def gamma_indicators(
    beta: np.ndarray, tau_value: np.ndarray, params: SmoothnessParams = DEFAULT_SMOOTH
) -> np.ndarray:
    """Scale-separation indicators (C + tau/(beta + eps))^q, elementwise.

    The ratio is capped so the power cannot overflow when a candidate is
    exactly constant next to an extreme jump; the cap binds many decades
    below any usable cut-off, so classification is unaffected.
    """
    base = np.minimum(
        params.c + np.asarray(tau_value) / (np.asarray(beta) + params.eps), _RATIO_CAP
    )
    if params.q == 6:
        sq = base * base
        return sq * sq * sq
    return base**params.q


def normalize_chi(gammas: np.ndarray) -> np.ndarray:
    """Normalize indicators along the candidate axis to unit sum."""
    gammas = np.asarray(gammas, dtype=np.float64)
    return gammas / gammas.sum(axis=-1, keepdims=True)


def cutoff_delta(chi: np.ndarray, ct) -> np.ndarray:
    """Sharp cut-off: 0 where chi < ct (strictly), else 1."""
    chi = np.asarray(chi)
    ct = np.asarray(ct)
    if ct.ndim and ct.ndim < chi.ndim:
        ct = ct[..., None]
    return (chi >= ct).astype(np.float64)


def _adapt_from_diffs(df: np.ndarray, params: AdaptParams) -> np.ndarray:
    """Threshold adaptation from the five consecutive first differences."""
    eps = params.eps
    eta = (np.abs(2.0 * df[..., 1:] * df[..., :-1]) + eps) / (
        df[..., 1:] ** 2 + df[..., :-1] ** 2 + eps
    )
    eta_face = eta.min(axis=-1)
    m = 1.0 - np.minimum(1.0, eta_face / params.cr)
    g = (1.0 - m) ** 4 * (1.0 + 4.0 * m)
    beta = params.alpha1 - params.alpha2 * (1.0 - g)
    # Defensive clamp: with default constants beta >= 7 always.
    return 10.0 ** (-np.maximum(np.floor(beta), 1.0))


def adapt_ct(f: np.ndarray, params: AdaptParams = DEFAULT_ADAPT) -> np.ndarray:
    """Cut-off threshold adapted to local first-difference smoothness.

    `f` holds the six points f_{i-2}..f_{i+3} around the interface, shape
    (..., 6).  Monotone-ratio indicators of consecutive differences are
    pooled with a min over the four cells touching the interface and mapped
    through a smoothing kernel onto a decade exponent.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.shape[-1] != 6:
        raise ValueError("adaptation needs the six points f_{i-2}..f_{i+3}")
    return _adapt_from_diffs(np.diff(f, axis=-1), params)


def survivors(
    window: np.ndarray,
    ct=1e-5,
    smooth: SmoothnessParams = DEFAULT_SMOOTH,
    adapt: AdaptParams | None = None,
) -> np.ndarray:
    """Boolean cut-off survival per candidate, shape (..., n_candidates).

    Fused evaluation of the indicator/normalization/cut-off chain; a
    candidate survives iff gamma_k >= ct * sum(gamma), which is the
    normalized comparison chi_k >= ct without the division.
    """
    w = np.asarray(window, dtype=np.float64)
    order = w.shape[-1]
    _check_order(order)
    dw = np.diff(w, axis=-1)
    sos_t, groups = _FUSED_SOS[order]
    z = dw @ sos_t
    np.multiply(z, z, out=z)
    packed = z @ groups
    betas = packed[..., :-1]
    t = np.abs(
        packed[..., -1] - (betas[..., 1] + betas[..., 2] + 4.0 * betas[..., 0]) / 6.0
    )
    base = np.minimum(smooth.c + t[..., None] / (betas + smooth.eps), _RATIO_CAP)
    if smooth.q == 6:
        sq = base * base
        gam = sq * sq * sq
    else:
        gam = base**smooth.q
    if adapt is not None:
        lo = (order + 1) // 2 - 3
        ct = _adapt_from_diffs(dw[..., lo : lo + 5], adapt)[..., None]
    else:
        ct = np.asarray(ct)
        if ct.ndim and ct.ndim < gam.ndim:
            ct = ct[..., None]
    return gam >= ct * gam.sum(axis=-1, keepdims=True)


def optimal_weights(order: int) -> np.ndarray:
    """Linear candidate weights matching the full-window reconstruction."""
    _check_order(order)
    return _OPT_WEIGHTS[order].copy()


def linear_coefficients(order: int) -> np.ndarray:
    """Point coefficients of the width-`order` background reconstruction."""
    _check_order(order)
    return _LINEAR_COEFFS[order].copy()


def linear_flux(window: np.ndarray) -> np.ndarray:
    """Background linear interface value, assembled candidate-wise.

    Computed as the optimal-weight combination of candidate values (not the
    collapsed point-coefficient dot product) so that nonlinear paths whose
    cut-off passes every candidate reproduce it bit for bit.
    """
    window = np.asarray(window, dtype=np.float64)
    _check_order(window.shape[-1])
    return candidate_values(window) @ _OPT_WEIGHTS[window.shape[-1]]


def teno_flux(
    window: np.ndarray,
    ct=1e-5,
    smooth: SmoothnessParams = DEFAULT_SMOOTH,
    adapt: AdaptParams | None = None,
) -> np.ndarray:
    """Cut-off-renormalized reconstruction of the interface value.

    Candidates failing the cut-off are discarded; the surviving optimal
    weights are renormalized.  `ct` is a fixed threshold, or pass
    `adapt=AdaptParams(...)` to derive it per window from the local field;
    at least one candidate always survives since the smoothest one carries
    the largest normalized indicator.
    """
    window = np.asarray(window, dtype=np.float64)
    order = window.shape[-1]
    _check_order(order)
    cand = candidate_values(window)
    delta = survivors(window, ct=ct, smooth=smooth, adapt=adapt)
    weights = _OPT_WEIGHTS[order] * delta
    norm = weights.sum(axis=-1)
    if np.any(norm == 0.0):
        raise AssertionError("cut-off removed every candidate")
    return (weights * cand).sum(axis=-1) / norm
