"""Stencil-kernel tests: frozen coefficient tables, quadrature oracles for
the smoothness indicators, scale separation, cut-off, and threshold
adaptation."""

import numpy as np
import pytest

from tenom import stencils as st

RNG = np.random.default_rng(20240817)

# Published candidate coefficients (interface value = sum c_m f_{i+m}).
TABLE = {
    0: {-1: -1 / 6, 0: 5 / 6, 1: 2 / 6},
    1: {0: 2 / 6, 1: 5 / 6, 2: -1 / 6},
    2: {-2: 2 / 6, -1: -7 / 6, 0: 11 / 6},
    3: {0: 3 / 12, 1: 13 / 12, 2: -5 / 12, 3: 1 / 12},
    4: {-3: -3 / 12, -2: 13 / 12, -1: -23 / 12, 0: 25 / 12},
    5: {0: 12 / 60, 1: 77 / 60, 2: -43 / 60, 3: 17 / 60, 4: -3 / 60},
}


def window_with(order, offsets, values, fill=0.0):
    """Build a window carrying `values` at the given point offsets."""
    w = np.full(order, fill)
    base = st.window_offsets(order)
    for off, v in zip(offsets, values):
        w[base.index(off)] = v
    return w


# ---------------------------------------------------------------------------
# Candidate tables and fluxes
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("order", st.SUPPORTED_ORDERS)
def test_candidate_rows_match_published_table(order):
    cands = st.candidate_offsets(order)
    table = st.candidate_table(order)
    base = st.window_offsets(order)
    for k, offsets in enumerate(cands):
        for off, coeff in TABLE[k].items():
            assert table[k, base.index(off)] == pytest.approx(coeff, abs=1e-15)
        covered = [base.index(o) for o in offsets]
        mask = np.ones(order, bool)
        mask[covered] = False
        assert np.all(table[k, mask] == 0.0)


@pytest.mark.parametrize("order", st.SUPPORTED_ORDERS)
def test_candidate_rows_sum_to_one(order):
    sums = st.candidate_table(order).sum(axis=1)
    assert np.allclose(sums, 1.0, atol=1e-15)


def test_candidate_widths():
    assert st.candidate_widths(6) == (3, 3, 3, 4)
    assert st.candidate_widths(8) == (3, 3, 3, 4, 4, 5)


@pytest.mark.parametrize("order", st.SUPPORTED_ORDERS)
def test_candidates_reproduce_monomials_at_interface(order):
    # Point values act as sliding cell averages: feed the averages of x^l
    # and expect the primitive's interface value (1/2)^l exactly.
    for k, offsets in enumerate(st.candidate_offsets(order)):
        r = len(offsets)
        for deg in range(r):
            avg = [
                ((m + 0.5) ** (deg + 1) - (m - 0.5) ** (deg + 1)) / (deg + 1)
                for m in offsets
            ]
            w = window_with(order, offsets, avg, fill=123.0)
            assert st.candidate_flux(k, w) == pytest.approx(0.5**deg, abs=1e-13)


def test_candidate_flux_examples():
    w = window_with(6, (-1, 0, 1), (1.0, 1.0, 1.0))
    assert st.candidate_flux(0, w) == pytest.approx(1.0)
    w = window_with(6, (-1, 0, 1), (0.0, 1.0, 2.0))
    assert st.candidate_flux(0, w) == pytest.approx(1.5)
    assert sum(TABLE[5].values()) == pytest.approx(1.0)


def test_candidate_flux_rejects_bad_index():
    with pytest.raises(ValueError):
        st.candidate_flux(4, np.zeros(6))
    with pytest.raises(ValueError):
        st.candidate_flux(-1, np.zeros(8))


def test_unsupported_order_rejected():
    with pytest.raises(ValueError):
        st.candidate_values(np.zeros(5))
    with pytest.raises(ValueError):
        st.optimal_weights(7)


# ---------------------------------------------------------------------------
# Smoothness indicators vs numerical quadrature oracle
# ---------------------------------------------------------------------------


def beta_oracle(offsets, values):
    """Quadrature evaluation of the indicator definition.

    Solves the sliding-average moment system for the interpolant, then
    integrates each squared derivative over the central cell with
    Gauss-Legendre nodes (exact for these polynomial degrees).
    """
    r = len(offsets)
    moments = np.array(
        [
            [((m + 0.5) ** (l + 1) - (m - 0.5) ** (l + 1)) / (l + 1) for l in range(r)]
            for m in offsets
        ]
    )
    coeffs = np.linalg.solve(moments, np.asarray(values, float))
    poly = np.polynomial.Polynomial(coeffs)
    nodes, wts = np.polynomial.legendre.leggauss(12)
    nodes = 0.5 * nodes  # map to [-1/2, 1/2]
    wts = 0.5 * wts
    total = 0.0
    for j in range(1, r):
        poly = poly.deriv()
        total += float((wts * poly(nodes) ** 2).sum())
    return total


@pytest.mark.parametrize("order", st.SUPPORTED_ORDERS)
def test_beta_candidates_match_quadrature_oracle(order):
    base = st.window_offsets(order)
    for _ in range(40):
        w = RNG.normal(size=order)
        for k, offsets in enumerate(st.candidate_offsets(order)):
            vals = [w[base.index(o)] for o in offsets]
            expected = beta_oracle(offsets, vals)
            got = st.beta_candidate(k, w)
            assert got == pytest.approx(expected, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("order", st.SUPPORTED_ORDERS)
def test_beta_global_matches_quadrature_oracle(order):
    offsets = st.window_offsets(order)
    for _ in range(40):
        w = RNG.normal(size=order)
        expected = beta_oracle(offsets, w)
        assert st.beta_global(w) == pytest.approx(expected, rel=1e-12, abs=1e-11)


def test_beta_worked_examples():
    assert st.beta_candidate(0, window_with(6, (-1, 0, 1), (5.0, 5.0, 5.0))) == 0.0
    # quadratic through (0,1,2): only the slope term survives
    assert st.beta_candidate(0, window_with(6, (-1, 0, 1), (0.0, 1.0, 2.0))) == pytest.approx(1.0)
    # 13/12*(1-4+4)^2 + 1/4*(4-1)^2 = 10/3
    assert st.beta_candidate(0, window_with(6, (-1, 0, 1), (1.0, 2.0, 4.0))) == pytest.approx(10 / 3)
    assert st.beta_global(np.zeros(8)) == 0.0
    assert st.beta_global(np.arange(6.0)) == pytest.approx(1.0, abs=1e-13)
    assert st.beta_global(2.5 * np.ones(8)) == 0.0


def test_beta_nonnegative_on_noise():
    w = RNG.normal(size=(500, 6)) * 1e-8 + 3.0
    betas, bg = st.beta_all(w)
    assert (betas >= 0.0).all() and (bg >= 0.0).all()


# ---------------------------------------------------------------------------
# tau, gamma, chi, delta
# ---------------------------------------------------------------------------


def test_tau_examples():
    assert st.tau(np.full(6, 7.0)) == 0.0
    quad = np.array([float(j * j) for j in range(-2, 4)])
    assert st.tau(quad) == pytest.approx(0.0, abs=1e-12)
    step = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
    betas, bg = st.beta_all(step)
    direct = abs(bg - (betas[1] + betas[2] + 4 * betas[0]) / 6)
    assert st.tau(step) == pytest.approx(direct) and st.tau(step) > 0.0


def test_tau_cancels_at_sixth_order():
    # tau should shrink ~64x per halving of the resolved wavenumber
    def tau_at(phi):
        j = np.arange(-2.0, 4.0)
        return st.tau(np.sin(phi * j))

    r1 = tau_at(0.2) / tau_at(0.1)
    r2 = tau_at(0.1) / tau_at(0.05)
    assert 45 < r1 < 80 and 45 < r2 < 80


def test_gamma_examples():
    assert np.all(st.gamma_indicators(np.array([0.3, 5.0]), 0.0) == 1.0)
    huge = st.gamma_indicators(0.0, 1.0)
    assert np.isfinite(huge) and huge > 1e200
    assert st.gamma_indicators(1.0, 1.0) == pytest.approx(64.0)


def test_chi_examples():
    assert np.allclose(st.normalize_chi(np.ones(4)), 0.25)
    chi = st.normalize_chi(np.array([64.0, 1.0, 1.0, 1.0]))
    assert chi[0] == pytest.approx(64 / 67)
    assert chi.sum() == pytest.approx(1.0)
    assert st.normalize_chi(np.array([7.0])) == pytest.approx(1.0)


def test_cutoff_examples():
    assert st.cutoff_delta(np.array([1e-8]), 1e-7) == 0.0
    assert st.cutoff_delta(np.array([1e-7]), 1e-7) == 1.0  # strict less-than only
    chi = st.normalize_chi(np.ones(4))
    assert np.all(st.cutoff_delta(chi, 1e-5) == 1.0)


def test_cutoff_broadcasts_per_window_thresholds():
    chi = np.array([[0.5, 0.5], [0.2, 0.8]])
    ct = np.array([0.4, 0.4])
    delta = st.cutoff_delta(chi, ct)
    assert delta.tolist() == [[1.0, 1.0], [0.0, 1.0]]


# ---------------------------------------------------------------------------
# Threshold adaptation
# ---------------------------------------------------------------------------


def test_adapt_ct_linear_data():
    assert st.adapt_ct(1.0 + 2.0 * np.arange(6.0)) == pytest.approx(1e-10)


def test_adapt_ct_discontinuity():
    assert st.adapt_ct(np.array([0.0, 0.0, 0.0, 1e6, 1e6, 1e6])) == pytest.approx(1e-7)


def test_adapt_ct_constant_data():
    assert st.adapt_ct(np.ones(6)) == pytest.approx(1e-10)


def test_adapt_ct_range():
    w = RNG.normal(size=(200, 6))
    ct = st.adapt_ct(w)
    assert set(np.unique(ct)) <= {1e-10, 1e-9, 1e-8, 1e-7}


def test_adapt_ct_needs_six_points():
    with pytest.raises(ValueError):
        st.adapt_ct(np.ones(5))


# ---------------------------------------------------------------------------
# Optimal weights and assembled fluxes
# ---------------------------------------------------------------------------


def test_optimal_weights_frozen_values():
    assert st.optimal_weights(6) == pytest.approx([0.45, 0.3, 0.05, 0.2], abs=1e-15)
    assert st.optimal_weights(8) == pytest.approx(
        [3 / 7, 9 / 35, 2 / 35, 6 / 35, 1 / 70, 1 / 14], abs=1e-15
    )


@pytest.mark.parametrize("order", st.SUPPORTED_ORDERS)
def test_optimal_weights_solve_moment_system(order):
    # Independent least-squares solve of the matching conditions.
    table = st.candidate_table(order)
    target = st.linear_coefficients(order)
    d, residual, *_ = np.linalg.lstsq(table.T, target, rcond=None)
    assert np.allclose(d, st.optimal_weights(order), atol=1e-12)
    assert np.abs(table.T @ d - target).max() < 1e-14
    assert st.optimal_weights(order).sum() == pytest.approx(1.0, abs=1e-14)


def test_linear_coefficients_are_the_published_background_schemes():
    assert np.allclose(st.linear_coefficients(6) * 60, [1, -8, 37, 37, -8, 1])
    assert np.allclose(st.linear_coefficients(8) * 840, [-3, 29, -139, 533, 533, -139, 29, -3])


def smooth_windows(order, n=64):
    x = np.linspace(0.0, 1.0, n, endpoint=False)
    u = np.sin(2 * np.pi * x)
    ext = np.concatenate([u, u[: order + 2]])
    return np.lib.stride_tricks.sliding_window_view(ext, order)[:n]


@pytest.mark.parametrize("order", st.SUPPORTED_ORDERS)
def test_teno_flux_equals_linear_on_resolved_sine(order):
    W = smooth_windows(order)
    kwargs = {"ct": 1e-7} if order == 6 else {"adapt": st.DEFAULT_ADAPT}
    diff = np.abs(st.teno_flux(W, **kwargs) - st.linear_flux(W))
    assert diff.max() < 5e-16  # renormalization round-off only


def test_teno_flux_single_survivor():
    # left plateau with a huge jump: only the fully upwind candidate survives
    w = np.array([3.0, 3.0, 3.0, 1e7, 1e7 + 1, 1e7 + 2])
    betas, bg = st.beta_all(w)
    chi = st.normalize_chi(st.gamma_indicators(betas, st.tau(w)))
    delta = st.cutoff_delta(chi, 1e-7)
    assert delta.tolist() == [0.0, 0.0, 1.0, 0.0]
    assert st.teno_flux(w, ct=1e-7) == pytest.approx(st.candidate_flux(2, w))


def test_teno_flux_all_pass_is_renormalization_identity():
    w = np.arange(8.0)  # affine: every candidate agrees exactly
    assert st.teno_flux(w, ct=1e-7) == pytest.approx(st.linear_flux(w), abs=1e-14)


def test_ghost_width():
    assert st.ghost_width(6) == 3
    assert st.ghost_width(8) == 4
    assert st.ghost_width(5) == 3
