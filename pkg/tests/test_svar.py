import numpy as np
import pytest
from test_var import model_from_residuals

from cci_toolkit.errors import IrrelevantInstrument, LengthMismatch
from cci_toolkit.series import MonthStamp
from cci_toolkit.simlab import Dgp, simulate
from cci_toolkit.svar import (
    InstrumentSeries,
    MomentSet,
    ProxyIdentification,
    cmd_objective,
    compute_moments,
    default_block_length,
    identify,
    irf,
    mbb_bands,
    relevance_test,
)
from cci_toolkit.var import VarSpec, estimate_var


def orthonormal_residual_model(t_obs=64, n=3, seed=0):
    """Residual rows with zero column means and covariance exactly I."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((t_obs, n))
    q, _ = np.linalg.qr(raw - raw.mean(axis=0))
    resid = q * np.sqrt(t_obs)
    return model_from_residuals(resid)


def moments_from(sigma_z_eta, sigma_eta) -> MomentSet:
    sigma_z_eta = np.asarray(sigma_z_eta, dtype=float)
    sigma_eta = np.asarray(sigma_eta, dtype=float)
    scalar = float(sigma_z_eta @ np.linalg.solve(sigma_eta, sigma_z_eta))
    return MomentSet(
        sigma_z_eta=sigma_z_eta,
        sigma_eta=sigma_eta,
        scalar_moment=scalar,
        n_used=100,
        n_missing=0,
    )


class TestComputeMoments:
    def test_unit_construction(self):
        model = orthonormal_residual_model()
        z = InstrumentSeries(
            start=model.residual_start, values=model.residuals[:, 0]
        )
        moments = compute_moments(model, z)
        np.testing.assert_allclose(moments.sigma_z_eta, [1.0, 0.0, 0.0], atol=1e-10)
        assert moments.scalar_moment == pytest.approx(1.0, abs=1e-10)
        assert moments.n_missing == 0

    def test_independent_noise_scalar_near_zero(self):
        model = orthonormal_residual_model(t_obs=240)
        below = 0
        for seed in range(400):
            rng = np.random.default_rng(1000 + seed)
            z = InstrumentSeries(
                start=model.residual_start, values=rng.standard_normal(240)
            )
            below += compute_moments(model, z).scalar_moment < 0.05
        assert below / 400 >= 0.95

    def test_length_mismatch(self):
        model = orthonormal_residual_model()
        z = InstrumentSeries(
            start=model.residual_start, values=np.zeros(10) + 1.0
        )
        with pytest.raises(LengthMismatch):
            compute_moments(model, z)

    def test_missing_months_dropped_pairwise(self):
        model = orthonormal_residual_model(t_obs=100)
        values = model.residuals[:, 0].copy()
        values[3] = np.nan
        values[77] = np.nan
        z = InstrumentSeries(start=model.residual_start, values=values)
        moments = compute_moments(model, z)
        assert moments.n_missing == 2
        assert moments.n_used == 98
        assert moments.scalar_moment > 0.5


class TestIdentify:
    def test_orthonormal_case(self):
        ident = identify(moments_from([0.8, 0.0, 0.0], np.eye(3)))
        assert ident.phi == pytest.approx(0.8, abs=1e-12)
        np.testing.assert_allclose(ident.b_col, [1.0, 0.0, 0.0], atol=1e-12)
        assert ident.cmd_objective < 1e-10

    def test_hand_algebra(self):
        ident = identify(moments_from([2.0, 0.0], np.diag([4.0, 1.0])))
        assert ident.phi == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(ident.b_col, [2.0, 0.0], atol=1e-12)

    def test_reconstruction_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(2, 6))
            a = rng.standard_normal((n, n))
            moments = moments_from(rng.standard_normal(n), a @ a.T + 0.1 * np.eye(n))
            ident = identify(moments)
            np.testing.assert_allclose(
                ident.phi * ident.b_col, moments.sigma_z_eta, atol=1e-8
            )
            assert cmd_objective(moments, ident.phi, ident.b_col) < 1e-10

    def test_irrelevant_floor(self):
        with pytest.raises(IrrelevantInstrument):
            identify(moments_from([0.0, 0.0], np.eye(2)))

    def test_scale_equivariance_and_sign(self):
        model = orthonormal_residual_model(t_obs=200, seed=3)
        base_vals = model.residuals[:, 0] + 0.3 * model.residuals[:, 1]
        z = InstrumentSeries(start=model.residual_start, values=base_vals)
        ident = identify(compute_moments(model, z))
        for c in (0.5, 10.0):
            scaled = InstrumentSeries(
                start=model.residual_start, values=base_vals * c
            )
            ident_c = identify(compute_moments(model, scaled))
            assert ident_c.phi == pytest.approx(c * ident.phi, rel=1e-9)
            np.testing.assert_allclose(ident_c.b_col, ident.b_col, atol=1e-9)
        flipped = InstrumentSeries(start=model.residual_start, values=-base_vals)
        ident_f = identify(compute_moments(model, flipped))
        assert ident_f.phi == pytest.approx(ident.phi, rel=1e-9)
        np.testing.assert_allclose(ident_f.b_col, -ident.b_col, atol=1e-9)


class TestIrf:
    def test_impact_is_exact(self):
        dgp = Dgp.stable(3, 2, seed=11, radius=0.5)
        panel, z = simulate(dgp, 300)
        model = estimate_var(panel, VarSpec(lags=2))
        ident = identify(compute_moments(model, z))
        path = irf(model, ident, 12)
        assert path[0].tobytes() == ident.b_col.tobytes()

    def test_scalar_ar1_powers(self):
        model = model_from_residuals(np.zeros((10, 1)), lags=1)
        object.__setattr__(model, "coeffs", np.array([[0.0, 0.5]]))
        ident = ProxyIdentification(phi=1.0, b_col=np.array([1.0]), cmd_objective=0.0)
        path = irf(model, ident, 24)
        np.testing.assert_allclose(path[:, 0], 0.5 ** np.arange(25), atol=1e-12)

    def test_p1_matches_matrix_powers(self):
        dgp = Dgp.stable(2, 1, seed=2, radius=0.6)
        panel, z = simulate(dgp, 250)
        model = estimate_var(panel, VarSpec(lags=1))
        ident = identify(compute_moments(model, z))
        path = irf(model, ident, 6)
        expected = ident.b_col.copy()
        for h in range(1, 7):
            expected = model.phi @ expected
            np.testing.assert_allclose(path[h], expected, atol=1e-12)

    def test_geometric_decay_bound(self):
        from cci_toolkit.var import stability

        dgp = Dgp.stable(2, 2, seed=8, radius=0.5)
        panel, z = simulate(dgp, 400)
        model = estimate_var(panel, VarSpec(lags=2))
        ident = identify(compute_moments(model, z))
        path = irf(model, ident, 60)
        radius = stability(model).spectral_radius
        bound = np.linalg.norm(path[0]) * (radius + 0.05) ** 60
        assert np.linalg.norm(path[60]) < bound

    def test_negative_horizon(self):
        model = model_from_residuals(np.zeros((10, 1)), lags=1)
        ident = ProxyIdentification(phi=1.0, b_col=np.array([1.0]), cmd_objective=0.0)
        with pytest.raises(ValueError):
            irf(model, ident, -1)


class TestRelevance:
    def test_perfect_first_stage(self):
        model = orthonormal_residual_model(t_obs=200)
        z = InstrumentSeries(start=model.residual_start, values=model.residuals[:, 0])
        report = relevance_test(model, z)
        assert report.f_stat > 1e6
        assert report.strong

    def test_alignment_guard(self):
        model = orthonormal_residual_model()
        z = InstrumentSeries(start=MonthStamp(1990, 1), values=np.ones(5))
        with pytest.raises(LengthMismatch):
            relevance_test(model, z)


@pytest.fixture(scope="module")
def setup():
    dgp = Dgp(
        n=2,
        p=1,
        phi_true=np.array([[0.5, 0.1], [0.0, 0.4]]),
        b_true=np.array([[1.0, 0.0], [0.5, 1.0]]),
        instrument_strength=1.0,
        noise_scale=1.0,
    )
    panel, z = simulate(dgp, 240, seed=99)
    return dgp, panel, z


class TestMbbBands:

    def test_deterministic_given_seed(self, setup):
        _, panel, z = setup
        spec = VarSpec(lags=1)
        b1 = mbb_bands(panel, spec, z, horizon=8, reps=120, seed=12345)
        b2 = mbb_bands(panel, spec, z, horizon=8, reps=120, seed=12345)
        np.testing.assert_array_equal(b1.lower, b2.lower)
        np.testing.assert_array_equal(b1.upper, b2.upper)
        b3 = mbb_bands(panel, spec, z, horizon=8, reps=120, seed=54321)
        assert not np.array_equal(b1.lower, b3.lower)

    def test_point_inside_bands(self, setup):
        _, panel, z = setup
        bundle = mbb_bands(panel, VarSpec(lags=1), z, horizon=12, reps=500, seed=7)
        assert bundle.band_crossings == 0
        assert np.all(bundle.lower <= bundle.upper)
        np.testing.assert_array_equal(bundle.point[0], identify(
            compute_moments(estimate_var(panel, VarSpec(lags=1)), z)
        ).b_col)

    def test_block_length_guards(self, setup):
        _, panel, z = setup
        m = len(panel) - 1
        with pytest.raises(ValueError):
            mbb_bands(panel, VarSpec(lags=1), z, reps=100, block_len=m)
        with pytest.raises(ValueError):
            mbb_bands(panel, VarSpec(lags=1), z, reps=100, block_len=0)
        with pytest.raises(ValueError):
            mbb_bands(panel, VarSpec(lags=1), z, reps=50)
        with pytest.raises(ValueError):
            mbb_bands(panel, VarSpec(lags=1), z, reps=100, level=1.2)

    def test_default_block_length_rule(self):
        assert default_block_length(239) == int(np.ceil(5.03 * 239**0.25))
        assert default_block_length(1) == 6


def test_instrument_series_guards():
    with pytest.raises(ValueError):
        InstrumentSeries(start=MonthStamp(2000, 1), values=np.array([]))
    with pytest.raises(ValueError):
        InstrumentSeries(start=MonthStamp(2000, 1), values=np.array([np.nan, np.nan]))
    z = InstrumentSeries(start=MonthStamp(2000, 1), values=np.arange(5.0))
    np.testing.assert_array_equal(z.aligned_to(MonthStamp(2000, 2), 3), [1.0, 2.0, 3.0])
    with pytest.raises(LengthMismatch):
        z.aligned_to(MonthStamp(2000, 4), 3)
