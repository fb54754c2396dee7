"""Tests for Beta fitting, the incomplete beta, K-S p-values, and prompt validity.

The incomplete beta implementation is checked against two independent
references: scipy.special.betainc and direct quadrature of the density.
K-S statistics are checked against scipy.stats.kstest and the asymptotic
series against scipy.special.kolmogorov.
"""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special
import scipy.stats

from bioparse.errors import DomainError, FitError, FormatError
from bioparse.validity import (
    BetaParams,
    ValidityModel,
    ValiditySample,
    beta_cdf,
    extract_statistics,
    fit_beta,
    fit_validity_model,
    ks_pvalue,
    ks_statistic,
    model_from_json,
    model_to_json,
    validity_pvalue,
)


def beta_cdf_quadrature(a, b, x):
    """Reference CDF by adaptive quadrature of the density.

    Endpoint singularities (a < 1 or b < 1) are delegated to quad's
    algebraic weight handling; the evaluation point is reflected so the
    integration interval never approaches the far singular endpoint.
    """
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if x > 0.5:
        return 1.0 - beta_cdf_quadrature(b, a, 1.0 - x)
    norm = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b))
    val, _ = scipy.integrate.quad(
        lambda t: (1.0 - t) ** (b - 1.0),
        0.0, x,
        weight="alg", wvar=(a - 1.0, 0.0),
        epsabs=1e-13, epsrel=1e-13, limit=200,
    )
    return norm * val


def sample_at_cdf(params, u):
    """Inverse CDF through scipy, for engineering samples with known CDF."""
    return float(scipy.special.betaincinv(params.alpha, params.beta, u))


class TestBetaParams:
    def test_rejects_nonpositive(self):
        with pytest.raises(FitError):
            BetaParams(0.0, 1.0)
        with pytest.raises(FitError):
            BetaParams(2.0, -1.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(FitError):
            BetaParams(math.inf, 1.0)
        with pytest.raises(FitError):
            BetaParams(1.0, math.nan)


class TestFitBeta:
    def test_mean_half_variance_twentieth(self):
        # symmetric pair engineered to have mean 0.5 and variance 0.05:
        # Beta(2,2) has variance 4/(16*5)
        d = math.sqrt(0.025)
        fit = fit_beta([0.5 - d, 0.5 + d])
        assert fit.alpha == pytest.approx(2.0, abs=1e-12)
        assert fit.beta == pytest.approx(2.0, abs=1e-12)

    def test_recovers_uniform(self):
        d = math.sqrt(1.0 / 24.0)
        fit = fit_beta([0.5 - d, 0.5 + d])
        assert fit.alpha == pytest.approx(1.0, abs=1e-12)
        assert fit.beta == pytest.approx(1.0, abs=1e-12)

    def test_recovery_from_draws(self):
        rng = np.random.default_rng(20250207)
        draws = rng.beta(2.0, 5.0, size=10_000)
        fit = fit_beta(draws)
        assert abs(fit.alpha - 2.0) / 2.0 < 0.05
        assert abs(fit.beta - 5.0) / 5.0 < 0.05

    def test_moment_round_trip(self):
        # fitted parameters reproduce the (clamped) sample moments exactly
        rng = np.random.default_rng(7)
        x = rng.uniform(0.05, 0.95, size=200)
        fit = fit_beta(x)
        m = fit.alpha / (fit.alpha + fit.beta)
        v = fit.alpha * fit.beta / (
            (fit.alpha + fit.beta) ** 2 * (fit.alpha + fit.beta + 1.0)
        )
        assert m == pytest.approx(float(x.mean()), rel=1e-12)
        assert v == pytest.approx(float(x.var(ddof=1)), rel=1e-12)

    def test_endpoint_samples_are_clamped(self):
        fit = fit_beta([0.0, 0.3, 0.7, 1.0])
        assert fit.alpha > 0 and fit.beta > 0

    def test_too_few_samples(self):
        with pytest.raises(FitError):
            fit_beta([0.5])

    def test_zero_variance(self):
        with pytest.raises(FitError):
            fit_beta([0.4, 0.4, 0.4])

    def test_out_of_range_samples(self):
        with pytest.raises(FitError):
            fit_beta([0.2, 1.5])

    def test_overdispersed_samples(self):
        # variance beyond m(1-m) admits no Beta; the pair below has
        # sample variance ~0.5 against a ceiling of 0.25
        with pytest.raises(FitError):
            fit_beta([0.001, 0.999])


class TestBetaCdf:
    def test_uniform(self):
        assert beta_cdf(BetaParams(1.0, 1.0), 0.3) == pytest.approx(0.3, abs=1e-12)

    def test_bounds(self):
        p = BetaParams(3.7, 0.4)
        assert beta_cdf(p, 0.0) == 0.0
        assert beta_cdf(p, 1.0) == 1.0

    def test_symmetric_median(self):
        assert beta_cdf(BetaParams(2.0, 2.0), 0.5) == pytest.approx(0.5, abs=1e-12)

    def test_reflection_identity(self):
        p = BetaParams(2.5, 0.7)
        q = BetaParams(0.7, 2.5)
        for x in [0.1, 0.37, 0.62, 0.9]:
            assert beta_cdf(p, x) == pytest.approx(1.0 - beta_cdf(q, 1.0 - x), abs=1e-12)

    def test_against_scipy(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            a, b = rng.uniform(0.3, 8.0, size=2)
            x = float(rng.uniform(0.0, 1.0))
            ref = float(scipy.special.betainc(a, b, x))
            assert beta_cdf(BetaParams(a, b), x) == pytest.approx(ref, abs=1e-12)

    def test_against_quadrature(self):
        for a in (0.5, 1.0, 2.0, 5.0):
            for b in (0.5, 1.0, 2.0, 5.0):
                for x in np.linspace(0.01, 0.99, 25):
                    ref = beta_cdf_quadrature(a, b, float(x))
                    assert abs(beta_cdf(BetaParams(a, b), float(x)) - ref) < 1e-10

    def test_monotone(self):
        p = BetaParams(0.5, 4.0)
        grid = np.linspace(0.0, 1.0, 500)
        vals = [beta_cdf(p, float(x)) for x in grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_argument_range(self):
        with pytest.raises(DomainError):
            beta_cdf(BetaParams(1.0, 1.0), -0.1)
        with pytest.raises(DomainError):
            beta_cdf(BetaParams(1.0, 1.0), 1.1)


class TestKsPvalue:
    def test_single_sample_at_median(self):
        p = BetaParams(2.0, 2.0)
        assert ks_pvalue([0.5], p) == pytest.approx(1.0, abs=1e-12)

    def test_single_sample_upper_tail(self):
        p = BetaParams(2.0, 5.0)
        x = sample_at_cdf(p, 0.99)
        assert ks_pvalue([x], p) == pytest.approx(0.02, abs=1e-9)

    def test_single_sample_at_support_edge(self):
        p = BetaParams(2.0, 5.0)
        assert ks_pvalue([0.0], p) == pytest.approx(0.0, abs=1e-12)

    def test_single_sample_uniform_under_null(self):
        p = BetaParams(3.0, 2.0)
        rng = np.random.default_rng(20240118)
        draws = rng.beta(p.alpha, p.beta, size=1000)
        pvals = [ks_pvalue([float(x)], p) for x in draws]
        assert 0.45 <= float(np.mean(pvals)) <= 0.55

    def test_statistic_matches_scipy(self):
        p = BetaParams(2.0, 3.0)
        rng = np.random.default_rng(5)
        x = rng.beta(2.0, 3.0, size=40)
        ref = scipy.stats.kstest(x, lambda t: scipy.special.betainc(2.0, 3.0, t))
        assert ks_statistic(x, p) == pytest.approx(float(ref.statistic), abs=1e-12)

    def test_asymptotic_matches_kolmogorov_series(self):
        p = BetaParams(1.5, 4.0)
        rng = np.random.default_rng(6)
        for n in (2, 5, 30, 200):
            x = rng.beta(1.5, 4.0, size=n)
            d = ks_statistic(x, p)
            ref = float(scipy.special.kolmogorov(math.sqrt(n) * d))
            assert ks_pvalue(x, p) == pytest.approx(ref, abs=1e-12)

    def test_empty_sample(self):
        with pytest.raises(DomainError):
            ks_pvalue([], BetaParams(1.0, 1.0))


def constant_image(shape, r, g, b):
    img = np.zeros(shape + (3,), dtype=np.uint8)
    img[..., 0], img[..., 1], img[..., 2] = r, g, b
    return img


class TestExtractStatistics:
    def test_hand_traced(self):
        p = np.zeros((4, 4))
        p[1:3, 1:3] = 0.8
        img = constant_image((4, 4), 100, 150, 200)
        s = extract_statistics(p, img)
        assert s.mean_prob == pytest.approx(0.8)
        assert s.mean_r == pytest.approx(100 / 255)
        assert s.mean_g == pytest.approx(150 / 255)
        assert s.mean_b == pytest.approx(200 / 255)

    def test_threshold_is_strict(self):
        p = np.full((3, 3), 0.5)
        img = constant_image((3, 3), 10, 10, 10)
        assert extract_statistics(p, img, threshold=0.5) is None

    def test_empty_prediction(self):
        p = np.zeros((3, 3))
        img = constant_image((3, 3), 10, 10, 10)
        assert extract_statistics(p, img) is None

    def test_region_restriction(self):
        # pixels outside the thresholded region must not leak in
        p = np.zeros((2, 2))
        p[0, 0] = 0.9
        img = constant_image((2, 2), 0, 0, 0)
        img[0, 0] = (255, 255, 255)
        s = extract_statistics(p, img)
        assert s.mean_r == pytest.approx(1.0)
        assert s.mean_prob == pytest.approx(0.9)


class TestFitValidityModel:
    def _triple(self, prob, gray):
        p = np.full((4, 4), prob)
        img = constant_image((4, 4), gray, gray, gray)
        gold = np.ones((4, 4), dtype=bool)
        return p, img, gold

    def test_constant_gray_fails_variance_rule(self):
        # channel sample lists are {0.5, 0.5}: zero variance
        training = [self._triple(0.6, 127), self._triple(0.8, 127)]
        with pytest.raises(FitError):
            fit_validity_model(training, "lesion")

    def test_hand_traced_fit(self):
        training = [self._triple(0.6, 100), self._triple(0.8, 140)]
        model = fit_validity_model(training, "lesion")
        assert model.sample_count == 2
        assert model.object_type == "lesion"
        ref = fit_beta([0.6, 0.8])
        assert model.prob_dist.alpha == pytest.approx(ref.alpha)
        assert model.prob_dist.beta == pytest.approx(ref.beta)

    def test_statistics_use_gold_region(self):
        p = np.zeros((4, 4))
        p[0, 0] = 1.0  # prediction far from the gold region
        gold = np.zeros((4, 4), dtype=bool)
        gold[2:, 2:] = True
        p[2:, 2:] = 0.25
        img = constant_image((4, 4), 50, 50, 50)
        img[2:, 2:] = (200, 100, 60)
        p2 = p.copy()
        p2[2:, 2:] = 0.35
        img2 = img.copy()
        img2[2:, 2:] = (180, 120, 80)
        model = fit_validity_model([(p, img, gold), (p2, img2, gold)], "x")
        ref = fit_beta([0.25, 0.35])
        assert model.prob_dist.alpha == pytest.approx(ref.alpha)
        ref_r = fit_beta([200 / 255, 180 / 255])
        assert model.r_dist.alpha == pytest.approx(ref_r.alpha)

    def test_single_image_rejected(self):
        with pytest.raises(FitError):
            fit_validity_model([self._triple(0.6, 100)], "x")

    def test_empty_gold_rejected(self):
        p = np.full((3, 3), 0.5)
        img = constant_image((3, 3), 9, 9, 9)
        gold = np.zeros((3, 3), dtype=bool)
        with pytest.raises(DomainError):
            fit_validity_model([(p, img, gold), (p, img, gold)], "x")

    def test_recovery_from_synthetic_corpus(self):
        rng = np.random.default_rng(99)
        triples = []
        for _ in range(600):
            prob = float(rng.beta(6.0, 3.0))
            chans = [int(round(255 * float(rng.beta(8.0, 4.0)))) for _ in range(3)]
            p = np.full((2, 2), prob)
            img = constant_image((2, 2), *chans)
            gold = np.ones((2, 2), dtype=bool)
            triples.append((p, img, gold))
        model = fit_validity_model(triples, "x")
        assert abs(model.prob_dist.alpha - 6.0) / 6.0 < 0.15
        assert abs(model.prob_dist.beta - 3.0) / 3.0 < 0.15


def known_model(channel_tests=True):
    return ValidityModel(
        object_type="tumor",
        prob_dist=BetaParams(2.0, 5.0),
        r_dist=BetaParams(3.0, 3.0),
        g_dist=BetaParams(4.0, 2.0),
        b_dist=BetaParams(2.0, 2.0),
        sample_count=10,
        channel_tests=channel_tests,
    )


def sample_at_quantiles(model, u_prob, u_r, u_g, u_b):
    return ValiditySample(
        sample_at_cdf(model.prob_dist, u_prob),
        sample_at_cdf(model.r_dist, u_r),
        sample_at_cdf(model.g_dist, u_g),
        sample_at_cdf(model.b_dist, u_b),
    )


class TestValidityPvalue:
    def test_all_medians(self):
        model = known_model()
        s = sample_at_quantiles(model, 0.5, 0.5, 0.5, 0.5)
        report = validity_pvalue(model, s)
        for p in (report.p_prob, report.p_r, report.p_g, report.p_b):
            assert p == pytest.approx(1.0, abs=1e-9)
        assert report.summary_p == pytest.approx(1.0, abs=1e-8)
        assert report.is_valid

    def test_product_rule(self):
        model = known_model()
        # CDF 0.75 gives D=0.75 and p=0.5; medians give p=1
        s = sample_at_quantiles(model, 0.75, 0.75, 0.5, 0.5)
        report = validity_pvalue(model, s)
        assert report.p_prob == pytest.approx(0.5, abs=1e-9)
        assert report.p_r == pytest.approx(0.5, abs=1e-9)
        assert report.summary_p == pytest.approx(0.25, abs=1e-8)
        assert report.is_valid

    def test_extreme_tails_rejected(self):
        model = known_model()
        s = sample_at_quantiles(model, 0.999, 0.999, 0.999, 0.999)
        report = validity_pvalue(model, s)
        assert report.summary_p <= (0.002) ** 4 * (1.0 + 1e-9)
        assert not report.is_valid

    def test_degenerate_sample(self):
        report = validity_pvalue(known_model(), None)
        assert report.summary_p == 0.0
        assert not report.is_valid

    def test_channel_tests_disabled(self):
        model = known_model(channel_tests=False)
        s = sample_at_quantiles(model, 0.75, 0.999, 0.999, 0.999)
        report = validity_pvalue(model, s)
        assert report.p_r == 1.0 and report.p_g == 1.0 and report.p_b == 1.0
        assert report.summary_p == pytest.approx(report.p_prob)
        assert report.is_valid

    def test_summary_bounded_by_components(self):
        model = known_model()
        rng = np.random.default_rng(3)
        for _ in range(50):
            s = sample_at_quantiles(model, *rng.uniform(0.001, 0.999, size=4))
            r = validity_pvalue(model, s)
            comps = [r.p_prob, r.p_r, r.p_g, r.p_b]
            assert 0.0 <= r.summary_p <= min(comps) + 1e-15
            assert all(0.0 <= p <= 1.0 for p in comps)

    def test_cutoff_validated(self):
        with pytest.raises(DomainError):
            validity_pvalue(known_model(), None, cutoff=1.5)


class TestModelJson:
    def test_round_trip(self):
        model = known_model()
        text = model_to_json(model)
        back = model_from_json(text)
        assert back == model

    def test_field_order(self):
        text = model_to_json(known_model())
        assert text.startswith('{"object_type":"tumor","sample_count":10,"prob":')
        assert text.index('"prob"') < text.index('"r"')
        assert text.index('"r"') < text.index('"g"') < text.index('"b"')

    def test_real_precision(self):
        model = known_model()
        model = type(model)(
            object_type="t", prob_dist=BetaParams(1 / 3, 2 / 3),
            r_dist=model.r_dist, g_dist=model.g_dist, b_dist=model.b_dist,
            sample_count=2,
        )
        text = model_to_json(model)
        assert "0.33333333333333331" in text
        back = model_from_json(text)
        assert back.prob_dist.alpha == 1 / 3

    def test_channel_flag_persisted(self):
        on = model_to_json(known_model())
        off = model_to_json(known_model(channel_tests=False))
        assert "channel_tests" not in on
        assert '"channel_tests":false' in off
        assert model_from_json(off).channel_tests is False

    def test_rejects_junk(self):
        with pytest.raises(FormatError):
            model_from_json("not json")
        with pytest.raises(FormatError):
            model_from_json('{"object_type":"x"}')
