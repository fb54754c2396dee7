"""Statistical rejection of object prompts that do not match the image.

For every object type, four Beta distributions are fitted over training
images containing that object: the mean predicted probability inside the
object region, and the mean of each color channel (R, G, B) over the same
region, scaled to [0, 1]. At test time the same four statistics are
extracted from the predicted region and each is scored with a one-sample
Kolmogorov-Smirnov test against its fitted distribution. The four tests
are treated as independent and their product is the summary p-value; a
prompt whose summary falls below the cutoff (default 0.01) is rejected.

A prediction with no pixel above the probability threshold carries no
region to score; it is reported with summary 0 and rejected outright.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError, FormatError
from .grids import as_mask, as_pmap, as_rgb, binarize, check_same_shape, mask_mean
from .serial import canonical_json

DEFAULT_CUTOFF = 0.01
DEFAULT_THRESHOLD = 0.5

# fitting support: samples are pulled off the exact 0/1 endpoints
_SUPPORT_EPS = 1e-6


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise FitError("beta parameters must be finite")
        if self.alpha <= 0 or self.beta <= 0:
            raise FitError(f"beta parameters must be positive, got ({self.alpha}, {self.beta})")


@dataclass(frozen=True)
class ValiditySample:
    """Per-image region statistics, each in [0, 1]."""

    mean_prob: float
    mean_r: float
    mean_g: float
    mean_b: float


@dataclass(frozen=True)
class ValidityModel:
    object_type: str
    prob_dist: BetaParams
    r_dist: BetaParams
    g_dist: BetaParams
    b_dist: BetaParams
    sample_count: int
    # grayscale modalities may carry no color signal worth testing; with
    # channel_tests off the three channel p-values are reported as 1
    channel_tests: bool = True


@dataclass(frozen=True)
class ValidityReport:
    p_prob: float
    p_r: float
    p_g: float
    p_b: float
    summary_p: float
    is_valid: bool


def fit_beta(samples) -> BetaParams:
    """Method-of-moments Beta fit.

    With sample mean m and (unbiased) sample variance v, the common factor
    is k = m(1-m)/v - 1 and the parameters are (m*k, (1-m)*k). Samples are
    clamped to [1e-6, 1 - 1e-6] first; exact endpoint values are outside
    the Beta support.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or len(x) < 2:
        raise FitError(f"need at least 2 samples, got {x.size}")
    if np.any(x < 0) or np.any(x > 1):
        raise FitError("samples must lie in [0, 1]")
    x = np.clip(x, _SUPPORT_EPS, 1.0 - _SUPPORT_EPS)
    if np.ptp(x) == 0:
        # identical samples; the mean's round-off would otherwise leak a
        # spurious variance of order 1e-33
        raise FitError("zero sample variance")
    m = float(x.mean())
    v = float(x.var(ddof=1))
    if v <= 0:
        raise FitError("zero sample variance")
    k = m * (1.0 - m) / v - 1.0
    if k <= 0:
        raise FitError(f"variance {v} too large for a Beta with mean {m}")
    return BetaParams(m * k, (1.0 - m) * k)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    TINY = 1e-300
    EPS = 1e-16
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < TINY:
        d = TINY
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < TINY:
            d = TINY
        c = 1.0 + aa / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < TINY:
            d = TINY
        c = 1.0 + aa / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise DomainError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def beta_cdf(params: BetaParams, x: float) -> float:
    """Regularized incomplete beta I_x(alpha, beta)."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"beta_cdf argument must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    a, b = params.alpha, params.beta
    front = math.exp(
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    # the continued fraction converges fast for x below the distribution bulk
    if x < (a + 1.0) / (a + b + 2.0):
        v = front * _betacf(a, b, x) / a
    else:
        v = 1.0 - front * _betacf(b, a, 1.0 - x) / b
    return min(1.0, max(0.0, v))


def _kolmogorov_sf(t: float) -> float:
    """Asymptotic Kolmogorov survival function Q(t) = 2*sum (-1)^(k-1) e^(-2 k^2 t^2)."""
    if t <= 0:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        term = math.exp(-2.0 * k * k * t * t)
        total += -term if k % 2 == 0 else term
        if term < 1e-16:
            break
    return min(1.0, max(0.0, 2.0 * total))


def ks_statistic(samples, params: BetaParams) -> float:
    """sup |empirical CDF - fitted CDF| over the sample points."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    if n == 0:
        raise DomainError("K-S test needs at least one sample")
    d = 0.0
    for i, xi in enumerate(x):
        f = beta_cdf(params, float(min(1.0, max(0.0, xi))))
        d = max(d, (i + 1) / n - f, f - i / n)
    return d


def ks_pvalue(samples, params: BetaParams) -> float:
    """One-sample K-S p-value against a fitted Beta.

    n = 1 uses the exact law P(D >= d) = 2(1 - d); larger samples use the
    asymptotic Kolmogorov distribution of sqrt(n) * D.
    """
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    if n == 0:
        raise DomainError("K-S test needs at least one sample")
    d = ks_statistic(x, params)
    if n == 1:
        return min(1.0, max(0.0, 2.0 * (1.0 - d)))
    return _kolmogorov_sf(math.sqrt(n) * d)


def extract_statistics(pmap, image, threshold: float = DEFAULT_THRESHOLD):
    """Region statistics of a prediction, or None when nothing is predicted.

    The region is the set of pixels with probability strictly above the
    threshold. Channel means are scaled by 255.
    """
    p = as_pmap(pmap)
    img = as_rgb(image)
    check_same_shape(p, img)
    region = binarize(p, threshold)
    if not region.any():
        return None
    return _statistics_over(p, img, region)


def _statistics_over(p, img, region) -> ValiditySample:
    mean_prob = mask_mean(p, region)
    chans = [float(img[..., c][region].mean() / 255.0) for c in range(3)]
    return ValiditySample(mean_prob, *chans)


def fit_validity_model(training, object_type: str, channel_tests: bool = True) -> ValidityModel:
    """Fit the four per-object-type Betas from (pmap, image, gold mask) triples.

    Statistics are taken over the gold mask region of each training image.
    """
    probs, rs, gs, bs = [], [], [], []
    for pmap, image, gold in training:
        p = as_pmap(pmap)
        img = as_rgb(image)
        m = as_mask(gold)
        check_same_shape(p, m)
        check_same_shape(p, img)
        if not m.any():
            raise DomainError("training image has an empty gold mask")
        s = _statistics_over(p, img, m)
        probs.append(s.mean_prob)
        rs.append(s.mean_r)
        gs.append(s.mean_g)
        bs.append(s.mean_b)
    if len(probs) < 2:
        raise FitError(f"need at least 2 training images, got {len(probs)}")
    return ValidityModel(
        object_type=object_type,
        prob_dist=fit_beta(probs),
        r_dist=fit_beta(rs),
        g_dist=fit_beta(gs),
        b_dist=fit_beta(bs),
        sample_count=len(probs),
        channel_tests=channel_tests,
    )


def validity_pvalue(model: ValidityModel, sample, cutoff: float = DEFAULT_CUTOFF) -> ValidityReport:
    """Score one prediction against a fitted model.

    `sample` may be None (the degenerate empty-region signal), which is
    reported as summary 0 and rejected.
    """
    if not 0.0 <= cutoff <= 1.0:
        raise DomainError(f"cutoff must be in [0, 1], got {cutoff}")
    if sample is None:
        return ValidityReport(0.0, 0.0, 0.0, 0.0, 0.0, False)
    p_prob = ks_pvalue([sample.mean_prob], model.prob_dist)
    if model.channel_tests:
        p_r = ks_pvalue([sample.mean_r], model.r_dist)
        p_g = ks_pvalue([sample.mean_g], model.g_dist)
        p_b = ks_pvalue([sample.mean_b], model.b_dist)
    else:
        p_r = p_g = p_b = 1.0
    summary = p_prob * p_r * p_g * p_b
    return ValidityReport(p_prob, p_r, p_g, p_b, summary, summary >= cutoff)


# --- model file format -------------------------------------------------------

def _params_dict(p: BetaParams) -> dict:
    return {"alpha": p.alpha, "beta": p.beta}


def model_to_json(model: ValidityModel) -> str:
    doc = {
        "object_type": model.object_type,
        "sample_count": model.sample_count,
        "prob": _params_dict(model.prob_dist),
        "r": _params_dict(model.r_dist),
        "g": _params_dict(model.g_dist),
        "b": _params_dict(model.b_dist),
    }
    if not model.channel_tests:
        doc["channel_tests"] = False
    return canonical_json(doc, sort_keys=False)


def model_from_json(text: str) -> ValidityModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"validity model is not valid JSON: {e}") from None
    try:
        return ValidityModel(
            object_type=str(doc["object_type"]),
            prob_dist=BetaParams(**doc["prob"]),
            r_dist=BetaParams(**doc["r"]),
            g_dist=BetaParams(**doc["g"]),
            b_dist=BetaParams(**doc["b"]),
            sample_count=int(doc["sample_count"]),
            channel_tests=bool(doc.get("channel_tests", True)),
        )
    except (KeyError, TypeError) as e:
        raise FormatError(f"validity model missing field: {e}") from None
