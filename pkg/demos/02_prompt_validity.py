#!/usr/bin/env python3
# Deciding whether a predicted probability map answers a sensible prompt.
#
# The idea: for a given object type, collect simple statistics of past
# correct predictions (mean predicted probability and mean RGB intensity
# inside the predicted region), fit a Beta distribution to each statistic,
# and then judge a new prediction by how extreme its statistics are under
# those fitted distributions. A one-sample Kolmogorov-Smirnov test turns
# each statistic into a p-value; tiny p-values mean "this does not look
# like past predictions for that prompt", i.e. the prompt was probably
# invalid for the image.

import numpy as np

from bioparse import (
    ValiditySample,
    extract_statistics,
    fit_beta,
    fit_validity_model,
    validity_pvalue,
)

rng = np.random.default_rng(20240810)

# ---------------------------------------------------------------------------
# Build a small synthetic training set: 64x64 RGB images with a bright
# square target, plus probability maps that mostly agree with the target.
# Training statistics are taken over the gold region of each image, so
# the fitted Betas describe what a correct prediction's region looks
# like. Confidence and brightness drift a little from case to case,
# which is what gives the statistics a distribution worth fitting.

def make_case():
    image = rng.integers(40, 90, size=(64, 64, 3), dtype=np.uint8)
    image[16:48, 16:48] += rng.integers(100, 160, dtype=np.uint8)
    level = rng.uniform(0.65, 0.95)
    pmap = np.full((64, 64), 0.1)
    pmap[16:48, 16:48] = np.clip(
        rng.normal(level, 0.05, size=(32, 32)), 0.51, 0.99)
    gold = np.zeros((64, 64), dtype=bool)
    gold[16:48, 16:48] = True
    return pmap, image, gold

# channel_tests=False keeps the summary to the probability statistic
# alone, whose p-value is calibrated (uniform for valid predictions).
# The default multiplies in the three color p-values as well, which
# flags more aggressively at the price of calibration.
training = [make_case() for _ in range(60)]
model = fit_validity_model(training, object_type="bright square",
                           channel_tests=False)
print("fitted model for %r from %d cases" % (model.object_type,
                                             model.sample_count))
print("  prob statistic ~ Beta(%.2f, %.2f)" % (model.prob_dist.alpha,
                                               model.prob_dist.beta))

# ---------------------------------------------------------------------------
# Score a fresh, well-behaved prediction. Its p-values should be
# unremarkable and the summary should clear the 0.01 cutoff.

pmap, image, _ = make_case()
sample = extract_statistics(pmap, image)
report = validity_pvalue(model, sample)
print("\nwell-behaved prediction")
print("  p_prob=%.3f p_r=%.3f p_g=%.3f p_b=%.3f" %
      (report.p_prob, report.p_r, report.p_g, report.p_b))
print("  summary_p=%.4g  is_valid=%s" % (report.summary_p, report.is_valid))

# ---------------------------------------------------------------------------
# Now a nonsense prediction: the map fires on a dark background region,
# so the color statistics sit in the far tail of the fitted Betas.

dark = ValiditySample(mean_prob=0.12, mean_r=0.05, mean_g=0.05, mean_b=0.05)
report = validity_pvalue(model, dark)
print("\nprediction over a dark region")
print("  summary_p=%.4g  is_valid=%s" % (report.summary_p, report.is_valid))

# ---------------------------------------------------------------------------
# A prediction with no foreground at all cannot be tested; the report
# marks it invalid with a summary of zero.

report = validity_pvalue(model, None)
print("\nempty prediction: summary_p=%.1f is_valid=%s"
      % (report.summary_p, report.is_valid))

# fit_beta itself is just method-of-moments on [0, 1] samples:
draws = rng.beta(2.0, 5.0, size=10000)
est = fit_beta(draws)
print("\nfit_beta on 10k Beta(2,5) draws: alpha=%.3f beta=%.3f"
      % (est.alpha, est.beta))
