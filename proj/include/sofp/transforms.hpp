#pragma once

#include <complex>

#include "sofp/ensembles.hpp"
#include "sofp/estimate.hpp"

namespace sofp::transforms {

using Complex = std::complex<double>;

/// sqrt(z^2 - 4) as sqrt(z - 2) * sqrt(z + 2) with principal square roots:
/// analytic exactly off [-2, 2], asymptotic to z at infinity, and symmetric
/// under conjugation.
Complex branched_sqrt(Complex z);

/// True when z lies on the branch cut [-2, 2].
bool on_semicircle_cut(Complex z);

/// Cauchy transform of the semicircle law, G(z) = (z - sqrt(z^2 - 4)) / 2;
/// satisfies G^2 - z G + 1 = 0 and G ~ 1/z at infinity.
Complex semicircle_cauchy(Complex z);

/// G'(z) from implicit differentiation of the quadratic:
/// G' = G / (2G - z) = -G / sqrt(z^2 - 4). No numeric differentiation.
Complex semicircle_cauchy_derivative(Complex z);

/// Minimum |z - w| below which the closed forms are refused: both are 0/0 at
/// z = w (removable), and quadrature callers keep the contours disjoint
/// instead of evaluating the limit.
double diagonal_guard(Complex z);

/// GUE second-order Cauchy transform, free-probability form:
/// G'(z) G'(w) / (G(z) - G(w))^2 - 1 / (z - w)^2.
Complex g2_gue_free(Complex z, Complex w);

/// Same transform, resolvent-covariance form:
/// ((z w - 4) / (sqrt(z^2-4) sqrt(w^2-4)) - 1) / (2 (z - w)^2).
Complex g2_gue_ps(Complex z, Complex w);

/// Sum over eigenvalues of 1 / (z - lambda_i).
Complex resolvent_trace(const Spectrum& spectrum, Complex z);

/// Distance from z to the segment [-m, m] on the real axis.
double distance_to_segment(Complex z, double m);

/// Monte Carlo estimate of G2(z, w) as the sample covariance of truncated
/// resolvent traces sum_{|lambda| <= M} 1/(z - lambda) across independent
/// draws, with jackknife standard error. M is the ensemble's tail cutoff; the
/// count of draws with ||X|| > M is reported in diagnostics.
EstimateWithError g2_empirical(const EnsembleSpec& spec, int n, Complex z, Complex w,
                               int replicas, RngStream rng, int threads = 0);

}  // namespace sofp::transforms
