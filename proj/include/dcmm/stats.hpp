#pragma once

#include <vector>

namespace dcmm::stats {

// Standard normal density and CDF.
double normal_pdf(double x);
double normal_cdf(double x);

// Inverse standard normal CDF. Argument must lie in (0,1).
// Acklam's rational approximation refined with one Halley step; absolute
// error is far below the 1e-8 contract.
double normal_quantile(double p);

// Survival function of the chi-square distribution with df degrees of
// freedom, P(X > x). Regularized incomplete gamma Q(df/2, x/2); series
// expansion below the a+1 split, Lentz continued fraction above it.
double chisq_survival(double x, int df);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

double mean(const std::vector<double>& v);
// Sample standard deviation (n-1 denominator); NaN when fewer than 2 values.
double sample_std(const std::vector<double>& v);

// Kolmogorov-Smirnov distance between the empirical CDF of the sample and
// the standard normal CDF.
double ks_distance_to_normal(std::vector<double> sample);

// Lag-1 sample autocorrelation; 0 when fewer than 3 values.
double lag1_autocorrelation(const std::vector<double>& v);

}  // namespace dcmm::stats
