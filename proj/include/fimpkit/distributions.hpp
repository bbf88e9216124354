#pragma once

namespace fimpkit::dist {

double normal_cdf(double z);
/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);
/// Inverse of Phi for p in (0, 1) (Wichura AS 241, about 1e-16 relative).
double normal_quantile(double p);

/// Regularised incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Student t CDF with `df` degrees of freedom (df may be fractional).
double student_t_cdf(double t, double df);
/// P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

/// Survival function of chi-square with 2 degrees of freedom.
double chi2_df2_sf(double x);

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) e^(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

}  // namespace fimpkit::dist
