#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fimpkit::stats {

enum class TTestVariant { Welch, Pooled, Paired };

std::string_view to_string(TTestVariant v);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;  // two-sided
    TTestVariant variant = TTestVariant::Welch;
};

/// Two-sample t-test (Welch by default). t is positive when mean(x) > mean(y).
/// Two constant samples with equal means give t = 0, p = 1; constant samples
/// with different means fail with ZeroVarianceBoth.
TTestResult two_sample_t_test(std::span<const double> x, std::span<const double> y,
                              TTestVariant variant = TTestVariant::Welch);

double mean(std::span<const double> x);
/// Sample variance with n - 1 in the denominator.
double variance(std::span<const double> x);
/// Biased (population) skewness m3 / m2^1.5.
double skewness(std::span<const double> x);
/// Biased kurtosis m4 / m2^2 (3 for a normal distribution).
double kurtosis(std::span<const double> x);
/// Linear-interpolation quantile of a sorted sample (type 7).
double quantile_sorted(std::span<const double> sorted, double q);

struct TestOutcome {
    double statistic = 0.0;
    double p = 1.0;
    bool pass = true;  // p >= alpha, i.e. normality not rejected
};

/// D'Agostino-Pearson K^2 omnibus test (skewness and kurtosis z-scores).
TestOutcome dagostino_k2(std::span<const double> x, double alpha = 0.05);
TestOutcome jarque_bera(std::span<const double> x, double alpha = 0.05);
/// Shapiro-Wilk W with Royston's AS R94 p-value, 3 <= n <= 5000.
TestOutcome shapiro_wilk(std::span<const double> x, double alpha = 0.05);

struct KsOutcome {
    double statistic = 0.0;
    double p = 1.0;          // Lilliefors (Monte Carlo) p-value
    double p_naive = 1.0;    // Kolmogorov asymptotic p ignoring estimated parameters
    bool pass = true;
};

struct LillieforsOptions {
    std::size_t replicates = 100000;
    std::uint64_t seed = 20240229;
};

/// KS distance to N(mean, sd) with parameters estimated from the sample.
double lilliefors_statistic(std::span<const double> x);
/// KS test against a fitted normal with a Monte Carlo Lilliefors p-value.
/// Null distributions are cached per (n, replicates, seed).
KsOutcome kolmogorov_smirnov_normal(std::span<const double> x, double alpha = 0.05,
                                    const LillieforsOptions& options = {});

enum class Verdict { Strong, Weak, None };
std::string_view to_string(Verdict v);

/// Strong when every test passes, None when none does, Weak otherwise.
Verdict normality_verdict(std::span<const bool> passes);

struct NormalityReport {
    TestOutcome dagostino;
    TestOutcome jarque_bera;
    KsOutcome kolmogorov_smirnov;
    TestOutcome shapiro_wilk;
    Verdict verdict = Verdict::None;
    std::size_t n = 0;
};

/// All four normality tests at the given alpha; needs at least 8 values.
NormalityReport normality_suite(std::span<const double> x, double alpha = 0.05,
                                const LillieforsOptions& options = {});

}  // namespace fimpkit::stats
