#include "fimpkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <tuple>

#include "fimpkit/distributions.hpp"
#include "fimpkit/error.hpp"
#include "fimpkit/parallel.hpp"

namespace fimpkit::stats {
namespace {

void require_size(std::span<const double> x, std::size_t minimum, const char* what) {
    if (x.size() < minimum) {
        fail(ErrorCode::SampleTooSmall, std::string(what) + " needs at least " + std::to_string(minimum) +
                                            " values, got " + std::to_string(x.size()));
    }
}

double central_moment(std::span<const double> x, double mu, int order) {
    double s = 0.0;
    for (double v : x) {
        s += std::pow(v - mu, order);
    }
    return s / static_cast<double>(x.size());
}

double poly(const double* c, int terms, double x) {
    double r = c[terms - 1];
    for (int i = terms - 2; i >= 0; --i) {
        r = r * x + c[i];
    }
    return r;
}

double skew_z(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double b2 = skewness(x);
    double y = b2 * std::sqrt(((n + 1.0) * (n + 3.0)) / (6.0 * (n - 2.0)));
    const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                         ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
    const double alpha = std::sqrt(2.0 / (w2 - 1.0));
    if (y == 0.0) {
        y = 1.0;
    }
    return delta * std::log(y / alpha + std::sqrt((y / alpha) * (y / alpha) + 1.0));
}

double kurtosis_z(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double b2 = kurtosis(x);
    const double e = 3.0 * (n - 1.0) / (n + 1.0);
    const double varb2 = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    const double xk = (b2 - e) / std::sqrt(varb2);
    const double sqrtbeta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                             std::sqrt((6.0 * (n + 3.0) * (n + 5.0)) / (n * (n - 2.0) * (n - 3.0)));
    const double a = 6.0 + 8.0 / sqrtbeta1 * (2.0 / sqrtbeta1 + std::sqrt(1.0 + 4.0 / (sqrtbeta1 * sqrtbeta1)));
    const double term1 = 1.0 - 2.0 / (9.0 * a);
    const double denom = 1.0 + xk * std::sqrt(2.0 / (a - 4.0));
    if (denom == 0.0) {
        fail(ErrorCode::InvalidValue, "kurtosis test is undefined for this sample");
    }
    const double term2 = std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
    return (term1 - term2) / std::sqrt(2.0 / (9.0 * a));
}

// Royston's AS R94 coefficients for the Shapiro-Wilk statistic.
std::vector<double> swilk_coefficients(std::size_t n) {
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
        return a;
    }
    static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    const double an = static_cast<double>(n);
    const double an25 = an + 0.25;
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        m[i] = dist::normal_quantile((static_cast<double>(i + 1) - 0.375) / an25);
        summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - m[0] / ssumm2;

    std::size_t first = 0;
    double fac = 0.0;
    if (n > 5) {
        first = 2;
        const double a2 = -m[1] / ssumm2 + poly(c2, 6, rsn);
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[1] = a2;
    } else {
        first = 1;
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first; i < half; ++i) {
        a[i] = -m[i] / fac;
    }
    return a;
}

double swilk_p_value(double w, std::size_t n) {
    if (n == 3) {
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = std::numbers::pi / 3.0;
        return std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    }
    static constexpr double g[] = {-2.273, 0.459};
    static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
    const double an = static_cast<double>(n);
    const double w1 = 1.0 - w;
    if (w1 <= 0.0) {
        return 1.0;
    }
    double y = std::log(w1);
    const double xx = std::log(an);
    double m = 0.0;
    double s = 0.0;
    if (n <= 11) {
        const double gamma = poly(g, 2, an);
        if (y >= gamma) {
            return 1e-99;
        }
        y = -std::log(gamma - y);
        m = poly(c3, 4, an);
        s = std::exp(poly(c4, 4, an));
    } else {
        m = poly(c5, 4, xx);
        s = std::exp(poly(c6, 3, xx));
    }
    return dist::normal_sf((y - m) / s);
}

struct NullKey {
    std::size_t n;
    std::size_t replicates;
    std::uint64_t seed;
    auto operator<=>(const NullKey&) const = default;
};

double uniform_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> simulate_lilliefors_null(std::size_t n, const LillieforsOptions& options) {
    constexpr std::size_t kStreams = 64;
    std::vector<double> null(options.replicates);
    parallel_for(kStreams, [&](std::size_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(stream)};
        std::mt19937_64 rng(seq);
        std::vector<double> sample(n);
        const std::size_t begin = options.replicates * stream / kStreams;
        const std::size_t end = options.replicates * (stream + 1) / kStreams;
        for (std::size_t r = begin; r < end; ++r) {
            for (auto& v : sample) {
                v = dist::normal_quantile(uniform_open(rng));
            }
            null[r] = lilliefors_statistic(sample);
        }
    });
    std::sort(null.begin(), null.end());
    return null;
}

std::shared_ptr<const std::vector<double>> lilliefors_null(std::size_t n, const LillieforsOptions& options) {
    static std::mutex mutex;
    static std::map<NullKey, std::shared_ptr<const std::vector<double>>> cache;
    const NullKey key{n, options.replicates, options.seed};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    auto table = std::make_shared<const std::vector<double>>(simulate_lilliefors_null(n, options));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace

std::string_view to_string(TTestVariant v) {
    switch (v) {
        case TTestVariant::Welch: return "welch";
        case TTestVariant::Pooled: return "pooled";
        case TTestVariant::Paired: return "paired";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Strong: return "Strong";
        case Verdict::Weak: return "Weak";
        case Verdict::None: return "None";
    }
    return "?";
}

double mean(std::span<const double> x) {
    if (x.empty()) {
        fail(ErrorCode::SampleTooSmall, "mean of an empty sample");
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    require_size(x, 2, "variance");
    const double mu = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mu) * (v - mu);
    }
    return ss / static_cast<double>(x.size() - 1);
}

double skewness(std::span<const double> x) {
    const double mu = mean(x);
    const double m2 = central_moment(x, mu, 2);
    if (m2 == 0.0) {
        return 0.0;
    }
    return central_moment(x, mu, 3) / std::pow(m2, 1.5);
}

double kurtosis(std::span<const double> x) {
    const double mu = mean(x);
    const double m2 = central_moment(x, mu, 2);
    if (m2 == 0.0) {
        return 0.0;
    }
    return central_moment(x, mu, 4) / (m2 * m2);
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        fail(ErrorCode::SampleTooSmall, "quantile of an empty sample");
    }
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

TTestResult two_sample_t_test(std::span<const double> x, std::span<const double> y, TTestVariant variant) {
    require_size(x, 2, "t-test sample x");
    require_size(y, 2, "t-test sample y");
    TTestResult r;
    r.variant = variant;

    if (variant == TTestVariant::Paired) {
        if (x.size() != y.size()) {
            fail(ErrorCode::DimensionMismatch, "paired t-test needs equal sample sizes");
        }
        std::vector<double> d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            d[i] = x[i] - y[i];
        }
        const double md = mean(d);
        const double vd = variance(d);
        r.df = static_cast<double>(d.size() - 1);
        if (vd == 0.0) {
            if (md != 0.0) {
                fail(ErrorCode::ZeroVarianceBoth, "paired differences are constant and non-zero");
            }
            return r;
        }
        r.t = md / std::sqrt(vd / static_cast<double>(d.size()));
        r.p = dist::student_t_two_sided_p(r.t, r.df);
        return r;
    }

    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double mx = mean(x);
    const double my = mean(y);
    const double vx = variance(x);
    const double vy = variance(y);
    if (vx == 0.0 && vy == 0.0) {
        if (mx != my) {
            fail(ErrorCode::ZeroVarianceBoth, "both samples are constant with different means");
        }
        r.df = nx + ny - 2.0;
        return r;
    }
    if (variant == TTestVariant::Pooled) {
        const double sp2 = ((nx - 1.0) * vx + (ny - 1.0) * vy) / (nx + ny - 2.0);
        r.df = nx + ny - 2.0;
        r.t = (mx - my) / std::sqrt(sp2 * (1.0 / nx + 1.0 / ny));
    } else {
        const double ax = vx / nx;
        const double ay = vy / ny;
        r.t = (mx - my) / std::sqrt(ax + ay);
        r.df = (ax + ay) * (ax + ay) / (ax * ax / (nx - 1.0) + ay * ay / (ny - 1.0));
    }
    r.p = dist::student_t_two_sided_p(r.t, r.df);
    return r;
}

TestOutcome dagostino_k2(std::span<const double> x, double alpha) {
    require_size(x, 8, "D'Agostino K^2");
    TestOutcome out;
    const double zs = skew_z(x);
    const double zk = kurtosis_z(x);
    out.statistic = zs * zs + zk * zk;
    out.p = dist::chi2_df2_sf(out.statistic);
    out.pass = out.p >= alpha;
    return out;
}

TestOutcome jarque_bera(std::span<const double> x, double alpha) {
    require_size(x, 2, "Jarque-Bera");
    TestOutcome out;
    const double n = static_cast<double>(x.size());
    const double s = skewness(x);
    const double k = kurtosis(x) - 3.0;
    out.statistic = n / 6.0 * (s * s + k * k / 4.0);
    out.p = dist::chi2_df2_sf(out.statistic);
    out.pass = out.p >= alpha;
    return out;
}

TestOutcome shapiro_wilk(std::span<const double> x, double alpha) {
    require_size(x, 3, "Shapiro-Wilk");
    if (x.size() > 5000) {
        fail(ErrorCode::InvalidValue, "Shapiro-Wilk is limited to n <= 5000; use K^2 or Jarque-Bera");
    }
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (sorted.back() - sorted.front() < 1e-19 * std::max(1.0, std::abs(sorted.front()))) {
        fail(ErrorCode::DegenerateSample, "Shapiro-Wilk needs a non-constant sample");
    }
    const auto a = swilk_coefficients(n);
    const double mu = mean(sorted);
    double ss = 0.0;
    for (double v : sorted) {
        ss += (v - mu) * (v - mu);
    }
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += a[i] * (sorted[n - 1 - i] - sorted[i]);
    }
    TestOutcome out;
    out.statistic = std::clamp(num * num / ss, 0.0, 1.0);
    out.p = std::clamp(swilk_p_value(out.statistic, n), 0.0, 1.0);
    out.pass = out.p >= alpha;
    return out;
}

double lilliefors_statistic(std::span<const double> x) {
    require_size(x, 2, "Lilliefors statistic");
    const double mu = mean(x);
    const double sd = std::sqrt(variance(x));
    if (sd == 0.0) {
        fail(ErrorCode::DegenerateSample, "KS against a fitted normal needs a non-constant sample");
    }
    std::vector<double> z(x.begin(), x.end());
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double cdf = dist::normal_cdf((z[i] - mu) / sd);
        d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    return d;
}

KsOutcome kolmogorov_smirnov_normal(std::span<const double> x, double alpha, const LillieforsOptions& options) {
    require_size(x, 4, "Kolmogorov-Smirnov");
    KsOutcome out;
    out.statistic = lilliefors_statistic(x);
    const double sqrt_n = std::sqrt(static_cast<double>(x.size()));
    out.p_naive = dist::kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * out.statistic);
    const auto null = lilliefors_null(x.size(), options);
    const auto at_least = static_cast<double>(null->end() - std::lower_bound(null->begin(), null->end(), out.statistic));
    out.p = (at_least + 1.0) / (static_cast<double>(null->size()) + 1.0);
    out.pass = out.p >= alpha;
    return out;
}

Verdict normality_verdict(std::span<const bool> passes) {
    const auto count = static_cast<std::size_t>(std::count(passes.begin(), passes.end(), true));
    if (count == passes.size() && count > 0) {
        return Verdict::Strong;
    }
    return count == 0 ? Verdict::None : Verdict::Weak;
}

NormalityReport normality_suite(std::span<const double> x, double alpha, const LillieforsOptions& options) {
    require_size(x, 8, "normality suite");
    NormalityReport r;
    r.n = x.size();
    r.dagostino = dagostino_k2(x, alpha);
    r.jarque_bera = jarque_bera(x, alpha);
    r.kolmogorov_smirnov = kolmogorov_smirnov_normal(x, alpha, options);
    r.shapiro_wilk = shapiro_wilk(x, alpha);
    const bool passes[] = {r.dagostino.pass, r.jarque_bera.pass, r.kolmogorov_smirnov.pass, r.shapiro_wilk.pass};
    r.verdict = normality_verdict(passes);
    return r;
}

}  // namespace fimpkit::stats
