#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fimpkit/bit_matrix.hpp"
#include "fimpkit/core_data.hpp"
#include "fimpkit/stats.hpp"

namespace fimpkit {

enum class NullScheme {
    /// Every cell redrawn as Bernoulli(actor's Yes-rate); keeps row rates only.
    Bernoulli,
    /// Each bill column shuffled across actors; keeps bill popularity exactly.
    ColumnPermutation,
};

std::string_view to_string(NullScheme scheme);
std::optional<NullScheme> parse_null_scheme(std::string_view text);

struct NullModelOptions {
    NullScheme scheme = NullScheme::Bernoulli;
    std::size_t n_sims = 1000;
    std::uint64_t seed = 1;
    stats::TTestVariant variant = stats::TTestVariant::Welch;
    std::size_t threads = 0;
};

struct NullModelResult {
    std::size_t n_sims = 0;
    std::uint64_t seed = 0;
    NullScheme scheme = NullScheme::Bernoulli;
    stats::TTestVariant variant = stats::TTestVariant::Welch;
    double t_observed = 0.0;
    std::vector<double> t_null;  // in replication order
    /// (1 + #{|t_null| >= |t_observed|}) / (n_sims + 1)
    double p_empirical = 1.0;
    std::vector<std::pair<double, double>> quantiles;  // (level, t)
};

/// Randomized-vote calibration of the followed-vs-actual t statistic.
/// Replication r draws from its own generator seeded by (seed, r), so results
/// do not depend on the thread count.
NullModelResult simulate_null(const BitMatrix& rows, std::span<const double> traits, std::size_t k,
                              const NullModelOptions& options = {});

/// Matrix/table form; actors without a trait are dropped first, as in fimp.
NullModelResult simulate_null(const VoteMatrix& votes, const TraitTable& traits, std::size_t k,
                              const NullModelOptions& options = {});

/// One randomized matrix, exposed for tests.
BitMatrix randomize_votes(const BitMatrix& rows, NullScheme scheme, std::uint64_t seed, std::uint64_t replication);

}  // namespace fimpkit
