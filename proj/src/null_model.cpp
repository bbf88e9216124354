#include "fimpkit/null_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"
#include "fimpkit/fimp.hpp"
#include "fimpkit/parallel.hpp"

namespace fimpkit {
namespace {

constexpr double kQuantileLevels[] = {0.005, 0.025, 0.05, 0.5, 0.95, 0.975, 0.995};

std::mt19937_64 replication_stream(std::uint64_t seed, std::uint64_t replication) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(replication >> 32)};
    return std::mt19937_64(seq);
}

// Unbiased draw in [0, bound) by multiply-shift with rejection.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    __extension__ typedef unsigned __int128 u128;
    u128 product = static_cast<u128>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            product = static_cast<u128>(rng()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

void fill_bernoulli(const BitMatrix& rows, BitMatrix& out, std::mt19937_64& rng) {
    const std::size_t m = rows.cols();
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        auto dst = out.row(r);
        std::fill(dst.begin(), dst.end(), 0);
        const std::uint64_t count = rows.row_count(r);
        if (count == 0) {
            continue;
        }
        if (count == m) {
            for (std::size_t c = 0; c < m; ++c) {
                dst[c / 64] |= std::uint64_t{1} << (c % 64);
            }
            continue;
        }
        // Cell is Yes when a 32-bit uniform falls below rate * 2^32. Each
        // 64-bit draw covers two consecutive cells, low half first.
        const auto threshold = static_cast<std::uint64_t>(
            std::llround(static_cast<double>(count) / static_cast<double>(m) * 4294967296.0));
        std::size_t c = 0;
        for (std::size_t w = 0; w < dst.size(); ++w) {
            const std::size_t end = std::min(m, (w + 1) * 64);
            std::uint64_t word = 0;
            for (; c + 1 < end; c += 2) {
                const std::uint64_t draw = rng();
                word |= static_cast<std::uint64_t>((draw & 0xffffffffu) < threshold) << (c % 64);
                word |= static_cast<std::uint64_t>((draw >> 32) < threshold) << ((c + 1) % 64);
            }
            dst[w] = word;
        }
        if (c < m && (rng() & 0xffffffffu) < threshold) {
            dst[c / 64] |= std::uint64_t{1} << (c % 64);
        }
    }
}

void fill_column_permutation(const BitMatrix& rows, BitMatrix& out, std::mt19937_64& rng) {
    const std::size_t n = rows.rows();
    std::vector<std::uint8_t> column(n);
    for (std::size_t c = 0; c < rows.cols(); ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            column[r] = rows.get(r, c) ? 1 : 0;
        }
        for (std::size_t i = n; i > 1; --i) {
            std::swap(column[i - 1], column[bounded(rng, i)]);
        }
        for (std::size_t r = 0; r < n; ++r) {
            out.set(r, c, column[r] != 0);
        }
    }
}

}  // namespace

std::string_view to_string(NullScheme scheme) {
    switch (scheme) {
        case NullScheme::Bernoulli: return "bernoulli";
        case NullScheme::ColumnPermutation: return "column-permutation";
    }
    return "?";
}

std::optional<NullScheme> parse_null_scheme(std::string_view text) {
    const auto lower = csv::to_lower(csv::trim(text));
    if (lower == "bernoulli" || lower == "row-rate") {
        return NullScheme::Bernoulli;
    }
    if (lower == "column-permutation" || lower == "column" || lower == "permutation") {
        return NullScheme::ColumnPermutation;
    }
    return std::nullopt;
}

BitMatrix randomize_votes(const BitMatrix& rows, NullScheme scheme, std::uint64_t seed, std::uint64_t replication) {
    auto rng = replication_stream(seed, replication);
    BitMatrix out(rows.rows(), rows.cols());
    if (scheme == NullScheme::Bernoulli) {
        fill_bernoulli(rows, out, rng);
    } else {
        fill_column_permutation(rows, out, rng);
    }
    return out;
}

NullModelResult simulate_null(const BitMatrix& rows, std::span<const double> traits, std::size_t k,
                              const NullModelOptions& options) {
    if (options.n_sims < 1) {
        fail(ErrorCode::InvalidValue, "null model needs at least one replication");
    }
    if (traits.size() != rows.rows()) {
        fail(ErrorCode::DimensionMismatch, "trait array does not match the matrix rows");
    }
    if (k < 1 || k >= rows.rows()) {
        fail(ErrorCode::KOutOfRange, "K = " + std::to_string(k) + " outside [1, " +
                                         std::to_string(rows.rows() > 0 ? rows.rows() - 1 : 0) + "]");
    }

    NullModelResult result;
    result.n_sims = options.n_sims;
    result.seed = options.seed;
    result.scheme = options.scheme;
    result.variant = options.variant;

    const CosineNeighbors observed(rows);
    const auto followed = fimp_followed(observed, traits, k);
    result.t_observed = stats::two_sample_t_test(followed, traits, options.variant).t;

    result.t_null.assign(options.n_sims, 0.0);
    parallel_for(
        options.n_sims,
        [&](std::size_t r) {
            const auto shuffled = randomize_votes(rows, options.scheme, options.seed, r);
            const CosineNeighbors index(shuffled);
            const auto fol = fimp_followed(index, traits, k);
            result.t_null[r] = stats::two_sample_t_test(fol, traits, options.variant).t;
        },
        options.threads);

    const double observed_abs = std::abs(result.t_observed);
    const auto extreme = std::count_if(result.t_null.begin(), result.t_null.end(),
                                       [&](double t) { return std::abs(t) >= observed_abs; });
    result.p_empirical = (static_cast<double>(extreme) + 1.0) / (static_cast<double>(options.n_sims) + 1.0);

    std::vector<double> sorted = result.t_null;
    std::sort(sorted.begin(), sorted.end());
    for (double level : kQuantileLevels) {
        result.quantiles.emplace_back(level, stats::quantile_sorted(sorted, level));
    }
    return result;
}

NullModelResult simulate_null(const VoteMatrix& votes, const TraitTable& traits, std::size_t k,
                              const NullModelOptions& options) {
    std::vector<std::size_t> keep;
    std::vector<double> values;
    for (std::size_t i = 0; i < votes.actor_count(); ++i) {
        if (auto v = traits.find(votes.actors()[i])) {
            keep.push_back(i);
            values.push_back(*v);
        }
    }
    return simulate_null(votes.encoded().select_rows(keep), values, k, options);
}

}  // namespace fimpkit
