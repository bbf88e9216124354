#include "fimpkit/fimp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"
#include "fimpkit/parallel.hpp"

namespace fimpkit {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        fail(ErrorCode::DimensionMismatch, "cosine similarity of vectors with " + std::to_string(a.size()) +
                                               " and " + std::to_string(b.size()) + " elements");
    }
    double ab = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) {
        return 0.0;
    }
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

CosineNeighbors::CosineNeighbors(const BitMatrix& rows)
    : n_(rows.rows()), gram_(gram_counts(rows)), norms_(n_) {
    for (std::size_t i = 0; i < n_; ++i) {
        norms_[i] = gram_[i * n_ + i];
    }
}

double CosineNeighbors::similarity(std::size_t i, std::size_t j) const {
    if (norms_[i] == 0 || norms_[j] == 0) {
        return 0.0;
    }
    const double dot = gram_[i * n_ + j];
    return dot / (std::sqrt(static_cast<double>(norms_[i])) * std::sqrt(static_cast<double>(norms_[j])));
}

bool CosineNeighbors::ranks_before(std::size_t i, std::size_t a, std::size_t b) const {
    // For a fixed query row the query norm cancels: compare dot_a / sqrt(|a|)
    // against dot_b / sqrt(|b|) through dot_a^2 |b| vs dot_b^2 |a|.
    __extension__ typedef unsigned __int128 wide;
    const wide da = gram_[i * n_ + a];
    const wide db = gram_[i * n_ + b];
    const wide na = norms_[a] == 0 ? 1 : norms_[a];
    const wide nb = norms_[b] == 0 ? 1 : norms_[b];
    const wide lhs = da * da * nb;
    const wide rhs = db * db * na;
    if (lhs != rhs) {
        return lhs > rhs;
    }
    return a < b;
}

std::vector<std::size_t> CosineNeighbors::nearest(std::size_t i, std::size_t k) const {
    std::vector<std::size_t> pool;
    pool.reserve(n_ > 0 ? n_ - 1 : 0);
    for (std::size_t j = 0; j < n_; ++j) {
        if (j != i) {
            pool.push_back(j);
        }
    }
    k = std::min(k, pool.size());
    auto cmp = [&](std::size_t a, std::size_t b) { return ranks_before(i, a, b); };
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(), cmp);
    pool.resize(k);
    return pool;
}

std::vector<double> fimp_followed(const CosineNeighbors& index, std::span<const double> traits, std::size_t k) {
    const std::size_t n = index.size();
    std::vector<double> followed(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = index.nearest(i, k);
        double sum = 0.0;
        for (auto j : idx) {
            sum += traits[j];
        }
        followed[i] = sum / static_cast<double>(k);
    }
    return followed;
}

FimpResult fimp(const BitMatrix& rows, std::span<const double> traits, std::size_t k, const FimpOptions& options) {
    const std::size_t n = rows.rows();
    if (traits.size() != n) {
        fail(ErrorCode::DimensionMismatch, "trait array has " + std::to_string(traits.size()) +
                                               " entries for " + std::to_string(n) + " rows");
    }
    if (k < 1 || k + 1 > n) {
        fail(ErrorCode::KOutOfRange, "k = " + std::to_string(k) + " needs 1 <= k <= n - 1 with n = " +
                                         std::to_string(n));
    }
    const CosineNeighbors index(rows);
    FimpResult out;
    out.k = k;
    out.trait_actual.assign(traits.begin(), traits.end());
    out.trait_followed.resize(n);
    out.neighbors.resize(n);
    out.zero_row.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.zero_row[i] = index.is_zero_row(i);
    }
    parallel_for(
        n,
        [&](std::size_t i) {
            const auto idx = index.nearest(i, k);
            double sum = 0.0;
            auto& list = out.neighbors[i];
            list.reserve(k);
            for (auto j : idx) {
                sum += traits[j];
                list.push_back({j, index.similarity(i, j)});
            }
            out.trait_followed[i] = sum / static_cast<double>(k);
        },
        options.threads);
    return out;
}

FimpResult fimp(const VoteMatrix& votes, const TraitTable& traits, std::size_t k, const FimpOptions& options) {
    std::vector<std::size_t> keep;
    std::vector<double> values;
    std::vector<std::string> excluded;
    for (std::size_t i = 0; i < votes.actor_count(); ++i) {
        const auto& id = votes.actors()[i];
        const auto t = traits.find(id);
        if (!t) {
            if (options.require_all_traits) {
                fail(ErrorCode::MissingTrait, "actor '" + id + "' has no trait value");
            }
            excluded.push_back(id);
            continue;
        }
        if (options.exclude_zero_rows && votes.encoded().row_count(i) == 0) {
            excluded.push_back(id);
            continue;
        }
        keep.push_back(i);
        values.push_back(*t);
    }
    auto result = fimp(votes.encoded().select_rows(keep), values, k, options);
    result.actors.reserve(keep.size());
    for (auto i : keep) {
        result.actors.push_back(votes.actors()[i]);
    }
    result.excluded = std::move(excluded);
    return result;
}

std::string fimp_csv(const FimpResult& r) {
    std::ostringstream out;
    csv::write_row(out, {"actor_id", "fwhr_act", "fwhr_fol"});
    for (std::size_t i = 0; i < r.trait_actual.size(); ++i) {
        const std::string id = i < r.actors.size() ? r.actors[i] : std::to_string(i);
        csv::write_row(out, {id, csv::format_number(r.trait_actual[i]), csv::format_number(r.trait_followed[i])});
    }
    return out.str();
}

std::string neighbors_csv(const FimpResult& r) {
    std::ostringstream out;
    csv::write_row(out, {"actor_id", "rank", "neighbor_id", "similarity"});
    auto name = [&](std::size_t i) { return i < r.actors.size() ? r.actors[i] : std::to_string(i); };
    for (std::size_t i = 0; i < r.neighbors.size(); ++i) {
        for (std::size_t rank = 0; rank < r.neighbors[i].size(); ++rank) {
            const auto& nb = r.neighbors[i][rank];
            csv::write_row(out, {name(i), std::to_string(rank + 1), name(nb.index), csv::format_number(nb.similarity)});
        }
    }
    return out.str();
}

}  // namespace fimpkit
