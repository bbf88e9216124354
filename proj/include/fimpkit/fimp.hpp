#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fimpkit/bit_matrix.hpp"
#include "fimpkit/core_data.hpp"

namespace fimpkit {

/// Cosine similarity of two equal-length vectors. A zero vector has
/// similarity 0 with everything, itself included.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Exact cosine ranking over the rows of a binary matrix. Similarities are
/// compared as rationals (dot^2 * norm products in 128-bit integers), so ties
/// are exact and broken by ascending row index.
class CosineNeighbors {
public:
    explicit CosineNeighbors(const BitMatrix& rows);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double similarity(std::size_t i, std::size_t j) const;
    [[nodiscard]] bool is_zero_row(std::size_t i) const noexcept { return norms_[i] == 0; }

    /// The k rows most similar to `i`, excluding `i` itself, best first.
    [[nodiscard]] std::vector<std::size_t> nearest(std::size_t i, std::size_t k) const;

    /// True when row a ranks strictly ahead of row b as a neighbor of `i`.
    [[nodiscard]] bool ranks_before(std::size_t i, std::size_t a, std::size_t b) const;

private:
    std::size_t n_ = 0;
    std::vector<std::uint32_t> gram_;
    std::vector<std::uint32_t> norms_;
};

struct FimpOptions {
    /// Drop actors with an all-zero encoded row instead of flagging them.
    bool exclude_zero_rows = false;
    /// Fail with MissingTrait instead of dropping actors without a trait.
    bool require_all_traits = false;
    std::size_t threads = 0;
};

struct Neighbor {
    std::size_t index = 0;
    double similarity = 0.0;
};

struct FimpResult {
    std::vector<std::string> actors;
    std::vector<double> trait_actual;    // M_p restricted to retained actors
    std::vector<double> trait_followed;  // M_f
    std::size_t k = 0;
    std::vector<std::vector<Neighbor>> neighbors;
    std::vector<bool> zero_row;
    /// Actors dropped for lacking a trait or (in strict mode) a Yes vote.
    std::vector<std::string> excluded;
};

/// For each row, the mean trait of its k most cosine-similar other rows.
/// `traits` is aligned with the rows of `rows`.
FimpResult fimp(const BitMatrix& rows, std::span<const double> traits, std::size_t k,
                const FimpOptions& options = {});

/// Matrix/table form: actors without a trait leave both the neighbor pool and
/// the output.
FimpResult fimp(const VoteMatrix& votes, const TraitTable& traits, std::size_t k, const FimpOptions& options = {});

/// Only the followed-trait means; the null model uses this hot path.
std::vector<double> fimp_followed(const CosineNeighbors& index, std::span<const double> traits, std::size_t k);

/// `actor_id,fwhr_act,fwhr_fol`
std::string fimp_csv(const FimpResult& result);
/// `actor_id,rank,neighbor_id,similarity`
std::string neighbors_csv(const FimpResult& result);

}  // namespace fimpkit
