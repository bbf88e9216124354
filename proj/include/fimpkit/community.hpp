#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fimpkit/bit_matrix.hpp"
#include "fimpkit/covote_network.hpp"

namespace fimpkit {

/// Dense modularity quantities for a weighted undirected graph:
/// B_ij = A_ij - k_i k_j / (2m).
class ModularityContext {
public:
    explicit ModularityContext(const CovoteGraph& graph);
    /// From a dense symmetric adjacency (row-major n x n, zero diagonal).
    ModularityContext(std::size_t n, std::vector<double> adjacency);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double total_weight() const noexcept { return m_; }  // m, half the degree sum
    [[nodiscard]] double degree(std::size_t i) const noexcept { return degree_[i]; }
    [[nodiscard]] double adjacency(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }
    [[nodiscard]] double modularity_entry(std::size_t i, std::size_t j) const noexcept;

    /// Generalised modularity matrix of the node subset `group`:
    /// B^g_ij = B_ij - delta_ij * sum_{l in g} B_il, row-major |g| x |g|.
    [[nodiscard]] std::vector<double> group_matrix(std::span<const std::size_t> group) const;

    /// Q = 1/(2m) sum_ij B_ij [c_i == c_j]; 0 when the graph has no edges.
    [[nodiscard]] double modularity(std::span<const std::size_t> labels) const;

private:
    std::size_t n_ = 0;
    double m_ = 0.0;
    std::vector<double> a_;
    std::vector<double> degree_;
};

struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;  // unit 2-norm
    std::size_t iterations = 0;
    double residual = 0.0;  // ||Bv - lambda v||_inf
};

struct PowerIterationOptions {
    double tolerance = 1e-10;  // relative to the shift ||B||_1
    std::size_t max_iterations = 100000;
};

/// Most positive eigenpair of a dense symmetric matrix by power iteration on
/// B + ||B||_1 I, from a fixed pseudo-random start vector.
Eigenpair leading_eigenpair(std::span<const double> matrix, std::size_t n, const PowerIterationOptions& options = {});

struct Bisection {
    bool divisible = false;
    std::vector<int> signs;  // +1 / -1 per group member
    double eigenvalue = 0.0;
    double delta_q = 0.0;
    Eigenpair eigen;
};

/// One spectral split of `group` by the sign of the leading eigenvector of its
/// generalised modularity matrix. Entries with |v_i| < 1e-12 go to the + side.
Bisection spectral_bisection(const ModularityContext& ctx, std::span<const std::size_t> group,
                             const PowerIterationOptions& options = {});

struct CommunityAssignment {
    std::vector<std::string> nodes;
    std::vector<std::size_t> labels;  // numbered by first appearance in node order
    std::size_t community_count = 0;
    double modularity = 0.0;
    std::size_t splits = 0;
};

struct CommunityOptions {
    /// Maximum recursion depth of bisections below each connected component.
    std::size_t max_depth = 64;
    PowerIterationOptions power;
};

/// Recursive leading-eigenvector community detection. Connected components
/// start as separate communities and are bisected independently.
CommunityAssignment leading_eigen_communities(const CovoteGraph& graph, const CommunityOptions& options = {});
CommunityAssignment leading_eigen_communities(const ModularityContext& ctx, std::vector<std::string> nodes,
                                              const CommunityOptions& options = {});

/// `actor_id,community`
std::string communities_csv(const CommunityAssignment& assignment);

enum class KMethod { Elbow, SqrtHeuristic, Fixed };

struct KSelection {
    std::vector<std::size_t> k_range;
    std::vector<double> error_curve;
    std::size_t chosen_k = 1;
    KMethod method = KMethod::Elbow;
    bool flat = false;
    bool degenerate_labels = false;
    double chance_error = 0.0;
};

std::string_view to_string(KMethod method);

/// K = round(sqrt(n / 2)), at least 1.
std::size_t sqrt_k_heuristic(std::size_t n);

/// Index of the point farthest from the chord joining the first and last
/// points of the curve; ties go to the first such index.
std::size_t elbow_index(std::span<const double> x, std::span<const double> y);

/// Leave-one-out cosine kNN prediction of community labels for each K in
/// `k_range`, then elbow choice on the misclassification-rate curve.
KSelection knn_elbow_select_k(const BitMatrix& rows, std::span<const std::size_t> labels,
                              std::span<const std::size_t> k_range);

/// Default range 1..min(30, n - 1).
std::vector<std::size_t> default_k_range(std::size_t n);

std::string k_selection_to_json(const KSelection& selection, std::size_t community_count, std::size_t sqrt_k);

}  // namespace fimpkit
