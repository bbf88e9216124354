#include "fimpkit/community.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"
#include "fimpkit/fimp.hpp"
#include "fimpkit/kernels.hpp"

namespace fimpkit {
namespace {

constexpr double kZeroEntry = 1e-12;
constexpr double kMinDeltaQ = 1e-12;
constexpr double kEigenTolerance = 1e-8;  // relative to ||B^g||_1

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double one_norm(std::span<const double> m, std::size_t n) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            col += std::abs(m[i * n + j]);
        }
        best = std::max(best, col);
    }
    return best;
}

void multiply(std::span<const double> m, std::size_t n, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = kernels::dot(m.subspan(i * n, n), x);
    }
}

double inf_norm(std::span<const double> v) {
    double best = 0.0;
    for (double x : v) {
        best = std::max(best, std::abs(x));
    }
    return best;
}

}  // namespace

ModularityContext::ModularityContext(const CovoteGraph& graph) : n_(graph.size()), a_(graph.weights().size()) {
    std::transform(graph.weights().begin(), graph.weights().end(), a_.begin(),
                   [](std::uint32_t w) { return static_cast<double>(w); });
    degree_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        degree_[i] = std::accumulate(a_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                                     a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_), 0.0);
    }
    m_ = std::accumulate(degree_.begin(), degree_.end(), 0.0) / 2.0;
}

ModularityContext::ModularityContext(std::size_t n, std::vector<double> adjacency) : n_(n), a_(std::move(adjacency)) {
    if (a_.size() != n * n) {
        fail(ErrorCode::DimensionMismatch, "adjacency is not n x n");
    }
    degree_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            degree_[i] += a_[i * n_ + j];
        }
    }
    m_ = std::accumulate(degree_.begin(), degree_.end(), 0.0) / 2.0;
}

double ModularityContext::modularity_entry(std::size_t i, std::size_t j) const noexcept {
    if (m_ == 0.0) {
        return 0.0;
    }
    return a_[i * n_ + j] - degree_[i] * degree_[j] / (2.0 * m_);
}

std::vector<double> ModularityContext::group_matrix(std::span<const std::size_t> group) const {
    const std::size_t g = group.size();
    std::vector<double> b(g * g);
    for (std::size_t r = 0; r < g; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < g; ++c) {
            const double v = modularity_entry(group[r], group[c]);
            b[r * g + c] = v;
            row_sum += v;
        }
        b[r * g + r] -= row_sum;
    }
    return b;
}

double ModularityContext::modularity(std::span<const std::size_t> labels) const {
    if (m_ == 0.0) {
        return 0.0;
    }
    double q = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (labels[i] == labels[j]) {
                q += modularity_entry(i, j);
            }
        }
    }
    return q / (2.0 * m_);
}

Eigenpair leading_eigenpair(std::span<const double> matrix, std::size_t n, const PowerIterationOptions& options) {
    if (matrix.size() != n * n) {
        fail(ErrorCode::DimensionMismatch, "matrix is not n x n");
    }
    Eigenpair out;
    out.vector.resize(n);
    if (n == 0) {
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.vector[i] = static_cast<double>(splitmix64(i) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }
    auto normalize = [](std::vector<double>& v) {
        double norm = std::sqrt(kernels::dot(v, v));
        for (double& x : v) {
            x /= norm;
        }
    };
    normalize(out.vector);

    const double shift = one_norm(matrix, n);
    std::vector<double> bx(n);
    if (shift == 0.0) {
        return out;
    }
    const double threshold = options.tolerance * shift;
    auto& x = out.vector;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        multiply(matrix, n, x, bx);
        const double lambda = kernels::dot(x, bx);
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            residual = std::max(residual, std::abs(bx[i] - lambda * x[i]));
        }
        out.value = lambda;
        out.iterations = it;
        out.residual = residual;
        if (residual <= threshold * inf_norm(x)) {
            return out;
        }
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = bx[i] + shift * x[i];
        }
        normalize(x);
    }
    fail(ErrorCode::ConvergenceFailure, "power iteration stopped after " + std::to_string(options.max_iterations) +
                                            " iterations with residual " + csv::format_number(out.residual));
}

Bisection spectral_bisection(const ModularityContext& ctx, std::span<const std::size_t> group,
                             const PowerIterationOptions& options) {
    Bisection out;
    const std::size_t g = group.size();
    out.signs.assign(g, 1);
    if (g < 2 || ctx.total_weight() == 0.0) {
        return out;
    }
    const auto b = ctx.group_matrix(group);
    const double scale = one_norm(b, g);
    if (scale == 0.0) {
        return out;
    }
    out.eigen = leading_eigenpair(b, g, options);
    out.eigenvalue = out.eigen.value;
    if (out.eigenvalue <= kEigenTolerance * scale) {
        return out;
    }
    std::size_t positive = 0;
    for (std::size_t i = 0; i < g; ++i) {
        const double v = out.eigen.vector[i];
        out.signs[i] = (std::abs(v) < kZeroEntry || v > 0.0) ? 1 : -1;
        positive += out.signs[i] > 0 ? 1 : 0;
    }
    if (positive == 0 || positive == g) {
        return out;
    }
    std::vector<double> s(out.signs.begin(), out.signs.end());
    std::vector<double> bs(g);
    multiply(b, g, s, bs);
    out.delta_q = kernels::dot(s, bs) / (4.0 * ctx.total_weight());
    out.divisible = out.delta_q > kMinDeltaQ;
    return out;
}

CommunityAssignment leading_eigen_communities(const ModularityContext& ctx, std::vector<std::string> nodes,
                                              const CommunityOptions& options) {
    const std::size_t n = ctx.size();
    if (n == 0) {
        fail(ErrorCode::EmptyGraph, "community detection needs at least one node");
    }
    CommunityAssignment out;
    out.nodes = std::move(nodes);

    // Components first: they never share a community.
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> comp(n, unset);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] != unset) {
            continue;
        }
        groups.emplace_back();
        std::vector<std::size_t> stack{s};
        comp[s] = groups.size() - 1;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            groups.back().push_back(u);
            for (std::size_t v = 0; v < n; ++v) {
                if (ctx.adjacency(u, v) > 0.0 && comp[v] == unset) {
                    comp[v] = groups.size() - 1;
                    stack.push_back(v);
                }
            }
        }
        std::sort(groups.back().begin(), groups.back().end());
    }

    std::deque<std::pair<std::vector<std::size_t>, std::size_t>> pending;
    for (auto& g : groups) {
        pending.emplace_back(std::move(g), 0);
    }
    std::vector<std::vector<std::size_t>> finished;
    while (!pending.empty()) {
        auto [group, depth] = std::move(pending.front());
        pending.pop_front();
        if (depth >= options.max_depth || group.size() < 2) {
            finished.push_back(std::move(group));
            continue;
        }
        const auto split = spectral_bisection(ctx, group, options.power);
        if (!split.divisible) {
            finished.push_back(std::move(group));
            continue;
        }
        std::vector<std::size_t> plus;
        std::vector<std::size_t> minus;
        for (std::size_t i = 0; i < group.size(); ++i) {
            (split.signs[i] > 0 ? plus : minus).push_back(group[i]);
        }
        ++out.splits;
        pending.emplace_back(std::move(plus), depth + 1);
        pending.emplace_back(std::move(minus), depth + 1);
    }

    std::vector<std::size_t> raw(n);
    for (std::size_t c = 0; c < finished.size(); ++c) {
        for (auto i : finished[c]) {
            raw[i] = c;
        }
    }
    std::map<std::size_t, std::size_t> canonical;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [it, inserted] = canonical.emplace(raw[i], canonical.size());
        out.labels[i] = it->second;
    }
    out.community_count = canonical.size();
    out.modularity = ctx.modularity(out.labels);
    return out;
}

CommunityAssignment leading_eigen_communities(const CovoteGraph& graph, const CommunityOptions& options) {
    return leading_eigen_communities(ModularityContext(graph), graph.nodes(), options);
}

std::string communities_csv(const CommunityAssignment& a) {
    std::ostringstream out;
    csv::write_row(out, {"actor_id", "community"});
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        csv::write_row(out, {a.nodes[i], std::to_string(a.labels[i])});
    }
    return out.str();
}

std::string_view to_string(KMethod method) {
    switch (method) {
        case KMethod::Elbow: return "elbow";
        case KMethod::SqrtHeuristic: return "sqrt-heuristic";
        case KMethod::Fixed: return "fixed";
    }
    return "?";
}

std::size_t sqrt_k_heuristic(std::size_t n) {
    if (n < 2) {
        fail(ErrorCode::KOutOfRange, "sqrt heuristic needs n >= 2");
    }
    const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n) / 2.0)));
    return std::max<std::size_t>(1, k);
}

std::size_t elbow_index(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) {
        fail(ErrorCode::DimensionMismatch, "elbow curve needs matching non-empty x and y");
    }
    const std::size_t last = x.size() - 1;
    const double dx = x[last] - x[0];
    const double dy = y[last] - y[0];
    const double len = std::hypot(dx, dy);
    if (len == 0.0) {
        return 0;
    }
    std::size_t best = 0;
    double best_dist = -1.0;
    for (std::size_t i = 0; i <= last; ++i) {
        const double d = std::abs(dx * (y[0] - y[i]) - (x[0] - x[i]) * dy) / len;
        if (d > best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

std::vector<std::size_t> default_k_range(std::size_t n) {
    std::vector<std::size_t> out;
    const std::size_t upper = std::min<std::size_t>(30, n > 0 ? n - 1 : 0);
    for (std::size_t k = 1; k <= upper; ++k) {
        out.push_back(k);
    }
    return out;
}

KSelection knn_elbow_select_k(const BitMatrix& rows, std::span<const std::size_t> labels,
                              std::span<const std::size_t> k_range) {
    const std::size_t n = rows.rows();
    if (labels.size() != n) {
        fail(ErrorCode::DimensionMismatch, "one community label per row is required");
    }
    if (k_range.empty()) {
        fail(ErrorCode::KOutOfRange, "k range is empty");
    }
    KSelection out;
    out.k_range.assign(k_range.begin(), k_range.end());
    std::sort(out.k_range.begin(), out.k_range.end());
    out.k_range.erase(std::unique(out.k_range.begin(), out.k_range.end()), out.k_range.end());
    if (out.k_range.front() < 1 || out.k_range.back() + 1 > n) {
        fail(ErrorCode::KOutOfRange, "k range must lie within [1, n - 1]");
    }
    const std::size_t k_max = out.k_range.back();

    std::map<std::size_t, std::size_t> freq;
    for (auto l : labels) {
        ++freq[l];
    }
    std::size_t majority = 0;
    for (const auto& [label, count] : freq) {
        majority = std::max(majority, count);
    }
    out.chance_error = 1.0 - static_cast<double>(majority) / static_cast<double>(n);
    out.degenerate_labels = freq.size() < 2;

    const CosineNeighbors index(rows);
    std::vector<std::vector<std::size_t>> ranked(n);
    for (std::size_t i = 0; i < n; ++i) {
        ranked[i] = index.nearest(i, k_max);
    }

    for (std::size_t k : out.k_range) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < n; ++i) {
            // Majority label among the first k neighbors; ties go to the label
            // seen earliest in rank order.
            std::map<std::size_t, std::pair<std::size_t, std::size_t>> votes;  // label -> (count, first rank)
            for (std::size_t r = 0; r < k; ++r) {
                auto [it, inserted] = votes.emplace(labels[ranked[i][r]], std::pair<std::size_t, std::size_t>{0, r});
                ++it->second.first;
            }
            std::size_t predicted = 0;
            std::size_t best_count = 0;
            std::size_t best_rank = std::numeric_limits<std::size_t>::max();
            for (const auto& [label, cr] : votes) {
                if (cr.first > best_count || (cr.first == best_count && cr.second < best_rank)) {
                    predicted = label;
                    best_count = cr.first;
                    best_rank = cr.second;
                }
            }
            wrong += predicted != labels[i] ? 1 : 0;
        }
        out.error_curve.push_back(static_cast<double>(wrong) / static_cast<double>(n));
    }

    if (out.k_range.size() == 1) {
        out.method = KMethod::Fixed;
        out.chosen_k = out.k_range.front();
        return out;
    }
    out.method = KMethod::Elbow;
    const auto [lo, hi] = std::minmax_element(out.error_curve.begin(), out.error_curve.end());
    const double chance = out.chance_error;
    const double noise = 2.0 * std::sqrt(chance * (1.0 - chance) / static_cast<double>(n));
    const bool no_better_than_chance = *lo >= chance - noise;
    if (out.degenerate_labels || *hi - *lo < 1e-12 || no_better_than_chance) {
        out.flat = true;
        out.chosen_k = out.k_range.front();
        return out;
    }
    std::vector<double> xs(out.k_range.begin(), out.k_range.end());
    out.chosen_k = out.k_range[elbow_index(xs, out.error_curve)];
    return out;
}

std::string k_selection_to_json(const KSelection& s, std::size_t community_count, std::size_t sqrt_k) {
    nlohmann::ordered_json j;
    j["k_range"] = s.k_range;
    std::vector<double> curve;
    for (double e : s.error_curve) {
        curve.push_back(csv::round_significant(e));
    }
    j["error_curve"] = curve;
    j["chosen_k"] = s.chosen_k;
    j["method"] = std::string(to_string(s.method));
    std::vector<std::string> flags;
    if (s.flat) {
        flags.emplace_back("flat");
    }
    if (s.degenerate_labels) {
        flags.emplace_back("degenerate_labels");
    }
    j["flags"] = flags;
    j["chance_error"] = csv::round_significant(s.chance_error);
    j["community_count"] = community_count;
    j["sqrt_k"] = sqrt_k;
    return j.dump(2) + "\n";
}

}  // namespace fimpkit
