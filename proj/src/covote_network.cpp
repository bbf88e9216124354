#include "fimpkit/covote_network.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fimpkit/bit_matrix.hpp"
#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"
#include "fimpkit/kernels.hpp"
#include "fimpkit/parallel.hpp"

namespace fimpkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PathSums {
    double hops = 0.0;
    double inverse_weight = 0.0;
    double weight_length = 0.0;
    std::size_t reachable = 0;
    std::size_t eccentricity = 0;
};

// Single-source shortest paths on a dense weighted graph; O(n^2) selection.
void dense_dijkstra(const CovoteGraph& g, std::size_t source, bool inverse, std::vector<double>& dist,
                    std::vector<char>& done) {
    const std::size_t n = g.size();
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    dist[source] = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        double best = kInf;
        for (std::size_t v = 0; v < n; ++v) {
            if (!done[v] && dist[v] < best) {
                best = dist[v];
                u = v;
            }
        }
        if (u == n) {
            break;
        }
        done[u] = 1;
        const auto row = g.row(u);
        for (std::size_t v = 0; v < n; ++v) {
            const std::uint32_t w = row[v];
            if (w == 0 || done[v]) {
                continue;
            }
            const double len = inverse ? 1.0 / static_cast<double>(w) : static_cast<double>(w);
            if (best + len < dist[v]) {
                dist[v] = best + len;
            }
        }
    }
}

PathSums paths_from(const CovoteGraph& g, const std::vector<std::vector<std::size_t>>& adjacency,
                    std::size_t source) {
    const std::size_t n = g.size();
    PathSums sums;
    std::vector<std::size_t> hop(n, std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> queue;
    queue.reserve(n);
    hop[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t u = queue[head];
        for (std::size_t v : adjacency[u]) {
            if (hop[v] == std::numeric_limits<std::size_t>::max()) {
                hop[v] = hop[u] + 1;
                queue.push_back(v);
            }
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (v != source && hop[v] != std::numeric_limits<std::size_t>::max()) {
            sums.hops += static_cast<double>(hop[v]);
            sums.eccentricity = std::max(sums.eccentricity, hop[v]);
            ++sums.reachable;
        }
    }

    std::vector<double> dist(n);
    std::vector<char> done(n);
    dense_dijkstra(g, source, true, dist, done);
    for (std::size_t v = 0; v < n; ++v) {
        if (v != source && dist[v] < kInf) {
            sums.inverse_weight += dist[v];
        }
    }
    dense_dijkstra(g, source, false, dist, done);
    for (std::size_t v = 0; v < n; ++v) {
        if (v != source && dist[v] < kInf) {
            sums.weight_length += dist[v];
        }
    }
    return sums;
}

}  // namespace

CovoteGraph::CovoteGraph(std::vector<std::string> nodes, std::vector<std::uint32_t> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    const std::size_t n = nodes_.size();
    if (weights_.size() != n * n) {
        fail(ErrorCode::DimensionMismatch, "weight matrix does not match node count");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (weights_[i * n + i] != 0) {
            fail(ErrorCode::InvalidValue, "co-vote graph diagonal must be zero");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (weights_[i * n + j] != weights_[j * n + i]) {
                fail(ErrorCode::InvalidValue, "co-vote weights must be symmetric");
            }
        }
    }
}

std::string CovoteGraph::edge_list_csv() const {
    std::ostringstream out;
    csv::write_row(out, {"actor_a", "actor_b", "weight"});
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (const auto w = weight(i, j); w > 0) {
                csv::write_row(out, {nodes_[i], nodes_[j], std::to_string(w)});
            }
        }
    }
    return out.str();
}

CovoteGraph build_covote_graph(const VoteMatrix& votes, std::span<const std::string> keep) {
    if (keep.empty()) {
        fail(ErrorCode::EmptyActorSet, "no actors to build a co-vote graph from");
    }
    std::vector<std::size_t> rows;
    rows.reserve(keep.size());
    for (const auto& id : keep) {
        auto idx = votes.actor_index(id);
        if (!idx) {
            fail(ErrorCode::InvalidValue, "actor '" + id + "' is not in the roll-call matrix");
        }
        rows.push_back(*idx);
    }
    const BitMatrix encoded = votes.encoded().select_rows(rows);
    auto weights = gram_counts(encoded);
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        weights[i * n + i] = 0;
    }
    return CovoteGraph(std::vector<std::string>(keep.begin(), keep.end()), std::move(weights));
}

CovoteGraph build_covote_graph(const VoteMatrix& votes) {
    return build_covote_graph(votes, votes.actors());
}

std::vector<std::size_t> connected_components(const CovoteGraph& g) {
    const std::size_t n = g.size();
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> comp(n, unset);
    std::size_t next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] != unset) {
            continue;
        }
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            const auto row = g.row(u);
            for (std::size_t v = 0; v < n; ++v) {
                if (row[v] > 0 && comp[v] == unset) {
                    comp[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return comp;
}

NetworkStats network_stats(const CovoteGraph& g, std::size_t threads) {
    const std::size_t n = g.size();
    if (n == 0) {
        fail(ErrorCode::EmptyGraph, "network statistics need at least one node");
    }
    NetworkStats st;
    st.node_count = n;

    BitMatrix adj(n, n);
    std::vector<std::vector<std::size_t>> adjacency(n);
    std::vector<std::uint64_t> degree(n, 0);
    double total_strength = 0.0;
    std::uint32_t max_weight = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = g.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] > 0) {
                adj.set(i, j, true);
                adjacency[i].push_back(j);
                total_strength += row[j];
                max_weight = std::max(max_weight, row[j]);
            }
        }
        degree[i] = adjacency[i].size();
    }
    const std::uint64_t degree_sum = std::accumulate(degree.begin(), degree.end(), std::uint64_t{0});
    st.edge_count = degree_sum / 2;
    const double dn = static_cast<double>(n);
    st.edge_density = n > 1 ? 2.0 * static_cast<double>(st.edge_count) / (dn * (dn - 1.0)) : 0.0;
    st.average_degree = static_cast<double>(degree_sum) / dn;
    st.average_strength = total_strength / dn;

    // Triangles: every adjacent pair contributes |N(i) & N(j)|; each triangle
    // is seen once per edge.
    std::vector<std::uint64_t> node_triangles(n, 0);
    std::uint64_t pair_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : adjacency[i]) {
            if (j <= i) {
                continue;
            }
            const std::uint64_t common = kernels::and_popcount(adj.row(i), adj.row(j));
            pair_sum += common;
            node_triangles[i] += common;
            node_triangles[j] += common;
        }
    }
    st.triangles = pair_sum / 3;
    for (std::size_t i = 0; i < n; ++i) {
        node_triangles[i] /= 2;
        st.connected_triples += degree[i] * (degree[i] - (degree[i] > 0 ? 1 : 0)) / 2;
    }
    st.transitivity = st.connected_triples > 0
                          ? 3.0 * static_cast<double>(st.triangles) / static_cast<double>(st.connected_triples)
                          : 0.0;

    // Local clustering. The weighted variant uses cube roots of max-normalised
    // weights so that sum_{j,k} (w_ij w_ik w_jk)^(1/3) = sum_j c_ij <c_j, c_i>.
    std::vector<double> cube_root(n * n, 0.0);
    if (max_weight > 0) {
        for (std::size_t k = 0; k < n * n; ++k) {
            const auto w = g.weights()[k];
            if (w > 0) {
                cube_root[k] = std::cbrt(static_cast<double>(w) / static_cast<double>(max_weight));
            }
        }
    }
    double cc_sum = 0.0;
    double wcc_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (degree[i] < 2) {
            continue;
        }
        const double pairs = static_cast<double>(degree[i]) * static_cast<double>(degree[i] - 1);
        cc_sum += 2.0 * static_cast<double>(node_triangles[i]) / pairs;
        const std::span<const double> ci(cube_root.data() + i * n, n);
        double weighted = 0.0;
        for (std::size_t j : adjacency[i]) {
            const std::span<const double> cj(cube_root.data() + j * n, n);
            weighted += ci[j] * kernels::dot(ci, cj);
        }
        wcc_sum += weighted / pairs;
    }
    st.average_clustering = cc_sum / dn;
    st.average_clustering_weighted = wcc_sum / dn;

    const auto comp = connected_components(g);
    st.components = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    st.connected = st.components == 1;

    std::vector<PathSums> per_source(n);
    parallel_for(n, [&](std::size_t s) { per_source[s] = paths_from(g, adjacency, s); }, threads);
    PathSums total;
    for (const auto& p : per_source) {
        total.hops += p.hops;
        total.inverse_weight += p.inverse_weight;
        total.weight_length += p.weight_length;
        total.reachable += p.reachable;
        total.eccentricity = std::max(total.eccentricity, p.eccentricity);
    }
    st.diameter = total.eccentricity;
    if (total.reachable > 0) {
        const double pairs = static_cast<double>(total.reachable);
        st.average_path_hops = total.hops / pairs;
        st.average_path_inverse_weight = total.inverse_weight / pairs;
        st.average_path_weight_length = total.weight_length / pairs;
    }
    return st;
}

std::string network_stats_to_json(const NetworkStats& s) {
    auto num = [](double v) { return csv::round_significant(v); };
    nlohmann::ordered_json j;
    j["Nodes"] = s.node_count;
    j["Edges"] = s.edge_count;
    j["Average shortest path length"] = num(s.average_path_inverse_weight);
    j["diameter"] = s.diameter;
    j["Transitivity"] = num(s.transitivity);
    j["Average CC"] = num(s.average_clustering_weighted);
    j["Edge density"] = num(s.edge_density);
    j["Average degree"] = num(s.average_degree);
    j["Total triangles"] = s.triangles;
    j["Number of connected components"] = s.components;
    j["variants"] = {
        {"average_shortest_path_hops", num(s.average_path_hops)},
        {"average_shortest_path_inverse_weight", num(s.average_path_inverse_weight)},
        {"average_shortest_path_weight_as_length", num(s.average_path_weight_length)},
        {"average_clustering_unweighted", num(s.average_clustering)},
        {"average_clustering_weighted_geometric", num(s.average_clustering_weighted)},
        {"average_degree_unweighted", num(s.average_degree)},
        {"average_degree_weighted", num(s.average_strength)},
        {"connected_triples", s.connected_triples},
    };
    j["metadata"] = {
        {"path_lengths", "shortest paths over ordered reachable pairs; main row uses hop length 1/weight"},
        {"average_cc", "main row is the geometric-mean weighted local clustering, weights scaled by the maximum"},
        {"connected", s.connected},
    };
    return j.dump(2) + "\n";
}

}  // namespace fimpkit
