#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fimpkit/core_data.hpp"

namespace fimpkit {

/// Weighted co-voting graph: weight(i, j) is the number of bills on which
/// both actors voted Yes. Symmetric with a zero diagonal.
class CovoteGraph {
public:
    CovoteGraph() = default;
    CovoteGraph(std::vector<std::string> nodes, std::vector<std::uint32_t> weights);

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::uint32_t weight(std::size_t i, std::size_t j) const noexcept {
        return weights_[i * nodes_.size() + j];
    }
    [[nodiscard]] std::span<const std::uint32_t> weights() const noexcept { return weights_; }
    [[nodiscard]] std::span<const std::uint32_t> row(std::size_t i) const noexcept {
        return {weights_.data() + i * nodes_.size(), nodes_.size()};
    }

    /// Edge list `actor_a,actor_b,weight` for i < j with positive weight.
    [[nodiscard]] std::string edge_list_csv() const;

private:
    std::vector<std::string> nodes_;
    std::vector<std::uint32_t> weights_;
};

/// Builds the graph over `keep` (actor ids, in the given order). An empty
/// `keep` is an error; ids missing from the matrix are rejected.
CovoteGraph build_covote_graph(const VoteMatrix& votes, std::span<const std::string> keep);
/// Builds the graph over every actor in the matrix.
CovoteGraph build_covote_graph(const VoteMatrix& votes);

struct NetworkStats {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    double edge_density = 0.0;
    double average_degree = 0.0;    // 2E / n on the binarized graph
    double average_strength = 0.0;  // mean weighted degree
    std::size_t diameter = 0;       // hops, over reachable pairs
    double average_path_hops = 0.0;
    double average_path_inverse_weight = 0.0;  // hop length 1 / weight
    double average_path_weight_length = 0.0;   // hop length = weight
    double transitivity = 0.0;
    double average_clustering = 0.0;           // unweighted local CC
    double average_clustering_weighted = 0.0;  // geometric-mean (Onnela) local CC
    std::uint64_t triangles = 0;
    std::uint64_t connected_triples = 0;
    std::size_t components = 0;
    bool connected = false;
};

/// Computes the network-statistics panel. Path averages are taken over
/// ordered reachable pairs, so they stay finite on disconnected graphs.
NetworkStats network_stats(const CovoteGraph& graph, std::size_t threads = 0);

/// Component index per node (numbered by first appearance), edges = weight > 0.
std::vector<std::size_t> connected_components(const CovoteGraph& graph);

std::string network_stats_to_json(const NetworkStats& stats);

}  // namespace fimpkit
