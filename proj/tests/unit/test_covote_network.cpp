#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fimpkit/covote_network.hpp"
#include "fimpkit/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace fimpkit;

namespace {

CovoteGraph uniform_graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                          std::uint32_t w = 1) {
    std::vector<std::uint32_t> m(n * n, 0);
    for (auto [a, b] : edges) {
        m[a * n + b] = w;
        m[b * n + a] = w;
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(std::to_string(i));
    }
    return CovoteGraph(names, m);
}

CovoteGraph complete(std::size_t n, std::uint32_t w = 1) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.emplace_back(i, j);
        }
    }
    return uniform_graph(n, edges, w);
}

void check_against_oracle(const CovoteGraph& g) {
    const auto st = network_stats(g);
    const auto o = oracle::network(g);
    CHECK(st.edge_count == o.edges);
    CHECK(st.edge_density == doctest::Approx(o.density).epsilon(1e-12));
    CHECK(st.average_degree == doctest::Approx(o.average_degree).epsilon(1e-12));
    CHECK(st.triangles == o.triangles);
    CHECK(std::abs(st.transitivity - o.transitivity) <= 1e-9);
    CHECK(std::abs(st.average_clustering - o.average_clustering) <= 1e-9);
    CHECK(std::abs(st.average_clustering_weighted - o.average_clustering_weighted) <= 1e-9);
    CHECK(st.diameter == o.diameter);
    CHECK(std::abs(st.average_path_hops - o.average_path_hops) <= 1e-9);
    CHECK(std::abs(st.average_path_inverse_weight - o.average_path_inverse_weight) <= 1e-9);
    CHECK(std::abs(st.average_path_weight_length - o.average_path_weight_length) <= 1e-9 * o.average_path_weight_length);
}

}  // namespace

TEST_SUITE("covote_network") {
    TEST_CASE("weights are shared Yes counts") {
        const VoteMatrix v({"A", "B"}, {"1", "2", "3", "4"},
                           {RawVote::Yes, RawVote::Yes, RawVote::No, RawVote::Yes, RawVote::Yes, RawVote::Abstain,
                            RawVote::No, RawVote::Yes});
        const auto g = build_covote_graph(v);
        CHECK(g.weight(0, 1) == 2);
        CHECK(g.weight(1, 0) == 2);
        CHECK(g.weight(0, 0) == 0);
        CHECK(g.edge_list_csv() == "actor_a,actor_b,weight\nA,B,2\n");
    }

    TEST_CASE("weights match a brute-force loop; zero rows are isolated") {
        testing::Rng rng(4);
        std::vector<RawVote> cells;
        std::vector<std::string> actors{"a", "b", "c", "d", "e"};
        std::vector<std::string> bills{"1", "2", "3", "4", "5", "6"};
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                cells.push_back(i == 2 ? RawVote::No : (rng.bernoulli(0.5) ? RawVote::Yes : RawVote::Absent));
            }
        }
        const VoteMatrix v(actors, bills, cells);
        const auto g = build_covote_graph(v);
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                std::uint32_t w = 0;
                for (std::size_t b = 0; b < 6 && i != j; ++b) {
                    w += cells[i * 6 + b] == RawVote::Yes && cells[j * 6 + b] == RawVote::Yes;
                }
                CHECK(g.weight(i, j) == w);
            }
            CHECK(g.weight(2, i) == 0);
        }
        const std::vector<std::string> keep{"e", "a"};
        const auto sub = build_covote_graph(v, keep);
        CHECK(sub.nodes() == keep);
        CHECK(sub.weight(0, 1) == g.weight(4, 0));
        CHECK_THROWS_AS(build_covote_graph(v, std::vector<std::string>{}), Error);
        CHECK_THROWS_AS(build_covote_graph(v, std::vector<std::string>{"zz"}), Error);
    }

    TEST_CASE("complete graph K4") {
        const auto st = network_stats(complete(4));
        CHECK(st.edge_density == 1.0);
        CHECK(st.diameter == 1);
        CHECK(st.transitivity == 1.0);
        CHECK(st.triangles == 4);
        CHECK(st.components == 1);
        CHECK(st.average_clustering == 1.0);
        CHECK(st.average_clustering_weighted == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(st.average_path_hops == 1.0);
        CHECK(st.average_degree == 3.0);
    }

    TEST_CASE("path graph P3") {
        const auto st = network_stats(uniform_graph(3, {{0, 1}, {1, 2}}));
        CHECK(st.transitivity == 0.0);
        CHECK(st.triangles == 0);
        CHECK(st.diameter == 2);
        CHECK(st.average_path_hops == doctest::Approx(8.0 / 6.0));
        CHECK(st.connected_triples == 1);
    }

    TEST_CASE("closed forms for complete and path graphs of any size") {
        for (std::size_t n = 2; n <= 12; ++n) {
            const auto k = network_stats(complete(n, 5));
            CHECK(k.edge_count == n * (n - 1) / 2);
            CHECK(k.triangles == n * (n - 1) * (n - 2) / 6);
            CHECK(k.average_path_inverse_weight == doctest::Approx(0.2));
            CHECK(k.average_path_weight_length == 5.0);
            CHECK(k.average_strength == 5.0 * static_cast<double>(n - 1));

            std::vector<std::pair<std::size_t, std::size_t>> edges;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                edges.emplace_back(i, i + 1);
            }
            const auto p = network_stats(uniform_graph(n, edges));
            CHECK(p.diameter == n - 1);
            // Mean distance on a path is (n + 1) / 3.
            CHECK(p.average_path_hops == doctest::Approx(static_cast<double>(n + 1) / 3.0).epsilon(1e-12));
            CHECK(p.triangles == 0);
        }
    }

    TEST_CASE("disconnected graphs average over reachable pairs") {
        const auto st = network_stats(uniform_graph(5, {{0, 1}, {2, 3}, {3, 4}}));
        CHECK(st.components == 2);
        CHECK_FALSE(st.connected);
        // Pairs: (0,1) x2 at 1, (2,3),(3,4) x2 at 1, (2,4) x2 at 2.
        CHECK(st.average_path_hops == doctest::Approx(10.0 / 8.0));
        CHECK(connected_components(uniform_graph(5, {{0, 1}, {2, 3}, {3, 4}})) ==
              std::vector<std::size_t>{0, 0, 1, 1, 1});
    }

    TEST_CASE("random weighted graphs agree with enumeration oracles") {
        testing::Rng rng(99);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 3 + rng.below(20);
            check_against_oracle(testing::random_graph(n, rng.uniform(0.1, 0.9), 1 + rng.below(40),
                                                       rng.bernoulli(0.7), rng));
        }
    }

    TEST_CASE("statistics are invariant under relabelling") {
        testing::Rng rng(5);
        const auto g = testing::random_graph(15, 0.4, 9, true, rng);
        std::vector<std::size_t> perm(15);
        std::iota(perm.begin(), perm.end(), 0);
        testing::shuffle(perm, rng);
        std::vector<std::uint32_t> w(225);
        for (std::size_t i = 0; i < 15; ++i) {
            for (std::size_t j = 0; j < 15; ++j) {
                w[perm[i] * 15 + perm[j]] = g.weight(i, j);
            }
        }
        const auto a = network_stats(g);
        const auto b = network_stats(CovoteGraph(g.nodes(), w));
        CHECK(a.triangles == b.triangles);
        CHECK(a.transitivity == doctest::Approx(b.transitivity).epsilon(1e-12));
        CHECK(a.average_clustering_weighted == doctest::Approx(b.average_clustering_weighted).epsilon(1e-12));
        CHECK(a.average_path_inverse_weight == doctest::Approx(b.average_path_inverse_weight).epsilon(1e-12));
        CHECK(a.diameter == b.diameter);
    }

    TEST_CASE("graph validation and empty graphs") {
        CHECK_THROWS_AS(CovoteGraph({"a", "b"}, {0, 1, 2, 0}), Error);
        CHECK_THROWS_AS(CovoteGraph({"a", "b"}, {1, 0, 0, 0}), Error);
        CHECK_THROWS_AS(network_stats(CovoteGraph{}), Error);
        const auto single = network_stats(CovoteGraph({"a"}, {0}));
        CHECK(single.components == 1);
        CHECK(single.edge_density == 0.0);
    }

    TEST_CASE("JSON carries the headline names and both variants") {
        const auto text = network_stats_to_json(network_stats(complete(5, 3)));
        CHECK(text.find("\"Edge density\": 1") != std::string::npos);
        CHECK(text.find("\"Total triangles\": 10") != std::string::npos);
        CHECK(text.find("variants") != std::string::npos);
    }
}
