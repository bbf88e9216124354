#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fimpkit/error.hpp"
#include "fimpkit/fimp.hpp"
#include "fimpkit/null_model.hpp"
#include "fixtures.hpp"

using namespace fimpkit;

namespace {

std::vector<double> column_sums(const BitMatrix& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            s[j] += m.get(i, j);
        }
    }
    return s;
}

}  // namespace

TEST_SUITE("null_model") {
    TEST_CASE("scheme names round-trip") {
        CHECK(parse_null_scheme(to_string(NullScheme::Bernoulli)) == NullScheme::Bernoulli);
        CHECK(parse_null_scheme(to_string(NullScheme::ColumnPermutation)) == NullScheme::ColumnPermutation);
        CHECK_FALSE(parse_null_scheme("bogus").has_value());
    }

    TEST_CASE("column permutation keeps bill popularity; Bernoulli keeps rates on average") {
        testing::Rng rng(3);
        const auto m = testing::random_bit_matrix(40, 300, 0.3, rng);
        const auto p = randomize_votes(m, NullScheme::ColumnPermutation, 9, 0);
        CHECK(column_sums(p) == column_sums(m));
        CHECK(p.rows() == m.rows());

        const auto b = randomize_votes(m, NullScheme::Bernoulli, 9, 0);
        std::uint64_t total_m = 0;
        std::uint64_t total_b = 0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            total_m += m.row_count(i);
            total_b += b.row_count(i);
            // Binomial(300, ~0.3) has sd near 8.
            CHECK(std::abs(static_cast<double>(b.row_count(i)) - static_cast<double>(m.row_count(i))) < 45.0);
        }
        CHECK(std::abs(static_cast<double>(total_b) - static_cast<double>(total_m)) < 0.05 * static_cast<double>(total_m));
        // Padding bits past the last column stay clear.
        for (std::size_t i = 0; i < b.rows(); ++i) {
            const auto words = b.row(i);
            CHECK((words.back() >> (300 % 64)) == 0);
        }
    }

    TEST_CASE("replications are deterministic and independent of threads") {
        const auto rada = testing::make_mini_rada(21);
        NullModelOptions o;
        o.n_sims = 40;
        o.seed = 77;
        o.threads = 1;
        const auto a = simulate_null(rada.votes(), rada.trait_table(), 2, o);
        o.threads = 4;
        const auto b = simulate_null(rada.votes(), rada.trait_table(), 2, o);
        CHECK(a.t_null == b.t_null);
        CHECK(a.p_empirical == b.p_empirical);
        o.seed = 78;
        const auto c = simulate_null(rada.votes(), rada.trait_table(), 2, o);
        CHECK(c.t_null != a.t_null);
        CHECK(c.t_observed == a.t_observed);
        CHECK(a.quantiles.size() == 7);
        CHECK(a.quantiles.front().first == 0.005);
        CHECK(a.t_null.size() == 40);
        CHECK(a.p_empirical >= 1.0 / 41.0);
        CHECK(a.p_empirical <= 1.0);
    }

    TEST_CASE("observed statistic matches the fimp result") {
        const auto rada = testing::make_mini_rada(22);
        NullModelOptions o;
        o.n_sims = 5;
        const auto r = simulate_null(rada.votes(), rada.trait_table(), 3, o);
        const auto f = fimp(rada.votes(), rada.trait_table(), 3);
        const auto t = stats::two_sample_t_test(f.trait_followed, f.trait_actual);
        CHECK(r.t_observed == doctest::Approx(t.t).epsilon(1e-12));
    }

    TEST_CASE("equal traits give p = 1") {
        testing::Rng rng(4);
        const auto m = testing::random_bit_matrix(20, 60, 0.4, rng);
        const std::vector<double> t(20, 2.0);
        NullModelOptions o;
        o.n_sims = 30;
        const auto r = simulate_null(m, t, 3, o);
        CHECK(r.t_observed == 0.0);
        CHECK(r.p_empirical == 1.0);
    }

    TEST_CASE("planted followers lie beyond the 99th null percentile") {
        const auto rada = testing::make_mini_rada(2024);
        for (auto scheme : {NullScheme::Bernoulli, NullScheme::ColumnPermutation}) {
            NullModelOptions o;
            o.n_sims = 300;
            o.scheme = scheme;
            const auto r = simulate_null(rada.votes(), rada.trait_table(), 1, o);
            std::vector<double> a;
            for (double t : r.t_null) {
                a.push_back(std::abs(t));
            }
            std::sort(a.begin(), a.end());
            CHECK(std::abs(r.t_observed) > stats::quantile_sorted(a, 0.99));
            CHECK(r.p_empirical < 0.01);
        }
    }

    TEST_CASE("invalid options") {
        testing::Rng rng(5);
        const auto m = testing::random_bit_matrix(6, 20, 0.4, rng);
        const std::vector<double> t{1, 2, 3, 4, 5, 6};
        NullModelOptions o;
        o.n_sims = 0;
        CHECK_THROWS_AS(simulate_null(m, t, 2, o), Error);
        o.n_sims = 3;
        CHECK_THROWS_AS(simulate_null(m, t, 6, o), Error);
        CHECK_THROWS_AS(simulate_null(m, std::vector<double>{1, 2}, 1, o), Error);
    }
}
