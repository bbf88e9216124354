#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fimpkit/error.hpp"
#include "fimpkit/kde.hpp"
#include "fixtures.hpp"

using namespace fimpkit;

namespace {

double trapezoid(const DensityCurve& c) {
    double s = 0.0;
    for (std::size_t i = 1; i < c.grid.size(); ++i) {
        s += 0.5 * (c.density[i] + c.density[i - 1]) * (c.grid[i] - c.grid[i - 1]);
    }
    return s;
}

}  // namespace

TEST_SUITE("kde") {
    TEST_CASE("standard normal sample peaks near zero") {
        testing::Rng rng(31);
        std::vector<double> x(1000);
        for (auto& v : x) v = rng.normal();
        const auto c = kde_density(x, "actual");
        CHECK(c.grid.size() == 512);
        CHECK(trapezoid(c) == doctest::Approx(1.0).epsilon(1e-12));
        const auto peak = std::max_element(c.density.begin(), c.density.end()) - c.density.begin();
        CHECK(std::abs(c.grid[static_cast<std::size_t>(peak)]) < 0.15);
        CHECK(c.density[static_cast<std::size_t>(peak)] == doctest::Approx(0.3989).epsilon(0.08));
    }

    TEST_CASE("Silverman bandwidth") {
        const std::vector<double> x{1, 2, 3, 4, 5};
        // sd = 1.5811, IQR / 1.34 = 1.4925.
        CHECK(silverman_bandwidth(x) == doctest::Approx(0.9 * (2.0 / 1.34) * std::pow(5.0, -0.2)).epsilon(1e-12));
        const std::vector<double> spiky{0, 1, 1, 1, 1, 1, 1, 2};
        CHECK(silverman_bandwidth(spiky) > 0.0);
    }

    TEST_CASE("two points give a symmetric curve") {
        const std::vector<double> x{0.0, 10.0};
        KdeOptions o;
        o.grid_points = 101;
        const auto c = kde_density(x, "t", o);
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
            CHECK(c.density[i] == doctest::Approx(c.density[c.grid.size() - 1 - i]).epsilon(1e-9));
        }
        CHECK(c.grid[50] == doctest::Approx(5.0));
    }

    TEST_CASE("fixed bandwidth and pair on one grid") {
        const std::vector<double> a{1.9, 2.0, 2.1, 2.2};
        const std::vector<double> b{1.7, 1.8, 1.85};
        KdeOptions o;
        o.bandwidth = 0.1;
        const auto pair = kde_pair(a, b, o);
        REQUIRE(pair.size() == 2);
        CHECK(pair[0].tag == "actual");
        CHECK(pair[1].tag == "followed");
        CHECK(pair[0].grid == pair[1].grid);
        CHECK(pair[0].bandwidth == 0.1);
        CHECK(pair[0].grid.front() == doctest::Approx(1.4));
        CHECK(pair[0].grid.back() == doctest::Approx(2.5));
        CHECK(trapezoid(pair[1]) == doctest::Approx(1.0).epsilon(1e-12));
        const auto csv = density_csv(pair);
        CHECK(csv.rfind("trait,actual,followed\n", 0) == 0);
        const auto svg = density_svg(pair, "a < b", "x -- y");
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("a &lt; b") != std::string::npos);
        CHECK(svg.find("x -- y") == std::string::npos);
    }

    TEST_CASE("degenerate and invalid samples") {
        CHECK_THROWS_AS(kde_density(std::vector<double>{1.0}, "t"), Error);
        CHECK_THROWS_AS(kde_density(std::vector<double>{2.0, 2.0, 2.0}, "t"), Error);
        CHECK_THROWS_AS(kde_density(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, "t"), Error);
    }
}
