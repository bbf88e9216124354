#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "fimpkit/distributions.hpp"

using namespace fimpkit::dist;

TEST_SUITE("distributions") {
    TEST_CASE("normal cdf and tail") {
        CHECK(normal_cdf(0.0) == 0.5);
        CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
        CHECK(normal_sf(8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-10));
        CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316300946).epsilon(1e-12));
    }

    TEST_CASE("normal quantile inverts the cdf") {
        for (double p : {1e-12, 1e-6, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999999}) {
            CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
        }
        CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-15));
    }

    TEST_CASE("incomplete beta") {
        CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
        CHECK(incomplete_beta(2.5, 1.5, 0.0) == 0.0);
        CHECK(incomplete_beta(2.5, 1.5, 1.0) == 1.0);
        const double x = 0.37;
        CHECK(incomplete_beta(3.2, 1.7, x) + incomplete_beta(1.7, 3.2, 1.0 - x) == doctest::Approx(1.0).epsilon(1e-13));
    }

    TEST_CASE("student t") {
        CHECK(student_t_cdf(0.0, 7.0) == 0.5);
        // df = 1 is Cauchy.
        CHECK(student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-13));
        // df = 2 has cdf 1/2 + t / (2 sqrt(t^2 + 2)).
        CHECK(student_t_cdf(1.5, 2.0) == doctest::Approx(0.5 + 1.5 / (2.0 * std::sqrt(4.25))).epsilon(1e-13));
        CHECK(student_t_two_sided_p(3.3135, 868.0) == doctest::Approx(0.0009594917).epsilon(1e-6));
        CHECK(student_t_two_sided_p(-1.0954451150103321, 6.0) == doctest::Approx(0.3153335962012298).epsilon(1e-12));
        CHECK(student_t_two_sided_p(-1.1920791213585396, 4.900452488687781) ==
              doctest::Approx(0.28773997821466435).epsilon(1e-10));
    }

    TEST_CASE("chi-square and Kolmogorov tails") {
        CHECK(chi2_df2_sf(0.0) == 1.0);
        CHECK(chi2_df2_sf(2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
        CHECK(kolmogorov_sf(1.3580986393225505) == doctest::Approx(0.05).epsilon(1e-6));
        CHECK(kolmogorov_sf(0.0) == 1.0);
        CHECK(kolmogorov_sf(5.0) < 1e-20);
    }
}
