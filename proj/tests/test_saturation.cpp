#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bhi/rng.hpp"
#include "bhi/saturation.hpp"

using namespace bhi;

namespace {
DatedScore at(int year, unsigned month, unsigned day, double score01) {
    return {Date::from_civil(year, month, day), score01};
}
}  // namespace

TEST_CASE("static resistance closed forms") {
    CHECK(static_resistance(Series{1.0, 1.0, 1.0}, Series{0.4, 0.9, 0.2}) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(static_resistance(Series{0.0, 0.0}, Series{0.5, 0.5}) == 1.0);
    CHECK(static_resistance(Series{0.9, 0.5}, Series{1.0, 0.5}) ==
          doctest::Approx(1.0 - 1.15 / 1.5).epsilon(1e-12));
    CHECK_THROWS_AS(static_resistance(Series{0.5}, Series{0.0}), Error);
    CHECK_THROWS_AS(static_resistance(Series{0.5, 0.5}, Series{0.5}), Error);
}

TEST_CASE("static resistance ignores the scale of the capability weights") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        Series scores;
        Series theta;
        const std::size_t n = 2 + rng.below(10);
        for (std::size_t i = 0; i < n; ++i) {
            scores.push_back(rng.uniform01());
            theta.push_back(0.05 + rng.uniform01());
        }
        const double reference = static_resistance(scores, theta);
        for (const double c : {0.1, 3.0, 1000.0}) {
            Series scaled;
            for (double t : theta.values()) scaled.push_back(c * t);
            CHECK(std::fabs(static_resistance(scores, scaled) - reference) < 1e-12);
        }
    }
}

TEST_CASE("duplicating the whole participant set leaves static resistance unchanged") {
    const Series scores{0.9, 0.5, 0.3};
    const Series theta{1.0, 0.5, 0.25};
    std::vector<double> scores2(scores.begin(), scores.end());
    std::vector<double> theta2(theta.begin(), theta.end());
    scores2.insert(scores2.end(), scores.begin(), scores.end());
    theta2.insert(theta2.end(), theta.begin(), theta.end());
    CHECK(static_resistance(Series(scores2), Series(theta2)) ==
          doctest::Approx(static_resistance(scores, theta)).epsilon(1e-15));
}

TEST_CASE("dynamic projection closed forms") {
    // Slope 0.002/day, mean 0.4: 30-day projection eats 0.46 of the range.
    const std::vector<DatedScore> rising{at(2025, 1, 1, 0.36), at(2025, 1, 21, 0.40), at(2025, 2, 10, 0.44)};
    const auto projection = dynamic_projection(rising, 0.77);
    CHECK(projection.s_dyn == doctest::Approx(0.54).epsilon(1e-12));
    CHECK(projection.slope_per_day.has_value());
    CHECK(*projection.slope_per_day == doctest::Approx(0.002).epsilon(1e-12));
    CHECK_FALSE(projection.fallback);

    // Negative slope falls back to the static value.
    const std::vector<DatedScore> falling{at(2025, 1, 1, 0.8), at(2025, 3, 1, 0.5)};
    const auto fallen = dynamic_projection(falling, 0.33);
    CHECK(fallen.s_dyn == 0.33);
    CHECK(fallen.fallback);

    // Saturating trend clamps at zero.
    const std::vector<DatedScore> hot{at(2025, 1, 1, 0.85), at(2025, 1, 11, 0.95), at(2025, 1, 21, 1.05)};
    const auto clamped = dynamic_projection(hot, 0.5);
    CHECK(clamped.s_dyn == 0.0);
    CHECK_FALSE(clamped.fallback);
}

TEST_CASE("a degenerate time axis takes the fallback path") {
    const std::vector<DatedScore> one_day{at(2025, 5, 5, 0.2), at(2025, 5, 5, 0.6)};
    const auto projection = dynamic_projection(one_day, 0.41);
    CHECK(projection.s_dyn == 0.41);
    CHECK(projection.fallback);
    CHECK_FALSE(projection.slope_per_day.has_value());

    const std::vector<DatedScore> single{at(2025, 5, 5, 0.2)};
    CHECK(dynamic_projection(single, 0.7).fallback);
}

TEST_CASE("anti-saturation is the fixed 80/20 fusion") {
    CHECK(anti_saturation(0.4, 0.4) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(anti_saturation(0.7097, 0.7150) == doctest::Approx(0.7107).epsilon(1e-3));
    CHECK(anti_saturation(0.9318, 0.9290) == doctest::Approx(0.9312).epsilon(1e-3));
    CHECK(std::fabs(anti_saturation(0.9318, 0.9290) - 0.9312) < 1e-3);
}

TEST_CASE("anti-saturation is monotone in both components") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const double sta = rng.uniform01();
        const double dyn = rng.uniform01();
        const double bump = 0.01 + 0.1 * rng.uniform01();
        CHECK(anti_saturation(sta + bump, dyn) > anti_saturation(sta, dyn));
        CHECK(anti_saturation(sta, dyn + bump) > anti_saturation(sta, dyn));
    }
}

TEST_CASE("the fallback branch reproduces the static value bit-exactly") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const double s_sta = rng.uniform01();
        const std::vector<DatedScore> falling{at(2025, 1, 1, 0.9), at(2025, 2, 1, 0.1)};
        const auto projection = dynamic_projection(falling, s_sta);
        CHECK(projection.s_dyn == s_sta);
        CHECK(projection.s_dyn >= 0.0);
        CHECK(projection.s_dyn <= 1.0);
    }
}
