// Geometry and pathloss model tests.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "d2dec/geometry.hpp"
#include "oracles.hpp"

using namespace d2dec;

TEST_CASE("pathloss model spot values") {
    CHECK(pathloss_db(1.0) == doctest::Approx(36.3).epsilon(1e-15));
    CHECK(pathloss_db(10.0) == doctest::Approx(73.9).epsilon(1e-14));
    // 36.3 + 37.6*log10(700), evaluated with 40-digit arithmetic
    CHECK(pathloss_db(700.0) == doctest::Approx(143.27568630453606).epsilon(1e-12));
}

TEST_CASE("pathloss clamps below the minimum distance") {
    CHECK(pathloss_db(0.0) == doctest::Approx(36.3));
    CHECK(pathloss_db(0.37) == doctest::Approx(36.3));
    CHECK(pathloss_db(min_path_distance_m) == doctest::Approx(36.3));
}

TEST_CASE("pathloss rejects bad distances") {
    CHECK_THROWS_AS(pathloss_db(-1.0), std::domain_error);
    CHECK_THROWS_AS(pathloss_db(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(pathloss_db(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("pathloss is strictly increasing beyond the clamp") {
    double prev = pathloss_db(min_path_distance_m);
    for (double d = 1.5; d < 3000.0; d *= 1.3) {
        const double cur = pathloss_db(d);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("dB/linear conversions") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(db_to_linear(linear_to_db(3.7)) == doctest::Approx(3.7).epsilon(1e-12));
    for (double db = -50.0; db <= 200.0; db += 7.3)
        CHECK(linear_to_db(db_to_linear(db)) == doctest::Approx(db).epsilon(1e-12));
    CHECK_THROWS_AS(linear_to_db(0.0), std::domain_error);
    CHECK_THROWS_AS(linear_to_db(-2.0), std::domain_error);
}

TEST_CASE("uniform disc sampling is deterministic and within the cell") {
    const Placement a = sample_uniform_positions(700.0, 42);
    const Placement b = sample_uniform_positions(700.0, 42);
    CHECK(a.dt.x == b.dt.x);
    CHECK(a.dt.y == b.dt.y);
    CHECK(a.ut.y == b.ut.y);
    const Placement c = sample_uniform_positions(700.0, 43);
    CHECK(a.dt.x != c.dt.x);

    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Placement p = sample_uniform_positions(700.0, seed);
        for (const NodePosition* n : {&p.dt, &p.dr, &p.ut})
            CHECK(distance_m(*n, p.enb) <= 700.0);
    }
}

TEST_CASE("uniform disc sampling matches the radial law") {
    const double radius = 700.0;
    const std::size_t n = 100000;
    std::vector<double> normalized;
    normalized.reserve(n);
    double mean_dist = 0.0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        const Placement p = sample_uniform_positions(radius, seed);
        const double d = distance_m(p.dt, p.enb);
        mean_dist += d;
        normalized.push_back(d / radius);
    }
    mean_dist /= static_cast<double>(n);
    // mean radius of a uniform disc sample is 2R/3
    CHECK(mean_dist == doctest::Approx(2.0 * radius / 3.0).epsilon(0.01));

    const double ks = oracles::ks_statistic(normalized, [](double u) { return u * u; });
    CHECK(ks < 0.01);
}

TEST_CASE("build_scenario fills all five pathlosses consistently") {
    Placement p;
    p.enb = {0.0, 0.0};
    p.dt = {450.0, 120.0};
    p.dr = {560.0, 200.0};
    p.ut = {590.0, 230.0};
    const Scenario s = build_scenario(p, 700.0);

    CHECK(s.l_d_db == doctest::Approx(pathloss_db(distance_m(p.dt, p.dr))));
    CHECK(s.l_c1_db == doctest::Approx(pathloss_db(distance_m(p.dt, p.enb))));
    CHECK(s.l_c2_db == doctest::Approx(pathloss_db(distance_m(p.enb, p.dr))));
    CHECK(s.l_utdr_db == doctest::Approx(pathloss_db(distance_m(p.ut, p.dr))));
    CHECK(s.l_utenb_db == doctest::Approx(pathloss_db(distance_m(p.ut, p.enb))));

    for (auto [lin, db] : {std::pair{s.l_d, s.l_d_db},
                           {s.l_c1, s.l_c1_db},
                           {s.l_c2, s.l_c2_db},
                           {s.l_utdr, s.l_utdr_db},
                           {s.l_utenb, s.l_utenb_db}}) {
        CHECK(lin == doctest::Approx(db_to_linear(db)).epsilon(1e-9));
        CHECK(linear_to_db(lin) == doctest::Approx(db).epsilon(1e-9));
        CHECK(lin >= 1.0);
    }
}

TEST_CASE("co-located nodes clamp to the minimum distance") {
    Placement p;
    p.dt = {100.0, 50.0};
    p.dr = {100.0, 50.0}; // same point
    p.ut = {200.0, 0.0};
    const Scenario s = build_scenario(p, 700.0);
    CHECK(s.l_d_db == doctest::Approx(36.3));
}

TEST_CASE("collinear placement gives the expected pathloss gap") {
    Placement p;
    p.enb = {0.0, 0.0};
    p.dt = {100.0, 0.0};
    p.dr = {110.0, 0.0}; // 10 m from dt, collinear
    p.ut = {300.0, 0.0};
    const Scenario s = build_scenario(p, 700.0);
    // 37.6*(log10(100) - log10(10)) = 37.6
    CHECK(s.l_c1_db - s.l_d_db == doctest::Approx(37.6).epsilon(1e-12));
}

TEST_CASE("build_scenario rejects bad inputs") {
    Placement p;
    CHECK_THROWS_AS(build_scenario(p, 0.0), std::domain_error);
    p.dt.x = std::nan("");
    CHECK_THROWS_AS(build_scenario(p, 700.0), std::domain_error);
}
