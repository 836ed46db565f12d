#include "d2dec/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "d2dec/rng.hpp"

namespace d2dec {

double distance_m(const NodePosition& a, const NodePosition& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double pathloss_db(double distance) {
    if (!std::isfinite(distance) || distance < 0.0)
        throw std::domain_error("pathloss_db: distance must be finite and non-negative");
    const double d = std::max(distance, min_path_distance_m);
    return 36.3 + 37.6 * std::log10(d);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
    if (!(linear > 0.0))
        throw std::domain_error("linear_to_db: argument must be positive");
    return 10.0 * std::log10(linear);
}

Placement sample_uniform_positions(double cell_radius, std::uint64_t seed) {
    if (!(cell_radius > 0.0) || !std::isfinite(cell_radius))
        throw std::domain_error("sample_uniform_positions: cell radius must be positive");
    RandomStream rng(derive_seed(seed, 0));
    const auto draw = [&]() {
        const double r = cell_radius * std::sqrt(rng.next_uniform());
        const double phi = 2.0 * std::numbers::pi * rng.next_uniform();
        return NodePosition{r * std::cos(phi), r * std::sin(phi)};
    };
    Placement p;
    p.enb = NodePosition{0.0, 0.0};
    p.dt = draw();
    p.dr = draw();
    p.ut = draw();
    return p;
}

Scenario build_scenario(const Placement& placement, double cell_radius) {
    if (!(cell_radius > 0.0) || !std::isfinite(cell_radius))
        throw std::domain_error("build_scenario: cell radius must be positive");
    for (const NodePosition* pos : {&placement.enb, &placement.dt, &placement.dr, &placement.ut})
        if (!std::isfinite(pos->x) || !std::isfinite(pos->y))
            throw std::domain_error("build_scenario: node coordinates must be finite");

    Scenario s;
    s.cell_radius = cell_radius;
    s.pos_enb = placement.enb;
    s.pos_dt = placement.dt;
    s.pos_dr = placement.dr;
    s.pos_ut = placement.ut;

    s.l_d_db = pathloss_db(distance_m(placement.dt, placement.dr));
    s.l_c1_db = pathloss_db(distance_m(placement.dt, placement.enb));
    s.l_c2_db = pathloss_db(distance_m(placement.enb, placement.dr));
    s.l_utdr_db = pathloss_db(distance_m(placement.ut, placement.dr));
    s.l_utenb_db = pathloss_db(distance_m(placement.ut, placement.enb));

    s.l_d = db_to_linear(s.l_d_db);
    s.l_c1 = db_to_linear(s.l_c1_db);
    s.l_c2 = db_to_linear(s.l_c2_db);
    s.l_utdr = db_to_linear(s.l_utdr_db);
    s.l_utenb = db_to_linear(s.l_utenb_db);
    return s;
}

} // namespace d2dec
