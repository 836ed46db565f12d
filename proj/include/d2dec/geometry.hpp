// Single-cell geometry and the log-distance pathloss model.
//
// The scenario holds one eNB at the cell center, a D2D pair (D_T, D_R) and the
// cellular transmitter U_T that acts as the interferer in underlay operation.
// Five link pathlosses matter: D_T-D_R (direct), D_T-eNB (uplink), eNB-D_R
// (downlink), U_T-D_R and U_T-eNB (interference paths). Each is kept in dB
// (the mode-selection feature domain) and in linear scale (SNR formulas).
#pragma once

#include <cstdint>

namespace d2dec {

// Distances are clamped to this floor before entering the pathloss model; the
// log-distance form is unphysical as d -> 0.
inline constexpr double min_path_distance_m = 1.0;

struct NodePosition {
    double x = 0.0; // meters
    double y = 0.0;

    bool operator==(const NodePosition&) const = default;
};

double distance_m(const NodePosition& a, const NodePosition& b);

// 36.3 + 37.6*log10(d) with d clamped to min_path_distance_m.
// Throws std::domain_error for negative or non-finite distances.
double pathloss_db(double distance);

double db_to_linear(double db);
double linear_to_db(double linear); // throws std::domain_error for linear <= 0

struct Placement {
    NodePosition enb; // cell center
    NodePosition dt;  // D2D transmitter
    NodePosition dr;  // D2D receiver
    NodePosition ut;  // cellular transmitter (underlay interferer)
};

// UE positions uniform over the disc (r = R*sqrt(u), phi = 2*pi*v), eNB at the
// center. Deterministic in the seed; draw order is dt, dr, ut.
Placement sample_uniform_positions(double cell_radius, std::uint64_t seed);

struct Scenario {
    double cell_radius = 0.0;
    NodePosition pos_enb, pos_dt, pos_dr, pos_ut;
    // pathlosses in dB
    double l_d_db = 0.0;     // D_T - D_R
    double l_c1_db = 0.0;    // D_T - eNB
    double l_c2_db = 0.0;    // eNB - D_R
    double l_utdr_db = 0.0;  // U_T - D_R
    double l_utenb_db = 0.0; // U_T - eNB
    // same five, linear scale
    double l_d = 0.0, l_c1 = 0.0, l_c2 = 0.0, l_utdr = 0.0, l_utenb = 0.0;
};

// Computes all five pathlosses from the placement. Throws std::domain_error on
// non-finite coordinates or non-positive radius.
Scenario build_scenario(const Placement& placement, double cell_radius);

} // namespace d2dec
