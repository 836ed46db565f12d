// Four-state Markov service model of the mode-selected D2D link and its
// effective capacity.
//
// States: s1 = H0 & ON, s2 = H0 & OFF, s3 = H1 & ON, s4 = H1 & OFF. Decisions
// and fading redraw independently every slot, so every row of the transition
// matrix equals (p1, p2, p3, p4) and the matrix has rank 1; the spectral radius
// of Phi(-theta)*P is then its trace (p1+p3)e^(-theta*r*tau) + p2 + p4, which
// gives the closed form EC = -(1/(theta*tau)) * ln of that trace.
#pragma once

#include <vector>

#include "d2dec/link_model.hpp"

namespace d2dec {

struct TransitionProbs {
    double p1 = 0.0; // H0 & ON
    double p2 = 0.0; // H0 & OFF
    double p3 = 0.0; // H1 & ON
    double p4 = 0.0; // H1 & OFF
};

// p1 = P(H0(k))*p_on_direct and so on. p2 and p4 are built by subtraction, so
// p1 + p2 reproduces the H0 marginal exactly.
TransitionProbs transition_probs(const DecisionMarginals& marginals, const OnProbs& on);

struct QosParams {
    double theta = 0.0;    // QoS exponent, 1/bits
    double rate = 0.0;     // fixed transmission rate, bits/s
    double slot_len = 0.0; // s
};

struct EcResult {
    double ec = 0.0;   // bits/s
    double p_on = 0.0; // p1 + p3
    TransitionProbs probs;
    QosParams qos;
    ScenarioKind kind = ScenarioKind::overlay;
};

// Closed-form effective capacity, evaluated in the log domain so large
// theta*r*tau cannot underflow. Throws std::domain_error for theta <= 0.
EcResult effective_capacity(const TransitionProbs& probs, const QosParams& qos,
                            ScenarioKind kind);

struct ThetaLimits {
    double at_zero; // (p1+p3)*rate, the mean throughput
    double at_inf;  // 0 when p2+p4 > 0, else rate
};

ThetaLimits ec_theta_limits(const TransitionProbs& probs, double rate, double slot_len);

// Independent route to the same number: builds the explicit 4x4 matrix
// Phi(-theta)*P and extracts its spectral radius by power iteration
// (tolerance 1e-12, at most 1e4 iterations). Works in the linear domain, so it
// is meaningful only while e^(-theta*r*tau) does not underflow.
double spectral_radius_oracle(const TransitionProbs& probs, const QosParams& qos);

// Full analytic pipeline: decision marginals -> ON probabilities -> transition
// probabilities -> EC.
EcResult analytic_ec(const SystemParams& sys, double theta, double rate);

struct RateGrid {
    double r_min = 1.0;
    double r_max = 200.0;
    double r_step = 1.0;

    bool operator==(const RateGrid&) const = default;
};

struct RatePoint {
    double rate;
    double ec;
};

struct RateSearchResult {
    double r_star;
    double ec_star;
    std::vector<RatePoint> curve;
};

// Exhaustive EC maximization over the rate grid; thresholds and ON
// probabilities are recomputed per grid point. First grid point wins ties.
// Throws std::domain_error for an empty or malformed grid.
RateSearchResult optimal_rate_search(const SystemParams& sys, double theta,
                                     const RateGrid& grid);

} // namespace d2dec
