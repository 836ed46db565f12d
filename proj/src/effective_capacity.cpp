#include "d2dec/effective_capacity.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace d2dec {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0) || !(p <= 1.0))
        throw std::domain_error(std::string(name) + " must lie in [0, 1]");
}

void check_probs(const TransitionProbs& p) {
    check_probability(p.p1, "p1");
    check_probability(p.p2, "p2");
    check_probability(p.p3, "p3");
    check_probability(p.p4, "p4");
    if (std::abs(p.p1 + p.p2 + p.p3 + p.p4 - 1.0) > 1e-9)
        throw std::domain_error("transition probabilities must sum to 1");
}

void check_qos(const QosParams& q) {
    if (!(q.theta > 0.0) || !std::isfinite(q.theta))
        throw std::domain_error("theta must be positive and finite");
    if (!(q.rate >= 0.0) || !std::isfinite(q.rate))
        throw std::domain_error("rate must be finite and non-negative");
    if (!(q.slot_len > 0.0) || !std::isfinite(q.slot_len))
        throw std::domain_error("slot length must be positive");
}

} // namespace

namespace {

// Splits mass into (mass*p, mass*(1-p)) so the parts sum back to mass without
// any rounding: the larger part is formed by the product and the smaller by a
// subtraction that Sterbenz's lemma makes exact.
std::pair<double, double> exact_split(double mass, double p) {
    if (p >= 0.5) {
        const double on_part = mass * p;
        return {on_part, mass - on_part};
    }
    const double off_part = mass * (1.0 - p);
    return {mass - off_part, off_part};
}

} // namespace

TransitionProbs transition_probs(const DecisionMarginals& marginals, const OnProbs& on) {
    check_probability(marginals.p_h0, "p_h0");
    check_probability(marginals.p_h1, "p_h1");
    check_probability(on.p_on_direct, "p_on_direct");
    check_probability(on.p_on_cellular, "p_on_cellular");
    TransitionProbs t;
    std::tie(t.p1, t.p2) = exact_split(marginals.p_h0, on.p_on_direct);
    std::tie(t.p3, t.p4) = exact_split(marginals.p_h1, on.p_on_cellular);
    return t;
}

EcResult effective_capacity(const TransitionProbs& probs, const QosParams& qos,
                            ScenarioKind kind) {
    check_probs(probs);
    check_qos(qos);

    const double p_on = probs.p1 + probs.p3;
    const double p_off = probs.p2 + probs.p4;
    const double exponent = qos.theta * qos.rate * qos.slot_len;

    // log of (p_on*e^-x + p_off) via a shifted log-sum-exp; the direct product
    // underflows once x > ~745.
    double log_mix;
    if (p_on == 0.0) {
        log_mix = std::log(p_off);
    } else if (p_off == 0.0) {
        log_mix = std::log(p_on) - exponent;
    } else {
        const double a = std::log(p_on) - exponent;
        const double b = std::log(p_off);
        const double m = std::max(a, b);
        log_mix = m + std::log(std::exp(a - m) + std::exp(b - m));
    }

    EcResult result;
    result.ec = -log_mix / (qos.theta * qos.slot_len);
    result.p_on = p_on;
    result.probs = probs;
    result.qos = qos;
    result.kind = kind;
    return result;
}

ThetaLimits ec_theta_limits(const TransitionProbs& probs, double rate, double slot_len) {
    check_probs(probs);
    if (!(rate >= 0.0) || !(slot_len > 0.0))
        throw std::domain_error("ec_theta_limits: bad rate or slot length");
    const double p_off = probs.p2 + probs.p4;
    return {(probs.p1 + probs.p3) * rate, p_off > 0.0 ? 0.0 : rate};
}

double spectral_radius_oracle(const TransitionProbs& probs, const QosParams& qos) {
    check_probs(probs);
    check_qos(qos);

    const double damp = std::exp(-qos.theta * qos.rate * qos.slot_len);
    const std::array<double, 4> phi{damp, 1.0, damp, 1.0};
    const std::array<double, 4> row{probs.p1, probs.p2, probs.p3, probs.p4};
    double m[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m[i][j] = phi[i] * row[j];

    std::array<double, 4> v{0.5, 0.5, 0.5, 0.5}; // unit L2 norm, positive
    double lambda = 0.0;
    double prev = -1.0;
    constexpr double tol = 1e-12;
    constexpr int max_iters = 10000;
    for (int it = 0; it < max_iters; ++it) {
        std::array<double, 4> w{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                w[i] += m[i][j] * v[j];
        double norm = 0.0;
        for (double wi : w)
            norm += wi * wi;
        lambda = std::sqrt(norm);
        if (lambda == 0.0)
            throw std::runtime_error("spectral_radius_oracle: matrix underflowed to zero");
        for (int i = 0; i < 4; ++i)
            v[i] = w[i] / lambda;
        if (it > 0 && std::abs(lambda - prev) <= tol * lambda)
            return -std::log(lambda) / (qos.theta * qos.slot_len);
        prev = lambda;
    }
    throw std::runtime_error("spectral_radius_oracle: power iteration did not converge");
}

EcResult analytic_ec(const SystemParams& sys, double theta, double rate) {
    const auto& ms = sys.mode_select;
    const DecisionMarginals marginals =
        decision_marginals(ms.prior_h0, ms.prior_h1, ms.m_t, ms.sigma_t, ms.eta);
    const OnProbs on = on_probs(sys, rate);
    const TransitionProbs probs = transition_probs(marginals, on);
    return effective_capacity(probs, {theta, rate, sys.radio.slot_len}, sys.kind);
}

RateSearchResult optimal_rate_search(const SystemParams& sys, double theta,
                                     const RateGrid& grid) {
    if (!(grid.r_min >= 0.0) || !(grid.r_min < grid.r_max) || !(grid.r_step > 0.0))
        throw std::domain_error("optimal_rate_search: empty or malformed rate grid");

    const auto n =
        static_cast<std::size_t>(std::floor((grid.r_max - grid.r_min) / grid.r_step + 1e-9)) + 1;
    RateSearchResult result;
    result.curve.reserve(n);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.r_min + static_cast<double>(i) * grid.r_step;
        const double ec = analytic_ec(sys, theta, r).ec;
        result.curve.push_back({r, ec});
        if (ec > result.curve[best].ec) // strict: first occurrence wins ties
            best = i;
    }
    result.r_star = result.curve[best].rate;
    result.ec_star = result.curve[best].ec;
    return result;
}

} // namespace d2dec
