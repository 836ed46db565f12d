#include "d2dec/mode_selection.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "d2dec/errors.hpp"

namespace d2dec {

namespace {

void check_priors(double prior_h0, double prior_h1) {
    if (!(prior_h0 > 0.0) || !(prior_h0 < 1.0) || !(prior_h1 > 0.0) || !(prior_h1 < 1.0))
        throw std::domain_error("priors must lie strictly inside (0, 1)");
    if (std::abs(prior_h0 + prior_h1 - 1.0) > 1e-9)
        throw std::domain_error("priors must sum to 1");
}

void check_m_t(double m_t) {
    if (!std::isfinite(m_t))
        throw std::domain_error("m_t must be finite");
    if (m_t == 0.0)
        throw DegenerateModeSelection(
            "m_t = 0: direct and uplink pathlosses coincide, mode selection is undefined");
}

void check_sigma_t(double sigma_t) {
    if (!std::isfinite(sigma_t) || sigma_t < 0.0)
        throw std::domain_error("sigma_t must be finite and non-negative");
}

} // namespace

ModeSelectParams make_mode_select_params(double sigma, double prior_h0, double prior_h1,
                                         double m_t) {
    check_priors(prior_h0, prior_h1);
    check_m_t(m_t);
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw std::domain_error("sigma must be finite and non-negative");

    ModeSelectParams p;
    p.sigma = sigma;
    p.sigma_t = std::numbers::sqrt2 * sigma;
    p.m_t = m_t;
    p.prior_h0 = prior_h0;
    p.prior_h1 = prior_h1;
    p.delta = prior_h0 / prior_h1;
    p.eta = threshold_eta(prior_h0, prior_h1, m_t, p.sigma_t);
    return p;
}

ModeSelectParams make_mode_select_params_sigma_t(double sigma_t, double prior_h0,
                                                 double prior_h1, double m_t) {
    check_sigma_t(sigma_t);
    return make_mode_select_params(sigma_t / std::numbers::sqrt2, prior_h0, prior_h1, m_t);
}

double threshold_eta(double prior_h0, double prior_h1, double m_t, double sigma_t) {
    check_priors(prior_h0, prior_h1);
    check_sigma_t(sigma_t);
    check_m_t(m_t);
    return std::log(prior_h0 / prior_h1) * sigma_t * sigma_t / (2.0 * m_t);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::domain_error("q_inverse: probability must lie in (0, 1)");
    // Q is strictly decreasing; bisect on [-40, 40], which covers all doubles
    // representable as Q values.
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (q_function(mid) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ErrorProbs error_probabilities(double m_t, double sigma_t, double eta) {
    check_m_t(m_t);
    check_sigma_t(sigma_t);
    if (!std::isfinite(eta))
        throw std::domain_error("eta must be finite");
    if (sigma_t == 0.0)
        return {0.0, 0.0}; // perfect-separation limit

    // Mirror m_t < 0 onto the positive-mean problem: the acceptance region
    // flips (decide H1 when T < eta), which maps (m_t, eta) -> (-m_t, -eta).
    const double a = std::abs(m_t);
    const double eta_m = m_t > 0.0 ? eta : -eta;
    // P_e2 = P(T < eta | H1) written as an upper tail, Q((m - eta)/sigma), so
    // both errors stay accurate when the arguments are large.
    return {q_function((eta_m + a) / sigma_t), q_function((a - eta_m) / sigma_t)};
}

double kld(double m_t, double sigma_t) {
    if (!std::isfinite(m_t))
        throw std::domain_error("m_t must be finite");
    check_sigma_t(sigma_t);
    if (sigma_t == 0.0)
        throw std::domain_error("kld: sigma_t = 0 gives an infinite divergence");
    const double ratio = m_t / sigma_t;
    return ratio * ratio;
}

DecisionMarginals decision_marginals(double prior_h0, double prior_h1, double m_t,
                                     double sigma_t, double eta) {
    check_priors(prior_h0, prior_h1);
    check_m_t(m_t);
    check_sigma_t(sigma_t);
    if (sigma_t == 0.0)
        return {prior_h0, 1.0 - prior_h0}; // decisions are perfect
    const auto [p_e1, p_e2] = error_probabilities(m_t, sigma_t, eta);
    const double p_h0 = (1.0 - p_e1) * prior_h0 + p_e2 * prior_h1;
    return {p_h0, 1.0 - p_h0};
}

Mode decide_mode(double t_statistic, double eta, double m_t) {
    if (m_t < 0.0)
        return t_statistic < eta ? Mode::cellular : Mode::direct;
    return t_statistic > eta ? Mode::cellular : Mode::direct;
}

ModeSelectDiagnostics mode_select_diagnostics(const ModeSelectParams& params) {
    ModeSelectDiagnostics d;
    const auto [p_e1, p_e2] = error_probabilities(params.m_t, params.sigma_t, params.eta);
    d.p_e1 = p_e1;
    d.p_e2 = p_e2;
    d.kld = params.sigma_t > 0.0 ? kld(params.m_t, params.sigma_t)
                                 : std::numeric_limits<double>::infinity();
    const auto marg = decision_marginals(params.prior_h0, params.prior_h1, params.m_t,
                                         params.sigma_t, params.eta);
    d.p_decide_h0 = marg.p_h0;
    d.p_decide_h1 = marg.p_h1;
    return d;
}

} // namespace d2dec
