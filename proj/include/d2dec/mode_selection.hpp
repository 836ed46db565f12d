// Pathloss-feature binary hypothesis test: direct mode (H0) versus routing
// through the eNB (H1).
//
// The test statistic T is the difference of two noisy dB pathloss measurements,
// T = Lhat_d - Lhat_c1, so T | H0 ~ N(-m_T, sigma_T^2) and
// T | H1 ~ N(+m_T, sigma_T^2) with m_T = L_d(dB) - L_c1(dB) and
// sigma_T = sqrt(2)*sigma. The LLR test reduces to comparing T against the
// threshold eta = ln(prior_h0/prior_h1) * sigma_T^2 / (2*m_T). For m_T < 0 the
// acceptance regions flip (decide H1 when T < eta).
#pragma once

namespace d2dec {

enum class Mode { direct, cellular }; // H0, H1

struct ModeSelectParams {
    double sigma = 0.0;    // per-measurement noise std, dB
    double sigma_t = 0.0;  // test-statistic std = sqrt(2)*sigma, dB
    double m_t = 0.0;      // L_d(dB) - L_c1(dB); sign selects the acceptance region
    double prior_h0 = 0.5; // pi(0)
    double prior_h1 = 0.5; // pi(1)
    double delta = 1.0;    // prior_h0 / prior_h1
    double eta = 0.0;      // LLR threshold in the T domain, dB
};

// Validates and derives sigma_t, delta and eta. Throws DegenerateModeSelection
// for m_t == 0 and std::domain_error for bad priors or negative sigma.
ModeSelectParams make_mode_select_params(double sigma, double prior_h0, double prior_h1,
                                         double m_t);
// Same, parameterized by sigma_t directly (sigma = sigma_t / sqrt(2)).
ModeSelectParams make_mode_select_params_sigma_t(double sigma_t, double prior_h0,
                                                 double prior_h1, double m_t);

// eta = ln(prior_h0/prior_h1) * sigma_t^2 / (2*m_t).
double threshold_eta(double prior_h0, double prior_h1, double m_t, double sigma_t);

// Standard normal upper-tail probability Q(x); +-inf allowed as limits.
double q_function(double x);

// Inverse of q_function on (0, 1), by bisection.
double q_inverse(double p);

struct ErrorProbs {
    double p_e1; // P(decide H1 | H0)
    double p_e2; // P(decide H0 | H1)
};

// sigma_t == 0 is the perfect-selection limit and returns (0, 0).
ErrorProbs error_probabilities(double m_t, double sigma_t, double eta);

// Kullback-Leibler divergence between the two conditionals: (m_t/sigma_t)^2.
double kld(double m_t, double sigma_t);

struct DecisionMarginals {
    double p_h0; // P(H0(k)), per-slot probability the test decides H0
    double p_h1; // 1 - p_h0
};

DecisionMarginals decision_marginals(double prior_h0, double prior_h1, double m_t,
                                     double sigma_t, double eta);

// Threshold rule; ties decide H0 (favors the direct link).
Mode decide_mode(double t_statistic, double eta, double m_t);

struct ModeSelectDiagnostics {
    double p_e1 = 0.0;
    double p_e2 = 0.0;
    double kld = 0.0; // +inf when sigma_t == 0
    double p_decide_h0 = 0.0;
    double p_decide_h1 = 0.0;
};

ModeSelectDiagnostics mode_select_diagnostics(const ModeSelectParams& params);

} // namespace d2dec
