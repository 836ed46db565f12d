// SNR/SIR statistics of the direct and two-hop links, and the per-slot ON
// probabilities for overlay (noise-limited) and underlay (interference-limited)
// operation under Rayleigh block fading.
#pragma once

#include "d2dec/geometry.hpp"
#include "d2dec/mode_selection.hpp"

namespace d2dec {

enum class ScenarioKind { overlay, underlay };

const char* to_string(ScenarioKind kind);

struct RadioParams {
    double p_bar = 0.2;        // D_T transmit power, W
    double p_enb = 10.0;       // eNB transmit power, W
    double p_ut = 0.2;         // U_T transmit power (underlay interferer), W
    double n0 = 3.981e-17;     // noise power over the band, W
    double bandwidth = 1.0e4;  // Hz
    double slot_len = 0.1;     // s
};

// Thermal floor of -174 dBm/Hz integrated over the band.
double thermal_noise_power_w(double bandwidth_hz);

void validate(const RadioParams& params); // throws std::domain_error

// SNR/SIR a link must exceed for rate r to be decodable. Direct mode:
// 2^(r/B) - 1. Cellular mode spends two slots, so the consistent threshold is
// 2^(2r/B) - 1; paper_literal = true reuses the direct-mode threshold instead.
double snr_threshold(double rate, double bandwidth, Mode mode, bool paper_literal = false);

double mean_snr_direct(const RadioParams& params, double l_d);

// Mean of min(gamma_ul, gamma_dl): harmonic combination of the two hop means.
double mean_snr_cellular(const RadioParams& params, double l_c1, double l_c2);

struct OnProbs {
    double p_on_direct = 0.0;
    double p_on_cellular = 0.0;
    ScenarioKind kind = ScenarioKind::overlay;
};

OnProbs on_probs_overlay(double mean_snr_d, double mean_snr_c, double gamma_req_d,
                         double gamma_req_c);

// CDF of the direct-link SIR (ratio of independent exponentials with rates
// alpha = L_d/P_bar and beta = L_utdr/P_ut): alpha / (alpha + beta/z).
double sir_cdf_direct_underlay(double z, double alpha, double beta);

// CDF of min(SIR_ul, SIR_dl) by inclusion-exclusion of the per-hop CDFs;
// xi = L_c1/P_bar, zeta = L_utenb/P_ut, nu = L_c2/P_enb.
double sir_cdf_cellular_underlay(double z, double xi, double zeta, double nu, double beta);

// Exponential-rate coefficients of the underlay SIR terms.
struct UnderlayCoeffs {
    double alpha, beta, xi, zeta, nu;
};

UnderlayCoeffs underlay_coeffs(const Scenario& scenario, const RadioParams& params);

OnProbs on_probs_underlay(const Scenario& scenario, const RadioParams& params,
                          double gamma_req_d, double gamma_req_c);

// Full parameterization of one modeled D2D link.
struct SystemParams {
    Scenario scenario;
    RadioParams radio;
    ModeSelectParams mode_select;
    ScenarioKind kind = ScenarioKind::overlay;
    bool paper_literal_threshold = false;
};

// ON probabilities at the given rate, dispatched on the scenario kind.
OnProbs on_probs(const SystemParams& sys, double rate);

} // namespace d2dec
