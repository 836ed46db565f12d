#include "d2dec/link_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace d2dec {

const char* to_string(ScenarioKind kind) {
    return kind == ScenarioKind::overlay ? "overlay" : "underlay";
}

double thermal_noise_power_w(double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0))
        throw std::domain_error("thermal_noise_power_w: bandwidth must be positive");
    // -174 dBm/Hz = 10^-20.4 W/Hz
    return std::pow(10.0, -20.4) * bandwidth_hz;
}

void validate(const RadioParams& params) {
    const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(params.p_bar) || !positive(params.p_enb) || !positive(params.p_ut))
        throw std::domain_error("radio powers must be positive");
    if (!positive(params.n0))
        throw std::domain_error("noise power must be positive");
    if (!positive(params.bandwidth))
        throw std::domain_error("bandwidth must be positive");
    if (!positive(params.slot_len))
        throw std::domain_error("slot length must be positive");
}

double snr_threshold(double rate, double bandwidth, Mode mode, bool paper_literal) {
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw std::domain_error("snr_threshold: rate must be finite and non-negative");
    if (!(bandwidth > 0.0))
        throw std::domain_error("snr_threshold: bandwidth must be positive");
    // ON condition r < C. Direct: C = B log2(1+g). Cellular spends two slots,
    // C = (B/2) log2(1+g), hence the doubled exponent unless the literal
    // single-slot threshold is requested.
    const double slots = (mode == Mode::cellular && !paper_literal) ? 2.0 : 1.0;
    return std::expm1(slots * rate / bandwidth * std::numbers::ln2);
}

double mean_snr_direct(const RadioParams& params, double l_d) {
    if (!(l_d >= 1.0))
        throw std::domain_error("mean_snr_direct: linear pathloss must be >= 1");
    return params.p_bar / (l_d * params.n0);
}

double mean_snr_cellular(const RadioParams& params, double l_c1, double l_c2) {
    if (!(l_c1 >= 1.0) || !(l_c2 >= 1.0))
        throw std::domain_error("mean_snr_cellular: linear pathlosses must be >= 1");
    const double mean_ul = params.p_bar / (l_c1 * params.n0);
    const double mean_dl = params.p_enb / (l_c2 * params.n0);
    // min of independent exponentials is exponential with the harmonic mean
    return 1.0 / (1.0 / mean_ul + 1.0 / mean_dl);
}

OnProbs on_probs_overlay(double mean_snr_d, double mean_snr_c, double gamma_req_d,
                         double gamma_req_c) {
    if (!(mean_snr_d > 0.0) || !(mean_snr_c > 0.0))
        throw std::domain_error("on_probs_overlay: mean SNRs must be positive");
    if (!(gamma_req_d >= 0.0) || !(gamma_req_c >= 0.0))
        throw std::domain_error("on_probs_overlay: thresholds must be non-negative");
    return {std::exp(-gamma_req_d / mean_snr_d), std::exp(-gamma_req_c / mean_snr_c),
            ScenarioKind::overlay};
}

double sir_cdf_direct_underlay(double z, double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::domain_error("sir_cdf_direct_underlay: rates must be positive");
    if (std::isnan(z))
        return std::numeric_limits<double>::quiet_NaN();
    if (z <= 0.0)
        return 0.0;
    return alpha / (alpha + beta / z);
}

double sir_cdf_cellular_underlay(double z, double xi, double zeta, double nu, double beta) {
    if (!(xi > 0.0) || !(zeta > 0.0) || !(nu > 0.0) || !(beta > 0.0))
        throw std::domain_error("sir_cdf_cellular_underlay: rates must be positive");
    if (std::isnan(z))
        return std::numeric_limits<double>::quiet_NaN();
    if (z <= 0.0)
        return 0.0;
    const double f_ul = xi / (xi + zeta / z);
    const double f_dl = nu / (nu + beta / z);
    return f_ul + f_dl - f_ul * f_dl;
}

UnderlayCoeffs underlay_coeffs(const Scenario& scenario, const RadioParams& params) {
    validate(params);
    return {scenario.l_d / params.p_bar, scenario.l_utdr / params.p_ut,
            scenario.l_c1 / params.p_bar, scenario.l_utenb / params.p_ut,
            scenario.l_c2 / params.p_enb};
}

OnProbs on_probs_underlay(const Scenario& scenario, const RadioParams& params,
                          double gamma_req_d, double gamma_req_c) {
    const UnderlayCoeffs c = underlay_coeffs(scenario, params);
    return {1.0 - sir_cdf_direct_underlay(gamma_req_d, c.alpha, c.beta),
            1.0 - sir_cdf_cellular_underlay(gamma_req_c, c.xi, c.zeta, c.nu, c.beta),
            ScenarioKind::underlay};
}

OnProbs on_probs(const SystemParams& sys, double rate) {
    const double gamma_d =
        snr_threshold(rate, sys.radio.bandwidth, Mode::direct, sys.paper_literal_threshold);
    const double gamma_c =
        snr_threshold(rate, sys.radio.bandwidth, Mode::cellular, sys.paper_literal_threshold);
    if (sys.kind == ScenarioKind::overlay)
        return on_probs_overlay(mean_snr_direct(sys.radio, sys.scenario.l_d),
                                mean_snr_cellular(sys.radio, sys.scenario.l_c1,
                                                  sys.scenario.l_c2),
                                gamma_d, gamma_c);
    return on_probs_underlay(sys.scenario, sys.radio, gamma_d, gamma_c);
}

} // namespace d2dec
