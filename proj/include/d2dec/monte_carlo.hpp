// Slot-level simulator, independent of the analytic chain.
//
// Per slot it samples the latent hypothesis, the noisy test statistic and the
// fading of the decided link, then checks the ON condition directly as
// r < C(k) (it never touches the threshold algebra of link_model, which makes
// it a genuine oracle for it). The EC estimate comes from the empirical
// log-MGF of the accumulated service over many independent paths.
//
// Reproducibility contract: every path i draws from a stream seeded
// derive_seed(master_seed, i), and the final reduction runs in fixed index
// order, so the estimate is bit-identical for any thread count.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "d2dec/link_model.hpp"
#include "d2dec/rng.hpp"

namespace d2dec {

struct SlotOutcome {
    Mode true_mode = Mode::direct;
    double t_statistic = 0.0; // dB
    Mode decided_mode = Mode::direct;
    double link_ratio = 0.0; // SNR in overlay, SIR in underlay, for the decided mode
    bool on = false;
    double service_bits = 0.0; // rate*slot_len when ON, else 0
};

// s1..s4 as 0..3.
inline int state_index(const SlotOutcome& slot) {
    const int base = slot.decided_mode == Mode::direct ? 0 : 2;
    return base + (slot.on ? 0 : 1);
}

SlotOutcome simulate_slot(const SystemParams& sys, double rate, RandomStream& rng,
                          bool underlay_with_noise = false);

std::vector<SlotOutcome> simulate_trace(const SystemParams& sys, double rate,
                                        std::size_t n_slots, std::uint64_t seed,
                                        bool underlay_with_noise = false);

struct SimOptions {
    std::size_t n_paths = 10000;
    std::size_t path_len = 50;
    unsigned threads = 1;
    bool underlay_with_noise = false; // SINR instead of SIR inside the simulator
    std::size_t bootstrap_resamples = 200;
};

struct SimEstimate {
    double ec_hat = 0.0;  // bits/s
    double std_err = 0.0; // bootstrap standard error, bits/s
    std::size_t n_paths = 0;
    std::size_t path_len = 0;
    std::uint64_t seed = 0;
    ScenarioKind kind = ScenarioKind::overlay;
};

// ec_hat = -(1/(theta*path_len*tau)) * log-mean-exp(-theta*S_i), with the
// reduction shifted by the largest exponent so it cannot underflow.
SimEstimate simulate_paths(const SystemParams& sys, double rate, double theta,
                           std::uint64_t master_seed, const SimOptions& opt = {});

struct TransitionEstimate {
    std::array<std::array<double, 4>, 4> prob{};  // row-normalized counts
    std::array<bool, 4> row_defined{};            // false when a state was never left
    std::array<std::size_t, 4> row_visits{};      // outgoing transitions counted per state
};

// Row-normalized transition counts over the state sequence. Rows of states the
// trace never visits are flagged undefined, not zero-filled.
TransitionEstimate empirical_transition_matrix(std::span<const SlotOutcome> trace);

// Empirical (p_e1, p_e2): frequency of wrong decisions conditioned on the true
// hypothesis over n_trials independent draws.
std::pair<double, double> empirical_error_rates(std::size_t n_trials,
                                                const ModeSelectParams& params,
                                                std::uint64_t seed);

} // namespace d2dec
