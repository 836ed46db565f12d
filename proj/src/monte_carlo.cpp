#include "d2dec/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "d2dec/errors.hpp"

namespace d2dec {

namespace {

void check_runnable(const SystemParams& sys, double rate, double theta) {
    validate(sys.radio);
    if (sys.mode_select.m_t == 0.0)
        throw DegenerateModeSelection("simulator: m_t = 0 has no defined mode selection");
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw std::domain_error("simulator: rate must be finite and non-negative");
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::domain_error("simulator: theta must be positive");
}

} // namespace

SlotOutcome simulate_slot(const SystemParams& sys, double rate, RandomStream& rng,
                          bool underlay_with_noise) {
    const auto& ms = sys.mode_select;
    const auto& rad = sys.radio;
    const auto& sc = sys.scenario;

    SlotOutcome out;
    const bool true_cellular = rng.next_uniform() < ms.prior_h1;
    out.true_mode = true_cellular ? Mode::cellular : Mode::direct;
    // T | H0 ~ N(-m_t, sigma_t^2), T | H1 ~ N(+m_t, sigma_t^2)
    const double mean_t = true_cellular ? ms.m_t : -ms.m_t;
    out.t_statistic = mean_t + ms.sigma_t * rng.next_normal();
    out.decided_mode = decide_mode(out.t_statistic, ms.eta, ms.m_t);

    // Channel powers are drawn as P*|h|^2/L with |h|^2 ~ Exp(1); capacity is
    // evaluated directly as B log2(1+ratio), with the cellular 1/2 pre-log.
    double ratio;
    double capacity;
    if (sys.kind == ScenarioKind::overlay) {
        if (out.decided_mode == Mode::direct) {
            ratio = rad.p_bar * rng.next_exponential(1.0) / (sc.l_d * rad.n0);
            capacity = rad.bandwidth * std::log2(1.0 + ratio);
        } else {
            const double g_ul = rad.p_bar * rng.next_exponential(1.0) / (sc.l_c1 * rad.n0);
            const double g_dl = rad.p_enb * rng.next_exponential(1.0) / (sc.l_c2 * rad.n0);
            ratio = std::min(g_ul, g_dl);
            capacity = 0.5 * rad.bandwidth * std::log2(1.0 + ratio);
        }
    } else {
        const double noise = underlay_with_noise ? rad.n0 : 0.0;
        if (out.decided_mode == Mode::direct) {
            const double sig = rad.p_bar * rng.next_exponential(1.0) / sc.l_d;
            const double itf = rad.p_ut * rng.next_exponential(1.0) / sc.l_utdr;
            ratio = sig / (itf + noise);
            capacity = rad.bandwidth * std::log2(1.0 + ratio);
        } else {
            const double s_ul = rad.p_bar * rng.next_exponential(1.0) / sc.l_c1;
            const double i_ul = rad.p_ut * rng.next_exponential(1.0) / sc.l_utenb;
            const double s_dl = rad.p_enb * rng.next_exponential(1.0) / sc.l_c2;
            const double i_dl = rad.p_ut * rng.next_exponential(1.0) / sc.l_utdr;
            ratio = std::min(s_ul / (i_ul + noise), s_dl / (i_dl + noise));
            capacity = 0.5 * rad.bandwidth * std::log2(1.0 + ratio);
        }
    }

    out.link_ratio = ratio;
    out.on = rate == 0.0 || rate < capacity; // zero rate is always deliverable
    out.service_bits = out.on ? rate * rad.slot_len : 0.0;
    return out;
}

std::vector<SlotOutcome> simulate_trace(const SystemParams& sys, double rate,
                                        std::size_t n_slots, std::uint64_t seed,
                                        bool underlay_with_noise) {
    check_runnable(sys, rate, 1.0);
    RandomStream rng(derive_seed(seed, 0));
    std::vector<SlotOutcome> trace;
    trace.reserve(n_slots);
    for (std::size_t i = 0; i < n_slots; ++i)
        trace.push_back(simulate_slot(sys, rate, rng, underlay_with_noise));
    return trace;
}

SimEstimate simulate_paths(const SystemParams& sys, double rate, double theta,
                           std::uint64_t master_seed, const SimOptions& opt) {
    check_runnable(sys, rate, theta);
    if (opt.n_paths < 1 || opt.path_len < 1)
        throw std::domain_error("simulate_paths: need at least one path and one slot");

    // Per-path service totals. Each path owns its substream, so any partition
    // across threads produces the same totals.
    std::vector<double> totals(opt.n_paths);
    const auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            RandomStream rng(derive_seed(master_seed, i));
            double sum = 0.0;
            for (std::size_t k = 0; k < opt.path_len; ++k)
                sum += simulate_slot(sys, rate, rng, opt.underlay_with_noise).service_bits;
            totals[i] = sum;
        }
    };

    const unsigned threads = std::max(1u, opt.threads);
    if (threads == 1 || opt.n_paths < 2 * threads) {
        run_range(0, opt.n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const std::size_t chunk = (opt.n_paths + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(opt.n_paths, lo + chunk);
            if (lo < hi)
                pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool)
            th.join();
    }

    // Shifted log-mean-exp of e^(-theta*S_i), reduced in fixed index order.
    double max_exp = -std::numeric_limits<double>::infinity();
    for (double s : totals)
        max_exp = std::max(max_exp, -theta * s);
    std::vector<double> weights(opt.n_paths);
    double sum_w = 0.0;
    for (std::size_t i = 0; i < opt.n_paths; ++i) {
        weights[i] = std::exp(-theta * totals[i] - max_exp);
        sum_w += weights[i];
    }
    const double horizon = theta * static_cast<double>(opt.path_len) * sys.radio.slot_len;
    const double n = static_cast<double>(opt.n_paths);
    const double ec_hat = -(max_exp + std::log(sum_w / n)) / horizon;

    // Nonparametric bootstrap over paths for the standard error.
    double std_err = 0.0;
    if (opt.bootstrap_resamples >= 2 && opt.n_paths >= 2) {
        RandomStream boot(derive_seed(master_seed, opt.n_paths));
        std::vector<double> replicates(opt.bootstrap_resamples);
        for (std::size_t b = 0; b < opt.bootstrap_resamples; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < opt.n_paths; ++i)
                s += weights[boot.next_u64() % opt.n_paths];
            replicates[b] = -(max_exp + std::log(s / n)) / horizon;
        }
        double mean = 0.0;
        for (double r : replicates)
            mean += r;
        mean /= static_cast<double>(replicates.size());
        double var = 0.0;
        for (double r : replicates)
            var += (r - mean) * (r - mean);
        std_err = std::sqrt(var / static_cast<double>(replicates.size() - 1));
    }

    return {ec_hat, std_err, opt.n_paths, opt.path_len, master_seed, sys.kind};
}

TransitionEstimate empirical_transition_matrix(std::span<const SlotOutcome> trace) {
    if (trace.size() < 2)
        throw std::domain_error("empirical_transition_matrix: trace too short");

    std::array<std::array<std::size_t, 4>, 4> counts{};
    std::array<std::size_t, 4> visits{};
    for (std::size_t k = 1; k < trace.size(); ++k) {
        const int from = state_index(trace[k - 1]);
        const int to = state_index(trace[k]);
        ++counts[from][to];
        ++visits[from];
    }

    TransitionEstimate est;
    est.row_visits = visits;
    for (int i = 0; i < 4; ++i) {
        est.row_defined[i] = visits[i] > 0;
        for (int j = 0; j < 4; ++j)
            est.prob[i][j] = est.row_defined[i]
                                 ? static_cast<double>(counts[i][j]) / static_cast<double>(visits[i])
                                 : std::numeric_limits<double>::quiet_NaN();
    }
    return est;
}

std::pair<double, double> empirical_error_rates(std::size_t n_trials,
                                                const ModeSelectParams& params,
                                                std::uint64_t seed) {
    if (n_trials < 1)
        throw std::domain_error("empirical_error_rates: need at least one trial");
    if (params.m_t == 0.0)
        throw DegenerateModeSelection("empirical_error_rates: m_t = 0");

    RandomStream rng(derive_seed(seed, 0));
    std::size_t n_h0 = 0, n_h1 = 0, wrong_h0 = 0, wrong_h1 = 0;
    for (std::size_t t = 0; t < n_trials; ++t) {
        const bool true_cellular = rng.next_uniform() < params.prior_h1;
        const double mean_t = true_cellular ? params.m_t : -params.m_t;
        const double stat = mean_t + params.sigma_t * rng.next_normal();
        const Mode decided = decide_mode(stat, params.eta, params.m_t);
        if (true_cellular) {
            ++n_h1;
            wrong_h1 += decided == Mode::direct;
        } else {
            ++n_h0;
            wrong_h0 += decided == Mode::cellular;
        }
    }
    const double p_e1 = n_h0 ? static_cast<double>(wrong_h0) / static_cast<double>(n_h0) : 0.0;
    const double p_e2 = n_h1 ? static_cast<double>(wrong_h1) / static_cast<double>(n_h1) : 0.0;
    return {p_e1, p_e2};
}

} // namespace d2dec
