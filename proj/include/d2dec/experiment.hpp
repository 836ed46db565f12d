// Experiment configuration, sweeps and CSV/JSON emission.
//
// Config files are flat "key = value" text with dotted section prefixes
// (e.g. radio.p_bar), '#' comments and blank lines. Unknown keys are rejected.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "d2dec/effective_capacity.hpp"
#include "d2dec/monte_carlo.hpp"

namespace d2dec {

inline constexpr std::string_view tool_version = "0.1.0";

// Fixed CSV column order; optional columns are emitted empty when absent.
inline constexpr std::string_view csv_header =
    "sweep_var,sweep_value,scenario_kind,ec_analytic,ec_mc,ec_mc_stderr,"
    "p1,p2,p3,p4,p_e1,p_e2,kld,r_star,seed";

enum class SweepVariable { sigma_t, theta, rate, p_e1 };

const char* to_string(SweepVariable variable);

struct SweepSpec {
    SweepVariable variable = SweepVariable::sigma_t;
    double from = 0.1;
    double to = 15.0;
    int steps = 30;

    bool operator==(const SweepSpec&) const = default;
};

struct McSpec {
    bool enabled = false;
    std::size_t n_paths = 10000;
    std::size_t path_len = 50;
    bool underlay_with_noise = false;

    bool operator==(const McSpec&) const = default;
};

enum class PlacementMode { explicit_coords, seeded_random };

struct ExperimentConfig {
    double cell_radius = 700.0;
    double bandwidth = 1.0e4;
    double slot_len = 0.1;
    ScenarioKind kind = ScenarioKind::overlay;

    double prior_h0 = 0.5;
    double prior_h1 = 0.5;

    double p_bar = 0.2;
    double p_enb = 10.0;
    double p_ut = 0.2;
    std::optional<double> n0; // absent -> thermal_noise_power_w(bandwidth)

    double sigma_t = 3.0; // mode-selection noise std in the T domain, dB

    PlacementMode placement = PlacementMode::explicit_coords;
    std::uint64_t placement_seed = 1;
    // Pinned default coordinates; the eNB sits at the origin. Chosen so the
    // direct hop is much shorter than the uplink and the interferer sits near
    // D_R, which keeps the overlay/underlay contrast visible.
    NodePosition dt{450.0, 120.0};
    NodePosition dr{560.0, 200.0};
    NodePosition ut{590.0, 230.0};

    std::vector<double> thetas{1.0e-3};
    double rate = 25.0;
    RateGrid rate_grid{1.0, 200.0, 1.0};

    SweepSpec sweep;
    McSpec mc;

    std::uint64_t master_seed = 12345;
    bool paper_literal_threshold = false;
    unsigned threads = 1;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(std::string_view text); // throws ConfigError
ExperimentConfig load_config(const std::string& path); // parse_config + validate

void validate(const ExperimentConfig& config); // throws ConfigError naming the key

// Effective noise power: configured value or the thermal default.
double effective_n0(const ExperimentConfig& config);

// Builds the scenario (placing nodes if requested) and all derived parameters.
// Placement is drawn once here and held fixed across sweep values.
SystemParams make_system(const ExperimentConfig& config);

// Canonical one-line rendering of every effective config field, and the FNV-1a
// hash of it used to stamp emitted files.
std::string canonical_config(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct OutputRow {
    std::string sweep_var;
    double sweep_value = 0.0;
    ScenarioKind kind = ScenarioKind::overlay;
    double theta = 0.0; // carried in JSON output; CSV records it in block comments
    std::optional<double> ec_analytic;
    std::optional<double> ec_mc;
    std::optional<double> ec_mc_stderr;
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0;
    double p_e1 = 0, p_e2 = 0;
    double kld = 0;
    std::optional<double> r_star;
    std::uint64_t seed = 0;

    bool operator==(const OutputRow&) const = default;
};

struct SweepBlock {
    double theta = 0.0;
    std::vector<OutputRow> rows;
};

// One block per configured theta (a theta sweep makes a single block). Rate
// sweeps also fill r_star with the per-block grid argmax.
std::vector<SweepBlock> run_sweep(const ExperimentConfig& config);

std::vector<OutputRow> flatten(const std::vector<SweepBlock>& blocks);

struct EmitMeta {
    std::string version{tool_version};
    std::string config_hash;
    std::uint64_t master_seed = 0;
};

void emit_csv(std::ostream& os, const std::vector<SweepBlock>& blocks, const EmitMeta& meta);
void emit_json(std::ostream& os, const std::vector<SweepBlock>& blocks, const EmitMeta& meta);

// Parses rows back out of emitted JSON (round-trip support).
std::vector<OutputRow> rows_from_json(const std::string& text);

} // namespace d2dec
