#include "d2dec/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "d2dec/errors.hpp"

namespace d2dec {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view value) {
    const std::string text(value);
    std::size_t used = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" +
                          text + "'");
    }
    if (used != text.size())
        throw ConfigError("config key '" + std::string(key) + "': trailing junk in '" + text +
                          "'");
    return parsed;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
    std::uint64_t parsed = 0;
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, parsed);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("config key '" + std::string(key) +
                          "': expected an unsigned integer, got '" + std::string(value) + "'");
    return parsed;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on")
        return true;
    if (value == "false" || value == "0" || value == "no" || value == "off")
        return false;
    throw ConfigError("config key '" + std::string(key) + "': expected a boolean, got '" +
                      std::string(value) + "'");
}

std::vector<double> parse_number_list(std::string_view key, std::string_view value) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        const auto piece = trim(value.substr(pos, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - pos));
        if (!piece.empty())
            out.push_back(parse_number(key, piece));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    if (out.empty())
        throw ConfigError("config key '" + std::string(key) + "': empty list");
    return out;
}

ScenarioKind parse_kind(std::string_view key, std::string_view value) {
    if (value == "overlay")
        return ScenarioKind::overlay;
    if (value == "underlay")
        return ScenarioKind::underlay;
    throw ConfigError("config key '" + std::string(key) +
                      "': expected overlay or underlay, got '" + std::string(value) + "'");
}

SweepVariable parse_sweep_variable(std::string_view value) {
    if (value == "sigma_t")
        return SweepVariable::sigma_t;
    if (value == "theta")
        return SweepVariable::theta;
    if (value == "rate")
        return SweepVariable::rate;
    if (value == "p_e1")
        return SweepVariable::p_e1;
    throw ConfigError("config key 'sweep.variable': expected one of sigma_t, theta, rate, "
                      "p_e1; got '" +
                      std::string(value) + "'");
}

void apply_key(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "cell_radius")
        cfg.cell_radius = parse_number(key, value);
    else if (key == "bandwidth")
        cfg.bandwidth = parse_number(key, value);
    else if (key == "slot_len")
        cfg.slot_len = parse_number(key, value);
    else if (key == "scenario")
        cfg.kind = parse_kind(key, value);
    else if (key == "priors.h0")
        cfg.prior_h0 = parse_number(key, value);
    else if (key == "priors.h1")
        cfg.prior_h1 = parse_number(key, value);
    else if (key == "radio.p_bar")
        cfg.p_bar = parse_number(key, value);
    else if (key == "radio.p_enb")
        cfg.p_enb = parse_number(key, value);
    else if (key == "radio.p_ut")
        cfg.p_ut = parse_number(key, value);
    else if (key == "radio.n0")
        cfg.n0 = parse_number(key, value);
    else if (key == "mode_select.sigma_t")
        cfg.sigma_t = parse_number(key, value);
    else if (key == "placement.mode") {
        if (value == "explicit")
            cfg.placement = PlacementMode::explicit_coords;
        else if (value == "random")
            cfg.placement = PlacementMode::seeded_random;
        else
            throw ConfigError("config key 'placement.mode': expected explicit or random");
    } else if (key == "placement.seed")
        cfg.placement_seed = parse_u64(key, value);
    else if (key == "placement.dt_x")
        cfg.dt.x = parse_number(key, value);
    else if (key == "placement.dt_y")
        cfg.dt.y = parse_number(key, value);
    else if (key == "placement.dr_x")
        cfg.dr.x = parse_number(key, value);
    else if (key == "placement.dr_y")
        cfg.dr.y = parse_number(key, value);
    else if (key == "placement.ut_x")
        cfg.ut.x = parse_number(key, value);
    else if (key == "placement.ut_y")
        cfg.ut.y = parse_number(key, value);
    else if (key == "theta")
        cfg.thetas = parse_number_list(key, value);
    else if (key == "rate")
        cfg.rate = parse_number(key, value);
    else if (key == "rate_grid.min")
        cfg.rate_grid.r_min = parse_number(key, value);
    else if (key == "rate_grid.max")
        cfg.rate_grid.r_max = parse_number(key, value);
    else if (key == "rate_grid.step")
        cfg.rate_grid.r_step = parse_number(key, value);
    else if (key == "sweep.variable")
        cfg.sweep.variable = parse_sweep_variable(value);
    else if (key == "sweep.from")
        cfg.sweep.from = parse_number(key, value);
    else if (key == "sweep.to")
        cfg.sweep.to = parse_number(key, value);
    else if (key == "sweep.steps")
        cfg.sweep.steps = static_cast<int>(parse_u64(key, value));
    else if (key == "mc.enabled")
        cfg.mc.enabled = parse_bool(key, value);
    else if (key == "mc.n_paths")
        cfg.mc.n_paths = parse_u64(key, value);
    else if (key == "mc.path_len")
        cfg.mc.path_len = parse_u64(key, value);
    else if (key == "mc.underlay_with_noise")
        cfg.mc.underlay_with_noise = parse_bool(key, value);
    else if (key == "master_seed")
        cfg.master_seed = parse_u64(key, value);
    else if (key == "paper_literal_threshold")
        cfg.paper_literal_threshold = parse_bool(key, value);
    else if (key == "threads")
        cfg.threads = static_cast<unsigned>(parse_u64(key, value));
    else
        throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::string fmt_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string fmt_optional(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string{};
}

const char* to_string(PlacementMode mode) {
    return mode == PlacementMode::explicit_coords ? "explicit" : "random";
}

} // namespace

const char* to_string(SweepVariable variable) {
    switch (variable) {
    case SweepVariable::sigma_t: return "sigma_t";
    case SweepVariable::theta: return "theta";
    case SweepVariable::rate: return "rate";
    case SweepVariable::p_e1: return "p_e1";
    }
    return "?";
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::vector<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
            for (const auto& k : seen)
                if (k == key)
                    throw ConfigError("duplicate config key '" + std::string(key) + "'");
            seen.emplace_back(key);
            apply_key(cfg, key, value);
        }
        if (nl == std::string_view::npos)
            break;
        pos = nl + 1;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    validate(cfg);
    return cfg;
}

double effective_n0(const ExperimentConfig& config) {
    return config.n0 ? *config.n0 : thermal_noise_power_w(config.bandwidth);
}

void validate(const ExperimentConfig& config) {
    const auto require = [](bool ok, const std::string& msg) {
        if (!ok)
            throw ConfigError(msg);
    };
    const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };

    require(positive(config.cell_radius), "cell_radius must be positive");
    require(positive(config.bandwidth), "bandwidth must be positive");
    require(positive(config.slot_len), "slot_len must be positive");
    require(config.prior_h0 > 0.0 && config.prior_h0 < 1.0,
            "priors.h0 must lie strictly inside (0, 1)");
    require(config.prior_h1 > 0.0 && config.prior_h1 < 1.0,
            "priors.h1 must lie strictly inside (0, 1)");
    require(std::abs(config.prior_h0 + config.prior_h1 - 1.0) <= 1e-9,
            "priors.h0 + priors.h1 must sum to 1");
    require(positive(config.p_bar), "radio.p_bar must be positive");
    require(positive(config.p_enb), "radio.p_enb must be positive");
    require(positive(config.p_ut), "radio.p_ut must be positive");
    if (config.n0)
        require(positive(*config.n0), "radio.n0 must be positive");
    require(std::isfinite(config.sigma_t) && config.sigma_t >= 0.0,
            "mode_select.sigma_t must be non-negative");

    if (config.placement == PlacementMode::explicit_coords) {
        const NodePosition center{0.0, 0.0};
        const auto inside = [&](const NodePosition& p) {
            return std::isfinite(p.x) && std::isfinite(p.y) &&
                   distance_m(p, center) <= config.cell_radius + 1e-9;
        };
        require(inside(config.dt), "placement.dt lies outside the cell radius");
        require(inside(config.dr), "placement.dr lies outside the cell radius");
        require(inside(config.ut), "placement.ut lies outside the cell radius");
    }

    require(!config.thetas.empty(), "theta list must not be empty");
    for (double th : config.thetas)
        require(positive(th), "theta values must be positive");
    require(std::isfinite(config.rate) && config.rate >= 0.0, "rate must be non-negative");
    require(config.rate_grid.r_min >= 0.0 && config.rate_grid.r_min < config.rate_grid.r_max &&
                config.rate_grid.r_step > 0.0,
            "rate_grid must satisfy 0 <= min < max and step > 0");

    require(config.sweep.steps >= 2, "sweep.steps must be at least 2");
    require(std::isfinite(config.sweep.from) && std::isfinite(config.sweep.to) &&
                config.sweep.from < config.sweep.to,
            "sweep range must be non-empty (from < to)");
    switch (config.sweep.variable) {
    case SweepVariable::sigma_t:
        require(config.sweep.from >= 0.0, "sigma_t sweep requires from >= 0");
        break;
    case SweepVariable::theta:
        require(config.sweep.from > 0.0, "theta sweep requires from > 0");
        break;
    case SweepVariable::rate:
        require(config.sweep.from >= 0.0, "rate sweep requires from >= 0");
        break;
    case SweepVariable::p_e1:
        // P_e1 = Q(|m_T|/sigma_T) < 1/2, and it only inverts uniquely for
        // equal priors (eta = 0).
        require(std::abs(config.prior_h0 - config.prior_h1) <= 1e-12,
                "p_e1 sweep requires equal priors");
        require(config.sweep.from > 0.0 && config.sweep.to < 0.5,
                "p_e1 sweep range must lie inside (0, 0.5)");
        break;
    }

    require(config.mc.n_paths >= 1, "mc.n_paths must be at least 1");
    require(config.mc.path_len >= 1, "mc.path_len must be at least 1");
    require(config.threads >= 1, "threads must be at least 1");
}

SystemParams make_system(const ExperimentConfig& config) {
    validate(config);

    Placement placement;
    if (config.placement == PlacementMode::seeded_random) {
        placement = sample_uniform_positions(config.cell_radius, config.placement_seed);
    } else {
        placement = {NodePosition{0.0, 0.0}, config.dt, config.dr, config.ut};
    }

    SystemParams sys;
    sys.scenario = build_scenario(placement, config.cell_radius);
    sys.radio = RadioParams{config.p_bar, config.p_enb,     config.p_ut,
                            effective_n0(config), config.bandwidth, config.slot_len};
    validate(sys.radio);
    sys.mode_select = make_mode_select_params_sigma_t(
        config.sigma_t, config.prior_h0, config.prior_h1,
        sys.scenario.l_d_db - sys.scenario.l_c1_db);
    sys.kind = config.kind;
    sys.paper_literal_threshold = config.paper_literal_threshold;
    return sys;
}

std::string canonical_config(const ExperimentConfig& config) {
    std::ostringstream os;
    os << "cell_radius=" << fmt_double(config.cell_radius)
       << ";bandwidth=" << fmt_double(config.bandwidth)
       << ";slot_len=" << fmt_double(config.slot_len) << ";scenario=" << to_string(config.kind)
       << ";priors.h0=" << fmt_double(config.prior_h0)
       << ";priors.h1=" << fmt_double(config.prior_h1)
       << ";radio.p_bar=" << fmt_double(config.p_bar)
       << ";radio.p_enb=" << fmt_double(config.p_enb)
       << ";radio.p_ut=" << fmt_double(config.p_ut)
       << ";radio.n0=" << fmt_double(effective_n0(config))
       << ";mode_select.sigma_t=" << fmt_double(config.sigma_t)
       << ";placement.mode=" << to_string(config.placement)
       << ";placement.seed=" << config.placement_seed
       << ";placement.dt=" << fmt_double(config.dt.x) << "," << fmt_double(config.dt.y)
       << ";placement.dr=" << fmt_double(config.dr.x) << "," << fmt_double(config.dr.y)
       << ";placement.ut=" << fmt_double(config.ut.x) << "," << fmt_double(config.ut.y)
       << ";theta=";
    for (std::size_t i = 0; i < config.thetas.size(); ++i)
        os << (i ? "," : "") << fmt_double(config.thetas[i]);
    os << ";rate=" << fmt_double(config.rate)
       << ";rate_grid=" << fmt_double(config.rate_grid.r_min) << ","
       << fmt_double(config.rate_grid.r_max) << "," << fmt_double(config.rate_grid.r_step)
       << ";sweep.variable=" << to_string(config.sweep.variable)
       << ";sweep.from=" << fmt_double(config.sweep.from)
       << ";sweep.to=" << fmt_double(config.sweep.to) << ";sweep.steps=" << config.sweep.steps
       << ";mc.enabled=" << (config.mc.enabled ? "true" : "false")
       << ";mc.n_paths=" << config.mc.n_paths << ";mc.path_len=" << config.mc.path_len
       << ";mc.underlay_with_noise=" << (config.mc.underlay_with_noise ? "true" : "false")
       << ";master_seed=" << config.master_seed
       << ";paper_literal_threshold=" << (config.paper_literal_threshold ? "true" : "false");
    return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
    // FNV-1a 64 over the canonical rendering; std::hash is not stable.
    const std::string text = canonical_config(config);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::vector<SweepBlock> run_sweep(const ExperimentConfig& config) {
    const SystemParams base = make_system(config);
    const auto& sweep = config.sweep;

    std::vector<double> values(static_cast<std::size_t>(sweep.steps));
    for (int i = 0; i < sweep.steps; ++i)
        values[static_cast<std::size_t>(i)] =
            sweep.from + (sweep.to - sweep.from) * static_cast<double>(i) /
                             static_cast<double>(sweep.steps - 1);
    values.back() = sweep.to; // inclusive endpoint, exactly

    const bool theta_is_swept = sweep.variable == SweepVariable::theta;
    const std::size_t n_blocks = theta_is_swept ? 1 : config.thetas.size();

    std::vector<SweepBlock> blocks;
    blocks.reserve(n_blocks);
    std::uint64_t row_id = 0;
    for (std::size_t bi = 0; bi < n_blocks; ++bi) {
        SweepBlock block;
        block.theta = theta_is_swept ? values.front() : config.thetas[bi];
        block.rows.reserve(values.size());
        for (double value : values) {
            SystemParams sys = base;
            double theta = block.theta;
            double rate = config.rate;
            switch (sweep.variable) {
            case SweepVariable::sigma_t:
                sys.mode_select = make_mode_select_params_sigma_t(
                    value, config.prior_h0, config.prior_h1, base.mode_select.m_t);
                break;
            case SweepVariable::theta:
                theta = value;
                break;
            case SweepVariable::rate:
                rate = value;
                break;
            case SweepVariable::p_e1:
                sys.mode_select = make_mode_select_params_sigma_t(
                    std::abs(base.mode_select.m_t) / q_inverse(value), config.prior_h0,
                    config.prior_h1, base.mode_select.m_t);
                break;
            }

            const ModeSelectDiagnostics diag = mode_select_diagnostics(sys.mode_select);
            const EcResult ec = analytic_ec(sys, theta, rate);

            OutputRow row;
            row.sweep_var = to_string(sweep.variable);
            row.sweep_value = value;
            row.kind = sys.kind;
            row.theta = theta;
            row.ec_analytic = ec.ec;
            row.p1 = ec.probs.p1;
            row.p2 = ec.probs.p2;
            row.p3 = ec.probs.p3;
            row.p4 = ec.probs.p4;
            row.p_e1 = diag.p_e1;
            row.p_e2 = diag.p_e2;
            row.kld = diag.kld;
            row.seed = config.master_seed;

            if (config.mc.enabled) {
                SimOptions opt;
                opt.n_paths = config.mc.n_paths;
                opt.path_len = config.mc.path_len;
                opt.threads = config.threads;
                opt.underlay_with_noise = config.mc.underlay_with_noise;
                const SimEstimate est = simulate_paths(
                    sys, rate, theta, derive_seed(config.master_seed, row_id), opt);
                row.ec_mc = est.ec_hat;
                row.ec_mc_stderr = est.std_err;
            }

            block.rows.push_back(std::move(row));
            ++row_id;
        }

        if (sweep.variable == SweepVariable::rate && !block.rows.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < block.rows.size(); ++i)
                if (*block.rows[i].ec_analytic > *block.rows[best].ec_analytic)
                    best = i;
            for (auto& row : block.rows)
                row.r_star = block.rows[best].sweep_value;
        }

        blocks.push_back(std::move(block));
    }
    return blocks;
}

std::vector<OutputRow> flatten(const std::vector<SweepBlock>& blocks) {
    std::vector<OutputRow> rows;
    for (const auto& block : blocks)
        rows.insert(rows.end(), block.rows.begin(), block.rows.end());
    return rows;
}

void emit_csv(std::ostream& os, const std::vector<SweepBlock>& blocks, const EmitMeta& meta) {
    os << "# d2dec " << meta.version << "\n";
    os << "# config_hash = " << meta.config_hash << "\n";
    os << "# master_seed = " << meta.master_seed << "\n";
    os << csv_header << "\n";
    const bool theta_swept =
        !blocks.empty() && !blocks.front().rows.empty() &&
        blocks.front().rows.front().sweep_var == to_string(SweepVariable::theta);
    for (const auto& block : blocks) {
        // The pinned column set has no theta column; record it per block
        // (unless theta itself is the sweep value).
        if (!theta_swept)
            os << "# theta = " << fmt_double(block.theta) << "\n";
        for (const auto& row : block.rows) {
            os << row.sweep_var << ',' << fmt_double(row.sweep_value) << ','
               << to_string(row.kind) << ',' << fmt_optional(row.ec_analytic) << ','
               << fmt_optional(row.ec_mc) << ',' << fmt_optional(row.ec_mc_stderr) << ','
               << fmt_double(row.p1) << ',' << fmt_double(row.p2) << ',' << fmt_double(row.p3)
               << ',' << fmt_double(row.p4) << ',' << fmt_double(row.p_e1) << ','
               << fmt_double(row.p_e2) << ',' << fmt_double(row.kld) << ','
               << fmt_optional(row.r_star) << ',' << row.seed << "\n";
        }
    }
}

namespace {

nlohmann::ordered_json row_to_json(const OutputRow& row) {
    nlohmann::ordered_json j;
    j["sweep_var"] = row.sweep_var;
    j["sweep_value"] = row.sweep_value;
    j["scenario_kind"] = to_string(row.kind);
    j["theta"] = row.theta;
    const auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    j["ec_analytic"] = opt(row.ec_analytic);
    j["ec_mc"] = opt(row.ec_mc);
    j["ec_mc_stderr"] = opt(row.ec_mc_stderr);
    j["p1"] = row.p1;
    j["p2"] = row.p2;
    j["p3"] = row.p3;
    j["p4"] = row.p4;
    j["p_e1"] = row.p_e1;
    j["p_e2"] = row.p_e2;
    j["kld"] = row.kld;
    j["r_star"] = opt(row.r_star);
    j["seed"] = row.seed;
    return j;
}

} // namespace

void emit_json(std::ostream& os, const std::vector<SweepBlock>& blocks, const EmitMeta& meta) {
    nlohmann::ordered_json doc;
    doc["meta"] = {{"tool", "d2dec"},
                   {"version", meta.version},
                   {"config_hash", meta.config_hash},
                   {"master_seed", meta.master_seed}};
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& block : blocks)
        for (const auto& row : block.rows)
            doc["rows"].push_back(row_to_json(row));
    os << doc.dump(2) << "\n";
}

std::vector<OutputRow> rows_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    std::vector<OutputRow> rows;
    for (const auto& j : doc.at("rows")) {
        OutputRow row;
        row.sweep_var = j.at("sweep_var").get<std::string>();
        row.sweep_value = j.at("sweep_value").get<double>();
        row.kind = j.at("scenario_kind").get<std::string>() == "overlay"
                       ? ScenarioKind::overlay
                       : ScenarioKind::underlay;
        row.theta = j.at("theta").get<double>();
        const auto opt = [&](const char* key) -> std::optional<double> {
            const auto& v = j.at(key);
            if (v.is_null())
                return std::nullopt;
            return v.get<double>();
        };
        row.ec_analytic = opt("ec_analytic");
        row.ec_mc = opt("ec_mc");
        row.ec_mc_stderr = opt("ec_mc_stderr");
        row.p1 = j.at("p1").get<double>();
        row.p2 = j.at("p2").get<double>();
        row.p3 = j.at("p3").get<double>();
        row.p4 = j.at("p4").get<double>();
        row.p_e1 = j.at("p_e1").get<double>();
        row.p_e2 = j.at("p_e2").get<double>();
        // JSON has no inf literal; a null kld means the perfect-measurement
        // (sigma_t = 0) divergence.
        row.kld = j.at("kld").is_null() ? std::numeric_limits<double>::infinity()
                                        : j.at("kld").get<double>();
        row.r_star = opt("r_star");
        row.seed = j.at("seed").get<std::uint64_t>();
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace d2dec
