#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwbeam/closed_form.hpp"
#include "hwbeam/codebook.hpp"
#include "hwbeam/monte_carlo.hpp"
#include "hwbeam/overhead.hpp"
#include "hwbeam/point_process.hpp"

namespace hwbeam {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what
                                      : "config: " + what) {}
};

enum class Deployment { DoubleSide, SingleTop, SingleBottom };

enum class SweepParameter { LambdaB, Beamwidth, Speed, W };
enum class SweepOutput { Bsn, Hon, Tcr, Sojourn };

struct SweepSpec {
    SweepParameter parameter = SweepParameter::LambdaB;
    std::vector<double> values;
    std::vector<SweepOutput> outputs{SweepOutput::Bsn, SweepOutput::Hon, SweepOutput::Tcr,
                                     SweepOutput::Sojourn};
};

/// Full scenario description. Defaults reproduce the standard evaluation
/// setup: 10 km four-lane divided highway, 9 m blockages at 0.1/km,
/// 5 ms bursts and 0.125 ms symbols.
struct ScenarioConfig {
    // highway geometry (meters)
    double l_h = 10000.0;
    int n_lanes = 4;
    double lane_width = 3.7;
    int vu_lane = 2;
    double bs_setback = 0.0;
    std::optional<double> w_top_override;
    std::optional<double> w_bottom_override;
    double antenna_height = 10.0;

    // densities (per meter internally; config files speak per km)
    double lambda_bs_top = 5e-3;
    double lambda_bs_bottom = 5e-3;
    double lambda_block_top = 1e-4;
    double lambda_block_bottom = 1e-4;
    double lambda_v = 1e-3;  // carried for completeness; unused by the event math
    double tau0 = 9.0;

    int n_c = 72;
    PathlossParams pathloss{1.3775e6, 2.0};

    // overhead (codebook_bs == 0 tracks n_c)
    int overhead_codebook_bs = 0;
    int overhead_codebook_vu = 12;
    double tau_ss = 5.0;
    double tau_sym = 0.125;
    int t_ss_period = 20;
    int t_csi_period = 20;
    int slot_symbols = 14;
    bool ssb_fractional = false;
    double speed = 30.0;

    // run control
    long realizations = 1000;
    std::uint64_t master_seed = 42;
    int threads = 0;
    SeriesControl series;

    // mode flags
    Deployment deployment = Deployment::DoubleSide;
    bool forward_only_handover = false;
    bool effective_height = false;

    std::optional<SweepSpec> sweep;

    // ---- derived views -----------------------------------------------------

    double w_top() const {
        double w = w_top_override ? *w_top_override
                                  : bs_setback + (vu_lane - 0.5) * lane_width;
        if (effective_height) w = LaneGeometry::effective_w(w, antenna_height);
        return w;
    }

    double w_bottom() const {
        double w = w_bottom_override ? *w_bottom_override
                                     : bs_setback + (2 * n_lanes - vu_lane + 0.5) * lane_width;
        if (effective_height) w = LaneGeometry::effective_w(w, antenna_height);
        return w;
    }

    LosModel los_model() const { return {tau0, lambda_block_top, lambda_block_bottom}; }

    double lambda_los_top() const { return lambda_bs_top * los_model().los_probability(Side::Top); }
    double lambda_los_bottom() const {
        return lambda_bs_bottom * los_model().los_probability(Side::Bottom);
    }

    Codebook codebook() const { return Codebook(n_c); }

    LaneGeometry lane_geometry() const {
        LaneGeometry g;
        g.w_top = w_top();
        g.w_bottom = w_bottom();
        g.lane_width = lane_width;
        g.n_lanes = n_lanes;
        return g;
    }

    OverheadConfig overhead_config() const {
        OverheadConfig o;
        o.codebook_bs = overhead_codebook_bs > 0 ? overhead_codebook_bs : n_c;
        o.codebook_vu = overhead_codebook_vu;
        o.tau_ss = tau_ss;
        o.tau_sym = tau_sym;
        o.speed = speed;
        o.t_ss_period = t_ss_period;
        o.t_csi_period = t_csi_period;
        o.slot_symbols = slot_symbols;
        o.ssb_fractional = ssb_fractional;
        return o;
    }

    SingleSideParams single_params() const {
        if (deployment == Deployment::SingleBottom)
            return {lambda_los_bottom(), w_bottom(), codebook(), l_h};
        return {lambda_los_top(), w_top(), codebook(), l_h};
    }

    DoubleSideParams double_params() const {
        return {lambda_los_top(), lambda_los_bottom(), w_top(), w_bottom(), codebook(), l_h};
    }

    EnsembleConfig ensemble_config() const {
        EnsembleConfig e;
        e.l_h = l_h;
        e.lambda_bs_top = deployment == Deployment::SingleBottom ? 0.0 : lambda_bs_top;
        e.lambda_bs_bottom = deployment == Deployment::SingleTop ? 0.0 : lambda_bs_bottom;
        e.los = los_model();
        e.geometry = lane_geometry();
        e.n_c = n_c;
        e.speed = speed;
        e.forward_only = forward_only_handover;
        e.threads = threads;
        return e;
    }

    void validate() const {
        if (!(l_h > 0.0)) throw ConfigError(0, "highway.length_km must be > 0");
        if (n_lanes < 1) throw ConfigError(0, "highway.lanes must be >= 1");
        if (vu_lane < 1 || vu_lane > n_lanes) throw ConfigError(0, "highway.vu_lane out of range");
        if (!(lane_width > 0.0)) throw ConfigError(0, "highway.lane_width_m must be > 0");
        if (!(w_top() > 0.0) || !(w_bottom() > 0.0))
            throw ConfigError(0, "lateral distances must be > 0");
        if (deployment == Deployment::DoubleSide && !(w_top() < w_bottom()))
            throw ConfigError(0, "double-side mode requires w_top < w_bottom (vehicle on the top side)");
        if (!(lambda_bs_top >= 0.0) || !(lambda_bs_bottom >= 0.0))
            throw ConfigError(0, "site densities must be >= 0");
        if (deployment != Deployment::SingleBottom && !(lambda_bs_top > 0.0))
            throw ConfigError(0, "top-side site density must be > 0 in this mode");
        if (deployment != Deployment::SingleTop && !(lambda_bs_bottom > 0.0))
            throw ConfigError(0, "bottom-side site density must be > 0 in this mode");
        if (!(tau0 >= 0.0)) throw ConfigError(0, "densities.tau0_m must be >= 0");
        if (!(lambda_block_top >= 0.0) || !(lambda_block_bottom >= 0.0))
            throw ConfigError(0, "blockage densities must be >= 0");
        if (n_c < 4 || n_c % 4 != 0) throw ConfigError(0, "codebook.n_c must be a multiple of 4");
        if (realizations < 1) throw ConfigError(0, "run.realizations must be >= 1");
        try {
            pathloss.validate();
            series.validate();
            overhead_config().validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(0, e.what());
        }
        if (sweep) {
            if (sweep->values.empty()) throw ConfigError(0, "sweep.values must be nonempty");
            bool inc = true, dec = true;
            for (std::size_t i = 1; i < sweep->values.size(); ++i) {
                inc = inc && sweep->values[i] > sweep->values[i - 1];
                dec = dec && sweep->values[i] < sweep->values[i - 1];
            }
            if (!inc && !dec) throw ConfigError(0, "sweep.values must be strictly monotone");
            if (sweep->parameter == SweepParameter::Beamwidth) {
                for (double deg : sweep->values) {
                    const double nc = 360.0 / deg;
                    if (!(deg > 0.0) || std::abs(nc - std::round(nc)) > 1e-9 ||
                        static_cast<int>(std::round(nc)) % 4 != 0)
                        throw ConfigError(0, "sweep beamwidth values must map to a codebook size that is a multiple of 4");
                }
            }
            if (sweep->outputs.empty()) throw ConfigError(0, "sweep.outputs must be nonempty");
        }
    }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(d)) throw std::invalid_argument("not finite");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a number, got '" + v + "'");
    }
}

inline long parse_long(const std::string& v, int line) {
    const double d = parse_double(v, line);
    if (d != std::floor(d)) throw ConfigError(line, "expected an integer, got '" + v + "'");
    return static_cast<long>(d);
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(line, "expected true/false, got '" + v + "'");
}

inline std::vector<double> parse_double_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, line));
    }
    if (out.empty()) throw ConfigError(line, "expected a comma-separated list of numbers");
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

}  // namespace detail

/// Parse the plain-text key/value scenario format. Unknown keys and invalid
/// values are rejected with the offending line number.
inline ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    bool saw_sweep = false;
    SweepSpec sweep;

    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(line, "expected 'key = value'");

        using detail::parse_bool;
        using detail::parse_double;
        using detail::parse_long;

        if (key == "highway.length_km") {
            cfg.l_h = parse_double(value, line) * 1000.0;
        } else if (key == "highway.lanes") {
            cfg.n_lanes = static_cast<int>(parse_long(value, line));
        } else if (key == "highway.lane_width_m") {
            cfg.lane_width = parse_double(value, line);
        } else if (key == "highway.vu_lane") {
            cfg.vu_lane = static_cast<int>(parse_long(value, line));
        } else if (key == "highway.bs_setback_m") {
            cfg.bs_setback = parse_double(value, line);
        } else if (key == "highway.w_top_m") {
            cfg.w_top_override = parse_double(value, line);
        } else if (key == "highway.w_bottom_m") {
            cfg.w_bottom_override = parse_double(value, line);
        } else if (key == "highway.antenna_height_m") {
            cfg.antenna_height = parse_double(value, line);
        } else if (key == "densities.lambda_b_per_km") {
            cfg.lambda_bs_top = cfg.lambda_bs_bottom = parse_double(value, line) / 1000.0;
        } else if (key == "densities.lambda_b_top_per_km") {
            cfg.lambda_bs_top = parse_double(value, line) / 1000.0;
        } else if (key == "densities.lambda_b_bottom_per_km") {
            cfg.lambda_bs_bottom = parse_double(value, line) / 1000.0;
        } else if (key == "densities.lambda_block_top_per_km") {
            cfg.lambda_block_top = parse_double(value, line) / 1000.0;
        } else if (key == "densities.lambda_block_bottom_per_km") {
            cfg.lambda_block_bottom = parse_double(value, line) / 1000.0;
        } else if (key == "densities.lambda_v_per_km") {
            cfg.lambda_v = parse_double(value, line) / 1000.0;
        } else if (key == "densities.tau0_m") {
            cfg.tau0 = parse_double(value, line);
        } else if (key == "codebook.n_c") {
            const long nc = parse_long(value, line);
            if (nc < 4 || nc % 4 != 0)
                throw ConfigError(line, "codebook.n_c must be a multiple of 4 and >= 4");
            cfg.n_c = static_cast<int>(nc);
        } else if (key == "pathloss.alpha") {
            cfg.pathloss.alpha = parse_double(value, line);
        } else if (key == "pathloss.c_gain") {
            cfg.pathloss.c_gain = parse_double(value, line);
        } else if (key == "overhead.codebook_bs") {
            if (value == "auto")
                cfg.overhead_codebook_bs = 0;
            else
                cfg.overhead_codebook_bs = static_cast<int>(parse_long(value, line));
        } else if (key == "overhead.codebook_vu") {
            cfg.overhead_codebook_vu = static_cast<int>(parse_long(value, line));
        } else if (key == "overhead.tau_ss_ms") {
            cfg.tau_ss = parse_double(value, line);
        } else if (key == "overhead.tau_sym_ms") {
            cfg.tau_sym = parse_double(value, line);
        } else if (key == "overhead.t_ss_period_ms") {
            cfg.t_ss_period = static_cast<int>(parse_long(value, line));
        } else if (key == "overhead.t_csi_period_slots") {
            cfg.t_csi_period = static_cast<int>(parse_long(value, line));
        } else if (key == "overhead.slot_symbols") {
            cfg.slot_symbols = static_cast<int>(parse_long(value, line));
        } else if (key == "overhead.ssb_fractional") {
            cfg.ssb_fractional = parse_bool(value, line);
        } else if (key == "overhead.speed_mps") {
            cfg.speed = parse_double(value, line);
        } else if (key == "run.realizations") {
            cfg.realizations = parse_long(value, line);
        } else if (key == "run.master_seed") {
            cfg.master_seed = static_cast<std::uint64_t>(parse_long(value, line));
        } else if (key == "run.threads") {
            cfg.threads = static_cast<int>(parse_long(value, line));
        } else if (key == "run.series_rel_tol") {
            cfg.series.rel_tol = parse_double(value, line);
        } else if (key == "run.series_n_max") {
            cfg.series.n_max = static_cast<int>(parse_long(value, line));
        } else if (key == "mode.deployment") {
            if (value == "double")
                cfg.deployment = Deployment::DoubleSide;
            else if (value == "single_top")
                cfg.deployment = Deployment::SingleTop;
            else if (value == "single_bottom")
                cfg.deployment = Deployment::SingleBottom;
            else
                throw ConfigError(line, "mode.deployment must be double, single_top or single_bottom");
        } else if (key == "mode.forward_only_handover") {
            cfg.forward_only_handover = parse_bool(value, line);
        } else if (key == "mode.effective_height") {
            cfg.effective_height = parse_bool(value, line);
        } else if (key == "sweep.parameter") {
            saw_sweep = true;
            if (value == "lambda_b")
                sweep.parameter = SweepParameter::LambdaB;
            else if (value == "beamwidth")
                sweep.parameter = SweepParameter::Beamwidth;
            else if (value == "speed")
                sweep.parameter = SweepParameter::Speed;
            else if (value == "w")
                sweep.parameter = SweepParameter::W;
            else
                throw ConfigError(line, "sweep.parameter must be lambda_b, beamwidth, speed or w");
        } else if (key == "sweep.values") {
            saw_sweep = true;
            sweep.values = detail::parse_double_list(value, line);
        } else if (key == "sweep.outputs") {
            saw_sweep = true;
            sweep.outputs.clear();
            std::stringstream os(value);
            std::string item;
            while (std::getline(os, item, ',')) {
                item = detail::trim(item);
                if (item == "bsn")
                    sweep.outputs.push_back(SweepOutput::Bsn);
                else if (item == "hon")
                    sweep.outputs.push_back(SweepOutput::Hon);
                else if (item == "tcr")
                    sweep.outputs.push_back(SweepOutput::Tcr);
                else if (item == "sojourn")
                    sweep.outputs.push_back(SweepOutput::Sojourn);
                else if (!item.empty())
                    throw ConfigError(line, "sweep.outputs entries must be bsn, hon, tcr or sojourn");
            }
        } else {
            throw ConfigError(line, "unknown key '" + key + "'");
        }
    }

    if (saw_sweep) cfg.sweep = sweep;
    cfg.validate();
    return cfg;
}

inline ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Canonical serialization: parse(serialize(cfg)) reproduces cfg, and
/// serialize is a fixed point over parse.
inline std::string serialize_config(const ScenarioConfig& cfg) {
    using detail::format_double;
    std::ostringstream out;
    out << "# hwbeam scenario\n";
    out << "highway.length_km = " << format_double(cfg.l_h / 1000.0) << "\n";
    out << "highway.lanes = " << cfg.n_lanes << "\n";
    out << "highway.lane_width_m = " << format_double(cfg.lane_width) << "\n";
    out << "highway.vu_lane = " << cfg.vu_lane << "\n";
    out << "highway.bs_setback_m = " << format_double(cfg.bs_setback) << "\n";
    if (cfg.w_top_override) out << "highway.w_top_m = " << format_double(*cfg.w_top_override) << "\n";
    if (cfg.w_bottom_override)
        out << "highway.w_bottom_m = " << format_double(*cfg.w_bottom_override) << "\n";
    out << "highway.antenna_height_m = " << format_double(cfg.antenna_height) << "\n";
    out << "densities.lambda_b_top_per_km = " << format_double(cfg.lambda_bs_top * 1000.0) << "\n";
    out << "densities.lambda_b_bottom_per_km = " << format_double(cfg.lambda_bs_bottom * 1000.0)
        << "\n";
    out << "densities.lambda_block_top_per_km = " << format_double(cfg.lambda_block_top * 1000.0)
        << "\n";
    out << "densities.lambda_block_bottom_per_km = "
        << format_double(cfg.lambda_block_bottom * 1000.0) << "\n";
    out << "densities.lambda_v_per_km = " << format_double(cfg.lambda_v * 1000.0) << "\n";
    out << "densities.tau0_m = " << format_double(cfg.tau0) << "\n";
    out << "codebook.n_c = " << cfg.n_c << "\n";
    out << "pathloss.alpha = " << format_double(cfg.pathloss.alpha) << "\n";
    out << "pathloss.c_gain = " << format_double(cfg.pathloss.c_gain) << "\n";
    out << "overhead.codebook_bs = "
        << (cfg.overhead_codebook_bs > 0 ? std::to_string(cfg.overhead_codebook_bs)
                                         : std::string("auto"))
        << "\n";
    out << "overhead.codebook_vu = " << cfg.overhead_codebook_vu << "\n";
    out << "overhead.tau_ss_ms = " << format_double(cfg.tau_ss) << "\n";
    out << "overhead.tau_sym_ms = " << format_double(cfg.tau_sym) << "\n";
    out << "overhead.t_ss_period_ms = " << cfg.t_ss_period << "\n";
    out << "overhead.t_csi_period_slots = " << cfg.t_csi_period << "\n";
    out << "overhead.slot_symbols = " << cfg.slot_symbols << "\n";
    out << "overhead.ssb_fractional = " << (cfg.ssb_fractional ? "true" : "false") << "\n";
    out << "overhead.speed_mps = " << format_double(cfg.speed) << "\n";
    out << "run.realizations = " << cfg.realizations << "\n";
    out << "run.master_seed = " << cfg.master_seed << "\n";
    out << "run.threads = " << cfg.threads << "\n";
    out << "run.series_rel_tol = " << format_double(cfg.series.rel_tol) << "\n";
    out << "run.series_n_max = " << cfg.series.n_max << "\n";
    out << "mode.deployment = "
        << (cfg.deployment == Deployment::DoubleSide
                ? "double"
                : cfg.deployment == Deployment::SingleTop ? "single_top" : "single_bottom")
        << "\n";
    out << "mode.forward_only_handover = " << (cfg.forward_only_handover ? "true" : "false") << "\n";
    out << "mode.effective_height = " << (cfg.effective_height ? "true" : "false") << "\n";
    if (cfg.sweep) {
        out << "sweep.parameter = ";
        switch (cfg.sweep->parameter) {
            case SweepParameter::LambdaB: out << "lambda_b"; break;
            case SweepParameter::Beamwidth: out << "beamwidth"; break;
            case SweepParameter::Speed: out << "speed"; break;
            case SweepParameter::W: out << "w"; break;
        }
        out << "\n";
        out << "sweep.values = ";
        for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
            if (i) out << ",";
            out << format_double(cfg.sweep->values[i]);
        }
        out << "\n";
        out << "sweep.outputs = ";
        for (std::size_t i = 0; i < cfg.sweep->outputs.size(); ++i) {
            if (i) out << ",";
            switch (cfg.sweep->outputs[i]) {
                case SweepOutput::Bsn: out << "bsn"; break;
                case SweepOutput::Hon: out << "hon"; break;
                case SweepOutput::Tcr: out << "tcr"; break;
                case SweepOutput::Sojourn: out << "sojourn"; break;
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace hwbeam
