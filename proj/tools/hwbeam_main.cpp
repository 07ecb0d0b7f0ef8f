// hwbeam: beam management analysis and simulation for mmWave highway
// deployments. Subcommands: analyze | simulate | compare | sweep.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hwbeam/cli.hpp"
#include "hwbeam/config.hpp"

namespace {

void write_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
    f << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmWave highway beam management: closed-form analysis and Monte-Carlo simulation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format;  // default: json for reports, csv for sweeps
    std::string event_log_path;
    long event_log_max = 10;
    long realizations_override = -1;
    long long seed_override = -1;
    bool quiet = false;

    const auto add_common = [&](CLI::App* cmd, bool with_format) {
        cmd->add_option("--config", config_path, "scenario config file")->required();
        cmd->add_option("--out", out_path, "output path (default: stdout)");
        cmd->add_option("--seed", seed_override, "override run.master_seed");
        cmd->add_option("--realizations", realizations_override, "override run.realizations");
        cmd->add_flag("--quiet", quiet, "suppress progress output");
        if (with_format)
            cmd->add_option("--format", format, "output format")
                ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* analyze = app.add_subcommand("analyze", "closed-form results");
    add_common(analyze, true);
    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo ensemble");
    add_common(simulate, true);
    simulate->add_option("--event-log", event_log_path, "write per-realization event CSV here");
    simulate->add_option("--event-log-max", event_log_max,
                         "realizations to include in the event log");
    CLI::App* compare = app.add_subcommand("compare", "analysis vs simulation");
    add_common(compare, true);
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
    add_common(sweep, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        hwbeam::ScenarioConfig cfg = hwbeam::parse_config(config_path);
        if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
        if (realizations_override > 0) cfg.realizations = realizations_override;
        std::ostream* progress = quiet ? nullptr : &std::cerr;
        if (format.empty()) format = *sweep ? "csv" : "json";
        const auto emit_report = [&](const hwbeam::json& report) {
            write_output(format == "csv" ? hwbeam::report_to_csv(report) : report.dump(2),
                         out_path);
        };

        if (*analyze) {
            emit_report(hwbeam::cmd_analyze(cfg));
        } else if (*simulate) {
            emit_report(hwbeam::cmd_simulate(cfg, progress));
            if (!event_log_path.empty()) {
                std::ofstream f(event_log_path);
                if (!f) throw std::runtime_error("cannot open event log '" + event_log_path + "'");
                f << hwbeam::event_log_csv(cfg, event_log_max);
            }
        } else if (*compare) {
            const hwbeam::CompareOutcome outcome = hwbeam::cmd_compare(cfg, progress);
            emit_report(outcome.report);
            return outcome.exit_code;
        } else if (*sweep) {
            const std::string csv = hwbeam::cmd_sweep(cfg, progress);
            write_output(format == "json" ? hwbeam::sweep_csv_to_json(csv).dump(2) : csv,
                         out_path);
        }
        return 0;
    } catch (const hwbeam::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
