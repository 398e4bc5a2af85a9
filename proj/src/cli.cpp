#include "otfsma/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "otfsma/harness.hpp"

namespace otfsma {

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string long_out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool quiet = false;
};

void add_run_flags(CLI::App* cmd, Common& c, bool needs_config) {
    auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "CSV output path (default: stdout)");
    cmd->add_option("--long", c.long_out, "also write a long-format CSV for plotting");
    cmd->add_option("--seed", c.seed, "override the master seed");
    cmd->add_option("--threads", c.threads, "worker threads (default: OTFSMA_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--quiet", c.quiet, "no progress output");
}

std::string describe(const ResultRecord& r) {
    std::ostringstream os;
    os << r.curve;
    if (!std::isnan(r.snr_db)) os << " snr=" << r.snr_db << "dB";
    if (!std::isnan(r.pilot_snr_db)) os << " pilot=" << r.pilot_snr_db << "dB";
    if (!r.ok()) {
        os << " FAILED: " << r.failure;
    } else if (!std::isnan(r.ber)) {
        os << " frames=" << r.frames << " errors=" << r.bit_errors << " ber=" << r.ber;
    } else {
        os << " trials=" << r.frames << " nmse=" << r.nmse;
    }
    os << " (" << r.wall_time_s << " s)";
    return os.str();
}

int emit(const std::vector<ResultRecord>& records, const Common& c, const std::string& figure, std::ostream& out,
         std::ostream& err) {
    if (c.out.empty()) {
        write_csv(out, records);
    } else {
        std::ofstream f(c.out);
        if (!f) {
            err << "error: cannot write '" << c.out << "'\n";
            return 1;
        }
        write_csv(f, records);
    }
    if (!c.long_out.empty()) {
        std::ofstream f(c.long_out);
        if (!f) {
            err << "error: cannot write '" << c.long_out << "'\n";
            return 1;
        }
        write_long_csv(f, records, figure);
    }
    const auto failed = std::count_if(records.begin(), records.end(), [](const ResultRecord& r) { return !r.ok(); });
    if (failed > 0) {
        err << "error: " << failed << " point(s) could not be simulated\n";
        return 2;
    }
    return 0;
}

RunOptions options(const Common& c, std::ostream& err) {
    RunOptions o;
    o.threads = c.threads;
    if (!c.quiet) o.progress = [&err](const ResultRecord& r) { err << describe(r) << '\n'; };
    return o;
}

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = ExperimentConfig::load(c.config);
    if (c.seed) cfg.seed = *c.seed;
    cfg.validate();
    return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"OTFS multiple-access uplink simulator", "otfsma"};
    app.require_subcommand(1);

    Common c;
    auto* ber = app.add_subcommand("ber", "BER sweep over the configured SNR points");
    add_run_flags(ber, c, true);
    auto* mse = app.add_subcommand("mse", "channel-estimation NMSE sweep over pilot SNR");
    add_run_flags(mse, c, true);
    auto* compare = app.add_subcommand("compare", "OTFS-MA, SC-FDMA and OFDMA on one channel configuration");
    add_run_flags(compare, c, true);
    auto* validate = app.add_subcommand("validate", "check a config and report every problem");
    validate->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    validate->add_flag("--quiet", c.quiet, "no output on success");

    auto* figures = app.add_subcommand("figures", "canned figure configurations");
    add_run_flags(figures, c, false);
    std::string fig_name;
    std::string scale = "desk";
    bool list = false;
    figures->add_option("--name", fig_name, "figure to run (fig4 .. fig10)");
    figures->add_option("--scale", scale, "smoke, desk or full")->check(CLI::IsMember({"smoke", "desk", "full"}));
    figures->add_flag("--list", list, "list figure names");
    figures->add_flag("--dump-config", "print the figure's curve configs instead of running");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0) err << app.help();
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate) {
            const ExperimentConfig cfg = ExperimentConfig::load(c.config);
            const auto v = cfg.violations();
            if (!v.empty()) {
                err << "invalid configuration (" << v.size() << " problem" << (v.size() > 1 ? "s" : "") << "):\n";
                for (const auto& s : v) err << "  - " << s << '\n';
                return 1;
            }
            if (!c.quiet) out << "ok " << cfg.hash() << '\n';
            return 0;
        }
        if (*ber) {
            const auto cfg = load(c);
            return emit(run_ber_sweep(cfg, options(c, err)), c, cfg.name, out, err);
        }
        if (*mse) {
            const auto cfg = load(c);
            return emit(run_mse_sweep(cfg, options(c, err)), c, cfg.name, out, err);
        }
        if (*compare) {
            const auto cfg = load(c);
            return emit(run_compare(cfg, options(c, err)), c, cfg.name, out, err);
        }
        if (*figures) {
            if (list) {
                for (const auto& n : figure_names()) out << n << '\n';
                return 0;
            }
            if (fig_name.empty()) {
                err << "error: figures needs --name (or --list)\n";
                return 1;
            }
            FigureSpec fig = figure_spec(fig_name, scale_from_string(scale));
            for (auto& cfg : fig.curves) {
                if (c.seed) cfg.seed = *c.seed;
                cfg.validate();
            }
            if (figures->count("--dump-config") > 0) {
                for (const auto& cfg : fig.curves) out << cfg.to_json() << '\n';
                return 0;
            }
            return emit(run_figure(fig, options(c, err)), c, fig.name, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace otfsma
