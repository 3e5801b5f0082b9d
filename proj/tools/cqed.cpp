#include "CLI11.hpp"

#include "cqed/analysis.hpp"
#include "cqed/config.hpp"
#include "cqed/errors.hpp"
#include "cqed/protocol.hpp"

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

namespace {

// exit contract: 0 success, 1 fidelity below threshold, 2 configuration
// error, 3 hard physics or runtime failure
constexpr int exit_fidelity = 1;
constexpr int exit_config = 2;
constexpr int exit_physics = 3;

// --config wins; otherwise the config-dir environment variable supplies the
// directory holding cqed.json; otherwise the working directory
std::string effective_config_path(const std::string& given) {
    if (!given.empty()) return given;
    if (const char* dir = std::getenv("CQED_CONFIG_DIR"); dir != nullptr && *dir != '\0')
        return std::string(dir) + "/cqed.json";
    return "cqed.json";
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        cqed::config::atomic_write(out_path, text);
}

int cmd_protocol(const std::string& config_path, const std::string& out_path, int n_atoms,
                 const std::string& command) {
    const auto rc = cqed::config::load_config(config_path);
    const auto cfg = cqed::config::resolve_protocol(rc, n_atoms);
    const auto table = cqed::protocol::complete_set_table(cfg);
    const auto report = cqed::config::protocol_report(cfg, table, command);
    emit(report.dump(2) + "\n", out_path);
    return report.at("fidelities_ok").get<bool>() ? 0 : exit_fidelity;
}

int cmd_verify(const std::string& config_path, const std::string& out_path) {
    const auto rc = cqed::config::load_config(config_path);
    const auto result = cqed::config::run_verify(rc);
    emit(cqed::config::verify_report(rc, result).dump(2) + "\n", out_path);
    return result.pass ? 0 : exit_fidelity;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path,
              const std::string& kind) {
    const auto rc = cqed::config::load_config(config_path);
    cqed::analysis::SweepTable table;
    if (kind == "success") {
        table = cqed::analysis::sweep_success(rc.optical.front(), rc.sweep.gamma, rc.sweep.kappa);
    } else {
        // both atom counts share the drive solved for the three-atom plan
        const auto cfg = cqed::config::resolve_protocol(rc, 3);
        cqed::analysis::StaggerSpec base;
        base.t0 = cfg.plan.t0;
        base.G = cfg.plan.G_required;
        base.lambda =
            cqed::microwave::effective_couplings(cfg.microwave.g, cfg.microwave.delta).lambda;
        table = cqed::analysis::sweep_stagger(base, rc.sweep.dt_over_t0);
    }
    // flags have no column in the table format; summarize them on stderr
    std::size_t flagged = 0;
    std::set<std::string> kinds;
    for (const auto& row : table.rows)
        if (!row.flags.empty()) {
            ++flagged;
            kinds.insert(row.flags.begin(), row.flags.end());
        }
    if (flagged > 0) {
        std::cerr << "note: " << flagged << " of " << table.rows.size() << " rows flagged:";
        for (const auto& kind : kinds) std::cerr << " " << kind;
        std::cerr << "\n";
    }
    emit(cqed::analysis::to_csv(table), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic two-stage cavity protocol runs, verification and sweeps"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_path;
    bool seedless = false;
    app.add_option("--config", config_path, "configuration file (JSON)");
    app.add_option("--out", out_path, "output file, written atomically; stdout when omitted");
    app.add_flag("--seedless", seedless,
                 "reserved: every run is already deterministic, no RNG in scope");

    CLI::App* bell =
        app.add_subcommand("bell", "two-atom run: outcome table with paired-state fidelities");
    CLI::App* ghz = app.add_subcommand("ghz", "N-atom run: table of all 2^N outcomes");
    int n_atoms = 0;
    ghz->add_option("--n", n_atoms, "atom count (2 to 4)")->required();
    CLI::App* verify =
        app.add_subcommand("verify", "effective-model ladder and photon-number independence");
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep table (CSV)");
    std::string kind;
    sweep->add_option("--kind", kind, "success or stagger")
        ->required()
        ->check(CLI::IsMember({"success", "stagger"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        const std::string path = effective_config_path(config_path);
        if (bell->parsed()) return cmd_protocol(path, out_path, 2, "bell");
        if (ghz->parsed()) return cmd_protocol(path, out_path, n_atoms, "ghz");
        if (verify->parsed()) return cmd_verify(path, out_path);
        return cmd_sweep(path, out_path, kind);
    } catch (const cqed::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const cqed::PhysicsError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return exit_physics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_physics;
    }
}
