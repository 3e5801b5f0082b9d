#include "cqed/config.hpp"

#include "cqed/errors.hpp"
#include "cqed/units.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqed::config {

namespace {

// all conditional photon states must sit at least this close to an exact
// paired superposition for a protocol run to count as successful
constexpr double fidelity_gate = 1.0 - 1e-6;

std::string join_path(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& obj, const std::string& parent,
                    const std::vector<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError(join_path(parent, item.key()), "unknown key");
    }
}

double get_number(const json& obj, const std::string& parent, const std::string& key) {
    const std::string path = join_path(parent, key);
    if (!obj.contains(key)) throw ConfigError(path, "required key missing");
    if (!obj.at(key).is_number()) throw ConfigError(path, "expected a number");
    return obj.at(key).get<double>();
}

double get_number_or(const json& obj, const std::string& parent, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    const std::string path = join_path(parent, key);
    if (!obj.at(key).is_number()) throw ConfigError(path, "expected a number");
    return obj.at(key).get<double>();
}

int get_integer_or(const json& obj, const std::string& parent, const std::string& key,
                   int fallback) {
    if (!obj.contains(key)) return fallback;
    const std::string path = join_path(parent, key);
    if (!obj.at(key).is_number_integer()) throw ConfigError(path, "expected an integer");
    return obj.at(key).get<int>();
}

std::vector<double> get_grid_or(const json& obj, const std::string& parent,
                                const std::string& key, std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    const std::string path = join_path(parent, key);
    if (!obj.at(key).is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    int i = 0;
    for (const auto& v : obj.at(key)) {
        if (!v.is_number())
            throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v.get<double>());
        ++i;
    }
    if (out.empty()) throw ConfigError(path, "grid must not be empty");
    return out;
}

optical::OpticalCavityParams parse_cavity(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"h_r_mhz", "h_l_mhz", "gamma_mhz", "kappa_mhz"});
    optical::OpticalCavityParams p;
    p.h_r = mhz_to_rad_us(get_number(j, path, "h_r_mhz"));
    p.h_l = mhz_to_rad_us(get_number(j, path, "h_l_mhz"));
    p.gamma = mhz_to_rad_us(get_number(j, path, "gamma_mhz"));
    p.kappa = mhz_to_rad_us(get_number(j, path, "kappa_mhz"));
    try {
        optical::validate(p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return p;
}

std::vector<double> arithmetic_grid(double step, int count) {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = step * i;
    return out;
}

json complex_pair(const cxd& z) { return json::array({z.real(), z.imag()}); }

json amplitude_list(const Vec& amps) {
    json out = json::array();
    for (Eigen::Index i = 0; i < amps.size(); ++i) out.push_back(complex_pair(amps(i)));
    return out;
}

json microwave_json(const microwave::MicrowaveParams& p) {
    return {{"g_rad_us", p.g},
            {"G_rad_us", p.G},
            {"delta_rad_us", p.delta},
            {"omega0_rad_us", p.omega0},
            {"omega_c_rad_us", p.omega_c},
            {"omega_rad_us", p.omega},
            {"fock_cutoff", p.fock_cutoff},
            {"n_atoms", p.n_atoms}};
}

json optical_json(const std::vector<optical::OpticalCavityParams>& cavities) {
    json out = json::array();
    for (const auto& c : cavities)
        out.push_back({{"h_r_rad_us", c.h_r},
                       {"h_l_rad_us", c.h_l},
                       {"gamma_rad_us", c.gamma},
                       {"kappa_rad_us", c.kappa}});
    return out;
}

json plan_json(const microwave::TimingPlan& plan) {
    return {{"t0_us", plan.t0},
            {"n_branch", plan.n_branch},
            {"G_required_rad_us", plan.G_required},
            {"parity", plan.parity == microwave::Parity::odd ? "odd" : "even"}};
}

StateVector all_ground(int n_atoms) {
    return basis_state(microwave::atom_space(n_atoms), std::vector<int>(n_atoms, 0));
}

bool nondecreasing(const std::vector<LadderPoint>& pts) {
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].fidelity < pts[i - 1].fidelity - 1e-12) return false;
    return true;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("not valid JSON: ") + e.what());
    }
    require_object(root, "");
    reject_unknown(root, "", {"optical", "microwave", "plan", "sweep"});

    RunConfig rc;

    if (!root.contains("optical")) throw ConfigError("optical", "required key missing");
    const json& opt = root.at("optical");
    if (!opt.is_array() || opt.empty())
        throw ConfigError("optical", "expected a non-empty array of cavity objects");
    for (std::size_t i = 0; i < opt.size(); ++i)
        rc.optical.push_back(parse_cavity(opt[i], "optical[" + std::to_string(i) + "]"));

    if (!root.contains("microwave")) throw ConfigError("microwave", "required key missing");
    const json& mw = root.at("microwave");
    require_object(mw, "microwave");
    reject_unknown(mw, "microwave", {"g_mhz", "delta_mhz", "omega0_mhz", "fock_cutoff"});
    rc.microwave.g = mhz_to_rad_us(get_number(mw, "microwave", "g_mhz"));
    rc.microwave.delta = mhz_to_rad_us(get_number(mw, "microwave", "delta_mhz"));
    rc.microwave.omega0 = mhz_to_rad_us(get_number_or(mw, "microwave", "omega0_mhz", 6500.0));
    rc.microwave.fock_cutoff = get_integer_or(mw, "microwave", "fock_cutoff", 8);
    if (rc.microwave.g < 0) throw ConfigError("microwave.g_mhz", "must be non-negative");
    if (rc.microwave.fock_cutoff < 1)
        throw ConfigError("microwave.fock_cutoff", "must be at least 1");
    // the drive is resonant with the atoms; the cavity sits below by delta
    rc.microwave.omega = rc.microwave.omega0;
    rc.microwave.omega_c = rc.microwave.omega0 - rc.microwave.delta;

    if (root.contains("plan")) {
        const json& plan = root.at("plan");
        require_object(plan, "plan");
        reject_unknown(plan, "plan", {"min_g_multiple"});
        rc.min_g_multiple = get_number_or(plan, "plan", "min_g_multiple", 10.0);
        if (rc.min_g_multiple <= 0) throw ConfigError("plan.min_g_multiple", "must be positive");
    }

    SweepGrids grids;
    std::vector<double> gamma_mhz = arithmetic_grid(0.65, 10);
    std::vector<double> kappa_mhz = arithmetic_grid(1.025, 10);
    grids.dt_over_t0 = arithmetic_grid(0.002, 26);
    if (root.contains("sweep")) {
        const json& sw = root.at("sweep");
        require_object(sw, "sweep");
        reject_unknown(sw, "sweep", {"gamma_mhz", "kappa_mhz", "dt_over_t0"});
        gamma_mhz = get_grid_or(sw, "sweep", "gamma_mhz", gamma_mhz);
        kappa_mhz = get_grid_or(sw, "sweep", "kappa_mhz", kappa_mhz);
        grids.dt_over_t0 = get_grid_or(sw, "sweep", "dt_over_t0", grids.dt_over_t0);
    }
    for (double v : gamma_mhz) grids.gamma.push_back(mhz_to_rad_us(v));
    for (double v : kappa_mhz) grids.kappa.push_back(mhz_to_rad_us(v));
    rc.sweep = std::move(grids);
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

protocol::ProtocolConfig resolve_protocol(const RunConfig& rc, int n_atoms) {
    if (n_atoms < 2 || n_atoms > 4)
        throw ConfigError("n", "atom count must be between 2 and 4 (dense-simulation budget)");
    protocol::ProtocolConfig cfg;
    cfg.n_atoms = n_atoms;
    if (rc.optical.size() == 1)
        cfg.optical.assign(n_atoms, rc.optical.front());
    else if (static_cast<int>(rc.optical.size()) == n_atoms)
        cfg.optical = rc.optical;
    else
        throw ConfigError("optical", "expected 1 cavity entry or exactly " +
                                         std::to_string(n_atoms) + ", got " +
                                         std::to_string(rc.optical.size()));
    cfg.microwave = rc.microwave;
    cfg.microwave.n_atoms = n_atoms;
    const auto eff = microwave::effective_couplings(cfg.microwave.g, cfg.microwave.delta);
    const double min_G = rc.min_g_multiple * std::max(cfg.microwave.delta, cfg.microwave.g);
    cfg.plan = microwave::make_timing_plan(eff.lambda, n_atoms, min_G);
    cfg.microwave.G = cfg.plan.G_required;
    return cfg;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("", "cannot open output file for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ConfigError("", "failed writing output file: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw ConfigError("", "failed to move output into place: " + target.string() + ": " +
                                  ec.message());
    }
}

json protocol_report(const protocol::ProtocolConfig& cfg,
                     const protocol::CompleteSetReport& rep, const std::string& command) {
    json out;
    out["command"] = command;
    out["n_atoms"] = cfg.n_atoms;
    out["parameters"] = {{"optical", optical_json(cfg.optical)},
                         {"microwave", microwave_json(cfg.microwave)}};
    out["timing_plan"] = plan_json(cfg.plan);
    out["warnings"] = rep.warnings;
    out["total_success_prob"] = rep.total_success_prob;
    out["fidelity_threshold"] = fidelity_gate;

    bool ok = true;
    json rows = json::array();
    for (const auto& row : rep.rows) {
        const bool reachable = row.probability > 1e-12;
        if (reachable && row.fidelity < fidelity_gate) ok = false;
        rows.push_back({{"pattern", row.pattern},
                        {"probability", row.probability},
                        {"label", row.label},
                        {"phase", complex_pair(row.phase)},
                        {"fidelity", row.fidelity},
                        {"reduced_deviation", row.reduced_deviation},
                        {"entangled", row.entangled},
                        {"amplitudes", amplitude_list(row.photon_state.amps)}});
    }
    out["outcomes"] = std::move(rows);
    out["max_reduced_deviation"] = rep.max_reduced_deviation;
    out["max_gram_offdiag"] = rep.max_gram_offdiag;
    out["complete"] = rep.complete;
    out["fidelities_ok"] = ok;
    return out;
}

VerifyResult run_verify(const RunConfig& rc) {
    const microwave::MicrowaveParams& mw = rc.microwave;
    if (mw.fock_cutoff < 4)
        throw ConfigError("microwave.fock_cutoff",
                          "verification evolves initial Fock levels up to 2 and needs "
                          "fock_cutoff >= 4");

    VerifyResult vr;
    vr.delta_over_g =
        mw.g > 0 ? mw.delta / mw.g : std::numeric_limits<double>::quiet_NaN();

    const std::vector<double> rungs{10.0, 30.0, 50.0, 100.0};
    for (int n : {2, 3}) {
        VerifyChain chain;
        chain.n_atoms = n;
        const StateVector ground = all_ground(n);
        for (double r : rungs) {
            microwave::MicrowaveParams p = mw;
            p.n_atoms = n;
            p.G = r * mw.g;
            chain.ladder.push_back({r, microwave::effective_model_fidelity(p, ground, 0)});
        }
        if (mw.g > 0) {
            const auto eff = microwave::effective_couplings(mw.g, mw.delta);
            chain.plan = microwave::make_timing_plan(
                eff.lambda, n, rc.min_g_multiple * std::max(mw.delta, mw.g));
            microwave::MicrowaveParams p = mw;
            p.n_atoms = n;
            p.G = chain.plan.G_required;
            chain.plan_point = {chain.plan.G_required / mw.g,
                                microwave::effective_model_fidelity(p, ground, 0)};
        } else {
            chain.plan_point = {0.0, 1.0};  // degenerate limit: both pictures coincide
        }
        chain.monotone = nondecreasing(chain.ladder);
        chain.plan_ok = chain.plan_point.fidelity >= vr.fidelity_floor;
        vr.chains.push_back(std::move(chain));
    }

    // photon-number independence of the reduced two-atom evolution
    microwave::MicrowaveParams p2 = mw;
    p2.n_atoms = 2;
    const StateVector ground2 = all_ground(2);
    std::vector<Mat> reduced;
    for (int n : {0, 1, 2}) {
        const auto rep = microwave::dispersive_validity(p2, ground2, n);
        vr.fock_checks.push_back({n, rep.fidelity, rep.leakage});
        reduced.push_back(rep.reduced_atoms);
    }
    bool pairwise_ok = true;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double f = fidelity_mixed(reduced[i], reduced[j]);
            const bool ok = f >= vr.fidelity_floor;
            pairwise_ok = pairwise_ok && ok;
            vr.pairwise.push_back({i, j, f, ok});
        }

    // under the photon-number-independent effective generator the reduced
    // evolutions must agree to machine precision, degenerate-eigenspace
    // roundoff included
    if (mw.g > 0) {
        const auto eff = microwave::effective_couplings(mw.g, mw.delta);
        const double t0 = pi / (4.0 * eff.lambda);
        const auto plan = microwave::make_timing_plan(
            eff.lambda, 2, rc.min_g_multiple * std::max(mw.delta, mw.g));
        Mat sx = microwave::collective_sx(2);
        Mat heff =
            microwave::drive_phase_sign * 2.0 * plan.G_required * sx + 2.0 * eff.lambda * sx * sx;
        HilbertSpace fock_space({{"fock", mw.fock_cutoff + 1}});
        OperatorMatrix lifted = tensor(OperatorMatrix{microwave::atom_space(2), heff},
                                       identity_op(fock_space));
        Mat u = propagator_hermitian(lifted.m, t0);
        std::vector<Mat> exact;
        for (int n : {0, 1, 2}) {
            Vec fock = Vec::Zero(mw.fock_cutoff + 1);
            fock(n) = 1.0;
            StateVector joint = tensor(ground2, StateVector{fock_space, fock});
            StateVector evolved{lifted.space, u * joint.amps};
            exact.push_back(reduced_state(evolved, {"atom1", "atom2"}).m);
        }
        double spread = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                spread = std::max(spread, (exact[i] - exact[j]).cwiseAbs().maxCoeff());
        vr.effective_independence_error = spread;
    }

    bool chains_ok = true;
    for (const auto& c : vr.chains) chains_ok = chains_ok && c.monotone && c.plan_ok;
    vr.pass = chains_ok && pairwise_ok && vr.effective_independence_error <= 1e-12;
    return vr;
}

json verify_report(const RunConfig& rc, const VerifyResult& vr) {
    json out;
    out["command"] = "verify";
    // drive amplitude and atom count vary along the chains; the per-chain
    // timing plans carry them
    out["parameters"] = {{"microwave",
                          {{"g_rad_us", rc.microwave.g},
                           {"delta_rad_us", rc.microwave.delta},
                           {"omega0_rad_us", rc.microwave.omega0},
                           {"omega_c_rad_us", rc.microwave.omega_c},
                           {"omega_rad_us", rc.microwave.omega},
                           {"fock_cutoff", rc.microwave.fock_cutoff}}}};
    out["delta_over_g"] = vr.delta_over_g;
    out["fidelity_floor"] = vr.fidelity_floor;

    json chains = json::array();
    for (const auto& c : vr.chains) {
        json ladder = json::array();
        for (const auto& pt : c.ladder)
            ladder.push_back({{"G_over_g", pt.G_over_g}, {"fidelity", pt.fidelity}});
        chains.push_back({{"n_atoms", c.n_atoms},
                          {"ladder", std::move(ladder)},
                          {"plan_point",
                           {{"G_over_g", c.plan_point.G_over_g},
                            {"fidelity", c.plan_point.fidelity}}},
                          {"timing_plan", plan_json(c.plan)},
                          {"monotone", c.monotone},
                          {"plan_ok", c.plan_ok}});
    }
    out["effective_model_chains"] = std::move(chains);

    json focks = json::array();
    for (const auto& f : vr.fock_checks)
        focks.push_back(
            {{"fock_n", f.fock_n}, {"fidelity", f.fidelity}, {"leakage", f.leakage}});
    out["fock_checks"] = std::move(focks);

    json pairs = json::array();
    for (const auto& p : vr.pairwise)
        pairs.push_back({{"fock_a", p.fock_a},
                         {"fock_b", p.fock_b},
                         {"fidelity", p.fidelity},
                         {"ok", p.ok}});
    out["pairwise_reduced_fidelities"] = std::move(pairs);
    out["effective_independence_error"] = vr.effective_independence_error;
    out["pass"] = vr.pass;
    return out;
}

}  // namespace cqed::config
