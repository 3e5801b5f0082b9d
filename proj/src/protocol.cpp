#include "cqed/protocol.hpp"

#include "cqed/errors.hpp"
#include "cqed/units.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqed::protocol {

namespace {

Mat embed_atom(int n_atoms, int j, const Mat& op) {
    Mat out = Mat::Identity(1, 1);
    for (int k = 0; k < n_atoms; ++k) out = kron(out, k == j ? op : Mat::Identity(2, 2));
    return out;
}

// excitation-conserving part of the pair interaction plus the common shift
Mat driveless_hamiltonian(int n_atoms, double lambda, double lambda_prime) {
    const int dim = 1 << n_atoms;
    Mat h = lambda_prime * n_atoms * Mat::Identity(dim, dim);
    Mat sp = Mat::Zero(2, 2);
    sp(1, 0) = 1.0;
    for (int i = 0; i < n_atoms; ++i)
        for (int j = i + 1; j < n_atoms; ++j) {
            Mat hop = embed_atom(n_atoms, i, sp) * embed_atom(n_atoms, j, sp).adjoint();
            h += lambda * (hop + hop.adjoint());
        }
    return h;
}

void validate_config(const ProtocolConfig& cfg) {
    if (cfg.n_atoms < 2) throw std::invalid_argument("protocol needs at least 2 atoms");
    if (static_cast<int>(cfg.optical.size()) != cfg.n_atoms)
        throw std::invalid_argument("need one optical cavity per atom");
    if (cfg.microwave.n_atoms != cfg.n_atoms)
        throw std::invalid_argument("atom count mismatch between stages");
    microwave::validate(cfg.microwave);
    const double lambda =
        microwave::effective_couplings(cfg.microwave.g, cfg.microwave.delta).lambda;
    if (std::abs(lambda * cfg.plan.t0 - pi / 4.0) > 1e-9)
        throw std::invalid_argument("timing plan inconsistent with the effective coupling");
    if (cfg.drive_enabled &&
        !microwave::plan_satisfied(cfg.plan, lambda, cfg.microwave.G, cfg.n_atoms))
        throw std::invalid_argument("timing plan inconsistent with the drive amplitude");
}

std::string pattern_string(int bits, int n_atoms) {
    std::string s(n_atoms, 'g');
    for (int i = 0; i < n_atoms; ++i)
        if (bits & (1 << (n_atoms - 1 - i))) s[i] = 'e';
    return s;
}

double reduced_deviation(const StateVector& photon) {
    const int n = photon.space.n_factors();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        Mat rho = reduced_state(photon, {photon.space.factors()[i].label}).m;
        worst = std::max(worst, (rho - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace

ProtocolResult run_protocol(const ProtocolConfig& cfg) {
    validate_config(cfg);

    ProtocolResult out;
    std::vector<optical::OpticalStageResult> stages;
    out.total_success_prob = 1.0;
    for (int j = 0; j < cfg.n_atoms; ++j) {
        const auto& op = cfg.optical[j];
        optical::validate(op);
        for (const auto& w : optical::regime_warnings(op))
            out.warnings.push_back("cavity " + std::to_string(j + 1) + ": " + w);
        const double tau = optical::solve_interaction_time(op);
        stages.push_back(optical::evolve_optical(op, tau));
        out.total_success_prob *= stages.back().success_prob;
    }
    for (const auto& w : microwave::regime_warnings(cfg.microwave)) out.warnings.push_back(w);

    StateVector joint = optical::emit_photons(stages);

    const auto ec = microwave::effective_couplings(cfg.microwave.g, cfg.microwave.delta);
    Mat u_atoms;
    if (cfg.drive_enabled) {
        u_atoms = propagator_hermitian(microwave::build_effective_hamiltonian(cfg.microwave).m,
                                       cfg.plan.t0);
    } else {
        u_atoms = propagator_hermitian(
            driveless_hamiltonian(cfg.n_atoms, ec.lambda, ec.lambda_prime), cfg.plan.t0);
    }
    const int dim_ph = 1 << cfg.n_atoms;
    joint.amps = kron(u_atoms, Mat::Identity(dim_ph, dim_ph)) * joint.amps;
    out.joint_state = joint;

    std::vector<Factor> photon_factors(joint.space.factors().begin() + cfg.n_atoms,
                                       joint.space.factors().end());
    HilbertSpace photon_space(photon_factors);

    for (int bits = 0; bits < (1 << cfg.n_atoms); ++bits) {
        OutcomeRow row;
        row.pattern = pattern_string(bits, cfg.n_atoms);
        Vec amps = joint.amps.segment(bits * dim_ph, dim_ph);
        row.probability = amps.squaredNorm();
        if (row.probability > 1e-14) {
            row.photon_state = StateVector{photon_space, amps / amps.norm()};
            auto cls = classify_entangled_state(row.photon_state);
            row.label = cls.label;
            row.phase = cls.phase;
            row.fidelity = cls.fidelity;
            row.reduced_deviation = reduced_deviation(row.photon_state);
            row.entangled = row.reduced_deviation <= 1e-6;
        } else {
            row.probability = 0.0;
            row.photon_state = StateVector{photon_space, Vec::Zero(dim_ph)};
            row.label = "none";
        }
        out.outcome_table.push_back(std::move(row));
    }
    return out;
}

std::pair<StateVector, double> measure_atoms(const ProtocolResult& result,
                                             const std::string& pattern) {
    const auto& factors = result.joint_state.space.factors();
    const int n_atoms = static_cast<int>(factors.size()) / 2;
    if (static_cast<int>(pattern.size()) != n_atoms)
        throw std::invalid_argument("pattern length does not match the atom count");

    StateVector current = result.joint_state;
    double prob = 1.0;
    for (int i = 0; i < n_atoms; ++i) {
        if (pattern[i] != 'g' && pattern[i] != 'e')
            throw std::invalid_argument("pattern characters must be 'g' or 'e'");
        auto [next, p] = project(current, factors[i].label, pattern[i] == 'e' ? 1 : 0);
        current = std::move(next);
        prob *= p;
    }
    return {std::move(current), prob};
}

Classification classify_entangled_state(const StateVector& photon_state) {
    const int dim = photon_state.space.dim();
    int n = 0;
    while ((1 << n) < dim) ++n;
    if ((1 << n) != dim || n < 2)
        throw std::invalid_argument("need at least two photonic qubits");
    if (std::abs(photon_state.norm2() - 1.0) > 1e-9)
        throw std::invalid_argument("classification needs a normalized state");

    const Vec& a = photon_state.amps;
    Classification best;
    int best_x = 0;
    for (int x = 0; x < dim / 2; ++x) {  // first qubit fixed, so x < flipped(x)
        const int xb = ~x & (dim - 1);
        const double score = 0.5 * std::pow(std::abs(a(x)) + std::abs(a(xb)), 2);
        if (score > best.fidelity + 1e-15) {
            best.fidelity = score;
            best_x = x;
        }
    }
    const int xb = ~best_x & (dim - 1);
    const double big = std::max(std::abs(a(best_x)), std::abs(a(xb)));
    bool phase_meaningful = false;
    if (big > 0.0 && std::min(std::abs(a(best_x)), std::abs(a(xb))) / big > 1e-6) {
        cxd ratio = a(xb) / a(best_x);
        best.phase = ratio / std::abs(ratio);
        phase_meaningful = true;
    }

    if (n == 2) {
        best.label = best_x == 0 ? "phi" : "psi";
        if (phase_meaningful) {
            if (std::abs(best.phase - cxd(1.0, 0.0)) < 1e-6) best.label += "+";
            if (std::abs(best.phase + cxd(1.0, 0.0)) < 1e-6) best.label += "-";
        }
    } else {
        std::string pat;
        for (int i = n - 1; i >= 0; --i) pat += (best_x >> i) & 1 ? '-' : '+';
        best.label = "ghz:" + pat;
    }
    return best;
}

CompleteSetReport complete_set_table(const ProtocolConfig& cfg) {
    ProtocolResult res = run_protocol(cfg);
    CompleteSetReport rep;
    rep.rows = res.outcome_table;
    rep.total_success_prob = res.total_success_prob;
    rep.warnings = res.warnings;

    bool all_entangled = true;
    for (const auto& row : rep.rows) {
        if (row.probability == 0.0 || !row.entangled) {
            all_entangled = false;
            rep.warnings.push_back("outcome " + row.pattern + " is not maximally entangled");
        }
        rep.max_reduced_deviation = std::max(rep.max_reduced_deviation, row.reduced_deviation);
    }
    for (size_t i = 0; i < rep.rows.size(); ++i)
        for (size_t j = i + 1; j < rep.rows.size(); ++j) {
            if (rep.rows[i].probability == 0.0 || rep.rows[j].probability == 0.0) continue;
            const double ov =
                std::abs(rep.rows[i].photon_state.amps.dot(rep.rows[j].photon_state.amps));
            rep.max_gram_offdiag = std::max(rep.max_gram_offdiag, ov);
        }
    rep.complete = all_entangled && rep.max_gram_offdiag <= 1e-9;
    return rep;
}

}  // namespace cqed::protocol
