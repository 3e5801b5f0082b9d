// acceptance gate for the two-stage entangled-photon toolkit. every criterion
// prints exactly one verdict line with its measured numbers against the
// thresholds pinned below; the process exit code is the number of failed
// criteria. a red line is a finding to report, not a knob to tune away.

#include "cqed/analysis.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/microwave.hpp"
#include "cqed/optical.hpp"
#include "cqed/protocol.hpp"
#include "cqed/units.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace cqed;

namespace {

int failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void verdict(int index, const char* name, bool pass, double elapsed, double limit,
             const std::string& detail) {
    const bool ok = pass && elapsed < limit;
    if (!ok) ++failures;
    std::printf("[%s] criterion %d, %s: %s [%.2f s of %.0f s allowed]\n", ok ? "PASS" : "FAIL",
                index, name, detail.c_str(), elapsed, limit);
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

optical::OpticalCavityParams reference_cavity() {
    return {mhz_to_rad_us(34.0), mhz_to_rad_us(34.0), mhz_to_rad_us(2.6), mhz_to_rad_us(4.1)};
}

// reference microwave stage: g = 2 pi x 0.05 rad/us, delta = 5 g, drive from
// the timing plan for the requested atom count
microwave::MicrowaveParams reference_microwave(int n_atoms, microwave::TimingPlan* plan_out) {
    microwave::MicrowaveParams p;
    p.g = mhz_to_rad_us(0.05);
    p.delta = 5.0 * p.g;
    p.omega0 = mhz_to_rad_us(6500.0);
    p.omega_c = p.omega0 - p.delta;
    p.omega = p.omega0;
    p.fock_cutoff = 8;
    p.n_atoms = n_atoms;
    const double lambda = microwave::effective_couplings(p.g, p.delta).lambda;
    auto plan =
        microwave::make_timing_plan(lambda, n_atoms, 10.0 * std::max(p.delta, p.g));
    p.G = plan.G_required;
    if (plan_out != nullptr) *plan_out = plan;
    return p;
}

StateVector all_ground(int n_atoms) {
    return basis_state(microwave::atom_space(n_atoms), std::vector<int>(n_atoms, 0));
}

bool criterion1_pass = false;
bool criterion7_pass = false;

// solved interaction time and two-cavity success probability at the
// reference rates
void criterion_1() {
    const auto start = Clock::now();
    const auto p = reference_cavity();
    const double tau_us = optical::solve_interaction_time(p);
    const double p1 = optical::success_probability(p, tau_us);
    const double total = p1 * p1;
    const double tau_ns = tau_us * 1e3;
    const bool pass = std::abs(tau_ns - 10.8) <= 0.1 && std::abs(total - 0.481) <= 0.003;
    criterion1_pass = pass;
    verdict(1, "solved time and success probability", pass, seconds_since(start), 1.0,
            fmt("tau = %.4f ns (want 10.8 +- 0.1), P = %.5f (want 0.481 +- 0.003)", tau_ns,
                total));
}

// closed-form conditional amplitudes against brute-force evolution of the
// single-excitation generator, randomized parameters
void criterion_2() {
    const auto start = Clock::now();
    std::mt19937 rng(7321);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        optical::OpticalCavityParams p;
        do {
            const double scale = 50.0 + 250.0 * u(rng);
            p.h_r = (0.3 + 0.7 * u(rng)) * scale;
            p.h_l = (0.3 + 0.7 * u(rng)) * scale;
            p.gamma = u(rng) * scale / 2.0;
            p.kappa = u(rng) * scale / 2.0;
        } while (2.0 * p.gamma * p.kappa + p.h_r * p.h_r + p.h_l * p.h_l -
                     std::pow(p.kappa + p.gamma / 2.0, 2) <=
                 1.0);
        const double t = 0.002 + 0.048 * u(rng);

        const auto h = optical::build_conditional_hamiltonian(p);
        const auto psi0 = basis_state(h.space, {0, 0, 0});
        const auto brute = evolve_const(h, psi0, t);

        const auto r = optical::evolve_optical(p, t);
        const cxd pref =
            std::exp(-(p.kappa + p.gamma / 2.0) / 2.0 * t) / (2.0 * r.omega);
        worst = std::max(worst,
                         std::abs(brute.amps(h.space.pack({0, 0, 0})) - pref * r.a));
        worst = std::max(worst,
                         std::abs(brute.amps(h.space.pack({1, 0, 1})) - pref * r.b));
        worst = std::max(worst,
                         std::abs(brute.amps(h.space.pack({2, 1, 0})) - pref * r.c));
    }
    const bool pass = worst <= 1e-8;
    verdict(2, "closed form vs brute force", pass, seconds_since(start), 10.0,
            fmt("max amplitude error %.2e over 100 random sets (allow 1e-8)", worst));
}

// full two-atom protocol: outcome probabilities and paired-state fidelities
void criterion_3() {
    const auto start = Clock::now();
    protocol::ProtocolConfig cfg;
    cfg.n_atoms = 2;
    cfg.optical = {reference_cavity(), reference_cavity()};
    cfg.microwave = reference_microwave(2, &cfg.plan);
    const auto result = protocol::run_protocol(cfg);

    double worst_prob = 0.0;
    double min_fid = 1.0;
    for (const auto& row : result.outcome_table) {
        worst_prob = std::max(worst_prob, std::abs(row.probability - 0.25));
        min_fid = std::min(min_fid, row.fidelity);
    }
    const bool pass = worst_prob <= 1e-10 && min_fid >= 1.0 - 1e-9;
    verdict(3, "complete paired-state set", pass, seconds_since(start), 1.0,
            fmt("max |p - 0.25| = %.2e (allow 1e-10), min fidelity = 1 - %.2e (floor 1e-9)",
                worst_prob, 1.0 - min_fid));
}

// three-atom conditional map: every basis state reaches its paired
// superposition with one shared global phase
void criterion_4() {
    const auto start = Clock::now();
    microwave::TimingPlan plan;
    const auto p = reference_microwave(3, &plan);
    const double lambda = microwave::effective_couplings(p.g, p.delta).lambda;

    const Mat sx = microwave::collective_sx(3);
    const Mat heff = microwave::drive_phase_sign * 2.0 * p.G * sx + 2.0 * lambda * sx * sx;
    const Mat u = propagator_hermitian(heff, plan.t0);

    double min_fid = 1.0;
    double phase_spread = 0.0;
    cxd first_phase{0.0, 0.0};
    for (int x = 0; x < 8; ++x) {
        Vec target = Vec::Zero(8);
        target(x) = 1.0 / std::sqrt(2.0);
        target(7 - x) = cxd(0.0, 1.0) / std::sqrt(2.0);
        const cxd overlap = target.dot(u.col(x));
        min_fid = std::min(min_fid, std::norm(overlap));
        const cxd phase = overlap / std::abs(overlap);
        if (x == 0)
            first_phase = phase;
        else
            phase_spread = std::max(phase_spread, std::abs(phase - first_phase));
    }
    const bool pass = min_fid >= 1.0 - 1e-10 && phase_spread <= 1e-8;
    verdict(4, "three-atom paired map", pass, seconds_since(start), 1.0,
            fmt("min fidelity = 1 - %.2e (floor 1e-10), global phase spread %.2e (allow 1e-8)",
                1.0 - min_fid, phase_spread));
}

// validity of the atoms-only effective model against the interaction-frame
// evolution with the cavity kept
void criterion_5() {
    const auto start = Clock::now();
    microwave::TimingPlan plan;
    auto p = reference_microwave(3, &plan);
    const StateVector ground = all_ground(3);

    const double plan_fid = microwave::effective_model_fidelity(p, ground, 0);

    std::vector<double> ladder;
    for (double r : {10.0, 30.0, 50.0, 100.0}) {
        p.G = r * p.g;
        ladder.push_back(microwave::effective_model_fidelity(p, ground, 0));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < ladder.size(); ++i) monotone = monotone && ladder[i] > ladder[i - 1];

    const bool pass = plan_fid >= 0.98 && monotone;
    verdict(5, "effective-model validity", pass, seconds_since(start), 60.0,
            fmt("fidelity at plan drive (G/g = %.1f) = %.5f (floor 0.98); ladder %.5f, %.5f, "
                "%.5f, %.5f at G/g = 10, 30, 50, 100 (monotone: %s)",
                plan.G_required / p.g, plan_fid, ladder[0], ladder[1], ladder[2], ladder[3],
                monotone ? "yes" : "no"));
}

// photon-number independence of the reduced atomic evolution
void criterion_6() {
    const auto start = Clock::now();
    const auto p = reference_microwave(2, nullptr);
    const StateVector ground = all_ground(2);

    std::vector<Mat> reduced;
    for (int n : {0, 1, 2})
        reduced.push_back(microwave::dispersive_validity(p, ground, n).reduced_atoms);
    double min_pair = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            min_pair = std::min(min_pair, fidelity_mixed(reduced[i], reduced[j]));

    // the same comparison under the effective generator, lifted to the joint
    // space so degenerate-eigenspace roundoff is exercised
    const double lambda = microwave::effective_couplings(p.g, p.delta).lambda;
    const double t0 = pi / (4.0 * lambda);
    const Mat sx = microwave::collective_sx(2);
    const Mat heff = microwave::drive_phase_sign * 2.0 * p.G * sx + 2.0 * lambda * sx * sx;
    HilbertSpace fock_space({{"fock", p.fock_cutoff + 1}});
    const OperatorMatrix lifted =
        tensor(OperatorMatrix{microwave::atom_space(2), heff}, identity_op(fock_space));
    const Mat u = propagator_hermitian(lifted.m, t0);
    std::vector<Mat> exact;
    for (int n : {0, 1, 2}) {
        Vec fock = Vec::Zero(p.fock_cutoff + 1);
        fock(n) = 1.0;
        StateVector joint = tensor(ground, StateVector{fock_space, fock});
        StateVector evolved{lifted.space, u * joint.amps};
        exact.push_back(reduced_state(evolved, {"atom1", "atom2"}).m);
    }
    double spread = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            spread = std::max(spread, (exact[i] - exact[j]).cwiseAbs().maxCoeff());

    const bool pass = min_pair >= 0.98 && spread <= 1e-12;
    verdict(6, "photon-number independence", pass, seconds_since(start), 60.0,
            fmt("min pairwise reduced fidelity over Fock 0, 1, 2 = %.5f (floor 0.98); "
                "effective-generator spread %.2e (allow 1e-12)",
                min_pair, spread));
}

// staggered-crossing error against the closed form, and the three-atom
// directional claim
void criterion_7() {
    const auto start = Clock::now();
    microwave::TimingPlan plan;
    const auto p = reference_microwave(3, &plan);
    const double lambda = microwave::effective_couplings(p.g, p.delta).lambda;

    analysis::StaggerSpec base;
    base.t0 = plan.t0;
    base.G = plan.G_required;
    base.lambda = lambda;

    double max_err = 0.0;
    double at_zero = 0.0;
    bool three_dominates = true;
    for (int k = 0; k <= 50; ++k) {
        analysis::StaggerSpec s = base;
        s.delta_t = (0.001 * k) * plan.t0;
        s.n_atoms = 2;
        const double sim2 = analysis::infidelity_stagger_simulated(s);
        max_err = std::max(max_err, std::abs(sim2 - analysis::infidelity_stagger_analytic(s)));
        if (k == 0) at_zero = sim2;
        s.n_atoms = 3;
        three_dominates =
            three_dominates && analysis::infidelity_stagger_simulated(s) >= sim2 - 1e-12;
    }
    const bool pass = max_err <= 1e-3 && at_zero <= 1e-10 && three_dominates;
    criterion7_pass = pass;
    verdict(7, "staggered-crossing error model", pass, seconds_since(start), 30.0,
            fmt("max |simulated - closed form| = %.2e (allow 1e-3), value at zero offset %.2e "
                "(allow 1e-10), three atoms >= two atoms at every grid point: %s",
                max_err, at_zero, three_dominates ? "yes" : "no"));
}

// the published sweep figures carry no printed numbers; their gate is the
// property set of criteria 1 and 7 plus monotonicity of the success sweep
void criterion_8() {
    const auto start = Clock::now();
    std::vector<double> gammas, kappas;
    for (int i = 0; i < 10; ++i) {
        gammas.push_back(mhz_to_rad_us(0.65 * i));
        kappas.push_back(mhz_to_rad_us(1.025 * i));
    }
    const auto table = analysis::sweep_success(reference_cavity(), gammas, kappas);

    bool mono_kappa = true;
    bool mono_gamma = true;
    const auto total = [&](int gi, int ki) { return table.rows[gi * 10 + ki].values[2]; };
    for (int gi = 0; gi < 10; ++gi)
        for (int ki = 1; ki < 10; ++ki)
            mono_kappa = mono_kappa && total(gi, ki) <= total(gi, ki - 1) + 1e-12;
    for (int ki = 0; ki < 10; ++ki)
        for (int gi = 1; gi < 10; ++gi)
            mono_gamma = mono_gamma && total(gi, ki) <= total(gi - 1, ki) + 1e-12;

    const bool pass = criterion1_pass && criterion7_pass && mono_kappa && mono_gamma;
    verdict(8, "sweep properties in place of curve matching", pass, seconds_since(start), 60.0,
            fmt("success probability non-increasing in gamma: %s, in kappa: %s; criteria 1 "
                "and 7 carry the printed-number checks",
                mono_gamma ? "yes" : "no", mono_kappa ? "yes" : "no"));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("%d of 8 criteria passed\n", 8 - failures);
    if (failures > 0)
        std::printf("known floor: the effective model at delta = 5 g peaks near 0.96 (two "
                    "atoms) and 0.94 (three atoms), below the 0.98 criterion floor; see the "
                    "README validity notes\n");
    return failures;
}
