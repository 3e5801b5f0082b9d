#include "cqed/optical.hpp"

#include "cqed/errors.hpp"
#include "cqed/units.hpp"

#include <cmath>
#include <stdexcept>

namespace cqed::optical {

void validate(const OpticalCavityParams& p) {
    if (p.h_r < 0 || p.h_l < 0 || p.gamma < 0 || p.kappa < 0)
        throw std::invalid_argument("optical params must be non-negative");
    if (p.h_r * p.h_r + p.h_l * p.h_l <= 0.0)
        throw std::invalid_argument("at least one optical coupling must be positive");
}

std::vector<std::string> regime_warnings(const OpticalCavityParams& p) {
    std::vector<std::string> w;
    if (!(p.gamma / 2.0 < p.kappa && p.kappa < std::min(p.h_r, p.h_l)))
        w.push_back("optical: outside the high-efficiency window gamma/2 < kappa < min(h_r, h_l)");
    return w;
}

double rabi_frequency(const OpticalCavityParams& p) {
    validate(p);
    const double radicand = 2.0 * p.gamma * p.kappa + p.h_r * p.h_r + p.h_l * p.h_l -
                            (p.kappa + p.gamma / 2.0) * (p.kappa + p.gamma / 2.0);
    if (radicand < 0.0)
        throw PhysicsError("optical cavity overdamped: no oscillatory conditional dynamics");
    return 0.5 * std::sqrt(radicand);
}

double solve_interaction_time(const OpticalCavityParams& p) {
    const double omega = rabi_frequency(p);
    if (omega <= 0.0) throw PhysicsError("zero oscillation frequency: no finite interaction time");
    // smallest positive root of tan(omega tau) = 2 omega / (gamma/2 - kappa);
    // atan2 picks the branch in (0, pi] including the degenerate gamma/2 = kappa
    // case (omega tau = pi/2) and the gamma/2 < kappa case (second quadrant)
    const double tau = std::atan2(2.0 * omega, p.gamma / 2.0 - p.kappa) / omega;

    // residual self-check in cross-multiplied form, robust near the pole
    const double x = omega * tau;
    const double resid = std::abs(std::cos(x) * 2.0 * omega - std::sin(x) * (p.gamma / 2.0 - p.kappa));
    if (resid > 1e-10 * 2.0 * omega)
        throw std::logic_error("interaction-time residual check failed");
    return tau;
}

OpticalStageResult evolve_optical(const OpticalCavityParams& p, double tau) {
    if (tau < 0.0) throw std::invalid_argument("tau must be non-negative");
    OpticalStageResult r;
    r.omega = rabi_frequency(p);
    r.tau = tau;
    const double x = r.omega * tau;
    r.a = (p.kappa - p.gamma / 2.0) * std::sin(x) + 2.0 * r.omega * std::cos(x);
    r.b = cxd(0, -1) * p.h_r * std::sin(x);
    r.c = cxd(0, -1) * p.h_l * std::sin(x);
    r.success_prob = success_probability(p, tau);

    HilbertSpace ap{{{"atom", 2}, {"photon", 2}}};
    Vec v = Vec::Zero(4);
    const double n = std::sqrt(std::norm(r.b) + std::norm(r.c));
    if (n > 0.0) {
        v(ap.pack({0, 0})) = r.b / n;  // ground atom with a right-circular photon
        v(ap.pack({1, 1})) = r.c / n;  // flipped atom with a left-circular photon
    } else {
        v(ap.pack({0, 0})) = 1.0;  // tau = 0: nothing emitted yet, placeholder basis state
    }
    r.atom_photon_state = {ap, v};
    return r;
}

double success_probability(const OpticalCavityParams& p, double tau) {
    if (tau < 0.0) throw std::invalid_argument("tau must be non-negative");
    const double omega = rabi_frequency(p);
    const double s = std::sin(omega * tau);
    const double amp = std::sqrt(p.h_r * p.h_r + p.h_l * p.h_l) / (2.0 * omega);
    return std::exp(-(p.kappa + p.gamma / 2.0) * tau) * s * s * amp * amp;
}

OperatorMatrix build_conditional_hamiltonian(const OpticalCavityParams& p) {
    validate(p);
    HilbertSpace s{{{"atom", 3}, {"mode_l", 2}, {"mode_r", 2}}};
    Mat m = Mat::Zero(12, 12);

    auto put = [&](std::vector<int> to, std::vector<int> from, cxd val) {
        m(s.pack(to), s.pack(from)) += val;
    };
    // coherent couplings: initial level -> ground + right photon (h_r),
    // initial level -> flipped ground + left photon (h_l), each with the 1/2
    put({1, 0, 1}, {0, 0, 0}, p.h_r / 2.0);
    put({0, 0, 0}, {1, 0, 1}, p.h_r / 2.0);
    put({2, 1, 0}, {0, 0, 0}, p.h_l / 2.0);
    put({0, 0, 0}, {2, 1, 0}, p.h_l / 2.0);

    // conditional decay: -i gamma/2 on the initial level, -i kappa per photon
    for (int idx = 0; idx < s.dim(); ++idx) {
        auto mi = s.unpack(idx);
        cxd d(0.0, 0.0);
        if (mi[0] == 0) d += cxd(0, -p.gamma / 2.0);
        d += cxd(0, -p.kappa * (mi[1] + mi[2]));
        m(idx, idx) += d;
    }
    return {s, m};
}

StateVector emit_photons(const std::vector<OpticalStageResult>& results) {
    if (results.empty()) throw std::invalid_argument("emit_photons: no stage results");
    const int n = static_cast<int>(results.size());

    std::vector<Factor> fs;
    for (int j = 0; j < n; ++j) fs.push_back({"atom" + std::to_string(j + 1), 2});
    for (int j = 0; j < n; ++j) fs.push_back({"photon" + std::to_string(j + 1), 2});
    HilbertSpace space{fs};

    for (const auto& r : results)
        if (std::abs(r.atom_photon_state.norm2() - 1.0) > 1e-9)
            throw std::invalid_argument("emit_photons: unnormalized per-atom state");

    Vec out(space.dim());
    for (int idx = 0; idx < space.dim(); ++idx) {
        auto mi = space.unpack(idx);
        cxd amp(1.0, 0.0);
        for (int j = 0; j < n; ++j) {
            const auto& st = results[j].atom_photon_state;
            amp *= st.amps(st.space.pack({mi[j], mi[n + j]}));
        }
        out(idx) = amp;
    }
    return {space, out};
}

}  // namespace cqed::optical
