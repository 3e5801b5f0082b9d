#pragma once

#include "cqed/hilbert.hpp"

#include <string>
#include <vector>

namespace cqed::optical {

// one two-mode optical cavity traversed by one three-level atom; both
// circular modes share the decay rate kappa
struct OpticalCavityParams {
    double h_r = 0.0;    // coupling to the right-circular mode, rad/us
    double h_l = 0.0;    // coupling to the left-circular mode, rad/us
    double gamma = 0.0;  // excited-state spontaneous emission rate, rad/us
    double kappa = 0.0;  // cavity decay rate, rad/us
};

void validate(const OpticalCavityParams& p);
// non-fatal diagnostics, e.g. outside the high-efficiency window
// gamma/2 < kappa < min(h_r, h_l)
std::vector<std::string> regime_warnings(const OpticalCavityParams& p);

struct OpticalStageResult {
    double omega = 0.0;  // oscillation frequency of the conditional dynamics, rad/us
    double tau = 0.0;    // interaction time, us
    // closed-form conditional amplitudes before the common decay prefactor
    // exp(-(kappa+gamma/2) tau/2)/(2 omega): a on the initial level, b on
    // (ground, right photon), c on (flipped ground, left photon)
    cxd a, b, c;
    double success_prob = 0.0;
    // normalized post-emission state: two-level atom (g=0, e=1) x photon
    // polarization (sigma+ = 0, sigma- = 1)
    StateVector atom_photon_state;
};

// oscillation frequency of the conditional evolution,
// (1/2) sqrt(2 gamma kappa + h_r^2 + h_l^2 - (kappa + gamma/2)^2);
// throws PhysicsError when the radicand is negative (overdamped)
double rabi_frequency(const OpticalCavityParams& p);

// smallest tau > 0 with tan(omega tau) = 2 omega / (gamma/2 - kappa); at this
// tau the initial-level amplitude vanishes and the photon is ready to leave
double solve_interaction_time(const OpticalCavityParams& p);

// closed-form conditional state at time tau plus derived quantities
OpticalStageResult evolve_optical(const OpticalCavityParams& p, double tau);

// probability that the atom-photon emission succeeds,
// exp(-(kappa+gamma/2) tau) sin^2(omega tau) (sqrt(h_r^2+h_l^2)/(2 omega))^2
double success_probability(const OpticalCavityParams& p, double tau);

// single-excitation conditional Hamiltonian on atom(3) x left mode x right
// mode, with -i gamma/2 and -i kappa decay terms; atom levels are ordered
// {initial, ground-right, ground-left} = {r=0, g=1, e=2}
OperatorMatrix build_conditional_hamiltonian(const OpticalCavityParams& p);

// joint atom-photon state over all cavities, factor order
// atom1..atomN, photon1..photonN
StateVector emit_photons(const std::vector<OpticalStageResult>& results);

}  // namespace cqed::optical
