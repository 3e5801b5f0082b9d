#pragma once

#include "cqed/microwave.hpp"
#include "cqed/optical.hpp"
#include "cqed/protocol.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace cqed::config {

using json = nlohmann::ordered_json;

// sweep grids, already converted to canonical units where dimensioned
struct SweepGrids {
    std::vector<double> gamma;       // rad/us
    std::vector<double> kappa;       // rad/us
    std::vector<double> dt_over_t0;  // dimensionless offset fractions
};

// everything a run needs except the atom count, which each command supplies.
// frequencies are canonical rad/us; the file format carries linear MHz
struct RunConfig {
    std::vector<optical::OpticalCavityParams> optical;  // one entry, or one per atom
    microwave::MicrowaveParams microwave;  // G and n_atoms left for resolution
    double min_g_multiple = 10.0;          // drive floor: G >= multiple * max(delta, g)
    SweepGrids sweep;
};

// strict parse: unknown keys and wrongly typed or missing required values are
// ConfigErrors carrying the full key path (e.g. "optical[1].kappa_mhz")
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// fills in the run-dependent pieces: replicates a single cavity entry across
// all atoms, solves the timing plan for this atom count and adopts the drive
// amplitude it requires
protocol::ProtocolConfig resolve_protocol(const RunConfig& rc, int n_atoms);

// temp file + rename in the destination directory, so readers never observe
// a partially written file
void atomic_write(const std::string& path, const std::string& content);

// protocol run report: resolved canonical-unit parameters, the timing plan in
// force, warnings, the outcome table with raw conditional amplitudes
json protocol_report(const protocol::ProtocolConfig& cfg,
                     const protocol::CompleteSetReport& rep, const std::string& command);

// verification suite: effective-model fidelity ladder plus photon-number
// independence of the reduced atomic evolution
struct LadderPoint {
    double G_over_g = 0.0;
    double fidelity = 0.0;
};

struct VerifyChain {
    int n_atoms = 0;
    std::vector<LadderPoint> ladder;  // fixed rungs G/g = 10, 30, 50, 100
    LadderPoint plan_point;           // drive amplitude taken from the timing plan
    microwave::TimingPlan plan;
    bool monotone = false;  // fidelity non-decreasing up the ladder
    bool plan_ok = false;   // plan-point fidelity >= fidelity_floor
};

struct FockCheck {
    int fock_n = 0;
    double fidelity = 0.0;  // reduced state vs the drive-free effective map
    double leakage = 0.0;
};

struct PairFidelity {
    int fock_a = 0;
    int fock_b = 0;
    double fidelity = 0.0;  // mixed-state fidelity between reduced evolutions
    bool ok = false;
};

struct VerifyResult {
    double fidelity_floor = 0.98;
    double delta_over_g = 0.0;
    std::vector<VerifyChain> chains;     // two and three atoms
    std::vector<FockCheck> fock_checks;  // initial Fock levels 0, 1, 2 (two atoms)
    std::vector<PairFidelity> pairwise;
    double effective_independence_error = 0.0;  // reduced-map spread under the effective generator
    bool pass = false;
};

VerifyResult run_verify(const RunConfig& rc);
json verify_report(const RunConfig& rc, const VerifyResult& vr);

}  // namespace cqed::config
