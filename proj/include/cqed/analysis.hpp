#pragma once

#include "cqed/optical.hpp"

#include <string>
#include <vector>

namespace cqed::analysis {

// atoms crossing the microwave cavity with a uniform time offset between
// neighbors instead of simultaneously; delta_t = 0 recovers the ideal run.
// staggered_exit models unequal speeds by offsetting the leave times instead
enum class StaggerMode { staggered_entry, staggered_exit };

struct StaggerSpec {
    double delta_t = 0.0;  // offset between neighboring atoms, us
    double t0 = 0.0;       // ideal joint interaction time, us
    int n_atoms = 2;
    double G = 0.0;        // drive coupling, rad/us
    double lambda = 0.0;   // pair coupling, rad/us
    StaggerMode mode = StaggerMode::staggered_entry;
};

// closed-form two-atom infidelity
// sin^2(G dt) + cos^2(G dt) (1 - sin(2 lambda (t0 - 2 dt)))/2
double infidelity_stagger_analytic(const StaggerSpec& s);

// piecewise-propagator evaluation of the same quantity for 2 or 3 atoms,
// comparing against the simultaneous map via the normalized trace overlap
double infidelity_stagger_simulated(const StaggerSpec& s);

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct SweepRow {
    std::vector<double> point;   // one entry per axis
    std::vector<double> values;  // one entry per value column
    std::vector<std::string> flags;
};

// row-major over the axes, deterministic order
struct SweepTable {
    std::vector<SweepAxis> axes;
    std::vector<std::string> value_names;
    std::vector<SweepRow> rows;
};

// optical-stage success probability over a (gamma, kappa) grid, couplings
// fixed, two identical cavities per point; grids in rad/us, axis columns
// reported in linear MHz; overdamped points are flagged rather than fatal
SweepTable sweep_success(const optical::OpticalCavityParams& base,
                         const std::vector<double>& gammas,
                         const std::vector<double>& kappas);

// staggered-crossing infidelity over dt/t0 for two and three atoms at the
// same (G, lambda, t0); the analytic column is defined for two atoms only
SweepTable sweep_stagger(const StaggerSpec& base, const std::vector<double>& dt_over_t0);

// RFC-4180 text: header of axis names then value names, CRLF line ends,
// 12 significant digits, "nan" for undefined entries
std::string to_csv(const SweepTable& table);

}  // namespace cqed::analysis
