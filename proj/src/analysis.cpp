#include "cqed/analysis.hpp"

#include "cqed/errors.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/microwave.hpp"
#include "cqed/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cqed::analysis {

namespace {

// collective spin-x restricted to the atoms currently inside the cavity
Mat subset_sx(int n_atoms, int first, int last) {
    const int dim = 1 << n_atoms;
    Mat sx = Mat::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx)
        for (int j = first; j <= last; ++j)
            sx(idx ^ (1 << (n_atoms - 1 - j)), idx) += 0.5;
    return sx;
}

struct Segment {
    double duration;
    int first, last;  // inclusive atom range inside the cavity
};

void check_spec(const StaggerSpec& s) {
    if (s.n_atoms != 2 && s.n_atoms != 3)
        throw std::invalid_argument("staggered crossing supports 2 or 3 atoms");
    if (s.t0 <= 0.0) throw std::invalid_argument("t0 must be positive");
    if (s.delta_t < 0.0 || s.delta_t > s.t0 / 2.0)
        throw std::invalid_argument("delta_t must lie in [0, t0/2]");
    if (s.t0 - s.n_atoms * s.delta_t < 0.0)
        throw std::invalid_argument("delta_t too large: middle segment duration would be negative");
}

}  // namespace

double infidelity_stagger_analytic(const StaggerSpec& s) {
    if (s.n_atoms != 2)
        throw std::invalid_argument("no closed form beyond two atoms");
    check_spec(s);
    const double sg = std::sin(s.G * s.delta_t), cg = std::cos(s.G * s.delta_t);
    return sg * sg + cg * cg * (1.0 - std::sin(2.0 * s.lambda * (s.t0 - 2.0 * s.delta_t))) / 2.0;
}

double infidelity_stagger_simulated(const StaggerSpec& s) {
    check_spec(s);
    const int n = s.n_atoms;
    const int dim = 1 << n;

    std::vector<Segment> segments;
    for (int k = 1; k < n; ++k) segments.push_back({s.delta_t, 0, k - 1});
    segments.push_back({s.t0 - n * s.delta_t, 0, n - 1});
    for (int k = 1; k < n; ++k)
        segments.push_back({k == n - 1 ? 2.0 * s.delta_t : s.delta_t, k, n - 1});
    if (s.mode == StaggerMode::staggered_exit) std::reverse(segments.begin(), segments.end());

    auto generator = [&](int first, int last) {
        Mat sx = subset_sx(n, first, last);
        return Mat(microwave::drive_phase_sign * 2.0 * s.G * sx + 2.0 * s.lambda * sx * sx);
    };

    Mat u = Mat::Identity(dim, dim);
    for (const auto& seg : segments) {
        if (seg.duration == 0.0) continue;
        u = propagator_hermitian(generator(seg.first, seg.last), seg.duration) * u;
    }
    Mat u_ideal = propagator_hermitian(generator(0, n - 1), s.t0);
    const cxd overlap = (u_ideal.adjoint() * u).trace() / static_cast<double>(dim);
    return std::clamp(1.0 - std::norm(overlap), 0.0, 1.0);
}

SweepTable sweep_success(const optical::OpticalCavityParams& base,
                         const std::vector<double>& gammas,
                         const std::vector<double>& kappas) {
    SweepTable t;
    t.axes = {{"gamma_mhz", {}}, {"kappa_mhz", {}}};
    for (double g : gammas) {
        if (g < 0.0) throw std::invalid_argument("gamma grid values must be non-negative");
        t.axes[0].values.push_back(rad_us_to_mhz(g));
    }
    for (double k : kappas) {
        if (k < 0.0) throw std::invalid_argument("kappa grid values must be non-negative");
        t.axes[1].values.push_back(rad_us_to_mhz(k));
    }
    t.value_names = {"tau_us", "p_single", "p_total"};

    const double nan = std::nan("");
    for (size_t ig = 0; ig < gammas.size(); ++ig)
        for (size_t ik = 0; ik < kappas.size(); ++ik) {
            SweepRow row;
            row.point = {t.axes[0].values[ig], t.axes[1].values[ik]};
            optical::OpticalCavityParams p = base;
            p.gamma = gammas[ig];
            p.kappa = kappas[ik];
            try {
                const double tau = optical::solve_interaction_time(p);
                const double p1 = optical::success_probability(p, tau);
                row.values = {tau, p1, p1 * p1};
            } catch (const PhysicsError&) {
                row.values = {nan, nan, nan};
                row.flags.push_back("overdamped");
            }
            t.rows.push_back(std::move(row));
        }
    return t;
}

SweepTable sweep_stagger(const StaggerSpec& base, const std::vector<double>& dt_over_t0) {
    SweepTable t;
    t.axes = {{"dt_over_t0", dt_over_t0}, {"n_atoms", {2.0, 3.0}}};
    t.value_names = {"G_rad_per_us", "infid_analytic", "infid_sim"};

    for (double ratio : dt_over_t0)
        for (int n : {2, 3}) {
            StaggerSpec s = base;
            s.n_atoms = n;
            s.delta_t = ratio * base.t0;
            SweepRow row;
            row.point = {ratio, static_cast<double>(n)};
            const double analytic =
                n == 2 ? infidelity_stagger_analytic(s) : std::nan("");
            row.values = {s.G, analytic, infidelity_stagger_simulated(s)};
            t.rows.push_back(std::move(row));
        }
    return t;
}

std::string to_csv(const SweepTable& table) {
    std::string out;
    auto cell = [](double v) {
        if (std::isnan(v)) return std::string("nan");
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };

    bool first = true;
    for (const auto& ax : table.axes) {
        if (!first) out += ',';
        out += ax.name;
        first = false;
    }
    for (const auto& name : table.value_names) {
        out += ',';
        out += name;
    }
    out += "\r\n";

    for (const auto& row : table.rows) {
        first = true;
        for (double v : row.point) {
            if (!first) out += ',';
            out += cell(v);
            first = false;
        }
        for (double v : row.values) {
            out += ',';
            out += cell(v);
        }
        out += "\r\n";
    }
    return out;
}

}  // namespace cqed::analysis
