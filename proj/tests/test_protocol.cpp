#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cqed/errors.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/protocol.hpp"
#include "cqed/units.hpp"

#include <cmath>

using namespace cqed;
using namespace cqed::protocol;

namespace {

optical::OpticalCavityParams cavity(double h_r_mhz, double h_l_mhz) {
    optical::OpticalCavityParams p;
    p.h_r = mhz_to_rad_us(h_r_mhz);
    p.h_l = mhz_to_rad_us(h_l_mhz);
    p.gamma = mhz_to_rad_us(2.6);
    p.kappa = mhz_to_rad_us(4.1);
    return p;
}

ProtocolConfig make_config(const std::vector<optical::OpticalCavityParams>& cavities) {
    ProtocolConfig cfg;
    cfg.n_atoms = static_cast<int>(cavities.size());
    cfg.optical = cavities;
    cfg.microwave.g = mhz_to_rad_us(0.05);
    cfg.microwave.delta = 5.0 * cfg.microwave.g;
    cfg.microwave.omega0 = mhz_to_rad_us(6500.0);
    cfg.microwave.omega = cfg.microwave.omega0;
    cfg.microwave.omega_c = cfg.microwave.omega0 - cfg.microwave.delta;
    cfg.microwave.fock_cutoff = 8;
    cfg.microwave.n_atoms = cfg.n_atoms;
    const double lambda =
        microwave::effective_couplings(cfg.microwave.g, cfg.microwave.delta).lambda;
    cfg.plan = microwave::make_timing_plan(lambda, cfg.n_atoms, 50.0 * cfg.microwave.g);
    cfg.microwave.G = cfg.plan.G_required;
    return cfg;
}

int joint_index(const std::vector<int>& atoms, const std::vector<int>& photons) {
    int idx = 0;
    for (int a : atoms) idx = idx * 2 + a;
    for (int p : photons) idx = idx * 2 + p;
    return idx;
}

}  // namespace

TEST_CASE("two-atom joint state with general couplings") {
    const double h1r = 34.0, h1l = 21.0, h2r = 13.0, h2l = 29.0;
    auto cfg = make_config({cavity(h1r, h1l), cavity(h2r, h2l)});
    auto res = run_protocol(cfg);

    const double nn = 1.0 / (std::sqrt(2.0) * std::hypot(h1r, h1l) * std::hypot(h2r, h2l));
    Vec target = Vec::Zero(16);
    const cxd i1(0, 1);
    // gg block
    target(joint_index({0, 0}, {0, 0})) = nn * h1r * h2r;
    target(joint_index({0, 0}, {1, 1})) = -i1 * nn * h1l * h2l;
    // ee block
    target(joint_index({1, 1}, {0, 0})) = -i1 * nn * h1r * h2r;
    target(joint_index({1, 1}, {1, 1})) = nn * h1l * h2l;
    // ge block
    target(joint_index({0, 1}, {0, 1})) = nn * h1r * h2l;
    target(joint_index({0, 1}, {1, 0})) = -i1 * nn * h1l * h2r;
    // eg block
    target(joint_index({1, 0}, {0, 1})) = -i1 * nn * h1r * h2l;
    target(joint_index({1, 0}, {1, 0})) = nn * h1l * h2r;

    CHECK(std::abs(target.squaredNorm() - 1.0) < 1e-12);
    CHECK(std::norm(target.dot(res.joint_state.amps)) >= 1.0 - 1e-9);

    double total = 0.0;
    for (const auto& row : res.outcome_table) total += row.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two-atom symmetric couplings produce the complete paired set") {
    auto cfg = make_config({cavity(34.0, 34.0), cavity(34.0, 34.0)});
    auto res = run_protocol(cfg);

    CHECK(res.total_success_prob == doctest::Approx(0.481).epsilon(0.003 / 0.481));
    REQUIRE(res.outcome_table.size() == 4);

    const cxd i1(0, 1);
    struct Expect {
        const char* pattern;
        const char* family;
        cxd phase;
    };
    const Expect expect[4] = {{"gg", "phi", -i1}, {"ge", "psi", -i1},
                              {"eg", "psi", i1},  {"ee", "phi", i1}};
    for (int k = 0; k < 4; ++k) {
        const auto& row = res.outcome_table[k];
        CHECK(row.pattern == expect[k].pattern);
        CHECK(row.probability == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(row.label == expect[k].family);
        CHECK(std::abs(row.phase - expect[k].phase) < 1e-9);
        CHECK(row.fidelity == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.entangled);
    }

    // explicit printed form of the ee conditional state
    auto [psi_ee, p_ee] = measure_atoms(res, "ee");
    CHECK(p_ee == doctest::Approx(0.25).epsilon(1e-10));
    Vec bell = Vec::Zero(4);
    bell(0) = 1.0 / std::sqrt(2.0);
    bell(3) = i1 / std::sqrt(2.0);
    CHECK(std::norm(bell.dot(psi_ee.amps)) >= 1.0 - 1e-9);

    auto [psi_ge, p_ge] = measure_atoms(res, "ge");
    CHECK(p_ge == doctest::Approx(0.25).epsilon(1e-10));
    Vec bell2 = Vec::Zero(4);
    bell2(1) = 1.0 / std::sqrt(2.0);
    bell2(2) = -i1 / std::sqrt(2.0);
    CHECK(std::norm(bell2.dot(psi_ge.amps)) >= 1.0 - 1e-9);

    auto rep = complete_set_table(cfg);
    CHECK(rep.complete);
    CHECK(rep.max_reduced_deviation < 1e-9);
    CHECK(rep.max_gram_offdiag < 1e-9);
}

TEST_CASE("one-sided first cavity separates photon 1") {
    auto cfg = make_config({cavity(34.0, 0.0), cavity(34.0, 34.0)});
    auto res = run_protocol(cfg);

    double total = 0.0;
    for (const auto& row : res.outcome_table) {
        total += row.probability;
        if (row.probability == 0.0) continue;
        Mat rho1 = reduced_state(row.photon_state, {"photon1"}).m;
        CHECK(std::abs(rho1(0, 0) - 1.0) < 1e-9);  // photon 1 pinned to the + mode
        CHECK_FALSE(row.entangled);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

    auto rep = complete_set_table(cfg);
    CHECK_FALSE(rep.complete);
    bool flagged = false;
    for (const auto& w : rep.warnings)
        flagged = flagged || w.find("not maximally entangled") != std::string::npos;
    CHECK(flagged);
}

TEST_CASE("three atoms give eight orthogonal paired states") {
    auto cfg = make_config({cavity(34.0, 34.0), cavity(34.0, 34.0), cavity(34.0, 34.0)});
    auto res = run_protocol(cfg);

    REQUIRE(res.outcome_table.size() == 8);
    for (const auto& row : res.outcome_table) {
        CHECK(row.probability == doctest::Approx(0.125).epsilon(1e-10));
        CHECK(row.fidelity == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.entangled);
        CHECK(row.label.substr(0, 4) == "ghz:");
        // the classifier reports the phase on the representative whose first
        // photon is +, which conjugates it for patterns starting with e
        const cxd expect_phase = row.pattern[0] == 'g' ? cxd(0, 1) : cxd(0, -1);
        CHECK(std::abs(row.phase - expect_phase) < 1e-9);
    }
    // the ggg outcome pairs the all-plus and all-minus photon patterns
    CHECK(res.outcome_table[0].label == "ghz:+++");

    auto rep = complete_set_table(cfg);
    CHECK(rep.complete);
    CHECK(rep.max_gram_offdiag < 1e-9);
    CHECK(rep.total_success_prob == doctest::Approx(std::pow(0.6931380202824489, 3)).epsilon(1e-9));
}

TEST_CASE("removing the drive restricts the two-atom set") {
    auto cfg = make_config({cavity(34.0, 34.0), cavity(34.0, 34.0)});
    cfg.drive_enabled = false;
    cfg.microwave.G = 0.0;
    auto res = run_protocol(cfg);

    for (const auto& row : res.outcome_table) {
        CHECK(row.probability == doctest::Approx(0.25).epsilon(1e-10));
        if (row.pattern == "gg" || row.pattern == "ee") {
            CHECK_FALSE(row.entangled);
            CHECK(row.fidelity == doctest::Approx(0.5).epsilon(1e-9));
        } else {
            CHECK(row.entangled);
            CHECK(row.label.substr(0, 3) == "psi");
            CHECK(row.fidelity == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    // the two entangled outcomes carry opposite phases
    auto [ge_state, ge_p] = measure_atoms(res, "ge");
    auto [eg_state, eg_p] = measure_atoms(res, "eg");
    auto cge = classify_entangled_state(ge_state);
    auto ceg = classify_entangled_state(eg_state);
    CHECK(std::abs(cge.phase + cxd(0, 1)) < 1e-9);
    CHECK(std::abs(ceg.phase - cxd(0, 1)) < 1e-9);
}

TEST_CASE("classification") {
    HilbertSpace two{{{"photon1", 2}, {"photon2", 2}}};
    const cxd i1(0, 1);

    SUBCASE("exact paired states") {
        Vec v = Vec::Zero(4);
        v(0) = v(3) = 1.0 / std::sqrt(2.0);
        auto c = classify_entangled_state({two, v});
        CHECK(c.label == "phi+");
        CHECK(std::abs(c.phase - cxd(1, 0)) < 1e-12);
        CHECK(c.fidelity == doctest::Approx(1.0).epsilon(1e-12));

        Vec w = Vec::Zero(4);
        w(1) = 1.0 / std::sqrt(2.0);
        w(2) = -i1 / std::sqrt(2.0);
        auto cw = classify_entangled_state({two, w});
        CHECK(cw.label == "psi");
        CHECK(std::abs(cw.phase + i1) < 1e-12);
        CHECK(cw.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("product state scores one half") {
        Vec v = Vec::Zero(4);
        v(0) = 1.0;
        auto c = classify_entangled_state({two, v});
        CHECK(c.label == "phi");
        CHECK(c.fidelity == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("global phase invariance") {
        Vec v = Vec::Zero(4);
        v(1) = 1.0 / std::sqrt(2.0);
        v(2) = -i1 / std::sqrt(2.0);
        auto a = classify_entangled_state({two, v});
        auto b = classify_entangled_state({two, Vec(std::exp(cxd(0, 0.7)) * v)});
        CHECK(a.label == b.label);
        CHECK(std::abs(a.phase - b.phase) < 1e-12);
        CHECK(a.fidelity == doctest::Approx(b.fidelity).epsilon(1e-12));
    }

    SUBCASE("ties go to the lexicographically first family") {
        Vec v = Vec::Zero(4);
        v(0) = v(1) = 1.0 / std::sqrt(2.0);
        auto c = classify_entangled_state({two, v});
        CHECK(c.label == "phi");
        CHECK(c.fidelity == doctest::Approx(0.25).epsilon(1e-12));
    }

    SUBCASE("three-qubit pairing") {
        HilbertSpace three{{{"photon1", 2}, {"photon2", 2}, {"photon3", 2}}};
        Vec v = Vec::Zero(8);
        v(1) = 1.0 / std::sqrt(2.0);  // + + -
        v(6) = i1 / std::sqrt(2.0);   // - - +
        auto c = classify_entangled_state({three, v});
        CHECK(c.label == "ghz:++-");
        CHECK(std::abs(c.phase - i1) < 1e-12);
        CHECK(c.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("rejects non-qubit dimensions") {
        HilbertSpace odd{{{"a", 3}, {"b", 2}}};
        Vec v = Vec::Zero(6);
        v(0) = 1.0;
        CHECK_THROWS_AS(classify_entangled_state({odd, v}), std::invalid_argument);
        HilbertSpace single{{{"a", 2}}};
        Vec u = Vec::Zero(2);
        u(0) = 1.0;
        CHECK_THROWS_AS(classify_entangled_state({single, u}), std::invalid_argument);
    }

    SUBCASE("rejects unnormalized input") {
        Vec v = Vec::Zero(4);
        v(0) = 2.0;
        CHECK_THROWS_AS(classify_entangled_state({two, v}), std::invalid_argument);
    }
}

TEST_CASE("input validation") {
    auto cfg = make_config({cavity(34.0, 34.0), cavity(34.0, 34.0)});

    SUBCASE("wrong cavity count") {
        cfg.optical.pop_back();
        CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
    }

    SUBCASE("stage atom-count mismatch") {
        cfg.microwave.n_atoms = 3;
        CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
    }

    SUBCASE("plan inconsistent with the coupling") {
        cfg.plan.t0 *= 1.01;
        CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
    }

    SUBCASE("plan inconsistent with the drive amplitude") {
        cfg.microwave.G *= 1.000001;
        CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
    }

    SUBCASE("measurement pattern checks") {
        auto res = run_protocol(cfg);
        CHECK_THROWS_AS(measure_atoms(res, "g"), std::invalid_argument);
        CHECK_THROWS_AS(measure_atoms(res, "gx"), std::invalid_argument);
    }

    SUBCASE("zero-probability pattern") {
        auto one_sided = make_config({cavity(34.0, 0.0), cavity(34.0, 34.0)});
        one_sided.drive_enabled = false;
        one_sided.microwave.G = 0.0;
        auto res = run_protocol(one_sided);
        CHECK_THROWS_AS(measure_atoms(res, "ee"), std::domain_error);
    }
}
