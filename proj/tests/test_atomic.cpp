#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "baq/atomic.hpp"
#include "baq/config.hpp"
#include "baq/util.hpp"

using baq::AtomicConstants;
using baq::Level;
using baq::LevelTable;
using baq::Transition;

namespace {

AtomicConstants constants() {
    return AtomicConstants::from_file(baq::default_config_path("constants_ba137.conf"));
}

// J = 1/2 closed form for H = A I.J + muB B (gJ Jz + gI Iz), I = 3/2.
// Stretched m = +-2 states are exact product states; the rest follow the
// two-level secular equation within each m block.
double breit_rabi_E(const AtomicConstants& c, int F, int m, double B) {
    const double A = c.s12.A_MHz;
    const double x = (c.s12.gJ - c.gI) * c.muB_MHz_per_G * B / (2.0 * A);
    if (std::abs(m) == 2)
        return 0.75 * A + (m / 2) * c.muB_MHz_per_G * B * (0.5 * c.s12.gJ + 1.5 * c.gI);
    const double sq = A * std::sqrt(1.0 + m * x + x * x);
    return -0.25 * A + c.gI * c.muB_MHz_per_G * m * B + (F == 2 ? sq : -sq);
}

// Field-free hyperfine energy of one F manifold (dipole + quadrupole terms).
double casimir_E(double I, double J, double A, double Bq, double F) {
    const double K = F * (F + 1) - I * (I + 1) - J * (J + 1);
    double e = 0.5 * A * K;
    if (I > 0.5 && J > 0.5)
        e += Bq * (1.5 * K * (K + 1) - 2.0 * I * (I + 1) * J * (J + 1)) /
             (4.0 * I * (2 * I - 1) * J * (2 * J - 1));
    return e;
}

}  // namespace

TEST_CASE("S1/2 energies match the closed-form two-level solution") {
    const AtomicConstants c = constants();
    for (double B : {0.05, 0.5, 4.209, 20.0}) {
        const std::vector<Level> s = baq::solve_manifold(c.I, 0.5, c.s12, c.gI,
                                                         c.muB_MHz_per_G, B);
        REQUIRE(s.size() == 8);
        for (const Level& lv : s) {
            CAPTURE(B);
            CAPTURE(lv.id);
            CHECK(std::abs(lv.E_MHz - breit_rabi_E(c, lv.F, lv.m, B)) < 1e-8);
        }
    }
}

TEST_CASE("field-free D5/2 eigenvalues match the hyperfine closed form") {
    const AtomicConstants c = constants();
    const Eigen::MatrixXd h = baq::hyperfine_hamiltonian(c.I, 2.5, c.d52);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    std::vector<double> eig(es.eigenvalues().data(), es.eigenvalues().data() + 24);
    std::vector<double> expect;
    for (double F = 1; F <= 4; F += 1.0) {
        const double e = casimir_E(c.I, 2.5, c.d52.A_MHz, c.d52.B_MHz, F);
        for (int k = 0; k < 2 * F + 1; ++k) expect.push_back(e);
    }
    std::sort(expect.begin(), expect.end());
    REQUIRE(expect.size() == 24);
    for (int k = 0; k < 24; ++k)
        CHECK(std::abs(eig[static_cast<std::size_t>(k)] -
                       expect[static_cast<std::size_t>(k)]) < 1e-9);
}

TEST_CASE("sensitivities equal finite-difference energy slopes") {
    const AtomicConstants c = constants();
    const double B = 4.209, h = 1e-4;
    const LevelTable t = baq::solve_structure(c, B);
    const LevelTable tp = baq::solve_structure(c, B + h);
    const LevelTable tm = baq::solve_structure(c, B - h);
    auto check = [&](const std::vector<Level>& lv, const std::vector<Level>& lp,
                     const std::vector<Level>& lm) {
        for (std::size_t k = 0; k < lv.size(); ++k) {
            const double fd = (lp[k].E_MHz - lm[k].E_MHz) / (2 * h);
            CAPTURE(lv[k].id);
            CHECK(lv[k].id == lp[k].id);
            CHECK(std::abs(lv[k].dEdB_MHz_per_G - fd) < 1e-6);
        }
    };
    check(t.s12, tp.s12, tm.s12);
    check(t.d52, tp.d52, tm.d52);
}

TEST_CASE("stretched-state slopes are exact product-state values") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    const double mu = c.muB_MHz_per_G;
    CHECK(std::abs(t.find('S', 2, 2).dEdB_MHz_per_G -
                   mu * (0.5 * c.s12.gJ + 1.5 * c.gI)) < 1e-10);
    CHECK(std::abs(t.find('S', 2, -2).dEdB_MHz_per_G +
                   mu * (0.5 * c.s12.gJ + 1.5 * c.gI)) < 1e-10);
    CHECK(std::abs(t.find('D', 4, 4).dEdB_MHz_per_G -
                   mu * (2.5 * c.d52.gJ + 1.5 * c.gI)) < 1e-10);
    CHECK(std::abs(t.find('D', 4, -4).dEdB_MHz_per_G +
                   mu * (2.5 * c.d52.gJ + 1.5 * c.gI)) < 1e-10);
}

TEST_CASE("level table at the operating field matches frozen anchors") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    REQUIRE(t.s12.size() == 8);
    REQUIRE(t.d52.size() == 24);
    struct Anchor {
        char manifold;
        int F, m;
        double E, slope;
    };
    const std::vector<Anchor> anchors = {
        {'S', 2, -2, 3008.251792029, -1.402082970},
        {'S', 2, -1, 3011.205723226, -0.699497756},
        {'S', 2, 0, 3014.157486187, 0.002056040},
        {'S', 2, 1, 3017.107085685, 0.702581820},
        {'S', 2, 2, 3020.054526471, 1.402082970},
        {'S', 1, 0, -5023.592925687, -0.002056040},
        {'D', 1, 0, 105.545060360, 0.344110293},
        {'D', 2, 0, 33.142635695, 0.002092691},
        {'D', 3, 1, -20.589289096, 2.140284931},
        {'D', 4, -3, -47.603320136, -4.198115695},
        {'D', 4, 4, -12.549324514, 4.200638034},
        {'D', 3, 3, -12.229694736, 4.198255360},
        {'D', 4, 3, -19.440430445, 2.522574961},
    };
    for (const Anchor& a : anchors) {
        const Level& lv = t.find(a.manifold, a.F, a.m);
        CAPTURE(lv.id);
        CHECK(std::abs(lv.E_MHz - a.E) < 1e-8);
        CHECK(std::abs(lv.dEdB_MHz_per_G - a.slope) < 1e-8);
    }
}

TEST_CASE("adiabatic labels survive the m = -3 avoided crossing") {
    const AtomicConstants c = constants();
    // the two D5/2 m = -3 levels repel near 0.0714 G; track the minimum gap
    double min_gap = 1e9, argmin = 0.0;
    for (double B = 0.05; B <= 0.10; B += 0.0002) {
        const LevelTable t = baq::solve_structure(c, B);
        const double gap =
            std::abs(t.find('D', 3, -3).E_MHz - t.find('D', 4, -3).E_MHz);
        if (gap < min_gap) {
            min_gap = gap;
            argmin = B;
        }
    }
    CHECK(argmin > 0.06);
    CHECK(argmin < 0.09);
    CHECK(min_gap < 1.0);  // MHz; the F=3/F=4 splitting here is ~28 MHz
    // labels stay consistent across the crossing
    const LevelTable lo = baq::solve_structure(c, 0.02);
    const LevelTable hi = baq::solve_structure(c, 0.3);
    CHECK(lo.find('D', 4, -3).id == hi.find('D', 4, -3).id);
}

TEST_CASE("carrier table has exactly 80 lines in the documented dm classes") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    const std::vector<Transition> table = baq::transition_table(t, c);
    CHECK(table.size() == 80);
    std::map<int, int> per_dm;
    std::set<std::string> ids;
    for (const Transition& tr : table) {
        per_dm[tr.dm]++;
        ids.insert(tr.id);
        CHECK(std::abs(tr.dm) <= 2);
        CHECK(!tr.is_sideband);
        CHECK(tr.sideband_shift_MHz == 0.0);
        CHECK(tr.rel_strength > 0.0);
        CHECK(tr.rel_strength <= 1.0 + 1e-12);
        CHECK(tr.pi_time_us > 0.0);
    }
    CHECK(ids.size() == 80);  // ids unique
    CHECK(per_dm[-2] == 14);
    CHECK(per_dm[-1] == 17);
    CHECK(per_dm[0] == 18);
    CHECK(per_dm[1] == 17);
    CHECK(per_dm[2] == 14);
}

TEST_CASE("frequencies and sensitivities are level differences plus the offset") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    const std::vector<Transition> table = baq::transition_table(t, c);
    for (const Transition& tr : table) {
        const Level& s = t.s12[static_cast<std::size_t>(tr.s_index)];
        const Level& d = t.d52[static_cast<std::size_t>(tr.d_index)];
        CHECK(s.manifold == 'S');
        CHECK(s.F == 2);
        CHECK(tr.dm == d.m - s.m);
        CHECK(std::abs(tr.freq_MHz - (d.E_MHz - s.E_MHz + c.freq_offset_MHz)) < 1e-10);
        CHECK(std::abs(tr.sens_MHz_per_G - (d.dEdB_MHz_per_G - s.dEdB_MHz_per_G)) < 1e-12);
    }
}

TEST_CASE("clock and witness lines match frozen values") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    const std::vector<Transition> table = baq::transition_table(t, c);
    auto line = [&](const std::string& id) -> const Transition& {
        for (const Transition& tr : table)
            if (tr.id == id) return tr;
        REQUIRE(false);
        return table.front();
    };
    const Transition& ins = line("S12_F2_m0>D52_F2_m0");
    CHECK(std::abs(ins.sens_MHz_per_G - 3.6651e-5) < 1e-9);
    CHECK(std::abs(ins.freq_MHz - 33.138308508) < 1e-8);
    const Transition& sens = line("S12_F2_m-1>D52_F4_m-3");
    CHECK(std::abs(sens.sens_MHz_per_G - (-3.498617939)) < 1e-8);
    CHECK(std::abs(sens.freq_MHz - (-44.655884362)) < 1e-8);
    // the sensitive witness slope sits within 1% of 3.49 MHz/G in magnitude
    CHECK(std::abs(std::abs(sens.sens_MHz_per_G) - 3.49) / 3.49 < 0.01);
}

TEST_CASE("relative strengths normalise to the strongest line per dm class") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    baq::StrengthConfig sc;
    const std::vector<Transition> table = baq::transition_table(t, c, sc);
    std::map<int, double> max_rel;
    for (const Transition& tr : table)
        max_rel[tr.dm] = std::max(max_rel[tr.dm], tr.rel_strength);
    for (const auto& [dm, rel] : max_rel) CHECK(std::abs(rel - 1.0) < 1e-12);
    for (const Transition& tr : table) {
        const std::size_t q = static_cast<std::size_t>(tr.dm + 2);
        CHECK(std::abs(tr.pi_time_us - sc.ref_pi_time_us[q] / tr.rel_strength) < 1e-9);
    }
}

TEST_CASE("explicit reference overrides rescale a dm class") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    baq::StrengthConfig sc;
    sc.ref_override[2] = "S12_F2_m0>D52_F2_m0";
    sc.ref_pi_time_us[2] = 50.0;
    const std::vector<Transition> table = baq::transition_table(t, c, sc);
    for (const Transition& tr : table) {
        if (tr.id == "S12_F2_m0>D52_F2_m0") {
            CHECK(std::abs(tr.rel_strength - 1.0) < 1e-12);
            CHECK(std::abs(tr.pi_time_us - 50.0) < 1e-9);
        }
        // pi times scale inversely with strength relative to the new reference
        if (tr.dm == 0) CHECK(std::abs(tr.pi_time_us * tr.rel_strength - 50.0) < 1e-9);
    }
}

TEST_CASE("sideband augmentation appends six shifted copies per carrier") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    const std::vector<Transition> carriers = baq::transition_table(t, c);
    const std::vector<Transition> all = baq::augment_sidebands(carriers, c);
    CHECK(all.size() == 560);
    const double scale = c.lamb_dicke * std::sqrt(c.nbar);
    CHECK(std::abs(scale - 0.16565) < 1e-4);
    // layout: carrier followed by +-x, +-y, +-z sidebands
    for (std::size_t base = 0; base < all.size(); base += 7) {
        const Transition& tr = all[base];
        CHECK(!tr.is_sideband);
        std::multiset<double> shifts;
        for (std::size_t k = 1; k < 7; ++k) {
            const Transition& sb = all[base + k];
            CHECK(sb.is_sideband);
            shifts.insert(sb.sideband_shift_MHz);
            CHECK(std::abs(sb.freq_MHz - (tr.freq_MHz + sb.sideband_shift_MHz)) < 1e-12);
            CHECK(std::abs(sb.rel_strength - tr.rel_strength * scale) < 1e-12);
            CHECK(std::abs(sb.pi_time_us - tr.pi_time_us / scale) < 1e-9);
        }
        const std::multiset<double> expect{-c.nu_x_MHz, c.nu_x_MHz, -c.nu_y_MHz,
                                           c.nu_y_MHz,  -c.nu_z_MHz, c.nu_z_MHz};
        CHECK(shifts == expect);
    }
}

TEST_CASE("constants load from the default config with citations") {
    const AtomicConstants c = constants();
    CHECK(c.I == 1.5);
    CHECK(std::abs(c.s12.A_MHz - 4018.870879) < 1e-9);
    CHECK(std::abs(c.d52.A_MHz - (-12.029234)) < 1e-9);
    CHECK(std::abs(c.d52.B_MHz - 59.51927) < 1e-9);
    CHECK(std::abs(c.gI - 3.4033122e-4) < 1e-12);
    CHECK(std::abs(c.freq_offset_MHz - 0.75 * c.s12.A_MHz) < 1e-6);
    CHECK(!c.s12.source.empty());
    CHECK(!c.d52.source.empty());
    CHECK(!c.gI_source.empty());
    CHECK(std::abs(c.field_G - 4.209) < 1e-12);
}

TEST_CASE("find and index_of agree and reject unknown labels") {
    const AtomicConstants c = constants();
    const LevelTable t = baq::solve_structure(c, 4.209);
    const Level& lv = t.find('D', 3, -2);
    CHECK(lv.id == "D52_F3_m-2");
    const int idx = t.index_of('D', 3, -2);
    CHECK(t.d52[static_cast<std::size_t>(idx)].id == lv.id);
    CHECK_THROWS_AS((void)t.find('D', 5, 0), baq::ConfigError);
    CHECK_THROWS_AS((void)t.find('P', 2, 0), baq::ConfigError);
}
