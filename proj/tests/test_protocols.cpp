#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "baq/protocols.hpp"
#include "baq/util.hpp"

using baq::CircuitItem;
using baq::Encoding;
using baq::GivensStep;
using baq::NoiseParams;
using baq::NoiseRealization;
using baq::PhaseLayer;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Cx = std::complex<double>;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const Cx kI{0.0, 1.0};

// star encoding over synthetic levels: hub plus d-1 leaves with spread-out
// field slopes, one edge per leaf
Encoding toy_encoding(int d, int star_center = 0) {
    Encoding enc;
    enc.states.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        baq::Level& lv = enc.states[static_cast<std::size_t>(k)];
        lv.manifold = (k == star_center) ? 'S' : 'D';
        lv.F = 2;
        lv.m = 0;
        lv.E_MHz = 0.0;
        lv.dEdB_MHz_per_G = (k == star_center) ? 0.002 : 1.0 + 0.37 * k;
        lv.id = "L" + std::to_string(k);
    }
    enc.star_center = star_center;
    for (int k = 0; k < d; ++k) {
        if (k == star_center) continue;
        Encoding::Edge e;
        e.a = star_center;
        e.b = k;
        e.freq_MHz = 30.0 + k;
        e.sens_MHz_per_G = enc.states[static_cast<std::size_t>(k)].dEdB_MHz_per_G - 0.002;
        e.pi_time_us = 18.0 + k;
        e.transition_id = "hub>L" + std::to_string(k);
        enc.edges.push_back(e);
        enc.readout_order.push_back(k);
    }
    return enc;
}

VectorXcd apply_steps(int d, const std::vector<GivensStep>& steps, const VectorXcd& in) {
    VectorXcd psi = in;
    for (const GivensStep& g : steps) psi = baq::givens_unitary(d, g) * psi;
    return psi;
}

std::vector<double> populations(const VectorXcd& psi) {
    std::vector<double> p(static_cast<std::size_t>(psi.size()));
    for (int k = 0; k < psi.size(); ++k) p[static_cast<std::size_t>(k)] = std::norm(psi[k]);
    return p;
}
}  // namespace

TEST_CASE("forward splitter loads every level with the same real amplitude") {
    for (int d : {2, 3, 7, 17}) {
        const std::vector<GivensStep> fwd = baq::ramsey_forward_steps(d);
        REQUIRE(fwd.size() == static_cast<std::size_t>(d - 1));
        VectorXcd psi = VectorXcd::Zero(d);
        psi(0) = 1.0;
        psi = apply_steps(d, fwd, psi);
        for (int k = 0; k < d; ++k) {
            CHECK(std::abs(psi(k).real() - 1.0 / std::sqrt(d)) < 1e-12);
            CHECK(std::abs(psi(k).imag()) < 1e-12);
        }
    }
}

TEST_CASE("closed-form fringe populations match the brute-force product") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> phis(-kPi, 3 * kPi);
    for (int d = 2; d <= 10; ++d) {
        const std::vector<GivensStep> fwd = baq::ramsey_forward_steps(d);
        for (int trial = 0; trial < 20; ++trial) {
            const double phi = phis(rng);
            VectorXcd psi = VectorXcd::Zero(d);
            psi(0) = 1.0;
            psi = apply_steps(d, fwd, psi);
            psi = apply_steps(d, baq::ramsey_reverse_steps(d, phi), psi);
            const std::vector<double> brute = populations(psi);
            const std::vector<double> closed = baq::ramsey_ideal_populations(d, phi);
            REQUIRE(closed.size() == brute.size());
            double total = 0.0;
            for (int k = 0; k < d; ++k) {
                const std::size_t sk = static_cast<std::size_t>(k);
                CHECK(std::abs(closed[sk] - brute[sk]) < 1e-10);
                CHECK(std::abs(baq::ramsey_ideal_population(d, k, phi) - brute[sk]) < 1e-10);
                total += closed[sk];
            }
            CHECK(std::abs(total - 1.0) < 1e-10);
            CHECK(std::abs(baq::ramsey_ideal_p0(d, phi) - brute[0]) < 1e-10);
        }
    }
}

TEST_CASE("the fringe vanishes at every nontrivial d-th root phase") {
    for (int d = 2; d <= 17; ++d) {
        CHECK(std::abs(baq::ramsey_ideal_p0(d, 0.0) - 1.0) < 1e-12);
        for (int k = 1; k < d; ++k)
            CHECK(std::abs(baq::ramsey_ideal_p0(d, 2 * kPi * k / d)) < 1e-12);
        // one full turn brings the peak back
        CHECK(std::abs(baq::ramsey_ideal_p0(d, 2 * kPi) - 1.0) < 1e-12);
    }
}

TEST_CASE("reference phase sits on an exact zero so the ideal contrast is one") {
    CHECK(baq::ramsey_reference_phase(4) == doctest::Approx(kPi));
    CHECK(baq::ramsey_reference_phase(5) == doctest::Approx(kPi * 4.0 / 5.0));
    for (int d = 2; d <= 17; ++d) {
        CHECK(std::abs(baq::ramsey_ideal_p0(d, baq::ramsey_reference_phase(d))) < 1e-12);
        CHECK(std::abs(baq::ramsey_ideal_contrast(d) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS((void)baq::ramsey_reference_phase(1), baq::ConfigError);
}

TEST_CASE("detuned fringe matches a product with an explicit wait layer") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    std::uniform_real_distribution<double> phis(0.0, 2 * kPi);
    for (int d : {2, 4, 7}) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> delta(static_cast<std::size_t>(d), 0.0);
            for (int m = 1; m < d; ++m) delta[static_cast<std::size_t>(m)] = u(rng);
            const double t_us = 250.0, phi = phis(rng);

            VectorXcd psi = VectorXcd::Zero(d);
            psi(0) = 1.0;
            psi = apply_steps(d, baq::ramsey_forward_steps(d), psi);
            for (int m = 0; m < d; ++m)
                psi(m) *= std::exp(-kI * delta[static_cast<std::size_t>(m)] * t_us);
            psi = apply_steps(d, baq::ramsey_reverse_steps(d, phi), psi);
            CHECK(std::abs(baq::ramsey_detuned_p0(d, phi, delta, t_us) - std::norm(psi(0))) <
                  1e-10);
        }
    }
    std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS((void)baq::ramsey_detuned_p0(4, 0.0, wrong, 1.0), baq::ConfigError);
}

TEST_CASE("simulated sequence reproduces the analytics up to seventeen levels") {
    for (int d : {2, 5, 11, 17}) {
        const Encoding enc = toy_encoding(d);
        for (double phi : {0.0, 0.9, baq::ramsey_reference_phase(d)}) {
            baq::RamseySequenceOptions opts;
            opts.ideal_pulses = true;
            const baq::PulseSequence seq = baq::make_ramsey_sequence(enc, phi, opts);
            const VectorXcd psi =
                baq::run_sequence(seq, NoiseParams::quiet(), NoiseRealization{});
            const std::vector<double> want = baq::ramsey_ideal_populations(d, phi);
            for (int k = 0; k < d; ++k)
                CHECK(std::abs(std::norm(psi(k)) - want[static_cast<std::size_t>(k)]) <
                      1e-10);
        }
    }
    // finite-duration pulses with gaps change nothing in the absence of noise
    const Encoding enc = toy_encoding(9);
    baq::RamseySequenceOptions opts;
    opts.ideal_pulses = false;
    opts.wait_us = 250.0;
    opts.gap_us = 2.0;
    const baq::PulseSequence seq = baq::make_ramsey_sequence(enc, 0.35, opts);
    const VectorXcd psi = baq::run_sequence(seq, NoiseParams::quiet(), NoiseRealization{});
    const std::vector<double> want = baq::ramsey_ideal_populations(9, 0.35);
    for (int k = 0; k < 9; ++k)
        CHECK(std::abs(std::norm(psi(k)) - want[static_cast<std::size_t>(k)]) < 1e-10);
}

TEST_CASE("a static field offset shifts the simulated fringe as the formula says") {
    const int d = 5;
    const Encoding enc = toy_encoding(d);
    NoiseRealization r;
    r.dB_G = 1.7e-3;
    const double tau = 300.0;
    for (double phi : {0.2, 1.4, 4.4}) {
        baq::RamseySequenceOptions opts;
        opts.ideal_pulses = true;
        opts.wait_us = tau;
        const baq::PulseSequence seq = baq::make_ramsey_sequence(enc, phi, opts);
        const VectorXcd psi = baq::run_sequence(seq, NoiseParams::quiet(), r);
        std::vector<double> delta(static_cast<std::size_t>(d), 0.0);
        for (int m = 1; m < d; ++m)
            delta[static_cast<std::size_t>(m)] =
                2 * kPi *
                (enc.states[static_cast<std::size_t>(m)].dEdB_MHz_per_G - 0.002) * r.dB_G;
        CHECK(std::abs(std::norm(psi(0)) - baq::ramsey_detuned_p0(d, phi, delta, tau)) <
              1e-10);
    }
}

TEST_CASE("noise-free contrast scan reports unit contrast at every dimension") {
    const Encoding enc = toy_encoding(6);
    baq::ContrastScanOptions opts;
    opts.shots = 40;
    opts.seed = 5;
    const std::vector<int> dims = {2, 4, 6};
    const std::vector<baq::ContrastPoint> pts =
        baq::contrast_scan(enc, NoiseParams::quiet(), dims, opts);
    REQUIRE(pts.size() == dims.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].d == dims[i]);
        CHECK(pts[i].ideal == doctest::Approx(1.0));
        CHECK(pts[i].p0_peak == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(pts[i].p0_ref == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(pts[i].contrast == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(pts[i].peak_lo <= pts[i].p0_peak + 1e-12);
        CHECK(pts[i].peak_hi >= pts[i].p0_peak - 1e-12);
        CHECK(pts[i].ref_lo <= pts[i].p0_ref + 1e-12);
        CHECK(pts[i].ref_hi >= pts[i].p0_ref - 1e-12);
    }
}

TEST_CASE("oracle phase layer flags exactly the odd-parity indices") {
    const std::vector<double> ph = baq::bv_oracle_phases(3, 0b101);
    REQUIRE(ph.size() == 8);
    for (int x = 0; x < 8; ++x) {
        const bool odd = std::popcount(static_cast<unsigned>(x) & 0b101u) & 1;
        CHECK(ph[static_cast<std::size_t>(x)] == doctest::Approx(odd ? kPi : 0.0));
    }
}

TEST_CASE("noise-free queries find every secret with certainty") {
    for (int n : {2, 3}) {
        const int d = 1 << n;
        const Encoding enc = toy_encoding(d);
        for (std::uint64_t secret = 0; secret < static_cast<std::uint64_t>(d); ++secret) {
            for (bool fast : {true, false}) {
                baq::BvOptions opts;
                opts.fast_superposition = fast;
                opts.shots = 0;
                opts.ideal_pulses = true;
                const baq::BvResult res =
                    baq::bernstein_vazirani(enc, NoiseParams::quiet(), n, secret, opts);
                CHECK(res.n == n);
                CHECK(res.secret == secret);
                CHECK(res.success == doctest::Approx(1.0).epsilon(1e-9));
                double total = 0.0;
                for (double p : res.populations) total += p;
                CHECK(std::abs(total - 1.0) < 1e-9);
                CHECK(res.pulse_count > 0);
            }
        }
    }
    const Encoding small = toy_encoding(4);
    CHECK_THROWS_AS(
        (void)baq::bernstein_vazirani(small, NoiseParams::quiet(), 3, 1, baq::BvOptions{}),
        baq::ConfigError);
}

TEST_CASE("noise-free controlled flip realizes the exact permutation") {
    const Encoding enc = toy_encoding(16);
    baq::CccnotOptions opts;
    opts.shots = 0;
    opts.ideal_pulses = true;
    const baq::CccnotResult res =
        baq::cccnot_truth_table(enc, NoiseParams::quiet(), opts);
    REQUIRE(res.success.size() == 16);
    for (double s : res.success) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.mean_success == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.pulse_count == 1);
}

TEST_CASE("hub relabeling is the transposition it claims to be") {
    const std::vector<int> perm = baq::hub_relabeling(16, 14);
    REQUIRE(perm.size() == 16);
    CHECK(perm[0] == 14);
    CHECK(perm[14] == 0);
    CHECK(perm[15] == 15);
    CHECK(perm[7] == 7);
    for (int k = 0; k < 16; ++k)
        CHECK(perm[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] == k);
    const std::vector<int> id = baq::hub_relabeling(5, 0);
    for (int k = 0; k < 5; ++k) CHECK(id[static_cast<std::size_t>(k)] == k);
}

TEST_CASE("circuits land on the right physical levels when the hub is not zero") {
    const int d = 4;
    const Encoding enc = toy_encoding(d, /*star_center=*/2);
    // compiler coordinates: 0 -> physical 2 (hub), leaves 1,2,3 -> 0,1,3
    std::vector<CircuitItem> items;
    items.emplace_back(GivensStep{1, 1.1, 0.4});
    items.emplace_back(PhaseLayer{{0.0, 0.7, -0.3, 0.1}});
    items.emplace_back(GivensStep{3, 0.8, 2.0});
    const baq::PulseSequence seq = baq::circuit_to_sequence(enc, items, true);
    baq::PulseSequence start = seq;
    start.initial_state = 2;  // hub
    const VectorXcd psi =
        baq::run_sequence(start, NoiseParams::quiet(), NoiseRealization{});

    MatrixXcd U = baq::givens_unitary(d, std::get<GivensStep>(items[0]));
    MatrixXcd Z = MatrixXcd::Zero(d, d);
    const std::vector<double>& ph = std::get<PhaseLayer>(items[1]).phases;
    for (int k = 0; k < d; ++k) Z(k, k) = std::exp(kI * ph[static_cast<std::size_t>(k)]);
    U = baq::givens_unitary(d, std::get<GivensStep>(items[2])) * Z * U;
    VectorXcd ref = VectorXcd::Zero(d);
    ref(0) = 1.0;
    ref = U * ref;
    const int slot_of[4] = {2, 0, 1, 3};  // compiler index -> physical level
    for (int k = 0; k < d; ++k)
        CHECK(std::abs(std::norm(psi(slot_of[k])) - std::norm(ref(k))) < 1e-12);
}
