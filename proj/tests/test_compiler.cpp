#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "baq/compiler.hpp"
#include "baq/util.hpp"

using baq::CircuitItem;
using baq::GivensStep;
using baq::PhaseLayer;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Cx = std::complex<double>;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const Cx kI{0.0, 1.0};

MatrixXcd haar_unitary(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    MatrixXcd A(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) A(r, c) = Cx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<MatrixXcd> qr(A);
    MatrixXcd Q = qr.householderQ();
    const MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < d; ++c) Q.col(c) *= R(c, c) / std::abs(R(c, c));
    return Q;
}

// dense random orthogonal matrix with random column phases tacked on: the
// exact sweep handles this family without any optimizer help
MatrixXcd phased_orthogonal(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd A(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) A(r, c) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < d; ++c) Q.col(c) *= (R(c, c) < 0 ? -1.0 : 1.0);
    std::uniform_real_distribution<double> ph(0.0, 2 * kPi);
    MatrixXcd U = Q.cast<Cx>();
    for (int c = 0; c < d; ++c) U.col(c) *= std::exp(kI * ph(rng));
    return U;
}

MatrixXcd apply_items(int d, const std::vector<CircuitItem>& items) {
    MatrixXcd U = MatrixXcd::Identity(d, d);
    for (const CircuitItem& it : items) {
        if (std::holds_alternative<GivensStep>(it)) {
            U = baq::givens_unitary(d, std::get<GivensStep>(it)) * U;
        } else {
            const PhaseLayer& pl = std::get<PhaseLayer>(it);
            MatrixXcd Z = MatrixXcd::Zero(d, d);
            for (int k = 0; k < d; ++k) Z(k, k) = std::exp(kI * pl.phases[k]);
            U = Z * U;
        }
    }
    return U;
}

std::size_t pulse_count(const std::vector<CircuitItem>& items) {
    std::size_t n = 0;
    for (const CircuitItem& it : items)
        if (std::holds_alternative<GivensStep>(it)) ++n;
    return n;
}
}  // namespace

TEST_CASE("hub rotations carry the documented block and compose in time order") {
    GivensStep g{2, 1.3, 0.4};
    const MatrixXcd U = baq::givens_unitary(4, g);
    CHECK((U * U.adjoint() - MatrixXcd::Identity(4, 4)).norm() < 1e-13);
    CHECK(std::abs(U(0, 0) - Cx(std::cos(0.65), 0)) < 1e-15);
    CHECK(std::abs(U(0, 2) - (-kI * std::exp(kI * 0.4) * std::sin(0.65))) < 1e-15);
    CHECK(std::abs(U(2, 0) - (-kI * std::exp(-kI * 0.4) * std::sin(0.65))) < 1e-15);
    CHECK(std::abs(U(1, 1) - Cx(1, 0)) < 1e-15);
    CHECK(std::abs(U(3, 3) - Cx(1, 0)) < 1e-15);

    GivensStep h{1, 0.9, 5.2};
    const std::vector<double> vz = {0.3, -0.2, 1.0, 0.0};
    MatrixXcd Z = MatrixXcd::Zero(4, 4);
    for (int k = 0; k < 4; ++k) Z(k, k) = std::exp(kI * vz[static_cast<std::size_t>(k)]);
    const MatrixXcd manual = baq::givens_unitary(4, h) * U * Z;
    CHECK((baq::circuit_unitary(4, {g, h}, vz) - manual).norm() < 1e-13);
}

TEST_CASE("phase-aligned cost ignores a global phase and nothing else") {
    const MatrixXcd U = haar_unitary(5, 42);
    CHECK(baq::aligned_cost(U, U) < 1e-12);
    CHECK(baq::aligned_cost(U, std::exp(kI * 1.234) * U) < 1e-12);
    MatrixXcd X = MatrixXcd::Zero(2, 2);
    X(0, 1) = X(1, 0) = 1.0;
    CHECK(baq::aligned_cost(MatrixXcd::Identity(2, 2), X) == doctest::Approx(4.0));
    const MatrixXcd V = haar_unitary(5, 43);
    CHECK(baq::aligned_cost(U, V) > 1e-3);
}

TEST_CASE("exact decomposition hits the generic step count and reconstructs") {
    for (int d = 3; d <= 8; ++d) {
        const MatrixXcd U = phased_orthogonal(d, 100u + static_cast<unsigned>(d));
        const baq::StarDecomposition sd = baq::star_decompose(U);
        CHECK(sd.diagonal_ok);
        const std::size_t expected =
            static_cast<std::size_t>((d - 1) * (d + 4) / 2);
        CHECK(sd.steps.size() == expected);
        const MatrixXcd R = baq::circuit_unitary(d, sd.steps, sd.vz_phases);
        CHECK((R - U).norm() < 1e-10);  // phases line up exactly, not just aligned
    }
}

TEST_CASE("diagonal targets reduce to the two fixed swap pulses per column") {
    // the swap cycle always plays its pi/2 bookends, so a diagonal target
    // costs 2(d-1) raw steps; fusion then cancels every one of them
    const baq::StarDecomposition sd = baq::star_decompose(MatrixXcd::Identity(6, 6));
    CHECK(sd.steps.size() == 10);
    CHECK(baq::fuse_adjacent(sd.steps).empty());
    MatrixXcd D = MatrixXcd::Zero(4, 4);
    for (int k = 0; k < 4; ++k) D(k, k) = std::exp(kI * (0.3 * k - 1.0));
    const baq::StarDecomposition sdd = baq::star_decompose(D);
    CHECK(sdd.steps.size() == 6);
    CHECK((baq::circuit_unitary(4, sdd.steps, sdd.vz_phases) - D).norm() < 1e-12);
}

TEST_CASE("fully complex targets need the optimizer leg") {
    const MatrixXcd U = haar_unitary(4, 77);
    CHECK_THROWS_AS((void)baq::star_decompose(U), baq::NumericalError);
    baq::StarDecomposition sd = baq::star_decompose(U, 1e-12, /*strict=*/false);
    CHECK_FALSE(sd.diagonal_ok);
    CHECK(sd.steps.size() == 12);
    const baq::OptimizeResult res = baq::optimize_continuous(sd.steps, sd.vz_phases, U);
    CHECK(res.cost < 1e-10);
    CHECK(baq::aligned_cost(baq::circuit_unitary(4, sd.steps, sd.vz_phases), U) < 1e-10);
}

TEST_CASE("adjacent same-axis rotations fuse without changing the unitary") {
    const std::vector<GivensStep> raw = {
        {1, 0.8, 1.1}, {1, 0.9, 1.1},           // same phase: angles add
        {2, 0.5, 0.2}, {2, 0.4, 0.2 + kPi},     // opposite phase: angles subtract
        {3, 0.0, 2.0},                          // null rotation, dropped
        {1, 1.5 * kPi, 0.7}, {1, kPi, 0.7},     // sum exceeds 2 pi, gets folded
    };
    const std::vector<GivensStep> fused = baq::fuse_adjacent(raw);
    CHECK(fused.size() == 3);
    const std::vector<double> vz(5, 0.0);
    CHECK((baq::circuit_unitary(5, fused, vz) - baq::circuit_unitary(5, raw, vz)).norm() <
          1e-12);
    for (const GivensStep& g : fused) {
        CHECK(g.theta >= 0.0);
        CHECK(g.theta <= 2 * kPi + 1e-12);
    }
    // a different leaf in between blocks fusion
    const std::vector<GivensStep> blocked = {{1, 0.4, 0.0}, {2, 0.4, 0.0}, {1, 0.4, 0.0}};
    CHECK(baq::fuse_adjacent(blocked).size() == 3);
}

TEST_CASE("continuous polish recovers an exact circuit from a perturbed start") {
    const int d = 4;
    const MatrixXcd U = phased_orthogonal(d, 7);
    const baq::StarDecomposition sd = baq::star_decompose(U);
    std::vector<GivensStep> steps = sd.steps;
    std::vector<double> vz = sd.vz_phases;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> nudge(-0.02, 0.02);
    for (GivensStep& g : steps) {
        g.theta += nudge(rng);
        g.phi += nudge(rng);
    }
    const double before = baq::aligned_cost(baq::circuit_unitary(d, steps, vz), U);
    CHECK(before > 1e-6);
    const baq::OptimizeResult res = baq::optimize_continuous(steps, vz, U);
    CHECK(res.cost < 1e-12);
    CHECK(baq::aligned_cost(baq::circuit_unitary(d, steps, vz), U) < 1e-12);
    for (const GivensStep& g : steps) {
        CHECK(g.theta >= 0.0);
        CHECK(g.theta <= 2 * kPi);
        CHECK(g.phi >= 0.0);
        CHECK(g.phi <= 2 * kPi);
    }
}

TEST_CASE("pulse elimination shortens generic four-level circuits") {
    double before_total = 0.0, after_total = 0.0;
    for (std::uint64_t s = 0; s < 4; ++s) {
        const MatrixXcd U = haar_unitary(4, 300 + s);
        const baq::CompiledCircuit cc = baq::compile_unitary(U, 1e-3);
        CHECK(cc.report.algorithm_steps == 12);
        CHECK(cc.report.final_steps <= cc.report.fused_steps);
        CHECK(cc.report.cost <= 1e-3);
        CHECK(baq::aligned_cost(baq::circuit_unitary(4, cc.steps, cc.vz_phases), U) <=
              1e-3);
        before_total += static_cast<double>(cc.report.algorithm_steps);
        after_total += static_cast<double>(cc.report.final_steps);
    }
    CHECK(after_total < before_total);  // some savings on every batch
}

TEST_CASE("compiling the identity leaves nothing to play") {
    const baq::CompiledCircuit cc = baq::compile_unitary(MatrixXcd::Identity(5, 5), 1e-3);
    CHECK(cc.report.final_steps == 0);
    CHECK(cc.report.cost < 1e-3);
}

TEST_CASE("hadamard powers have the parity sign structure") {
    for (int n : {1, 2, 3}) {
        const int d = 1 << n;
        const MatrixXcd H = baq::hadamard_power(n);
        const double a = 1.0 / std::sqrt(static_cast<double>(d));
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const double sign =
                    (std::popcount(static_cast<unsigned>(r) & static_cast<unsigned>(c)) % 2)
                        ? -1.0
                        : 1.0;
                CHECK(std::abs(H(r, c) - Cx(sign * a, 0)) < 1e-14);
            }
    }
}

TEST_CASE("superposition ladder splits the hub evenly") {
    for (int d : {2, 5, 9, 25}) {
        const std::vector<GivensStep> steps = baq::superposition_steps(d);
        CHECK(steps.size() == static_cast<std::size_t>(d - 1));
        for (int l = 1; l < d; ++l) {
            CHECK(steps[static_cast<std::size_t>(l - 1)].leaf == l);
            const double want = 2 * std::asin(std::sqrt(1.0 / (d - l + 1)));
            CHECK(steps[static_cast<std::size_t>(l - 1)].theta ==
                  doctest::Approx(want).epsilon(1e-12));
        }
        VectorXcd psi = VectorXcd::Zero(d);
        psi(0) = 1.0;
        const std::vector<double> vz(static_cast<std::size_t>(d), 0.0);
        psi = baq::circuit_unitary(d, steps, vz) * psi;
        for (int k = 0; k < d; ++k)
            CHECK(std::abs(psi(k)) == doctest::Approx(1.0 / std::sqrt(d)).epsilon(1e-12));
    }
}

TEST_CASE("compiled two-qubit hadamard stays within seven pulses") {
    const baq::NamedCircuit nc = baq::build_named_circuit("H2");
    CHECK(nc.d == 4);
    CHECK(pulse_count(nc.items) <= 7);
    CHECK(baq::aligned_cost(apply_items(4, nc.items), baq::hadamard_power(2)) <= 1e-3);
}

TEST_CASE("query circuits send the hub to the secret index") {
    const int n = 2, d = 4;
    for (std::uint64_t secret = 0; secret < 4; ++secret) {
        const baq::NamedCircuit nc = baq::build_named_circuit("bv", n, secret);
        CHECK(nc.d == d);
        VectorXcd psi = VectorXcd::Zero(d);
        psi(0) = 1.0;
        psi = apply_items(d, nc.items) * psi;
        CHECK(std::norm(psi(static_cast<int>(secret))) > 0.99);
    }
    // the oracle layer itself is free: pi phases exactly where the parity is odd
    const baq::NamedCircuit nc = baq::build_named_circuit("bv", 3, 0b101);
    CHECK(nc.d == 8);
    VectorXcd psi = VectorXcd::Zero(8);
    psi(0) = 1.0;
    psi = apply_items(8, nc.items) * psi;
    CHECK(std::norm(psi(0b101)) > 0.99);
}

TEST_CASE("the four-qubit controlled flip is one hub pulse in disguise") {
    const baq::NamedCircuit nc = baq::build_named_circuit("cccnot");
    CHECK(nc.d == 16);
    CHECK(nc.hub_logical == 14);
    CHECK(pulse_count(nc.items) == 1);
    for (const CircuitItem& it : nc.items)
        if (std::holds_alternative<GivensStep>(it)) {
            const GivensStep& g = std::get<GivensStep>(it);
            CHECK(g.leaf == 15);
            CHECK(g.theta == doctest::Approx(kPi));
        }
}

TEST_CASE("unknown circuit names are rejected") {
    CHECK_THROWS_AS((void)baq::build_named_circuit("nope"), baq::ConfigError);
}
