#pragma once
// Star-topology Givens compiler. Every emitted rotation couples the hub index
// (0 in compiler coordinates) to one leaf. Pipeline: exact sweep/swap-cycle
// decomposition -> axis-aligned fusion -> box-constrained continuous
// (theta, phi) polishing against the target -> greedy pulse elimination.
// Diagonal residuals are exported as virtual-Z frame phases (free operations);
// all costs are squared Frobenius distances after global-phase alignment.

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace baq {

// Played rotation on (hub, leaf): block [[cos(t/2), -i e^{i phi} sin(t/2)],
// [-i e^{-i phi} sin(t/2), cos(t/2)]], theta in [0, 2pi], phi in [0, 2pi].
struct GivensStep {
    int leaf = 0;
    double theta = 0.0;
    double phi = 0.0;
};

struct PhaseLayer {
    std::vector<double> phases;  // diag(e^{i phase_k}), a virtual-Z layer
};

using CircuitItem = std::variant<GivensStep, PhaseLayer>;

Eigen::MatrixXcd givens_unitary(int d, const GivensStep& g);
// Compose steps (applied left to right in time) after an initial frame layer.
Eigen::MatrixXcd circuit_unitary(int d, const std::vector<GivensStep>& steps,
                                 const std::vector<double>& vz_phases);

// Squared Frobenius distance minimized over a global phase:
// 2d - 2|tr(U^dag V)|.
double aligned_cost(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& V);

struct StarDecomposition {
    std::vector<GivensStep> steps;    // in application order
    std::vector<double> vz_phases;    // phases of the diagonal residual
    Eigen::MatrixXcd residual;        // terminal V (diagnostics)
    bool diagonal_ok = false;         // residual diagonal within tolerance
    double off_diagonal_norm = 0.0;
};

// Initial sweep + swap cycles with skip tolerance eps on eliminations.
// Real targets (up to per-column phases, which are pre-absorbed into the
// virtual-Z layer) terminate with a diagonal V; strict=true throws
// NumericalError otherwise, strict=false returns the partial result for the
// optimizer to finish.
StarDecomposition star_decompose(const Eigen::MatrixXcd& U, double eps = 1e-12,
                                 bool strict = true);

// Merge adjacent same-leaf rotations whose phases are equal or opposite
// (mod 2pi); null rotations are dropped. Angles reduce mod the rotation
// period.
std::vector<GivensStep> fuse_adjacent(const std::vector<GivensStep>& steps, double tol = 1e-12);

struct OptimizeOptions {
    int max_iterations = 400;
    int restarts = 4;          // seeded random restarts on stagnation
    std::uint64_t seed = 7;
    double grad_tol = 1e-12;
};

struct OptimizeResult {
    double cost = 0.0;
    int iterations = 0;
    int restarts_used = 0;
};

// Projected-gradient L-BFGS over all (theta, phi) in [0, 2pi]^2 plus the d
// virtual-Z phases. Analytic gradient (validated against finite differences
// in the tests). Modifies steps/vz in place.
OptimizeResult optimize_continuous(std::vector<GivensStep>& steps, std::vector<double>& vz,
                                   const Eigen::MatrixXcd& target,
                                   const OptimizeOptions& opts = {});

struct EliminateResult {
    int removed = 0;
    double cost = 0.0;
};

// Greedy: try deleting each pulse, re-optimize the survivors, keep the
// deletion while the aligned cost stays below eps. Deterministic scan order.
EliminateResult eliminate_pulses(std::vector<GivensStep>& steps, std::vector<double>& vz,
                                 const Eigen::MatrixXcd& target, double eps = 1e-3,
                                 const OptimizeOptions& opts = {});

struct CompileReport {
    std::size_t algorithm_steps = 0;
    std::size_t fused_steps = 0;
    std::size_t final_steps = 0;
    double cost = 0.0;
    double ms_decompose = 0.0, ms_optimize = 0.0, ms_eliminate = 0.0;
};

struct CompiledCircuit {
    std::vector<GivensStep> steps;
    std::vector<double> vz_phases;  // frame layer applied before the steps
    CompileReport report;
};

CompiledCircuit compile_unitary(const Eigen::MatrixXcd& target, double eps = 1e-3,
                                const OptimizeOptions& opts = {});

// Named circuits in compiler coordinates (hub = index 0 unless noted).
Eigen::MatrixXcd hadamard_power(int n);  // H^(x)n, d = 2^n
// Equal-superposition preparation from |0>: d-1 rotations with
// theta_l = 2 asin(sqrt(1/(d-l+1))).
std::vector<GivensStep> superposition_steps(int d);

struct NamedCircuit {
    int d = 0;
    std::vector<CircuitItem> items;
    // logical label of the hub in the intended encoding (e.g. 14 for the
    // four-qubit-encoded controlled-swap); identity mapping when 0.
    int hub_logical = 0;
    std::string description;
    CompileReport report;  // from any embedded compile
};

// name in {"H2","H3","superposition","bv","cccnot"}; n/secret used by
// superposition (d = n), bv (d = 2^n, secret bitstring, fast = abbreviated
// first layer).
NamedCircuit build_named_circuit(const std::string& name, int n = 0,
                                 std::uint64_t secret = 0, bool fast = true,
                                 const OptimizeOptions& opts = {});

}  // namespace baq
