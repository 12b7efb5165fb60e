#pragma once
// Multi-level interference protocols run on a star encoding: the generalized
// Ramsey fringe with its closed-form populations and contrast, the
// Bernstein-Vazirani search, and the four-qubit-encoded CCCNOT truth table.

#include <cstdint>
#include <string>
#include <vector>

#include "baq/compiler.hpp"
#include "baq/noise.hpp"
#include "baq/sim.hpp"

namespace baq {

// ---- generalized Ramsey -------------------------------------------------

// Forward splitter: leaf l = 1..d-1 gets theta_l = 2 asin(sqrt(1/(d-l+1)))
// at programmed phase -pi/2 (so amplitudes enter with +1/sqrt(d) sign).
std::vector<GivensStep> ramsey_forward_steps(int d);
// Inverse pass with the analysis phase folded in: leaves d-1..1, programmed
// phase pi/2 + l*phi.
std::vector<GivensStep> ramsey_reverse_steps(int d, double phi);

struct RamseySequenceOptions {
    double wait_us = 0.0;    // free evolution inserted between the passes
    bool ideal_pulses = true;  // zero-duration pulses when true
    double gap_us = 0.0;     // idle gap after every pulse
};

PulseSequence make_ramsey_sequence(const Encoding& enc, double phi,
                                   const RamseySequenceOptions& opts = {});

// Noise-free populations after the full sequence at analysis phase phi.
double ramsey_ideal_p0(int d, double phi);
double ramsey_ideal_population(int d, int level, double phi);
std::vector<double> ramsey_ideal_populations(int d, double phi);

// |0> return probability when level m sits delta[m] rad/us above its nominal
// frame energy during the wait (amplitude factor e^{-i delta[m] t}; t in us;
// delta[0] ignored, sized d).
double ramsey_detuned_p0(int d, double phi, const std::vector<double>& delta_rad_us,
                         double t_us);

// Analysis phase of the contrast reference point: pi for even d,
// pi*(d-1)/d for odd d (the minimum of the ideal fringe).
double ramsey_reference_phase(int d);
double ramsey_ideal_contrast(int d);

struct ContrastPoint {
    int d = 0;
    double p0_peak = 0.0, peak_lo = 0.0, peak_hi = 0.0;
    double p0_ref = 0.0, ref_lo = 0.0, ref_hi = 0.0;
    double contrast = 0.0;
    double ideal = 0.0;
};

struct ContrastScanOptions {
    int shots = 400;
    std::uint64_t seed = 1;
    int threads = 1;
    double wait_us = 0.0;
    bool ideal_pulses = false;  // finite-duration pulses feel timing noise
};

// Monte-Carlo contrast under noise for each dimension, reusing the leading
// d levels of the encoding (enc.d() >= max d).
std::vector<ContrastPoint> contrast_scan(const Encoding& enc, const NoiseParams& noise,
                                         const std::vector<int>& dims,
                                         const ContrastScanOptions& opts = {});

// ---- Bernstein-Vazirani -------------------------------------------------

struct BvOptions {
    bool fast_superposition = true;  // d-1 rotations instead of compiled H^(x)n
    int shots = 0;                   // 0: noise-free single-state evaluation
    std::uint64_t seed = 1;
    int threads = 1;
    bool ideal_pulses = false;
    OptimizeOptions compile_opts{};
};

struct BvResult {
    int n = 0;
    std::uint64_t secret = 0;
    double success = 0.0;            // probability of reading out the secret
    std::vector<double> populations;  // full distribution over the d outcomes
    std::size_t pulse_count = 0;
};

// Oracle is a diagonal +-1 phase layer: phase pi on x with odd popcount(x & s).
std::vector<double> bv_oracle_phases(int n, std::uint64_t secret);

BvResult bernstein_vazirani(const Encoding& enc, const NoiseParams& noise, int n,
                            std::uint64_t secret, const BvOptions& opts = {});

// ---- CCCNOT -------------------------------------------------------------

struct CccnotOptions {
    int shots = 0;  // 0: noise-free
    std::uint64_t seed = 1;
    int threads = 1;
    bool ideal_pulses = false;
};

struct CccnotResult {
    std::vector<double> success;  // P(correct output | input x), x = 0..15
    double mean_success = 0.0;
    std::size_t pulse_count = 0;  // 1: a single pi rotation on (14,15)
};

// Four qubits on d = 16; the hub carries logical 14 (binary 1110) so the
// controlled flip 14<->15 is one hub-leaf pi pulse.
CccnotResult cccnot_truth_table(const Encoding& enc, const NoiseParams& noise,
                                const CccnotOptions& opts = {});

// ---- helpers ------------------------------------------------------------

// Map a circuit in compiler coordinates (hub = 0) onto physical pulses:
// compiler 0 rides on enc.star_center, leaves fill the remaining slots in
// ascending order. Phase layers are reindexed the same way.
PulseSequence circuit_to_sequence(const Encoding& enc, const std::vector<CircuitItem>& items,
                                  bool ideal_pulses, double gap_us = 0.0);

// Computational label -> compiler index: swaps 0 with hub_logical (an
// involution), identity elsewhere. Lets a circuit whose hub carries a nonzero
// computational label (e.g. |1110> for the controlled flip) reuse the
// compiler's hub-at-0 convention.
std::vector<int> hub_relabeling(int d, int hub_logical);

}  // namespace baq
