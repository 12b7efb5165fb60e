#pragma once
// Pulse-level state-vector simulator for a d-level encoding. A pulse couples
// one ordered level pair (S-side, D-side) with an exact 2x2 propagator
// embedded in d dimensions; everything else is identity. Monte-Carlo runs
// draw one NoiseRealization per shot (counter-seeded, thread-independent) and
// apply it as detuning, phase offset, and Rabi-rate scaling.

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "baq/atomic.hpp"
#include "baq/noise.hpp"

namespace baq {

using Cx = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

// A d-level logical encoding over physical levels. states[k] is logical |k>.
// star_center is the logical index of the S1/2 hub all single-pulse
// transitions connect to (not necessarily 0; e.g. a CCCNOT encoding labels
// the hub |1110>).
struct Encoding {
    std::vector<Level> states;
    int star_center = 0;
    std::vector<int> readout_order;            // logical indices, de-shelve order
    // transition parameters per logical level pair (looked up by upper level)
    struct Edge {
        int a = 0, b = 0;                      // logical indices, a = S-side
        double freq_MHz = 0.0;
        double sens_MHz_per_G = 0.0;           // upper minus lower sensitivity
        double pi_time_us = 0.0;
        std::string transition_id;
    };
    std::vector<Edge> edges;
    int d() const { return static_cast<int>(states.size()); }
    const Edge& edge_between(int a, int b) const;  // throws if absent
};

struct Pulse {
    int a = 0, b = 0;          // logical pair; a = S-side of the transition
    double theta = 0.0;        // nominal rotation angle (rad)
    double phi = 0.0;          // programmed phase (rad)
    double duration_us = 0.0;  // 0 -> ideal instantaneous rotation
    double start_us = 0.0;     // wall-clock start, for phase bookkeeping
};

struct VirtualZ {
    std::vector<double> phases;  // length d, applied as diag(e^{i phi_k})
};

using SeqItem = std::variant<Pulse, VirtualZ>;

struct PulseSequence {
    Encoding enc;
    std::vector<SeqItem> items;
    int initial_state = 0;       // logical start index
    bool ideal_rotations = false;  // push zero-duration exact rotations

    // Append a pulse on (a,b) scheduled after the current end time plus gap;
    // duration = theta/pi * pi_time of that edge (0 when ideal_rotations).
    void push_rotation(int a, int b, double theta, double phi, double gap_us = 0.0);
    void push_wait(double wait_us) { end_us_ += wait_us; }
    void push_virtual_z(std::vector<double> phases);
    double end_us() const { return end_us_; }

   private:
    double end_us_ = 0.0;
};

// Exact propagator of H = [[0, O/2 e^{i phi}], [O/2 e^{-i phi}, dw]] over time
// t, embedded at (a,b) in d dims. Omega and dw in rad/us, t in us.
MatrixXc pulse_unitary(int d, int a, int b, double omega_rad_us, double dw_rad_us, double phi,
                       double t_us);
// Ideal limit (duration -> 0 at fixed angle): exact rotation by theta.
MatrixXc ideal_pulse_unitary(int d, int a, int b, double theta, double phi);

// Apply the full sequence under one noise realization (pass quiet params +
// zero realization for the noiseless case). Returns the final state vector.
VectorXc run_sequence(const PulseSequence& seq, const NoiseParams& noise,
                      const NoiseRealization& real);

struct MonteCarloResult {
    std::vector<double> mean_population;      // per logical level
    std::vector<double> wilson_lo, wilson_hi; // z=1 Wilson bounds
    std::size_t shots = 0;
};

struct MonteCarloOptions {
    std::size_t shots = 1024;
    std::uint64_t seed = 1;
    int threads = 1;
    bool binomial_sampling = false;  // resample outcomes before the interval
};

MonteCarloResult monte_carlo(const PulseSequence& seq, const NoiseParams& noise,
                             const MonteCarloOptions& opt);

// Build an Encoding from explicit physical levels using the carrier table for
// edges (every non-hub state must share a usable line with the hub).
Encoding make_encoding(const LevelTable& levels, const std::vector<Transition>& table,
                       const std::vector<std::pair<char, std::pair<int, int>>>& state_labels,
                       int star_center);

}  // namespace baq
