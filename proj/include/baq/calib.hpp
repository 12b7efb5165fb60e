#pragma once
// Two-point Ramsey detuning estimator and its statistics, plus the
// triplet-interpolation scheme that transfers a measured field offset from two
// witness transitions to a target transition through sensitivity slopes.

#include <cstdint>
#include <vector>

#include "baq/noise.hpp"

namespace baq {

struct RamseyConfig {
    double omega_kHz = 10.0;    // cyclic Rabi frequency of the probe pulses
    double tpulse_us = 0.0;     // 0 -> default 1/(4*omega) (a pi/2 pulse)
    double tau_us = 100.0;      // free-evolution wait
    double T2star_us = 1e9;     // coherence time applied to the wait segment
    double t_pulse() const { return tpulse_us > 0 ? tpulse_us : 250.0 / omega_kHz; }
};

// Excited-state population after pi/2 -- wait -- pi/2(phi), with detuning
// f_delta (kHz) present during all three segments. Exact 2x2 propagators;
// the wait multiplies the coherence by exp(-tau/T2*).
double ramsey_population(const RamseyConfig& cfg, double f_delta_kHz, double phi_rad);

// Closed-form ideal-pulse limit: 1/2 - cos(2 pi f tau + phi) exp(-tau/T2*)/2.
double ramsey_population_ideal(double f_delta_kHz, double tau_us, double T2star_us,
                               double phi_rad);

struct DetuningEstimate {
    double f_delta_kHz = 0.0;
    double cost = 0.0;  // |p1 - model(pi/2)| + |p2 - model(3pi/2)| at the optimum
};

// Recover the detuning from populations measured at phi = pi/2 and 3pi/2.
// Grid + golden-section refinement over [-window, +window]; throws
// NumericalError when the minimum sits on the window edge (phase ambiguity).
DetuningEstimate find_detuning(const RamseyConfig& cfg, double p1, double p2,
                               double window_kHz = 1.0);

// 1-sigma detuning uncertainty of the two-point scheme: shot noise propagated
// through the phase slope, sqrt(2 p (1-p) / N) / (2 pi tau e^{-tau/T2*}), Hz.
double detuning_sigma_Hz(double p, std::size_t N_per_point, double tau_us, double T2star_us);

// Slope interpolation factor m_t = (k_t - k_int) / (k_sens - k_int).
double slope_factor(double kappa_target, double kappa_insensitive, double kappa_sensitive);

// Synthetic triplet experiment: each cycle measures (insensitive, sensitive,
// target) detunings with N binomial shots per Ramsey point under the given
// noise, then predicts the target from the witnesses via the slope factor.
// Returns the per-cycle prediction residuals (Hz).
struct TripletConfig {
    RamseyConfig ramsey;
    double kappa_insensitive = 0.0;   // MHz/G
    double kappa_sensitive = 3.49;
    double kappa_target = 1.745;
    std::size_t shots_per_point = 250;
    // Wall-clock spacing of the three measurements inside a cycle; the mains
    // waveform is sampled at t0 + j*gap with a random per-cycle t0. The
    // default triggers consecutive measurements on the same mains phase, so
    // the line waveform cancels inside a triplet like it does on the
    // line-locked experiment.
    double meas_gap_s = 1.0 / 60.0;
};
std::vector<double> triplet_residuals_Hz(const TripletConfig& tc, const NoiseParams& noise,
                                         std::size_t cycles, std::uint64_t seed);

}  // namespace baq
