#pragma once
// Shot-to-shot noise model. Each Monte-Carlo shot freezes one realization of
// five scalar nuisances (field offset, laser Voigt detuning, clock offset,
// two pulse-time scale errors) plus the deterministic mains-synchronous field
// waveform. Widths are configured as FWHM; the Voigt channel is sampled as an
// independent Gaussian + Cauchy sum, never from a single combined width.

#include <cstdint>
#include <string>
#include <vector>

#include "baq/config.hpp"

namespace baq {

struct LineSignal {
    double A60_G = 128e-6;
    double phi60_rad = -0.636;
    double A180_G = 40e-6;
    double phi180_rad = -1.551;
    double f60_Hz = 60.0;
    double f180_Hz = 180.0;

    // delta_B,line(t) in gauss, t in seconds.
    double value(double t_s) const;
    // integral_0^t delta_B,line dt' in gauss*seconds, closed form.
    double integral(double t_s) const;
};

struct NoiseParams {
    bool enable_B = true;
    bool enable_line = true;
    bool enable_laser = true;   // Voigt (Gaussian + Cauchy) laser detuning
    bool enable_clock = true;   // Gaussian frequency-reference offset
    bool enable_pulse_cal = true;
    bool enable_pulse_drift = true;

    double fwhm_B_G = 24e-6;
    double voigt_G_fwhm_Hz = 192.2;   // Gaussian component of the laser line
    double voigt_L_fwhm_Hz = 154.2;   // Cauchy component (FWHM = 2*half-width)
    double fwhm_f_Hz = 296.0;
    double fwhm_tau_cal = 0.0177;     // fractional pulse-time miscalibration
    double fwhm_tau_drift = 0.0261;   // fractional pulse-time drift
    LineSignal line;

    static NoiseParams from_file(const std::string& path);
    static NoiseParams quiet();       // all sources disabled
    // Multiply one source's width by `factor` ("B", "laser", "clock",
    // "pulse_cal", "pulse_drift", "line").
    void scale_source(const std::string& source, double factor);
};

struct NoiseRealization {
    double dB_G = 0.0;
    double dL_Hz = 0.0;      // laser Voigt offset
    double df_Hz = 0.0;      // clock offset
    double dtau_cal = 0.0;   // fractional
    double dtau_drift = 0.0;
};

// Deterministic function of (seed, shot); independent sub-streams per source.
NoiseRealization sample_shot(const NoiseParams& p, std::uint64_t seed, std::uint64_t shot);

// Instantaneous angular detuning (rad/s) of a transition with sensitivity
// kappa (MHz/G) at wall-clock time t (s).
double detuning_for(const NoiseParams& p, const NoiseRealization& r, double kappa_MHz_per_G,
                    double t_s);

// Accumulated phase offset (rad) at time t: static terms grow linearly, the
// mains waveform enters through its exact integral.
double phase_offset(const NoiseParams& p, const NoiseRealization& r, double kappa_MHz_per_G,
                    double t_s);

// Kielkopf approximation for the combined Voigt FWHM (reporting only).
double voigt_fwhm_kielkopf(double fwhm_G_Hz, double fwhm_L_Hz);

// Least-squares fit of y = A exp(-(t/T_G)^2 - t/T_L) over (t_us, y) samples.
// Parameterized internally by inverse rates so T_L -> infinity degenerates
// gracefully (rate -> 0).
struct CoherenceFit {
    double A = 1.0;
    double T_gauss_us = 0.0;      // infinity reported as +inf when rate == 0
    double T_lorentz_us = 0.0;
    double inv_T_gauss_sq = 0.0;  // 1/T_G^2 (us^-2)
    double inv_T_lorentz = 0.0;   // 1/T_L   (us^-1)
};
CoherenceFit fit_coherence_decay(const std::vector<double>& t_us, const std::vector<double>& y);

}  // namespace baq
