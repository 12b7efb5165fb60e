#include "baq/calib.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "baq/rng.hpp"
#include "baq/util.hpp"

namespace baq {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
constexpr std::complex<double> kI{0.0, 1.0};

// Propagator of H = pi (omega (cos phi sx + sin phi sy) - delta sz) for t;
// frequencies cyclic (kHz), times us (kHz*us = 1e-3 cycles, absorbed by the
// 1e-3 below). Exact traceless-2x2 exponential.
Mat2 pulse_propagator(double omega_kHz, double delta_kHz, double t_us, double phi) {
    const double wx = omega_kHz * std::cos(phi);
    const double wy = omega_kHz * std::sin(phi);
    const double wz = -delta_kHz;
    const double norm = std::sqrt(wx * wx + wy * wy + wz * wz);
    const double half_angle = kPi * norm * t_us * 1e-3;
    Mat2 U = Mat2::Identity() * std::cos(half_angle);
    if (norm > 0.0) {
        const double s = std::sin(half_angle) / norm;
        Mat2 n;
        n << wz, wx - kI * wy, wx + kI * wy, -wz;
        U -= kI * s * n;
    }
    return U;
}

}  // namespace

double ramsey_population(const RamseyConfig& cfg, double f_delta_kHz, double phi_rad) {
    const double tp = cfg.t_pulse();
    const Mat2 U1 = pulse_propagator(cfg.omega_kHz, f_delta_kHz, tp, 0.0);
    // Second-pulse axis offset by pi so the ideal-pulse limit lands on
    // 1/2 - cos(2 pi f tau + phi)/2.
    const Mat2 U2 = pulse_propagator(cfg.omega_kHz, f_delta_kHz, tp, kPi + phi_rad);
    const Mat2 W = pulse_propagator(0.0, f_delta_kHz, cfg.tau_us, 0.0);

    Mat2 rho = Mat2::Zero();
    rho(0, 0) = 1.0;
    rho = U1 * rho * U1.adjoint();
    rho = W * rho * W.adjoint();
    const double damp = std::exp(-cfg.tau_us / cfg.T2star_us);
    rho(0, 1) *= damp;
    rho(1, 0) *= damp;
    rho = U2 * rho * U2.adjoint();
    return std::real(rho(1, 1));
}

double ramsey_population_ideal(double f_delta_kHz, double tau_us, double T2star_us,
                               double phi_rad) {
    return 0.5 - 0.5 * std::exp(-tau_us / T2star_us) *
                     std::cos(kTwoPi * f_delta_kHz * tau_us * 1e-3 + phi_rad);
}

DetuningEstimate find_detuning(const RamseyConfig& cfg, double p1, double p2,
                               double window_kHz) {
    if (window_kHz <= 0.0) throw ConfigError("find_detuning: window must be positive");
    const auto cost = [&](double f) {
        return std::fabs(p1 - ramsey_population(cfg, f, 0.5 * kPi)) +
               std::fabs(p2 - ramsey_population(cfg, f, 1.5 * kPi));
    };

    constexpr int kGrid = 2000;
    double best_f = 0.0, best_c = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kGrid; ++i) {
        const double f = -window_kHz + 2.0 * window_kHz * i / kGrid;
        const double c = cost(f);
        if (c < best_c) {
            best_c = c;
            best_f = f;
        }
    }

    // Golden-section refinement inside the bracketing grid cells.
    const double step = 2.0 * window_kHz / kGrid;
    double lo = std::max(-window_kHz, best_f - step);
    double hi = std::min(window_kHz, best_f + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double c1 = cost(x1), c2 = cost(x2);
    for (int it = 0; it < 120 && hi - lo > 1e-12; ++it) {
        if (c1 < c2) {
            hi = x2;
            x2 = x1;
            c2 = c1;
            x1 = hi - gr * (hi - lo);
            c1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            c1 = c2;
            x2 = lo + gr * (hi - lo);
            c2 = cost(x2);
        }
    }
    DetuningEstimate est;
    est.f_delta_kHz = 0.5 * (lo + hi);
    est.cost = cost(est.f_delta_kHz);
    if (std::fabs(est.f_delta_kHz) > 0.999 * window_kHz)
        throw NumericalError("find_detuning: optimum at the window edge (phase wrap?)");
    return est;
}

double detuning_sigma_Hz(double p, std::size_t N_per_point, double tau_us, double T2star_us) {
    if (N_per_point == 0 || tau_us <= 0.0)
        throw ConfigError("detuning_sigma: need N > 0 and tau > 0");
    const double var_diff = 2.0 * p * (1.0 - p) / static_cast<double>(N_per_point);
    const double damp = std::exp(-tau_us / T2star_us);
    return std::sqrt(var_diff) / (kTwoPi * tau_us * 1e-6 * damp);
}

double slope_factor(double kappa_target, double kappa_insensitive, double kappa_sensitive) {
    const double denom = kappa_sensitive - kappa_insensitive;
    if (denom == 0.0) throw ConfigError("slope_factor: witness sensitivities coincide");
    return (kappa_target - kappa_insensitive) / denom;
}

std::vector<double> triplet_residuals_Hz(const TripletConfig& tc, const NoiseParams& noise,
                                         std::size_t cycles, std::uint64_t seed) {
    const double m = slope_factor(tc.kappa_target, tc.kappa_insensitive, tc.kappa_sensitive);
    const double kappas[3] = {tc.kappa_insensitive, tc.kappa_sensitive, tc.kappa_target};
    // Rough-calibration prior: the estimator searches +-1 kHz, single-valued
    // for tau <= 250 us. Railed measurements are kept at the edge; a common
    // laser excursion rails all three lines together and still cancels.
    const double window_kHz = 1.0;

    std::vector<double> residuals;
    residuals.reserve(cycles);
    for (std::size_t c = 0; c < cycles; ++c) {
        const NoiseRealization r = sample_shot(noise, seed, c);
        ShotRng tim(seed, c, 8);  // per-cycle mains phase
        const double t0 = tim.uniform01() / 60.0;

        double meas_kHz[3];
        for (int j = 0; j < 3; ++j) {
            const double t_s = t0 + j * tc.meas_gap_s;
            const double f_true_kHz = detuning_for(noise, r, kappas[j], t_s) / kTwoPi * 1e-3;

            double p[2];
            for (int point = 0; point < 2; ++point) {
                const double phi = (point == 0) ? 0.5 * kPi : 1.5 * kPi;
                const double p_true = ramsey_population(tc.ramsey, f_true_kHz, phi);
                ShotRng meas(seed, c * 6 + j * 2 + point, 9);
                std::size_t hits = 0;
                for (std::size_t s = 0; s < tc.shots_per_point; ++s)
                    if (meas.uniform01() < p_true) ++hits;
                p[point] = static_cast<double>(hits) / static_cast<double>(tc.shots_per_point);
            }
            try {
                meas_kHz[j] = find_detuning(tc.ramsey, p[0], p[1], window_kHz).f_delta_kHz;
            } catch (const NumericalError&) {
                // A railed measurement (heavy laser tail); keep the edge value.
                meas_kHz[j] = (p[0] >= p[1]) ? window_kHz : -window_kHz;
            }
        }

        const double predicted = meas_kHz[0] + m * (meas_kHz[1] - meas_kHz[0]);
        residuals.push_back((meas_kHz[2] - predicted) * 1e3);
    }
    return residuals;
}

}  // namespace baq
