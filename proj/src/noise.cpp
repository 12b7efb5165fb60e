#include "baq/noise.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "baq/rng.hpp"
#include "baq/util.hpp"

namespace baq {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Fixed per-source stream ids; disabling one source must not shift another's
// draws, so every source always owns the same stream.
enum Stream : std::uint64_t {
    kStreamB = 1,
    kStreamLaserG = 2,
    kStreamLaserC = 3,
    kStreamClock = 4,
    kStreamPulseCal = 5,
    kStreamPulseDrift = 6,
    kStreamMeasure = 7,  // reserved for binomial readout draws
};
}  // namespace

double LineSignal::value(double t_s) const {
    return A60_G * std::sin(kTwoPi * f60_Hz * t_s + phi60_rad) +
           A180_G * std::sin(kTwoPi * f180_Hz * t_s + phi180_rad);
}

double LineSignal::integral(double t_s) const {
    const double w60 = kTwoPi * f60_Hz, w180 = kTwoPi * f180_Hz;
    double acc = 0.0;
    if (A60_G != 0.0 && w60 != 0.0)
        acc += A60_G / w60 * (std::cos(phi60_rad) - std::cos(w60 * t_s + phi60_rad));
    if (A180_G != 0.0 && w180 != 0.0)
        acc += A180_G / w180 * (std::cos(phi180_rad) - std::cos(w180 * t_s + phi180_rad));
    return acc;
}

NoiseParams NoiseParams::from_file(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::parse_file(path);
    NoiseParams p;
    p.enable_B = kv.get_bool("b.enable", p.enable_B);
    p.fwhm_B_G = kv.get_double("b.fwhm_G", p.fwhm_B_G);
    p.enable_line = kv.get_bool("line.enable", p.enable_line);
    p.line.A60_G = kv.get_double("line.A60_G", p.line.A60_G);
    p.line.phi60_rad = kv.get_double("line.phi60_rad", p.line.phi60_rad);
    p.line.A180_G = kv.get_double("line.A180_G", p.line.A180_G);
    p.line.phi180_rad = kv.get_double("line.phi180_rad", p.line.phi180_rad);
    p.line.f60_Hz = kv.get_double("line.f60_Hz", p.line.f60_Hz);
    p.line.f180_Hz = kv.get_double("line.f180_Hz", p.line.f180_Hz);
    p.enable_laser = kv.get_bool("laser.enable", p.enable_laser);
    p.voigt_G_fwhm_Hz = kv.get_double("laser.gauss_fwhm_Hz", p.voigt_G_fwhm_Hz);
    p.voigt_L_fwhm_Hz = kv.get_double("laser.cauchy_fwhm_Hz", p.voigt_L_fwhm_Hz);
    p.enable_clock = kv.get_bool("clock.enable", p.enable_clock);
    p.fwhm_f_Hz = kv.get_double("clock.fwhm_Hz", p.fwhm_f_Hz);
    p.enable_pulse_cal = kv.get_bool("pulse_cal.enable", p.enable_pulse_cal);
    p.fwhm_tau_cal = kv.get_double("pulse_cal.fwhm", p.fwhm_tau_cal);
    p.enable_pulse_drift = kv.get_bool("pulse_drift.enable", p.enable_pulse_drift);
    p.fwhm_tau_drift = kv.get_double("pulse_drift.fwhm", p.fwhm_tau_drift);
    kv.reject_unknown();
    return p;
}

NoiseParams NoiseParams::quiet() {
    NoiseParams p;
    p.enable_B = p.enable_line = p.enable_laser = false;
    p.enable_clock = p.enable_pulse_cal = p.enable_pulse_drift = false;
    return p;
}

void NoiseParams::scale_source(const std::string& source, double factor) {
    if (source == "B") {
        fwhm_B_G *= factor;
    } else if (source == "laser") {
        voigt_G_fwhm_Hz *= factor;
        voigt_L_fwhm_Hz *= factor;
    } else if (source == "clock") {
        fwhm_f_Hz *= factor;
    } else if (source == "pulse_cal") {
        fwhm_tau_cal *= factor;
    } else if (source == "pulse_drift") {
        fwhm_tau_drift *= factor;
    } else if (source == "line") {
        line.A60_G *= factor;
        line.A180_G *= factor;
    } else {
        throw ConfigError("unknown noise source: " + source);
    }
}

NoiseRealization sample_shot(const NoiseParams& p, std::uint64_t seed, std::uint64_t shot) {
    NoiseRealization r;
    if (p.enable_B) {
        ShotRng g(seed, shot, kStreamB);
        r.dB_G = g.gauss() * p.fwhm_B_G / kFwhmToSigma;
    }
    if (p.enable_laser) {
        ShotRng gg(seed, shot, kStreamLaserG);
        ShotRng gc(seed, shot, kStreamLaserC);
        r.dL_Hz = gg.gauss() * p.voigt_G_fwhm_Hz / kFwhmToSigma +
                  gc.cauchy() * 0.5 * p.voigt_L_fwhm_Hz;
    }
    if (p.enable_clock) {
        ShotRng g(seed, shot, kStreamClock);
        r.df_Hz = g.gauss() * p.fwhm_f_Hz / kFwhmToSigma;
    }
    if (p.enable_pulse_cal) {
        ShotRng g(seed, shot, kStreamPulseCal);
        r.dtau_cal = g.gauss() * p.fwhm_tau_cal / kFwhmToSigma;
    }
    if (p.enable_pulse_drift) {
        ShotRng g(seed, shot, kStreamPulseDrift);
        r.dtau_drift = g.gauss() * p.fwhm_tau_drift / kFwhmToSigma;
    }
    return r;
}

double detuning_for(const NoiseParams& p, const NoiseRealization& r, double kappa_MHz_per_G,
                    double t_s) {
    double dB = r.dB_G;
    if (p.enable_line) dB += p.line.value(t_s);
    const double hz = kappa_MHz_per_G * 1e6 * dB + r.dL_Hz + r.df_Hz;
    return kTwoPi * hz;
}

double phase_offset(const NoiseParams& p, const NoiseRealization& r, double kappa_MHz_per_G,
                    double t_s) {
    double field_term = r.dB_G * t_s;
    if (p.enable_line) field_term += p.line.integral(t_s);
    return kTwoPi * (kappa_MHz_per_G * 1e6 * field_term + (r.dL_Hz + r.df_Hz) * t_s);
}

double voigt_fwhm_kielkopf(double fwhm_G_Hz, double fwhm_L_Hz) {
    return 0.5346 * fwhm_L_Hz +
           std::sqrt(0.2166 * fwhm_L_Hz * fwhm_L_Hz + fwhm_G_Hz * fwhm_G_Hz);
}

CoherenceFit fit_coherence_decay(const std::vector<double>& t_us, const std::vector<double>& y) {
    if (t_us.size() != y.size() || t_us.size() < 3)
        throw NumericalError("coherence fit needs >= 3 samples");
    const std::size_t n = t_us.size();

    // Log-linear seed on the positive samples: log y = log A - a t^2 - b t.
    double s[3][3] = {{0}}, rhs[3] = {0};
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] <= 1e-12) continue;
        const double x0 = 1.0, x1 = -t_us[i] * t_us[i], x2 = -t_us[i];
        const double b = std::log(y[i]);
        const double xs[3] = {x0, x1, x2};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += xs[r] * b;
            for (int c = 0; c < 3; ++c) s[r][c] += xs[r] * xs[c];
        }
        ++used;
    }
    double logA = 0.0, a = 1e-8, b = 1e-8;
    if (used >= 3) {
        Eigen::Matrix3d M;
        Eigen::Vector3d v;
        for (int r = 0; r < 3; ++r) {
            v(r) = rhs[r];
            for (int c = 0; c < 3; ++c) M(r, c) = s[r][c];
        }
        const Eigen::Vector3d sol = M.ldlt().solve(v);
        logA = sol(0);
        a = std::max(0.0, sol(1));
        b = std::max(0.0, sol(2));
    }
    double A = std::exp(std::min(10.0, std::max(-10.0, logA)));

    // Levenberg-Marquardt on (A, a, b) with nonnegativity clamps on a and b.
    double lambda = 1e-3;
    auto chi2 = [&](double A_, double a_, double b_) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = A_ * std::exp(-a_ * t_us[i] * t_us[i] - b_ * t_us[i]);
            acc += (f - y[i]) * (f - y[i]);
        }
        return acc;
    };
    double best = chi2(A, a, b);
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
        Eigen::Vector3d Jtr = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-a * t_us[i] * t_us[i] - b * t_us[i]);
            const double f = A * e;
            const double r = f - y[i];
            const Eigen::Vector3d g(e, -f * t_us[i] * t_us[i], -f * t_us[i]);
            JtJ += g * g.transpose();
            Jtr += g * r;
        }
        Eigen::Matrix3d M = JtJ;
        M.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
        const Eigen::Vector3d step = M.ldlt().solve(Jtr);
        const double A2 = std::max(1e-12, A - step(0));
        const double a2 = std::max(0.0, a - step(1));
        const double b2 = std::max(0.0, b - step(2));
        const double c2 = chi2(A2, a2, b2);
        if (c2 < best) {
            A = A2;
            a = a2;
            b = b2;
            if (best - c2 < 1e-15 * (1.0 + best)) {
                best = c2;
                break;
            }
            best = c2;
            lambda = std::max(1e-12, lambda * 0.3);
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }

    CoherenceFit fit;
    fit.A = A;
    fit.inv_T_gauss_sq = a;
    fit.inv_T_lorentz = b;
    fit.T_gauss_us = a > 0.0 ? 1.0 / std::sqrt(a) : std::numeric_limits<double>::infinity();
    fit.T_lorentz_us = b > 0.0 ? 1.0 / b : std::numeric_limits<double>::infinity();
    return fit;
}

}  // namespace baq
