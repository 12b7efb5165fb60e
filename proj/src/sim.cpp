#include "baq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "baq/rng.hpp"
#include "baq/util.hpp"

namespace baq {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
constexpr Cx kI{0.0, 1.0};
constexpr std::uint64_t kStreamMeasure = 7;  // matches the noise stream table
}  // namespace

const Encoding::Edge& Encoding::edge_between(int a, int b) const {
    for (const Edge& e : edges)
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e;
    throw ConfigError("encoding has no edge between logical " + std::to_string(a) + " and " +
                      std::to_string(b));
}

void PulseSequence::push_rotation(int a, int b, double theta, double phi, double gap_us) {
    if (theta < 0.0) throw ConfigError("pulse rotation angle must be >= 0");
    const Encoding::Edge& e = enc.edge_between(a, b);
    Pulse p;
    p.a = e.a;  // keep the S-side first regardless of caller order
    p.b = e.b;
    p.theta = theta;
    p.phi = phi;
    p.duration_us = ideal_rotations ? 0.0 : theta / kPi * e.pi_time_us;
    end_us_ += gap_us;
    p.start_us = end_us_;
    end_us_ += p.duration_us;
    items.push_back(p);
}

void PulseSequence::push_virtual_z(std::vector<double> phases) {
    if (static_cast<int>(phases.size()) != enc.d())
        throw ConfigError("virtual-Z layer must carry one phase per level");
    items.push_back(VirtualZ{std::move(phases)});
}

MatrixXc pulse_unitary(int d, int a, int b, double omega_rad_us, double dw_rad_us, double phi,
                       double t_us) {
    // H = [[0, O/2 e^{i phi}], [O/2 e^{-i phi}, dw]] = (dw/2) I + (1/2) v.sigma
    // with v = (O cos phi, -O sin phi, -dw); exact exponential of both parts.
    const double O = omega_rad_us, dw = dw_rad_us;
    const double W = std::sqrt(O * O + dw * dw);
    const double half = 0.5 * W * t_us;
    const double c = std::cos(half);
    const double s = (W > 0.0) ? std::sin(half) / W : 0.5 * t_us;
    const Cx common = std::exp(-kI * (0.5 * dw * t_us));
    const double x = O * std::cos(phi), y = -O * std::sin(phi), z = -dw;

    MatrixXc U = MatrixXc::Identity(d, d);
    U(a, a) = common * (c - kI * (s * z));
    U(b, b) = common * (c + kI * (s * z));
    U(a, b) = common * (-kI * s * Cx(x, -y));
    U(b, a) = common * (-kI * s * Cx(x, y));
    return U;
}

MatrixXc ideal_pulse_unitary(int d, int a, int b, double theta, double phi) {
    MatrixXc U = MatrixXc::Identity(d, d);
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    U(a, a) = c;
    U(b, b) = c;
    U(a, b) = -kI * s * std::exp(kI * phi);
    U(b, a) = -kI * s * std::exp(-kI * phi);
    return U;
}

namespace {

// Per-level noise energies (MHz): field noise through each level's slope;
// laser + clock offsets ride on the optical gap, booked onto the D side.
struct FrameNoise {
    const Encoding* enc;
    const NoiseParams* noise;
    const NoiseRealization* real;

    double static_MHz(int k) const {
        const Level& lv = enc->states[k];
        double mhz = lv.dEdB_MHz_per_G * real->dB_G;
        if (lv.manifold == 'D') mhz += (real->dL_Hz + real->df_Hz) * 1e-6;
        return mhz;
    }

    // Energy at wall-clock time t (us), MHz.
    double at(int k, double t_us) const {
        double mhz = static_MHz(k);
        if (noise->enable_line)
            mhz += enc->states[k].dEdB_MHz_per_G * noise->line.value(t_us * 1e-6);
        return mhz;
    }

    // Accumulated phase (rad) of level k over [t1, t2] us: 2 pi * cycles.
    double free_phase(int k, double t1_us, double t2_us) const {
        double cycles = static_MHz(k) * (t2_us - t1_us);
        if (noise->enable_line)
            cycles += enc->states[k].dEdB_MHz_per_G *
                      (noise->line.integral(t2_us * 1e-6) - noise->line.integral(t1_us * 1e-6)) *
                      1e6;
        return kTwoPi * cycles;
    }
};

}  // namespace

VectorXc run_sequence(const PulseSequence& seq, const NoiseParams& noise,
                      const NoiseRealization& real) {
    const int d = seq.enc.d();
    if (seq.initial_state < 0 || seq.initial_state >= d)
        throw ConfigError("initial state outside the encoding");
    VectorXc psi = VectorXc::Zero(d);
    psi(seq.initial_state) = 1.0;

    const FrameNoise frame{&seq.enc, &noise, &real};
    double t_cur = 0.0;

    auto advance_free = [&](double t_to) {
        if (t_to <= t_cur) return;
        for (int k = 0; k < d; ++k)
            psi(k) *= std::exp(-kI * frame.free_phase(k, t_cur, t_to));
        t_cur = t_to;
    };

    for (const SeqItem& item : seq.items) {
        if (std::holds_alternative<VirtualZ>(item)) {
            const auto& vz = std::get<VirtualZ>(item);
            for (int k = 0; k < d; ++k) psi(k) *= std::exp(kI * vz.phases[k]);
            continue;
        }
        const Pulse& p = std::get<Pulse>(item);
        advance_free(p.start_us);

        if (p.duration_us <= 0.0) {
            const MatrixXc U = ideal_pulse_unitary(d, p.a, p.b, p.theta, p.phi);
            psi = U * psi;
            continue;
        }

        // Nominal rate theta/T, shrunk by the fractional pulse-time
        // miscalibration and drift (a +x% pi-time error means the true Rabi
        // rate was x% lower than calibration assumed).
        const double scale = 1.0 + real.dtau_cal + real.dtau_drift;
        const double omega = p.theta / p.duration_us / scale;
        const double t_mid = p.start_us + 0.5 * p.duration_us;
        const double ea = frame.at(p.a, t_mid), eb = frame.at(p.b, t_mid);
        const double dw = kTwoPi * (eb - ea);  // rad/us

        // Exact block propagator, then restore the absolute frame: the pair
        // block carries the common e^{-i 2 pi ea T}, spectators their own.
        MatrixXc U = pulse_unitary(d, p.a, p.b, omega, dw, p.phi, p.duration_us);
        const Cx pair_common = std::exp(-kI * (kTwoPi * ea * p.duration_us));
        U.row(p.a) *= pair_common;
        U.row(p.b) *= pair_common;
        for (int k = 0; k < d; ++k) {
            if (k == p.a || k == p.b) continue;
            U(k, k) = std::exp(-kI * frame.free_phase(k, p.start_us,
                                                      p.start_us + p.duration_us));
        }
        psi = U * psi;
        t_cur = p.start_us + p.duration_us;
    }
    return psi;
}

MonteCarloResult monte_carlo(const PulseSequence& seq, const NoiseParams& noise,
                             const MonteCarloOptions& opt) {
    const int d = seq.enc.d();
    if (opt.shots == 0) throw ConfigError("monte_carlo: shots must be > 0");
    const int threads = std::max(1, opt.threads);

    // Per-shot results land in a shot-indexed buffer and are reduced in shot
    // order afterwards, so the mean is bit-identical for any thread count.
    std::vector<double> per_shot(opt.shots * static_cast<std::size_t>(d), 0.0);
    auto work = [&](int tid) {
        for (std::size_t s = static_cast<std::size_t>(tid); s < opt.shots;
             s += static_cast<std::size_t>(threads)) {
            const NoiseRealization r = sample_shot(noise, opt.seed, s);
            const VectorXc psi = run_sequence(seq, noise, r);
            double* row = per_shot.data() + s * static_cast<std::size_t>(d);
            if (opt.binomial_sampling) {
                ShotRng meas(opt.seed, s, kStreamMeasure);
                double u = meas.uniform01();
                int outcome = d - 1;
                for (int k = 0; k < d; ++k) {
                    const double pk = std::norm(psi(k));
                    if (u < pk) {
                        outcome = k;
                        break;
                    }
                    u -= pk;
                }
                row[outcome] = 1.0;
            } else {
                for (int k = 0; k < d; ++k) row[k] = std::norm(psi(k));
            }
        }
    };

    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }

    MonteCarloResult res;
    res.shots = opt.shots;
    res.mean_population.assign(static_cast<std::size_t>(d), 0.0);
    for (std::size_t s = 0; s < opt.shots; ++s)
        for (int k = 0; k < d; ++k)
            res.mean_population[static_cast<std::size_t>(k)] +=
                per_shot[s * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)];
    for (double& v : res.mean_population) v /= static_cast<double>(opt.shots);
    for (int k = 0; k < d; ++k) {
        const Interval iv = wilson_interval(res.mean_population[static_cast<std::size_t>(k)],
                                            opt.shots);
        res.wilson_lo.push_back(iv.lo);
        res.wilson_hi.push_back(iv.hi);
    }
    return res;
}

Encoding make_encoding(const LevelTable& levels, const std::vector<Transition>& table,
                       const std::vector<std::pair<char, std::pair<int, int>>>& state_labels,
                       int star_center) {
    Encoding enc;
    enc.star_center = star_center;
    std::vector<int> table_index;  // per state: index into s12/d52
    for (const auto& [manifold, fm] : state_labels) {
        const int idx = levels.index_of(manifold, fm.first, fm.second);
        if (idx < 0)
            throw ConfigError("encoding refers to unknown level " +
                              std::string(1, manifold) + " F=" + std::to_string(fm.first) +
                              " m=" + std::to_string(fm.second));
        enc.states.push_back(manifold == 'S' ? levels.s12[static_cast<std::size_t>(idx)]
                                             : levels.d52[static_cast<std::size_t>(idx)]);
        table_index.push_back(idx);
    }
    const int dd = enc.d();
    if (star_center < 0 || star_center >= dd)
        throw ConfigError("star center outside the encoding");
    if (enc.states[static_cast<std::size_t>(star_center)].manifold != 'S')
        throw ConfigError("star center must be an S-manifold level");

    for (int k = 0; k < dd; ++k) {
        if (k == star_center) continue;
        if (enc.states[static_cast<std::size_t>(k)].manifold != 'D')
            throw ConfigError("star encoding requires D-manifold leaves");
        const Transition* found = nullptr;
        for (const Transition& tr : table)
            if (!tr.is_sideband && tr.s_index == table_index[static_cast<std::size_t>(star_center)] &&
                tr.d_index == table_index[static_cast<std::size_t>(k)])
                found = &tr;
        if (found == nullptr || !(found->rel_strength > 0.0))
            throw ConfigError("no usable transition from the hub to " +
                              enc.states[static_cast<std::size_t>(k)].id);
        Encoding::Edge e;
        e.a = star_center;
        e.b = k;
        e.freq_MHz = found->freq_MHz;
        e.sens_MHz_per_G = found->sens_MHz_per_G;
        e.pi_time_us = found->pi_time_us;
        e.transition_id = found->id;
        enc.edges.push_back(std::move(e));
        enc.readout_order.push_back(k);
    }
    return enc;
}

}  // namespace baq
