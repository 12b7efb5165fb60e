#include "baq/spam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "baq/angular.hpp"
#include "baq/rng.hpp"
#include "baq/util.hpp"

namespace baq {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// readout position per logical state: 0 for the bright hub, j+1 for order[j].
std::vector<int> readout_positions(const ReadoutPlan& plan) {
    std::vector<int> pos(static_cast<std::size_t>(plan.d()), 0);
    for (std::size_t j = 0; j < plan.order.size(); ++j)
        pos[static_cast<std::size_t>(plan.order[j])] = static_cast<int>(j) + 1;
    return pos;
}

// Lower Poisson tail P(X <= k) in long double via the stable term recurrence.
long double poisson_cdf(long double lambda, int k) {
    if (k < 0) return 0.0L;
    long double term = std::exp(-lambda);
    long double sum = term;
    for (int j = 1; j <= k; ++j) {
        term *= lambda / j;
        sum += term;
    }
    return sum;
}

// Upper tail P(X >= k) summed upward from the k-th term (no 1-cdf cancellation).
long double poisson_upper_tail(long double lambda, int k) {
    if (k <= 0) return 1.0L;
    long double term = std::exp(-lambda);
    for (int j = 1; j < k; ++j) term *= lambda / j;
    // term = P(X = k-1); step once more to reach k, then accumulate.
    term *= lambda / k;
    long double sum = 0.0L;
    int j = k;
    while (term > 0.0L) {
        sum += term;
        ++j;
        long double next = term * lambda / j;
        if (next < sum * 1e-25L && j > lambda) break;
        term = next;
    }
    return sum;
}

}  // namespace

void ReadoutPlan::validate() const {
    const int dd = d();
    if (dd < 2) throw ConfigError("readout plan needs at least 2 states");
    if (enc.star_center != 0)
        throw ConfigError("readout plan expects the bright hub at logical index 0");
    if (enc.states[0].manifold != 'S')
        throw ConfigError("readout plan state 0 must be the S-manifold hub");
    if (!(exposure_ms > 0.0)) throw ConfigError("readout exposure must be positive");
    if (static_cast<int>(order.size()) != dd - 1)
        throw ConfigError("de-shelve order must list every shelved state once");
    std::vector<bool> seen(static_cast<std::size_t>(dd), false);
    for (int k : order) {
        if (k < 1 || k >= dd) throw ConfigError("de-shelve order entry outside 1..d-1");
        if (seen[static_cast<std::size_t>(k)])
            throw ConfigError("de-shelve order repeats state " + std::to_string(k));
        seen[static_cast<std::size_t>(k)] = true;
    }
    if (deshelve_us.size() != order.size())
        throw ConfigError("need one de-shelve duration per readout position");
    for (double t : deshelve_us)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw ConfigError("de-shelve durations must be finite and non-negative");
    for (int k : order) (void)enc.edge_between(0, k);  // throws when unreachable
}

ReadoutPlan default_readout_plan(const Encoding& enc, double exposure_ms) {
    ReadoutPlan plan;
    plan.enc = enc;
    plan.exposure_ms = exposure_ms;
    if (static_cast<int>(enc.readout_order.size()) == enc.d() - 1) {
        plan.order = enc.readout_order;
    } else {
        for (int k = 1; k < enc.d(); ++k) plan.order.push_back(k);
    }
    for (int k : plan.order) plan.deshelve_us.push_back(enc.edge_between(0, k).pi_time_us);
    plan.validate();
    return plan;
}

ReadoutPlan manifold_readout_plan(const LevelTable& levels,
                                  const std::vector<Transition>& carriers,
                                  double exposure_ms) {
    ReadoutPlan plan;
    plan.exposure_ms = exposure_ms;
    plan.enc.star_center = 0;
    plan.enc.states.push_back(levels.find('S', 2, 0));  // bright reference level
    for (std::size_t j = 0; j < levels.d52.size(); ++j) {
        const int k = static_cast<int>(j) + 1;
        plan.enc.states.push_back(levels.d52[j]);
        const Transition* best = nullptr;
        for (const Transition& tr : carriers)
            if (!tr.is_sideband && tr.d_index == static_cast<int>(j))
                if (best == nullptr || tr.rel_strength > best->rel_strength) best = &tr;
        if (best == nullptr || !(best->rel_strength > 0.0))
            throw ConfigError("no carrier reaches " + levels.d52[j].id);
        Encoding::Edge e;
        e.a = 0;
        e.b = k;
        e.freq_MHz = best->freq_MHz;
        e.sens_MHz_per_G = best->sens_MHz_per_G;
        e.pi_time_us = best->pi_time_us;
        e.transition_id = best->id;
        plan.enc.edges.push_back(std::move(e));
        plan.order.push_back(k);
        plan.deshelve_us.push_back(best->pi_time_us);
        plan.enc.readout_order.push_back(k);
    }
    plan.validate();
    return plan;
}

ChannelBreakdown decay_error(const ReadoutPlan& plan, double lifetime_s) {
    plan.validate();
    if (!(lifetime_s > 0.0)) throw ConfigError("decay lifetime must be positive");
    ChannelBreakdown out;
    out.per_state.assign(static_cast<std::size_t>(plan.d()), 0.0);
    const double t_exp_s = plan.exposure_ms * 1e-3;
    double sum = 0.0;
    for (std::size_t j = 0; j < plan.order.size(); ++j) {
        const int n = static_cast<int>(j) + 1;  // exposures sat through before de-shelving
        const double err = 1.0 - std::exp(-n * t_exp_s / lifetime_s);
        out.per_state[static_cast<std::size_t>(plan.order[j])] = err;
        sum += err;
    }
    out.average = sum / static_cast<double>(plan.d() - 1);
    return out;
}

double rabi_excitation(double omega_MHz, double detuning_MHz, double t_us) {
    const double w2 = omega_MHz * omega_MHz + detuning_MHz * detuning_MHz;
    if (!(w2 > 0.0) || omega_MHz == 0.0) return 0.0;
    const double s = std::sin(kPi * std::sqrt(w2) * t_us);
    return omega_MHz * omega_MHz / w2 * s * s;
}

ChannelBreakdown off_resonant_error(const LevelTable& levels, const ReadoutPlan& plan,
                                    const StrengthConfig& strengths,
                                    const OffResonantParams& params) {
    plan.validate();
    if (std::abs(params.correlation) > 1.0)
        throw ConfigError("secular-jitter correlation must lie in [-1, 1]");
    if (params.mc_samples < 1) throw ConfigError("off-resonant mc_samples must be >= 1");

    const int d = plan.d();
    // Frequencies only ever enter as differences, so a zero-offset local table
    // is consistent as long as both the drive and the line come from it.
    AtomicConstants cc;
    cc.lamb_dicke = params.eta;
    cc.nbar = params.nbar;
    const std::vector<Transition> carriers = transition_table(levels, cc, strengths);

    // Each shelved state rides one carrier, named by its edge; the S column
    // of that line (not necessarily the bright hub) is where leakage lives.
    std::vector<int> d_index(static_cast<std::size_t>(d), -1);
    std::vector<int> s_col(static_cast<std::size_t>(d), -1);
    std::vector<double> drive_freq(static_cast<std::size_t>(d), 0.0);
    std::vector<double> shelve_us(static_cast<std::size_t>(d), 0.0);
    for (int k = 1; k < d; ++k) {
        const std::size_t sk = static_cast<std::size_t>(k);
        const Encoding::Edge& edge = plan.enc.edge_between(0, k);
        shelve_us[sk] = edge.pi_time_us;
        const Transition* line = nullptr;
        for (const Transition& tr : carriers)
            if (tr.id == edge.transition_id) {
                line = &tr;
                break;
            }
        if (line == nullptr)
            throw ConfigError("readout edge names an unknown carrier: " + edge.transition_id);
        s_col[sk] = line->s_index;
        d_index[sk] = line->d_index;
        drive_freq[sk] = line->freq_MHz;
        const Level& lv = plan.enc.states[sk];
        if (d_index[sk] != levels.index_of('D', lv.F, lv.m))
            throw ConfigError("readout edge for " + lv.id + " targets a different D level");
    }
    const std::vector<int> pos = readout_positions(plan);
    std::vector<int> state_at_position(static_cast<std::size_t>(d), 0);
    for (int k = 1; k < d; ++k) state_at_position[static_cast<std::size_t>(pos[k])] = k;

    auto evaluate = [&](const AtomicConstants& c) {
        const std::vector<Transition> lines = augment_sidebands(carriers, c);
        // bucket by S column (shelving leaks) and by D level (de-shelving pulls)
        std::vector<std::vector<const Transition*>> by_s(levels.s12.size());
        std::vector<std::vector<const Transition*>> by_d(levels.d52.size());
        for (const Transition& tr : lines) {
            by_s[static_cast<std::size_t>(tr.s_index)].push_back(&tr);
            by_d[static_cast<std::size_t>(tr.d_index)].push_back(&tr);
        }
        std::vector<double> err(static_cast<std::size_t>(d), 0.0);
        for (int i = 1; i < d; ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            double e = 0.0;
            // (a) the shelving pulse for state i leaks into every other line
            // sharing its S column; lines into the intended D level (its
            // own carrier and sidebands) still land in the desired state.
            for (const Transition* tr : by_s[static_cast<std::size_t>(s_col[si])]) {
                if (tr->d_index == d_index[si]) continue;
                const double omega = 0.5 / tr->pi_time_us;
                e += rabi_excitation(omega, drive_freq[si] - tr->freq_MHz, shelve_us[si]);
            }
            // (b) every de-shelving pulse fired before state i's own turn can
            // pull it down through any of its return transitions.
            for (int p = 1; p < pos[si]; ++p) {
                const int tgt = state_at_position[static_cast<std::size_t>(p)];
                const double f_p = drive_freq[static_cast<std::size_t>(tgt)];
                const double t_p = plan.deshelve_us[static_cast<std::size_t>(p - 1)];
                for (const Transition* tr : by_d[static_cast<std::size_t>(d_index[si])]) {
                    const double omega = 0.5 / tr->pi_time_us;
                    e += rabi_excitation(omega, f_p - tr->freq_MHz, t_p);
                }
            }
            err[si] = e;
        }
        return err;
    };

    ChannelBreakdown out;
    out.per_state.assign(static_cast<std::size_t>(d), 0.0);
    const int samples = params.mc_samples;
    for (int s = 0; s < samples; ++s) {
        AtomicConstants c = cc;
        c.nu_x_MHz = params.nu_x_MHz;
        c.nu_y_MHz = params.nu_y_MHz;
        c.nu_z_MHz = params.nu_z_MHz;
        if (samples > 1) {
            ShotRng rng(params.seed, static_cast<std::uint64_t>(s), 0);
            const double z1 = rng.gauss();
            const double z2 = rng.gauss();
            const double rho = params.correlation;
            c.nu_x_MHz += params.sigma_nu_x_MHz * z1;
            c.nu_y_MHz += params.sigma_nu_y_MHz * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
        }
        const std::vector<double> err = evaluate(c);
        for (std::size_t k = 0; k < err.size(); ++k) out.per_state[k] += err[k] / samples;
    }
    out.average = std::accumulate(out.per_state.begin() + 1, out.per_state.end(), 0.0) /
                  static_cast<double>(d - 1);
    return out;
}

DiscriminationError discrimination_error(double lambda_dark, double lambda_bright,
                                         int threshold) {
    if (lambda_dark < 0.0 || lambda_bright < 0.0)
        throw ConfigError("Poisson means must be non-negative");
    if (threshold < 0) throw ConfigError("discrimination threshold must be >= 0");
    DiscriminationError de;
    de.false_positive = static_cast<double>(
        poisson_upper_tail(static_cast<long double>(lambda_dark), threshold));
    de.false_negative = static_cast<double>(
        poisson_cdf(static_cast<long double>(lambda_bright), threshold - 1));
    de.total = de.false_positive + de.false_negative;
    return de;
}

int optimal_threshold(double lambda_dark, double lambda_bright, int max_threshold) {
    if (max_threshold < 0) throw ConfigError("threshold search bound must be >= 0");
    int best = 0;
    double best_total = discrimination_error(lambda_dark, lambda_bright, 0).total;
    for (int thr = 1; thr <= max_threshold; ++thr) {
        const double total = discrimination_error(lambda_dark, lambda_bright, thr).total;
        if (total < best_total) {
            best_total = total;
            best = thr;
        }
    }
    return best;
}

SpamBudget spam_budget(int d, const LevelTable& levels, const ReadoutPlan& plan,
                       const StrengthConfig& strengths, const SpamParams& params) {
    plan.validate();
    if (d < 2 || d > plan.d())
        throw ConfigError("budget dimension must lie in 2..plan size");

    // Prefix re-analysis: keep the first d states and compress the readout
    // chain to the surviving de-shelve pulses, in their original order.
    ReadoutPlan sub;
    sub.exposure_ms = plan.exposure_ms;
    sub.enc.star_center = 0;
    sub.enc.states.assign(plan.enc.states.begin(), plan.enc.states.begin() + d);
    for (const Encoding::Edge& e : plan.enc.edges)
        if (e.a < d && e.b < d) sub.enc.edges.push_back(e);
    for (std::size_t j = 0; j < plan.order.size(); ++j)
        if (plan.order[j] < d) {
            sub.order.push_back(plan.order[j]);
            sub.deshelve_us.push_back(plan.deshelve_us[j]);
        }
    sub.enc.readout_order = sub.order;
    sub.validate();

    SpamBudget budget;
    budget.d = d;
    budget.decay = decay_error(sub, params.lifetime_s);
    budget.off_resonant = off_resonant_error(levels, sub, strengths, params.off_resonant);
    budget.per_check =
        discrimination_error(params.lambda_dark, params.lambda_bright, params.threshold);

    // A state read out at position n must survive n dark checks and then one
    // bright check; the hub is bright at the very first check.
    const std::vector<int> pos = readout_positions(sub);
    std::vector<double> disc(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k < d; ++k) {
        const double keep_dark = std::pow(1.0 - budget.per_check.false_positive,
                                          pos[static_cast<std::size_t>(k)]);
        disc[static_cast<std::size_t>(k)] =
            1.0 - keep_dark * (1.0 - budget.per_check.false_negative);
    }
    budget.discrimination_average =
        std::accumulate(disc.begin(), disc.end(), 0.0) / static_cast<double>(d);

    budget.per_state_total.assign(static_cast<std::size_t>(d), 0.0);
    double total_sum = 0.0;
    for (int k = 0; k < d; ++k) {
        const std::size_t sk = static_cast<std::size_t>(k);
        budget.per_state_total[sk] =
            budget.decay.per_state[sk] + budget.off_resonant.per_state[sk] + disc[sk];
        total_sum += budget.per_state_total[sk];
    }
    budget.explained_total = total_sum / static_cast<double>(d);
    return budget;
}

RepumpPathways repump_pathways(const LevelTable& levels) {
    const double I = 1.5, J = 2.5, Jp = 1.5, Fp = 3.0;
    const int nD = static_cast<int>(levels.d52.size());
    const ManifoldBasis basis = manifold_basis(I, J);

    // Relative reduced matrix elements <F' || d || F> for the shared 614 nm
    // electronic line; the common electronic factor cancels in normalization.
    std::array<double, 5> red{};  // indexed by F = 1..4
    for (int F = 1; F <= 4; ++F) {
        const double sign = (F % 2 == 0) ? 1.0 : -1.0;  // (-1)^(J'+I+F+1), J'+I=3
        red[static_cast<std::size_t>(F)] =
            sign * std::sqrt((2.0 * F + 1.0) * (2.0 * Fp + 1.0)) *
            wigner6j(Jp, Fp, I, static_cast<double>(F), J, 1.0);
    }

    RepumpPathways rp;
    rp.excite = Eigen::MatrixXd::Zero(nD, 7);
    rp.decay = Eigen::MatrixXd::Zero(7, 5);
    rp.d_to_s = Eigen::MatrixXd::Zero(nD, 5);
    for (int r = 0; r < 7; ++r)
        rp.p_ids.push_back("P32_F3_m" + std::to_string(r - 3));
    for (int c = 0; c < 5; ++c)
        rp.s_ids.push_back(levels.find('S', 2, c - 2).id);

    for (int i = 0; i < nD; ++i) {
        const Level& lv = levels.d52[static_cast<std::size_t>(i)];
        rp.d_ids.push_back(lv.id);
        // decompose the field-dressed eigenstate onto the coupled |F, m> basis
        std::array<double, 5> cF{};
        for (int F = 1; F <= 4; ++F) {
            double acc = 0.0;
            for (int idx = 0; idx < basis.dim(); ++idx)
                acc += lv.amps[idx] * clebsch_gordan(I, basis.mI_of(idx), J, basis.mJ_of(idx),
                                                     static_cast<double>(F),
                                                     static_cast<double>(lv.m));
            cF[static_cast<std::size_t>(F)] = acc;
        }
        // sigma+/sigma- excitation amplitude into each pure |F'=3, m'> state
        for (int r = 0; r < 7; ++r) {
            const int mp = r - 3;
            const int q = mp - lv.m;
            if (q != 1 && q != -1) continue;  // beam along B: no pi component
            double amp = 0.0;
            for (int F = 1; F <= 4; ++F)
                amp += cF[static_cast<std::size_t>(F)] *
                       clebsch_gordan(static_cast<double>(F), static_cast<double>(lv.m), 1.0,
                                      static_cast<double>(q), Fp, static_cast<double>(mp)) *
                       red[static_cast<std::size_t>(F)];
            rp.excite(i, r) = amp * amp;
        }
        const double row = rp.excite.row(i).sum();
        if (row > 1e-30) rp.excite.row(i) /= row;
    }

    // dipole decay branching F'=3 -> S1/2 F=2 (F=1 is two units away, forbidden)
    for (int r = 0; r < 7; ++r) {
        const int mp = r - 3;
        for (int c = 0; c < 5; ++c) {
            const int m = c - 2;
            const int q = m - mp;
            if (q < -1 || q > 1) continue;
            const double cg = clebsch_gordan(Fp, static_cast<double>(mp), 1.0,
                                             static_cast<double>(q), 2.0,
                                             static_cast<double>(m));
            rp.decay(r, c) = cg * cg;
        }
        const double row = rp.decay.row(r).sum();
        if (row > 1e-30) rp.decay.row(r) /= row;
    }

    rp.d_to_s = rp.excite * rp.decay;
    for (int i = 0; i < nD; ++i) {
        const double row = rp.d_to_s.row(i).sum();
        if (row > 1e-30) rp.d_to_s.row(i) /= row;
    }
    return rp;
}

NbopResult nbop_simulate(const LevelTable& levels, const NbopConfig& cfg) {
    if (cfg.target_m2 % 2 != 0 || std::abs(cfg.target_m2) > 4)
        throw ConfigError("NBOP target must be an S F=2 level (doubled m in -4..4, even)");
    if (cfg.n_reps < 0) throw ConfigError("NBOP repetition count must be >= 0");
    if (!(cfg.pulse_fidelity >= 0.0 && cfg.pulse_fidelity <= 1.0) ||
        !(cfg.flush_fidelity >= 0.0 && cfg.flush_fidelity <= 1.0))
        throw ConfigError("NBOP fidelities must lie in [0, 1]");

    // shelve map: S F=2 level index -> D table index
    const int nS = static_cast<int>(levels.s12.size());
    const int nD = static_cast<int>(levels.d52.size());
    const int target_s = levels.index_of('S', 2, cfg.target_m2 / 2);
    std::vector<int> shelve_to(static_cast<std::size_t>(nS), -1);
    std::vector<bool> covered(5, false);
    for (const auto& [m2, d_id] : cfg.shelve_targets) {
        if (m2 % 2 != 0 || std::abs(m2) > 4)
            throw ConfigError("NBOP shelve entry addresses a non-F=2 level");
        if (m2 == cfg.target_m2)
            throw ConfigError("NBOP must not shelve the target level itself");
        const int s_idx = levels.index_of('S', 2, m2 / 2);
        if (shelve_to[static_cast<std::size_t>(s_idx)] >= 0)
            throw ConfigError("NBOP shelve entries repeat doubled m " + std::to_string(m2));
        int d_idx = -1;
        for (int j = 0; j < nD; ++j)
            if (levels.d52[static_cast<std::size_t>(j)].id == d_id) d_idx = j;
        if (d_idx < 0) throw ConfigError("unknown NBOP shelving target " + d_id);
        shelve_to[static_cast<std::size_t>(s_idx)] = d_idx;
        covered[static_cast<std::size_t>(m2 / 2 + 2)] = true;
    }
    int n_covered = 0;
    for (int c = 0; c < 5; ++c) n_covered += covered[static_cast<std::size_t>(c)] ? 1 : 0;
    if (n_covered != 4)
        throw ConfigError("NBOP needs one shelving transition per non-target F=2 level");

    const RepumpPathways rp = repump_pathways(levels);
    std::vector<int> s_col(5, 0);  // repump column -> S table index
    for (int c = 0; c < 5; ++c) s_col[static_cast<std::size_t>(c)] = levels.index_of('S', 2, c - 2);

    Eigen::VectorXd p = Eigen::VectorXd::Zero(nS + nD);
    for (int k = 0; k < nS; ++k) p[k] = 1.0 / nS;

    NbopResult res;
    res.target_population.push_back(p[target_s]);
    for (int rep = 0; rep < cfg.n_reps; ++rep) {
        // flush: F=1 population redistributes uniformly over the F=2 levels
        for (int k = 0; k < nS; ++k) {
            if (levels.s12[static_cast<std::size_t>(k)].F != 1) continue;
            const double moved = p[k] * cfg.flush_fidelity;
            p[k] -= moved;
            for (int c = 0; c < 5; ++c) p[s_col[static_cast<std::size_t>(c)]] += moved / 5.0;
        }
        // shelve the four addressed levels into their D targets
        for (int k = 0; k < nS; ++k) {
            const int tgt = shelve_to[static_cast<std::size_t>(k)];
            if (tgt < 0) continue;
            const double moved = p[k] * cfg.pulse_fidelity;
            p[k] -= moved;
            p[nS + tgt] += moved;
        }
        // repump everything shelved back through the pathway map
        for (int j = 0; j < nD; ++j) {
            const double mass = p[nS + j];
            if (mass <= 0.0) continue;
            const double row = rp.d_to_s.row(j).sum();
            p[nS + j] = mass * (1.0 - row);
            for (int c = 0; c < 5; ++c)
                p[s_col[static_cast<std::size_t>(c)]] += mass * rp.d_to_s(j, c);
        }
        res.target_population.push_back(p[target_s]);
    }

    res.final_distribution = p;
    res.trapped_mass = 1.0 - res.target_population.back();
    const std::size_t n = res.target_population.size();
    const bool converged =
        n >= 2 && std::abs(res.target_population[n - 1] - res.target_population[n - 2]) < 1e-9;
    res.closed_loop = converged && res.trapped_mass > 1e-6;
    return res;
}

}  // namespace baq
