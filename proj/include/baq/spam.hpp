#pragma once
// State-preparation-and-measurement error budget for the shelved-qudit
// readout: spontaneous decay while waiting for the de-shelving turn,
// off-resonant driving of neighbouring (carrier and motional-sideband)
// transitions by shelve/de-shelve pulses, photon-count discrimination error,
// plus the optical-pumping initialisation dynamics (flush / shelve / repump
// Markov chain) and the 614 nm repump pathway map.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "baq/atomic.hpp"
#include "baq/sim.hpp"

namespace baq {

// Readout runs: fluorescence check, then for k = 1..d-1 { de-shelve
// order[k-1], check }. The state de-shelved at position n has sat through n
// exposures, so its shelved population survives with e^{-n t_exp / tau}.
struct ReadoutPlan {
    Encoding enc;                    // states[0] = bright hub, 1..d-1 shelved
    std::vector<int> order;          // permutation of {1..d-1}: de-shelve order
    double exposure_ms = 5.0;
    std::vector<double> deshelve_us;  // pulse duration per readout position

    int d() const { return static_cast<int>(enc.states.size()); }
    void validate() const;  // throws ConfigError on malformed plans
};

// Default plan: de-shelve in encoding order, pi-pulse durations from edges.
ReadoutPlan default_readout_plan(const Encoding& enc, double exposure_ms = 5.0);

// Whole-manifold plan: every D5/2 level shelved in table order behind one
// bright S F=2 hub, each de-shelved through its strongest carrier (which may
// start from a different S level than the hub; the edge's transition id names
// the true line). Used for the 25-state error budget.
ReadoutPlan manifold_readout_plan(const LevelTable& levels,
                                  const std::vector<Transition>& carriers,
                                  double exposure_ms = 5.0);

struct ChannelBreakdown {
    std::vector<double> per_state;  // indexed like enc.states (state 0 first)
    double average = 0.0;           // over the shelved states only
};

ChannelBreakdown decay_error(const ReadoutPlan& plan, double lifetime_s);

// Rabi excitation probability of a transition with resonant pi-time such
// that omega = 1/(2 t_pi), driven detuning_MHz away for t_us microseconds:
// omega^2/(omega^2+delta^2) sin^2(pi sqrt(omega^2+delta^2) t).
double rabi_excitation(double omega_MHz, double detuning_MHz, double t_us);

struct OffResonantParams {
    double nu_x_MHz = 1.27, nu_y_MHz = 1.46, nu_z_MHz = 0.215;
    double eta = 0.014;   // Lamb-Dicke parameter (axial)
    double nbar = 140.0;  // thermal phonon number: sideband Rabi scale eta*sqrt(nbar)
    // Gaussian secular-frequency jitter, Monte-Carlo averaged when samples > 1.
    double sigma_nu_x_MHz = 0.0, sigma_nu_y_MHz = 0.0;
    double correlation = 0.0;
    int mc_samples = 1;
    std::uint64_t seed = 11;
};

// Four-step budget: per prepared state i, (a) its shelving pulse leaks into
// every other transition sharing the hub column, (b) every earlier
// de-shelving pulse can pull state i down through any of its own return
// transitions. Carrier and first-order sideband couplings both count.
ChannelBreakdown off_resonant_error(const LevelTable& levels, const ReadoutPlan& plan,
                                    const StrengthConfig& strengths,
                                    const OffResonantParams& params);

struct DiscriminationError {
    double false_positive = 0.0;  // dark read as bright: P(Pois(l_dark) >= thr)
    double false_negative = 0.0;  // bright read as dark: P(Pois(l_bright) < thr)
    double total = 0.0;
};

DiscriminationError discrimination_error(double lambda_dark, double lambda_bright,
                                         int threshold);
int optimal_threshold(double lambda_dark, double lambda_bright, int max_threshold = 200);

struct SpamBudget {
    int d = 0;
    ChannelBreakdown decay;
    ChannelBreakdown off_resonant;
    DiscriminationError per_check;
    double discrimination_average = 0.0;  // per-state readout-chain average
    double explained_total = 0.0;         // mean over all d per-state totals
    std::vector<double> per_state_total;
};

struct SpamParams {
    double lifetime_s = 30.1;
    OffResonantParams off_resonant{};
    double lambda_dark = 1.0;
    double lambda_bright = 30.0;
    int threshold = 9;
};

// Truncates the plan to its first d states (prefix re-analysis) and composes
// the channels linearly. Averages run over all d states; the bright state
// contributes only its first-check discrimination term.
SpamBudget spam_budget(int d, const LevelTable& levels, const ReadoutPlan& plan,
                       const StrengthConfig& strengths, const SpamParams& params);

// ---- optical pumping ----------------------------------------------------

// Two-step 614 nm repump map at field B: excitation to the 7 pure
// |F=3, m> P_3/2 states (equal sigma+ / sigma- light, no pi) followed by
// dipole decay branching into S_1/2 F=2.
struct RepumpPathways {
    Eigen::MatrixXd excite;  // n_D x 7, rows normalised over reachable states
    Eigen::MatrixXd decay;   // 7 x 5, branching within S_1/2 F=2, rows sum to 1
    Eigen::MatrixXd d_to_s;  // n_D x 5, two-step product, rows re-normalised
    std::vector<std::string> d_ids, p_ids, s_ids;
};

RepumpPathways repump_pathways(const LevelTable& levels);

struct NbopConfig {
    int target_m2 = 2;  // doubled m of the target S F=2 level (+2 = m=+1)
    // D-state ids shelving each non-target F=2 level, keyed by doubled m.
    std::vector<std::pair<int, std::string>> shelve_targets;
    double pulse_fidelity = 1.0;  // shelving pi-pulse transfer probability
    double flush_fidelity = 1.0;  // F=1 -> F=2 transfer per cycle
    int n_reps = 80;
};

struct NbopResult {
    std::vector<double> target_population;  // after 0..n_reps cycles
    Eigen::VectorXd final_distribution;     // over 8 S + n_D states
    double trapped_mass = 0.0;              // stationary mass outside target
    bool closed_loop = false;
};

// Markov chain over {8 S_1/2, 24 D_5/2} states: flush moves F=1 mass to F=2
// uniformly, shelving moves the four addressed F=2 levels to their D targets,
// repump returns all D mass through the pathway map. Starts uniform over S.
NbopResult nbop_simulate(const LevelTable& levels, const NbopConfig& cfg);

}  // namespace baq
