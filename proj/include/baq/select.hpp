#pragma once
// Optimal encoding search: pick d physical states (one S_1/2 F=2 hub plus
// D_5/2 leaves) minimising a coherence-weighted cost built from pairwise
// pi-times and per-pair dephasing times, by exhaustive subset enumeration
// with an admissible pruning bound.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "baq/atomic.hpp"
#include "baq/noise.hpp"
#include "baq/sim.hpp"

namespace baq {

inline constexpr double kInfTime = std::numeric_limits<double>::infinity();

// Node order: 0..4 = S_1/2 F=2 (m = -2..+2), 5..28 = D_5/2 in table order.
struct PairGraph {
    std::vector<int> s_nodes, d_nodes;   // node -> LevelTable index
    std::vector<std::string> node_ids;
    Eigen::MatrixXd direct_us;   // single-pulse pi-time, inf if not coupled
    Eigen::MatrixXd tau_pi_us;   // shortest-path pair time over the graph
    Eigen::MatrixXd kappa;       // pairwise |dE/dB| difference (MHz/G), zero diagonal
    std::vector<double> sens;    // node -> dE/dB-derived line sensitivity
    std::vector<bool> is_s;
};

struct SelectionCutoffs {
    double min_rel_strength = 0.02;   // drop transitions weaker than this
    double max_sens_MHz_per_G = 6.0;  // drop pairs more field-sensitive than this
};

PairGraph build_pair_graph(const LevelTable& levels, const AtomicConstants& c,
                           const StrengthConfig& strengths,
                           const SelectionCutoffs& cutoffs = {});

struct CoherenceTimes {
    double T_LG_us = kInfTime;  // Gaussian laser component (S-D pairs only)
    double T_LL_us = kInfTime;  // Lorentzian laser component (S-D pairs only)
    double T_BG_us = kInfTime;  // Gaussian field dephasing, 1/(sqrt2 pi |dk| sB)
};

CoherenceTimes pairwise_coherence_times(bool j_in_s, bool k_in_s, double kappa_j,
                                        double kappa_k, const NoiseParams& noise);

// C = tau_S^2 [ (1/l) sum 1/T_LG^2 + sum 1/T_BG^2 ] + tau_S sum 1/T_LL with
// tau_S the summed pairwise pi-time over the set and l its size; infinite
// coherence times contribute nothing.
double set_cost(const std::vector<int>& nodes, const PairGraph& g, const NoiseParams& noise);

struct StateSet {
    std::vector<int> nodes;       // hub first, then leaves in node order
    int hub = -1;
    double tau_S_us = 0.0;
    double cost = 0.0;
    bool proven_optimal = false;
    std::vector<std::string> ids;
};

struct SearchOptions {
    // Enumeration cap. Once a complete set is in hand the search aborts past
    // this many visited nodes and proven_optimal drops to false; the first
    // complete descent always runs to the end.
    std::uint64_t node_budget = 50'000'000;
    int threads = 1;
};

// Exhaustive star search for 2 <= d <= 17: every S F=2 hub, every (d-1)-leaf
// subset of its usable transitions, branch-and-bound pruned with a lower
// bound from the d-1 cheapest leaf marginals. Throws InfeasibleError when no
// hub offers d-1 usable leaves. Ties break lexicographically on node ids.
StateSet search_star_sets(int d, const PairGraph& g, const NoiseParams& noise,
                          const SearchOptions& opts = {});

// Greedy extension past the star limit: start from the best feasible star and
// append the leaf (from any remaining usable transition of the hub) or, once
// the hub pool is exhausted, the D state whose cheapest pair time is minimal.
StateSet extend_set_greedy(const StateSet& base, int d, const PairGraph& g,
                           const NoiseParams& noise);

Encoding encoding_from_state_set(const StateSet& set, const LevelTable& levels,
                                 const AtomicConstants& c, const PairGraph& g,
                                 const StrengthConfig& strengths);

}  // namespace baq
