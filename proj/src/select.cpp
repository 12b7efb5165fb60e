#include "baq/select.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>

#include "baq/util.hpp"

namespace baq {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrt2 = 1.4142135623730950488;

// Per-pair additive pieces of the cost, cached so subset enumeration is pure
// array arithmetic: C = tau^2 (sum inv_lg2 / l + sum inv_bg2) + tau sum inv_ll.
struct PairTerms {
    Eigen::MatrixXd inv_lg2;  // 1/T_LG^2, zero when infinite
    Eigen::MatrixXd inv_ll;   // 1/T_LL
    Eigen::MatrixXd inv_bg2;  // 1/T_BG^2
};

PairTerms pair_terms(const PairGraph& g, const NoiseParams& noise) {
    const int n = static_cast<int>(g.node_ids.size());
    PairTerms t;
    t.inv_lg2 = Eigen::MatrixXd::Zero(n, n);
    t.inv_ll = Eigen::MatrixXd::Zero(n, n);
    t.inv_bg2 = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const CoherenceTimes ct = pairwise_coherence_times(
                g.is_s[static_cast<std::size_t>(j)], g.is_s[static_cast<std::size_t>(k)],
                g.sens[static_cast<std::size_t>(j)], g.sens[static_cast<std::size_t>(k)], noise);
            const double lg2 = std::isinf(ct.T_LG_us) ? 0.0 : 1.0 / (ct.T_LG_us * ct.T_LG_us);
            const double ll = std::isinf(ct.T_LL_us) ? 0.0 : 1.0 / ct.T_LL_us;
            const double bg2 = std::isinf(ct.T_BG_us) ? 0.0 : 1.0 / (ct.T_BG_us * ct.T_BG_us);
            t.inv_lg2(j, k) = t.inv_lg2(k, j) = lg2;
            t.inv_ll(j, k) = t.inv_ll(k, j) = ll;
            t.inv_bg2(j, k) = t.inv_bg2(k, j) = bg2;
        }
    return t;
}

std::vector<std::string> ids_for(const std::vector<int>& nodes, const PairGraph& g) {
    std::vector<std::string> ids;
    ids.reserve(nodes.size());
    for (int n : nodes) ids.push_back(g.node_ids[static_cast<std::size_t>(n)]);
    return ids;
}

struct HubSearch {
    const PairGraph& g;
    const PairTerms& terms;
    int d;
    std::atomic<std::uint64_t>& visited;
    std::uint64_t budget;

    std::vector<int> leaves{};  // candidate nodes, ascending
    std::vector<int> chosen{};  // hub first
    bool aborted = false;
    bool found = false;
    double best_cost = kInfTime;
    std::vector<int> best_nodes{};
    double best_tau = 0.0;

    double tau = 0.0, lg2 = 0.0, ll = 0.0, bg2 = 0.0;

    double cost_of(double tau_s, double s_lg2, double s_ll, double s_bg2) const {
        return tau_s * tau_s * (s_lg2 / d + s_bg2) + tau_s * s_ll;
    }

    void consider_complete() {
        const double c = cost_of(tau, lg2, ll, bg2);
        bool better = !found;
        if (!better) {
            const double tol = 1e-12 * std::max(1.0, std::abs(best_cost));
            better = c < best_cost - tol;
            if (!better && std::abs(c - best_cost) <= tol) {
                const std::vector<std::string> a = ids_for(chosen, g);
                const std::vector<std::string> b = ids_for(best_nodes, g);
                better = std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
            }
        }
        if (better) {
            best_cost = c;
            best_nodes = chosen;
            best_tau = tau;
        }
        found = true;
    }

    void recurse(std::size_t start) {
        if (aborted) return;
        // The budget cuts off the hunt for improvements, never the first
        // complete descent, so a feasible call always yields some set.
        if (visited.fetch_add(1, std::memory_order_relaxed) >= budget && found) {
            aborted = true;
            return;
        }
        const int need = d - static_cast<int>(chosen.size());
        if (need == 0) {
            consider_complete();
            return;
        }
        if (static_cast<int>(leaves.size() - start) < need) return;

        // Admissible bound: pair times and inverse coherence sums only grow,
        // so completing with the `need` cheapest leaf marginals (counted
        // against the current members only) underestimates the final cost.
        if (found) {
            std::vector<double> margs;
            margs.reserve(leaves.size() - start);
            for (std::size_t i = start; i < leaves.size(); ++i) {
                double m = 0.0;
                for (int v : chosen) m += g.tau_pi_us(leaves[i], v);
                margs.push_back(m);
            }
            std::partial_sort(margs.begin(), margs.begin() + need, margs.end());
            double tau_lb = tau;
            for (int i = 0; i < need; ++i) tau_lb += margs[static_cast<std::size_t>(i)];
            if (cost_of(tau_lb, lg2, ll, bg2) >= best_cost - 1e-15) return;
        }

        for (std::size_t i = start; i + static_cast<std::size_t>(need) <= leaves.size(); ++i) {
            const int u = leaves[i];
            double d_tau = 0.0, d_lg2 = 0.0, d_ll = 0.0, d_bg2 = 0.0;
            bool feasible = true;
            for (int v : chosen) {
                const double tp = g.tau_pi_us(u, v);
                if (std::isinf(tp)) {
                    feasible = false;
                    break;
                }
                d_tau += tp;
                d_lg2 += terms.inv_lg2(u, v);
                d_ll += terms.inv_ll(u, v);
                d_bg2 += terms.inv_bg2(u, v);
            }
            if (!feasible) continue;
            chosen.push_back(u);
            tau += d_tau;
            lg2 += d_lg2;
            ll += d_ll;
            bg2 += d_bg2;
            recurse(i + 1);
            chosen.pop_back();
            tau -= d_tau;
            lg2 -= d_lg2;
            ll -= d_ll;
            bg2 -= d_bg2;
            if (aborted) return;
        }
    }
};

}  // namespace

PairGraph build_pair_graph(const LevelTable& levels, const AtomicConstants& c,
                           const StrengthConfig& strengths, const SelectionCutoffs& cutoffs) {
    PairGraph g;
    for (int m = -2; m <= 2; ++m) g.s_nodes.push_back(levels.index_of('S', 2, m));
    for (std::size_t j = 0; j < levels.d52.size(); ++j) g.d_nodes.push_back(static_cast<int>(j));

    const int n = static_cast<int>(g.s_nodes.size() + g.d_nodes.size());
    for (int s : g.s_nodes) {
        g.node_ids.push_back(levels.s12[static_cast<std::size_t>(s)].id);
        g.sens.push_back(levels.s12[static_cast<std::size_t>(s)].dEdB_MHz_per_G);
        g.is_s.push_back(true);
    }
    for (int dj : g.d_nodes) {
        g.node_ids.push_back(levels.d52[static_cast<std::size_t>(dj)].id);
        g.sens.push_back(levels.d52[static_cast<std::size_t>(dj)].dEdB_MHz_per_G);
        g.is_s.push_back(false);
    }

    g.direct_us = Eigen::MatrixXd::Constant(n, n, kInfTime);
    for (int i = 0; i < n; ++i) g.direct_us(i, i) = 0.0;
    const std::vector<Transition> carriers = transition_table(levels, c, strengths);
    for (const Transition& tr : carriers) {
        if (tr.rel_strength < cutoffs.min_rel_strength) continue;
        if (std::abs(tr.sens_MHz_per_G) > cutoffs.max_sens_MHz_per_G) continue;
        int ns = -1;
        for (std::size_t i = 0; i < g.s_nodes.size(); ++i)
            if (g.s_nodes[i] == tr.s_index) ns = static_cast<int>(i);
        if (ns < 0) continue;
        const int nd = static_cast<int>(g.s_nodes.size()) + tr.d_index;
        const double t = tr.pi_time_us;
        if (t < g.direct_us(ns, nd)) g.direct_us(ns, nd) = g.direct_us(nd, ns) = t;
    }

    g.tau_pi_us = g.direct_us;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (g.tau_pi_us(i, k) + g.tau_pi_us(k, j) < g.tau_pi_us(i, j))
                    g.tau_pi_us(i, j) = g.tau_pi_us(i, k) + g.tau_pi_us(k, j);

    g.kappa = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.kappa(i, j) = std::abs(g.sens[static_cast<std::size_t>(i)] -
                                     g.sens[static_cast<std::size_t>(j)]);
    return g;
}

CoherenceTimes pairwise_coherence_times(bool j_in_s, bool k_in_s, double kappa_j, double kappa_k,
                                        const NoiseParams& noise) {
    CoherenceTimes ct;
    if (noise.enable_B && noise.fwhm_B_G > 0.0) {
        const double dk = std::abs(kappa_j - kappa_k);
        if (dk > 0.0) {
            const double sigma_f_MHz = dk * noise.fwhm_B_G / kFwhmToSigma;
            ct.T_BG_us = 1.0 / (kSqrt2 * kPi * sigma_f_MHz);
        }
    }
    // The laser only dephases superpositions straddling the optical gap.
    if (noise.enable_laser && (j_in_s != k_in_s)) {
        if (noise.voigt_G_fwhm_Hz > 0.0) {
            const double sigma_f_MHz = noise.voigt_G_fwhm_Hz / kFwhmToSigma * 1e-6;
            ct.T_LG_us = 1.0 / (kSqrt2 * kPi * sigma_f_MHz);
        }
        if (noise.voigt_L_fwhm_Hz > 0.0)
            ct.T_LL_us = 1.0 / (kPi * noise.voigt_L_fwhm_Hz * 1e-6);
    }
    return ct;
}

double set_cost(const std::vector<int>& nodes, const PairGraph& g, const NoiseParams& noise) {
    const int l = static_cast<int>(nodes.size());
    if (l < 2) return 0.0;
    double tau = 0.0, lg2 = 0.0, ll = 0.0, bg2 = 0.0;
    for (int j = 0; j < l; ++j)
        for (int k = j + 1; k < l; ++k) {
            const double tp = g.tau_pi_us(nodes[static_cast<std::size_t>(j)],
                                          nodes[static_cast<std::size_t>(k)]);
            if (std::isinf(tp)) return kInfTime;
            tau += tp;
            const CoherenceTimes ct = pairwise_coherence_times(
                g.is_s[static_cast<std::size_t>(nodes[static_cast<std::size_t>(j)])],
                g.is_s[static_cast<std::size_t>(nodes[static_cast<std::size_t>(k)])],
                g.sens[static_cast<std::size_t>(nodes[static_cast<std::size_t>(j)])],
                g.sens[static_cast<std::size_t>(nodes[static_cast<std::size_t>(k)])], noise);
            if (!std::isinf(ct.T_LG_us)) lg2 += 1.0 / (ct.T_LG_us * ct.T_LG_us);
            if (!std::isinf(ct.T_LL_us)) ll += 1.0 / ct.T_LL_us;
            if (!std::isinf(ct.T_BG_us)) bg2 += 1.0 / (ct.T_BG_us * ct.T_BG_us);
        }
    return tau * tau * (lg2 / l + bg2) + tau * ll;
}

StateSet search_star_sets(int d, const PairGraph& g, const NoiseParams& noise,
                          const SearchOptions& opts) {
    if (d < 2 || d > 17)
        throw ConfigError("star search covers d in 2..17; use the greedy extension beyond");
    const PairTerms terms = pair_terms(g, noise);
    std::atomic<std::uint64_t> visited{0};

    auto search_hub = [&](int hub) {
        HubSearch hs{g, terms, d, visited, opts.node_budget};
        for (std::size_t i = g.s_nodes.size(); i < g.node_ids.size(); ++i)
            if (!std::isinf(g.direct_us(hub, static_cast<int>(i))))
                hs.leaves.push_back(static_cast<int>(i));
        if (static_cast<int>(hs.leaves.size()) < d - 1) return hs;
        hs.chosen.push_back(hub);
        hs.recurse(0);
        return hs;
    };

    std::vector<HubSearch> results;
    const int n_hubs = static_cast<int>(g.s_nodes.size());
    if (opts.threads > 1) {
        std::vector<std::future<HubSearch>> futs;
        for (int h = 0; h < n_hubs; ++h)
            futs.push_back(std::async(std::launch::async, search_hub, h));
        for (auto& f : futs) results.push_back(f.get());
    } else {
        for (int h = 0; h < n_hubs; ++h) results.push_back(search_hub(h));
    }

    StateSet best;
    bool any = false;
    bool any_aborted = false;
    for (const HubSearch& hs : results) {
        any_aborted = any_aborted || hs.aborted;
        if (!hs.found) continue;
        const double tol = 1e-12 * std::max(1.0, std::abs(best.cost));
        const std::vector<std::string> ids = ids_for(hs.best_nodes, g);
        if (!any || hs.best_cost < best.cost - tol ||
            (std::abs(hs.best_cost - best.cost) <= tol &&
             std::lexicographical_compare(ids.begin(), ids.end(), best.ids.begin(),
                                          best.ids.end()))) {
            best.nodes = hs.best_nodes;
            best.hub = hs.best_nodes[0];
            best.tau_S_us = hs.best_tau;
            best.cost = hs.best_cost;
            best.ids = ids;
            any = true;
        }
    }
    if (!any)
        throw InfeasibleError("no S F=2 hub offers " + std::to_string(d - 1) +
                              " usable transitions");
    best.proven_optimal = !any_aborted;
    return best;
}

StateSet extend_set_greedy(const StateSet& base, int d, const PairGraph& g,
                           const NoiseParams& noise) {
    if (d < static_cast<int>(base.nodes.size()))
        throw ConfigError("greedy extension cannot shrink a set");
    StateSet out = base;
    while (static_cast<int>(out.nodes.size()) < d) {
        std::vector<int> pool;
        for (std::size_t i = g.s_nodes.size(); i < g.node_ids.size(); ++i) {
            const int u = static_cast<int>(i);
            if (std::find(out.nodes.begin(), out.nodes.end(), u) != out.nodes.end()) continue;
            if (!std::isinf(g.direct_us(out.hub, u))) pool.push_back(u);
        }
        if (pool.empty()) {
            // hub exhausted: fall back to any D state reachable from every member
            for (std::size_t i = g.s_nodes.size(); i < g.node_ids.size(); ++i) {
                const int u = static_cast<int>(i);
                if (std::find(out.nodes.begin(), out.nodes.end(), u) != out.nodes.end())
                    continue;
                bool ok = true;
                for (int v : out.nodes)
                    if (std::isinf(g.tau_pi_us(u, v))) ok = false;
                if (ok) pool.push_back(u);
            }
        }
        if (pool.empty())
            throw InfeasibleError("no reachable D state left to extend the set to d=" +
                                  std::to_string(d));
        int best_u = -1;
        double best_marg = kInfTime;
        for (int u : pool) {
            double m = 0.0;
            for (int v : out.nodes) m += g.tau_pi_us(u, v);
            if (m < best_marg) {
                best_marg = m;
                best_u = u;
            }
        }
        out.nodes.push_back(best_u);
    }
    std::sort(out.nodes.begin() + 1, out.nodes.end());
    out.tau_S_us = 0.0;
    for (std::size_t j = 0; j < out.nodes.size(); ++j)
        for (std::size_t k = j + 1; k < out.nodes.size(); ++k)
            out.tau_S_us += g.tau_pi_us(out.nodes[j], out.nodes[k]);
    out.cost = set_cost(out.nodes, g, noise);
    out.proven_optimal = false;
    out.ids = ids_for(out.nodes, g);
    return out;
}

Encoding encoding_from_state_set(const StateSet& set, const LevelTable& levels,
                                 const AtomicConstants& c, const PairGraph& g,
                                 const StrengthConfig& strengths) {
    if (set.nodes.empty() || set.hub != set.nodes[0] ||
        set.hub >= static_cast<int>(g.s_nodes.size()))
        throw ConfigError("state set must lead with an S-manifold hub");
    std::vector<std::pair<char, std::pair<int, int>>> labels;
    for (int n : set.nodes) {
        if (n < static_cast<int>(g.s_nodes.size())) {
            const Level& lv = levels.s12[static_cast<std::size_t>(
                g.s_nodes[static_cast<std::size_t>(n)])];
            labels.push_back({'S', {lv.F, lv.m}});
        } else {
            const Level& lv = levels.d52[static_cast<std::size_t>(
                g.d_nodes[static_cast<std::size_t>(n - static_cast<int>(g.s_nodes.size()))])];
            labels.push_back({'D', {lv.F, lv.m}});
        }
    }
    const std::vector<Transition> table = transition_table(levels, c, strengths);
    return make_encoding(levels, table, labels, 0);
}

}  // namespace baq
