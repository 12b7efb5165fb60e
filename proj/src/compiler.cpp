#include "baq/compiler.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <deque>
#include <random>

#include "baq/util.hpp"

namespace baq {
namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
const std::complex<double> kI(0.0, 1.0);

double wrap_2pi(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    return y;
}

// Left-multiply V by the real plane rotation [[cos, sin], [-sin, cos]] acting
// on rows (0, k). This is the only primitive the sweep algorithm needs.
void apply_plane_rotation(Eigen::MatrixXcd& V, int k, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const Eigen::RowVectorXcd top = V.row(0);
    V.row(0) = c * top + s * V.row(k);
    V.row(k) = -s * top + c * V.row(k);
}

// Pulse block entries for a played rotation: [[c, -i e^{i phi} s],
// [-i e^{-i phi} s, c]] with c = cos(theta/2), s = sin(theta/2).
struct Block2 {
    std::complex<double> aa, ab, ba, bb;
};

Block2 step_block(const GivensStep& g) {
    const double c = std::cos(0.5 * g.theta), s = std::sin(0.5 * g.theta);
    const std::complex<double> e = std::exp(kI * g.phi);
    return {c, -kI * e * s, -kI * std::conj(e) * s, c};
}

void left_apply(Eigen::MatrixXcd& M, int leaf, const Block2& b) {
    const Eigen::RowVectorXcd top = M.row(0);
    M.row(0) = b.aa * top + b.ab * M.row(leaf);
    M.row(leaf) = b.ba * top + b.bb * M.row(leaf);
}

void left_apply_adjoint(Eigen::MatrixXcd& M, int leaf, const Block2& b) {
    const Eigen::RowVectorXcd top = M.row(0);
    M.row(0) = std::conj(b.aa) * top + std::conj(b.ba) * M.row(leaf);
    M.row(leaf) = std::conj(b.ab) * top + std::conj(b.bb) * M.row(leaf);
}

// The sweep works with signed plane-rotation angles; a played pulse realizes
// angle a >= 0 as (theta = 2a, phi = pi/2) and a < 0 as (theta = -2a,
// phi = 3pi/2), both inside the [0, 2pi] box.
GivensStep pulse_from_plane_angle(int leaf, double a) {
    if (a >= 0.0) return {leaf, 2.0 * a, 0.5 * kPi};
    return {leaf, -2.0 * a, 1.5 * kPi};
}

}  // namespace

Eigen::MatrixXcd givens_unitary(int d, const GivensStep& g) {
    if (g.leaf <= 0 || g.leaf >= d)
        throw ConfigError("givens_unitary: leaf index " + std::to_string(g.leaf) +
                          " outside 1.." + std::to_string(d - 1));
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(d, d);
    const Block2 b = step_block(g);
    U(0, 0) = b.aa;
    U(0, g.leaf) = b.ab;
    U(g.leaf, 0) = b.ba;
    U(g.leaf, g.leaf) = b.bb;
    return U;
}

Eigen::MatrixXcd circuit_unitary(int d, const std::vector<GivensStep>& steps,
                                 const std::vector<double>& vz_phases) {
    if (!vz_phases.empty() && static_cast<int>(vz_phases.size()) != d)
        throw ConfigError("circuit_unitary: frame layer has " +
                          std::to_string(vz_phases.size()) + " phases for dimension " +
                          std::to_string(d));
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(d, d);
    for (int k = 0; k < d && !vz_phases.empty(); ++k) U(k, k) = std::exp(kI * vz_phases[k]);
    for (const GivensStep& g : steps) {
        if (g.leaf <= 0 || g.leaf >= d)
            throw ConfigError("circuit_unitary: leaf index " + std::to_string(g.leaf) +
                              " outside 1.." + std::to_string(d - 1));
        left_apply(U, g.leaf, step_block(g));
    }
    return U;
}

double aligned_cost(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& V) {
    const double d = static_cast<double>(U.rows());
    return 2.0 * d - 2.0 * std::abs((U.adjoint() * V).trace());
}

StarDecomposition star_decompose(const Eigen::MatrixXcd& U, double eps, bool strict) {
    const int d = static_cast<int>(U.rows());
    if (d < 2 || U.cols() != d)
        throw ConfigError("star_decompose: target must be square with d >= 2");
    const double unit_err =
        (U.adjoint() * U - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
    if (unit_err > 1e-10)
        throw NumericalError("star_decompose: input is not unitary (deviation " +
                             format12(unit_err) + ")");

    // Strip one phase per column first; for targets that are real up to column
    // phases this leaves a real matrix, and the phases ride along for free in
    // the virtual-Z frame layer.
    std::vector<double> col_phase(d, 0.0);
    Eigen::MatrixXcd V = U;
    for (int k = 0; k < d; ++k) {
        int r = 0;
        U.col(k).cwiseAbs().maxCoeff(&r);
        col_phase[k] = std::arg(U(r, k));
        V.col(k) *= std::exp(-kI * col_phase[k]);
    }

    std::vector<std::pair<int, double>> applied;  // (leaf, signed plane angle)
    const auto rotate = [&](int k, double theta) {
        apply_plane_rotation(V, k, theta);
        applied.emplace_back(k, theta);
    };

    // Initial sweep: clear column 0 bottom-up.
    for (int i = d - 1; i >= 1; --i) {
        if (std::abs(V(i, 0)) <= eps) continue;
        rotate(i, std::atan2(V(i, 0).real(), V(0, 0).real()));
    }

    // Swap cycle per remaining column: a fixed pi/2 pulse moves the would-be
    // diagonal entry into the pivot row, the rows below are eliminated against
    // it, and the inverse pulse restores the row ordering.
    for (int k = 1; k <= d - 1; ++k) {
        rotate(k, 0.5 * kPi);
        for (int i = d - 1; i >= k + 1; --i) {
            if (std::abs(V(i, k)) <= eps) continue;
            rotate(i, std::atan2(V(i, k).real(), V(0, k).real()));
        }
        rotate(k, -0.5 * kPi);
    }

    StarDecomposition out;
    out.residual = V;
    Eigen::MatrixXcd off = V;
    off.diagonal().setZero();
    out.off_diagonal_norm = off.norm();
    out.diagonal_ok = out.off_diagonal_norm <= 1e-9;
    if (strict && !out.diagonal_ok)
        throw NumericalError(
            "star_decompose: sweep left a non-diagonal residual (off-diagonal norm " +
            format12(out.off_diagonal_norm) +
            "); the target is not real up to column phases");

    out.vz_phases.resize(d);
    for (int k = 0; k < d; ++k) out.vz_phases[k] = std::arg(V(k, k)) + col_phase[k];

    // The sweep built W_N ... W_1 (U P) = V, so U = W_1^T ... W_N^T V P^dag:
    // play the adjoints in reverse record order after the frame layer.
    out.steps.reserve(applied.size());
    for (auto it = applied.rbegin(); it != applied.rend(); ++it)
        out.steps.push_back(pulse_from_plane_angle(it->first, -it->second));
    return out;
}

std::vector<GivensStep> fuse_adjacent(const std::vector<GivensStep>& steps, double tol) {
    // Work with a signed angle about each step's own axis; rotations on the
    // same leaf fuse when their axes agree (add) or oppose (subtract). The
    // period of theta is 4pi, folded back into the [0, 2pi] box by flipping
    // the axis.
    const auto canonical = [&](GivensStep& g) -> bool {  // false when null
        double th = std::fmod(g.theta, 2.0 * kTwoPi);
        if (th < 0.0) th += 2.0 * kTwoPi;
        double ph = g.phi;
        if (th > kTwoPi) {
            th = 2.0 * kTwoPi - th;
            ph += kPi;
        }
        g.theta = th;
        g.phi = wrap_2pi(ph);
        return th > tol && th < 2.0 * kTwoPi - tol;
    };

    std::vector<GivensStep> out;
    for (GivensStep g : steps) {
        if (!canonical(g)) continue;
        bool merged = false;
        while (!out.empty() && out.back().leaf == g.leaf) {
            GivensStep& t = out.back();
            const double dphi = wrap_2pi(g.phi - t.phi);
            if (dphi <= tol || kTwoPi - dphi <= tol) {
                t.theta += g.theta;
            } else if (std::abs(dphi - kPi) <= tol) {
                t.theta -= g.theta;
            } else {
                break;
            }
            merged = true;
            if (!canonical(t)) {
                out.pop_back();
                break;  // exposed predecessor cannot share g's leaf twice in a row
            }
            break;
        }
        if (!merged) out.push_back(g);
    }
    return out;
}

namespace {

// Shared cost/gradient engine for the continuous polish. Parameters are
// packed as [theta_0..theta_{M-1}, phi_0..phi_{M-1}, z_0..z_{d-1}].
struct CostModel {
    const Eigen::MatrixXcd& target;
    int d;
    std::vector<int> leaves;

    std::size_t n_steps() const { return leaves.size(); }
    std::size_t n_params() const { return 2 * leaves.size() + d; }

    double cost_only(const Eigen::VectorXd& x) const {
        Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(d, d);
        const std::size_t M = n_steps();
        for (int k = 0; k < d; ++k) U(k, k) = std::exp(kI * x[2 * M + k]);
        for (std::size_t m = 0; m < M; ++m)
            left_apply(U, leaves[m], step_block({leaves[m], x[m], x[M + m]}));
        return 2.0 * d - 2.0 * std::abs((U.adjoint() * target).trace());
    }

    double cost_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
        const std::size_t M = n_steps();
        grad.setZero(n_params());

        // Prefix products P[m] = M_{m-1} ... M_0 D, with P[0] = D.
        std::vector<Eigen::MatrixXcd> prefix(M + 1);
        prefix[0] = Eigen::MatrixXcd::Identity(d, d);
        for (int k = 0; k < d; ++k) prefix[0](k, k) = std::exp(kI * x[2 * M + k]);
        std::vector<Block2> blocks(M);
        for (std::size_t m = 0; m < M; ++m) {
            blocks[m] = step_block({leaves[m], x[m], x[M + m]});
            prefix[m + 1] = prefix[m];
            left_apply(prefix[m + 1], leaves[m], blocks[m]);
        }
        const Eigen::MatrixXcd& U = prefix[M];
        const std::complex<double> c = (U.adjoint() * target).trace();
        const double ac = std::abs(c);
        const double f = 2.0 * d - 2.0 * ac;
        if (ac < 1e-300) return f;  // gradient undefined at the degenerate point

        // d cost / d p = -(2/|c|) Re(conj(c) dc/dp).
        const std::complex<double> cbar = std::conj(c) / ac;
        const auto fold = [&](const std::complex<double>& dc) { return -2.0 * (cbar * dc).real(); };

        for (int k = 0; k < d; ++k) {
            const std::complex<double> utk = U.col(k).dot(target.col(k));
            grad[2 * M + k] = fold(-kI * utk);
        }

        // Walk B[m] = S[m]^dag target backwards; per step only the four block
        // entries of K = B[m] P[m]^dag are needed.
        Eigen::MatrixXcd B = target;
        for (std::size_t mm = M; mm-- > 0;) {
            const int l = leaves[mm];
            const double th = x[mm], ph = x[M + mm];
            const double cth = std::cos(0.5 * th), sth = std::sin(0.5 * th);
            const std::complex<double> e = std::exp(kI * ph);

            // K_{ab} = sum_c B_{ac} conj(P_{bc}); Eigen's dot conjugates the
            // vector it is called on, so call it on the prefix row.
            const auto kentry = [&](int a, int b) -> std::complex<double> {
                return prefix[mm].row(b).dot(B.row(a));
            };
            const std::complex<double> k00 = kentry(0, 0), k0l = kentry(0, l);
            const std::complex<double> kl0 = kentry(l, 0), kll = kentry(l, l);

            // dM/dtheta block: [[-s/2, -(i/2) e c], [-(i/2) conj(e) c, -s/2]].
            std::complex<double> dc_th = std::conj(-0.5 * sth) * k00 +
                                         std::conj(-0.5 * kI * e * cth) * k0l +
                                         std::conj(-0.5 * kI * std::conj(e) * cth) * kl0 +
                                         std::conj(-0.5 * sth) * kll;
            // dM/dphi block: [[0, e s], [-conj(e) s, 0]].
            std::complex<double> dc_ph =
                std::conj(e * sth) * k0l + std::conj(-std::conj(e) * sth) * kl0;
            grad[mm] = fold(dc_th);
            grad[M + mm] = fold(dc_ph);

            left_apply_adjoint(B, l, blocks[mm]);
        }
        return f;
    }
};

// Lower/upper bounds: rotation and axis angles live in [0, 2pi]; frame phases
// are unconstrained (the cost is periodic in them).
void project_box(Eigen::VectorXd& x, std::size_t n_angles) {
    for (std::size_t i = 0; i < n_angles; ++i) x[i] = std::clamp(x[i], 0.0, kTwoPi);
}

Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   std::size_t n_angles) {
    Eigen::VectorXd pg = g;
    for (std::size_t i = 0; i < n_angles; ++i) {
        if (x[i] <= 0.0 && g[i] > 0.0) pg[i] = 0.0;
        if (x[i] >= kTwoPi && g[i] < 0.0) pg[i] = 0.0;
    }
    return pg;
}

}  // namespace

OptimizeResult optimize_continuous(std::vector<GivensStep>& steps, std::vector<double>& vz,
                                   const Eigen::MatrixXcd& target, const OptimizeOptions& opts) {
    const int d = static_cast<int>(target.rows());
    if (vz.empty()) vz.assign(d, 0.0);
    if (static_cast<int>(vz.size()) != d)
        throw ConfigError("optimize_continuous: frame layer size mismatch");

    CostModel model{target, d, {}};
    model.leaves.reserve(steps.size());
    for (const GivensStep& g : steps) model.leaves.push_back(g.leaf);
    const std::size_t M = steps.size();
    const std::size_t n_angles = 2 * M;
    const std::size_t n = model.n_params();

    Eigen::VectorXd x(n);
    for (std::size_t m = 0; m < M; ++m) {
        // Fold theta (period 4pi) into the [0, 2pi] box, flipping the axis
        // when needed; a plain 2pi wrap would corrupt theta = 2pi pulses.
        double th = std::fmod(steps[m].theta, 2.0 * kTwoPi);
        if (th < 0.0) th += 2.0 * kTwoPi;
        double ph = steps[m].phi;
        if (th > kTwoPi) {
            th = 2.0 * kTwoPi - th;
            ph += kPi;
        }
        x[m] = th;
        x[M + m] = wrap_2pi(ph);
    }
    for (int k = 0; k < d; ++k) x[n_angles + k] = vz[k];
    project_box(x, n_angles);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(-0.4, 0.4);

    Eigen::VectorXd g(n), best_x = x;
    double f = model.cost_grad(x, g);
    double best_f = f;
    constexpr double kDone = 1e-15;

    // L-BFGS with projection onto the box and Armijo backtracking; restarts
    // jitter around the best point seen so far when progress stalls.
    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> mem;  // (s, y)
    OptimizeResult res;
    int it = 0;
    while (it < opts.max_iterations && best_f > kDone) {
        const Eigen::VectorXd pg = projected_gradient(x, g, n_angles);
        bool stalled = pg.norm() < opts.grad_tol;

        if (!stalled) {
            // Two-loop recursion.
            Eigen::VectorXd q = pg;
            std::vector<double> alpha(mem.size());
            for (std::size_t i = mem.size(); i-- > 0;) {
                const auto& [s, y] = mem[i];
                alpha[i] = s.dot(q) / y.dot(s);
                q -= alpha[i] * y;
            }
            if (!mem.empty()) {
                const auto& [s, y] = mem.back();
                q *= s.dot(y) / y.dot(y);
            }
            for (std::size_t i = 0; i < mem.size(); ++i) {
                const auto& [s, y] = mem[i];
                q += (alpha[i] - y.dot(q) / y.dot(s)) * s;
            }
            Eigen::VectorXd dir = -q;
            if (dir.dot(pg) > -1e-18) {
                dir = -pg;
                mem.clear();
            }

            double step = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 48; ++ls, step *= 0.5) {
                Eigen::VectorXd xn = x + step * dir;
                project_box(xn, n_angles);
                const Eigen::VectorXd dx = xn - x;
                if (dx.norm() < 1e-18) break;
                const double fn = model.cost_only(xn);
                if (fn <= f + 1e-4 * g.dot(dx)) {
                    Eigen::VectorXd gn(n);
                    const double fn2 = model.cost_grad(xn, gn);
                    const Eigen::VectorXd dg = gn - g;
                    if (dx.dot(dg) > 1e-14 * dx.norm() * dg.norm()) {
                        mem.emplace_back(dx, dg);
                        if (mem.size() > 10) mem.pop_front();
                    }
                    x = xn;
                    f = fn2;
                    g = gn;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) stalled = true;
        }

        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
        if (stalled) {
            if (res.restarts_used >= opts.restarts || best_f <= 1e-10) break;
            ++res.restarts_used;
            x = best_x;
            for (std::size_t i = 0; i < n; ++i) x[i] += jitter(rng);
            project_box(x, n_angles);
            mem.clear();
            f = model.cost_grad(x, g);
        }
        ++it;
    }

    for (std::size_t m = 0; m < M; ++m) {
        steps[m].theta = best_x[m];
        steps[m].phi = best_x[M + m];
    }
    for (int k = 0; k < d; ++k) vz[k] = best_x[n_angles + k];
    res.cost = best_f;
    res.iterations = it;
    return res;
}

EliminateResult eliminate_pulses(std::vector<GivensStep>& steps, std::vector<double>& vz,
                                 const Eigen::MatrixXcd& target, double eps,
                                 const OptimizeOptions& opts) {
    const int d = static_cast<int>(target.rows());
    if (vz.empty()) vz.assign(d, 0.0);

    EliminateResult out;
    out.cost = optimize_continuous(steps, vz, target, opts).cost;

    bool removed_one = true;
    while (removed_one && !steps.empty()) {
        removed_one = false;
        for (std::size_t m = 0; m < steps.size(); ++m) {
            std::vector<GivensStep> trial = steps;
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(m));
            std::vector<double> trial_vz = vz;
            const OptimizeResult r = optimize_continuous(trial, trial_vz, target, opts);
            if (r.cost < eps) {
                steps = std::move(trial);
                vz = std::move(trial_vz);
                out.cost = r.cost;
                ++out.removed;
                removed_one = true;
                break;  // restart the scan from the lowest index
            }
        }
    }
    return out;
}

CompiledCircuit compile_unitary(const Eigen::MatrixXcd& target, double eps,
                                const OptimizeOptions& opts) {
    using clock = std::chrono::steady_clock;
    const auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    CompiledCircuit cc;
    auto t0 = clock::now();
    StarDecomposition dec = star_decompose(target, 1e-12, /*strict=*/false);
    cc.report.ms_decompose = ms_since(t0);
    cc.report.algorithm_steps = dec.steps.size();

    cc.steps = fuse_adjacent(dec.steps);
    cc.vz_phases = dec.vz_phases;
    cc.report.fused_steps = cc.steps.size();

    t0 = clock::now();
    optimize_continuous(cc.steps, cc.vz_phases, target, opts);
    cc.report.ms_optimize = ms_since(t0);

    t0 = clock::now();
    const EliminateResult el = eliminate_pulses(cc.steps, cc.vz_phases, target, eps, opts);
    cc.report.ms_eliminate = ms_since(t0);
    cc.report.final_steps = cc.steps.size();
    cc.report.cost = el.cost;
    return cc;
}

Eigen::MatrixXcd hadamard_power(int n) {
    if (n < 1) throw ConfigError("hadamard_power: need n >= 1");
    Eigen::MatrixXcd H(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    H << r, r, r, -r;
    Eigen::MatrixXcd out = H;
    for (int k = 1; k < n; ++k) {
        Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
        next << r * out, r * out, r * out, -r * out;
        out.swap(next);
    }
    return out;
}

std::vector<GivensStep> superposition_steps(int d) {
    if (d < 2) throw ConfigError("superposition_steps: need d >= 2");
    std::vector<GivensStep> steps;
    steps.reserve(d - 1);
    // Each pulse hands 1/(d-l+1) of the remaining hub population to leaf l;
    // phi = 3pi/2 keeps every transferred amplitude real and positive.
    for (int l = 1; l <= d - 1; ++l) {
        const double theta = 2.0 * std::asin(std::sqrt(1.0 / (d - l + 1)));
        steps.push_back({l, theta, 1.5 * kPi});
    }
    return steps;
}

NamedCircuit build_named_circuit(const std::string& name, int n, std::uint64_t secret,
                                 bool fast, const OptimizeOptions& opts) {
    NamedCircuit nc;
    if (name == "H2" || name == "H3") {
        const int nq = (name == "H2") ? 2 : 3;
        nc.d = 1 << nq;
        const CompiledCircuit cc = compile_unitary(hadamard_power(nq), 1e-3, opts);
        nc.items.emplace_back(PhaseLayer{cc.vz_phases});
        for (const GivensStep& g : cc.steps) nc.items.emplace_back(g);
        nc.report = cc.report;
        nc.description = "Hadamard on " + std::to_string(nq) +
                         " virtual qubits, compressed star decomposition";
        return nc;
    }
    if (name == "superposition") {
        if (n < 2) throw ConfigError("superposition circuit needs d >= 2");
        nc.d = n;
        for (const GivensStep& g : superposition_steps(n)) nc.items.emplace_back(g);
        nc.description = "equal superposition over " + std::to_string(n) + " states";
        return nc;
    }
    if (name == "bv") {
        if (n < 1 || n > 4) throw ConfigError("bv circuit supports 1..4 virtual qubits");
        nc.d = 1 << n;
        if (secret >= static_cast<std::uint64_t>(nc.d))
            throw ConfigError("bv secret " + std::to_string(secret) +
                              " out of range for " + std::to_string(n) + " qubits");
        // The oracle kicks a pi phase onto every x with odd popcount(x & s);
        // it costs nothing (virtual-Z layer). The surrounding Hadamard layers
        // come from the exact sweep so the noiseless algorithm is
        // deterministic; greedy elimination would trade that exactness away.
        const Eigen::MatrixXcd H = hadamard_power(n);
        StarDecomposition dec = star_decompose(H, 1e-12, /*strict=*/true);
        const std::vector<GivensStep> h_steps = fuse_adjacent(dec.steps);
        nc.report.algorithm_steps = dec.steps.size();
        nc.report.fused_steps = h_steps.size();

        std::vector<double> oracle(nc.d, 0.0);
        for (int x = 0; x < nc.d; ++x)
            if (std::popcount(static_cast<std::uint64_t>(x) & secret) & 1) oracle[x] = kPi;

        if (fast) {
            for (const GivensStep& g : superposition_steps(nc.d)) nc.items.emplace_back(g);
        } else {
            nc.items.emplace_back(PhaseLayer{dec.vz_phases});
            for (const GivensStep& g : h_steps) nc.items.emplace_back(g);
        }
        nc.items.emplace_back(PhaseLayer{oracle});
        nc.items.emplace_back(PhaseLayer{dec.vz_phases});
        for (const GivensStep& g : h_steps) nc.items.emplace_back(g);

        std::size_t pulses = 0;
        for (const CircuitItem& it : nc.items)
            if (std::holds_alternative<GivensStep>(it)) ++pulses;
        nc.report.final_steps = pulses;
        nc.description = "Bernstein-Vazirani on " + std::to_string(n) +
                         " virtual qubits, secret " + std::to_string(secret) +
                         (fast ? ", direct superposition" : ", full Hadamard first layer");
        return nc;
    }
    if (name == "cccnot") {
        nc.d = 16;
        nc.hub_logical = 14;
        // |1110> sits on the hub, so the triply controlled flip is one pi
        // pulse to the |1111> leaf; every other basis state is a spectator.
        nc.items.emplace_back(GivensStep{15, kPi, 0.0});
        nc.report.algorithm_steps = nc.report.fused_steps = nc.report.final_steps = 1;
        nc.description = "CCCNOT as a single pi rotation between |1110> and |1111>";
        return nc;
    }
    throw ConfigError("unknown named circuit '" + name +
                      "' (expected H2, H3, superposition, bv, cccnot)");
}

}  // namespace baq
