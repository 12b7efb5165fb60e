#include "baq/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "baq/angular.hpp"
#include "baq/util.hpp"

namespace baq {

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// I.J = Iz Jz + (I+ J- + I- J+)/2 on the product basis.
Eigen::MatrixXd idotj(double I, double J) {
    Eigen::MatrixXd k = kron(op_jz(I), op_jz(J));
    k += 0.5 * (kron(op_jplus(I), op_jminus(J)) + kron(op_jminus(I), op_jplus(J)));
    return k;
}

int round_int(double x) { return static_cast<int>(std::lround(x)); }

std::string level_id(char manifold, int F, int m) {
    return std::string(manifold == 'S' ? "S12" : "D52") + "_F" + std::to_string(F) + "_m" +
           std::to_string(m);
}

}  // namespace

ManifoldBasis manifold_basis(double I, double J) {
    ManifoldBasis b;
    b.I = I;
    b.J = J;
    b.nI = round_int(2 * I) + 1;
    b.nJ = round_int(2 * J) + 1;
    return b;
}

Eigen::MatrixXd hyperfine_hamiltonian(double I, double J, const ManifoldConstants& mc) {
    const Eigen::MatrixXd K = idotj(I, J);
    const int n = K.rows();
    const Eigen::MatrixXd K2 = K * K;
    const double iI = I * (I + 1.0), jJ = J * (J + 1.0);
    Eigen::MatrixXd H = mc.A_MHz * K;
    // Quadrupole and octupole denominators vanish for low I or J; those terms
    // are only defined (and only added) when the moments can exist.
    if (I > 0.5 && J > 0.5) {
        const double denom = 2.0 * I * (2.0 * I - 1.0) * J * (2.0 * J - 1.0);
        H += (mc.B_MHz / denom) *
             (3.0 * K2 + 1.5 * K - iI * jJ * Eigen::MatrixXd::Identity(n, n));
    }
    if (mc.C_MHz != 0.0 && I > 1.0 && J > 1.0) {
        const double denom = I * (I - 1.0) * (2.0 * I - 1.0) * J * (J - 1.0) * (2.0 * J - 1.0);
        H += (mc.C_MHz / denom) *
             (10.0 * K2 * K + 20.0 * K2 - 5.0 * iI * jJ * Eigen::MatrixXd::Identity(n, n) +
              2.0 * K * (iI + jJ + 3.0 - 3.0 * iI * jJ));
    }
    return H;
}

Eigen::MatrixXd zeeman_derivative(double I, double J, double gJ, double gI, double muB) {
    const int nI = round_int(2 * I) + 1, nJ = round_int(2 * J) + 1;
    return muB * (gJ * kron(Eigen::MatrixXd::Identity(nI, nI), op_jz(J)) +
                  gI * kron(op_jz(I), Eigen::MatrixXd::Identity(nJ, nJ)));
}

Eigen::MatrixXd build_hamiltonian(double I, double J, const ManifoldConstants& mc, double gI,
                                  double muB, double B_G) {
    return hyperfine_hamiltonian(I, J, mc) + B_G * zeeman_derivative(I, J, mc.gJ, gI, muB);
}

std::vector<Level> solve_manifold(double I, double J, const ManifoldConstants& mc, double gI,
                                  double muB, double B_G, int steps) {
    if (steps < 1) throw ConfigError("solve_manifold: steps must be >= 1");
    const ManifoldBasis basis = manifold_basis(I, J);
    const Eigen::MatrixXd Hhf = hyperfine_hamiltonian(I, J, mc);
    const Eigen::MatrixXd dHdB = zeeman_derivative(I, J, mc.gJ, gI, muB);
    const Eigen::MatrixXd K = idotj(I, J);

    // Total m = m_I + m_J is conserved; work block by block (doubled m keys).
    std::map<int, std::vector<int>> blocks;
    for (int idx = 0; idx < basis.dim(); ++idx)
        blocks[round_int(2 * (basis.mI_of(idx) + basis.mJ_of(idx)))].push_back(idx);

    const char manifold = (J < 1.0) ? 'S' : 'D';
    std::vector<Level> out;
    for (const auto& [m2, idxs] : blocks) {
        const int nb = static_cast<int>(idxs.size());
        Eigen::MatrixXd Hb0(nb, nb), Kb(nb, nb);
        Eigen::VectorXd db(nb);  // dH/dB is diagonal in the product basis
        for (int r = 0; r < nb; ++r) {
            db(r) = dHdB(idxs[r], idxs[r]);
            for (int c = 0; c < nb; ++c) {
                Hb0(r, c) = Hhf(idxs[r], idxs[c]);
                Kb(r, c) = K(idxs[r], idxs[c]);
            }
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hb0);
        if (es.info() != Eigen::Success)
            throw NumericalError("hyperfine diagonalization failed");
        Eigen::MatrixXd vecs = es.eigenvectors();
        Eigen::VectorXd vals = es.eigenvalues();

        // F labels from F(F+1) = 2<I.J> + I(I+1) + J(J+1) at zero field.
        std::vector<int> Fs(nb);
        for (int c = 0; c < nb; ++c) {
            const double y =
                2.0 * vecs.col(c).dot(Kb * vecs.col(c)) + I * (I + 1.0) + J * (J + 1.0);
            Fs[c] = round_int(0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * y)));
        }

        // Adiabatic ramp 0 -> B_G, re-matching eigenvectors by overlap so the
        // zero-field labels ride through any avoided crossings.
        for (int s = 1; s <= steps && B_G != 0.0; ++s) {
            const double B = B_G * static_cast<double>(s) / static_cast<double>(steps);
            Eigen::MatrixXd Hb = Hb0;
            Hb.diagonal() += B * db;
            es.compute(Hb);
            if (es.info() != Eigen::Success)
                throw NumericalError("Zeeman diagonalization failed");
            const Eigen::MatrixXd overlap = vecs.transpose() * es.eigenvectors();

            std::vector<int> assign(nb, -1);
            std::vector<bool> used_row(nb, false), used_col(nb, false);
            for (int pick = 0; pick < nb; ++pick) {
                int br = -1, bc = -1;
                double best = -1.0;
                for (int r = 0; r < nb; ++r) {
                    if (used_row[r]) continue;
                    for (int c = 0; c < nb; ++c) {
                        if (used_col[c]) continue;
                        if (std::fabs(overlap(r, c)) > best) {
                            best = std::fabs(overlap(r, c));
                            br = r;
                            bc = c;
                        }
                    }
                }
                if (best < 0.5)
                    throw NumericalError(
                        "adiabatic label tracking lost (overlap < 0.5); increase ramp steps");
                assign[br] = bc;
                used_row[br] = true;
                used_col[bc] = true;
            }

            Eigen::MatrixXd next_vecs(nb, nb);
            Eigen::VectorXd next_vals(nb);
            for (int r = 0; r < nb; ++r) {
                const int c = assign[r];
                // Keep a continuous sign along the ramp.
                const double sign = (overlap(r, c) < 0.0) ? -1.0 : 1.0;
                next_vecs.col(r) = sign * es.eigenvectors().col(c);
                next_vals(r) = es.eigenvalues()(c);
            }
            vecs = next_vecs;
            vals = next_vals;
        }

        for (int c = 0; c < nb; ++c) {
            Level lv;
            lv.manifold = manifold;
            lv.F = Fs[c];
            lv.m = m2 / 2;
            lv.E_MHz = vals(c);
            lv.dEdB_MHz_per_G = vecs.col(c).cwiseAbs2().dot(db);  // Hellmann-Feynman
            lv.amps = Eigen::VectorXd::Zero(basis.dim());
            for (int r = 0; r < nb; ++r) lv.amps(idxs[r]) = vecs(r, c);
            lv.id = level_id(manifold, lv.F, lv.m);
            out.push_back(std::move(lv));
        }
    }

    std::sort(out.begin(), out.end(), [](const Level& a, const Level& b) {
        return std::tie(a.F, a.m) < std::tie(b.F, b.m);
    });
    return out;
}

const Level& LevelTable::find(char manifold, int F, int m) const {
    const int idx = index_of(manifold, F, m);
    if (idx < 0) throw ConfigError("no such level: " + level_id(manifold, F, m));
    return manifold == 'S' ? s12[idx] : d52[idx];
}

int LevelTable::index_of(char manifold, int F, int m) const {
    if (manifold != 'S' && manifold != 'D')
        throw ConfigError(std::string("unknown manifold '") + manifold + "'");
    const auto& list = (manifold == 'S') ? s12 : d52;
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i].F == F && list[i].m == m) return static_cast<int>(i);
    return -1;
}

LevelTable solve_structure(const AtomicConstants& c, double B_G, int steps) {
    LevelTable t;
    t.s12 = solve_manifold(c.I, 0.5, c.s12, c.gI, c.muB_MHz_per_G, B_G, steps);
    t.d52 = solve_manifold(c.I, 2.5, c.d52, c.gI, c.muB_MHz_per_G, B_G, steps);
    return t;
}

AtomicConstants AtomicConstants::from_file(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::parse_file(path);
    AtomicConstants c;
    c.I = kv.get_double("nuclear_spin", 1.5);
    c.s12.A_MHz = kv.get_double("s12.A_MHz");
    c.s12.gJ = kv.get_double("s12.gJ");
    c.s12.source = kv.get_string("s12.source");
    c.d52.A_MHz = kv.get_double("d52.A_MHz");
    c.d52.B_MHz = kv.get_double("d52.B_MHz");
    c.d52.C_MHz = kv.get_double("d52.C_MHz", 0.0);
    c.d52.gJ = kv.get_double("d52.gJ");
    c.d52.source = kv.get_string("d52.source");
    c.gI = kv.get_double("gI");
    c.gI_source = kv.get_string("gI.source");
    c.muB_MHz_per_G = kv.get_double("muB_MHz_per_G", c.muB_MHz_per_G);
    c.field_G = kv.get_double("field_G", c.field_G);
    c.freq_offset_MHz = kv.get_double("freq_offset_MHz", 0.0);
    c.d52_lifetime_s = kv.get_double("d52.lifetime_s", c.d52_lifetime_s);
    c.nu_x_MHz = kv.get_double("trap.nu_x_MHz", c.nu_x_MHz);
    c.nu_y_MHz = kv.get_double("trap.nu_y_MHz", c.nu_y_MHz);
    c.nu_z_MHz = kv.get_double("trap.nu_z_MHz", c.nu_z_MHz);
    c.lamb_dicke = kv.get_double("trap.lamb_dicke", c.lamb_dicke);
    c.nbar = kv.get_double("trap.nbar", c.nbar);
    kv.reject_unknown();
    return c;
}

namespace {

// Electronic quadrupole geometry factor: 3-j coupling of (J=1/2, m_J) to
// (J'=5/2, m_J + q) through the rank-2 tensor component q.
double quad_3j(double mJ_upper, int q, double mJ_lower) {
    const int phase = (round_int(2.5 - mJ_upper) % 2 == 0) ? 1 : -1;
    return phase * wigner3j(2.5, 2.0, 0.5, -mJ_upper, q, mJ_lower);
}

}  // namespace

std::vector<Transition> transition_table(const LevelTable& t, const AtomicConstants& c,
                                         const StrengthConfig& sc) {
    const ManifoldBasis bs = manifold_basis(c.I, 0.5);
    const ManifoldBasis bd = manifold_basis(c.I, 2.5);

    std::vector<Transition> lines;
    for (std::size_t si = 0; si < t.s12.size(); ++si) {
        const Level& s = t.s12[si];
        if (s.F != 2) continue;  // shelving starts from the F=2 ground levels
        for (std::size_t di = 0; di < t.d52.size(); ++di) {
            const Level& d = t.d52[di];
            const int q = d.m - s.m;
            if (std::abs(q) > 2) continue;

            // Coupling amplitude: nuclear spin is a spectator, so sum the
            // electronic 3-j factor over the shared m_I decomposition.
            double amp = 0.0;
            for (int is = 0; is < bs.dim(); ++is) {
                const double cs = s.amps(is);
                if (cs == 0.0) continue;
                const double mI = bs.mI_of(is), mJ = bs.mJ_of(is);
                for (int id = 0; id < bd.dim(); ++id) {
                    if (bd.mI_of(id) != mI) continue;
                    if (round_int(bd.mJ_of(id) - mJ) != q) continue;
                    amp += cs * d.amps(id) * quad_3j(bd.mJ_of(id), q, mJ);
                }
            }
            amp *= std::sqrt(std::max(0.0, sc.w_q[static_cast<std::size_t>(q + 2)]));

            Transition tr;
            tr.s_index = static_cast<int>(si);
            tr.d_index = static_cast<int>(di);
            tr.id = s.id + ">" + d.id;
            tr.dm = q;
            tr.freq_MHz = d.E_MHz - s.E_MHz + c.freq_offset_MHz;
            tr.sens_MHz_per_G = d.dEdB_MHz_per_G - s.dEdB_MHz_per_G;
            tr.amplitude = std::fabs(amp);
            lines.push_back(std::move(tr));
        }
    }

    // Relative strengths: per |dm| class, against the strongest line of that
    // class unless a reference override names a specific line.
    for (int q = -2; q <= 2; ++q) {
        const std::size_t qi = static_cast<std::size_t>(q + 2);
        double ref_amp = 0.0;
        if (!sc.ref_override[qi].empty()) {
            bool found = false;
            for (const Transition& tr : lines)
                if (tr.dm == q && tr.id == sc.ref_override[qi]) {
                    ref_amp = tr.amplitude;
                    found = true;
                }
            if (!found)
                throw ConfigError("strength reference line not in table: " + sc.ref_override[qi]);
        } else {
            for (const Transition& tr : lines)
                if (tr.dm == q) ref_amp = std::max(ref_amp, tr.amplitude);
        }
        if (ref_amp <= 0.0) continue;
        for (Transition& tr : lines) {
            if (tr.dm != q) continue;
            tr.rel_strength = tr.amplitude / ref_amp;
            tr.pi_time_us = (tr.rel_strength > 1e-12)
                                ? sc.ref_pi_time_us[qi] / tr.rel_strength
                                : std::numeric_limits<double>::infinity();
        }
    }
    return lines;
}

std::vector<Transition> augment_sidebands(const std::vector<Transition>& carriers,
                                          const AtomicConstants& c) {
    const double scale = c.lamb_dicke * std::sqrt(c.nbar);
    const std::array<std::pair<const char*, double>, 3> axes{
        std::pair<const char*, double>{"x", c.nu_x_MHz},
        std::pair<const char*, double>{"y", c.nu_y_MHz},
        std::pair<const char*, double>{"z", c.nu_z_MHz}};

    std::vector<Transition> out;
    out.reserve(carriers.size() * 7);
    for (const Transition& tr : carriers) {
        out.push_back(tr);
        for (const auto& [axis, nu] : axes)
            for (int sgn : {+1, -1}) {
                Transition sb = tr;
                sb.is_sideband = true;
                sb.sideband_shift_MHz = sgn * nu;
                sb.freq_MHz += sb.sideband_shift_MHz;
                sb.amplitude *= scale;
                sb.rel_strength *= scale;
                sb.pi_time_us = (scale > 0.0) ? tr.pi_time_us / scale
                                              : std::numeric_limits<double>::infinity();
                sb.id = tr.id + (sgn > 0 ? "+" : "-") + axis;
                out.push_back(std::move(sb));
            }
    }
    return out;
}

StrengthConfig strength_config_from_file(const KeyValueFile& kv) {
    StrengthConfig sc;
    const std::array<const char*, 5> tag{"m2", "m1", "0", "p1", "p2"};
    for (std::size_t i = 0; i < 5; ++i) {
        sc.w_q[i] = kv.get_double(std::string("strength.w.") + tag[i], sc.w_q[i]);
        sc.ref_pi_time_us[i] =
            kv.get_double(std::string("strength.ref_pi_us.") + tag[i], sc.ref_pi_time_us[i]);
        sc.ref_override[i] =
            kv.get_string(std::string("strength.ref_line.") + tag[i], sc.ref_override[i]);
    }
    return sc;
}

}  // namespace baq
