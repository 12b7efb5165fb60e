#pragma once
// Hyperfine + Zeeman structure of the 137Ba+ optical qudit: S1/2 (J=1/2) and
// D5/2 (J=5/2) manifolds with I=3/2, solved exactly in the |m_I,m_J> product
// basis. Levels carry adiabatic |F~, m_F~> labels tracked from B=0 and field
// sensitivities dE/dB from the Hellmann-Feynman expectation. The quadrupole
// transition table (S1/2 F=2 <-> D5/2, |dm| <= 2, 80 lines at generic field)
// carries relative strengths from electronic Wigner-Eckart factors summed over
// the nuclear-spin decomposition of both eigenstates.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "baq/config.hpp"

namespace baq {

struct ManifoldConstants {
    double A_MHz = 0.0;   // magnetic dipole
    double B_MHz = 0.0;   // electric quadrupole (needs I,J > 1/2)
    double C_MHz = 0.0;   // magnetic octupole   (needs I,J > 1)
    double gJ = 0.0;
    std::string source;   // literature citation, mandatory in config files
};

struct AtomicConstants {
    double I = 1.5;
    ManifoldConstants s12;  // J = 1/2
    ManifoldConstants d52;  // J = 5/2
    double gI = 0.0;        // dimensionless, enters as +gI*Iz alongside gJ*Jz
    std::string gI_source;
    double muB_MHz_per_G = 1.399624604;
    double field_G = 4.209;          // default operating field
    double freq_offset_MHz = 0.0;    // added to E_upper - E_lower in tables
    double d52_lifetime_s = 30.1;
    // trap / motional parameters for sideband bookkeeping
    double nu_x_MHz = 1.27, nu_y_MHz = 1.46, nu_z_MHz = 0.21;
    double lamb_dicke = 0.014;
    double nbar = 140.0;

    static AtomicConstants from_file(const std::string& path);
};

struct Level {
    char manifold = 'S';             // 'S' or 'D'
    int F = 0;                       // adiabatic label F~
    int m = 0;                       // adiabatic label m_F~ (exact quantum number)
    double E_MHz = 0.0;
    double dEdB_MHz_per_G = 0.0;
    Eigen::VectorXd amps;            // eigenvector over the manifold product basis
    std::string id;                  // e.g. "S12_F2_m-1"
};

// Product basis bookkeeping for one (I,J) manifold; index = iI*nJ + iJ with
// m_I = I - iI, m_J = J - iJ (matches kron(I-op, J-op) ordering).
struct ManifoldBasis {
    double I = 0.0, J = 0.0;
    int nI = 0, nJ = 0;
    double mI_of(int idx) const { return I - idx / nJ; }
    double mJ_of(int idx) const { return J - idx % nJ; }
    int dim() const { return nI * nJ; }
};

ManifoldBasis manifold_basis(double I, double J);

// Field-free hyperfine part (A, B, C terms with guarded denominators).
Eigen::MatrixXd hyperfine_hamiltonian(double I, double J, const ManifoldConstants& mc);
// Zeeman derivative dH/dB = muB (gJ Jz + gI Iz); H(B) = H_hf + B * dHdB.
Eigen::MatrixXd zeeman_derivative(double I, double J, double gJ, double gI, double muB);
Eigen::MatrixXd build_hamiltonian(double I, double J, const ManifoldConstants& mc, double gI,
                                  double muB, double B_G);

// Diagonalize at field B with adiabatic |F~,m~> labels tracked from B=0 in
// <= `steps` ramp increments (per m block; throws NumericalError when the
// tracking overlap drops below 0.5). Output sorted by (F, m).
std::vector<Level> solve_manifold(double I, double J, const ManifoldConstants& mc, double gI,
                                  double muB, double B_G, int steps = 100);

struct LevelTable {
    std::vector<Level> s12;  // 8 levels
    std::vector<Level> d52;  // 24 levels
    const Level& find(char manifold, int F, int m) const;
    int index_of(char manifold, int F, int m) const;  // index into s12 or d52
};

LevelTable solve_structure(const AtomicConstants& c, double B_G, int steps = 100);

struct StrengthConfig {
    // Geometry weight per polarization component q = dm in -2..2 (index q+2).
    std::array<double, 5> w_q{1.0, 1.0, 1.0, 1.0, 1.0};
    // Reference pi time (us) per dm class, applying to the strongest line of
    // that class (relative strength 1 by construction unless overridden).
    std::array<double, 5> ref_pi_time_us{25.0, 25.0, 25.0, 25.0, 25.0};
    // Optional explicit reference transition per dm class, as level ids
    // "S12_F2_m0>D52_F2_m0"; empty -> strongest in class.
    std::array<std::string, 5> ref_override{};
};

struct Transition {
    int s_index = 0;                 // into LevelTable.s12
    int d_index = 0;                 // into LevelTable.d52
    std::string id;                  // "S12_F2_m-1>D52_F4_m-3"
    int dm = 0;                      // m_D - m_S
    double freq_MHz = 0.0;           // E_D - E_S + freq_offset
    double sens_MHz_per_G = 0.0;     // dE_D/dB - dE_S/dB
    double amplitude = 0.0;          // unnormalized coupling amplitude
    double rel_strength = 0.0;       // amplitude / reference amplitude of its dm class
    double pi_time_us = 0.0;         // ref_pi_time(dm) / rel_strength
    bool is_sideband = false;
    double sideband_shift_MHz = 0.0; // 0 for carriers
};

// All S1/2 F=2 <-> D5/2 quadrupole lines with |dm| <= 2 (exactly 80).
std::vector<Transition> transition_table(const LevelTable& t, const AtomicConstants& c,
                                         const StrengthConfig& sc = {});

// Append first-order motional sidebands at +/- each secular frequency with
// Rabi scale eta*sqrt(nbar); carrier list of n becomes n*(1+6) entries.
std::vector<Transition> augment_sidebands(const std::vector<Transition>& carriers,
                                          const AtomicConstants& c);

StrengthConfig strength_config_from_file(const KeyValueFile& kv);

}  // namespace baq
