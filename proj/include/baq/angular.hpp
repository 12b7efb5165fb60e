#pragma once
// Angular-momentum building blocks: ladder/z operators on a descending-m
// basis, Clebsch-Gordan coefficients and Wigner 3-j symbols via the Racah
// closed-form sum (exact enough in double for the small j used here).

#include <Eigen/Dense>

namespace baq {

// Basis convention everywhere: index k <-> m = j - k (m descending).
Eigen::MatrixXd op_jz(double j);
Eigen::MatrixXd op_jplus(double j);
Eigen::MatrixXd op_jminus(double j);

// <j1 m1 j2 m2 | J M>; zero when selection rules fail.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

// Wigner 3-j (j1 j2 j3; m1 m2 m3).
double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3);

// Wigner 6-j {j1 j2 j3; j4 j5 j6} via the Racah sum.
double wigner6j(double j1, double j2, double j3, double j4, double j5, double j6);

}  // namespace baq
