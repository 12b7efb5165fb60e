#include "baq/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "baq/util.hpp"

namespace baq {

namespace {

int doubled(double j) {
    const double d = 2.0 * j;
    const int r = static_cast<int>(std::lround(d));
    if (std::fabs(d - r) > 1e-9)
        throw NumericalError("angular momentum is not integer or half-integer");
    return r;
}

double factorial(int n) {
    static const auto table = [] {
        std::array<double, 171> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    if (n < 0 || n >= static_cast<int>(table.size()))
        throw NumericalError("factorial argument out of range");
    return table[static_cast<std::size_t>(n)];
}

// Triangle coefficient Delta(a,b,c); returns 0 when the triad is not allowed.
// Arguments are doubled angular momenta.
double triangle(int a2, int b2, int c2) {
    const int p = (a2 + b2 - c2) / 2, q = (a2 - b2 + c2) / 2, r = (-a2 + b2 + c2) / 2;
    if (p < 0 || q < 0 || r < 0) return 0.0;
    if ((a2 + b2 + c2) % 2 != 0) return 0.0;
    return factorial(p) * factorial(q) * factorial(r) / factorial((a2 + b2 + c2) / 2 + 1);
}

int parity(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace

Eigen::MatrixXd op_jz(double j) {
    const int n = doubled(j) + 1;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) out(k, k) = j - k;
    return out;
}

Eigen::MatrixXd op_jplus(double j) {
    const int n = doubled(j) + 1;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double m = j - k;  // J+ raises |m> (index k) to |m+1> (index k-1)
        out(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    return out;
}

Eigen::MatrixXd op_jminus(double j) { return op_jplus(j).transpose(); }

double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3) {
    const int J1 = doubled(j1), J2 = doubled(j2), J3 = doubled(j3);
    const int M1 = doubled(m1), M2 = doubled(m2), M3 = doubled(m3);
    if (M1 + M2 + M3 != 0) return 0.0;
    if (std::abs(M1) > J1 || std::abs(M2) > J2 || std::abs(M3) > J3) return 0.0;
    if ((J1 + M1) % 2 != 0 || (J2 + M2) % 2 != 0 || (J3 + M3) % 2 != 0) return 0.0;
    const double tri = triangle(J1, J2, J3);
    if (tri == 0.0) return 0.0;

    const double pref = std::sqrt(
        tri * factorial((J1 + M1) / 2) * factorial((J1 - M1) / 2) * factorial((J2 + M2) / 2) *
        factorial((J2 - M2) / 2) * factorial((J3 + M3) / 2) * factorial((J3 - M3) / 2));

    const int kmin = std::max({0, (J2 - J3 - M1) / 2, (J1 - J3 + M2) / 2});
    const int kmax = std::min({(J1 + J2 - J3) / 2, (J1 - M1) / 2, (J2 + M2) / 2});
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const double denom = factorial(k) * factorial((J1 + J2 - J3) / 2 - k) *
                             factorial((J1 - M1) / 2 - k) * factorial((J2 + M2) / 2 - k) *
                             factorial((J3 - J2 + M1) / 2 + k) *
                             factorial((J3 - J1 - M2) / 2 + k);
        sum += parity(k) / denom;
    }
    return parity((J1 - J2 - M3) / 2) * pref * sum;
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
    const int JJ = doubled(J), MM = doubled(M);
    if (doubled(m1) + doubled(m2) != MM) return 0.0;
    return parity((doubled(j1) - doubled(j2) + MM) / 2) * std::sqrt(JJ + 1.0) *
           wigner3j(j1, j2, J, m1, m2, -M);
}

double wigner6j(double j1, double j2, double j3, double j4, double j5, double j6) {
    const int a = doubled(j1), b = doubled(j2), c = doubled(j3);
    const int d = doubled(j4), e = doubled(j5), f = doubled(j6);
    const double t1 = triangle(a, b, c), t2 = triangle(a, e, f), t3 = triangle(d, b, f),
                 t4 = triangle(d, e, c);
    if (t1 == 0.0 || t2 == 0.0 || t3 == 0.0 || t4 == 0.0) return 0.0;

    const int abc = (a + b + c) / 2, aef = (a + e + f) / 2, dbf = (d + b + f) / 2,
              dec = (d + e + c) / 2;
    const int abde = (a + b + d + e) / 2, bcef = (b + c + e + f) / 2, cafd = (c + a + f + d) / 2;
    const int tmin = std::max({abc, aef, dbf, dec});
    const int tmax = std::min({abde, bcef, cafd});
    double sum = 0.0;
    for (int t = tmin; t <= tmax; ++t) {
        const double denom = factorial(t - abc) * factorial(t - aef) * factorial(t - dbf) *
                             factorial(t - dec) * factorial(abde - t) * factorial(bcef - t) *
                             factorial(cafd - t);
        sum += parity(t) * factorial(t + 1) / denom;
    }
    return std::sqrt(t1 * t2 * t3 * t4) * sum;
}

}  // namespace baq
