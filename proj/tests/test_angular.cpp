#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "baq/angular.hpp"

using baq::clebsch_gordan;
using baq::wigner3j;
using baq::wigner6j;

namespace {
constexpr double kTol = 1e-13;

struct Ref3j {
    double j1, j2, j3, m1, m2, m3, value;
};
struct Ref6j {
    double j1, j2, j3, j4, j5, j6, value;
};
struct RefCg {
    double j1, m1, j2, m2, J, M, value;
};
}  // namespace

TEST_CASE("wigner 3-j against exact references") {
    // Values from the Racah formula evaluated in exact rational arithmetic.
    const std::vector<Ref3j> refs = {
        {1, 1, 0, 0, 0, 0, -5.773502691896257e-01},
        {1, 1, 2, 0, 0, 0, 3.651483716701107e-01},
        {2, 2, 2, 0, 0, 0, -2.390457218668787e-01},
        {1, 1, 2, 1, -1, 0, 1.825741858350554e-01},
        {1.5, 0.5, 1, 0.5, 0.5, -1, -2.886751345948129e-01},
        {2.5, 2, 1.5, 1.5, -2, 0.5, 2.760262237369417e-01},
        {2, 2, 4, 2, 2, -4, 3.333333333333333e-01},
        {2.5, 2, 0.5, 0.5, 0, -0.5, -3.162277660168379e-01},
        {3, 2, 1, -2, 1, 1, -3.086066999241838e-01},
        {2.5, 2.5, 1, 1.5, -0.5, -1, 2.760262237369417e-01},
        {4, 3, 2, 0, 1, -1, -1.992047682223989e-01},
        {2.5, 2, 2.5, 0.5, 1, -1.5, -1.690308509457033e-01},
    };
    for (const Ref3j& r : refs) {
        CAPTURE(r.j1);
        CAPTURE(r.m1);
        CHECK(std::abs(wigner3j(r.j1, r.j2, r.j3, r.m1, r.m2, r.m3) - r.value) < kTol);
    }
}

TEST_CASE("wigner 3-j symmetries") {
    const double j1 = 2.5, j2 = 2, j3 = 1.5;
    for (double m1 = -j1; m1 <= j1; m1 += 1.0)
        for (double m2 = -j2; m2 <= j2; m2 += 1.0) {
            const double m3 = -m1 - m2;
            if (std::abs(m3) > j3) continue;
            const double v = wigner3j(j1, j2, j3, m1, m2, m3);
            // even permutation of columns
            CHECK(std::abs(wigner3j(j2, j3, j1, m2, m3, m1) - v) < kTol);
            CHECK(std::abs(wigner3j(j3, j1, j2, m3, m1, m2) - v) < kTol);
            // odd permutation and m-negation pick up (-1)^(j1+j2+j3)
            const double sgn = std::pow(-1.0, j1 + j2 + j3);
            CHECK(std::abs(wigner3j(j2, j1, j3, m2, m1, m3) - sgn * v) < kTol);
            CHECK(std::abs(wigner3j(j1, j2, j3, -m1, -m2, -m3) - sgn * v) < kTol);
        }
    // selection rules
    CHECK(wigner3j(1, 1, 3, 0, 0, 0) == 0.0);     // triangle violated
    CHECK(wigner3j(1, 1, 2, 1, 0, 0) == 0.0);     // m-sum nonzero
    CHECK(wigner3j(1, 1, 1, 0, 0, 0) == 0.0);     // odd J sum with all m = 0
}

TEST_CASE("wigner 6-j against exact references") {
    const std::vector<Ref6j> refs = {
        {1, 1, 1, 1, 1, 1, 1.666666666666667e-01},
        {2, 1, 1, 1, 1, 1, 1.666666666666667e-01},
        {1.5, 1.5, 1, 1.5, 1.5, 1, -1.833333333333333e-01},
        {1.5, 3, 1.5, 0, 2.5, 1, 0.0},
        {1.5, 3, 1.5, 1, 2.5, 1, 0.0},
        {1.5, 3, 1.5, 2, 2.5, 1, 2.182178902359924e-02},
        {1.5, 3, 1.5, 3, 2.5, 1, -6.900655593423542e-02},
        {2, 2, 2, 2, 2, 2, -4.285714285714286e-02},
        {2.5, 1.5, 1, 1.5, 2.5, 2, -1.527525231651947e-01},
        {0.5, 2.5, 2, 2.5, 0.5, 3, 0.0},
    };
    for (const Ref6j& r : refs) {
        CAPTURE(r.j4);
        CHECK(std::abs(wigner6j(r.j1, r.j2, r.j3, r.j4, r.j5, r.j6) - r.value) < kTol);
    }
}

TEST_CASE("wigner 6-j column symmetries") {
    const double a = 1.5, b = 3, c = 2.5, d = 2, e = 2.5, f = 1;
    const double v = wigner6j(a, b, c, d, e, f);
    CHECK(std::abs(v) > 1e-6);  // non-trivial case
    CHECK(std::abs(wigner6j(b, a, c, e, d, f) - v) < kTol);
    CHECK(std::abs(wigner6j(c, b, a, f, e, d) - v) < kTol);
    CHECK(std::abs(wigner6j(a, e, f, d, b, c) - v) < kTol);  // swap lower pair
}

TEST_CASE("clebsch-gordan against exact references") {
    const std::vector<RefCg> refs = {
        {0.5, 0.5, 0.5, 0.5, 1, 1, 1.0},
        {0.5, 0.5, 0.5, -0.5, 0, 0, 7.071067811865476e-01},
        {0.5, 0.5, 0.5, -0.5, 1, 0, 7.071067811865476e-01},
        {1.5, 1.5, 0.5, 0.5, 2, 2, 1.0},
        {1.5, 0.5, 0.5, 0.5, 2, 1, 8.660254037844386e-01},
        {1.5, 0.5, 0.5, 0.5, 1, 1, -5.0e-01},
        {1.5, 0.5, 2.5, 1.5, 3, 2, -2.886751345948129e-01},
        {1.5, -0.5, 2.5, 2.5, 2, 2, 6.900655593423543e-01},
        {1, 0, 1, 1, 2, 1, 7.071067811865476e-01},
        {1, 1, 1, 0, 1, 1, 7.071067811865476e-01},
        {1, 1, 1, -1, 0, 0, 5.773502691896257e-01},
        {2, 1, 1, 0, 2, 1, 4.082482904638630e-01},
        {3, 2, 1, -1, 2, 1, 6.900655593423543e-01},
        {1.5, 1.5, 2.5, 2.5, 4, 4, 1.0},
        {1.5, 1.5, 2.5, -0.5, 1, 1, 2.236067977499790e-01},
    };
    for (const RefCg& r : refs) {
        CAPTURE(r.J);
        CAPTURE(r.m1);
        CHECK(std::abs(clebsch_gordan(r.j1, r.m1, r.j2, r.m2, r.J, r.M) - r.value) < kTol);
    }
}

TEST_CASE("clebsch-gordan orthogonality and completeness (I=3/2 x J=5/2)") {
    const double j1 = 1.5, j2 = 2.5;
    for (double J = 1; J <= 4; J += 1.0)
        for (double M = -J; M <= J; M += 1.0) {
            double sum = 0.0;
            for (double m1 = -j1; m1 <= j1; m1 += 1.0)
                for (double m2 = -j2; m2 <= j2; m2 += 1.0)
                    sum += std::pow(clebsch_gordan(j1, m1, j2, m2, J, M), 2);
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    for (double m1 = -j1; m1 <= j1; m1 += 1.0)
        for (double m2 = -j2; m2 <= j2; m2 += 1.0) {
            double sum = 0.0;
            for (double J = 1; J <= 4; J += 1.0)
                sum += std::pow(clebsch_gordan(j1, m1, j2, m2, J, m1 + m2), 2);
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
}

TEST_CASE("clebsch-gordan matches 3-j up to the standard phase") {
    const double j1 = 2.5, j2 = 1.5;
    for (double J = 1; J <= 4; J += 1.0)
        for (double m1 = -j1; m1 <= j1; m1 += 1.0)
            for (double m2 = -j2; m2 <= j2; m2 += 1.0) {
                const double M = m1 + m2;
                if (std::abs(M) > J) continue;
                const double lhs = clebsch_gordan(j1, m1, j2, m2, J, M);
                const double rhs = std::pow(-1.0, j1 - j2 + M) * std::sqrt(2 * J + 1) *
                                   wigner3j(j1, j2, J, m1, m2, -M);
                CHECK(std::abs(lhs - rhs) < kTol);
            }
}

TEST_CASE("ladder and z operators satisfy su(2)") {
    for (double j : {0.5, 1.0, 1.5, 2.5}) {
        const Eigen::MatrixXd jz = baq::op_jz(j);
        const Eigen::MatrixXd jp = baq::op_jplus(j);
        const Eigen::MatrixXd jm = baq::op_jminus(j);
        const int n = static_cast<int>(2 * j + 1.5);
        REQUIRE(jz.rows() == n);
        CHECK((jm - jp.transpose()).norm() < kTol);
        CHECK(((jp * jm - jm * jp) - 2.0 * jz).norm() < kTol);
        CHECK(((jz * jp - jp * jz) - jp).norm() < kTol);
        const Eigen::MatrixXd casimir = jz * jz + 0.5 * (jp * jm + jm * jp);
        CHECK((casimir - j * (j + 1) * Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12);
        // basis convention: first row is m = +j
        CHECK(jz(0, 0) == doctest::Approx(j));
        CHECK(jz(n - 1, n - 1) == doctest::Approx(-j));
    }
}
