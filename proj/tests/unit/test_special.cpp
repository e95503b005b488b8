#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "itreval/errors.hpp"
#include "itreval/special.hpp"

using namespace itreval;

TEST(RegIncBeta, TrivialValues) {
    for (double a : {0.5, 1.0, 3.0, 40.0})
        for (double b : {0.5, 2.0, 17.0}) EXPECT_DOUBLE_EQ(reg_inc_beta(1.0, a, b), 1.0);
    for (double x : {0.0, 0.1, 0.37, 0.9, 1.0}) EXPECT_NEAR(reg_inc_beta(x, 1, 1), x, 1e-15);
    EXPECT_NEAR(reg_inc_beta(0.5, 2, 2), 0.5, 1e-15);
    EXPECT_EQ(reg_inc_beta(0.0, 2.0, 3.0), 0.0);
}

TEST(RegIncBeta, HeavisideForNonPositiveAlpha) {
    EXPECT_EQ(reg_inc_beta(0.0, 0.0, 3.0), 0.0);
    EXPECT_EQ(reg_inc_beta(1e-12, 0.0, 3.0), 1.0);
    EXPECT_EQ(reg_inc_beta(0.7, -1.0, 3.0), 1.0);
}

TEST(RegIncBeta, Errors) {
    EXPECT_THROW(reg_inc_beta(-0.01, 1, 1), InputError);
    EXPECT_THROW(reg_inc_beta(1.01, 1, 1), InputError);
    EXPECT_THROW(reg_inc_beta(0.5, 1, 0), InputError);
}

TEST(RegIncBeta, MatchesBoost) {
    for (double a : {0.3, 1.0, 2.5, 7.0, 50.0, 400.0})
        for (double b : {0.7, 1.0, 4.0, 33.0, 901.0})
            for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
                const double want = boost::math::ibeta(a, b, x);
                const double got = reg_inc_beta(x, a, b);
                EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, want)) << a << ' ' << b << ' ' << x;
            }
}

TEST(RegIncBeta, IntegerArgumentsEqualBinomialTail) {
    // I_x(a, b) = P(Binomial(a + b - 1, x) >= a) for integer a, b.
    for (int a = 1; a <= 12; ++a)
        for (int b = 1; b <= 12; ++b)
            for (double x : {0.05, 0.3, 0.5, 0.81}) {
                const int m = a + b - 1;
                double tail = 0.0;
                for (int j = a; j <= m; ++j)
                    tail += std::exp(std::lgamma(m + 1.0) - std::lgamma(j + 1.0) -
                                     std::lgamma(m - j + 1.0)) *
                            std::pow(x, j) * std::pow(1 - x, m - j);
                EXPECT_NEAR(reg_inc_beta(x, a, b), tail, 1e-12);
            }
}

TEST(RegIncBeta, Reflection) {
    for (double a : {0.4, 1.0, 3.0, 12.5, 80.0})
        for (double b : {0.6, 2.0, 9.0, 60.0})
            for (int k = 0; k <= 20; ++k) {
                const double x = k / 20.0;
                EXPECT_NEAR(reg_inc_beta(x, a, b), 1.0 - reg_inc_beta(1.0 - x, b, a), 1e-10);
            }
}

TEST(Normal, CdfAndQuantile) {
    EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-14);
    for (double p : {1e-10, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999999})
        EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-13 * std::max(1.0, p / (1 - p)));
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
}
