#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <vector>

#include <occupancy/special.hpp>

using namespace occupancy;
using boost::multiprecision::cpp_rational;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an occupancy::Error";
  return ErrorCode::ParseError;
}

// Exact n^-r n!/(n-r)! as a rational.
cpp_rational falling_ratio(std::uint64_t n, std::uint64_t r) {
  cpp_rational v = 1;
  for (std::uint64_t k = 0; k < r; ++k) v *= cpp_rational(n - k, n);
  return v;
}

}  // namespace

TEST(LogFactorial, MatchesExactFactorials) {
  std::uint64_t f = 1;
  for (std::uint64_t k = 0; k <= 20; ++k) {
    if (k > 1) f *= k;
    const double exact = std::log(static_cast<double>(f));
    EXPECT_NEAR(log_factorial(k), exact, 1e-12 * std::max(1.0, exact)) << k;
  }
  EXPECT_NEAR(log_factorial(2000), std::lgamma(2001.0), 1e-9);
}

TEST(PoissonWeight, ClosedForms) {
  EXPECT_EQ(poisson_weight(0, 0.0), 1.0);
  EXPECT_EQ(poisson_weight(3, 0.0), 0.0);
  EXPECT_NEAR(poisson_weight(1, 1.0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(poisson_weight(2, 2.0), 2.0 * std::exp(-2.0), 1e-16);
  EXPECT_EQ(code_of([] { poisson_weight(1, -0.5); }), ErrorCode::NegativeInput);
  EXPECT_EQ(code_of([] { poisson_weight(kMaxOrder + 1, 1.0); }), ErrorCode::FactorialOverflow);
}

TEST(PoissonWeight, PartialSumsApproachOne) {
  for (double x = 0.0; x <= 20.0; x += 0.25) {
    double total = 0.0;
    for (std::uint64_t r = 0; r <= 200; ++r) total += poisson_weight(r, x);
    EXPECT_NEAR(total, 1.0, 1e-12) << x;
  }
}

TEST(Varphi, SmallOrders) {
  for (std::uint64_t n : {1u, 2u, 7u, 1000u}) {
    EXPECT_EQ(varphi(n, 0), 0.0);
    EXPECT_EQ(varphi(n, 1), 0.0);
    EXPECT_EQ(varphi_star(n, 0), 0.0);
    EXPECT_EQ(varphi_star(n, 1), 0.0);
    if (n >= 2) {
      EXPECT_EQ(varphi(n, 2), 1.0);
      EXPECT_EQ(varphi_star(n, 2), 0.0);
    }
  }
}

TEST(Varphi, RationalOracle) {
  // 10 (1 - 10*9*8*7 / 10^4) = 124/25 and 10 (6 - 124/25) = 52/5.
  EXPECT_NEAR(varphi(10, 4), 4.96, 1e-14);
  EXPECT_NEAR(varphi_star(10, 4), 10.4, 1e-13);
}

TEST(Varphi, Errors) {
  EXPECT_EQ(code_of([] { varphi(5, 6); }), ErrorCode::RangeError);
  EXPECT_EQ(code_of([] { varphi(0, 0); }), ErrorCode::RangeError);
  EXPECT_EQ(code_of([] { varphi_star(3, 4); }), ErrorCode::RangeError);
  EXPECT_EQ(code_of([] { varphi(5000, 1025); }), ErrorCode::FactorialOverflow);
}

TEST(Varphi, DefiningIdentityAgainstRationals) {
  for (std::uint64_t n = 1; n <= 30; ++n) {
    for (std::uint64_t r = 0; r <= n; ++r) {
      const cpp_rational phi_exact = cpp_rational(n) * (1 - falling_ratio(n, r));
      const double phi = static_cast<double>(phi_exact);
      EXPECT_NEAR(varphi(n, r), phi, 1e-13 * std::max(1.0, phi)) << n << "," << r;

      // varphi = binom(r,2) - varphi*/n
      const cpp_rational star_exact = cpp_rational(n) * (cpp_rational(r * (r > 0 ? r - 1 : 0), 2) - phi_exact);
      const double star = static_cast<double>(star_exact);
      EXPECT_NEAR(varphi_star(n, r), star, 1e-11 * std::max(1.0, star)) << n << "," << r;
    }
  }
}

TEST(Varphi, InequalityGrid) {
  for (std::uint64_t n : {2u, 5u, 10u, 50u, 200u, 10000u}) {
    for (std::uint64_t r = 0; r <= std::min<std::uint64_t>(n, 30); ++r) {
      const double dr = static_cast<double>(r);
      const double v = varphi(n, r);
      const double s = varphi_star(n, r);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, dr * (dr - 1.0) / 2.0);
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, dr * dr * dr * dr);
    }
  }
}

TEST(Delta, ClosedForms) {
  for (std::uint64_t r = 0; r <= 10; ++r) {
    EXPECT_EQ(delta(10, r, 0.0), 0.0);
    EXPECT_EQ(delta_star(10, r, 0.0), 0.0);
  }
  EXPECT_NEAR(delta(4, 4, 1.0), 4.0 * (1.0 - std::exp(-1.0)), 1e-14);
}

TEST(Delta, HighPrecisionOracle) {
  // 60-digit evaluations of the defining expressions (tests/oracles/compute_oracles.py).
  EXPECT_NEAR(delta(4, 4, 1.0), 2.5284822353142307136, 1e-14);
  EXPECT_NEAR(delta(100, 0, 1.0), -0.18470998982128166649, 1e-14);
  EXPECT_NEAR(delta_star(100, 0, 1.0), -0.077026923556050569301, 1e-11);
  EXPECT_NEAR(delta_star(50, 2, 1.0), 0.67399606162084388594, 1e-11);
  EXPECT_GE(delta_star(100, 0, 1.0), -4.0);
  EXPECT_LE(delta_star(100, 0, 1.0), 0.0);
  EXPECT_LE(delta_star(50, 2, 1.0), 48.0);
}

TEST(Delta, Errors) {
  EXPECT_EQ(code_of([] { delta(10, 2, -0.1); }), ErrorCode::RangeError);
  EXPECT_EQ(code_of([] { delta(10, 2, 10.5); }), ErrorCode::RangeError);
  EXPECT_EQ(code_of([] { delta(10, 11, 1.0); }), ErrorCode::RangeError);
  EXPECT_EQ(code_of([] { delta_star(10, 2, -1.0); }), ErrorCode::RangeError);
}

TEST(Delta, EndpointOfSupport) {
  // (1 - x/n)^(n-r) at x = n is 0 unless r = n.
  EXPECT_NEAR(delta(6, 2, 6.0), -6.0 * std::exp(-6.0), 1e-15);
  EXPECT_NEAR(delta(6, 6, 6.0), 6.0 * (1.0 - std::exp(-6.0)), 1e-14);
}

TEST(Delta, BeyondCertifiedRangeStillComputes) {
  const double d = delta(10, 1, 8.0);
  EXPECT_NEAR(std::exp(-8.0) + d / 10.0, std::pow(0.2, 9), 1e-15);
}

TEST(Delta, DefiningIdentity) {
  for (std::uint64_t n : {2u, 5u, 10u, 50u, 200u, 10000u}) {
    const double dn = static_cast<double>(n);
    for (std::uint64_t r = 0; r <= std::min<std::uint64_t>(n, 25); ++r) {
      for (int i = 0; i < 50; ++i) {
        const double x = 0.5 * dn * i / 49.0;
        const long double direct =
            std::pow(1.0L - static_cast<long double>(x) / n, static_cast<long double>(n - r));
        const double rebuilt = std::exp(-x) + delta(n, r, x) / dn;
        EXPECT_NEAR(rebuilt, static_cast<double>(direct), 1e-10) << n << "," << r << "," << x;
      }
    }
  }
}

TEST(Delta, BoundsOnCertifiedGrid) {
  for (std::uint64_t n : {2u, 5u, 10u, 50u, 200u, 10000u}) {
    const double dn = static_cast<double>(n);
    for (std::uint64_t r = 0; r <= std::min<std::uint64_t>(n, 25); ++r) {
      const double dr = static_cast<double>(r);
      for (int i = 0; i < 50; ++i) {
        const double x = 0.5 * dn * i / 49.0;
        const double d = delta(n, r, x);
        EXPECT_GE(d, -2.0);
        EXPECT_LE(d, dr * std::exp2(dr - 1.0));
        const double s = delta_star(n, r, x);
        EXPECT_GE(s, -4.0 - dr) << n << "," << r << "," << x;
      }
    }
  }
}

TEST(Delta, StarUpperBoundForPositiveOrders) {
  for (std::uint64_t n : {2u, 5u, 10u, 50u, 200u, 10000u}) {
    const double dn = static_cast<double>(n);
    for (std::uint64_t r = 1; r <= std::min<std::uint64_t>(n, 25); ++r) {
      const double dr = static_cast<double>(r);
      for (int i = 0; i < 50; ++i) {
        const double x = 0.5 * dn * i / 49.0;
        EXPECT_LE(delta_star(n, r, x), x * x * dr * (dr + 1.0) * std::exp2(dr + 1.0))
            << n << "," << r << "," << x;
      }
    }
  }
}

TEST(Delta, StarAtOrderZeroTurnsPositiveForLargeLoads) {
  // delta*_n(0, x) > 0 once x exceeds roughly 8/3: the x^4 term of the
  // expansion of (1 - x/n)^n outweighs the cubic one. 60-digit value.
  EXPECT_NEAR(delta_star(10, 0, 5.0), 0.26610492497713667742, 1e-12);
  EXPECT_LT(delta_star(10000, 0, 2.0), 0.0);
  EXPECT_GT(delta_star(10000, 0, 3.0), 0.0);
}
