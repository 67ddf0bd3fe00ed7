#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "sftkit/errors.hpp"
#include "sftkit/orbits.hpp"

using namespace sftkit;

namespace {

// Independent floor-based index: counts the integers strictly below k*theta.
int cz_by_counting(double theta, int k) {
  const double x = k * theta;
  int below = 0;
  if (x >= 0) {
    for (int j = 1; j < x; ++j) ++below;
    return 2 * below + 1;
  }
  for (int j = -1; j > x - 1; --j) ++below;  // floor(x) = -below
  return -2 * below + 1;
}

}  // namespace

TEST(CzOfCover, Examples) {
  auto h = OrbitClass::hyperbolic("h", 1);
  auto e = OrbitClass::elliptic("e", 0.4142);
  EXPECT_EQ(cz_of_cover(h, 2), 2);
  EXPECT_EQ(cz_of_cover(e, 1), 1);
  EXPECT_EQ(cz_of_cover(e, 5), 5);
}

TEST(CzOfCover, MatchesCountingOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double theta = dist(rng);
    auto e = OrbitClass::elliptic("e", theta);
    for (int k = 1; k <= 20; ++k) {
      if (std::abs(k * theta - std::round(k * theta)) < 1e-6) continue;
      EXPECT_EQ(cz_of_cover(e, k), cz_by_counting(theta, k)) << theta << " " << k;
    }
  }
}

TEST(CzOfCover, DegenerateCoverRejected) {
  auto e = OrbitClass::elliptic("e", 0.5);
  EXPECT_EQ(cz_of_cover(e, 1), 1);
  try {
    cz_of_cover(e, 2);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::DegenerateCover);
  }
}

TEST(CzOfCover, RejectsIntegralTheta) {
  EXPECT_THROW(OrbitClass::elliptic("e", 2.0), Error);
  EXPECT_NO_THROW(OrbitClass::elliptic("e", 1.0, std::nullopt, true));
}

TEST(SpectralData, Examples) {
  auto e = OrbitClass::elliptic("e", 0.4142);
  EXPECT_EQ(spectral_data({e, 1}), (SpectralData{0, 1, 1, 1, 1, 1}));
  auto h = OrbitClass::hyperbolic("h", 1);
  EXPECT_EQ(spectral_data({h, 2}), (SpectralData{1, 1, 2, 0, 1, 1}));
  auto e7 = OrbitClass::elliptic("e7", 0.7);
  EXPECT_EQ(spectral_data({e7, 3}), (SpectralData{2, 3, 5, 1, 1, 3}));
}

TEST(SpectralData, StructuralInvariants) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> theta(-4.0, 4.0);
  std::uniform_int_distribution<int> czd(-9, 9);
  for (int trial = 0; trial < 300; ++trial) {
    const bool ell = trial % 2 == 0;
    auto orbit = ell ? OrbitClass::elliptic("e", theta(rng)) : OrbitClass::hyperbolic("h", czd(rng));
    for (int m = 1; m <= 8; ++m) {
      SpectralData d;
      try {
        d = spectral_data({orbit, m});
      } catch (const Error&) {
        continue;
      }
      EXPECT_EQ(d.cz, d.alpha_minus + d.alpha_plus);
      EXPECT_EQ(d.parity, d.alpha_plus - d.alpha_minus);
      EXPECT_TRUE(d.parity == 0 || d.parity == 1);
      EXPECT_EQ(m % d.sigma_minus, 0);
      EXPECT_EQ(m % d.sigma_plus, 0);
      if (m == 1) {
        EXPECT_EQ(d.sigma_minus, 1);
        EXPECT_EQ(d.sigma_plus, 1);
      }
      if (ell) EXPECT_EQ(d.parity, 1);
      if (!ell) EXPECT_EQ(d.cz, m * orbit.hyperbolic_cz());
    }
  }
}

TEST(SpectralData, FromWindingsChecksConsistency) {
  EXPECT_THROW(SpectralData::from_windings(0, 2, 1, 1), Error);
  EXPECT_THROW(SpectralData::from_windings(1, 0, 1, 1), Error);
  EXPECT_EQ(SpectralData::from_windings(1, 1, 1, 1).cz, 2);
}

TEST(FloorSubadditivity, RandomTheta) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto e = OrbitClass::elliptic("e", dist(rng));
    for (int k = 1; k <= 20; ++k) {
      for (int l = 1; l <= 20; ++l) {
        try {
          const int lhs = cz_of_cover(e, k + l);
          const int rhs = cz_of_cover(e, k) + cz_of_cover(e, l) - 1 + 2;
          EXPECT_LE(lhs, rhs);
        } catch (const Error&) {
        }
      }
    }
  }
}

TEST(BadOrbit, Examples) {
  auto h1 = OrbitClass::hyperbolic("h", 1);
  auto h2 = OrbitClass::hyperbolic("h", 2);
  auto e = OrbitClass::elliptic("e", 0.3);
  EXPECT_TRUE(is_bad_orbit({h1, 2}));
  EXPECT_TRUE(is_bad_orbit({h1, 4}));
  EXPECT_FALSE(is_bad_orbit({h1, 1}));
  EXPECT_FALSE(is_bad_orbit({h1, 3}));
  EXPECT_FALSE(is_bad_orbit({h2, 2}));
  EXPECT_FALSE(is_bad_orbit({e, 2}));
}

TEST(PerturbedCz, MorseBottRule) {
  auto mb = OrbitClass::elliptic("mb", 1.0, std::nullopt, true);
  EXPECT_EQ(perturbed_cz_of_cover(mb, 1), 1);
  EXPECT_EQ(perturbed_cz_of_cover(mb, 2), 3);
  EXPECT_THROW(cz_of_cover(mb, 1), Error);
}

TEST(Resonance, NearestRational) {
  auto r = nearest_resonance(2.0 / 3.0);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(*r, (Rational{2, 3}));
  EXPECT_FALSE(nearest_resonance(std::sqrt(2.0) - 1.0).has_value());
}
