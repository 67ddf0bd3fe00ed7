#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sftkit/errors.hpp"
#include "sftkit/orbits.hpp"
#include "sftkit/reeb_dynamics.hpp"

using namespace sftkit;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

EllipsoidParams irrational(double a, double b) { return {a, b, true}; }

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InternalInconsistency;
}

ClosedOrbitRecord gamma_1() {
  ClosedOrbitRecord r;
  r.initial_point = C2(1.0, 0.0);
  r.period = kPi;
  return r;
}

}  // namespace

TEST(ReebField, RoundSphereAtBasePoint) {
  const EllipsoidParams round{1.0, 1.0, false};
  const C2 r = reeb_field(C2(1.0, 0.0), round);
  EXPECT_NEAR(std::abs(r(0) - cplx(0.0, 2.0)), 0.0, 1e-15);
  EXPECT_EQ(r(1), cplx(0.0, 0.0));
  // through-orbit closes at pi
  EXPECT_LT((flow_exact(C2(1.0, 0.0), kPi, round) - C2(1.0, 0.0)).norm(), 1e-14);
}

TEST(ReebField, DefiningConditionResiduals) {
  for (auto p : {EllipsoidParams{1.0, kSqrt2, true}, EllipsoidParams{0.37, 2.9, false},
                 EllipsoidParams{1.0, 1.0, false}}) {
    const FieldResiduals r = reeb_residuals(p, 1000, 7);
    EXPECT_LT(r.alpha, 1e-10);
    EXPECT_LT(r.dalpha, 1e-10);
  }
}

TEST(ReebField, WrongFieldFailsDefiningConditions) {
  // control: the round-sphere field is not Reeb for a non-round H
  const EllipsoidParams p{1.0, kSqrt2, true};
  const EllipsoidParams round{1.0, 1.0, false};
  const C2 z = C2(cplx(0.6, 0.0), cplx(0.0, 0.8));
  const C2 wrong = reeb_field(z, round);
  EXPECT_GT(std::abs(alpha_h(z, wrong, p) - 1.0), 1e-3);
}

TEST(ReebField, OffSphere) {
  EXPECT_EQ(kind_of([] { reeb_field(C2(1.001, 0.0), EllipsoidParams{}); }), ErrorKind::NotOnSphere);
}

TEST(ReebField, ParamsValidation) {
  EXPECT_EQ(kind_of([] { EllipsoidParams{-1.0, 1.0, false}.validate(); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { EllipsoidParams{1.0, 1.5, true}.validate(); }), ErrorKind::InvalidInput);
  EXPECT_NO_THROW((EllipsoidParams{1.0, kSqrt2, true}.validate()));
  EXPECT_NO_THROW((LensParams{3, 1}.validate()));
  EXPECT_NO_THROW((LensParams{1, 1}.validate()));
  EXPECT_EQ(kind_of([] { LensParams{4, 2}.validate(); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { LensParams{2, 3}.validate(); }), ErrorKind::InvalidInput);
}

TEST(Integrator, Rk4MatchesExactFlowOverOnePeriod) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.3, 3.0), ang(0.0, 2 * kPi);
  for (int i = 0; i < 5; ++i) {
    const EllipsoidParams p{u(rng), u(rng), false};
    const double psi = ang(rng) / 4.0;
    const C2 z(std::cos(psi) * std::exp(cplx(0, ang(rng))), std::sin(psi) * std::exp(cplx(0, ang(rng))));
    for (double t : {kPi * p.a_sq, kPi * p.b_sq}) {
      EXPECT_LT((flow_rk4(z, t, p, 1e-3) - flow_exact(z, t, p)).norm(), 1e-9);
    }
  }
}

TEST(ClosedOrbits, IrrationalEllipsoidHasTwo) {
  const auto p = irrational(1.0, kSqrt2);
  OrbitSearchOptions opt;
  opt.period_cap = 10.0;
  const auto orbits = find_closed_orbits(p, opt);
  ASSERT_EQ(orbits.size(), 2u);
  EXPECT_NEAR(orbits[0].period, kPi, 1e-9);
  EXPECT_NEAR(orbits[1].period, kPi * kSqrt2, 1e-9);
  for (const auto& o : orbits) {
    EXPECT_NEAR(o.initial_point.norm(), 1.0, 1e-12);
    EXPECT_TRUE(o.simple);
    EXPECT_NEAR(std::abs(o.floquet_multipliers[0]), 1.0, 1e-8);
    EXPECT_NEAR(std::abs(o.floquet_multipliers[0] * o.floquet_multipliers[1] - 1.0), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(o.floquet_multipliers[0] - std::conj(o.floquet_multipliers[1])), 0.0, 1e-8);
  }
  EXPECT_LT(std::abs(orbits[0].initial_point(1)), 1e-12);
  EXPECT_LT(std::abs(orbits[1].initial_point(0)), 1e-12);
}

TEST(ClosedOrbits, ThreadedMatchesSerial) {
  const auto p = irrational(0.8, std::sqrt(3.0));
  OrbitSearchOptions opt;
  opt.grid = 12;
  const auto a = find_closed_orbits(p, opt);
  opt.threads = 4;
  const auto b = find_closed_orbits(p, opt);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].period, b[i].period);
    EXPECT_EQ(a[i].initial_point, b[i].initial_point);
  }
}

TEST(ClosedOrbits, RandomIrrationalRatios) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  int done = 0;
  while (done < 10) {
    const double ratio = u(rng);
    if (nearest_resonance(ratio)) continue;
    const auto p = irrational(1.0, 1.0 / ratio);
    OrbitSearchOptions opt;
    opt.grid = 10;
    const auto orbits = find_closed_orbits(p, opt);
    ASSERT_EQ(orbits.size(), 2u) << "ratio " << ratio;
    EXPECT_NEAR(orbits[0].period, kPi * std::min(p.a_sq, p.b_sq), 1e-9);
    EXPECT_NEAR(orbits[1].period, kPi * std::max(p.a_sq, p.b_sq), 1e-9);
    ++done;
  }
}

TEST(ClosedOrbits, RoundSphereIsResonant) {
  OrbitSearchOptions opt;
  opt.grid = 8;
  EXPECT_EQ(kind_of([&] { find_closed_orbits(EllipsoidParams{1.0, 1.0, false}, opt); }),
            ErrorKind::ResonanceSuspected);
}

TEST(Floquet, GammaOneMultipliersAndRotation) {
  const auto p = irrational(1.0, kSqrt2);
  const FloquetReport r = floquet_and_cz(gamma_1(), p, 1);
  const cplx expected = std::exp(cplx(0.0, 2.0 * kPi / kSqrt2));
  EXPECT_LT(std::abs(r.multipliers[0] - expected), 1e-7);
  EXPECT_LT(std::abs(r.multipliers[1] - std::conj(expected)), 1e-7);
  EXPECT_NEAR(r.rotation_number, 1.0 / kSqrt2, 1e-8);
  EXPECT_EQ(r.frame_shift, 1);
  EXPECT_EQ(r.cz_disk, 3);
}

TEST(Floquet, CoversNondegenerateAndMatchCzFormula) {
  const auto p = irrational(1.0, kSqrt2);
  OrbitSearchOptions opt;
  opt.period_cap = 10.0;
  for (const auto& o : find_closed_orbits(p, opt)) {
    for (int k = 1; k <= 10; ++k) {
      const FloquetReport r = floquet_and_cz(o, p, k);
      const double rho = o.initial_point(1) == cplx(0.0) ? p.a_sq / p.b_sq : p.b_sq / p.a_sq;
      EXPECT_NEAR(r.rotation_number, rho, 1e-8);
      const cplx mu = std::exp(cplx(0.0, 2.0 * kPi * k * rho));
      EXPECT_LT(std::min(std::abs(r.multipliers[0] - mu), std::abs(r.multipliers[1] - mu)), 1e-7);
      const auto disk = OrbitClass::elliptic("g", rho + 1.0);
      EXPECT_EQ(r.cz_disk, cz_of_cover(disk, k));
      EXPECT_EQ(r.cz_disk, 2 * static_cast<int>(std::floor(k * (rho + 1.0))) + 1);
    }
  }
}

TEST(Floquet, RoundSphereDegenerate) {
  EXPECT_EQ(kind_of([] { floquet_and_cz(gamma_1(), EllipsoidParams{1.0, 1.0, false}, 1); }),
            ErrorKind::DegenerateOrbit);
}

TEST(FrameShift, DiskFrameExtendsOverSeifertDisk) {
  // D = {(z1, s) : s = sqrt(1 - |z1|^2)} bounds gamma_1; X_D = (-conj z2, conj z1)
  // stays in the complex tangent of S^3 and never vanishes on D.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r01(0.0, 1.0), ang(0.0, 2 * kPi);
  for (int i = 0; i < 1000; ++i) {
    const double r = std::sqrt(r01(rng));
    const C2 z(r * std::exp(cplx(0.0, ang(rng))), std::sqrt(1.0 - r * r));
    const C2 xd(-std::conj(z(1)), std::conj(z(0)));
    EXPECT_NEAR(xd.norm(), 1.0, 1e-12);
    EXPECT_LT(std::abs(z.dot(xd)), 1e-12);
  }
}

TEST(FrameShift, SelfLinkingOfGammaOne) {
  const auto p = irrational(1.0, kSqrt2);
  EXPECT_EQ(self_linking_numeric(gamma_1(), p), -1);
  ClosedOrbitRecord g2;
  g2.initial_point = C2(0.0, 1.0);
  g2.period = kPi * kSqrt2;
  EXPECT_EQ(self_linking_numeric(g2, p), -1);
  // consistency with the disk index: sl = -alpha_minus of cz_disk = 3
  const auto sd = spectral_data(OrbitInstance(OrbitClass::elliptic("g", 1.0 + 1.0 / kSqrt2), 1));
  EXPECT_EQ(-sd.alpha_minus, -1);
}

TEST(Lens, L31Quotient) {
  const auto p = irrational(1.0, kSqrt2);
  OrbitSearchOptions opt;
  opt.period_cap = 10.0;
  const auto orbits = find_closed_orbits(p, opt);
  const LensReport r = lens_quotient_report(p, LensParams{3, 1}, orbits);
  EXPECT_LT(r.invariance_residual, 1e-10);
  ASSERT_EQ(r.orbits.size(), 2u);
  EXPECT_NEAR(r.orbits[0].period, kPi / 3.0, 1e-9);
  EXPECT_NEAR(r.orbits[1].period, kPi * kSqrt2 / 3.0, 1e-9);
  EXPECT_EQ(r.orbits[0].group_power, 1);
  EXPECT_EQ(r.orbits[1].group_power, 1);
  EXPECT_TRUE(r.noncontractible);
}

TEST(Lens, NonTrivialTwist) {
  const auto p = irrational(1.0, kSqrt2);
  OrbitSearchOptions opt;
  opt.period_cap = 10.0;
  const auto r = lens_quotient_report(p, LensParams{5, 2}, find_closed_orbits(p, opt));
  // gamma_2 lands on g^k with 2k = 1 mod 5
  EXPECT_EQ(r.orbits[1].group_power, 3);
}

TEST(Lens, TrivialQuotient) {
  const auto p = irrational(1.0, kSqrt2);
  const auto r = lens_quotient_report(p, LensParams{1, 1}, {gamma_1()});
  EXPECT_FALSE(r.noncontractible);
  EXPECT_NEAR(r.orbits[0].period, kPi, 1e-12);
}

TEST(Lens, PerturbedFormNotInvariant) {
  const auto p = irrational(1.0, kSqrt2);
  OneForm bent = [&](const C2& z, const C2& v) { return alpha_h(z, v, p) + 1e-3 * v(0).real(); };
  EXPECT_EQ(kind_of([&] { lens_quotient_report(p, LensParams{3, 1}, {}, bent); }), ErrorKind::NotInvariant);
}
