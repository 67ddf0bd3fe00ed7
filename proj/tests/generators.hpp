#pragma once

// Random curve records shared by property tests and the acceptance run.

#include <memory>
#include <random>

#include "sftkit/curves.hpp"

namespace sftkit::testgen {

struct SyntheticCover {
  PuncturedCurve cover;
  int degree = 1;
  int branch_points = 0;  // Riemann-Hurwitz, computed from the topology alone
};

// A genus-0 curve v with 1-4 hyperbolic ends and a degree-k cover u whose ends
// over each end of v partition k. The genus of u is the smallest one making
// the branch count nonnegative, plus 0 or 1.
inline SyntheticCover synthetic_hyperbolic_cover(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ends(1, 4), czd(-5, 5), c1d(-3, 3), kd(2, 4), extra(0, 1);
  std::bernoulli_distribution coin(0.5);
  auto v = std::make_shared<PuncturedCurve>();
  v->name = "v";
  v->c1_rel = c1d(rng);
  v->embedded = true;
  const int nv = ends(rng);
  for (int i = 0; i < nv; ++i) {
    const Sign s = i == 0 || coin(rng) ? Sign::Positive : Sign::Negative;
    v->punctures.push_back(Puncture::make(s, {OrbitClass::hyperbolic("h" + std::to_string(i), czd(rng)), 1}));
  }
  SyntheticCover out;
  out.degree = kd(rng);
  PuncturedCurve& u = out.cover;
  u.name = "u";
  u.somewhere_injective = false;
  u.c1_rel = out.degree * v->c1_rel;
  for (const auto& p : v->punctures) {
    int left = out.degree;
    while (left > 0) {
      const int m = std::uniform_int_distribution<int>(1, left)(rng);
      u.punctures.push_back(Puncture::make(p.sign, {p.instance.orbit(), m}));
      left -= m;
    }
  }
  const int chi_v = 2 - nv;
  const int pu = static_cast<int>(u.punctures.size());
  // b = 2g + P - 2 + k chi(v)
  int g = 0;
  while (2 * g + pu - 2 + out.degree * chi_v < 0) ++g;
  u.genus = g + extra(rng);
  out.branch_points = 2 * u.genus + pu - 2 + out.degree * chi_v;
  u.cover_of = CoverData{v, out.degree, std::nullopt};
  return out;
}

}  // namespace sftkit::testgen
