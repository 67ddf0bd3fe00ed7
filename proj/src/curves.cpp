#include "sftkit/curves.hpp"

#include <set>

#include "sftkit/errors.hpp"

namespace sftkit {

namespace {

void require_dim2(const PuncturedCurve& c, const char* op) {
  if (c.half_dim_n != 2) {
    fail(ErrorKind::InvalidInput,
         std::string(op) + " is only defined in dimension 4 (curve '" + c.name + "' has n = " +
             std::to_string(c.half_dim_n) + ")");
  }
}

void require_genus0(const PuncturedCurve& c, const char* op) {
  if (c.genus != 0) {
    fail(ErrorKind::InvalidInput,
         std::string(op) + " requires genus 0 (curve '" + c.name + "')");
  }
}

// Winding that enters the adjunction formula at this end.
int sigma_end(const Puncture& p) {
  return p.positive() ? p.data().sigma_minus : p.data().sigma_plus;
}

bool distinct_simple_ends(const PuncturedCurve& c) {
  std::set<std::string> seen;
  for (const auto& p : c.punctures) {
    if (p.instance.multiplicity() != 1) return false;
    if (!seen.insert(p.instance.orbit().name()).second) return false;
  }
  return true;
}

struct Singularities {
  int delta = 0;
  int delta_infinity = 0;
};

Singularities singularities(const PuncturedCurve& c) {
  if (c.delta && c.delta_infinity) return {*c.delta, *c.delta_infinity};
  if (c.embedded && distinct_simple_ends(c)) {
    return {c.delta.value_or(0), c.delta_infinity.value_or(0)};
  }
  fail(ErrorKind::MissingSingularityData,
       "curve '" + c.name + "' needs delta and delta_infinity (not embedded with distinct simple ends)");
}

bool all_hyperbolic(const PuncturedCurve& c) {
  for (const auto& p : c.punctures) {
    if (!p.instance.orbit().is_hyperbolic()) return false;
  }
  return true;
}

}  // namespace

Puncture Puncture::make(Sign sign, OrbitInstance instance, bool morse_bott,
                        std::optional<int> wind_infinity) {
  SpectralData d = morse_bott ? perturbed_spectral_data(instance) : spectral_data(instance);
  return Puncture{sign, std::move(instance), d, morse_bott, wind_infinity};
}

const SpectralData& Puncture::data() const {
  if (!spectral) {
    fail(ErrorKind::MissingSpectralData,
         "puncture at orbit '" + instance.orbit().name() + "' has no spectral data");
  }
  return *spectral;
}

int PuncturedCurve::euler_characteristic() const {
  return 2 - 2 * genus - static_cast<int>(punctures.size());
}

int PuncturedCurve::positive_count() const {
  int k = 0;
  for (const auto& p : punctures) k += p.positive() ? 1 : 0;
  return k;
}

int PuncturedCurve::negative_count() const {
  return static_cast<int>(punctures.size()) - positive_count();
}

void PuncturedCurve::validate() const {
  auto bad = [&](const std::string& msg) { fail(ErrorKind::InvalidInput, "curve '" + name + "': " + msg); };
  if (half_dim_n < 2) bad("half dimension n must be >= 2");
  if (genus < 0) bad("genus must be >= 0");
  if (punctures.empty()) bad("closed curves are not supported (no punctures)");
  if (delta && *delta < 0) bad("delta must be >= 0");
  if (delta_infinity && *delta_infinity < 0) bad("delta_infinity must be >= 0");
  if (embedded && delta && *delta != 0) bad("embedded curve with nonzero delta");
  if (!somewhere_injective && !trivial_cylinder && (!cover_of || cover_of->degree < 2)) {
    bad("multiply covered curve needs cover_of with degree >= 2");
  }
  if (cover_of) {
    if (!cover_of->underlying) bad("cover_of has no underlying curve");
    if (cover_of->degree < 1) bad("cover degree must be >= 1");
    if (cover_of->branch_count && *cover_of->branch_count < 0) bad("branch count must be >= 0");
  }
  for (const auto& p : punctures) {
    if (p.morse_bott && !p.positive()) bad("Morse-Bott ends are only allowed at positive punctures");
  }
  if (trivial_cylinder) {
    if (punctures.size() != 2 || positive_count() != 1 || genus != 0) {
      bad("trivial cylinder must have one positive and one negative puncture");
    }
  }
}

PuncturedCurve trivial_cylinder(const OrbitInstance& instance, std::string name) {
  PuncturedCurve c;
  c.name = std::move(name);
  c.punctures.push_back(Puncture::make(Sign::Positive, instance));
  c.punctures.push_back(Puncture::make(Sign::Negative, instance));
  c.c1_rel = 0;
  const bool simple = instance.multiplicity() == 1;
  c.somewhere_injective = simple;
  c.embedded = simple;
  c.immersed = true;
  c.delta = 0;
  c.delta_infinity = 0;
  c.trivial_cylinder = true;
  return c;
}

int fredholm_index(const PuncturedCurve& curve) {
  curve.validate();
  int sum = 0;
  for (const auto& p : curve.punctures) sum += p.positive() ? p.data().cz : -p.data().cz;
  return (curve.half_dim_n - 3) * curve.euler_characteristic() + 2 * curve.c1_rel + sum;
}

int even_puncture_count(const PuncturedCurve& curve) {
  int k = 0;
  for (const auto& p : curve.punctures) k += p.data().parity == 0 ? 1 : 0;
  return k;
}

int normal_chern(const PuncturedCurve& curve) {
  require_dim2(curve, "normal_chern");
  const int ind = fredholm_index(curve);
  int windings = 0;
  for (const auto& p : curve.punctures) {
    windings += p.positive() ? p.data().alpha_minus : -p.data().alpha_plus;
  }
  const int cn = curve.c1_rel - curve.euler_characteristic() + windings;
  const int rhs = ind - 2 + 2 * curve.genus + even_puncture_count(curve);
  if (2 * cn != rhs) {
    fail(ErrorKind::InternalInconsistency,
         "curve '" + curve.name + "': 2 c_N = " + std::to_string(2 * cn) +
             " but ind - 2 + 2g + #even = " + std::to_string(rhs));
  }
  return cn;
}

DefectReport asymptotic_defect_and_windpi(const PuncturedCurve& curve) {
  require_dim2(curve, "asymptotic_defect_and_windpi");
  if (curve.trivial_cylinder ||
      (curve.cover_of && curve.cover_of->underlying && curve.cover_of->underlying->trivial_cylinder)) {
    fail(ErrorKind::InvalidInput,
         "curve '" + curve.name + "' covers a trivial cylinder; wind_pi is undefined");
  }
  const int cn = normal_chern(curve);
  DefectReport r;
  for (const auto& p : curve.punctures) {
    if (!p.wind_infinity) {
      fail(ErrorKind::InvalidInput,
           "curve '" + curve.name + "': wind_infinity missing at orbit '" +
               p.instance.orbit().name() + "'");
    }
    const int term = p.positive() ? p.data().alpha_minus - *p.wind_infinity
                                  : *p.wind_infinity - p.data().alpha_plus;
    if (term < 0) {
      fail(ErrorKind::NegativeDefect,
           "curve '" + curve.name + "': asymptotic winding " + std::to_string(*p.wind_infinity) +
               " exceeds the extremal bound at orbit '" + p.instance.orbit().name() + "'");
    }
    r.d0 += term;
  }
  r.wind_pi = cn - r.d0;
  if (r.wind_pi < 0) {
    fail(ErrorKind::NegativeWindPi, "curve '" + curve.name + "': c_N = " + std::to_string(cn) +
                                        " is smaller than the defect " + std::to_string(r.d0));
  }
  return r;
}

int self_intersection(const PuncturedCurve& curve) {
  require_dim2(curve, "self_intersection");
  require_genus0(curve, "self_intersection");
  if (!curve.somewhere_injective) {
    fail(ErrorKind::InvalidInput, "curve '" + curve.name + "' is not somewhere injective");
  }
  const Singularities s = singularities(curve);
  int sigma_excess = 0;
  for (const auto& p : curve.punctures) sigma_excess += sigma_end(p) - 1;
  return 2 * (s.delta + s.delta_infinity) + normal_chern(curve) + sigma_excess;
}

void enforce_nice_bounds(int index, int normal_chern_number) {
  if (normal_chern_number > 0 || index > 2) {
    fail(ErrorKind::InternalInconsistency,
         "nicely embedded curve with c_N = " + std::to_string(normal_chern_number) +
             ", ind = " + std::to_string(index) + " (need c_N <= 0, ind <= 2)");
  }
}

NicenessReport is_nicely_embedded(const PuncturedCurve& curve) {
  require_dim2(curve, "is_nicely_embedded");
  require_genus0(curve, "is_nicely_embedded");
  const int ind = fredholm_index(curve);
  const int cn = normal_chern(curve);

  bool immersed = curve.immersed.value_or(curve.embedded);
  bool have_windings = !curve.trivial_cylinder && !curve.cover_of;
  for (const auto& p : curve.punctures) have_windings = have_windings && p.wind_infinity.has_value();
  if (have_windings) immersed = asymptotic_defect_and_windpi(curve).wind_pi == 0;

  NicenessReport r;
  r.auto_transversal = immersed && ind > cn;
  if (!curve.somewhere_injective) return r;
  const Singularities s = singularities(curve);
  r.nice = s.delta + s.delta_infinity == 0 && self_intersection(curve) <= 0;
  if (r.nice) enforce_nice_bounds(ind, cn);
  return r;
}

CoverReport cover_index_check(const PuncturedCurve& curve) {
  curve.validate();
  if (!curve.cover_of) {
    fail(ErrorKind::InvalidInput, "curve '" + curve.name + "' has no cover_of data");
  }
  const PuncturedCurve& v = *curve.cover_of->underlying;
  const int k = curve.cover_of->degree;
  CoverReport r;
  r.index = fredholm_index(curve);
  if (v.trivial_cylinder) {
    r.branch = CoverBranch::TrivialCylinder;
    r.branch_points = -curve.euler_characteristic();
  } else if (all_hyperbolic(curve) && all_hyperbolic(v)) {
    r.branch = CoverBranch::HyperbolicEnds;
    r.branch_points = -curve.euler_characteristic() + k * v.euler_characteristic();
  } else {
    fail(ErrorKind::UnsupportedCover,
         "curve '" + curve.name + "': only covers of trivial cylinders or of curves with hyperbolic ends are bounded");
  }
  if (r.branch_points < 0) {
    fail(ErrorKind::InvalidInput,
         "curve '" + curve.name + "': Riemann-Hurwitz gives a negative branch count");
  }
  if (curve.cover_of->branch_count && *curve.cover_of->branch_count != r.branch_points) {
    fail(ErrorKind::InvalidInput, "curve '" + curve.name + "': declared branch count " +
                                      std::to_string(*curve.cover_of->branch_count) +
                                      " differs from Riemann-Hurwitz value " +
                                      std::to_string(r.branch_points));
  }
  if (r.branch == CoverBranch::HyperbolicEnds) {
    r.bound = k * fredholm_index(v);
    r.equality = r.index == r.bound;
    r.pass = r.index >= r.bound && r.equality == (r.branch_points == 0);
  } else {
    r.bound = 0;
    r.equality = r.index == 0;
    const bool elliptic = v.punctures.front().instance.orbit().is_elliptic();
    r.pass = r.index >= 0 && (!r.equality || r.branch_points == 0 || elliptic);
  }
  return r;
}

SelfLinkingReport self_linking_of_plane(const PuncturedCurve& curve) {
  require_dim2(curve, "self_linking_of_plane");
  if (curve.genus != 0 || curve.punctures.size() != 1 || !curve.punctures.front().positive() ||
      curve.punctures.front().instance.multiplicity() != 1) {
    fail(ErrorKind::NotAPlane, "curve '" + curve.name + "' is not a plane asymptotic to a simple orbit");
  }
  const int ind = fredholm_index(curve);
  if (ind != 1 && ind != 2) {
    fail(ErrorKind::IndexOutOfRange, "plane '" + curve.name + "' has index " + std::to_string(ind));
  }
  if (curve.c1_rel != 0) {
    fail(ErrorKind::InvalidInput,
         "plane '" + curve.name + "' must be given in the disk trivialization (c1_rel = 0)");
  }
  if (!is_nicely_embedded(curve).nice) {
    fail(ErrorKind::InvalidInput, "plane '" + curve.name + "' is not nicely embedded");
  }
  const SpectralData& d = curve.punctures.front().data();
  if (d.cz != ind + 1) {
    fail(ErrorKind::InternalInconsistency, "plane '" + curve.name + "': cz " + std::to_string(d.cz) +
                                               " does not equal ind + 1");
  }
  return SelfLinkingReport{d.cz, -d.alpha_minus};
}

}  // namespace sftkit
