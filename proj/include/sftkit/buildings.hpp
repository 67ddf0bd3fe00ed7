#pragma once

// Holomorphic buildings with one main level and lower levels in the
// negative end: validation, normal Chern and intersection budgets, local
// adjunction at breaking orbits, and the search over degeneration shapes of
// nicely embedded planes.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sftkit/curves.hpp"
#include "sftkit/orbits.hpp"

namespace sftkit {

struct Component {
  std::string id;
  PuncturedCurve curve;  // trivial cylinders carry curve.trivial_cylinder

  bool is_trivial() const { return curve.trivial_cylinder; }
};

struct Breaking {
  std::string upper;
  int upper_end = -1;  // index into the upper component's punctures; -1 = first free match
  std::string lower;
  OrbitInstance orbit;
  int decoration = 0;
};

struct Building {
  std::string name;
  std::vector<std::vector<Component>> levels;  // levels[0] is the main level
  std::vector<Breaking> breakings;

  const Component* find(const std::string& id) const;
  int level_of(const std::string& id) const;  // -1 if absent
};

// Assigns upper_end for breakings that leave it at -1. InvalidInput when no
// free negative end of the upper component matches.
void resolve_breaking_ends(Building& b);

struct ValidationReport {
  bool pass = true;
  std::string failed;  // tree | matching | decoration | lowest_level | connected | stability
  std::string detail;
};
ValidationReport validate_building(const Building& b);

struct CnBudgetReport {
  int lemma_case = 0;  // 1: all breakings even; 2: odd-ended main cylinder
  int total = 0;
  std::map<std::string, int> hat_cn;  // c_N plus negative-end parities, per component
};
// BudgetViolation when the sum differs from total_cn or neither case applies.
CnBudgetReport cn_budget(const Building& b, int total_cn);

// Lower bound for each component's self-intersection from the adjunction
// formula with delta_total >= 0; trivial cylinders contribute 0.
std::map<std::string, int> adjunction_lower_bounds(const Building& b);

int intersection_lower_bound(const Building& b, const std::map<std::string, int>& self_ints);

struct LocalAdjunction {
  int delta = 0;
  int sigma_plus_term = 0;
  int sigma_minus_term = 0;
  int parity_term = 0;

  int correction() const { return sigma_plus_term + sigma_minus_term + parity_term; }
};
LocalAdjunction local_adjunction(const SpectralData& breaking, int multiplicity,
                                 int delta_inf_plus = 0, int delta_inf_minus = 0);
LocalAdjunction local_adjunction(const OrbitInstance& breaking, int delta_inf_plus = 0,
                                 int delta_inf_minus = 0);

enum class EmbeddedBreaking { Simple, BadDoubleCover, Forbidden };
std::string_view to_string(EmbeddedBreaking e);
EmbeddedBreaking classify_embedded_breaking(const OrbitInstance& instance);

int decoration_count(const OrbitInstance& instance);

enum class BuildingType { I, II, III, IV, V, VI, Rejected };
std::string_view to_string(BuildingType t);

struct Classification {
  BuildingType type = BuildingType::Rejected;
  std::string shape;
  std::string reason;  // set when rejected
};
Classification classify_building(const Building& b);

// Parity-labelled tree of the building, children sorted. A component reads
// "i<index>" (or "T" for a trivial cylinder, "g<genus>" appended if nonzero)
// followed by "(<parity>:<child>,...)" over its negative ends.
std::string shape_string(const Building& b);

struct Template {
  BuildingType type;
  std::string shape;
  int total_index;
};
const std::vector<Template>& theorem_templates();

// A concrete building realizing one of the six types, over representative orbits.
Building template_building(BuildingType type);

struct EnumerationOptions {
  int total_index = 2;
  int max_levels = 4;  // including the main level
  int max_components_per_level = 4;
  int max_multiplicity = 2;
  int max_negative_punctures = 3;
  long max_candidates = 2'000'000;
  int threads = 0;  // 0 = serial
};

struct ShapeResult {
  std::string shape;
  BuildingType type = BuildingType::Rejected;
  int levels = 0;
  std::vector<std::string> variants;  // sorted; breaking labels name the orbit and multiplicity
  Building example;
};

struct EnumerationResult {
  std::vector<ShapeResult> shapes;  // sorted by type, then shape
  long candidates = 0;
  long admissible = 0;
};
EnumerationResult enumerate_degenerations(const EnumerationOptions& options);

}  // namespace sftkit
