#include "sftkit/buildings.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <set>
#include <thread>

#include "sftkit/errors.hpp"

namespace sftkit {

namespace {

bool same_instance(const OrbitInstance& a, const OrbitInstance& b) {
  return a.orbit().name() == b.orbit().name() && a.multiplicity() == b.multiplicity();
}

std::string instance_label(const OrbitInstance& x) {
  return x.orbit().name() + "^" + std::to_string(x.multiplicity());
}

const Puncture* positive_puncture(const PuncturedCurve& c) {
  for (const auto& p : c.punctures) {
    if (p.positive()) return &p;
  }
  return nullptr;
}

char parity_letter(int parity) { return parity == 0 ? 'e' : 'o'; }

std::string node_string(const Building& b, const Component& c, bool detailed) {
  std::string s;
  if (c.is_trivial()) {
    s = "T";
  } else {
    s = "i" + std::to_string(fredholm_index(c.curve));
    if (c.curve.genus != 0) s += "g" + std::to_string(c.curve.genus);
  }
  std::vector<std::string> children;
  for (const auto& br : b.breakings) {
    if (br.upper != c.id) continue;
    const Component* lower = b.find(br.lower);
    if (!lower) continue;
    const SpectralData d = spectral_data(br.orbit);
    std::string label(1, parity_letter(d.parity));
    if (detailed) label += instance_label(br.orbit);
    children.push_back(label + ":" + node_string(b, *lower, detailed));
  }
  std::sort(children.begin(), children.end());
  if (!children.empty()) {
    s += "(";
    for (size_t i = 0; i < children.size(); ++i) s += (i ? "," : "") + children[i];
    s += ")";
  }
  return s;
}

// ---- abstract shapes used by the search and by the template builders ----

struct Node;

struct Child {
  int option;
  std::shared_ptr<const Node> node;
};

struct Node {
  bool trivial = false;
  int index = 0;
  std::vector<Child> children;
};

struct Catalogue {
  OrbitClass top;
  std::vector<OrbitInstance> options;
};

OrbitClass top_orbit(int parity) {
  if (parity == 0) return OrbitClass::hyperbolic("gamma_inf", 2);
  return OrbitClass::elliptic("gamma_inf", (std::sqrt(5.0) - 1.0) / 2.0);
}

Catalogue make_catalogue(int top_parity, int max_multiplicity) {
  Catalogue cat{top_orbit(top_parity), {}};
  const auto e = OrbitClass::elliptic("e", std::sqrt(2.0) - 1.0);
  const auto h_even = OrbitClass::hyperbolic("h_even", 0);
  const auto h_odd = OrbitClass::hyperbolic("h_odd", 1);
  for (int m = 1; m <= max_multiplicity; ++m) {
    for (const auto& orbit : {e, h_even, h_odd}) {
      try {
        (void)cz_of_cover(orbit, m);
      } catch (const Error&) {
        continue;
      }
      cat.options.emplace_back(orbit, m);
    }
  }
  return cat;
}

// c1 making the component have the requested index, if it is an integer.
std::optional<int> chern_for_index(const OrbitInstance& positive,
                                   const std::vector<OrbitInstance>& negatives, int index) {
  const int chi = 1 - static_cast<int>(negatives.size());
  int twice = index + chi - cz_of_cover(positive.orbit(), positive.multiplicity());
  for (const auto& n : negatives) twice += cz_of_cover(n.orbit(), n.multiplicity());
  if (twice % 2 != 0) return std::nullopt;
  return twice / 2;
}

PuncturedCurve component_curve(const std::string& id, const OrbitInstance& positive,
                               const std::vector<OrbitInstance>& negatives, int index) {
  const auto c1 = chern_for_index(positive, negatives, index);
  if (!c1) fail(ErrorKind::InternalInconsistency, "component " + id + " has no integral c1");
  PuncturedCurve c;
  c.name = id;
  c.c1_rel = *c1;
  c.embedded = true;
  c.immersed = true;
  c.delta = 0;
  c.delta_infinity = 0;
  c.punctures.push_back(Puncture::make(Sign::Positive, positive));
  for (const auto& n : negatives) c.punctures.push_back(Puncture::make(Sign::Negative, n));
  return c;
}

Building to_building(const Node& root, const Catalogue& cat, const std::string& name) {
  Building b;
  b.name = name;
  struct Pending {
    const Node* node;
    OrbitInstance positive;
    std::string parent;
    int parent_end;
  };
  std::vector<Pending> current{{&root, OrbitInstance(cat.top, 1), "", -1}};
  int level = 0;
  while (!current.empty()) {
    std::vector<Component> comps;
    std::vector<Pending> next;
    int pos = 0;
    for (const auto& p : current) {
      const std::string id = level == 0 ? "v0" : "v" + std::to_string(level) + "_" + std::to_string(++pos);
      Component comp;
      comp.id = id;
      if (p.node->trivial) {
        comp.curve = trivial_cylinder(p.positive, id);
      } else {
        std::vector<OrbitInstance> negatives;
        for (const auto& ch : p.node->children) {
          negatives.push_back(cat.options[static_cast<size_t>(ch.option)]);
        }
        comp.curve = component_curve(id, p.positive, negatives, p.node->index);
      }
      if (!p.parent.empty()) {
        b.breakings.push_back(Breaking{p.parent, p.parent_end, id, p.positive, 0});
      }
      for (size_t k = 0; k < p.node->children.size(); ++k) {
        const auto& ch = p.node->children[k];
        next.push_back({ch.node.get(), cat.options[static_cast<size_t>(ch.option)], id,
                        static_cast<int>(k) + 1});
      }
      comps.push_back(std::move(comp));
    }
    b.levels.push_back(std::move(comps));
    current = std::move(next);
    ++level;
  }
  return b;
}

std::shared_ptr<const Node> leaf(int index) {
  auto n = std::make_shared<Node>();
  n->index = index;
  return n;
}

std::shared_ptr<const Node> with_children(bool trivial, int index, std::vector<Child> children) {
  auto n = std::make_shared<Node>();
  n->trivial = trivial;
  n->index = index;
  n->children = std::move(children);
  return n;
}

// ---- search ----

struct Search {
  const EnumerationOptions& opt;
  const Catalogue& cat;
  int max_depth;  // deepest lower level index
  std::atomic<long>& counter;

  using Result = std::vector<std::pair<std::shared_ptr<const Node>, int>>;

  void bump(long n) const {
    if (counter.fetch_add(n) + n > opt.max_candidates) {
      fail(ErrorKind::SearchBudgetExceeded,
           "more than " + std::to_string(opt.max_candidates) + " partial shapes");
    }
  }

  // Every subtree ends in planes of index >= 1, so each child needs budget >= 1.
  void combine(const std::vector<int>& options, size_t i, int depth, int remaining,
               std::vector<Child>& acc, int used, std::vector<std::pair<std::vector<Child>, int>>& out) const {
    if (i == options.size()) {
      out.push_back({acc, used});
      return;
    }
    const int reserve = static_cast<int>(options.size() - i - 1);
    for (const auto& [sub, u] : grow(depth + 1, options[i], remaining - reserve)) {
      acc.push_back(Child{options[i], sub});
      combine(options, i + 1, depth, remaining - u, acc, used + u, out);
      acc.pop_back();
    }
  }

  void nondecreasing(int k, int from, std::vector<int>& acc, std::vector<std::vector<int>>& out) const {
    if (static_cast<int>(acc.size()) == k) {
      out.push_back(acc);
      return;
    }
    for (int o = from; o < static_cast<int>(cat.options.size()); ++o) {
      acc.push_back(o);
      nondecreasing(k, o, acc, out);
      acc.pop_back();
    }
  }

  std::vector<std::vector<int>> tuples(int k) const {
    std::vector<std::vector<int>> out;
    std::vector<int> acc;
    nondecreasing(k, 0, acc, out);
    return out;
  }

  // Nontrivial component with the given positive end, index and negative ends.
  void expand(const OrbitInstance& positive, int depth, int index, const std::vector<int>& negs,
              int budget, Result& out) const {
    std::vector<OrbitInstance> neg_orbits;
    for (int o : negs) neg_orbits.push_back(cat.options[static_cast<size_t>(o)]);
    if (!chern_for_index(positive, neg_orbits, index)) return;
    std::vector<std::pair<std::vector<Child>, int>> combos;
    std::vector<Child> acc;
    combine(negs, 0, depth, budget - index, acc, 0, combos);
    bump(static_cast<long>(combos.size()));
    for (auto& [children, used] : combos) {
      out.push_back({with_children(false, index, std::move(children)), index + used});
    }
  }

  // Subtrees hanging from a breaking at option `option`, entering at level `depth`.
  Result grow(int depth, int option, int budget) const {
    Result out;
    if (budget < 1 || depth > max_depth) return out;
    const OrbitInstance& positive = cat.options[static_cast<size_t>(option)];
    if (depth < max_depth) {
      for (const auto& [sub, u] : grow(depth + 1, option, budget)) {
        out.push_back({with_children(true, 0, {Child{option, sub}}), u});
      }
    }
    for (int index = 1; index <= budget; ++index) {
      const int max_k = depth < max_depth ? std::min(opt.max_negative_punctures, budget - index) : 0;
      for (int k = 0; k <= max_k; ++k) {
        for (const auto& negs : tuples(k)) expand(positive, depth, index, negs, budget, out);
      }
    }
    return out;
  }
};

struct RootTask {
  int index;
  std::vector<int> negatives;
};

int first_all_trivial_level(const Building& b) {
  for (size_t j = 1; j < b.levels.size(); ++j) {
    bool nontrivial = false;
    for (const auto& c : b.levels[j]) nontrivial = nontrivial || !c.is_trivial();
    if (!nontrivial) return static_cast<int>(j);
  }
  return 0;
}

}  // namespace

const Component* Building::find(const std::string& id) const {
  for (const auto& level : levels) {
    for (const auto& c : level) {
      if (c.id == id) return &c;
    }
  }
  return nullptr;
}

int Building::level_of(const std::string& id) const {
  for (size_t j = 0; j < levels.size(); ++j) {
    for (const auto& c : levels[j]) {
      if (c.id == id) return static_cast<int>(j);
    }
  }
  return -1;
}

void resolve_breaking_ends(Building& b) {
  std::set<std::pair<std::string, int>> used;
  for (const auto& br : b.breakings) {
    if (br.upper_end >= 0) used.insert({br.upper, br.upper_end});
  }
  for (auto& br : b.breakings) {
    if (br.upper_end >= 0) continue;
    const Component* up = b.find(br.upper);
    if (!up) fail(ErrorKind::ReferenceError, "breaking refers to unknown component '" + br.upper + "'");
    const auto& ps = up->curve.punctures;
    for (size_t k = 0; k < ps.size(); ++k) {
      if (ps[k].positive() || !same_instance(ps[k].instance, br.orbit)) continue;
      if (used.insert({br.upper, static_cast<int>(k)}).second) {
        br.upper_end = static_cast<int>(k);
        break;
      }
    }
    if (br.upper_end < 0) {
      fail(ErrorKind::InvalidInput, "component '" + br.upper + "' has no free negative end at " +
                                        instance_label(br.orbit));
    }
  }
}

ValidationReport validate_building(const Building& b) {
  auto failure = [](std::string which, std::string detail) {
    return ValidationReport{false, std::move(which), std::move(detail)};
  };
  if (b.levels.empty() || b.levels.front().size() != 1) {
    return failure("connected", "main level must consist of exactly one component");
  }
  std::set<std::string> ids;
  for (const auto& level : b.levels) {
    for (const auto& c : level) {
      if (!ids.insert(c.id).second) return failure("tree", "duplicate component id '" + c.id + "'");
      try {
        c.curve.validate();
      } catch (const Error& e) {
        return failure("component", e.what());
      }
      if (c.curve.positive_count() != 1) {
        return failure("tree", "component '" + c.id + "' has " + std::to_string(c.curve.positive_count()) +
                                   " positive punctures");
      }
    }
  }
  std::set<std::pair<std::string, int>> used_ends;
  std::map<std::string, int> incoming;
  for (const auto& br : b.breakings) {
    const Component* up = b.find(br.upper);
    const Component* lo = b.find(br.lower);
    if (!up || !lo) return failure("tree", "breaking refers to an unknown component");
    if (b.level_of(br.lower) != b.level_of(br.upper) + 1) {
      return failure("tree", "breaking " + br.upper + " -> " + br.lower + " skips or reverses levels");
    }
    const auto& ps = up->curve.punctures;
    if (br.upper_end < 0 || br.upper_end >= static_cast<int>(ps.size()) ||
        ps[static_cast<size_t>(br.upper_end)].positive()) {
      return failure("matching", "breaking " + br.upper + " -> " + br.lower + " does not name a negative end");
    }
    if (!same_instance(ps[static_cast<size_t>(br.upper_end)].instance, br.orbit) ||
        !same_instance(positive_puncture(lo->curve)->instance, br.orbit)) {
      return failure("matching", "breaking " + br.upper + " -> " + br.lower + " at " +
                                     instance_label(br.orbit) + " does not match its ends");
    }
    if (br.decoration < 0 || br.decoration >= br.orbit.multiplicity()) {
      return failure("decoration", "decoration " + std::to_string(br.decoration) + " outside [0, " +
                                       std::to_string(br.orbit.multiplicity()) + ")");
    }
    if (!used_ends.insert({br.upper, br.upper_end}).second) {
      return failure("tree", "negative end " + std::to_string(br.upper_end) + " of '" + br.upper +
                                 "' is used twice");
    }
    ++incoming[br.lower];
  }
  const size_t lowest = b.levels.size() - 1;
  for (size_t j = 0; j < b.levels.size(); ++j) {
    for (const auto& c : b.levels[j]) {
      if (j > 0 && incoming[c.id] != 1) {
        return failure("tree", "component '" + c.id + "' hangs from " + std::to_string(incoming[c.id]) +
                                   " breakings");
      }
      if (j == lowest && c.curve.negative_count() > 0) {
        return failure("lowest_level", "component '" + c.id + "' in the lowest level has negative ends");
      }
      for (size_t k = 0; k < c.curve.punctures.size(); ++k) {
        if (c.curve.punctures[k].positive()) continue;
        if (!used_ends.count({c.id, static_cast<int>(k)})) {
          return failure("tree", "negative end " + std::to_string(k) + " of '" + c.id + "' is unmatched");
        }
      }
    }
  }
  for (size_t j = 1; j < b.levels.size(); ++j) {
    if (b.levels[j].empty()) return failure("stability", "level " + std::to_string(j) + " is empty");
  }
  if (const int j = first_all_trivial_level(b)) {
    return failure("stability", "level " + std::to_string(j) + " consists only of trivial cylinders");
  }
  return {};
}

CnBudgetReport cn_budget(const Building& b, int total_cn) {
  if (total_cn != 0 && total_cn != -1) fail(ErrorKind::InvalidInput, "total c_N must be -1 or 0");
  const auto v = validate_building(b);
  if (!v.pass) fail(ErrorKind::InvalidInput, "invalid building (" + v.failed + "): " + v.detail);
  CnBudgetReport r;
  std::map<std::string, int> cn;
  for (const auto& level : b.levels) {
    for (const auto& c : level) {
      cn[c.id] = normal_chern(c.curve);
      int hat = cn[c.id];
      for (const auto& p : c.curve.punctures) hat += p.positive() ? 0 : p.data().parity;
      r.hat_cn[c.id] = hat;
      r.total += hat;
    }
  }
  if (r.total != total_cn) {
    fail(ErrorKind::BudgetViolation, "sum of c_N-hat is " + std::to_string(r.total) + ", expected " +
                                         std::to_string(total_cn));
  }
  for (size_t j = 1; j < b.levels.size(); ++j) {
    for (const auto& c : b.levels[j]) {
      if (cn[c.id] != 0) {
        fail(ErrorKind::BudgetViolation,
             "lower component '" + c.id + "' has c_N = " + std::to_string(cn[c.id]));
      }
    }
  }
  const Component& v0 = b.levels[0][0];
  int odd_total = 0;
  int odd_at_v0 = 0;
  for (const auto& br : b.breakings) {
    const int p = spectral_data(br.orbit).parity;
    odd_total += p;
    if (br.upper == v0.id) odd_at_v0 += p;
  }
  if (odd_total == 0 && cn[v0.id] == 0) {
    r.lemma_case = 1;
  } else if (odd_total == 1 && odd_at_v0 == 1 && v0.curve.negative_count() == 1 && cn[v0.id] == -1) {
    r.lemma_case = 2;
  } else {
    fail(ErrorKind::BudgetViolation,
         std::to_string(odd_total) + " odd breaking orbits with c_N(v0) = " + std::to_string(cn[v0.id]));
  }
  return r;
}

std::map<std::string, int> adjunction_lower_bounds(const Building& b) {
  std::map<std::string, int> out;
  for (const auto& level : b.levels) {
    for (const auto& c : level) {
      if (c.is_trivial()) {
        out[c.id] = 0;
        continue;
      }
      int bound = normal_chern(c.curve);
      for (const auto& p : c.curve.punctures) {
        bound += (p.positive() ? p.data().sigma_minus : p.data().sigma_plus) - 1;
      }
      out[c.id] = bound;
    }
  }
  return out;
}

int intersection_lower_bound(const Building& b, const std::map<std::string, int>& self_ints) {
  int total = 0;
  for (const auto& level : b.levels) {
    for (const auto& c : level) {
      const auto it = self_ints.find(c.id);
      if (it == self_ints.end()) {
        fail(ErrorKind::InvalidInput, "no self-intersection number for component '" + c.id + "'");
      }
      total += it->second;
    }
  }
  for (const auto& br : b.breakings) total += br.orbit.multiplicity() * spectral_data(br.orbit).parity;
  return total;
}

LocalAdjunction local_adjunction(const SpectralData& d, int m, int delta_inf_plus,
                                 int delta_inf_minus) {
  if (m < 1) fail(ErrorKind::InvalidInput, "multiplicity must be >= 1");
  if (delta_inf_plus < 0 || delta_inf_minus < 0) {
    fail(ErrorKind::InvalidInput, "delta_infinity counts must be >= 0");
  }
  LocalAdjunction r;
  r.sigma_plus_term = d.sigma_plus - 1;
  r.sigma_minus_term = d.sigma_minus - 1;
  r.parity_term = (m - 1) * d.parity;
  if (r.sigma_plus_term < 0 || r.sigma_minus_term < 0 || r.parity_term < 0) {
    fail(ErrorKind::InvalidInput, "negative correction term in local adjunction");
  }
  if (r.correction() % 2 != 0) {
    fail(ErrorKind::ParityArithmeticError,
         "correction terms sum to odd value " + std::to_string(r.correction()));
  }
  r.delta = delta_inf_plus + delta_inf_minus + r.correction() / 2;
  return r;
}

LocalAdjunction local_adjunction(const OrbitInstance& breaking, int delta_inf_plus,
                                 int delta_inf_minus) {
  return local_adjunction(spectral_data(breaking), breaking.multiplicity(), delta_inf_plus,
                          delta_inf_minus);
}

std::string_view to_string(EmbeddedBreaking e) {
  switch (e) {
    case EmbeddedBreaking::Simple: return "Simple";
    case EmbeddedBreaking::BadDoubleCover: return "BadDoubleCover";
    case EmbeddedBreaking::Forbidden: return "Forbidden";
  }
  return "Forbidden";
}

EmbeddedBreaking classify_embedded_breaking(const OrbitInstance& instance) {
  if (instance.multiplicity() == 1) return EmbeddedBreaking::Simple;
  if (instance.multiplicity() == 2 && is_bad_orbit(instance)) {
    const SpectralData d = spectral_data(instance);
    if (d.parity != 0 || d.sigma_minus != 1 || d.sigma_plus != 1) {
      fail(ErrorKind::InternalInconsistency, "bad double cover " + instance_label(instance) +
                                                 " has unexpected spectral data");
    }
    return EmbeddedBreaking::BadDoubleCover;
  }
  return EmbeddedBreaking::Forbidden;
}

int decoration_count(const OrbitInstance& instance) { return instance.multiplicity(); }

std::string_view to_string(BuildingType t) {
  switch (t) {
    case BuildingType::I: return "TypeI";
    case BuildingType::II: return "TypeII";
    case BuildingType::III: return "TypeIII";
    case BuildingType::IV: return "TypeIV";
    case BuildingType::V: return "TypeV";
    case BuildingType::VI: return "TypeVI";
    case BuildingType::Rejected: return "Rejected";
  }
  return "Rejected";
}

std::string shape_string(const Building& b) {
  if (b.levels.empty() || b.levels.front().empty()) return "";
  return node_string(b, b.levels.front().front(), false);
}

const std::vector<Template>& theorem_templates() {
  static const std::vector<Template> templates = {
      {BuildingType::I, "i0(e:i1)", 1},
      {BuildingType::II, "i0(o:i2)", 2},
      {BuildingType::III, "i1(e:i1)", 2},
      {BuildingType::IV, "i0(e:i1,e:i1)", 2},
      {BuildingType::V, "i0(e:T(e:i1),e:i1)", 2},
      {BuildingType::VI, "i0(o:i1(e:i1))", 2},
  };
  return templates;
}

Classification classify_building(const Building& b) {
  Classification c;
  const auto v = validate_building(b);
  if (!v.pass) {
    c.reason = "invalid building (" + v.failed + "): " + v.detail;
    return c;
  }
  c.shape = shape_string(b);
  if (b.levels.size() < 2) {
    c.reason = "needs at least one lower level";
    return c;
  }
  const Component& v0 = b.levels[0][0];
  if (positive_puncture(v0.curve)->instance.multiplicity() != 1) {
    c.reason = "main level is not asymptotic to a simple orbit";
    return c;
  }
  for (const auto& br : b.breakings) {
    if (classify_embedded_breaking(br.orbit) == EmbeddedBreaking::Forbidden) {
      c.reason = "breaking orbit " + instance_label(br.orbit) +
                 " is neither simple nor a bad double cover";
      return c;
    }
  }
  for (const auto& t : theorem_templates()) {
    if (t.shape == c.shape) {
      c.type = t.type;
      return c;
    }
  }
  c.reason = "shape " + c.shape + " matches no template";
  return c;
}

Building template_building(BuildingType type) {
  auto cat = make_catalogue(type == BuildingType::I ? 0 : 1, 2);
  // option indices: 0 = e (odd), 1 = h_even, 2 = h_odd (odd)
  const int odd = 0, even = 1;
  std::shared_ptr<const Node> root;
  switch (type) {
    case BuildingType::I:
      root = with_children(false, 0, {Child{even, leaf(1)}});
      break;
    case BuildingType::II:
      root = with_children(false, 0, {Child{odd, leaf(2)}});
      break;
    case BuildingType::III:
      root = with_children(false, 1, {Child{even, leaf(1)}});
      break;
    case BuildingType::IV:
      root = with_children(false, 0, {Child{even, leaf(1)}, Child{even, leaf(1)}});
      break;
    case BuildingType::V:
      root = with_children(false, 0,
                           {Child{even, with_children(true, 0, {Child{even, leaf(1)}})},
                            Child{even, leaf(1)}});
      break;
    case BuildingType::VI:
      root = with_children(false, 0,
                           {Child{odd, with_children(false, 1, {Child{even, leaf(1)}})}});
      break;
    case BuildingType::Rejected:
      fail(ErrorKind::InvalidInput, "no template for Rejected");
  }
  return to_building(*root, cat, std::string(to_string(type)));
}

EnumerationResult enumerate_degenerations(const EnumerationOptions& opt) {
  if (opt.total_index != 1 && opt.total_index != 2) {
    fail(ErrorKind::InvalidInput, "total index must be 1 or 2");
  }
  if (opt.max_levels < 2 || opt.max_components_per_level < 1 || opt.max_multiplicity < 1 ||
      opt.max_negative_punctures < 1) {
    fail(ErrorKind::InvalidInput, "search bounds too small (need max_levels >= 2 and positive limits)");
  }
  if (opt.max_levels > 12 || opt.max_multiplicity > 12 || opt.max_negative_punctures > 12 ||
      opt.max_components_per_level > 64) {
    fail(ErrorKind::SearchBudgetExceeded, "search bounds exceed the supported range");
  }
  // ind(u) = 2 c_N + 2 - #even with one end: c_N = 0 forces even for index 1, odd for index 2.
  const int top_parity = opt.total_index == 1 ? 0 : 1;
  const Catalogue cat = make_catalogue(top_parity, opt.max_multiplicity);
  const OrbitInstance top(cat.top, 1);

  std::atomic<long> counter{0};
  const Search search{opt, cat, opt.max_levels - 1, counter};

  std::vector<RootTask> tasks;
  for (int index = 0; index < opt.total_index; ++index) {
    const int max_k = std::min(opt.max_negative_punctures, opt.total_index - index);
    for (int k = 1; k <= max_k; ++k) {
      for (auto& negs : search.tuples(k)) tasks.push_back({index, std::move(negs)});
    }
  }

  std::vector<Search::Result> per_task(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      try {
        search.expand(top, 0, tasks[i].index, tasks[i].negatives, opt.total_index, per_task[i]);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads = std::max(0, opt.threads);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (!e.empty()) fail(ErrorKind::SearchBudgetExceeded, e);
  }

  EnumerationResult result;
  std::map<std::string, std::pair<ShapeResult, std::set<std::string>>> groups;
  std::set<std::string> seen;
  for (const auto& task_results : per_task) {
    for (const auto& [node, used] : task_results) {
      if (used != opt.total_index) continue;
      Building b = to_building(*node, cat, "candidate");
      bool fits = true;
      for (const auto& level : b.levels) {
        fits = fits && static_cast<int>(level.size()) <= opt.max_components_per_level;
      }
      if (!fits) continue;
      const std::string variant = node_string(b, b.levels[0][0], true);
      if (!seen.insert(variant).second) continue;
      ++result.candidates;
      if (!validate_building(b).pass) continue;
      try {
        cn_budget(b, 0);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BudgetViolation) throw;
        continue;
      }
      if (intersection_lower_bound(b, adjunction_lower_bounds(b)) > 0) continue;
      bool embedded = true;
      for (const auto& br : b.breakings) {
        embedded = embedded && classify_embedded_breaking(br.orbit) != EmbeddedBreaking::Forbidden;
      }
      if (!embedded) continue;
      ++result.admissible;
      const Classification cls = classify_building(b);
      const std::string shape = shape_string(b);
      auto it = groups.find(shape);
      if (it == groups.end()) {
        ShapeResult s;
        s.shape = shape;
        s.type = cls.type;
        s.levels = static_cast<int>(b.levels.size());
        b.name = std::string(to_string(cls.type));
        s.example = std::move(b);
        it = groups.emplace(shape, std::make_pair(std::move(s), std::set<std::string>{})).first;
      }
      it->second.second.insert(variant);
    }
  }
  for (auto& [shape, entry] : groups) {
    entry.first.variants.assign(entry.second.begin(), entry.second.end());
    result.shapes.push_back(std::move(entry.first));
  }
  std::sort(result.shapes.begin(), result.shapes.end(), [](const ShapeResult& a, const ShapeResult& b) {
    if (a.type != b.type) return a.type < b.type;
    return a.shape < b.shape;
  });
  return result;
}

}  // namespace sftkit
