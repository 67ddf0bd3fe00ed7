#include "sftkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "sftkit/errors.hpp"
#include "sftkit/reeb_dynamics.hpp"

#ifndef SFTKIT_FIXTURE_DIR
#define SFTKIT_FIXTURE_DIR "fixtures"
#endif

namespace sftkit {

using json = nlohmann::json;

namespace {

// ---- document parsing -------------------------------------------------------

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  fail(ErrorKind::ParseError, (path.empty() ? "/" : path) + ": " + msg);
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) bad(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) bad(path + "/" + it.key(), "unknown key");
  }
}

const json& req(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) bad(path + "/" + key, "missing required key");
  return j.at(key);
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < -1'000'000'000LL || v > 1'000'000'000LL) bad(path, "integer out of range");
  return static_cast<int>(v);
}

double as_num(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_str(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

std::optional<int> opt_int(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  return as_int(j.at(key), path + "/" + key);
}

std::optional<double> opt_num(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  return as_num(j.at(key), path + "/" + key);
}

std::optional<bool> opt_bool(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  return as_bool(j.at(key), path + "/" + key);
}

json opt_expect(const json& j, const std::string& path) {
  if (!j.contains("expect")) return nullptr;
  if (!j.at("expect").is_object()) bad(path + "/expect", "expected an object");
  return j.at("expect");
}

Eigen::Matrix2d as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) bad(path, "expected a 2x2 matrix");
  Eigen::Matrix2d m;
  for (int r = 0; r < 2; ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != 2) bad(rp, "expected a row of 2 numbers");
    for (int c = 0; c < 2; ++c) m(r, c) = as_num(j[r][c], rp + "/" + std::to_string(c));
  }
  return m;
}

OrbitClass parse_orbit(const json& j, const std::string& path) {
  allow_keys(j, path, {"name", "type", "theta", "cz", "period", "morse_bott"});
  const std::string name = as_str(req(j, path, "name"), path + "/name");
  const std::string type = as_str(req(j, path, "type"), path + "/type");
  const auto period = opt_num(j, path, "period");
  if (type == "elliptic") {
    if (j.contains("cz")) bad(path + "/cz", "elliptic orbits take theta");
    const double theta = as_num(req(j, path, "theta"), path + "/theta");
    return OrbitClass::elliptic(name, theta, period, opt_bool(j, path, "morse_bott").value_or(false));
  }
  if (type == "hyperbolic") {
    if (j.contains("theta") || j.contains("morse_bott")) bad(path, "hyperbolic orbits take cz only");
    return OrbitClass::hyperbolic(name, as_int(req(j, path, "cz"), path + "/cz"), period);
  }
  bad(path + "/type", "expected \"elliptic\" or \"hyperbolic\"");
}

class Resolver {
 public:
  explicit Resolver(const InputDocument& doc) : doc_(doc) {}

  const OrbitClass& orbit(const json& j, const std::string& path) const {
    const std::string name = as_str(j, path);
    const OrbitClass* o = doc_.find_orbit(name);
    if (!o) fail(ErrorKind::ReferenceError, path + ": undefined orbit '" + name + "'");
    return *o;
  }

  const PuncturedCurve& curve(const json& j, const std::string& path) const {
    const std::string name = as_str(j, path);
    const CurveRecord* c = doc_.find_curve(name);
    if (!c) fail(ErrorKind::ReferenceError, path + ": undefined curve '" + name + "'");
    return c->curve;
  }

  OrbitInstance instance(const json& j, const std::string& path) const {
    const auto m = opt_int(j, path, "multiplicity").value_or(1);
    if (m < 1) bad(path + "/multiplicity", "must be >= 1");
    return OrbitInstance(orbit(req(j, path, "orbit"), path + "/orbit"), m);
  }

 private:
  const InputDocument& doc_;
};

Puncture parse_puncture(const json& j, const std::string& path, const Resolver& res) {
  allow_keys(j, path, {"sign", "orbit", "multiplicity", "morse_bott", "wind_infinity", "spectral"});
  const std::string sign = as_str(req(j, path, "sign"), path + "/sign");
  Sign s;
  if (sign == "+" || sign == "positive") {
    s = Sign::Positive;
  } else if (sign == "-" || sign == "negative") {
    s = Sign::Negative;
  } else {
    bad(path + "/sign", "expected \"+\" or \"-\"");
  }
  Puncture p = Puncture::make(s, res.instance(j, path), opt_bool(j, path, "morse_bott").value_or(false),
                              opt_int(j, path, "wind_infinity"));
  if (j.contains("spectral")) {
    const std::string sp = path + "/spectral";
    const json& d = j.at("spectral");
    allow_keys(d, sp, {"alpha_minus", "alpha_plus", "sigma_minus", "sigma_plus"});
    p.spectral = SpectralData::from_windings(as_int(req(d, sp, "alpha_minus"), sp + "/alpha_minus"),
                                             as_int(req(d, sp, "alpha_plus"), sp + "/alpha_plus"),
                                             opt_int(d, sp, "sigma_minus").value_or(1),
                                             opt_int(d, sp, "sigma_plus").value_or(1));
  }
  return p;
}

CurveRecord parse_curve(const json& j, const std::string& path, const Resolver& res) {
  allow_keys(j, path, {"name", "n", "genus", "c1_rel", "punctures", "somewhere_injective", "embedded",
                       "immersed", "delta", "delta_infinity", "cover_of", "trivial_cylinder", "expect"});
  CurveRecord rec;
  PuncturedCurve& c = rec.curve;
  c.name = as_str(req(j, path, "name"), path + "/name");
  if (j.contains("trivial_cylinder")) {
    const std::string tp = path + "/trivial_cylinder";
    for (const char* k : {"n", "genus", "c1_rel", "punctures", "somewhere_injective", "embedded", "immersed", "delta",
                          "delta_infinity", "cover_of"}) {
      if (j.contains(k)) bad(path + "/" + k, "not allowed on a trivial cylinder");
    }
    allow_keys(j.at("trivial_cylinder"), tp, {"orbit", "multiplicity"});
    c = trivial_cylinder(res.instance(j.at("trivial_cylinder"), tp), c.name);
    rec.expect = opt_expect(j, path);
    return rec;
  }
  c.half_dim_n = opt_int(j, path, "n").value_or(2);
  c.genus = opt_int(j, path, "genus").value_or(0);
  c.c1_rel = as_int(req(j, path, "c1_rel"), path + "/c1_rel");
  c.somewhere_injective = opt_bool(j, path, "somewhere_injective").value_or(true);
  c.embedded = opt_bool(j, path, "embedded").value_or(false);
  c.immersed = opt_bool(j, path, "immersed");
  c.delta = opt_int(j, path, "delta");
  c.delta_infinity = opt_int(j, path, "delta_infinity");
  const std::string pp = path + "/punctures";
  const json& ps = as_array(req(j, path, "punctures"), pp);
  for (size_t i = 0; i < ps.size(); ++i) {
    c.punctures.push_back(parse_puncture(ps[i], pp + "/" + std::to_string(i), res));
  }
  if (j.contains("cover_of")) {
    const std::string cp = path + "/cover_of";
    const json& cv = j.at("cover_of");
    allow_keys(cv, cp, {"curve", "degree", "branch_count"});
    CoverData cd;
    cd.underlying = std::make_shared<const PuncturedCurve>(res.curve(req(cv, cp, "curve"), cp + "/curve"));
    cd.degree = as_int(req(cv, cp, "degree"), cp + "/degree");
    cd.branch_count = opt_int(cv, cp, "branch_count");
    c.cover_of = cd;
  }
  rec.expect = opt_expect(j, path);
  c.validate();
  return rec;
}

BuildingRecord parse_building(const json& j, const std::string& path, const Resolver& res) {
  allow_keys(j, path, {"name", "levels", "breakings", "total_cn", "expect"});
  BuildingRecord rec;
  Building& b = rec.building;
  b.name = as_str(req(j, path, "name"), path + "/name");
  rec.total_cn = opt_int(j, path, "total_cn");
  std::set<std::string> ids;
  const std::string lp = path + "/levels";
  const json& levels = as_array(req(j, path, "levels"), lp);
  for (size_t l = 0; l < levels.size(); ++l) {
    const std::string lpath = lp + "/" + std::to_string(l);
    const json& level = as_array(levels[l], lpath);
    std::vector<Component> comps;
    for (size_t k = 0; k < level.size(); ++k) {
      const std::string cp = lpath + "/" + std::to_string(k);
      const json& cj = level[k];
      allow_keys(cj, cp, {"id", "curve", "trivial"});
      const std::string id = as_str(req(cj, cp, "id"), cp + "/id");
      if (!ids.insert(id).second) bad(cp + "/id", "duplicate component id '" + id + "'");
      if (cj.contains("curve") == cj.contains("trivial")) bad(cp, "give exactly one of curve, trivial");
      if (cj.contains("curve")) {
        comps.push_back(Component{id, res.curve(cj.at("curve"), cp + "/curve")});
      } else {
        const std::string tp = cp + "/trivial";
        allow_keys(cj.at("trivial"), tp, {"orbit", "multiplicity"});
        comps.push_back(Component{id, trivial_cylinder(res.instance(cj.at("trivial"), tp), id)});
      }
    }
    b.levels.push_back(std::move(comps));
  }
  const std::string bp = path + "/breakings";
  const json& brs = as_array(req(j, path, "breakings"), bp);
  for (size_t i = 0; i < brs.size(); ++i) {
    const std::string p = bp + "/" + std::to_string(i);
    const json& bj = brs[i];
    allow_keys(bj, p, {"upper", "upper_end", "lower", "orbit", "multiplicity", "decoration"});
    const std::string upper = as_str(req(bj, p, "upper"), p + "/upper");
    const std::string lower = as_str(req(bj, p, "lower"), p + "/lower");
    if (!ids.count(upper)) fail(ErrorKind::ReferenceError, p + "/upper: undefined component '" + upper + "'");
    if (!ids.count(lower)) fail(ErrorKind::ReferenceError, p + "/lower: undefined component '" + lower + "'");
    b.breakings.push_back(Breaking{upper, opt_int(bj, p, "upper_end").value_or(-1), lower,
                                   res.instance(bj, p), opt_int(bj, p, "decoration").value_or(0)});
  }
  resolve_breaking_ends(b);
  rec.expect = opt_expect(j, path);
  return rec;
}

LoopRecord parse_loop(const json& j, const std::string& path) {
  allow_keys(j, path, {"name", "kind", "c", "a", "b", "matrix", "samples", "grid", "multiplicity", "window",
                       "expect"});
  const std::string name = as_str(req(j, path, "name"), path + "/name");
  const std::string kind = as_str(req(j, path, "kind"), path + "/kind");
  const int m = opt_int(j, path, "multiplicity").value_or(1);
  const int grid = opt_int(j, path, "grid").value_or(256);
  const double window = opt_num(j, path, "window").value_or(40.0);
  if (!(window > 0.0)) bad(path + "/window", "must be positive");
  auto make = [&]() -> MatrixLoop {
    if (kind == "scalar") return MatrixLoop::scalar(as_num(req(j, path, "c"), path + "/c"), grid, m);
    if (kind == "diagonal") {
      return MatrixLoop::diagonal(as_num(req(j, path, "a"), path + "/a"), as_num(req(j, path, "b"), path + "/b"),
                                  grid, m);
    }
    if (kind == "constant") return MatrixLoop::constant(as_matrix(req(j, path, "matrix"), path + "/matrix"), grid, m);
    if (kind == "sampled") {
      if (j.contains("grid")) bad(path + "/grid", "sampled loops take their grid from samples");
      const std::string sp = path + "/samples";
      const json& s = as_array(req(j, path, "samples"), sp);
      std::vector<Eigen::Matrix2d> samples;
      for (size_t i = 0; i < s.size(); ++i) samples.push_back(as_matrix(s[i], sp + "/" + std::to_string(i)));
      return MatrixLoop(std::move(samples), m);
    }
    bad(path + "/kind", "expected scalar, diagonal, constant or sampled");
  };
  return LoopRecord{name, make(), window, opt_expect(j, path)};
}

template <class T, class F>
void check_unique(const std::vector<T>& items, F name_of, const std::string& path) {
  std::set<std::string> seen;
  for (size_t i = 0; i < items.size(); ++i) {
    if (!seen.insert(name_of(items[i])).second) {
      bad(path + "/" + std::to_string(i) + "/name", "duplicate name '" + name_of(items[i]) + "'");
    }
  }
}

}  // namespace

const OrbitClass* InputDocument::find_orbit(std::string_view name) const {
  for (const auto& o : orbits) {
    if (o.name() == name) return &o;
  }
  return nullptr;
}

const CurveRecord* InputDocument::find_curve(std::string_view name) const {
  for (const auto& c : curves) {
    if (c.curve.name == name) return &c;
  }
  return nullptr;
}

InputDocument parse_document(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, false);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, std::string("malformed document: ") + e.what());
  }
  allow_keys(root, "", {"format_version", "description", "expect_error", "orbits", "curves", "buildings", "loops"});
  if (as_int(req(root, "", "format_version"), "/format_version") != 1) {
    bad("/format_version", "unsupported version (expected 1)");
  }
  InputDocument doc;
  const Resolver res(doc);
  auto section = [&](const char* key) -> const json& {
    static const json empty = json::array();
    return root.contains(key) ? as_array(root.at(key), std::string("/") + key) : empty;
  };
  const json& orbits = section("orbits");
  for (size_t i = 0; i < orbits.size(); ++i) {
    doc.orbits.push_back(parse_orbit(orbits[i], "/orbits/" + std::to_string(i)));
    check_unique(doc.orbits, [](const OrbitClass& o) { return o.name(); }, "/orbits");
  }
  // Curves may only refer back to earlier curves (cover_of).
  const json& curves = section("curves");
  for (size_t i = 0; i < curves.size(); ++i) {
    doc.curves.push_back(parse_curve(curves[i], "/curves/" + std::to_string(i), res));
    check_unique(doc.curves, [](const CurveRecord& c) { return c.curve.name; }, "/curves");
  }
  const json& buildings = section("buildings");
  for (size_t i = 0; i < buildings.size(); ++i) {
    doc.buildings.push_back(parse_building(buildings[i], "/buildings/" + std::to_string(i), res));
    check_unique(doc.buildings, [](const BuildingRecord& b) { return b.building.name; }, "/buildings");
  }
  const json& loops = section("loops");
  for (size_t i = 0; i < loops.size(); ++i) {
    doc.loops.push_back(parse_loop(loops[i], "/loops/" + std::to_string(i)));
    check_unique(doc.loops, [](const LoopRecord& l) { return l.name; }, "/loops");
  }
  return doc;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

InputDocument load_document(const std::string& path) { return parse_document(read_file(path)); }

// ---- facts ------------------------------------------------------------------

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string Facts::line(std::string_view head) const {
  std::string s(head);
  for (const auto& [k, v] : values) s += " " + k + "=" + v;
  if (error) s += " error=" + std::string(to_string(*error));
  return s;
}

namespace {

std::string b2s(bool b) { return b ? "true" : "false"; }

class FactBuilder {
 public:
  explicit FactBuilder(Facts& f) : f_(f) {}

  void put(std::string key, std::string value) { f_.values.emplace_back(std::move(key), std::move(value)); }
  void put(std::string key, int value) { put(std::move(key), std::to_string(value)); }
  void put(std::string key, bool value) { put(std::move(key), b2s(value)); }

  // Runs fn; on an Error records it and returns false. Kinds in `absent`
  // mean "not available" and are swallowed silently.
  template <class F>
  bool attempt(F&& fn, std::initializer_list<ErrorKind> absent = {}) {
    if (f_.error) return false;
    try {
      fn();
      return true;
    } catch (const Error& e) {
      if (std::find(absent.begin(), absent.end(), e.kind()) != absent.end()) return false;
      f_.error = e.kind();
      f_.error_message = e.what();
      return false;
    }
  }

 private:
  Facts& f_;
};

bool has_all_windings(const PuncturedCurve& c) {
  return std::all_of(c.punctures.begin(), c.punctures.end(), [](const Puncture& p) { return p.wind_infinity; });
}

}  // namespace

Facts curve_facts(const PuncturedCurve& curve) {
  Facts f;
  FactBuilder fb(f);
  int ind = 0;
  if (!fb.attempt([&] { ind = fredholm_index(curve); })) return f;
  fb.put("index", ind);
  if (curve.half_dim_n != 2) return f;
  fb.attempt([&] {
    const int cn = normal_chern(curve);
    fb.put("normal_chern", cn);
    fb.put("even_ends", even_puncture_count(curve));
  });
  const bool covers_trivial = curve.cover_of && curve.cover_of->underlying && curve.cover_of->underlying->trivial_cylinder;
  if (has_all_windings(curve) && !curve.trivial_cylinder && !covers_trivial) {
    fb.attempt([&] {
      const DefectReport d = asymptotic_defect_and_windpi(curve);
      fb.put("d0", d.d0);
      fb.put("wind_pi", d.wind_pi);
    });
  }
  bool nice = false;
  if (curve.genus == 0 && curve.somewhere_injective && !curve.trivial_cylinder) {
    fb.attempt(
        [&] {
          const int self = self_intersection(curve);
          const NicenessReport n = is_nicely_embedded(curve);
          fb.put("self_intersection", self);
          fb.put("nice", n.nice);
          fb.put("auto_transversal", n.auto_transversal);
          nice = n.nice;
        },
        {ErrorKind::MissingSingularityData});
  }
  if (curve.cover_of) {
    fb.attempt([&] {
      const CoverReport r = cover_index_check(curve);
      fb.put("cover_branch", std::string(r.branch == CoverBranch::HyperbolicEnds ? "hyperbolic" : "trivial"));
      fb.put("cover_index", r.index);
      fb.put("cover_bound", r.bound);
      fb.put("branch_points", r.branch_points);
      fb.put("cover_equality", r.equality);
      fb.put("cover_pass", r.pass);
      if (!r.pass) f.violated = true;
    });
  }
  const bool plane = curve.genus == 0 && curve.punctures.size() == 1 && curve.punctures[0].positive() &&
                     curve.punctures[0].instance.multiplicity() == 1;
  if (plane && nice && curve.c1_rel == 0 && (ind == 1 || ind == 2)) {
    fb.attempt([&] {
      const SelfLinkingReport s = self_linking_of_plane(curve);
      fb.put("cz_disk", s.cz_disk);
      fb.put("sl", s.sl);
    });
  }
  return f;
}

Facts building_facts(const BuildingRecord& rec) {
  Facts f;
  FactBuilder fb(f);
  const Building& b = rec.building;
  Classification c;
  if (!fb.attempt([&] { c = classify_building(b); })) return f;
  fb.put("type", std::string(to_string(c.type)));
  fb.put("shape", c.shape.empty() ? std::string("-") : c.shape);
  if (c.type == BuildingType::Rejected) {
    fb.put("reason", json(c.reason).dump());
    return f;
  }
  fb.attempt([&] {
    const CnBudgetReport r = cn_budget(b, rec.total_cn.value_or(0));
    fb.put("lemma_case", r.lemma_case);
    fb.put("cn_total", r.total);
    fb.put("intersection_bound", intersection_lower_bound(b, adjunction_lower_bounds(b)));
  });
  return f;
}

Facts loop_facts(const LoopRecord& rec, std::vector<EigenRecord>* out) {
  Facts f;
  FactBuilder fb(f);
  std::vector<EigenRecord> records;
  if (!fb.attempt([&] { records = solve_spectrum(rec.loop, rec.window); })) return f;
  fb.put("eigenvalues", static_cast<int>(records.size()));
  const AxiomReport ax = verify_spectral_axioms(records);
  fb.put("monotone", ax.monotone);
  fb.put("two_to_one", ax.two_to_one);
  if (!ax.passed()) f.violated = true;
  fb.attempt([&] {
    const SpectralData d = extremal_data(records, rec.loop.multiplicity());
    fb.put("alpha_minus", d.alpha_minus);
    fb.put("alpha_plus", d.alpha_plus);
    fb.put("cz", d.cz);
    fb.put("parity", d.parity);
    fb.put("sigma_minus", d.sigma_minus);
    fb.put("sigma_plus", d.sigma_plus);
  });
  if (out) *out = std::move(records);
  return f;
}

std::vector<std::string> expectation_mismatches(const Facts& facts, const json& expect) {
  std::vector<std::string> out;
  if (expect.is_null()) return out;
  auto render = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  for (auto it = expect.begin(); it != expect.end(); ++it) {
    std::string got = "<absent>";
    if (it.key() == "error") {
      if (facts.error) got = std::string(to_string(*facts.error));
    } else {
      for (const auto& [k, v] : facts.values) {
        if (k == it.key()) got = v;
      }
    }
    const std::string want = render(it.value());
    if (got != want) out.push_back(it.key() + ": expected " + want + ", got " + got);
  }
  if (facts.error && !expect.contains("error")) {
    out.push_back("error: expected none, got " + std::string(to_string(*facts.error)));
  }
  return out;
}

// ---- commands ---------------------------------------------------------------

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

int exit_for(const Error& e) { return is_input_error(e.kind()) ? kExitInput : kExitViolation; }

struct Status {
  int code = kExitOk;
  void raise(int c) { code = std::max(code, c); }
};

// Reports a record's facts and any expectation mismatches.
void report_record(std::string_view head, const Facts& f, const json& expect, std::ostream& out, std::ostream& err,
                   Status& st) {
  out << f.line(head) << "\n";
  const auto mism = expectation_mismatches(f, expect);
  for (const auto& m : mism) out << "mismatch " << head << " " << m << "\n";
  if (f.error) {
    err << f.error_message << "\n";
    st.raise(is_input_error(*f.error) ? kExitInput : kExitViolation);
  }
  if (f.violated || !mism.empty()) st.raise(kExitViolation);
}

int read_threads() {
  const char* env = std::getenv("SFTKIT_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 1024) fail(ErrorKind::InvalidInput, "SFTKIT_THREADS must be an integer in [0, 1024]");
  return static_cast<int>(v);
}

std::string complex_pair(std::complex<double> a, std::complex<double> b) {
  return "[" + format_double(a.real()) + "," + format_double(a.imag()) + "," + format_double(b.real()) + "," +
         format_double(b.imag()) + "]";
}

template <class R, class F>
const R* select(const std::vector<R>& items, const std::string& name, F name_of, const char* what) {
  for (const auto& r : items) {
    if (name_of(r) == name) return &r;
  }
  fail(ErrorKind::ReferenceError, std::string("no ") + what + " named '" + name + "'");
}

int cmd_invariants(const std::string& file, const std::string& only, std::ostream& out, std::ostream& err) {
  const InputDocument doc = load_document(file);
  Status st;
  if (!only.empty()) select(doc.curves, only, [](const CurveRecord& c) { return c.curve.name; }, "curve");
  for (const auto& c : doc.curves) {
    if (!only.empty() && c.curve.name != only) continue;
    report_record("curve=" + c.curve.name, curve_facts(c.curve), c.expect, out, err, st);
  }
  return st.code;
}

int cmd_classify(const std::string& file, const std::string& only, std::ostream& out, std::ostream& err) {
  const InputDocument doc = load_document(file);
  Status st;
  if (!only.empty()) select(doc.buildings, only, [](const BuildingRecord& b) { return b.building.name; }, "building");
  for (const auto& b : doc.buildings) {
    if (!only.empty() && b.building.name != only) continue;
    const Facts f = building_facts(b);
    report_record("building=" + b.building.name, f, b.expect, out, err, st);
    const bool rejected = !f.values.empty() && f.values[0].second == "Rejected";
    if (rejected && !b.expect.is_object()) st.raise(kExitViolation);
  }
  return st.code;
}

struct EnumerateFlags {
  int total_index = 2;
  EnumerationOptions options;
  bool variants = false;
};

int cmd_enumerate(const EnumerateFlags& fl, std::ostream& out) {
  EnumerationOptions opt = fl.options;
  opt.total_index = fl.total_index;
  opt.threads = read_threads();
  const EnumerationResult r = enumerate_degenerations(opt);
  int code = kExitOk;
  for (const auto& s : r.shapes) {
    out << "shape=" << s.shape << " type=" << to_string(s.type) << " levels=" << s.levels
        << " variants=" << s.variants.size() << "\n";
    if (fl.variants) {
      for (const auto& v : s.variants) out << "variant shape=" << s.shape << " " << v << "\n";
    }
    if (s.type == BuildingType::Rejected) code = kExitViolation;
  }
  out << "total_index=" << opt.total_index << " shapes=" << r.shapes.size() << " candidates=" << r.candidates
      << " admissible=" << r.admissible << "\n";
  return code;
}

struct AdjunctionFlags {
  std::optional<double> theta;
  std::optional<int> cz;
  int multiplicity = 1;
  int delta_plus = 0;
  int delta_minus = 0;
};

int cmd_local_adjunction(const AdjunctionFlags& fl, std::ostream& out) {
  if (fl.theta.has_value() == fl.cz.has_value()) {
    fail(ErrorKind::InvalidInput, "give exactly one of --theta (elliptic) or --cz (hyperbolic)");
  }
  const OrbitClass orbit = fl.theta ? OrbitClass::elliptic("gamma", *fl.theta) : OrbitClass::hyperbolic("gamma", *fl.cz);
  const OrbitInstance inst(orbit, fl.multiplicity);
  const SpectralData d = spectral_data(inst);
  const LocalAdjunction la = local_adjunction(inst, fl.delta_plus, fl.delta_minus);
  out << "orbit=" << (fl.theta ? "elliptic theta=" + format_double(*fl.theta) : "hyperbolic cz=" + std::to_string(*fl.cz))
      << " multiplicity=" << fl.multiplicity << " cz=" << d.cz << " parity=" << d.parity
      << " sigma_minus=" << d.sigma_minus << " sigma_plus=" << d.sigma_plus << " delta=" << la.delta
      << " sigma_plus_term=" << la.sigma_plus_term << " sigma_minus_term=" << la.sigma_minus_term
      << " parity_term=" << la.parity_term << " correction=" << la.correction()
      << " breaking=" << to_string(classify_embedded_breaking(inst)) << " decorations=" << decoration_count(inst)
      << "\n";
  return kExitOk;
}

void print_spectrum(const std::string& name, const LoopRecord& rec, const std::vector<EigenRecord>& records,
                    std::ostream& out) {
  out << "loop=" << name << " multiplicity=" << rec.loop.multiplicity() << " grid=" << rec.loop.size()
      << " window=" << format_double(rec.window) << "\n";
  for (const auto& e : records) {
    out << "eigen loop=" << name << " lambda=" << format_double(e.eigenvalue) << " winding=" << e.winding
        << " cover=" << e.cover_multiplicity << "\n";
  }
}

int cmd_spectrum(const std::string& file, const std::string& only, std::ostream& out, std::ostream& err) {
  const InputDocument doc = load_document(file);
  Status st;
  if (!only.empty()) select(doc.loops, only, [](const LoopRecord& l) { return l.name; }, "loop");
  for (const auto& l : doc.loops) {
    if (!only.empty() && l.name != only) continue;
    std::vector<EigenRecord> records;
    const Facts f = loop_facts(l, &records);
    print_spectrum(l.name, l, records, out);
    report_record("spectrum loop=" + l.name, f, l.expect, out, err, st);
  }
  return st.code;
}

struct EllipsoidFlags {
  double a2 = 1.0;
  double b2 = 1.0;
  std::string lens;
  int cover = 1;
  int grid = 32;
  double period_cap = 0.0;
  double tol = 1e-8;
};

LensParams parse_lens(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) fail(ErrorKind::InvalidInput, "--lens expects p,q");
  try {
    size_t used = 0;
    LensParams l{std::stoi(s.substr(0, comma), &used), 1};
    if (used != comma) throw std::invalid_argument(s);
    const std::string qs = s.substr(comma + 1);
    l.q = std::stoi(qs, &used);
    if (used != qs.size()) throw std::invalid_argument(s);
    return l;
  } catch (const std::logic_error&) {
    fail(ErrorKind::InvalidInput, "--lens expects p,q with integers, got '" + s + "'");
  }
}

int cmd_ellipsoid(const EllipsoidFlags& fl, std::ostream& out) {
  EllipsoidParams p{fl.a2, fl.b2, false};
  p.validate();
  p.irrational_ratio = !nearest_resonance(p.a_sq / p.b_sq).has_value();
  if (fl.cover < 1) fail(ErrorKind::InvalidInput, "--cover must be >= 1");
  std::optional<LensParams> lens;
  if (!fl.lens.empty()) {
    lens = parse_lens(fl.lens);
    lens->validate();
  }
  OrbitSearchOptions opt;
  opt.grid = fl.grid;
  opt.period_cap = fl.period_cap;
  opt.tol = fl.tol;
  opt.threads = read_threads();
  const double cap = opt.period_cap > 0.0 ? opt.period_cap : 4.0 * std::numbers::pi * std::max(p.a_sq, p.b_sq);
  out << "ellipsoid a_sq=" << format_double(p.a_sq) << " b_sq=" << format_double(p.b_sq)
      << " irrational=" << b2s(p.irrational_ratio) << " period_cap=" << format_double(cap) << " grid=" << opt.grid
      << "\n";
  const auto orbits = find_closed_orbits(p, opt);
  for (size_t i = 0; i < orbits.size(); ++i) {
    const auto& o = orbits[i];
    out << "orbit index=" << i + 1 << " initial=" << complex_pair(o.initial_point(0), o.initial_point(1))
        << " period=" << format_double(o.period)
        << " multipliers=" << complex_pair(o.floquet_multipliers[0], o.floquet_multipliers[1])
        << " rotation=" << format_double(o.rotation_number) << " cz_disk=" << o.cz_disk
        << " simple=" << b2s(o.simple) << " sl=" << self_linking_numeric(o, p) << "\n";
  }
  for (size_t i = 0; i < orbits.size(); ++i) {
    for (int k = 1; k <= fl.cover; ++k) {
      const FloquetReport r = floquet_and_cz(orbits[i], p, k);
      out << "cover orbit=" << i + 1 << " k=" << k << " multipliers=" << complex_pair(r.multipliers[0], r.multipliers[1])
          << " disk_rotation=" << format_double(r.disk_rotation) << " cz_disk=" << r.cz_disk << "\n";
    }
  }
  if (lens) {
    const LensReport r = lens_quotient_report(p, *lens, orbits);
    out << "lens p=" << lens->p << " q=" << lens->q << " invariance_residual=" << format_double(r.invariance_residual)
        << " noncontractible=" << b2s(r.noncontractible) << " justification=" << json(r.justification).dump() << "\n";
    for (size_t i = 0; i < r.orbits.size(); ++i) {
      out << "descended orbit=" << i + 1 << " period=" << format_double(r.orbits[i].period)
          << " group_power=" << r.orbits[i].group_power << "\n";
    }
  }
  return kExitOk;
}

// ---- verify -----------------------------------------------------------------

class Verifier {
 public:
  Verifier(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  void check(const std::string& label, const std::vector<std::string>& problems) {
    if (problems.empty()) {
      ++passed_;
      out_ << "PASS " << label << "\n";
    } else {
      ++failed_;
      for (const auto& p : problems) out_ << "FAIL " << label << " " << p << "\n";
    }
  }

  template <class F>
  void guarded(const std::string& label, F&& fn) {
    try {
      check(label, fn());
    } catch (const Error& e) {
      err_ << e.what() << "\n";
      check(label, {"raised " + std::string(to_string(e.kind()))});
    }
  }

  void fixture(const std::filesystem::path& path) {
    const std::string base = path.filename().string();
    std::string text;
    json raw;
    try {
      text = read_file(path.string());
      raw = json::parse(text, nullptr, false);
    } catch (const Error& e) {
      check(base, {e.what()});
      return;
    }
    if (raw.is_object() && raw.contains("expect_error")) {
      const std::string want = raw["expect_error"].is_string() ? raw["expect_error"].get<std::string>() : "?";
      std::string got = "none";
      try {
        parse_document(text);
      } catch (const Error& e) {
        got = std::string(to_string(e.kind()));
      }
      check(base + " load", got == want ? std::vector<std::string>{}
                                        : std::vector<std::string>{"expected " + want + ", got " + got});
      return;
    }
    InputDocument doc;
    try {
      doc = parse_document(text);
    } catch (const Error& e) {
      err_ << e.what() << "\n";
      check(base + " load", {"raised " + std::string(to_string(e.kind()))});
      return;
    }
    for (const auto& c : doc.curves) {
      if (c.expect.is_null()) continue;
      guarded(base + " curve=" + c.curve.name, [&] { return expectation_mismatches(curve_facts(c.curve), c.expect); });
    }
    for (const auto& b : doc.buildings) {
      if (b.expect.is_null()) continue;
      guarded(base + " building=" + b.building.name,
              [&] { return expectation_mismatches(building_facts(b), b.expect); });
    }
    for (const auto& l : doc.loops) {
      if (l.expect.is_null()) continue;
      guarded(base + " loop=" + l.name, [&] {
        const Facts f = loop_facts(l);
        auto m = expectation_mismatches(f, l.expect);
        if (f.violated) m.push_back("spectral axioms failed");
        return m;
      });
    }
  }

  void builtins(int threads) {
    for (int total : {1, 2}) {
      guarded("builtin enumerate total_index=" + std::to_string(total), [&] {
        EnumerationOptions opt;
        opt.total_index = total;
        opt.threads = threads;
        std::set<std::pair<std::string, std::string>> found, expected;
        for (const auto& s : enumerate_degenerations(opt).shapes) found.emplace(to_string(s.type), s.shape);
        for (const auto& t : theorem_templates()) {
          if (t.total_index == total) expected.emplace(to_string(t.type), t.shape);
        }
        std::vector<std::string> problems;
        for (const auto& e : expected) {
          if (!found.count(e)) problems.push_back("missing " + e.first + " " + e.second);
        }
        for (const auto& e : found) {
          if (!expected.count(e)) problems.push_back("unexpected " + e.first + " " + e.second);
        }
        return problems;
      });
    }
    guarded("builtin templates", [] {
      std::vector<std::string> problems;
      for (const auto& t : theorem_templates()) {
        const Classification c = classify_building(template_building(t.type));
        if (c.type != t.type || c.shape != t.shape) {
          problems.push_back(std::string(to_string(t.type)) + " classified as " + std::string(to_string(c.type)));
        }
      }
      return problems;
    });
    guarded("builtin local-adjunction", [] {
      std::vector<std::string> problems;
      std::vector<OrbitClass> orbits;
      for (int i = 1; i <= 20; ++i) orbits.push_back(OrbitClass::elliptic("e", i * 0.7071067811865476 - 0.5 * i + 0.013));
      for (int cz = -5; cz <= 5; ++cz) orbits.push_back(OrbitClass::hyperbolic("h", cz));
      for (const auto& o : orbits) {
        for (int m = 1; m <= 6; ++m) {
          const OrbitInstance inst(o, m);
          const bool allowed = m == 1 || (m == 2 && o.is_hyperbolic() && o.parity() == 1);
          const bool forbidden = classify_embedded_breaking(inst) == EmbeddedBreaking::Forbidden;
          if (forbidden == allowed) problems.push_back(o.name() + "^" + std::to_string(m));
        }
      }
      return problems;
    });
    guarded("builtin ellipsoid", [&] {
      std::vector<std::string> problems;
      const EllipsoidParams p{1.0, std::sqrt(2.0), true};
      OrbitSearchOptions opt;
      opt.grid = 16;
      opt.period_cap = 10.0;
      opt.threads = threads;
      const auto orbits = find_closed_orbits(p, opt);
      if (orbits.size() != 2) return std::vector<std::string>{"found " + std::to_string(orbits.size()) + " orbits"};
      const double pi = std::numbers::pi;
      if (std::abs(orbits[0].period - pi) > 1e-9) problems.push_back("period 1 " + format_double(orbits[0].period));
      if (std::abs(orbits[1].period - pi * std::sqrt(2.0)) > 1e-9) {
        problems.push_back("period 2 " + format_double(orbits[1].period));
      }
      if (orbits[0].cz_disk != 3) problems.push_back("cz_disk " + std::to_string(orbits[0].cz_disk));
      if (self_linking_numeric(orbits[0], p) != -1) problems.push_back("self-linking");
      return problems;
    });
  }

  int finish() {
    out_ << "summary passed=" << passed_ << " failed=" << failed_ << "\n";
    return failed_ == 0 ? kExitOk : kExitViolation;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  int passed_ = 0;
  int failed_ = 0;
};

int cmd_verify(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  const std::vector<std::string> roots = paths.empty() ? std::vector<std::string>{SFTKIT_FIXTURE_DIR} : paths;
  for (const auto& r : roots) {
    if (fs::is_directory(r)) {
      for (const auto& e : fs::directory_iterator(r)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
      }
    } else if (fs::exists(r)) {
      files.emplace_back(r);
    } else {
      fail(ErrorKind::ParseError, "no such fixture path '" + r + "'");
    }
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  const int threads = read_threads();
  Verifier v(out, err);
  for (const auto& f : files) v.fixture(f);
  v.builtins(threads);
  return v.finish();
}

const std::vector<std::string> kCommands = {"invariants", "classify", "enumerate", "local-adjunction",
                                            "spectrum",   "ellipsoid", "verify"};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      std::find(kCommands.begin(), kCommands.end(), args[0]) == kCommands.end()) {
    err << to_string(ErrorKind::UnknownCommand) << ": '" << args[0] << "'\n";
    return kExitInput;
  }

  CLI::App app{"Invariants, building shapes and numerical oracles for punctured holomorphic curves", "sftkit"};
  app.require_subcommand(1);

  std::string file, only;
  auto* inv = app.add_subcommand("invariants", "integer invariants of every curve in a document");
  inv->add_option("file", file, "input document")->required();
  inv->add_option("--curve", only, "only this curve");

  auto* cls = app.add_subcommand("classify", "classify every building in a document");
  cls->add_option("file", file, "input document")->required();
  cls->add_option("--building", only, "only this building");

  EnumerateFlags ef;
  auto* en = app.add_subcommand("enumerate", "enumerate degeneration shapes of a nicely embedded plane");
  en->add_option("--total-index", ef.total_index, "Fredholm index of the plane (1 or 2)");
  en->add_option("--max-levels", ef.options.max_levels, "levels including the main level");
  en->add_option("--max-components", ef.options.max_components_per_level, "components per level");
  en->add_option("--max-multiplicity", ef.options.max_multiplicity, "breaking orbit multiplicity");
  en->add_option("--max-negative", ef.options.max_negative_punctures, "negative punctures per component");
  en->add_option("--max-candidates", ef.options.max_candidates, "search budget");
  en->add_flag("--variants", ef.variants, "list breaking-orbit variants per shape");

  AdjunctionFlags af;
  auto* la = app.add_subcommand("local-adjunction", "local adjunction terms at a breaking orbit");
  la->add_option("--theta", af.theta, "elliptic rotation number");
  la->add_option("--cz", af.cz, "hyperbolic Conley-Zehnder index");
  la->add_option("--multiplicity", af.multiplicity, "cover multiplicity");
  la->add_option("--delta-plus", af.delta_plus, "hidden double points at the upper end");
  la->add_option("--delta-minus", af.delta_minus, "hidden double points at the lower end");

  auto* sp = app.add_subcommand("spectrum", "asymptotic operator spectrum of every loop in a document");
  sp->add_option("file", file, "input document")->required();
  sp->add_option("--loop", only, "only this loop");

  EllipsoidFlags elf;
  auto* el = app.add_subcommand("ellipsoid", "closed Reeb orbits of an ellipsoid boundary");
  el->add_option("--a2", elf.a2, "a^2")->required();
  el->add_option("--b2", elf.b2, "b^2")->required();
  el->add_option("--lens", elf.lens, "quotient by G_{p,q}, as p,q");
  el->add_option("--cover", elf.cover, "report covers k = 1..cover");
  el->add_option("--grid", elf.grid, "initial-condition grid size per axis");
  el->add_option("--period-cap", elf.period_cap, "largest return time searched (default 4 pi max(a2, b2))");
  el->add_option("--tol", elf.tol, "return tolerance");

  std::vector<std::string> verify_paths;
  auto* ve = app.add_subcommand("verify", "check the bundled fixtures and built-in oracles");
  ve->add_option("paths", verify_paths, "fixture files or directories");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*inv) return cmd_invariants(file, only, out, err);
    if (*cls) return cmd_classify(file, only, out, err);
    if (*en) return cmd_enumerate(ef, out);
    if (*la) return cmd_local_adjunction(af, out);
    if (*sp) return cmd_spectrum(file, only, out, err);
    if (*el) return cmd_ellipsoid(elf, out);
    if (*ve) return cmd_verify(verify_paths, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_for(e);
  }
  return kExitInput;
}

}  // namespace sftkit
