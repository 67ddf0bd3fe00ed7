#pragma once

// Batch front end: one JSON input document (format_version 1), commands that
// dispatch to the computational modules, and line-oriented reports.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sftkit/asymptotic_spectrum.hpp"
#include "sftkit/buildings.hpp"
#include "sftkit/curves.hpp"
#include "sftkit/errors.hpp"
#include "sftkit/orbits.hpp"

namespace sftkit {

struct CurveRecord {
  PuncturedCurve curve;
  nlohmann::json expect;  // null when absent
};

struct BuildingRecord {
  Building building;
  std::optional<int> total_cn;
  nlohmann::json expect;
};

struct LoopRecord {
  std::string name;
  MatrixLoop loop;
  double window = 40.0;
  nlohmann::json expect;
};

struct InputDocument {
  std::vector<OrbitClass> orbits;
  std::vector<CurveRecord> curves;
  std::vector<BuildingRecord> buildings;
  std::vector<LoopRecord> loops;

  const OrbitClass* find_orbit(std::string_view name) const;
  const CurveRecord* find_curve(std::string_view name) const;
};

// ParseError for malformed text or schema violations (message names the JSON
// path), ReferenceError for unresolved names, InvalidInput for records that
// fail their module invariants.
InputDocument parse_document(std::string_view text);
InputDocument load_document(const std::string& path);

// Ordered key/value facts for one record; `error` is set when a computation
// raised an invariant violation.
struct Facts {
  std::vector<std::pair<std::string, std::string>> values;
  std::optional<ErrorKind> error;
  std::string error_message;
  bool violated = false;  // a check ran and failed without raising

  std::string line(std::string_view head) const;
};

Facts curve_facts(const PuncturedCurve& curve);
Facts building_facts(const BuildingRecord& record);
Facts loop_facts(const LoopRecord& record, std::vector<EigenRecord>* records = nullptr);

// Keys of `expect` that disagree with `facts`, as "key: expected X, got Y".
std::vector<std::string> expectation_mismatches(const Facts& facts, const nlohmann::json& expect);

std::string format_double(double x);

// Full command line without the program name. Returns the exit code:
// 0 success, 1 invariant or budget violation, 2 input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sftkit
