#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kstab/divisor_class.hpp"
#include "kstab/geometry_model.hpp"
#include "kstab/valuation.hpp"

namespace kstab {

struct Tolerances {
  double quadrature = 1e-9;
  double optimizer = 1e-8;
  double gradient = 1e-6;
};

struct VolumeTask {
  DivisorClass cls;
};
struct ZariskiTask {
  DivisorClass cls;
};
struct GammaTask {
  DivisorClass cls;
  Valuation valuation;
};
struct STask {
  DivisorClass line_bundle;
  std::vector<Valuation> support;
  std::vector<double> shifts;
};
struct NormTask {
  DivisorClass line_bundle;
  DivisorialMeasure measure;
};
struct BetaTask {
  DivisorClass line_bundle;
  DivisorialMeasure measure;
};
struct DeltaTask {
  std::vector<Valuation> candidates;
};
struct MASolveTask {
  DivisorClass line_bundle;
  DivisorialMeasure measure;
};
struct ProbeTask {
  DivisorClass line_bundle;
  std::vector<DivisorialMeasure> measures;
  double epsilon;
};
struct FiniteKTask {
  DivisorClass line_bundle;
  std::vector<Valuation> support;
  std::vector<double> shifts;
  std::vector<long> ks;
};

using TaskBody = std::variant<VolumeTask, ZariskiTask, GammaTask, STask, NormTask, BetaTask, DeltaTask,
                              MASolveTask, ProbeTask, FiniteKTask>;

struct Task {
  std::string kind;
  /// The task's params as written, echoed into the report.
  nlohmann::json inputs;
  TaskBody body;
};

struct JobConfig {
  std::string description;
  std::shared_ptr<const GeometryModel> model;
  DivisorClass line_bundle;
  std::vector<Task> tasks;
  Tolerances tolerances;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kTaskKinds[] = {"volume", "zariski", "gamma",    "S",     "norm",
                                                  "beta",   "delta",   "ma_solve", "probe", "finite_k"};

/// Builds the model and every task. Throws SchemaError with a field path for malformed input and
/// GeometryError when the data is well formed but geometrically invalid.
JobConfig parse_config(const nlohmann::json& document);

/// Reads and parses a config file; unreadable files and JSON syntax errors are SchemaErrors.
JobConfig load_config(const std::filesystem::path& path);

/// Builds a geometry model from its JSON description; `path` prefixes error locations.
std::shared_ptr<const GeometryModel> parse_model(const nlohmann::json& model, const std::string& path = "model");

/// "p/q" strings or JSON integers.
Rational parse_json_rational(const nlohmann::json& value, const std::string& path);

}  // namespace kstab
