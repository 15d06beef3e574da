#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sentinel/core/vendor_json.hpp"
#include "sentinel/models/persist.hpp"
#include "sentinel/pipeline/tasks.hpp"
#include "sentinel/tabular/scaling.hpp"
#include "sentinel/tabular/table.hpp"

namespace sentinel::pipeline {

using json = nlohmann::json;

enum class InputKind { number, toggle, choice };

inline const char* to_string(InputKind k) {
  switch (k) {
    case InputKind::number: return "number";
    case InputKind::toggle: return "toggle";
    case InputKind::choice: return "choice";
  }
  return "?";
}

/// One answer the risk form asks for. Valid answers lie in [min, max] and,
/// for choice fields, must be one of `options`.
struct FieldSpec {
  std::string name;
  std::string label;
  InputKind kind = InputKind::number;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> options;
  std::string help;
};

struct FormSchema {
  Task task = Task::cervical;
  std::vector<FieldSpec> fields;  // model feature order
};

/// Derives the form schema from the (unscaled) training features: binary
/// columns become toggles, integer columns with at most 12 distinct values
/// become choices, everything else a number bounded by the observed range.
inline FormSchema derive_schema(Task task, const tabular::Table& features, std::string_view label) {
  FormSchema schema{task, {}};
  for (std::size_t c = 0; c < features.cols(); ++c) {
    const auto& col = features.column(c);
    if (col.name == label) continue;
    FieldSpec f;
    f.name = f.label = col.name;
    std::set<double> distinct;
    bool integral = true;
    f.min = std::numeric_limits<double>::infinity();
    f.max = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < features.rows(); ++r) {
      if (!col.present[r]) continue;
      const double v = col.values[r];
      f.min = std::min(f.min, v);
      f.max = std::max(f.max, v);
      integral = integral && v == std::floor(v);
      if (distinct.size() <= 12) distinct.insert(v);
    }
    if (distinct.empty()) f.min = f.max = 0.0;
    if (features.columns()[c].kind == tabular::ColumnKind::binary) {
      f.kind = InputKind::toggle;
      f.min = 0.0;
      f.max = 1.0;
      f.options = {0.0, 1.0};
    } else if (integral && distinct.size() <= 12) {
      f.kind = InputKind::choice;
      f.options.assign(distinct.begin(), distinct.end());
    }
    f.help = "values seen in training data: " + format_exact(f.min) + " to " + format_exact(f.max);
    schema.fields.push_back(std::move(f));
  }
  return schema;
}

inline json to_json(const FormSchema& s) {
  json fields = json::array();
  for (const auto& f : s.fields) {
    json j{{"name", f.name}, {"label", f.label}, {"kind", to_string(f.kind)}, {"min", f.min},
           {"max", f.max},   {"help", f.help}};
    if (!f.options.empty()) j["options"] = f.options;
    fields.push_back(std::move(j));
  }
  return json{{"task", to_string(s.task)}, {"fields", std::move(fields)}};
}

inline FormSchema schema_from_json(const json& j) {
  FormSchema s;
  auto task = parse_task(j.at("task").get<std::string>());
  if (!task) throw ValidationError("schema names an unknown task");
  s.task = *task;
  for (const auto& jf : j.at("fields")) {
    FieldSpec f;
    f.name = jf.at("name").get<std::string>();
    f.label = jf.value("label", f.name);
    const auto kind = jf.at("kind").get<std::string>();
    f.kind = kind == "toggle" ? InputKind::toggle : kind == "choice" ? InputKind::choice : InputKind::number;
    f.min = jf.at("min").get<double>();
    f.max = jf.at("max").get<double>();
    if (jf.contains("options")) f.options = jf["options"].get<std::vector<double>>();
    f.help = jf.value("help", std::string{});
    s.fields.push_back(std::move(f));
  }
  return s;
}

inline json to_json(const tabular::StandardizationParams& p) {
  json cols = json::array();
  for (const auto& c : p.columns) cols.push_back({{"name", c.name}, {"mean", c.mean}, {"std", c.std}});
  return json{{"fitted_on", p.fitted_on}, {"columns", std::move(cols)}, {"skipped", p.skipped}};
}

inline tabular::StandardizationParams scaler_from_json(const json& j) {
  tabular::StandardizationParams p;
  p.fitted_on = j.value("fitted_on", std::string{});
  for (const auto& c : j.at("columns")) {
    tabular::ScaledColumn sc{c.at("name").get<std::string>(), c.at("mean").get<double>(), c.at("std").get<double>()};
    if (!(sc.std > 0.0)) throw ValidationError("scaler column '" + sc.name + "' has non-positive std");
    p.columns.push_back(std::move(sc));
  }
  p.skipped = j.value("skipped", std::vector<std::string>{});
  return p;
}

/// A deployable task: model file, optional scaler and the answer schema.
struct TaskBundle {
  Task task = Task::cervical;
  std::string label;
  std::uint64_t seed = 42;
  std::string model_file;  // relative to the bundle file's directory
  std::optional<tabular::StandardizationParams> scaler;
  FormSchema schema;
};

inline constexpr const char* kBundleFormat = "sentinel-bundle v1";

inline void save_bundle(const std::filesystem::path& path, const TaskBundle& b, const std::string& model_id) {
  json j{{"format", kBundleFormat},
         {"task", to_string(b.task)},
         {"label", b.label},
         {"seed", b.seed},
         {"model_file", b.model_file},
         {"model_id", model_id},
         {"scaler", b.scaler ? to_json(*b.scaler) : json(nullptr)},
         {"schema", to_json(b.schema)}};
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write bundle '" + path.string() + "'");
  os << j.dump(2) << '\n';
}

struct LoadedBundle {
  TaskBundle bundle;
  models::TrainedModel model;
  std::string model_id;
};

inline LoadedBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open bundle '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("bundle '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kBundleFormat) throw ValidationError("unsupported bundle format");
    LoadedBundle out;
    auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw ValidationError("bundle names an unknown task");
    out.bundle.task = *task;
    out.bundle.label = j.at("label").get<std::string>();
    out.bundle.seed = j.value("seed", std::uint64_t{42});
    out.bundle.model_file = j.at("model_file").get<std::string>();
    if (!j.at("scaler").is_null()) out.bundle.scaler = scaler_from_json(j["scaler"]);
    out.bundle.schema = schema_from_json(j.at("schema"));
    out.model = models::load_model_file((path.parent_path() / out.bundle.model_file).string());
    out.model_id = models::model_id(out.model);
    if (models::info(out.model).feature_names.size() != out.bundle.schema.fields.size())
      throw ValidationError("bundle schema does not match the model's features");
    return out;
  } catch (const json::exception& e) {
    throw ValidationError("bundle '" + path.string() + "' is malformed: " + e.what());
  }
}

}  // namespace sentinel::pipeline
