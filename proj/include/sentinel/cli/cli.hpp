#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/pipeline/reproduce.hpp"
#include "sentinel/service/http.hpp"

namespace sentinel::cli {

namespace fs = std::filesystem;

/// Where reproduce looks for a dataset when --data is not given.
inline fs::path default_dataset_path(const pipeline::TaskProfile& p) {
  const char* dir = std::getenv("SENTINEL_DATA_DIR");
  return fs::path(dir && *dir ? dir : "data/raw") / p.dataset_file;
}

inline tabular::Table load_task_table(const pipeline::TaskProfile& p, const fs::path& path) {
  if (!fs::exists(path))
    throw IoError("dataset not found at '" + path.string() + "'. Run `sentinel fetch-info --task " +
                  pipeline::to_string(p.task) + "` for download instructions.");
  auto opts = p.load;
  opts.provenance = path.string();
  return tabular::load_csv_file(path.string(), opts);
}

/// Output target: a file when a path is given, otherwise the command's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty() || path == "-") return;
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot write '" + path + "'");
    os_ = &file_;
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

struct Options {
  bool pretty = false;
  std::uint64_t seed = 42;
  std::string task;
  std::string data;
  std::string out;
  std::string model;
  bool skip_golden = false;
  std::optional<std::size_t> train_subsample;
  bool expand_count = false;
  // hyperparameters
  std::optional<std::size_t> max_depth;
  std::size_t n_trees = 100;
  std::string loss = "hinge";
  double eta0 = 0.01;
  double l2 = 1e-4;
  std::size_t epochs = 50;
  double C = 1.0;
  std::string kernel = "rbf";
  std::optional<double> gamma;
  // predict / eval
  std::string model_path;
  std::string input;
  std::string row;
  // geo
  std::string facilities = "data/demo/facilities.csv";
  std::string gazetteer = "data/demo/gazetteer.csv";
  std::string districts = "data/demo/districts.csv";
  std::string geocoder_url;
  std::optional<double> lat;
  std::optional<double> lon;
  std::string address;
  std::size_t k = 3;
  std::string kind;
  std::string indicator = "cervical";
  std::string cases;
  std::size_t restarts = 4;
  // clean / describe
  std::string report;
  bool correlation = false;
  // serve
  std::string config;
  std::string host;
  std::optional<int> port;
  std::vector<std::string> bundles;
  std::string records;
  std::string request_log;
};

inline pipeline::Task require_task(const std::string& s) {
  auto t = pipeline::parse_task(s);
  if (!t) throw ValidationError("unknown task '" + s + "' (expected cervical or breast)", {"task"});
  return *t;
}

inline pipeline::ModelSpec model_spec(const Options& o) {
  pipeline::ModelSpec spec;
  spec.tree.max_depth = o.max_depth;
  spec.forest.n_trees = o.n_trees;
  spec.forest.tree.max_depth = o.max_depth;
  if (o.loss == "hinge") spec.sgd.loss = models::Loss::hinge;
  else if (o.loss == "logistic" || o.loss == "log") spec.sgd.loss = models::Loss::logistic;
  else throw ValidationError("unknown loss '" + o.loss + "'", {"loss"});
  spec.sgd.eta0 = o.eta0;
  spec.sgd.l2 = o.l2;
  spec.sgd.epochs = o.epochs;
  spec.svm.C = o.C;
  if (o.kernel == "rbf") spec.svm.kernel = models::KernelKind::rbf;
  else if (o.kernel == "linear") spec.svm.kernel = models::KernelKind::linear;
  else throw ValidationError("unknown kernel '" + o.kernel + "'", {"kernel"});
  spec.svm.gamma = o.gamma;
  return spec;
}

inline int cmd_run(const Options& o, bool golden, std::ostream& out, std::ostream& err) {
  const auto profile = pipeline::profile_for(require_task(o.task));
  const fs::path data = o.data.empty() ? default_dataset_path(profile) : fs::path(o.data);
  const auto raw = load_task_table(profile, data);
  pipeline::RunOptions ro;
  if (!o.model.empty()) {
    ro.model = pipeline::parse_model_kind(o.model);
    if (!ro.model) throw ValidationError("unknown model kind '" + o.model + "'", {"model"});
  }
  ro.spec = model_spec(o);
  ro.seed = o.seed;
  ro.check_golden = golden;
  ro.train_subsample = o.train_subsample;
  ro.expand_by_count = o.expand_count;
  const auto res = pipeline::run_task(profile, raw, ro);
  const fs::path dir = o.out.empty() ? fs::path("out") / pipeline::to_string(profile.task) : fs::path(o.out);
  pipeline::write_artifacts(res, profile, dir);

  const auto id = models::model_id(res.model);
  if (o.pretty) {
    out << "task            " << pipeline::to_string(res.task) << "\nseed            " << res.seed
        << "\nmodel           " << id << "\nrows in         " << res.cleaning.rows_in << "\nrows out        "
        << res.cleaning.rows_out << "\nduplicates      " << res.cleaning.duplicates_removed
        << "\nclass balance   " << format_fixed(res.class_balance, 4) << "\nfit rows        " << res.fit_rows
        << "\ntrain accuracy  " << format_fixed(res.eval.train_accuracy(), 4) << "\ntest accuracy   "
        << format_fixed(res.eval.test_accuracy(), 4) << "\nartifacts       " << dir.string() << '\n';
    for (const auto& c : res.checks) out << (c.passed ? "ok    " : "FAIL  ") << c.name << "  " << c.detail << '\n';
  } else {
    out << "key,value\n";
    csv::write_record(out, {"task", pipeline::to_string(res.task)});
    csv::write_record(out, {"seed", std::to_string(res.seed)});
    csv::write_record(out, {"model_id", id});
    csv::write_record(out, {"rows_in", std::to_string(res.cleaning.rows_in)});
    csv::write_record(out, {"rows_out", std::to_string(res.cleaning.rows_out)});
    csv::write_record(out, {"duplicates_removed", std::to_string(res.cleaning.duplicates_removed)});
    csv::write_record(out, {"class_balance", format_exact(res.class_balance)});
    csv::write_record(out, {"fit_rows", std::to_string(res.fit_rows)});
    csv::write_record(out, {"train_accuracy", format_exact(res.eval.train_accuracy())});
    csv::write_record(out, {"test_accuracy", format_exact(res.eval.test_accuracy())});
    for (const auto& c : res.checks)
      csv::write_record(out, {"check:" + c.name, std::string(c.passed ? "pass" : "fail") + " " + c.detail});
  }
  if (const auto* f = res.first_failure()) {
    err << "check failed: " << f->name << ": " << f->detail << '\n';
    return 1;
  }
  return 0;
}

inline int cmd_fetch_info(const Options& o, std::ostream& out) {
  std::vector<pipeline::Task> tasks;
  if (o.task.empty()) tasks = {pipeline::Task::cervical, pipeline::Task::breast};
  else tasks = {require_task(o.task)};
  for (auto t : tasks) {
    const auto p = pipeline::profile_for(t);
    out << pipeline::to_string(t) << ": " << p.source_note << "\n  expected at: " << default_dataset_path(p).string()
        << " (or pass --data, or set SENTINEL_DATA_DIR)\n";
  }
  return 0;
}

/// A model file or a bundle; bundles carry the scaler and schema.
struct LoadedModel {
  models::TrainedModel model;
  std::optional<pipeline::LoadedBundle> bundle;
};

inline LoadedModel load_any_model(const std::string& path) {
  if (fs::path(path).extension() == ".json") {
    auto b = pipeline::load_bundle(path);
    return {b.model, std::move(b)};
  }
  return {models::load_model_file(path), std::nullopt};
}

inline std::vector<std::vector<double>> feature_rows(const tabular::Table& t, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(t.require_column(n));
  std::vector<std::vector<double>> rows(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (auto c : cols) {
      const auto v = t.cell(r, c);
      if (!v) throw ValidationError("row " + std::to_string(r + 1) + " has no value for '" + t.column(c).name + "'",
                                    {t.column(c).name});
      rows[r].push_back(*v);
    }
  return rows;
}

inline std::vector<double> prepare(const LoadedModel& m, std::vector<double> x) {
  const auto& info = models::info(m.model);
  models::check_dims(info, x);
  if (m.bundle && m.bundle->bundle.scaler)
    return tabular::apply_standardization(x, info.feature_names, *m.bundle->bundle.scaler);
  return x;
}

inline int cmd_predict(const Options& o, std::ostream& out) {
  const auto m = load_any_model(o.model_path);
  const auto& info = models::info(m.model);
  std::vector<std::vector<double>> rows;
  if (!o.row.empty()) {
    std::istringstream in(o.row);
    csv::Reader reader(in);
    csv::Record rec;
    reader.next(rec);
    std::vector<double> x;
    for (const auto& cell : rec) {
      auto v = parse_double(csv::trim(cell));
      if (!v) throw ValidationError("--row value '" + cell + "' is not a number", {"row"});
      x.push_back(*v);
    }
    rows.push_back(std::move(x));
  } else if (!o.input.empty()) {
    rows = feature_rows(tabular::load_csv_file(o.input), info.feature_names);
  } else {
    throw ValidationError("predict needs --row or --input", {"row", "input"});
  }
  if (o.pretty) out << "row  prediction  confidence (kind)\n";
  else out << "row,prediction,confidence,confidence_kind\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto x = prepare(m, rows[i]);
    const int y = models::predict(m.model, x);
    const auto c = models::confidence(m.model, x);
    if (o.pretty)
      out << i + 1 << "  " << y << "  " << format_fixed(c.value, 4) << " (" << c.kind << ")\n";
    else
      csv::write_record(out, {std::to_string(i + 1), std::to_string(y), format_exact(c.value), c.kind});
  }
  return 0;
}

inline int cmd_eval(const Options& o, std::ostream& out) {
  const auto m = load_any_model(o.model_path);
  if (!m.bundle) throw ValidationError("eval needs a bundle (.json) so the task's cleaning can be applied", {"model"});
  const auto profile = pipeline::profile_for(m.bundle->bundle.task);
  const auto raw = load_task_table(profile, o.data);
  const auto cleaned = tabular::clean(raw, profile.cleaning).first;
  const auto rows = feature_rows(cleaned, models::info(m.model).feature_names);
  const auto lc = cleaned.require_column(profile.label);
  std::vector<int> y_true, y_pred;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    y_true.push_back(static_cast<int>(*cleaned.cell(r, lc)));
    y_pred.push_back(models::predict(m.model, prepare(m, rows[r])));
  }
  const auto cm = metrics::confusion(y_true, y_pred);
  const auto rep = metrics::classification_report(cm);
  if (o.pretty) {
    out << "accuracy: " << format_fixed(rep.accuracy, 4) << "\n\n";
    metrics::write_confusion_text(out, cm);
    out << '\n';
    metrics::write_report_text(out, rep);
  } else {
    metrics::write_report_csv(out, rep, "eval");
  }
  return 0;
}

inline service::Service geo_service(const Options& o) {
  auto snap = std::make_shared<service::Snapshot>();
  snap->facilities = geo::load_facilities_file(o.facilities);
  geo::Gazetteer gaz;
  if (!o.gazetteer.empty() && fs::exists(o.gazetteer)) gaz = geo::load_gazetteer_file(o.gazetteer);
  geo::RemoteGeocoderConfig remote;
  remote.base_url = o.geocoder_url;
  snap->geocoder = geo::Geocoder(std::move(gaz), remote);
  if (!o.districts.empty() && fs::exists(o.districts))
    snap->districts = campaigns::load_district_stats_file(o.districts);
  return service::Service(std::move(snap), nullptr);
}

inline int cmd_nearest(const Options& o, std::ostream& out, std::ostream& err) {
  service::FacilityQuery q;
  if (!o.address.empty()) q.address = o.address;
  if (o.lat.has_value() != o.lon.has_value()) throw ValidationError("--lat and --lon go together", {"lat", "lon"});
  if (o.lat) q.point = geo::GeoPoint(*o.lat, *o.lon);
  q.k = o.k;
  if (!o.kind.empty()) {
    q.kind = geo::parse_facility_kind(o.kind);
    if (!q.kind) throw ValidationError("unknown facility kind '" + o.kind + "'", {"kind"});
  }
  const auto svc = geo_service(o);
  const auto a = svc.suggest_facilities(q);
  if (a.remote_error) err << "remote geocoder failed (" << *a.remote_error << "); used gazetteer\n";
  if (o.pretty) {
    if (a.geocode)
      out << "origin: " << a.geocode->matched_name << " (" << geo::to_string(a.geocode->source) << ") "
          << format_fixed(a.origin.lat(), 4) << ", " << format_fixed(a.origin.lon(), 4) << "\n";
    for (std::size_t i = 0; i < a.facilities.size(); ++i) {
      const auto& f = a.facilities[i];
      out << i + 1 << ". " << f.facility.name << " [" << geo::to_string(f.facility.kind) << "] "
          << format_fixed(f.distance_km, 2) << " km\n";
    }
    return 0;
  }
  out << "rank,id,name,kind,district,lat,lon,distance_km\n";
  for (std::size_t i = 0; i < a.facilities.size(); ++i) {
    const auto& f = a.facilities[i];
    csv::write_record(out, {std::to_string(i + 1), f.facility.id, f.facility.name, geo::to_string(f.facility.kind),
                            f.facility.district, format_exact(f.facility.location.lat()),
                            format_exact(f.facility.location.lon()), format_exact(f.distance_km)});
  }
  return 0;
}

inline campaigns::Indicator require_indicator(const std::string& s) {
  auto i = campaigns::parse_indicator(s);
  if (!i) throw ValidationError("unknown indicator '" + s + "' (expected cervical, breast or oral)", {"indicator"});
  return *i;
}

inline int cmd_rank(const Options& o, std::ostream& out) {
  const auto r = campaigns::district_ranking(campaigns::load_district_stats_file(o.districts),
                                             require_indicator(o.indicator));
  if (o.pretty) campaigns::write_ranking_text(out, r);
  else campaigns::write_ranking_csv(out, r);
  return 0;
}

inline int cmd_plan(const Options& o, std::ostream& out) {
  const auto stats = campaigns::load_district_stats_file(o.districts);
  std::vector<campaigns::CasePoint> cases;
  if (!o.cases.empty()) {
    cases = campaigns::load_cases_file(o.cases);
  } else {
    const auto ind = require_indicator(o.indicator);
    for (const auto& d : stats) cases.push_back({d.centroid, std::max(0.0, 100.0 - d.value(ind))});
  }
  campaigns::KMeansParams p;
  p.k = o.k;
  p.seed = o.seed;
  p.restarts = o.restarts;
  const auto lp = campaigns::plan_campaigns(stats, cases, p);
  if (o.pretty) {
    out << "k = " << lp.plan.k << ", inertia " << format_fixed(lp.plan.inertia, 1) << " km^2, "
        << lp.plan.iterations << " iterations\n";
    for (std::size_t c = 0; c < lp.plan.k; ++c)
      out << "site " << c << ": " << format_fixed(lp.plan.centroids[c].lat(), 4) << ", "
          << format_fixed(lp.plan.centroids[c].lon(), 4) << " near " << lp.centroid_districts[c] << '\n';
  } else {
    campaigns::write_plan_csv(out, lp, cases);
  }
  return 0;
}

inline int cmd_clean(const Options& o, std::ostream& out) {
  const auto profile = pipeline::profile_for(require_task(o.task));
  const auto raw = load_task_table(profile, o.data.empty() ? default_dataset_path(profile) : fs::path(o.data));
  const auto [cleaned, rep] = tabular::clean(raw, profile.cleaning);
  if (!o.report.empty()) {
    Sink s(o.report, out);
    tabular::write_report_csv(*s, rep);
  }
  if (o.pretty) {
    tabular::write_report_log(out, rep);
    return 0;
  }
  Sink s(o.out, out);
  tabular::write_csv(*s, cleaned);
  return 0;
}

inline int cmd_describe(const Options& o, std::ostream& out) {
  const auto profile = pipeline::profile_for(require_task(o.task));
  const auto raw = load_task_table(profile, o.data.empty() ? default_dataset_path(profile) : fs::path(o.data));
  const auto cleaned = tabular::clean(raw, profile.cleaning).first.with_label(profile.label);
  if (o.correlation) {
    tabular::write_correlation_csv(out, tabular::correlation_matrix(cleaned));
    return 0;
  }
  const auto summary = tabular::describe(cleaned);
  if (o.pretty) {
    tabular::write_describe_log(out, summary);
    out << "class balance (" << profile.label << "): " << format_fixed(tabular::class_balance(cleaned, profile.label), 4)
        << '\n';
  } else {
    tabular::write_describe_csv(out, summary);
  }
  return 0;
}

inline service::ServiceConfig serve_config(const Options& o) {
  service::ServiceConfig c;
  if (!o.config.empty()) c = service::load_config(o.config);
  if (!o.host.empty()) c.host = o.host;
  if (o.port) c.port = *o.port;
  for (const auto& b : o.bundles) {
    const auto eq = b.find('=');
    if (eq == std::string::npos) throw ValidationError("--bundle expects task=path", {"bundle"});
    c.bundles[require_task(b.substr(0, eq))] = b.substr(eq + 1);
  }
  auto pick = [](fs::path& dst, const std::string& flag, const std::string& fallback) {
    if (!flag.empty()) dst = flag;
    else if (dst.empty() && fs::exists(fallback)) dst = fallback;
  };
  pick(c.facilities_csv, o.facilities, "data/demo/facilities.csv");
  pick(c.gazetteer_csv, o.gazetteer, "data/demo/gazetteer.csv");
  pick(c.districts_csv, o.districts, "data/demo/districts.csv");
  if (!o.records.empty()) c.record_store = o.records;
  if (!o.request_log.empty()) c.request_log = o.request_log;
  if (!o.geocoder_url.empty()) c.geocoder.base_url = o.geocoder_url;
  return c;
}

inline int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = serve_config(o);
  service::Service svc(service::load_snapshot(cfg), std::make_shared<service::RecordStore>(cfg.record_store));
  service::RequestLog log(cfg.request_log);
  httplib::Server server;
  service::bind_routes(server, svc, &log);
  // port 0 picks a free port
  int port = cfg.port;
  if (port == 0) port = server.bind_to_any_port(cfg.host);
  else if (!server.bind_to_port(cfg.host, port)) port = -1;
  if (port <= 0) throw IoError("cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));
  out << "listening on http://" << cfg.host << ':' << port << std::endl;
  if (!server.listen_after_bind()) {
    err << "server stopped unexpectedly\n";
    return 3;
  }
  return 0;
}

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Screening triage toolkit: reproduce the risk models, query facilities, plan campaigns, serve the API"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--pretty", o.pretty, "human-readable output instead of CSV");
  app.add_option("--seed", o.seed, "seed for every random choice")->capture_default_str();

  auto run_options = [&](CLI::App* c) {
    c->add_option("--task", o.task, "cervical or breast")->required();
    c->add_option("--data", o.data, "dataset CSV (default $SENTINEL_DATA_DIR/<file> or data/raw/<file>)");
    c->add_option("--out", o.out, "artifact directory (default out/<task>)");
    c->add_option("--model", o.model, "tree, forest, sgd or svm (default: the task's model)");
    c->add_option("--train-subsample", o.train_subsample, "stratified training rows used to fit");
    c->add_flag("--expand-count", o.expand_count, "replicate rows by their count column before cleaning");
    c->add_option("--max-depth", o.max_depth, "tree/forest depth limit");
    c->add_option("--n-trees", o.n_trees, "forest size")->capture_default_str();
    c->add_option("--loss", o.loss, "sgd loss: hinge or logistic")->capture_default_str();
    c->add_option("--eta0", o.eta0, "sgd initial step")->capture_default_str();
    c->add_option("--l2", o.l2, "sgd L2 strength")->capture_default_str();
    c->add_option("--epochs", o.epochs, "sgd epochs")->capture_default_str();
    c->add_option("--C", o.C, "svm box constraint")->capture_default_str();
    c->add_option("--kernel", o.kernel, "svm kernel: rbf or linear")->capture_default_str();
    c->add_option("--gamma", o.gamma, "rbf width (default 1/(d Var X))");
  };
  auto* reproduce = app.add_subcommand("reproduce", "clean, train and evaluate; exit 0 only if the reference checks hold");
  run_options(reproduce);
  reproduce->add_flag("--skip-golden", o.skip_golden, "skip the reference count and accuracy checks");
  auto* train = app.add_subcommand("train", "clean, train and evaluate without reference checks");
  run_options(train);

  auto* fetch = app.add_subcommand("fetch-info", "print where to obtain the datasets");
  fetch->add_option("--task", o.task);

  auto* predict = app.add_subcommand("predict", "classify feature rows with a saved model or bundle");
  predict->add_option("--model", o.model_path, "model file or bundle.json")->required();
  predict->add_option("--row", o.row, "comma-separated features in model order");
  predict->add_option("--input", o.input, "CSV with a header naming the model's features");

  auto* eval = app.add_subcommand("eval", "evaluate a bundle on a raw dataset CSV");
  eval->add_option("--model", o.model_path, "bundle.json")->required();
  eval->add_option("--data", o.data, "dataset CSV")->required();

  auto* nearest = app.add_subcommand("nearest", "k nearest facilities to a point or address");
  nearest->add_option("--facilities", o.facilities)->capture_default_str();
  nearest->add_option("--gazetteer", o.gazetteer)->capture_default_str();
  nearest->add_option("--geocoder-url", o.geocoder_url, "remote forward geocoder base URL");
  nearest->add_option("--lat", o.lat);
  nearest->add_option("--lon", o.lon);
  nearest->add_option("--address", o.address);
  nearest->add_option("--k", o.k)->capture_default_str();
  nearest->add_option("--kind", o.kind, "hospital, cancer_centre or screening_camp");

  auto* rank = app.add_subcommand("rank", "districts in decreasing order of a screening percentage");
  rank->add_option("--districts", o.districts)->capture_default_str();
  rank->add_option("--indicator", o.indicator, "cervical, breast or oral")->capture_default_str();

  auto* plan = app.add_subcommand("plan", "k-means campaign sites");
  plan->add_option("--districts", o.districts)->capture_default_str();
  plan->add_option("--cases", o.cases, "CSV lat,lon[,weight]; default: district centroids weighted by unscreened share");
  plan->add_option("--indicator", o.indicator)->capture_default_str();
  plan->add_option("--k", o.k)->capture_default_str();
  plan->add_option("--restarts", o.restarts)->capture_default_str();

  auto* clean = app.add_subcommand("clean", "write the cleaned dataset");
  clean->add_option("--task", o.task)->required();
  clean->add_option("--data", o.data);
  clean->add_option("--out", o.out, "cleaned CSV (default stdout)");
  clean->add_option("--report", o.report, "cleaning report CSV");

  auto* describe = app.add_subcommand("describe", "summary statistics of the cleaned dataset");
  describe->add_option("--task", o.task)->required();
  describe->add_option("--data", o.data);
  describe->add_flag("--correlation", o.correlation, "print the correlation matrix instead");

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--config", o.config, "JSON config file");
  serve->add_option("--host", o.host);
  serve->add_option("--port", o.port, "0 picks a free port");
  serve->add_option("--bundle", o.bundles, "task=path/to/bundle.json (repeatable)");
  serve->add_option("--facilities", o.facilities);
  serve->add_option("--gazetteer", o.gazetteer);
  serve->add_option("--districts", o.districts);
  serve->add_option("--records", o.records, "record store JSONL path");
  serve->add_option("--request-log", o.request_log);
  serve->add_option("--geocoder-url", o.geocoder_url);

  std::vector<const char*> argv{"sentinel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (reproduce->parsed()) return cmd_run(o, !o.skip_golden, out, err);
    if (train->parsed()) return cmd_run(o, false, out, err);
    if (fetch->parsed()) return cmd_fetch_info(o, out);
    if (predict->parsed()) return cmd_predict(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (nearest->parsed()) return cmd_nearest(o, out, err);
    if (rank->parsed()) return cmd_rank(o, out);
    if (plan->parsed()) return cmd_plan(o, out);
    if (clean->parsed()) return cmd_clean(o, out);
    if (describe->parsed()) return cmd_describe(o, out);
    if (serve->parsed()) return cmd_serve(o, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 70;
  }
  return 70;
}

}  // namespace sentinel::cli
