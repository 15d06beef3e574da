#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sentinel/core/numfmt.hpp"
#include "sentinel/models/model.hpp"

namespace sentinel::models {

// Model file layout:
//
//   sentinel-model v1 <kind>
//   key = value
//   ...
//
// Keys appear in a fixed canonical order. Doubles are written as the
// shortest decimal that round-trips exactly, so save -> load reproduces
// predictions bit for bit.

inline constexpr const char* kModelMagic = "sentinel-model";
inline constexpr const char* kModelVersion = "v1";

namespace persist_detail {

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void put(const std::string& key, const std::string& value) {
    if (value.find_first_of("\r\n") != std::string::npos)
      throw ValidationError("model field '" + key + "' contains a line break");
    os_ << key << " = " << value << '\n';
  }
  void put(const std::string& key, double v) { put(key, format_exact(v)); }
  void put(const std::string& key, std::size_t v) { put(key, std::to_string(v)); }
  void put(const std::string& key, int v) { put(key, std::to_string(v)); }
  void put_u64(const std::string& key, std::uint64_t v) { put(key, std::to_string(v)); }
  void put_bool(const std::string& key, bool v) { put(key, std::string(v ? "true" : "false")); }
  void put_list(const std::string& key, std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s.push_back(' ');
      s += format_exact(v[i]);
    }
    put(key, s);
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string& kind) {
    std::string header;
    if (!std::getline(in, header)) throw ValidationError("empty model file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::istringstream hs(header);
    std::string magic, version;
    hs >> magic >> version >> kind;
    if (magic != kModelMagic) throw ValidationError("not a sentinel model file");
    if (version != kModelVersion) throw ValidationError("unsupported model version '" + version + "'");
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) throw ValidationError("model file line " + std::to_string(lineno) + " is not key = value");
      values_[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("model file lacks key '" + key + "'");
    return it->second;
  }
  double num(const std::string& key) const {
    auto v = parse_double(str(key));
    if (!v) throw ValidationError("model key '" + key + "' is not a finite number");
    return *v;
  }
  std::uint64_t u64(const std::string& key) const {
    auto v = parse_int<std::uint64_t>(str(key));
    if (!v) throw ValidationError("model key '" + key + "' is not an unsigned integer");
    return *v;
  }
  std::size_t size(const std::string& key) const { return static_cast<std::size_t>(u64(key)); }
  int integer(const std::string& key) const {
    auto v = parse_int<int>(str(key));
    if (!v) throw ValidationError("model key '" + key + "' is not an integer");
    return *v;
  }
  bool boolean(const std::string& key) const {
    const auto& s = str(key);
    if (s == "true") return true;
    if (s == "false") return false;
    throw ValidationError("model key '" + key + "' is not a boolean");
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::istringstream is(str(key));
    std::string tok;
    while (is >> tok) {
      auto v = parse_double(tok);
      if (!v) throw ValidationError("model key '" + key + "' holds a non-numeric entry");
      out.push_back(*v);
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

inline void write_info(Writer& w, const ModelInfo& info) {
  w.put("classes", info.classes);
  w.put("fingerprint", fingerprint_hex(info.fingerprint));
  w.put("features", info.feature_names.size());
  for (std::size_t i = 0; i < info.feature_names.size(); ++i) w.put("feature." + std::to_string(i), info.feature_names[i]);
}

inline ModelInfo read_info(const Reader& r) {
  ModelInfo info;
  info.classes = r.integer("classes");
  if (info.classes < 1) throw ValidationError("model declares no classes");
  auto fp = std::stoull(r.str("fingerprint"), nullptr, 16);
  info.fingerprint = fp;
  const auto d = r.size("features");
  for (std::size_t i = 0; i < d; ++i) info.feature_names.push_back(r.str("feature." + std::to_string(i)));
  return info;
}

inline void write_tree_params(Writer& w, const std::string& prefix, const TreeParams& p) {
  w.put(prefix + "max_depth", p.max_depth ? std::to_string(*p.max_depth) : std::string("none"));
  w.put(prefix + "min_samples_split", p.min_samples_split);
}

inline TreeParams read_tree_params(const Reader& r, const std::string& prefix) {
  TreeParams p;
  if (r.str(prefix + "max_depth") != "none") p.max_depth = r.size(prefix + "max_depth");
  p.min_samples_split = r.size(prefix + "min_samples_split");
  return p;
}

inline void write_nodes(Writer& w, const std::string& prefix, const std::vector<TreeNode>& nodes) {
  w.put(prefix + "nodes", nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    std::string v;
    if (n.is_leaf()) {
      v = "leaf " + std::to_string(n.label);
      for (auto c : n.counts) v += " " + std::to_string(c);
    } else {
      v = "split " + std::to_string(n.feature) + " " + format_exact(n.threshold) + " " + std::to_string(n.left) + " " +
          std::to_string(n.right);
    }
    w.put(prefix + "node." + std::to_string(i), v);
  }
}

inline std::vector<TreeNode> read_nodes(const Reader& r, const std::string& prefix, const ModelInfo& info) {
  const auto count = r.size(prefix + "nodes");
  if (count == 0) throw ValidationError("tree without nodes");
  std::vector<TreeNode> nodes(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string key = prefix + "node." + std::to_string(i);
    std::istringstream is(r.str(key));
    std::string type;
    is >> type;
    auto& n = nodes[i];
    if (type == "leaf") {
      std::string tok;
      is >> tok;
      auto label = parse_int<int>(tok);
      if (!label) throw ValidationError("bad leaf label in '" + key + "'");
      n.label = *label;
      while (is >> tok) {
        auto c = parse_int<std::size_t>(tok);
        if (!c) throw ValidationError("bad leaf count in '" + key + "'");
        n.counts.push_back(*c);
      }
      if (n.label < 0 || n.label >= info.classes || n.counts.size() != static_cast<std::size_t>(info.classes))
        throw ValidationError("inconsistent leaf in '" + key + "'");
    } else if (type == "split") {
      std::string f, t, l, rr;
      is >> f >> t >> l >> rr;
      auto fi = parse_int<int>(f);
      auto th = parse_double(t);
      auto li = parse_int<int>(l);
      auto ri = parse_int<int>(rr);
      if (!fi || !th || !li || !ri) throw ValidationError("bad split in '" + key + "'");
      const auto valid_child = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(count); };
      if (*fi < 0 || static_cast<std::size_t>(*fi) >= info.dims() || !valid_child(*li) || !valid_child(*ri))
        throw ValidationError("split out of range in '" + key + "'");
      n.feature = *fi;
      n.threshold = *th;
      n.left = *li;
      n.right = *ri;
    } else {
      throw ValidationError("unknown node type in '" + key + "'");
    }
  }
  return nodes;
}

}  // namespace persist_detail

inline void save_model(std::ostream& os, const TrainedModel& model) {
  using namespace persist_detail;
  os << kModelMagic << ' ' << kModelVersion << ' ' << kind_name(model) << '\n';
  Writer w(os);
  write_info(w, info(model));
  struct Visitor {
    Writer& w;
    void operator()(const TreeModel& t) const {
      write_tree_params(w, "", t.params);
      write_nodes(w, "", t.nodes);
    }
    void operator()(const ForestModel& f) const {
      w.put("n_trees", f.trees.size());
      w.put("features_per_split", f.features_per_split);
      w.put("sample_size", f.sample_size);
      w.put_bool("bootstrap", f.bootstrap);
      w.put_u64("seed", f.seed);
      write_tree_params(w, "", f.trees.empty() ? TreeParams{} : f.trees.front().params);
      for (std::size_t i = 0; i < f.trees.size(); ++i) {
        const std::string p = "tree." + std::to_string(i) + ".";
        w.put_u64(p + "seed", f.tree_seeds[i]);
        write_nodes(w, p, f.trees[i].nodes);
      }
    }
    void operator()(const LinearSgdModel& s) const {
      w.put("loss", std::string(to_string(s.params.loss)));
      w.put("eta0", s.params.eta0);
      w.put("l2", s.params.l2);
      w.put("epochs", s.params.epochs);
      w.put_u64("seed", s.params.seed);
      w.put("planes", s.planes.size());
      for (std::size_t i = 0; i < s.planes.size(); ++i) {
        const std::string p = "plane." + std::to_string(i) + ".";
        w.put(p + "bias", s.planes[i].bias);
        w.put_list(p + "weights", s.planes[i].weights);
      }
    }
    void operator()(const SvmModel& s) const {
      w.put("kernel", std::string(to_string(s.kernel.kind)));
      w.put("gamma", s.kernel.gamma);
      w.put("C", s.C);
      w.put("tolerance", s.tolerance);
      w.put_u64("seed", s.seed);
      w.put_bool("converged", s.converged);
      w.put("iterations", s.iterations);
      w.put("bias", s.bias);
      w.put("support_vectors", s.support_count());
      for (std::size_t i = 0; i < s.support_count(); ++i) {
        std::vector<double> v{s.coef[i]};
        auto x = s.support_vector(i);
        v.insert(v.end(), x.begin(), x.end());
        w.put_list("sv." + std::to_string(i), v);
      }
    }
  };
  std::visit(Visitor{w}, model);
}

inline TrainedModel load_model(std::istream& in) {
  using namespace persist_detail;
  std::string kind;
  Reader r(in, kind);
  ModelInfo mi = read_info(r);
  if (kind == "tree") {
    return TreeModel{mi, read_tree_params(r, ""), read_nodes(r, "", mi)};
  }
  if (kind == "forest") {
    ForestModel f;
    f.info = mi;
    f.features_per_split = r.size("features_per_split");
    f.sample_size = r.size("sample_size");
    f.bootstrap = r.boolean("bootstrap");
    f.seed = r.u64("seed");
    const auto tp = read_tree_params(r, "");
    const auto n = r.size("n_trees");
    if (n == 0) throw ValidationError("forest without trees");
    for (std::size_t i = 0; i < n; ++i) {
      const std::string p = "tree." + std::to_string(i) + ".";
      f.tree_seeds.push_back(r.u64(p + "seed"));
      f.trees.push_back(TreeModel{mi, tp, read_nodes(r, p, mi)});
    }
    return f;
  }
  if (kind == "sgd") {
    LinearSgdModel s;
    s.info = mi;
    const auto& loss = r.str("loss");
    if (loss == "hinge") s.params.loss = Loss::hinge;
    else if (loss == "logistic") s.params.loss = Loss::logistic;
    else throw ValidationError("unknown loss '" + loss + "'");
    s.params.eta0 = r.num("eta0");
    s.params.l2 = r.num("l2");
    s.params.epochs = r.size("epochs");
    s.params.seed = r.u64("seed");
    const auto n = r.size("planes");
    const std::size_t expected = mi.classes == 2 ? 1 : static_cast<std::size_t>(mi.classes);
    if (n != expected) throw ValidationError("sgd model has the wrong number of hyperplanes");
    for (std::size_t i = 0; i < n; ++i) {
      const std::string p = "plane." + std::to_string(i) + ".";
      Hyperplane h{r.list(p + "weights"), r.num(p + "bias")};
      if (h.weights.size() != mi.dims()) throw ValidationError("hyperplane dimension mismatch");
      s.planes.push_back(std::move(h));
    }
    return s;
  }
  if (kind == "svm") {
    SvmModel s;
    s.info = mi;
    const auto& k = r.str("kernel");
    if (k == "linear") s.kernel.kind = KernelKind::linear;
    else if (k == "rbf") s.kernel.kind = KernelKind::rbf;
    else throw ValidationError("unknown kernel '" + k + "'");
    s.kernel.gamma = r.num("gamma");
    s.C = r.num("C");
    s.tolerance = r.num("tolerance");
    s.seed = r.u64("seed");
    s.converged = r.boolean("converged");
    s.iterations = r.size("iterations");
    s.bias = r.num("bias");
    const auto n = r.size("support_vectors");
    for (std::size_t i = 0; i < n; ++i) {
      auto v = r.list("sv." + std::to_string(i));
      if (v.size() != mi.dims() + 1) throw ValidationError("support vector dimension mismatch");
      s.coef.push_back(v[0]);
      s.support_vectors.insert(s.support_vectors.end(), v.begin() + 1, v.end());
    }
    return s;
  }
  throw ValidationError("unknown model kind '" + kind + "'");
}

inline void save_model_file(const std::string& path, const TrainedModel& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write model file '" + path + "'");
  save_model(os, model);
  if (!os) throw IoError("failed writing model file '" + path + "'");
}

inline TrainedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace sentinel::models
