/*
 * Copyright 2026 The fairboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "fairboost/io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace fairboost {

namespace {

// Whitespace-token stream over the whole file; keeps parsing strict and
// format errors early.
class TokenReader {
 public:
  explicit TokenReader(const std::string& text) : in_(text) {}

  std::string next() {
    std::string tok;
    if (!(in_ >> tok)) throw DataError("file truncated while parsing");
    return tok;
  }
  std::string next_line() {
    std::string line;
    std::getline(in_ >> std::ws, line);
    return line;
  }
  double next_double() { return parse_double(next()); }
  long next_long() {
    const std::string tok = next();
    try {
      return std::stol(tok);
    } catch (const std::exception&) {
      throw DataError("expected integer, got '" + tok + "'");
    }
  }
  std::size_t next_size() {
    const long v = next_long();
    if (v < 0) throw DataError("expected nonnegative integer");
    return static_cast<std::size_t>(v);
  }
  void expect(const std::string& word) {
    const std::string tok = next();
    if (tok != word) throw DataError("expected '" + word + "', got '" + tok + "'");
  }

 private:
  std::istringstream in_;
};

void check_tag(TokenReader& r, const std::string& kind) {
  const std::string tag = r.next();
  if (tag != "fairboost." + kind)
    throw DataError("not a fairboost " + kind + " file (tag '" + tag + "')");
  const long version = r.next_long();
  if (version != 1)
    throw DataError("unsupported " + kind + " format version " +
                    std::to_string(version));
}

}  // namespace

std::string dataset_to_text(const Dataset& data) {
  std::ostringstream out;
  out << "fairboost.dataset 1\n";
  out << "n " << data.n() << "\nd " << data.dim() << "\n";
  out << "labels";
  for (int y : data.labels) out << ' ' << y;
  out << "\nfeature_names\n";
  for (const auto& name : data.feature_names) out << name << "\n";
  out << "standardization " << data.standardization.size() << "\n";
  for (const auto& [col, st] : data.standardization) {
    out << col << ' ' << format_double(st.mean) << ' ' << format_double(st.stddev)
        << "\n";
  }
  out << "protected " << data.protected_columns.size() << "\n";
  for (const auto& [name, cols] : data.protected_columns) {
    out << name << ' ' << cols.size();
    for (std::size_t c : cols) out << ' ' << c;
    out << "\n";
  }
  out << "rows\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto row = data.features.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ' ';
      out << format_double(row[j]);
    }
    out << "\n";
  }
  return out.str();
}

Dataset dataset_from_text(const std::string& text) {
  TokenReader r(text);
  check_tag(r, "dataset");
  Dataset ds;
  r.expect("n");
  const std::size_t n = r.next_size();
  r.expect("d");
  const std::size_t d = r.next_size();
  r.expect("labels");
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = static_cast<int>(r.next_long());
  r.expect("feature_names");
  ds.feature_names.resize(d);
  for (std::size_t j = 0; j < d; ++j) ds.feature_names[j] = r.next_line();
  r.expect("standardization");
  const std::size_t n_std = r.next_size();
  for (std::size_t k = 0; k < n_std; ++k) {
    const std::size_t col = r.next_size();
    const double mean = r.next_double();
    const double sd = r.next_double();
    ds.standardization[col] = {mean, sd};
  }
  r.expect("protected");
  const std::size_t n_prot = r.next_size();
  for (std::size_t k = 0; k < n_prot; ++k) {
    const std::string name = r.next();
    const std::size_t count = r.next_size();
    std::vector<std::size_t> cols(count);
    for (std::size_t c = 0; c < count; ++c) cols[c] = r.next_size();
    ds.protected_columns[name] = std::move(cols);
  }
  r.expect("rows");
  ds.features = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) ds.features(i, j) = r.next_double();
  return ds;
}

std::string metric_to_text(const ProjectionMetric& metric) {
  std::ostringstream out;
  out << "fairboost.metric 1\n";
  out << "d " << metric.dim() << "\nq\n";
  for (std::size_t i = 0; i < metric.dim(); ++i) {
    const auto row = metric.q.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ' ';
      out << format_double(row[j]);
    }
    out << "\n";
  }
  return out.str();
}

ProjectionMetric metric_from_text(const std::string& text) {
  TokenReader r(text);
  check_tag(r, "metric");
  r.expect("d");
  const std::size_t d = r.next_size();
  r.expect("q");
  ProjectionMetric m;
  m.q = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m.q(i, j) = r.next_double();
  return m;
}

std::string model_to_text(const Ensemble& model) {
  std::ostringstream out;
  out << "fairboost.model 1\n";
  out << "base_margin " << format_double(model.base_margin) << "\n";
  out << "loss " << model.loss << "\n";
  out << "trees " << model.trees.size() << "\n";
  for (const auto& [tree, eta] : model.trees) {
    out << "tree " << format_double(eta) << ' ' << tree.nodes.size() << "\n";
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      const TreeNode& node = tree.nodes[k];
      if (node.is_leaf()) {
        out << k << " leaf " << format_double(node.value) << "\n";
      } else {
        out << k << " split " << node.feature << ' '
            << format_double(node.threshold) << ' ' << node.left << ' '
            << node.right << "\n";
      }
    }
  }
  return out.str();
}

Ensemble model_from_text(const std::string& text) {
  TokenReader r(text);
  check_tag(r, "model");
  Ensemble model;
  r.expect("base_margin");
  model.base_margin = r.next_double();
  r.expect("loss");
  model.loss = r.next();
  r.expect("trees");
  const std::size_t n_trees = r.next_size();
  model.trees.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    r.expect("tree");
    const double eta = r.next_double();
    const std::size_t n_nodes = r.next_size();
    RegressionTree tree;
    tree.nodes.resize(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
      const std::size_t idx = r.next_size();
      if (idx >= n_nodes) throw DataError("model: node index out of range");
      const std::string kind = r.next();
      if (kind == "leaf") {
        tree.nodes[idx].feature = -1;
        tree.nodes[idx].value = r.next_double();
      } else if (kind == "split") {
        tree.nodes[idx].feature = static_cast<int>(r.next_long());
        tree.nodes[idx].threshold = r.next_double();
        tree.nodes[idx].left = static_cast<int>(r.next_long());
        tree.nodes[idx].right = static_cast<int>(r.next_long());
      } else {
        throw DataError("model: unknown node kind '" + kind + "'");
      }
    }
    model.trees.emplace_back(std::move(tree), eta);
  }
  return model;
}

std::string trace_to_text(const TrainingTrace& trace) {
  std::ostringstream out;
  out << "fairboost.trace 1\n";
  out << "fields t robust_loss empirical_loss plan_cost eta_dual seconds\n";
  out << "steps " << trace.steps.size() << "\n";
  for (const auto& s : trace.steps) {
    out << s.t << ' ' << format_double(s.robust_loss) << ' '
        << format_double(s.empirical_loss) << ' ' << format_double(s.plan_cost)
        << ' ' << format_double(s.eta_dual) << ' ' << format_double(s.seconds)
        << "\n";
  }
  return out.str();
}

TrainingTrace trace_from_text(const std::string& text) {
  TokenReader r(text);
  check_tag(r, "trace");
  r.expect("fields");
  for (int k = 0; k < 6; ++k) r.next();
  r.expect("steps");
  const std::size_t count = r.next_size();
  TrainingTrace trace;
  trace.steps.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto& s = trace.steps[k];
    s.t = static_cast<int>(r.next_long());
    s.robust_loss = r.next_double();
    s.empirical_loss = r.next_double();
    s.plan_cost = r.next_double();
    s.eta_dual = r.next_double();
    s.seconds = r.next_double();
  }
  return trace;
}

std::string report_to_text(const AuditReport& report) {
  std::ostringstream out;
  out << "fairboost.report 1\n";
  out << "bacc " << format_double(report.balanced_accuracy) << "\n";
  for (const auto& gap : report.gaps) {
    out << "gap " << gap.attribute << " gap_max " << format_double(gap.gap_max)
        << " gap_rms " << format_double(gap.gap_rms);
    out << " gap0 " << (gap.gap0_defined ? format_double(gap.gap0) : "undefined");
    out << " gap1 " << (gap.gap1_defined ? format_double(gap.gap1) : "undefined");
    out << "\n";
  }
  for (const auto& c : report.consistencies) {
    out << "consistency " << c.attribute << ' ' << format_double(c.consistency)
        << "\n";
  }
  for (const auto& cert : report.certificates) {
    out << "certificate epsilon " << format_double(cert.epsilon) << " L "
        << format_double(cert.worst_case) << " empirical "
        << format_double(cert.empirical) << " gap " << format_double(cert.gap)
        << " solver " << cert.solver << " verdict "
        << (cert.delta.has_value() ? (cert.drf ? "drf" : "not-drf") : "none")
        << "\n";
  }
  return out.str();
}

std::string instance_to_text(const SolverInstance& instance) {
  const std::size_t n = instance.losses.n();
  std::ostringstream out;
  out << "fairboost.instance 1\n";
  out << "n " << n << "\n";
  out << "epsilon " << format_double(instance.epsilon) << "\n";
  out << "labels";
  for (int y : instance.losses.labels) out << ' ' << y;
  out << "\nr0";
  for (double v : instance.losses.r0) out << ' ' << format_double(v);
  out << "\nr1";
  for (double v : instance.losses.r1) out << ' ' << format_double(v);
  out << "\nC\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ' ';
      out << format_double(instance.cost(i, j));
    }
    out << "\n";
  }
  return out.str();
}

SolverInstance instance_from_text(const std::string& text) {
  TokenReader r(text);
  check_tag(r, "instance");
  SolverInstance inst;
  r.expect("n");
  const std::size_t n = r.next_size();
  r.expect("epsilon");
  inst.epsilon = r.next_double();
  r.expect("labels");
  inst.losses.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    inst.losses.labels[i] = static_cast<int>(r.next_long());
  r.expect("r0");
  inst.losses.r0.resize(n);
  for (std::size_t i = 0; i < n; ++i) inst.losses.r0[i] = r.next_double();
  r.expect("r1");
  inst.losses.r1.resize(n);
  for (std::size_t i = 0; i < n; ++i) inst.losses.r1[i] = r.next_double();
  r.expect("C");
  inst.cost = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inst.cost(i, j) = r.next_double();
  return inst;
}

CostMatrix dense_cost_from_matrix(Matrix c) {
  if (c.rows != c.cols) throw DataError("cost matrix must be square");
  CostMatrix cost;
  cost.mode = CostMatrix::Mode::kDense;
  cost.n = c.rows;
  cost.dense = std::move(c);
  return cost;
}

std::string plan_to_text(const TransportPlan& plan, double eta, double dual_value,
                         double primal_value, double cost) {
  std::ostringstream out;
  out << "fairboost.plan 1\n";
  out << "n " << plan.n << "\n";
  out << "eta " << format_double(eta) << "\n";
  out << "dual " << format_double(dual_value) << "\n";
  out << "primal " << format_double(primal_value) << "\n";
  out << "cost " << format_double(cost) << "\n";
  std::size_t count = 0;
  for (const auto& col : plan.columns) count += col.size();
  out << "entries " << count << "\n";
  for (std::size_t j = 0; j < plan.columns.size(); ++j) {
    for (const auto& e : plan.columns[j]) {
      out << j << ' ' << e.row << ' ' << format_double(e.mass) << "\n";
    }
  }
  return out.str();
}

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments and whitespace
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t a = 0, b = line.size();
    while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
    line = line.substr(a, b - a);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back())))
      key.pop_back();
    std::size_t v = 0;
    while (v < value.size() && std::isspace(static_cast<unsigned char>(value[v])))
      ++v;
    value = value.substr(v);
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    cfg.items_.push_back({section, key, value});
  }
  return cfg;
}

void KvConfig::set(const std::string& section, const std::string& key,
                   const std::string& value) {
  for (auto& item : items_) {
    if (item.section == section && item.key == key) {
      item.value = value;
      return;
    }
  }
  items_.push_back({section, key, value});
}

bool KvConfig::has(const std::string& section, const std::string& key) const {
  for (const auto& item : items_) {
    if (item.section == section && item.key == key) return true;
  }
  return false;
}

std::string KvConfig::get(const std::string& section, const std::string& key,
                          const std::string& fallback) const {
  const Item* found = nullptr;
  for (const auto& item : items_) {
    if (item.section == section && item.key == key) found = &item;
  }
  return found ? found->value : fallback;
}

std::vector<std::string> KvConfig::get_all(const std::string& section,
                                           const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& item : items_) {
    if (item.section == section && item.key == key) out.push_back(item.value);
  }
  return out;
}

std::vector<std::string> KvConfig::keys(const std::string& section) const {
  std::vector<std::string> out;
  for (const auto& item : items_) {
    if (item.section == section) out.push_back(item.key);
  }
  return out;
}

}  // namespace fairboost
