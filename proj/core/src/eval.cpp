#include "labelvec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "labelvec/csv.hpp"
#include "labelvec/error.hpp"

namespace labelvec {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Predictions resolved against the gold corpus as class indices.
struct Resolved {
  std::vector<std::string> class_names;
  std::vector<std::pair<std::size_t, std::size_t>> scored;  // (gold, predicted)
  std::vector<std::size_t> excluded;                         // gold
};

Resolved resolve(const PredictionSet& preds, const Corpus& gold) {
  if (preds.predictions.empty() && preds.excluded.empty()) {
    throw InputError("prediction set contains no documents");
  }
  Resolved r;
  r.class_names = gold.class_names();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < r.class_names.size(); ++i) index.emplace(r.class_names[i], i);

  std::unordered_set<std::string> seen;
  auto gold_of = [&](const std::string& id) {
    if (!seen.insert(id).second) throw ConsistencyError("document '" + id + "' appears more than once in predictions");
    const auto* doc = gold.find(id);
    if (!doc) throw ConsistencyError("prediction for unknown document '" + id + "'");
    if (!doc->gold_class) throw ConsistencyError("document '" + id + "' has no gold class");
    return index.at(*doc->gold_class);
  };
  for (const auto& p : preds.predictions) {
    const auto g = gold_of(p.id);
    const auto it = index.find(p.predicted);
    if (it == index.end()) {
      throw ConsistencyError("document '" + p.id + "' predicted as unknown class '" + p.predicted + "'");
    }
    r.scored.emplace_back(g, it->second);
  }
  for (const auto& id : preds.excluded) r.excluded.push_back(gold_of(id));
  return r;
}

std::vector<ClassF1> per_class(const Resolved& r) {
  std::vector<ClassF1> out(r.class_names.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c].class_name = r.class_names[c];
  for (const auto& [g, p] : r.scored) {
    if (g == p) {
      ++out[g].tp;
    } else {
      ++out[g].fn;
      ++out[p].fp;
    }
  }
  for (auto g : r.excluded) ++out[g].fn;
  for (auto& c : out) {
    const auto tp = static_cast<double>(c.tp);
    c.precision = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
    c.recall = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
    const auto denom = 2 * c.tp + c.fp + c.fn;
    c.flagged = denom == 0;
    c.f1 = c.flagged ? 0.0 : 2.0 * tp / static_cast<double>(denom);
  }
  return out;
}

ConfusionMatrix confusion(const Resolved& r) {
  ConfusionMatrix m;
  m.class_names = r.class_names;
  m.counts.assign(r.class_names.size(), std::vector<std::size_t>(r.class_names.size(), 0));
  for (const auto& [g, p] : r.scored) ++m.counts[g][p];
  return m;
}

MicroF1 micro(const Resolved& r) {
  MicroF1 m;
  m.n_scored = r.scored.size();
  m.n_excluded = r.excluded.size();
  m.n_correct = static_cast<std::size_t>(
      std::count_if(r.scored.begin(), r.scored.end(), [](const auto& gp) { return gp.first == gp.second; }));
  const auto correct = static_cast<double>(m.n_correct);
  m.strict = correct / static_cast<double>(m.n_scored + m.n_excluded);
  m.scored_only = m.n_scored > 0 ? correct / static_cast<double>(m.n_scored) : 0.0;
  return m;
}

}  // namespace

MicroF1 micro_f1_detail(const PredictionSet& predictions, const Corpus& gold) { return micro(resolve(predictions, gold)); }

double micro_f1(const PredictionSet& predictions, const Corpus& gold) { return micro_f1_detail(predictions, gold).strict; }

std::vector<ClassF1> per_class_f1(const PredictionSet& predictions, const Corpus& gold) {
  return per_class(resolve(predictions, gold));
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

ConfusionMatrix confusion_matrix(const PredictionSet& predictions, const Corpus& gold) {
  return confusion(resolve(predictions, gold));
}

EvalReport evaluate(const PredictionSet& predictions, const Corpus& gold) {
  const auto r = resolve(predictions, gold);
  const auto m = micro(r);
  EvalReport rep;
  rep.dataset = gold.name();
  rep.method = predictions.method;
  rep.engine = predictions.engine;
  rep.config_fingerprint = predictions.config_fingerprint;
  rep.micro_f1 = m.strict;
  rep.micro_f1_scored_only = m.scored_only;
  rep.per_class = per_class(r);
  rep.confusion = confusion(r);
  rep.n_scored = m.n_scored;
  rep.n_excluded = m.n_excluded;
  rep.ties = predictions.ties;
  return rep;
}

ClassValues EvalReport::per_class_f1() const {
  ClassValues out;
  for (const auto& c : per_class) out.emplace_back(c.class_name, c.f1);
  return out;
}

ordered_json EvalReport::to_json() const {
  ordered_json j;
  j["dataset"] = dataset;
  j["method"] = method;
  j["engine"] = engine;
  j["config_fingerprint"] = config_fingerprint;
  j["micro_f1"] = micro_f1;
  j["micro_f1_scored_only"] = micro_f1_scored_only;
  ordered_json f1 = ordered_json::object();
  ordered_json detail = ordered_json::array();
  for (const auto& c : per_class) {
    f1[c.class_name] = c.f1;
    detail.push_back({{"class", c.class_name},
                      {"precision", c.precision},
                      {"recall", c.recall},
                      {"f1", c.f1},
                      {"tp", c.tp},
                      {"fp", c.fp},
                      {"fn", c.fn},
                      {"flagged", c.flagged}});
  }
  j["per_class_f1"] = std::move(f1);
  j["per_class"] = std::move(detail);
  j["confusion"] = {{"classes", confusion.class_names}, {"counts", confusion.counts}};
  j["n_scored"] = n_scored;
  j["n_excluded"] = n_excluded;
  j["ties"] = ties;
  return j;
}

EvalReport EvalReport::from_json(const json& j) {
  try {
    EvalReport r;
    r.dataset = j.value("dataset", std::string{});
    r.method = j.value("method", std::string{});
    r.engine = j.value("engine", std::string{});
    r.config_fingerprint = j.value("config_fingerprint", std::string{});
    r.micro_f1 = j.at("micro_f1").get<double>();
    r.micro_f1_scored_only = j.value("micro_f1_scored_only", r.micro_f1);
    r.n_scored = j.at("n_scored").get<std::size_t>();
    r.n_excluded = j.at("n_excluded").get<std::size_t>();
    r.ties = j.value("ties", std::size_t{0});
    if (j.contains("confusion")) {
      r.confusion.class_names = j["confusion"].at("classes").get<std::vector<std::string>>();
      r.confusion.counts = j["confusion"].at("counts").get<std::vector<std::vector<std::size_t>>>();
    }
    if (j.contains("per_class")) {
      for (const auto& c : j["per_class"]) {
        ClassF1 f;
        f.class_name = c.at("class").get<std::string>();
        f.precision = c.at("precision").get<double>();
        f.recall = c.at("recall").get<double>();
        f.f1 = c.at("f1").get<double>();
        f.tp = c.at("tp").get<std::size_t>();
        f.fp = c.at("fp").get<std::size_t>();
        f.fn = c.at("fn").get<std::size_t>();
        f.flagged = c.at("flagged").get<bool>();
        r.per_class.push_back(std::move(f));
      }
    } else {
      // Class order is lost when only the name -> F1 object is present.
      const auto order = r.confusion.class_names;
      const auto& f1 = j.at("per_class_f1");
      for (const auto& name : order) r.per_class.push_back({.class_name = name, .f1 = f1.at(name).get<double>()});
      if (order.empty()) {
        for (const auto& [name, v] : f1.items()) r.per_class.push_back({.class_name = name, .f1 = v.get<double>()});
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed eval report: ") + e.what());
  }
}

std::string EvalReport::to_table() const {
  std::size_t width = 5;
  for (const auto& c : per_class) width = std::max(width, c.class_name.size());
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "dataset: " << dataset << "  method: " << method << "  engine: " << engine << "  fingerprint: "
      << config_fingerprint << '\n';
  out << "micro-F1 " << micro_f1 << " (scored only " << micro_f1_scored_only << ")  scored " << n_scored
      << "  excluded " << n_excluded << "  ties " << ties << '\n';
  out << std::left << std::setw(static_cast<int>(width)) << "class" << std::right << std::setw(11) << "precision"
      << std::setw(8) << "recall" << std::setw(8) << "F1" << std::setw(9) << "support" << '\n';
  for (const auto& c : per_class) {
    out << std::left << std::setw(static_cast<int>(width)) << c.class_name << std::right << std::setw(11)
        << c.precision << std::setw(8) << c.recall << std::setw(8) << c.f1 << std::setw(9) << c.support()
        << (c.flagged ? "  (no gold, no predictions)" : "") << '\n';
  }
  return out.str();
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string EvalReport::per_class_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "dataset,class,precision,recall,f1,support,tp,fp,fn,flagged\n";
  for (const auto& c : per_class) {
    out << csv_field(dataset) << ',' << csv_field(c.class_name) << ',' << c.precision << ',' << c.recall << ','
        << c.f1 << ',' << c.support() << ',' << c.tp << ',' << c.fp << ',' << c.fn << ','
        << (c.flagged ? "true" : "false") << '\n';
  }
  return out.str();
}

void write_eval_report(const EvalReport& report, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << report.to_json().dump(2) << '\n';
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

EvalReport read_eval_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open eval report '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return EvalReport::from_json(j);
}

// ---------------------------------------------------------------------------
// Kendall tau

ordered_json CorrelationResult::to_json() const {
  return {{"tau", tau}, {"p_value", p_value}, {"n", n}, {"tie_corrected", tie_corrected}};
}

namespace {

// Sizes of runs of equal values in a sorted sequence.
template <typename It, typename Eq>
std::vector<std::uint64_t> tie_groups(It first, It last, Eq eq) {
  std::vector<std::uint64_t> out;
  while (first != last) {
    auto run = first + 1;
    while (run != last && eq(*first, *run)) ++run;
    const auto t = static_cast<std::uint64_t>(run - first);
    if (t > 1) out.push_back(t);
    first = run;
  }
  return out;
}

std::uint64_t pairs_in(const std::vector<std::uint64_t>& groups) {
  std::uint64_t s = 0;
  for (auto t : groups) s += t * (t - 1) / 2;
  return s;
}

// Counts pairs i < j with v[i] > v[j] while sorting v.
std::uint64_t count_inversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  std::uint64_t inv = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const auto mid = std::min(lo + width, v.size());
      const auto hi = std::min(lo + 2 * width, v.size());
      auto i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inv += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return inv;
}

// P(|S| >= |s|) over uniformly random permutations of n items, S = C - D.
double exact_p_value(std::size_t n, std::int64_t s) {
  const auto max_inv = n * (n - 1) / 2;
  std::vector<double> counts(max_inv + 1, 0.0);
  counts[0] = 1.0;
  // Mahonian numbers: inversions of permutations of 1..m.
  for (std::size_t m = 2; m <= n; ++m) {
    std::vector<double> next(max_inv + 1, 0.0);
    for (std::size_t k = 0; k <= max_inv; ++k) {
      if (counts[k] == 0.0) continue;
      for (std::size_t j = 0; j < m && k + j <= max_inv; ++j) next[k + j] += counts[k];
    }
    counts.swap(next);
  }
  const auto n0 = static_cast<std::int64_t>(max_inv);
  double hit = 0.0, total = 0.0;
  for (std::size_t k = 0; k <= max_inv; ++k) {
    total += counts[k];
    if (std::llabs(n0 - 2 * static_cast<std::int64_t>(k)) >= std::llabs(s)) hit += counts[k];
  }
  return std::min(1.0, hit / total);
}

}  // namespace

CorrelationResult kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw InputError("kendall_tau needs equal lengths, got " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
  const auto n = x.size();
  if (n < 2) throw InputError("kendall_tau needs at least 2 pairs");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InputError("kendall_tau input is not finite");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b]; });

  const auto x_ties = tie_groups(order.begin(), order.end(), [&](auto a, auto b) { return x[a] == x[b]; });
  const auto xy_ties =
      tie_groups(order.begin(), order.end(), [&](auto a, auto b) { return x[a] == x[b] && y[a] == y[b]; });
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const auto swaps = count_inversions(ys);
  const auto y_ties = tie_groups(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  const auto n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const auto n1 = pairs_in(x_ties);
  const auto n2 = pairs_in(y_ties);
  const auto n3 = pairs_in(xy_ties);
  if (n1 == n0) throw NumericError("kendall_tau undefined: x is constant");
  if (n2 == n0) throw NumericError("kendall_tau undefined: y is constant");

  const auto s = static_cast<std::int64_t>(n0 - n1 - n2 + n3) - 2 * static_cast<std::int64_t>(swaps);
  CorrelationResult r;
  r.n = n;
  r.tie_corrected = n1 > 0 || n2 > 0;
  r.tau = static_cast<double>(s) / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
  r.tau = std::clamp(r.tau, -1.0, 1.0);

  if (!r.tie_corrected && n <= 8) {
    r.p_value = exact_p_value(n, s);
    return r;
  }
  const auto dn = static_cast<double>(n);
  auto sum_of = [](const std::vector<std::uint64_t>& g, auto f) {
    double acc = 0.0;
    for (auto t : g) acc += f(static_cast<double>(t));
    return acc;
  };
  auto v_term = [](double t) { return t * (t - 1) * (2 * t + 5); };
  auto t2 = [](double t) { return t * (t - 1); };
  auto t3 = [](double t) { return t * (t - 1) * (t - 2); };
  const double v0 = v_term(dn);
  const double vt = sum_of(x_ties, v_term);
  const double vu = sum_of(y_ties, v_term);
  const double v1 = sum_of(x_ties, t2) * sum_of(y_ties, t2) / (2 * dn * (dn - 1));
  const double v2 = n > 2 ? sum_of(x_ties, t3) * sum_of(y_ties, t3) / (9 * dn * (dn - 1) * (dn - 2)) : 0.0;
  const double var = (v0 - vt - vu) / 18 + v1 + v2;
  if (!(var > 0.0)) throw NumericError("kendall_tau variance is zero");
  const double z = static_cast<double>(s) / std::sqrt(var);
  r.p_value = std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0);
  return r;
}

// ---------------------------------------------------------------------------

ClassValues avg_doc_words_per_class(const Corpus& corpus) {
  const auto& names = corpus.class_names();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  std::vector<std::size_t> words(names.size(), 0), docs(names.size(), 0);
  for (const auto& d : corpus) {
    if (!d.gold_class) continue;
    const auto c = index.at(*d.gold_class);
    words[c] += count_words(d.text);
    ++docs[c];
  }
  ClassValues out;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (docs[c] == 0) throw NumericError("class '" + names[c] + "' has no documents in '" + corpus.name() + "'");
    out.emplace_back(names[c], static_cast<double>(words[c]) / static_cast<double>(docs[c]));
  }
  return out;
}

ordered_json LengthF1Correlation::to_json() const {
  auto j = result.to_json();
  ordered_json pairs = ordered_json::array();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    pairs.push_back({{"class", keys[i]}, {"avg_words", lengths[i]}, {"f1", f1[i]}});
  }
  j["pairs"] = std::move(pairs);
  return j;
}

LengthF1Correlation correlate_length_vs_f1(const std::vector<DatasetClassValues>& f1_by_dataset,
                                           const std::vector<DatasetClassValues>& lengths_by_dataset) {
  auto pool = [](const std::vector<DatasetClassValues>& sets, const char* what) {
    std::vector<std::pair<std::string, double>> out;
    std::unordered_set<std::string> seen;
    for (const auto& set : sets) {
      for (const auto& [cls, v] : set.values) {
        auto key = set.dataset + "/" + cls;
        if (!seen.insert(key).second) throw ConsistencyError(std::string("duplicate ") + what + " entry '" + key + "'");
        out.emplace_back(std::move(key), v);
      }
    }
    return out;
  };
  const auto f1 = pool(f1_by_dataset, "F1");
  const auto len = pool(lengths_by_dataset, "length");
  std::unordered_map<std::string, double> len_of(len.begin(), len.end());
  std::unordered_set<std::string> f1_keys;
  std::vector<std::string> only_f1, only_len;
  LengthF1Correlation out;
  for (const auto& [key, v] : f1) {
    f1_keys.insert(key);
    const auto it = len_of.find(key);
    if (it == len_of.end()) {
      only_f1.push_back(key);
      continue;
    }
    out.keys.push_back(key);
    out.f1.push_back(v);
    out.lengths.push_back(it->second);
  }
  for (const auto& [key, v] : len) {
    if (!f1_keys.contains(key)) only_len.push_back(key);
  }
  if (!only_f1.empty() || !only_len.empty()) {
    std::string msg = "class keys do not match;";
    auto list = [&](const char* label, const std::vector<std::string>& keys) {
      if (keys.empty()) return;
      msg += std::string(" ") + label + ":";
      for (const auto& k : keys) msg += " '" + k + "'";
    };
    list("only in F1", only_f1);
    list("only in lengths", only_len);
    throw ConsistencyError(msg);
  }
  out.result = kendall_tau(out.lengths, out.f1);
  return out;
}

// ---------------------------------------------------------------------------

PredictionSet import_predictions(const fs::path& path, const std::vector<std::string>& class_names) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open predictions '" + path.string() + "'");
  char first = 0;
  while (in.get(first) && std::isspace(static_cast<unsigned char>(first))) {
  }
  const bool jsonl = in && first == '{';
  in.close();

  PredictionSet set;
  const std::unordered_set<std::string> known(class_names.begin(), class_names.end());
  auto check = [&](const std::string& cls, const std::string& where) {
    if (!known.contains(cls)) throw ConsistencyError(where + ": unknown class '" + cls + "'");
  };

  if (jsonl) {
    set = read_predictions(path);
    for (const auto& c : set.class_names) check(c, path.string());
    for (const auto& p : set.predictions) check(p.predicted, path.string() + ": document '" + p.id + "'");
    if (set.class_names.empty()) set.class_names = class_names;
    return set;
  }

  std::ifstream csv_in(path, std::ios::binary);
  CsvReader reader(csv_in);
  set.method = "imported";
  set.class_names = class_names;
  bool first_row = true;
  while (auto row = reader.next()) {
    const auto where = path.string() + ":" + std::to_string(reader.record_line());
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != 2) throw InputError(where + ": expected 2 columns (id,class), got " + std::to_string(row->size()));
    if (first_row && (*row)[0] == "id" && (*row)[1] == "class") {
      first_row = false;
      continue;
    }
    first_row = false;
    check((*row)[1], where);
    set.predictions.push_back({(*row)[0], (*row)[1], std::nullopt, {}});
  }
  if (set.predictions.empty()) throw InputError(path.string() + ": no predictions");
  return set;
}

}  // namespace labelvec
