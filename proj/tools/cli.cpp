#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "labelvec/classify.hpp"
#include "labelvec/corpus.hpp"
#include "labelvec/dataset.hpp"
#include "labelvec/embeddings.hpp"
#include "labelvec/error.hpp"
#include "labelvec/eval.hpp"
#include "labelvec/fingerprint.hpp"
#include "labelvec/lsa.hpp"
#include "labelvec/svd.hpp"
#include "labelvec/word2vec.hpp"

namespace labelvec::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::optional<fs::path> env_data_dir() {
  if (const char* v = std::getenv(kDataDirEnv); v && *v) return fs::path(v);
  return std::nullopt;
}

// Absolute path for `p`: relative to `base`, falling back to the data
// directory when that location does not exist.
std::string resolve_path(const std::string& p, const fs::path& base, const std::optional<fs::path>& data_dir) {
  fs::path path(p);
  if (path.is_absolute()) return path.lexically_normal().string();
  auto candidate = fs::absolute(base / path).lexically_normal();
  if (!fs::exists(candidate) && data_dir) {
    auto alt = fs::absolute(*data_dir / path).lexically_normal();
    if (fs::exists(alt)) return alt.string();
  }
  return candidate.string();
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

Corpus read_corpus(const fs::path& path, const std::optional<fs::path>& specs_path, const std::string& name = {}) {
  LoadOptions options;
  options.name = name;
  if (specs_path) options.class_names = class_names_of(load_class_specs(*specs_path));
  return load_corpus(path, CorpusFormat::kJsonl, options);
}

const json& require(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key) || obj[key].is_null()) throw InputError(std::string(where) + ": missing \"" + key + "\"");
  return obj[key];
}

template <typename T>
T get_as(const json& obj, const char* key, const char* where) {
  try {
    return require(obj, key, where).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string(where) + ": bad \"" + key + "\": " + e.what());
  }
}

SvdMethod parse_svd_method(const std::string& name) {
  if (name == "auto") return SvdMethod::kAuto;
  if (name == "dense") return SvdMethod::kDense;
  if (name == "randomized") return SvdMethod::kRandomized;
  throw InputError("unknown svd method '" + name + "' (expected auto, dense or randomized)");
}

// ---------------------------------------------------------------------------

json default_engine(const std::string& name) {
  if (name == "lsa") return {{"name", name}, {"n_concepts", nullptr}, {"svd", "auto"}};
  if (name == "word2vec") {
    const Word2VecConfig d;
    return {{"name", name},          {"dim", d.dim},           {"window", d.window},
            {"negatives", d.negatives}, {"epochs", d.epochs},     {"min_count", d.min_count},
            {"learning_rate", d.learning_rate}};
  }
  if (name == "imported-embeddings") return {{"name", name}, {"documents_kind", "document"}};
  throw InputError("unknown engine '" + name + "' (expected lsa, word2vec or imported-embeddings)");
}

Word2VecConfig w2v_config(const json& engine, std::uint64_t seed, bool deterministic, std::size_t jobs) {
  Word2VecConfig c;
  c.dim = get_as<std::size_t>(engine, "dim", "engine");
  c.window = get_as<std::size_t>(engine, "window", "engine");
  c.negatives = get_as<std::size_t>(engine, "negatives", "engine");
  c.epochs = get_as<std::size_t>(engine, "epochs", "engine");
  c.min_count = get_as<std::size_t>(engine, "min_count", "engine");
  c.learning_rate = get_as<double>(engine, "learning_rate", "engine");
  c.seed = seed;
  c.deterministic = deterministic;
  c.jobs = jobs;
  return c;
}

}  // namespace

std::string RunConfig::fingerprint() const { return config_fingerprint(config); }

int cmd_classify(const RunConfig& run, std::ostream& out) {
  const auto& cfg = run.config;
  const auto specs_path = get_as<std::string>(cfg, "specs", "config");
  const auto specs = load_class_specs(specs_path);
  const auto corpus = read_corpus(get_as<std::string>(cfg, "corpus", "config"), fs::path(specs_path));
  const auto seed = get_as<std::uint64_t>(cfg, "seed", "config");
  const auto deterministic = get_as<bool>(cfg, "deterministic", "config");
  const auto& engine_cfg = require(cfg, "engine", "config");
  const auto& method_cfg = require(cfg, "method", "config");
  const auto engine_name = get_as<std::string>(engine_cfg, "name", "engine");

  PipelineConfig pipeline;
  pipeline.method = parse_method(get_as<std::string>(method_cfg, "name", "method"));
  pipeline.label.k = get_as<std::size_t>(method_cfg, "k", "method");
  if (method_cfg.contains("min_similarity") && !method_cfg["min_similarity"].is_null()) {
    pipeline.label.min_similarity = get_as<double>(method_cfg, "min_similarity", "method");
  }
  pipeline.label.clean = CleanPolicy::parse(get_as<std::string>(method_cfg, "clean", "method"));
  pipeline.jobs = run.jobs;
  pipeline.fingerprint = run.fingerprint();

  PredictionSet predictions;
  if (engine_name == "lsa") {
    std::optional<LsaModel> model;
    if (engine_cfg.contains("model") && !engine_cfg["model"].is_null()) {
      model = LsaModel::load(get_as<std::string>(engine_cfg, "model", "engine"));
    } else {
      SvdOptions svd;
      svd.method = parse_svd_method(get_as<std::string>(engine_cfg, "svd", "engine"));
      svd.seed = seed;
      // One concept per class unless configured.
      const auto n_concepts = engine_cfg.contains("n_concepts") && !engine_cfg["n_concepts"].is_null()
                                  ? get_as<std::size_t>(engine_cfg, "n_concepts", "engine")
                                  : specs.size();
      model = fit_lsa(corpus, n_concepts, svd);
    }
    predictions = run_pipeline(corpus, specs, LsaEngine{*model}, pipeline);
  } else if (engine_name == "word2vec") {
    const auto config = w2v_config(engine_cfg, seed, deterministic, run.jobs);
    std::optional<WordEmbeddingTable> table;
    if (engine_cfg.contains("table") && !engine_cfg["table"].is_null()) {
      table.emplace(load_embedding_file(get_as<std::string>(engine_cfg, "table", "engine"), {EmbeddingKind::kWord}),
                    config);
    } else {
      table = train_word2vec(corpus, config);
    }
    predictions = run_pipeline(corpus, specs, Word2VecEngine{*table}, pipeline);
  } else if (engine_name == "imported-embeddings") {
    const auto docs_kind = parse_embedding_kind(get_as<std::string>(engine_cfg, "documents_kind", "engine"));
    const auto documents = load_embedding_file(get_as<std::string>(engine_cfg, "documents", "engine"), {docs_kind});
    const auto keywords =
        load_embedding_file(get_as<std::string>(engine_cfg, "keywords", "engine"), {EmbeddingKind::kKeyword});
    predictions = run_pipeline(corpus, specs, ImportedEngine{documents, keywords}, pipeline);
  } else {
    default_engine(engine_name);  // throws for unknown names
  }

  ensure_parent(run.output);
  write_predictions(predictions, run.output);
  out << "classified " << predictions.predictions.size() << " documents (" << predictions.excluded.size()
      << " excluded, " << predictions.ties << " ties) with " << predictions.engine << "/" << predictions.method
      << ", fingerprint " << predictions.config_fingerprint << " -> " << run.output.string() << '\n';
  return kExitOk;
}

namespace {

// ---------------------------------------------------------------------------
// Subcommand option holders

struct IngestArgs {
  std::string manifest;
  std::string out;
  std::string report;
  std::string data_dir;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  const fs::path manifest_path(a.manifest);
  const auto manifest_json = read_json_file(manifest_path);
  auto manifest = load_manifest(manifest_path);
  if (!a.data_dir.empty()) {
    manifest.base_dir = a.data_dir;
  } else if (auto env = env_data_dir()) {
    manifest.base_dir = *env;
  }
  const auto result = ingest(manifest);
  const auto fp = config_fingerprint(manifest_json);

  ensure_parent(a.out);
  write_corpus_jsonl(result.corpus, a.out);
  auto report = result.report.to_json();
  report["config_fingerprint"] = fp;
  if (!a.report.empty()) write_text(a.report, report.dump(2) + "\n");

  out << "dataset " << result.report.dataset << ": " << result.report.final_size << " documents";
  for (const auto& [split, n] : result.report.split_sizes) out << ", " << split << " " << n;
  if (manifest.min_words) out << ", removed " << result.report.removed_short << " shorter than " << *manifest.min_words << " words";
  out << '\n';
  for (const auto& c : result.report.checks) {
    out << "  " << (c.ok() ? "ok      " : "MISMATCH") << ' ' << c.split << ' ' << c.class_name << ": expected "
        << c.expected << ", got " << c.actual << '\n';
  }
  if (!result.report.ok()) {
    for (const auto& c : result.report.failures()) {
      err << "count mismatch in " << c.split << " for class '" << c.class_name << "': expected " << c.expected
          << ", got " << c.actual << '\n';
    }
    return kExitConsistency;
  }
  return kExitOk;
}

struct SplitArgs {
  std::string corpus;
  std::string out;
  std::size_t max_seq_len = 512;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  const auto corpus = read_corpus(a.corpus, std::nullopt);
  std::ostringstream text;
  std::size_t paragraphs = 0;
  for (const auto& doc : corpus) {
    const auto set = split_document(doc, a.max_seq_len);
    for (std::size_t k = 0; k < set.paragraphs.size(); ++k) {
      ordered_json rec;
      rec["id"] = doc.id + "#" + std::to_string(k);
      rec["parent"] = doc.id;
      rec["words"] = set.paragraphs[k].word_count;
      rec["text"] = set.paragraphs[k].text();
      text << rec.dump() << '\n';
      ++paragraphs;
    }
  }
  write_text(a.out, text.str());
  out << "split " << corpus.size() << " documents into " << paragraphs << " paragraphs (max_seq_len " << a.max_seq_len
      << ") -> " << a.out << '\n';
  return kExitOk;
}

struct TrainW2vArgs {
  std::string corpus;
  std::string out;
  std::string format = "jsonl";
  Word2VecConfig config;
  bool nondeterministic = false;
  std::size_t jobs = 1;
};

EmbeddingFileFormat parse_file_format(const std::string& name) {
  if (name == "jsonl") return EmbeddingFileFormat::kJsonl;
  if (name == "packed") return EmbeddingFileFormat::kPacked;
  throw InputError("unknown embedding format '" + name + "' (expected jsonl or packed)");
}

int cmd_train_w2v(TrainW2vArgs a, std::ostream& out) {
  const auto format = parse_file_format(a.format);
  a.config.deterministic = !a.nondeterministic;
  a.config.jobs = a.jobs;
  const auto corpus = read_corpus(a.corpus, std::nullopt);
  auto cfg_json = a.config.to_json();
  cfg_json.erase("jobs");
  cfg_json["corpus"] = fs::absolute(a.corpus).lexically_normal().string();
  const auto fp = config_fingerprint(cfg_json);
  const auto table = train_word2vec(corpus, a.config);

  EmbeddingMatrix named(EmbeddingKind::kWord, table.dim(), "word2vec " + fp);
  named.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) named.add(table.vectors().id(r), std::nullopt, table.vector(r));
  ensure_parent(a.out);
  write_embedding_file(named, a.out, format);
  out << "trained " << table.size() << " word vectors (dim " << table.dim() << ", fingerprint " << fp << ") -> " << a.out
      << '\n';
  return kExitOk;
}

struct FitLsaArgs {
  std::string corpus;
  std::string out;
  std::string specs;
  std::optional<std::size_t> n_concepts;
  std::string svd = "auto";
  std::uint64_t seed = 1;
};

int cmd_fit_lsa(const FitLsaArgs& a, std::ostream& out) {
  const auto corpus = read_corpus(a.corpus, std::nullopt);
  if (!a.n_concepts && a.specs.empty()) throw InputError("fit-lsa needs --n-concepts or --specs");
  const auto n_concepts = a.n_concepts ? *a.n_concepts : load_class_specs(a.specs).size();
  SvdOptions svd;
  svd.method = parse_svd_method(a.svd);
  svd.seed = a.seed;
  const json cfg = {{"corpus", fs::absolute(a.corpus).lexically_normal().string()},
                    {"n_concepts", n_concepts},
                    {"svd", a.svd},
                    {"seed", a.seed}};
  const auto fp = config_fingerprint(cfg);
  const auto model = fit_lsa(corpus, n_concepts, svd);
  ensure_parent(a.out);
  model.save(a.out, fp);
  out << "fitted lsa: " << model.vocabulary_size() << " terms x " << model.doc_ids().size() << " documents, "
      << model.n_concepts() << " concepts (fingerprint " << fp << ") -> " << a.out << '\n';
  return kExitOk;
}

struct ClassifyArgs {
  std::string config;
  std::string corpus, specs, engine, method, clean, out;
  std::string lsa_model, w2v_table, documents, keywords, documents_kind, svd;
  std::optional<std::size_t> k, max_seq_len, n_concepts, dim, window, negatives, epochs, min_count;
  std::optional<double> min_similarity, learning_rate;
  std::optional<std::uint64_t> seed;
  std::optional<bool> deterministic;
  std::string data_dir;
  std::size_t jobs = 1;
};

RunConfig build_run_config(const ClassifyArgs& a) {
  const auto data_dir = a.data_dir.empty() ? env_data_dir() : std::optional<fs::path>(a.data_dir);
  json cfg = {{"engine", default_engine("lsa")},
              {"method", {{"name", "label-vector"}, {"k", 100}, {"clean", "none"}, {"max_seq_len", 512}}},
              {"seed", 1},
              {"deterministic", true}};
  std::optional<std::string> output;

  if (!a.config.empty()) {
    const fs::path config_path(a.config);
    auto file = read_json_file(config_path);
    if (!file.is_object()) throw InputError(a.config + ": config must be a JSON object");
    const auto base = config_path.parent_path();
    for (const char* key : {"corpus", "specs", "output"}) {
      if (file.contains(key) && file[key].is_string()) file[key] = resolve_path(file[key], base, data_dir);
    }
    if (file.contains("engine") && file["engine"].is_object()) {
      auto& e = file["engine"];
      for (const char* key : {"model", "table", "documents", "keywords"}) {
        if (e.contains(key) && e[key].is_string()) e[key] = resolve_path(e[key], base, data_dir);
      }
      if (e.contains("name") && e["name"].is_string()) {
        auto merged = default_engine(e["name"]);
        merged.merge_patch(e);
        e = merged;
      }
    }
    cfg.merge_patch(file);
    if (cfg.contains("output")) {
      output = cfg["output"].get<std::string>();
      cfg.erase("output");
    }
  }

  const fs::path cwd = fs::current_path();
  auto& engine = cfg["engine"];
  auto& method = cfg["method"];
  if (!a.engine.empty() && a.engine != engine.value("name", std::string{})) engine = default_engine(a.engine);
  if (!a.corpus.empty()) cfg["corpus"] = resolve_path(a.corpus, cwd, data_dir);
  if (!a.specs.empty()) cfg["specs"] = resolve_path(a.specs, cwd, data_dir);
  if (!a.out.empty()) output = fs::absolute(a.out).lexically_normal().string();
  if (!a.method.empty()) method["name"] = a.method;
  if (a.k) method["k"] = *a.k;
  if (a.min_similarity) method["min_similarity"] = *a.min_similarity;
  if (!a.clean.empty()) method["clean"] = CleanPolicy::parse(a.clean).to_string();
  if (a.max_seq_len) method["max_seq_len"] = *a.max_seq_len;
  if (a.seed) cfg["seed"] = *a.seed;
  if (a.deterministic) cfg["deterministic"] = *a.deterministic;
  if (!a.lsa_model.empty()) engine["model"] = resolve_path(a.lsa_model, cwd, data_dir);
  if (!a.w2v_table.empty()) engine["table"] = resolve_path(a.w2v_table, cwd, data_dir);
  if (!a.documents.empty()) engine["documents"] = resolve_path(a.documents, cwd, data_dir);
  if (!a.keywords.empty()) engine["keywords"] = resolve_path(a.keywords, cwd, data_dir);
  if (!a.documents_kind.empty()) engine["documents_kind"] = a.documents_kind;
  if (!a.svd.empty()) engine["svd"] = a.svd;
  if (a.n_concepts) engine["n_concepts"] = *a.n_concepts;
  if (a.dim) engine["dim"] = *a.dim;
  if (a.window) engine["window"] = *a.window;
  if (a.negatives) engine["negatives"] = *a.negatives;
  if (a.epochs) engine["epochs"] = *a.epochs;
  if (a.min_count) engine["min_count"] = *a.min_count;
  if (a.learning_rate) engine["learning_rate"] = *a.learning_rate;
  if (method.contains("clean") && method["clean"].is_string()) {
    method["clean"] = CleanPolicy::parse(method["clean"].get<std::string>()).to_string();
  }
  parse_method(method.value("name", std::string{}));

  if (!output) throw InputError("classify needs an output path (--out or \"output\" in the config)");
  for (const char* key : {"corpus", "specs"}) {
    if (!cfg.contains(key)) throw InputError(std::string("classify needs \"") + key + "\" (config or --" + key + ")");
  }
  return RunConfig{std::move(cfg), *output, a.jobs};
}

struct EvalArgs {
  std::string predictions;
  std::string corpus;
  std::string specs;
  std::string name;
  std::string out;
  std::string csv;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const std::optional<fs::path> specs = a.specs.empty() ? std::nullopt : std::optional<fs::path>(a.specs);
  const auto corpus = read_corpus(a.corpus, specs, a.name);
  const auto predictions = import_predictions(a.predictions, corpus.class_names());
  const auto report = evaluate(predictions, corpus);
  if (!a.out.empty()) {
    ensure_parent(a.out);
    write_eval_report(report, a.out);
  }
  if (!a.csv.empty()) write_text(a.csv, report.per_class_csv());
  out << report.to_table();
  return kExitOk;
}

struct CorrelateArgs {
  std::vector<std::string> reports;
  std::vector<std::string> corpora;
  std::vector<std::string> specs;
  std::string out;
  std::string csv;
};

int cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
  if (a.reports.size() != a.corpora.size()) {
    throw InputError("correlate needs one --corpus per --report (" + std::to_string(a.reports.size()) + " reports, " +
                     std::to_string(a.corpora.size()) + " corpora)");
  }
  if (!a.specs.empty() && a.specs.size() != a.corpora.size()) {
    throw InputError("correlate needs either no --specs or one per --corpus");
  }
  std::vector<DatasetClassValues> f1, lengths;
  ordered_json sources = ordered_json::array();
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    const auto report = read_eval_report(a.reports[i]);
    const auto specs = a.specs.empty() ? std::nullopt : std::optional<fs::path>(a.specs[i]);
    const auto corpus = read_corpus(a.corpora[i], specs, report.dataset);
    f1.push_back({report.dataset, report.per_class_f1()});
    lengths.push_back({corpus.name(), avg_doc_words_per_class(corpus)});
    sources.push_back({{"dataset", report.dataset},
                       {"method", report.method},
                       {"engine", report.engine},
                       {"config_fingerprint", report.config_fingerprint}});
  }
  const auto corr = correlate_length_vs_f1(f1, lengths);
  auto j = corr.to_json();
  j["sources"] = std::move(sources);
  if (!a.out.empty()) write_text(a.out, j.dump(2) + "\n");
  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "class,avg_words,f1\n";
    for (std::size_t i = 0; i < corr.keys.size(); ++i) {
      csv << '"' << corr.keys[i] << "\"," << corr.lengths[i] << ',' << corr.f1[i] << '\n';
    }
    write_text(a.csv, csv.str());
  }
  out << std::fixed << std::setprecision(4) << "Kendall tau " << corr.result.tau << "  p-value " << corr.result.p_value
      << "  n " << corr.result.n << (corr.result.tie_corrected ? "  (tie-corrected)" : "") << '\n';
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> reports;
  std::string csv;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<EvalReport> reports;
  for (const auto& p : a.reports) reports.push_back(read_eval_report(p));
  std::vector<std::string> datasets, rows;
  std::map<std::pair<std::string, std::string>, double> cell;
  for (const auto& r : reports) {
    const auto row = r.engine + " / " + r.method;
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    cell[{row, r.dataset}] = r.micro_f1;
  }
  std::size_t w0 = 6;
  for (const auto& r : rows) w0 = std::max(w0, r.size());
  std::vector<std::size_t> widths;
  for (const auto& d : datasets) widths.push_back(std::max<std::size_t>(d.size(), 6));
  out << std::left << std::setw(static_cast<int>(w0)) << "model";
  for (std::size_t c = 0; c < datasets.size(); ++c) out << "  " << std::right << std::setw(static_cast<int>(widths[c])) << datasets[c];
  out << '\n' << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(w0)) << r;
    for (std::size_t c = 0; c < datasets.size(); ++c) {
      out << "  " << std::right << std::setw(static_cast<int>(widths[c]));
      if (auto it = cell.find({r, datasets[c]}); it != cell.end()) {
        out << it->second;
      } else {
        out << "-";
      }
    }
    out << '\n';
  }
  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17)
        << "dataset,engine,method,config_fingerprint,micro_f1,micro_f1_scored_only,n_scored,n_excluded\n";
    for (const auto& r : reports) {
      csv << r.dataset << ',' << r.engine << ',' << r.method << ',' << r.config_fingerprint << ',' << r.micro_f1 << ','
          << r.micro_f1_scored_only << ',' << r.n_scored << ',' << r.n_excluded << '\n';
    }
    write_text(a.csv, csv.str());
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised keyword-driven text classification toolkit", "labelvec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "labelvec 0.1.0");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Load a dataset manifest, validate class counts, write a corpus");
  ingest->add_option("--manifest", ingest_args.manifest, "Dataset manifest JSON")->required();
  ingest->add_option("--out", ingest_args.out, "Corpus JSONL to write")->required();
  ingest->add_option("--report", ingest_args.report, "Validation report JSON to write");
  ingest->add_option("--data-dir", ingest_args.data_dir, std::string("Data directory (default $") + kDataDirEnv + ")");

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Split documents into sentence-aligned paragraphs");
  split->add_option("--corpus", split_args.corpus, "Corpus JSONL")->required();
  split->add_option("--out", split_args.out, "Paragraph JSONL to write")->required();
  split->add_option("--max-seq-len", split_args.max_seq_len, "Encoder input limit in tokens")->capture_default_str();

  TrainW2vArgs w2v_args;
  auto* w2v = app.add_subcommand("train-w2v", "Train skip-gram word vectors");
  w2v->add_option("--corpus", w2v_args.corpus, "Corpus JSONL")->required();
  w2v->add_option("--out", w2v_args.out, "Embedding file to write")->required();
  w2v->add_option("--format", w2v_args.format, "jsonl or packed")->capture_default_str();
  w2v->add_option("--dim", w2v_args.config.dim)->capture_default_str();
  w2v->add_option("--window", w2v_args.config.window)->capture_default_str();
  w2v->add_option("--negatives", w2v_args.config.negatives)->capture_default_str();
  w2v->add_option("--epochs", w2v_args.config.epochs)->capture_default_str();
  w2v->add_option("--min-count", w2v_args.config.min_count)->capture_default_str();
  w2v->add_option("--lr", w2v_args.config.learning_rate)->capture_default_str();
  w2v->add_option("--seed", w2v_args.config.seed)->capture_default_str();
  w2v->add_flag("--nondeterministic", w2v_args.nondeterministic, "Train with --jobs unsynchronized workers");
  w2v->add_option("--jobs", w2v_args.jobs, "Worker threads")->capture_default_str();

  FitLsaArgs lsa_args;
  auto* lsa = app.add_subcommand("fit-lsa", "Fit a TF-IDF latent semantic analysis model");
  lsa->add_option("--corpus", lsa_args.corpus, "Corpus JSONL")->required();
  lsa->add_option("--out", lsa_args.out, "Model JSON to write")->required();
  lsa->add_option("--n-concepts", lsa_args.n_concepts, "Concepts to keep (default: number of classes in --specs)");
  lsa->add_option("--specs", lsa_args.specs, "Class spec JSON");
  lsa->add_option("--svd", lsa_args.svd, "auto, dense or randomized")->capture_default_str();
  lsa->add_option("--seed", lsa_args.seed)->capture_default_str();

  ClassifyArgs cls_args;
  auto* cls = app.add_subcommand("classify", "Classify a corpus from class keywords");
  cls->add_option("--config", cls_args.config, "Run config JSON; flags override it");
  cls->add_option("--corpus", cls_args.corpus, "Corpus JSONL");
  cls->add_option("--specs", cls_args.specs, "Class keyword spec JSON");
  cls->add_option("--out", cls_args.out, "PredictionSet file to write");
  cls->add_option("--engine", cls_args.engine, "lsa, word2vec or imported-embeddings");
  cls->add_option("--method", cls_args.method, "centroid-baseline or label-vector");
  cls->add_option("--k", cls_args.k, "Candidate documents per class");
  cls->add_option("--min-similarity", cls_args.min_similarity, "Drop candidates below this cosine");
  cls->add_option("--clean", cls_args.clean, "none or sigma(alpha)");
  cls->add_option("--max-seq-len", cls_args.max_seq_len, "Encoder input limit in tokens");
  cls->add_option("--lsa-model", cls_args.lsa_model, "Fitted LSA model instead of fitting one");
  cls->add_option("--n-concepts", cls_args.n_concepts, "LSA concepts (default: number of classes)");
  cls->add_option("--svd", cls_args.svd, "auto, dense or randomized");
  cls->add_option("--w2v-table", cls_args.w2v_table, "Trained word vectors instead of training");
  cls->add_option("--dim", cls_args.dim);
  cls->add_option("--window", cls_args.window);
  cls->add_option("--negatives", cls_args.negatives);
  cls->add_option("--epochs", cls_args.epochs);
  cls->add_option("--min-count", cls_args.min_count);
  cls->add_option("--lr", cls_args.learning_rate);
  cls->add_option("--documents", cls_args.documents, "Imported document or paragraph embeddings");
  cls->add_option("--documents-kind", cls_args.documents_kind, "Kind of packed document embeddings");
  cls->add_option("--keywords", cls_args.keywords, "Imported keyword embeddings");
  cls->add_option("--seed", cls_args.seed, "Random seed for SVD and word2vec");
  cls->add_option("--deterministic", cls_args.deterministic, "Single-worker reproducible word2vec training");
  cls->add_option("--data-dir", cls_args.data_dir, std::string("Data directory (default $") + kDataDirEnv + ")");
  cls->add_option("--jobs", cls_args.jobs, "Worker threads")->capture_default_str();

  EvalArgs eval_args;
  auto* ev = app.add_subcommand("eval", "Score predictions against gold classes");
  ev->add_option("--predictions", eval_args.predictions, "PredictionSet file or id,class CSV")->required();
  ev->add_option("--corpus", eval_args.corpus, "Gold corpus JSONL")->required();
  ev->add_option("--specs", eval_args.specs, "Class spec JSON fixing class order");
  ev->add_option("--name", eval_args.name, "Dataset name (default corpus file stem)");
  ev->add_option("--out", eval_args.out, "EvalReport JSON to write");
  ev->add_option("--csv", eval_args.csv, "Per-class CSV to write");

  CorrelateArgs corr_args;
  auto* corr = app.add_subcommand("correlate", "Kendall tau between class document length and per-class F1");
  corr->add_option("--report", corr_args.reports, "EvalReport JSON (repeat per dataset)")->required();
  corr->add_option("--corpus", corr_args.corpora, "Corpus JSONL for each report, in order")->required();
  corr->add_option("--specs", corr_args.specs, "Class spec JSON for each corpus, in order");
  corr->add_option("--out", corr_args.out, "CorrelationResult JSON to write");
  corr->add_option("--csv", corr_args.csv, "Plot-ready pairs CSV to write");

  ReportArgs report_args;
  auto* rep = app.add_subcommand("report", "Tabulate micro-F1 across eval reports");
  rep->add_option("--report", report_args.reports, "EvalReport JSON (repeatable)")->required();
  rep->add_option("--csv", report_args.csv, "Long-form CSV to write");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_args, out, err);
    if (*split) return cmd_split(split_args, out);
    if (*w2v) return cmd_train_w2v(w2v_args, out);
    if (*lsa) return cmd_fit_lsa(lsa_args, out);
    if (*cls) return cmd_classify(build_run_config(cls_args), out);
    if (*ev) return cmd_eval(eval_args, out);
    if (*corr) return cmd_correlate(corr_args, out);
    if (*rep) return cmd_report(report_args, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConsistencyError& e) {
    err << "consistency error: " << e.what() << '\n';
    return kExitConsistency;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace labelvec::cli
