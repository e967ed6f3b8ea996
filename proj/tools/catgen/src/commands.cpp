// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "catgen/cli.hpp"
#include "catgen/error.hpp"
#include "config_json.hpp"

#ifndef CATGEN_VERSION
#define CATGEN_VERSION "unknown"
#endif

namespace catgen::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::BadConfig, what); }

// ---------------------------------------------------------------- files

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::istringstream in(slurp(path));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

std::vector<TokenSeq> read_tokens(const fs::path& path) {
  std::vector<TokenSeq> out;
  const auto lines = lines_of(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!blank(lines[i])) out.push_back(parse_token_string(lines[i], i + 1));
  }
  return out;
}

std::string token_lines(const std::vector<TokenSeq>& seqs) {
  std::string out;
  for (const auto& s : seqs) out += to_token_string(s) + "\n";
  return out;
}

const fs::path& need(const fs::path& p, const char* key) {
  if (p.empty()) bad(std::string("missing path: ") + key);
  if (!fs::exists(p)) throw Error(Errc::IoError, std::string(key) + " does not exist: " + p.string());
  return p;
}

std::vector<TokenSeq> encode_dataset(const std::vector<Structure>& structs, bool keep_order) {
  std::vector<TokenSeq> out;
  out.reserve(structs.size());
  for (const auto& s : structs) out.push_back(encode(keep_order ? s : canonicalize(s)));
  return out;
}

// ---------------------------------------------------------------- context

struct Context {
  std::string command;
  RunConfig cfg;
  json raw;  // merged config before defaults
  fs::path dir;
  std::vector<std::string> outputs;
  ordered_json summary = ordered_json::object();
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  std::uint64_t seed() const {
    if (!cfg.seed) bad("a seed is required: pass --seed, set \"seed\" in the config or export CATGEN_SEED");
    return *cfg.seed;
  }

  // Resolves a file name inside the run directory and records it.
  fs::path output(const std::string& name) {
    outputs.push_back(name);
    return dir / name;
  }

  fs::path main_output(const std::string& default_name) {
    if (cfg.paths.output.empty()) return output(default_name);
    outputs.push_back(cfg.paths.output.string());
    return cfg.paths.output.is_absolute() ? cfg.paths.output : dir / cfg.paths.output;
  }

  std::optional<Bypass> bypass() const {
    if (!cfg.sample.bypass) return std::nullopt;
    return Bypass::on(*cfg.sample.bypass);
  }
};

// ---------------------------------------------------------------- commands

int cmd_encode(Context& ctx) {
  const auto lines = lines_of(need(ctx.cfg.paths.input, "paths.input"));
  std::string tokens, status;
  std::size_t ok = 0, failed = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    try {
      const Structure s = parse_structure_line(lines[i], i + 1);
      tokens += to_token_string(encode(ctx.cfg.keep_order ? s : canonicalize(s))) + "\n";
      status += std::to_string(i + 1) + "\tok\n";
      ++ok;
    } catch (const Error& e) {
      *ctx.err << "line " << (i + 1) << ": " << e.what() << "\n";
      status += std::to_string(i + 1) + "\terror\t" + std::string(to_string(e.code())) + "\n";
      ++failed;
    }
  }
  write_text(ctx.main_output("tokens.txt"), tokens);
  write_text(ctx.output("status.tsv"), status);
  ctx.summary["encoded"] = ok;
  ctx.summary["failed"] = failed;
  return failed ? kPartial : kOk;
}

int cmd_decode(Context& ctx) {
  const auto lines = lines_of(need(ctx.cfg.paths.input, "paths.input"));
  const Bypass bypass = ctx.bypass().value_or(Bypass::off());
  std::vector<Structure> structs;
  std::string status;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const std::string line_no = std::to_string(i + 1);
    try {
      const DecodeResult r = decode(parse_token_string(lines[i], i + 1), bypass);
      if (const auto* d = std::get_if<Decoded>(&r)) {
        structs.push_back(d->structure);
        structs.back().id = "line-" + line_no;
        status += line_no + "\tok\t" + std::to_string(d->skipped) + "\n";
      } else {
        const auto& e = std::get<DecodeError>(r);
        *ctx.err << "line " << line_no << ": " << to_string(e.kind) << " at token " << e.position << "\n";
        status += line_no + "\t" + std::string(to_string(e.kind)) + "\t" + std::to_string(e.position) + "\n";
        ++failed;
      }
    } catch (const ParseError& e) {
      *ctx.err << e.what() << "\n";
      status += line_no + "\tparse_error\t-\n";
      ++failed;
    }
  }
  write_dataset(structs, ctx.main_output("structures.jsonl"));
  write_text(ctx.output("status.tsv"), status);
  ctx.summary["decoded"] = structs.size();
  ctx.summary["failed"] = failed;
  return failed ? kPartial : kOk;
}

TrainConfig train_config(const Context& ctx) {
  TrainConfig tc = ctx.cfg.train;
  tc.seed = mix_seed(ctx.seed(), 1);
  return tc;
}

void record_lm(Context& ctx, const LmTrainResult& r) {
  save_checkpoint(r.model, ctx.output("checkpoint"));
  write_curve_csv(r.curve, "loss", ctx.output("loss.csv"));
  ctx.summary["final_train_loss"] = r.final_train_loss;
  ctx.summary["parameters"] = r.model.weights.size();
  *ctx.out << "final train loss " << r.final_train_loss << "\n";
}

std::vector<TokenSeq> optional_tokens(const Context& ctx, const fs::path& dataset) {
  if (dataset.empty()) return {};
  return encode_dataset(read_dataset(need(dataset, "paths.val")), ctx.cfg.keep_order);
}

int cmd_train(Context& ctx) {
  const auto train = encode_dataset(read_dataset(need(ctx.cfg.paths.train, "paths.train")), ctx.cfg.keep_order);
  const auto val = optional_tokens(ctx, ctx.cfg.paths.val);
  LMConfig mc = ctx.cfg.model;
  mc.seed = ctx.seed();
  record_lm(ctx, train_lm(init_lm(mc), train, val, train_config(ctx)));
  return kOk;
}

int cmd_finetune(Context& ctx) {
  const LanguageModel pre = load_lm(need(ctx.cfg.paths.init_checkpoint, "paths.init_checkpoint"));
  const auto train = encode_dataset(read_dataset(need(ctx.cfg.paths.train, "paths.train")), ctx.cfg.keep_order);
  const auto val = optional_tokens(ctx, ctx.cfg.paths.val);
  // Without an explicit "model" section the checkpoint's own architecture is
  // taken as the expected one.
  const LMConfig expected = ctx.raw.contains("model") ? ctx.cfg.model : pre.config;
  record_lm(ctx, finetune_lm(pre, expected, train, val, train_config(ctx)));
  return kOk;
}

int cmd_train_detector(Context& ctx) {
  const auto train = read_labeled(need(ctx.cfg.paths.train, "paths.train"));
  std::vector<LabeledSeq> val;
  if (!ctx.cfg.paths.val.empty()) val = read_labeled(need(ctx.cfg.paths.val, "paths.val"));
  LMConfig mc = ctx.cfg.model;
  mc.seed = ctx.seed();
  const DetectorTrainResult r = train_detector(init_detector(mc), train, val, train_config(ctx));
  save_checkpoint(r.model, ctx.output("detector"));
  write_curve_csv(r.curve, "loss", ctx.output("loss.csv"));
  if (!val.empty()) write_curve_csv(r.curve, "accuracy", ctx.output("accuracy.csv"));
  ctx.summary["final_accuracy"] = r.final_accuracy;
  *ctx.out << "final accuracy " << r.final_accuracy << (val.empty() ? " (train)" : " (val)") << "\n";
  return kOk;
}

GenerateOptions generate_options(const Context& ctx, double temperature) {
  GenerateOptions g;
  g.n = ctx.cfg.sample.n;
  g.temperature = temperature;
  g.max_len = ctx.cfg.sample.max_len;
  g.seed = ctx.seed();
  if (ctx.cfg.sample.lattice_prompt) {
    for (const auto& s : read_dataset(need(ctx.cfg.paths.lattices, "paths.lattices"))) g.lattices.push_back(s.lattice);
    if (g.lattices.empty()) throw Error(Errc::EmptyInput, "lattice prompt file holds no structures");
  }
  return g;
}

int cmd_generate(Context& ctx) {
  const LanguageModel m = load_lm(need(ctx.cfg.paths.checkpoint, "paths.checkpoint"));
  const Generated g = generate(m, generate_options(ctx, ctx.cfg.sample.temperature));
  const Bypass bypass = ctx.bypass().value_or(Bypass::off());
  std::vector<Structure> structs;
  std::string status;
  for (std::size_t i = 0; i < g.tokens.size(); ++i) {
    const DecodeResult r = decode(g.tokens[i], bypass);
    status += std::to_string(i);
    if (const auto* d = std::get_if<Decoded>(&r)) {
      structs.push_back(d->structure);
      structs.back().id = "gen-" + std::to_string(i);
      status += "\tok\t" + std::to_string(d->skipped);
    } else {
      const auto& e = std::get<DecodeError>(r);
      status += "\t" + std::string(to_string(e.kind)) + "\t" + std::to_string(e.position);
    }
    status += g.truncated[i] ? "\ttruncated\n" : "\n";
  }
  write_text(ctx.output("tokens.txt"), token_lines(g.tokens));
  write_dataset(structs, ctx.output("structures.jsonl"));
  write_text(ctx.output("status.tsv"), status);
  ctx.summary["generated"] = g.tokens.size();
  ctx.summary["decoded"] = structs.size();
  *ctx.out << structs.size() << " of " << g.tokens.size() << " sequences decoded\n";
  return kOk;
}

struct EvalData {
  std::vector<Structure> gt, train;
  std::optional<DetectorModel> detector;
};

EvalData load_eval_data(const Context& ctx) {
  EvalData d;
  d.gt = read_dataset(need(ctx.cfg.paths.gt, "paths.gt"));
  if (!ctx.cfg.paths.train.empty()) d.train = read_dataset(need(ctx.cfg.paths.train, "paths.train"));
  if (!ctx.cfg.paths.detector.empty()) d.detector = load_detector(need(ctx.cfg.paths.detector, "paths.detector"));
  return d;
}

EvalInputs eval_inputs(const Context& ctx, const EvalData& d, const std::vector<TokenSeq>& gen) {
  EvalInputs in;
  in.gen = &gen;
  in.gt = &d.gt;
  in.train = d.train.empty() ? nullptr : &d.train;
  in.detector = d.detector ? &*d.detector : nullptr;
  in.roles = ctx.cfg.roles ? &*ctx.cfg.roles : nullptr;
  in.bypass = ctx.bypass().value_or(Bypass::off());
  in.metrics = ctx.cfg.metrics;
  in.seed = ctx.seed();
  return in;
}

void note_skipped(const Context& ctx, const EvaluationReport& r) {
  if (r.validity.generation.numerator == 0) {
    *ctx.err << "note: no generation-valid items; coverage, property and diversity are omitted\n";
  } else if (r.n_fully_valid == 0) {
    *ctx.err << "note: no item passed every validity check; property and diversity are omitted\n";
  }
}

int cmd_evaluate(Context& ctx) {
  const auto gen = read_tokens(need(ctx.cfg.paths.gen, "paths.gen"));
  const EvalData d = load_eval_data(ctx);
  const EvaluationReport r = evaluate(eval_inputs(ctx, d, gen));
  note_skipped(ctx, r);
  write_text(ctx.output("report.json"), report_json(r) + "\n");
  const std::string table = format_table({r});
  write_text(ctx.output("table.txt"), table);
  *ctx.out << table;
  ctx.summary["n_generated"] = r.n_generated;
  ctx.summary["n_fully_valid"] = r.n_fully_valid;
  return kOk;
}

std::string temperature_tag(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

int cmd_sweep(Context& ctx) {
  if (ctx.cfg.sample.temperatures.empty()) bad("sample.temperatures is empty");
  const LanguageModel m = load_lm(need(ctx.cfg.paths.checkpoint, "paths.checkpoint"));
  const EvalData d = load_eval_data(ctx);
  std::vector<EvaluationReport> rows;
  for (double t : ctx.cfg.sample.temperatures) {
    const Generated g = generate(m, generate_options(ctx, t));
    write_text(ctx.output("tokens-t" + temperature_tag(t) + ".txt"), token_lines(g.tokens));
    EvalInputs in = eval_inputs(ctx, d, g.tokens);
    in.temperature = t;
    rows.push_back(evaluate(in));
    note_skipped(ctx, rows.back());
  }
  write_text(ctx.output("report.json"), report_json(rows) + "\n");
  write_text(ctx.output("sweep.csv"), format_csv(rows));
  const std::string table = format_table(rows);
  write_text(ctx.output("table.txt"), table);
  *ctx.out << table;
  ctx.summary["rows"] = rows.size();
  return kOk;
}

int cmd_corrupt(Context& ctx) {
  auto structs = read_dataset(need(ctx.cfg.paths.input, "paths.input"));
  if (!ctx.cfg.keep_order) {
    for (auto& s : structs) s = canonicalize(std::move(s));
  }
  const auto labeled = build_half_corrupted(structs, ctx.seed());
  write_labeled(labeled, ctx.main_output("labeled.tsv"));
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labeled) ++counts[std::string(to_string(l.kind))];
  ctx.summary["counts"] = counts;
  for (const auto& [k, v] : counts) *ctx.out << k << " " << v << "\n";
  return kOk;
}

int cmd_augment(Context& ctx) {
  const auto structs = read_dataset(need(ctx.cfg.paths.input, "paths.input"));
  AugmentSpec spec = ctx.cfg.augment;
  spec.seed = ctx.seed();
  const auto out = build_augmented(structs, spec);
  write_dataset(out, ctx.main_output("augmented.jsonl"));
  ctx.summary["structures"] = out.size();
  return kOk;
}

std::string record_lines(const std::vector<ScreeningRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j;
    j["id"] = r.id;
    j["dG_OOH"] = r.dG_OOH;
    j["dG_O"] = r.dG_O;
    if (!r.source.empty()) j["source"] = r.source;
    out += j.dump() + "\n";
  }
  return out;
}

int cmd_screen(Context& ctx) {
  const ScreeningResult r = screen(read_screening_records(need(ctx.cfg.paths.input, "paths.input")));
  write_text(ctx.output("passed.jsonl"), record_lines(r.passed));
  write_text(ctx.output("near_optimal.jsonl"), record_lines(r.near_optimal));
  ctx.summary["passed"] = r.passed.size();
  ctx.summary["near_optimal"] = r.near_optimal.size();
  *ctx.out << "passed " << r.passed.size() << ", near optimal " << r.near_optimal.size() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- options

enum class Kind { Int, Real, Text, RealList, Flag };

struct Bound {
  std::string pointer;
  Kind kind;
  std::string value;
  CLI::Option* opt = nullptr;
};

struct Command {
  std::string name;
  std::function<int(Context&)> handler;
  CLI::App* app = nullptr;
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::unique_ptr<Bound>> bound;

  void bind(const std::string& flag, const std::string& pointer, Kind kind, const std::string& help) {
    auto b = std::make_unique<Bound>(Bound{pointer, kind, {}, nullptr});
    b->opt = kind == Kind::Flag ? app->add_flag(flag, help) : app->add_option(flag, b->value, help);
    bound.push_back(std::move(b));
  }
};

json convert(const Bound& b) {
  const std::string name = b.opt->get_name();
  try {
    switch (b.kind) {
      case Kind::Int: {
        std::size_t used = 0;
        const long long v = std::stoll(b.value, &used);
        if (used != b.value.size()) break;
        return v;
      }
      case Kind::Real: {
        std::size_t used = 0;
        const double v = std::stod(b.value, &used);
        if (used != b.value.size()) break;
        return v;
      }
      case Kind::Text:
        return b.value;
      case Kind::RealList: {
        json arr = json::array();
        std::stringstream ss(b.value);
        for (std::string item; std::getline(ss, item, ',');) {
          std::size_t used = 0;
          arr.push_back(std::stod(item, &used));
          if (used != item.size()) bad("invalid value for " + name + ": " + b.value);
        }
        return arr;
      }
      case Kind::Flag:
        return true;
    }
  } catch (const std::logic_error&) {
  }
  bad("invalid value for " + name + ": " + b.value);
}

void add_common(Command& c) {
  c.app->add_option("--config", c.config_path, "JSON run configuration");
  c.app->add_option("--set", c.sets, "Override a config entry, e.g. --set /train/lr=1e-3");
  c.bind("--run-dir", "/run_dir", Kind::Text, "Output directory");
  c.bind("--seed", "/seed", Kind::Int, "Global seed (falls back to CATGEN_SEED)");
}

void add_model(Command& c) {
  c.bind("--layers", "/model/n_layers", Kind::Int, "Transformer blocks");
  c.bind("--heads", "/model/n_heads", Kind::Int, "Attention heads");
  c.bind("--d-model", "/model/d_model", Kind::Int, "Embedding width");
  c.bind("--d-ff", "/model/d_ff", Kind::Int, "Feed-forward width");
  c.bind("--context", "/model/context_len", Kind::Int, "Context length");
  c.bind("--dropout", "/model/dropout", Kind::Real, "Dropout rate");
}

void add_training(Command& c) {
  c.bind("--train", "/paths/train", Kind::Text, "Training data");
  c.bind("--val", "/paths/val", Kind::Text, "Validation data");
  c.bind("--epochs", "/train/epochs", Kind::Int, "Epochs");
  c.bind("--batch-size", "/train/batch_size", Kind::Int, "Batch size");
  c.bind("--lr", "/train/lr", Kind::Real, "Learning rate");
  c.bind("--final-lr-fraction", "/train/final_lr_fraction", Kind::Real, "Linear decay target as a fraction of lr");
  c.bind("--keep-order", "/keep_order", Kind::Flag, "Encode sites in stored order instead of canonical order");
}

void add_sampling(Command& c) {
  c.bind("--checkpoint", "/paths/checkpoint", Kind::Text, "Generator checkpoint directory");
  c.bind("--n", "/sample/n", Kind::Int, "Number of samples");
  c.bind("--max-len", "/sample/max_len", Kind::Int, "Maximum sequence length");
  c.bind("--prompt", "/sample/prompt", Kind::Text, "bos or lattice");
  c.bind("--lattices", "/paths/lattices", Kind::Text, "Dataset whose lattices prompt generation");
  c.bind("--bypass", "/sample/bypass", Kind::Real, "Skip atoms closer than this distance (Å) while decoding");
}

void add_evaluation(Command& c) {
  c.bind("--gt", "/paths/gt", Kind::Text, "Ground-truth dataset");
  c.bind("--train", "/paths/train", Kind::Text, "Training dataset for novelty");
  c.bind("--detector", "/paths/detector", Kind::Text, "Detector checkpoint directory");
  c.bind("--orr", "/roles", Kind::Flag, "Evaluate 2e-ORR validity with the default element roles");
  c.bind("--property-sample", "/metrics/property_sample", Kind::Int, "Sub-sample size for property EMD");
}

void apply_set(json& j, const std::string& entry) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos || eq == 0 || entry[0] != '/') bad("--set expects /json/pointer=value, got " + entry);
  const std::string value = entry.substr(eq + 1);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  j[json::json_pointer(entry.substr(0, eq))] = std::move(v);
}

ordered_json versions() {
  ordered_json v;
  v["catgen"] = CATGEN_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  v["cli11"] = CLI11_VERSION;
  return v;
}

int execute(Command& c, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.command = c.name;
  ctx.out = &out;
  ctx.err = &err;

  json j = json::object();
  if (!c.config_path.empty()) {
    try {
      j = json::parse(slurp(c.config_path));
    } catch (const json::parse_error& e) {
      bad(c.config_path + " is not valid JSON: " + e.what());
    }
  }
  if (!j.is_object()) bad("config must be a JSON object");
  for (const auto& b : c.bound) {
    if (b->opt->count() == 0) continue;
    j[json::json_pointer(b->pointer)] = b->pointer == "/roles" ? json("default") : convert(*b);
  }
  for (const auto& s : c.sets) apply_set(j, s);
  if (!j.contains("seed") || j["seed"].is_null()) {
    if (const char* env = std::getenv("CATGEN_SEED"); env != nullptr && *env != '\0') {
      try {
        std::size_t used = 0;
        j["seed"] = std::stoull(env, &used);
        if (used != std::string_view(env).size()) throw std::invalid_argument(env);
      } catch (const std::logic_error&) {
        bad(std::string("CATGEN_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  ctx.raw = j;
  ctx.cfg = config_from_json(j);

  // The run directory is excluded from the hash: the same configuration
  // written to two places is the same run.
  RunConfig hashed = ctx.cfg;
  hashed.run_dir.clear();
  const std::string hash = config_hash(hashed);
  ctx.dir = ctx.cfg.run_dir.empty() ? fs::path("runs") / (c.name + "-" + hash.substr(0, 12)) : ctx.cfg.run_dir;
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create run directory " + ctx.dir.string() + ": " + ec.message());

  const int code = c.handler(ctx);

  ordered_json manifest;
  manifest["command"] = c.name;
  manifest["config_hash"] = hash;
  manifest["config"] = config_json(ctx.cfg);
  manifest["versions"] = versions();
  manifest["outputs"] = ctx.outputs;
  manifest["summary"] = ctx.summary;
  manifest["exit_code"] = code;
  write_text(ctx.dir / "manifest.json", manifest.dump(2) + "\n");
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Catalyst structure generation toolkit", "catgen"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", CATGEN_VERSION);

  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const std::string& name, const std::string& help, std::function<int(Context&)> handler) {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->handler = std::move(handler);
    c->app = app.add_subcommand(name, help);
    add_common(*c);
    commands.push_back(std::move(c));
    return commands.back().get();
  };

  Command* c = add("encode", "Dataset to token lines", cmd_encode);
  c->bind("--in", "/paths/input", Kind::Text, "Input dataset (JSON Lines)");
  c->bind("--out", "/paths/output", Kind::Text, "Output token file");
  c->bind("--keep-order", "/keep_order", Kind::Flag, "Encode sites in stored order");

  c = add("decode", "Token lines to dataset", cmd_decode);
  c->bind("--in", "/paths/input", Kind::Text, "Input token file");
  c->bind("--out", "/paths/output", Kind::Text, "Output dataset");
  c->bind("--bypass", "/sample/bypass", Kind::Real, "Skip atoms closer than this distance (Å)");

  c = add("train", "Train a generator from scratch", cmd_train);
  add_training(*c);
  add_model(*c);

  c = add("finetune", "Continue training a generator checkpoint", cmd_finetune);
  add_training(*c);
  add_model(*c);
  c->bind("--init", "/paths/init_checkpoint", Kind::Text, "Pretrained checkpoint directory");

  c = add("train-detector", "Train the anomaly detector on labeled sequences", cmd_train_detector);
  add_training(*c);
  add_model(*c);

  c = add("generate", "Sample sequences from a generator", cmd_generate);
  add_sampling(*c);
  c->bind("--temperature", "/sample/temperature", Kind::Real, "Sampling temperature");

  c = add("evaluate", "Score generated sequences", cmd_evaluate);
  c->bind("--gen", "/paths/gen", Kind::Text, "Generated token file");
  add_evaluation(*c);
  c->bind("--bypass", "/sample/bypass", Kind::Real, "Skip atoms closer than this distance (Å) while decoding");

  c = add("sweep", "Generate and evaluate at several temperatures", cmd_sweep);
  add_sampling(*c);
  add_evaluation(*c);
  c->bind("--temperatures", "/sample/temperatures", Kind::RealList, "Comma-separated temperatures");

  c = add("corrupt", "Build a half-corrupted labeled set", cmd_corrupt);
  c->bind("--in", "/paths/input", Kind::Text, "Input dataset");
  c->bind("--out", "/paths/output", Kind::Text, "Output labeled file");
  c->bind("--keep-order", "/keep_order", Kind::Flag, "Encode sites in stored order");

  c = add("augment", "Translate / rotate a dataset", cmd_augment);
  c->bind("--in", "/paths/input", Kind::Text, "Input dataset");
  c->bind("--out", "/paths/output", Kind::Text, "Output dataset");

  c = add("screen", "Filter descriptor records by the 2e-ORR thresholds", cmd_screen);
  c->bind("--in", "/paths/input", Kind::Text, "Records (JSON Lines)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  for (auto& cmd : commands) {
    if (!cmd->app->parsed()) continue;
    try {
      return execute(*cmd, out, err);
    } catch (const std::exception& e) {
      err << "catgen " << cmd->name << ": error: " << e.what() << "\n";
      return kUsage;
    }
  }
  return kUsage;
}

}  // namespace catgen::cli
