// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include <json.hpp>
#include <openssl/evp.h>

#include "catgen/cli.hpp"
#include "catgen/error.hpp"
#include "config_json.hpp"

namespace catgen::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::BadConfig, what); }

// Reads the keys of one object, rejecting any it was not asked about.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) bad(where_ + " must be an object");
  }
  void done() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) bad("unknown key " + where_ + "." + k);
    }
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (const json* v = get(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        bad(where_ + "." + key + " has the wrong type");
      }
    }
  }

  void read(const std::string& key, std::filesystem::path& out) {
    std::string s = out.string();
    read(key, s);
    out = s;
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (get(key)) {
      T v{};
      read(key, v);
      out = v;
    }
  }

  void child(const std::string& key, const std::function<void(Reader&)>& fn) {
    if (const json* v = get(key)) {
      Reader r(*v, where_ + "." + key);
      fn(r);
      r.done();
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::set<Element> elements_of(const std::vector<std::string>& symbols) {
  std::set<Element> out;
  for (const auto& s : symbols) out.insert(Element::from_symbol(s));
  return out;
}

std::vector<std::string> symbols_of(const std::set<Element>& els) {
  std::vector<std::string> out;
  for (Element e : els) out.emplace_back(e.symbol());
  return out;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Reader r(j, "config");
  r.read("run_dir", c.run_dir);
  r.read("seed", c.seed);
  r.read("keep_order", c.keep_order);
  r.child("paths", [&](Reader& p) {
    p.read("input", c.paths.input);
    p.read("output", c.paths.output);
    p.read("train", c.paths.train);
    p.read("val", c.paths.val);
    p.read("gt", c.paths.gt);
    p.read("gen", c.paths.gen);
    p.read("checkpoint", c.paths.checkpoint);
    p.read("init_checkpoint", c.paths.init_checkpoint);
    p.read("detector", c.paths.detector);
    p.read("lattices", c.paths.lattices);
  });
  r.child("model", [&](Reader& m) {
    m.read("n_layers", c.model.n_layers);
    m.read("n_heads", c.model.n_heads);
    m.read("d_model", c.model.d_model);
    m.read("d_ff", c.model.d_ff);
    m.read("context_len", c.model.context_len);
    m.read("dropout", c.model.dropout);
  });
  r.child("train", [&](Reader& t) {
    t.read("epochs", c.train.epochs);
    t.read("batch_size", c.train.batch_size);
    t.read("lr", c.train.lr);
    t.read("beta1", c.train.beta1);
    t.read("beta2", c.train.beta2);
    t.read("eps", c.train.eps);
    t.read("clip_norm", c.train.clip_norm);
    t.read("final_lr_fraction", c.train.final_lr_fraction);
  });
  r.child("sample", [&](Reader& s) {
    s.read("n", c.sample.n);
    s.read("temperature", c.sample.temperature);
    s.read("max_len", c.sample.max_len);
    s.read("bypass", c.sample.bypass);
    s.read("temperatures", c.sample.temperatures);
    std::string prompt = c.sample.lattice_prompt ? "lattice" : "bos";
    s.read("prompt", prompt);
    if (prompt != "bos" && prompt != "lattice") bad("sample.prompt must be \"bos\" or \"lattice\"");
    c.sample.lattice_prompt = prompt == "lattice";
  });
  r.child("augment", [&](Reader& a) {
    a.read("translate", c.augment.translate);
    a.read("rotate", c.augment.rotate);
    a.read("unchanged", c.augment.unchanged);
  });
  if (const json* roles = r.get("roles")) {
    RoleConfig rc = RoleConfig::defaults();
    if (!(roles->is_string() && roles->get<std::string>() == "default")) {
      Reader o(*roles, "config.roles");
      std::vector<std::string> phil = symbols_of(rc.oxophilic), phob = symbols_of(rc.oxophobic),
                               ads = symbols_of(rc.adsorbates);
      o.read("oxophilic", phil);
      o.read("oxophobic", phob);
      o.read("adsorbates", ads);
      o.read("ontop_ratio", rc.ontop_ratio);
      o.read("bond_cutoff", rc.bond_cutoff);
      rc.oxophilic = elements_of(phil);
      rc.oxophobic = elements_of(phob);
      rc.adsorbates = elements_of(ads);
      o.done();
    }
    validate(rc);
    c.roles = rc;
  }
  r.child("metrics", [&](Reader& m) {
    m.read("struct_cutoff", c.metrics.struct_cutoff);
    m.read("comp_cutoff", c.metrics.comp_cutoff);
    m.read("property_sample", c.metrics.property_sample);
    m.read("length_rtol", c.metrics.tolerance.length_rtol);
    m.read("angle_atol", c.metrics.tolerance.angle_atol);
    m.read("site_tol", c.metrics.tolerance.site_tol);
  });
  r.done();
  return c;
}

json config_json(const RunConfig& c) {
  json j;
  j["run_dir"] = c.run_dir.string();
  j["seed"] = opt(c.seed);
  j["keep_order"] = c.keep_order;
  j["paths"] = {{"input", c.paths.input.string()},
                {"output", c.paths.output.string()},
                {"train", c.paths.train.string()},
                {"val", c.paths.val.string()},
                {"gt", c.paths.gt.string()},
                {"gen", c.paths.gen.string()},
                {"checkpoint", c.paths.checkpoint.string()},
                {"init_checkpoint", c.paths.init_checkpoint.string()},
                {"detector", c.paths.detector.string()},
                {"lattices", c.paths.lattices.string()}};
  j["model"] = {{"n_layers", c.model.n_layers}, {"n_heads", c.model.n_heads},
                {"d_model", c.model.d_model},   {"d_ff", c.model.d_ff},
                {"context_len", c.model.context_len}, {"dropout", c.model.dropout}};
  j["train"] = {{"epochs", c.train.epochs}, {"batch_size", c.train.batch_size}, {"lr", c.train.lr},
                {"beta1", c.train.beta1},   {"beta2", c.train.beta2},           {"eps", c.train.eps},
                {"clip_norm", c.train.clip_norm}, {"final_lr_fraction", c.train.final_lr_fraction}};
  j["sample"] = {{"n", c.sample.n},
                 {"temperature", c.sample.temperature},
                 {"max_len", c.sample.max_len},
                 {"bypass", opt(c.sample.bypass)},
                 {"prompt", c.sample.lattice_prompt ? "lattice" : "bos"},
                 {"temperatures", c.sample.temperatures}};
  j["augment"] = {{"translate", c.augment.translate}, {"rotate", c.augment.rotate}, {"unchanged", c.augment.unchanged}};
  if (c.roles) {
    j["roles"] = {{"oxophilic", symbols_of(c.roles->oxophilic)},
                  {"oxophobic", symbols_of(c.roles->oxophobic)},
                  {"adsorbates", symbols_of(c.roles->adsorbates)},
                  {"ontop_ratio", c.roles->ontop_ratio},
                  {"bond_cutoff", c.roles->bond_cutoff}};
  } else {
    j["roles"] = nullptr;
  }
  j["metrics"] = {{"struct_cutoff", opt(c.metrics.struct_cutoff)},
                  {"comp_cutoff", opt(c.metrics.comp_cutoff)},
                  {"property_sample", c.metrics.property_sample},
                  {"length_rtol", c.metrics.tolerance.length_rtol},
                  {"angle_atol", c.metrics.tolerance.angle_atol},
                  {"site_tol", c.metrics.tolerance.site_tol}};
  return j;
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(); }

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::IoError, "SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(config_to_json(cfg)); }

}  // namespace catgen::cli
