#include "forge/corpusgen/corpusgen.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>

#include "forge/invariants/constant_pool.hpp"
#include "forge/rng.hpp"

namespace forge::corpusgen {

namespace {

// 160 short nouns, consumed in disjoint 20-word windows per project; once
// the list wraps, a numeric suffix keeps later projects' pools disjoint too.
const char* kWords[] = {
    "stream",  "buffer",  "cursor",  "token",    "widget",  "panel",   "grid",     "node",
    "cache",   "queue",   "stack",   "frame",    "chunk",   "batch",   "probe",    "relay",
    "socket",  "ledger",  "branch",  "anchor",   "signal",  "filter",  "mixer",    "gauge",
    "lever",   "prism",   "column",  "row",      "cell",    "slab",    "brick",    "mortar",
    "tile",    "joist",   "beam",    "plank",    "girder",  "truss",   "spline",   "knot",
    "mesh",    "patch",   "seam",    "weld",     "rivet",   "bolt",    "washer",   "gasket",
    "flange",  "valve",   "pump",    "rotor",    "stator",  "shaft",   "gear",     "pulley",
    "belt",    "chain",   "sprocket", "cam",     "lens",    "mirror",  "shutter",  "sensor",
    "diode",   "coil",    "magnet",  "fuse",     "switch",  "dial",    "knob",     "bezel",
    "crown",   "strap",   "clasp",   "hinge",    "latch",   "catch",   "pawl",     "detent",
    "spring",  "damper",  "strut",   "axle",     "hub",     "rim",     "spoke",    "tread",
    "lug",     "fender",  "hood",    "vent",     "louver",  "duct",    "plenum",   "baffle",
    "shroud",  "cowl",    "fairing", "nacelle",  "keel",    "hull",    "deck",     "mast",
    "boom",    "jib",     "rudder",  "tiller",   "winch",   "cleat",   "berth",    "quay",
    "wharf",   "pier",    "jetty",   "buoy",     "beacon",  "lantern", "flare",    "torch",
    "ember",   "ash",     "cinder",  "soot",     "smoke",   "vapor",   "mist",     "dew",
    "frost",   "rime",    "glaze",   "sleet",    "hail",    "slush",   "drift",    "cornice",
    "serac",   "crevasse", "moraine", "scree",   "talus",   "ridge",   "spur",     "saddle",
    "col",     "gully",   "ravine",  "gorge",    "bluff",   "mesa",    "butte",    "dune",
    "swale",   "marsh",   "fen",     "bog",      "mire",    "delta",   "estuary",  "lagoon",
};
constexpr int kWordCount = static_cast<int>(sizeof(kWords) / sizeof(kWords[0]));
constexpr int kWordsPerProject = 20;

struct Vernacular {
  std::vector<std::string> pool;
  bool camel = false;
  std::set<std::string> used_methods;

  std::string pick(Lcg64& rng) const {
    return pool[rng.next_below(pool.size())];
  }

  std::vector<std::string> pick_distinct(Lcg64& rng, size_t n) const {
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < n) {
      std::string w = pick(rng);
      if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
  }

  std::string join(const std::vector<std::string>& parts) const {
    std::string out;
    for (const std::string& p : parts) {
      if (out.empty()) {
        out = p;
        continue;
      }
      if (camel) {
        out += static_cast<char>(std::toupper(static_cast<unsigned char>(p[0])));
        out += p.substr(1);
      } else {
        out += "_" + p;
      }
    }
    return out;
  }

  std::string method_name(Lcg64& rng) {
    for (;;) {
      std::string name = join({pick(rng), pick(rng)});
      if (used_methods.insert(name).second) return name;
      name = join({name, pick(rng)});
      if (used_methods.insert(name).second) return name;
    }
  }

  std::string twin_name(Lcg64& rng, const std::string& base) {
    for (;;) {
      std::string name = join({base, pick(rng)});
      if (used_methods.insert(name).second) return name;
    }
  }
};

Vernacular make_vernacular(int project_index) {
  Vernacular v;
  v.camel = project_index % 2 == 1;
  int start = project_index * kWordsPerProject;
  int wrap = start / kWordCount;
  for (int j = 0; j < kWordsPerProject; ++j) {
    std::string w = kWords[(start + j) % kWordCount];
    if (wrap > 0) w += std::to_string(wrap + 1);
    v.pool.push_back(std::move(w));
  }
  return v;
}

// One generated method: its definition, its test bodies (argument lists per
// call), and its ground truth. Twins re-emit the same bundle under another
// name, so the copies differ in nothing but the identifier.
struct MethodDef {
  std::string name;
  std::string source;
  std::vector<std::string> test_bodies;  // statements, method name already inline
  std::vector<GroundTruthEntry> truth;
};

std::string indent_calls(const std::vector<std::string>& calls) {
  std::string out;
  for (const std::string& c : calls) out += "  " + c + "\n";
  return out;
}

// ---- guard pair ----

struct GuardBundle {
  std::string param, field;
  // Per test, per call: literal for {field: "lit"} or nullopt for null.
  std::vector<std::vector<std::optional<std::string>>> tests;
};

std::string guarded_source(const std::string& name, const GuardBundle& b) {
  return "fn " + name + "(" + b.param + ") {\n" +
         "  if (" + b.param + " == null) {\n" +
         "    return null;\n" +
         "  }\n" +
         "  return " + b.param + "." + b.field + ";\n" +
         "}\n";
}

std::string plain_source(const std::string& name, const GuardBundle& b) {
  return "fn " + name + "(" + b.param + ") {\n" +
         "  return " + b.param + "." + b.field + ";\n" +
         "}\n";
}

std::vector<std::string> guard_test_bodies(const std::string& name, const GuardBundle& b,
                                           bool with_nulls) {
  std::vector<std::string> bodies;
  for (const auto& test : b.tests) {
    std::vector<std::string> calls;
    for (const auto& arg : test) {
      if (!arg) {
        if (with_nulls) calls.push_back(name + "(null);");
        continue;
      }
      calls.push_back(name + "({" + b.field + ": \"" + *arg + "\"});");
    }
    bodies.push_back(indent_calls(calls));
  }
  return bodies;
}

GroundTruthEntry guard_truth(const std::string& project, const std::string& method,
                             const std::string& param, bool guarded) {
  GroundTruthEntry e;
  e.project = project;
  e.invariant = inv::Invariant::not_null(method, trace::Point::Entry, inv::Term::var(param));
  e.valid = !guarded;
  e.provenance = guarded ? "guard:guarded" : "guard:unguarded";
  return e;
}

// ---- numeric templates ----

std::string abs_source(const std::string& name, const std::string& v) {
  return "fn " + name + "(" + v + ") {\n" +
         "  if (" + v + " < 0) {\n" +
         "    return 0 - " + v + ";\n" +
         "  }\n" +
         "  return " + v + ";\n" +
         "}\n";
}

std::string clamp_source(const std::string& name, const std::string& v, const std::string& lo,
                         const std::string& hi) {
  return "fn " + name + "(" + v + ", " + lo + ", " + hi + ") {\n" +
         "  if (" + v + " < " + lo + ") {\n" +
         "    return " + lo + ";\n" +
         "  }\n" +
         "  if (" + v + " > " + hi + ") {\n" +
         "    return " + hi + ";\n" +
         "  }\n" +
         "  return " + v + ";\n" +
         "}\n";
}

std::string counter_source(const std::string& name, const std::string& c, const std::string& k,
                           const std::string& field) {
  return "fn " + name + "(" + c + ", " + k + ") {\n" +
         "  " + c + "." + field + " = " + c + "." + field + " + " + k + ";\n" +
         "  return " + c + "." + field + ";\n" +
         "}\n";
}

std::vector<std::string> int_call_bodies(const std::string& name,
                                         const std::vector<std::vector<int64_t>>& tests) {
  std::vector<std::string> bodies;
  for (const auto& test : tests) {
    std::vector<std::string> calls;
    for (int64_t v : test) calls.push_back(name + "(" + std::to_string(v) + ");");
    bodies.push_back(indent_calls(calls));
  }
  return bodies;
}

std::optional<inv::Invariant> floor_bound(const std::string& method, const std::string& path,
                                          int64_t minimum) {
  int64_t c = 0;
  if (!inv::pool_floor(minimum, c)) return std::nullopt;
  return inv::Invariant::num(inv::Form::NumGe, method, trace::Point::Entry,
                             inv::Term::var(path), c);
}

constexpr int kCallsPerTest = 6;

int64_t project_cap(int project_index) {
  static const int64_t caps[] = {15, 31, 63, 127, 255, 511, 1023, 2047};
  return caps[project_index % 8];
}

}  // namespace

void GenConfig::validate() const {
  if (n_projects < 1) throw ForgeError("n_projects must be positive");
  if (methods_per_project < 1) throw ForgeError("methods_per_project must be positive");
  if (tests_per_method < 2) throw ForgeError("tests_per_method must be at least 2");
  double total = 0.0;
  for (const auto& [name, w] : weights) {
    if (name != "guard" && name != "abs" && name != "clamp" && name != "counter")
      throw ForgeError("unknown template '" + name + "'");
    if (w < 0.0) throw ForgeError("template weight for '" + name + "' is negative");
    total += w;
  }
  if (!(total > 0.0)) throw ForgeError("template weights must sum to a positive value");
  if (coverage.profile != "full" && coverage.profile != "sparse")
    throw ForgeError("coverage profile must be 'full' or 'sparse'");
  if (coverage.profile == "sparse" && (coverage.p < 0.0 || coverage.p > 1.0))
    throw ForgeError("sparse coverage probability must lie in [0, 1]");
}

Json GenConfig::to_json() const {
  Json v = Json::object();
  v["n_projects"] = n_projects;
  v["methods_per_project"] = methods_per_project;
  Json w = Json::object();
  for (const auto& [name, weight] : weights) w[name] = weight;
  v["weights"] = w;
  Json cov = Json::object();
  cov["profile"] = coverage.profile;
  if (coverage.profile == "sparse") cov["p"] = coverage.p;
  v["coverage"] = cov;
  v["tests_per_method"] = tests_per_method;
  v["twin_copies"] = twin_copies;
  v["seed"] = seed;
  return v;
}

GenConfig GenConfig::from_json(const Json& v, const std::string& where) {
  if (!v.is_object()) throw FormatError(where, "generator config must be an object");
  GenConfig cfg;
  auto get_int = [&](const char* f, int& out) {
    if (!v.contains(f)) return;
    if (!v[f].is_number_integer()) throw FormatError(where, std::string(f) + " must be an integer");
    out = v[f].get<int>();
  };
  get_int("n_projects", cfg.n_projects);
  get_int("methods_per_project", cfg.methods_per_project);
  get_int("tests_per_method", cfg.tests_per_method);
  if (v.contains("weights")) {
    if (!v["weights"].is_object()) throw FormatError(where, "weights must be an object");
    cfg.weights.clear();
    for (const auto& [name, w] : v["weights"].items()) {
      if (!w.is_number()) throw FormatError(where, "weight '" + name + "' must be numeric");
      cfg.weights[name] = w.get<double>();
    }
  }
  if (v.contains("coverage")) {
    const Json& cov = v["coverage"];
    if (!cov.is_object() || !cov.contains("profile") || !cov["profile"].is_string())
      throw FormatError(where, "coverage must be an object with a profile");
    cfg.coverage.profile = cov["profile"].get<std::string>();
    if (cov.contains("p")) {
      if (!cov["p"].is_number()) throw FormatError(where, "coverage p must be numeric");
      cfg.coverage.p = cov["p"].get<double>();
    }
  }
  if (v.contains("twin_copies")) {
    if (!v["twin_copies"].is_boolean()) throw FormatError(where, "twin_copies must be a boolean");
    cfg.twin_copies = v["twin_copies"].get<bool>();
  }
  if (v.contains("seed")) {
    if (!v["seed"].is_number_integer() && !v["seed"].is_number_unsigned())
      throw FormatError(where, "seed must be an integer");
    cfg.seed = v["seed"].get<uint64_t>();
  }
  cfg.validate();
  return cfg;
}

Json GroundTruthEntry::to_json() const {
  Json v = Json::object();
  v["project"] = project;
  v["invariant"] = invariant.to_json();
  v["render"] = invariant.render();
  v["valid"] = valid;
  v["provenance"] = provenance;
  return v;
}

GroundTruthEntry GroundTruthEntry::from_json(const Json& v, const std::string& where) {
  if (!v.is_object()) throw FormatError(where, "ground truth entry must be an object");
  for (const char* f : {"project", "invariant", "valid", "provenance"})
    if (!v.contains(f)) throw FormatError(where, std::string("missing field '") + f + "'");
  if (!v["project"].is_string() || !v["provenance"].is_string() || !v["valid"].is_boolean())
    throw FormatError(where, "bad ground truth field types");
  GroundTruthEntry e;
  e.project = v["project"].get<std::string>();
  e.invariant = inv::Invariant::from_json(v["invariant"], where);
  e.valid = v["valid"].get<bool>();
  e.provenance = v["provenance"].get<std::string>();
  return e;
}

namespace {

MethodDef instantiate_guarded(const std::string& project, const std::string& name,
                              const GuardBundle& b, bool sparse_trap) {
  MethodDef def;
  def.name = name;
  def.source = guarded_source(name, b);
  def.test_bodies = guard_test_bodies(name, b, true);
  def.truth.push_back(guard_truth(project, name, b.param, true));
  if (sparse_trap) def.truth.back().provenance = "guard:guarded_sparse";
  return def;
}

MethodDef instantiate_plain(const std::string& project, const std::string& name,
                            const GuardBundle& b) {
  MethodDef def;
  def.name = name;
  def.source = plain_source(name, b);
  def.test_bodies = guard_test_bodies(name, b, false);
  def.truth.push_back(guard_truth(project, name, b.param, false));
  return def;
}

struct AbsBundle {
  std::string v;
  std::vector<std::vector<int64_t>> tests;
  bool trap = false;
};

MethodDef instantiate_abs(const std::string& project, const std::string& name,
                          const AbsBundle& b) {
  MethodDef def;
  def.name = name;
  def.source = abs_source(name, b.v);
  def.test_bodies = int_call_bodies(name, b.tests);

  GroundTruthEntry nonneg;
  nonneg.project = project;
  nonneg.invariant = inv::Invariant::num(inv::Form::NumGe, name, trace::Point::Exit,
                                         inv::Term::ret(), 0);
  nonneg.valid = true;
  nonneg.provenance = "abs:nonneg";
  def.truth.push_back(std::move(nonneg));

  int64_t global_min = b.tests[0][0];
  for (const auto& t : b.tests)
    for (int64_t x : t) global_min = std::min(global_min, x);
  if (auto bound = floor_bound(name, b.v, global_min)) {
    GroundTruthEntry artifact;
    artifact.project = project;
    artifact.invariant = *bound;
    artifact.valid = false;
    artifact.provenance = b.trap ? "abs:sparsity_bound" : "abs:artifact_bound";
    def.truth.push_back(std::move(artifact));
  }
  return def;
}

struct ClampBundle {
  std::string v, lo, hi;
  int64_t cap = 0;
  std::vector<std::vector<int64_t>> tests;
  bool trap = false;
};

MethodDef instantiate_clamp(const std::string& project, const std::string& name,
                            const ClampBundle& b) {
  MethodDef def;
  def.name = name;
  def.source = clamp_source(name, b.v, b.lo, b.hi);
  for (const auto& test : b.tests) {
    std::vector<std::string> calls;
    for (int64_t x : test)
      calls.push_back(name + "(" + std::to_string(x) + ", 0, " + std::to_string(b.cap) + ");");
    def.test_bodies.push_back(indent_calls(calls));
  }

  auto rel = [&](inv::RelOp op, const std::string& other, bool valid, const char* why) {
    GroundTruthEntry e;
    e.project = project;
    e.invariant = inv::Invariant::rel(name, trace::Point::Exit, inv::Term::ret(), op,
                                      inv::Term::var(other));
    e.valid = valid;
    e.provenance = why;
    def.truth.push_back(std::move(e));
  };
  rel(inv::RelOp::Le, b.hi, true, "clamp:le_hi");
  rel(inv::RelOp::Ge, b.lo, true, "clamp:ge_lo");

  if (b.trap) {
    int64_t observed_max = b.tests[0][0];
    for (const auto& t : b.tests)
      for (int64_t x : t) observed_max = std::max(observed_max, std::min(x, b.cap));
    int64_t c = 0;
    if (inv::pool_ceil(observed_max, c) && c < b.cap) {
      GroundTruthEntry e;
      e.project = project;
      e.invariant = inv::Invariant::num(inv::Form::NumLe, name, trace::Point::Exit,
                                        inv::Term::ret(), c);
      e.valid = false;
      e.provenance = "clamp:sparsity_bound";
      def.truth.push_back(std::move(e));
    }
  }
  return def;
}

struct CounterBundle {
  std::string c, k, field;
  std::vector<std::vector<std::pair<int64_t, int64_t>>> tests;  // (init, delta)
  bool trap = false;
};

MethodDef instantiate_counter(const std::string& project, const std::string& name,
                              const CounterBundle& b) {
  MethodDef def;
  def.name = name;
  def.source = counter_source(name, b.c, b.k, b.field);
  for (const auto& test : b.tests) {
    std::vector<std::string> calls;
    for (const auto& [init, delta] : test)
      calls.push_back(name + "({" + b.field + ": " + std::to_string(init) + "}, " +
                      std::to_string(delta) + ");");
    def.test_bodies.push_back(indent_calls(calls));
  }

  GroundTruthEntry deref;
  deref.project = project;
  deref.invariant = inv::Invariant::not_null(name, trace::Point::Entry, inv::Term::var(b.c));
  deref.valid = true;
  deref.provenance = "counter:deref";
  def.truth.push_back(std::move(deref));

  GroundTruthEntry returns;
  returns.project = project;
  returns.invariant = inv::Invariant::rel(name, trace::Point::Exit, inv::Term::ret(),
                                          inv::RelOp::Eq, inv::Term::var(b.c + "." + b.field));
  returns.valid = true;
  returns.provenance = "counter:returns_value";
  def.truth.push_back(std::move(returns));

  if (b.trap) {
    GroundTruthEntry trap;
    trap.project = project;
    trap.invariant = inv::Invariant::num(inv::Form::NumEq, name, trace::Point::Entry,
                                         inv::Term::var(b.c + "." + b.field), 0);
    trap.valid = false;
    trap.provenance = "counter:sparsity_equality";
    def.truth.push_back(std::move(trap));
  }
  return def;
}

GeneratedProject generate_project(const GenConfig& cfg, int index, uint64_t stream) {
  Lcg64 rng(stream);
  Vernacular vern = make_vernacular(index);
  GeneratedProject project;
  project.name = "p" + std::to_string(index) + "_" + vern.pool[0];

  const bool sparse = cfg.coverage.profile == "sparse";
  auto trap_roll = [&] { return sparse && rng.next_unit() < cfg.coverage.p; };

  std::vector<MethodDef> methods;
  int literal_counter = 0;

  auto guard_bundle = [&](bool with_nulls) {
    GuardBundle b;
    b.param = vern.pick(rng);
    b.field = vern.pick(rng);
    for (int j = 0; j < cfg.tests_per_method; ++j) {
      bool mixed = with_nulls && (j == 1 || (j > 1 && rng.next_unit() < 0.25));
      std::string wa = vern.pick(rng), wb = vern.pick(rng);
      std::vector<std::optional<std::string>> calls;
      for (int c = 0; c < kCallsPerTest; ++c) {
        if (mixed && (c == 1 || c == 4)) {
          calls.push_back(std::nullopt);
          continue;
        }
        calls.push_back((c % 2 == 0 ? wa : wb) + std::to_string(literal_counter++));
      }
      b.tests.push_back(std::move(calls));
    }
    return b;
  };

  auto int_tests = [&](int64_t lo, int64_t hi, std::vector<int64_t> forced_first) {
    std::vector<std::vector<int64_t>> tests;
    for (int j = 0; j < cfg.tests_per_method; ++j) {
      std::vector<int64_t> vals;
      if (j == 0) vals = forced_first;
      while (static_cast<int>(vals.size()) < kCallsPerTest) vals.push_back(rng.next_range(lo, hi));
      tests.push_back(std::move(vals));
    }
    return tests;
  };

  static const char* kTemplateOrder[] = {"guard", "abs", "clamp", "counter"};
  auto draw_template = [&](int remaining) -> std::string {
    double total = 0.0;
    for (const char* t : kTemplateOrder) {
      auto it = cfg.weights.find(t);
      if (it == cfg.weights.end()) continue;
      if (remaining < 2 && std::string(t) == "guard") continue;
      total += it->second;
    }
    if (!(total > 0.0)) return "";
    double roll = rng.next_unit() * total;
    for (const char* t : kTemplateOrder) {
      auto it = cfg.weights.find(t);
      if (it == cfg.weights.end()) continue;
      if (remaining < 2 && std::string(t) == "guard") continue;
      roll -= it->second;
      if (roll < 0.0) return t;
    }
    return kTemplateOrder[0];
  };

  while (static_cast<int>(methods.size()) < cfg.methods_per_project) {
    int remaining = cfg.methods_per_project - static_cast<int>(methods.size());
    std::string tmpl = draw_template(remaining);
    if (tmpl.empty()) break;

    if (tmpl == "guard") {
      bool trap = trap_roll();  // a trapped pair gets no null-passing tests
      GuardBundle b = guard_bundle(!trap);
      std::string guarded = vern.method_name(rng);
      std::string plain = vern.method_name(rng);
      methods.push_back(instantiate_guarded(project.name, guarded, b, trap));
      methods.push_back(instantiate_plain(project.name, plain, b));
    } else if (tmpl == "abs") {
      AbsBundle b;
      b.v = vern.pick(rng);
      b.trap = trap_roll();
      b.tests = b.trap ? int_tests(1, 60, {1, 2, 5, 9})
                       : int_tests(-40, 60, {-1, 0});
      methods.push_back(instantiate_abs(project.name, vern.method_name(rng), b));
    } else if (tmpl == "clamp") {
      ClampBundle b;
      auto words = vern.pick_distinct(rng, 3);
      b.v = words[0];
      b.lo = words[1];
      b.hi = words[2];
      b.cap = project_cap(index);
      b.trap = trap_roll();
      b.tests = b.trap ? int_tests(0, b.cap / 3, {0, 1})
                       : int_tests(-10, b.cap + 10, {-5, b.cap + 5, b.cap});
      methods.push_back(instantiate_clamp(project.name, vern.method_name(rng), b));
    } else {
      CounterBundle b;
      auto words = vern.pick_distinct(rng, 3);
      b.c = words[0];
      b.k = words[1];
      b.field = words[2];
      b.trap = trap_roll();
      for (int j = 0; j < cfg.tests_per_method; ++j) {
        std::vector<std::pair<int64_t, int64_t>> calls;
        for (int c = 0; c < kCallsPerTest; ++c) {
          int64_t init = b.trap ? 0 : rng.next_range(0, 40);
          calls.emplace_back(init, rng.next_range(1, 30));
        }
        b.tests.push_back(std::move(calls));
      }
      methods.push_back(instantiate_counter(project.name, vern.method_name(rng), b));
    }
  }

  if (cfg.twin_copies) {
    std::vector<MethodDef> twins;
    for (const MethodDef& m : methods) {
      std::string name = vern.twin_name(rng, m.name);
      MethodDef copy;
      copy.name = name;
      copy.source = m.source;
      size_t at = copy.source.find(m.name);
      copy.source.replace(at, m.name.size(), name);  // function name is the first token after "fn "
      for (const std::string& body : m.test_bodies) {
        std::string renamed;
        size_t pos = 0;
        // Call sites start a line as "  <name>("; the method name cannot
        // occur elsewhere because arguments are literals.
        while (pos < body.size()) {
          size_t hit = body.find(m.name + "(", pos);
          if (hit == std::string::npos) {
            renamed += body.substr(pos);
            break;
          }
          renamed += body.substr(pos, hit - pos) + name + "(";
          pos = hit + m.name.size() + 1;
        }
        copy.test_bodies.push_back(std::move(renamed));
      }
      for (GroundTruthEntry e : m.truth) {
        e.invariant.method = name;
        copy.truth.push_back(std::move(e));
      }
      twins.push_back(std::move(copy));
    }
    for (MethodDef& t : twins) methods.push_back(std::move(t));
  }

  for (const MethodDef& m : methods) {
    if (!project.core_source.empty()) project.core_source += "\n";
    project.core_source += m.source;
    for (size_t j = 0; j < m.test_bodies.size(); ++j) {
      if (!project.tests_source.empty()) project.tests_source += "\n";
      project.tests_source +=
          "fn test_" + m.name + "_" + std::to_string(j) + "() {\n" + m.test_bodies[j] + "}\n";
    }
    for (const GroundTruthEntry& e : m.truth) project.truth.push_back(e);
  }
  return project;
}

}  // namespace

Corpus generate(const GenConfig& cfg) {
  cfg.validate();
  Corpus corpus;
  Lcg64 root(cfg.seed);
  for (int i = 0; i < cfg.n_projects; ++i)
    corpus.projects.push_back(generate_project(cfg, i, root.fork(static_cast<uint64_t>(i))));
  return corpus;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string(), "cannot open for writing");
  out << text;
  if (!out.flush()) throw FormatError(path.string(), "write failed");
}

}  // namespace

void write_ground_truth(const std::string& path, const std::vector<GroundTruthEntry>& truth) {
  std::vector<Json> rows;
  rows.reserve(truth.size());
  for (const GroundTruthEntry& e : truth) rows.push_back(e.to_json());
  write_jsonl(path, rows);
}

std::vector<GroundTruthEntry> read_ground_truth(const std::string& path) {
  std::vector<GroundTruthEntry> out;
  read_jsonl(path, [&](size_t line, const Json& v) {
    out.push_back(GroundTruthEntry::from_json(v, path + ":" + std::to_string(line)));
  });
  return out;
}

void write_corpus(const std::string& dir, const Corpus& corpus) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<Json> manifest;
  for (const GeneratedProject& p : corpus.projects) {
    fs::path base = fs::path(dir) / p.name;
    fs::create_directories(base / "src");
    fs::create_directories(base / "tests");
    write_text(base / "src" / "core.mini", p.core_source);
    write_text(base / "tests" / "tests.mini", p.tests_source);
    write_ground_truth((base / "ground_truth.jsonl").string(), p.truth);
    Json row = Json::object();
    row["project"] = p.name;
    manifest.push_back(std::move(row));
  }
  write_jsonl((fs::path(dir) / "manifest.jsonl").string(), manifest);
}

std::vector<std::string> corpus_projects(const std::string& dir) {
  std::vector<std::string> names;
  std::string manifest = (std::filesystem::path(dir) / "manifest.jsonl").string();
  read_jsonl(manifest, [&](size_t line, const Json& v) {
    if (!v.is_object() || !v.contains("project") || !v["project"].is_string())
      throw FormatError(manifest + ":" + std::to_string(line), "bad manifest row");
    names.push_back(v["project"].get<std::string>());
  });
  return names;
}

}  // namespace forge::corpusgen
