// Copyright 2026 The Handgrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <list>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "handgrasp/contact.h"
#include "handgrasp/hand.h"
#include "handgrasp/mesh_io.h"
#include "handgrasp/sampling.h"
#include "handgrasp/scenes.h"

namespace handgrasp::cli {
namespace fs = std::filesystem;

ObjectOptions RunConfig::object_options() const {
  ObjectOptions options;
  options.grid.spacing = grid_spacing;
  options.grid.padding = grid_padding;
  options.num_samples = num_samples;
  options.seed = synthesis.seed;
  return options;
}

Json ToJson(const RunConfig& c) {
  return {{"object", c.object},
          {"contactmap", c.contactmap},
          {"regions", c.regions},
          {"field", c.field},
          {"property", c.property},
          {"tau_t", c.tau_t},
          {"hand", c.hand},
          {"num_samples", c.num_samples},
          {"grid_spacing", c.grid_spacing},
          {"grid_padding", c.grid_padding},
          {"seed", c.synthesis.seed},
          {"n_approach", c.synthesis.n_approach},
          {"objective", ToJson(c.synthesis.objective)},
          {"lm", ToJson(c.synthesis.lm)},
          {"anneal", ToJson(c.synthesis.anneal)}};
}

namespace {

void ReadString(const Json& j, const char* key, std::string* value) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string()) throw InputError(std::string("'") + key + "' must be a string");
  *value = j.at(key).get<std::string>();
}

template <typename T>
void ReadNumber(const Json& j, const char* key, T* value) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (std::is_integral_v<T> ? !v.is_number_integer() : !v.is_number()) {
    throw InputError(std::string("'") + key + "' has the wrong type");
  }
  if constexpr (std::is_unsigned_v<T>) {
    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<int64_t>() < 0) {
      throw InputError(std::string("'") + key + "' must be non-negative");
    }
  }
  *value = v.get<T>();
}

}  // namespace

void UpdateFromJson(const Json& j, RunConfig* c) {
  if (!j.is_object()) throw InputError("run config must be a JSON object");
  static const char* kKeys[] = {"object",      "contactmap",   "regions",      "field",
                                "property",    "tau_t",        "hand",         "num_samples",
                                "grid_spacing", "grid_padding", "seed",         "n_approach",
                                "objective",   "lm",           "anneal"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  ReadString(j, "object", &c->object);
  ReadString(j, "contactmap", &c->contactmap);
  ReadString(j, "regions", &c->regions);
  ReadString(j, "field", &c->field);
  ReadString(j, "property", &c->property);
  ReadString(j, "hand", &c->hand);
  ReadNumber(j, "tau_t", &c->tau_t);
  ReadNumber(j, "num_samples", &c->num_samples);
  ReadNumber(j, "grid_spacing", &c->grid_spacing);
  ReadNumber(j, "grid_padding", &c->grid_padding);
  ReadNumber(j, "seed", &c->synthesis.seed);
  ReadNumber(j, "n_approach", &c->synthesis.n_approach);
  if (j.contains("objective")) handgrasp::UpdateFromJson(j["objective"], &c->synthesis.objective);
  if (j.contains("lm")) handgrasp::UpdateFromJson(j["lm"], &c->synthesis.lm);
  if (j.contains("anneal")) handgrasp::UpdateFromJson(j["anneal"], &c->synthesis.anneal);
}

namespace {

// A command-line flag generated from one leaf of the run config.
struct ConfigFlag {
  std::string section;  // "" for top-level keys
  std::string key;
  Json default_value;
  std::string text;
  CLI::Option* option = nullptr;
};

std::string FlagName(const std::string& prefix, const std::string& key) {
  std::string name = "--" + prefix + key;
  std::replace(name.begin(), name.end(), '_', '-');
  return name;
}

const char* TypeName(const Json& value) {
  if (value.is_number_integer()) return "INT";
  return value.is_number() ? "FLOAT" : "TEXT";
}

std::string Describe(const std::string& key, const Json& value) {
  static const std::pair<const char*, const char*> kText[] = {
      {"object", "object mesh (OBJ or PLY)"},
      {"contactmap", "contact map file"},
      {"regions", "region spec file, applied to the object samples"},
      {"field", "PLY with a per-vertex contact value; also the object mesh"},
      {"property", "vertex property of --field (default quality)"},
      {"tau_t", "contact threshold for --field"},
      {"hand", "shipped hand name or .handcfg path"},
      {"num_samples", "object surface samples"},
      {"grid_spacing", "SDF grid spacing, meters"},
      {"grid_padding", "SDF grid margin, meters"},
      {"seed", "global random seed"},
      {"n_approach", "approach points; seeds = 16 x n_approach"},
  };
  std::string text = key;
  for (const auto& [k, t] : kText) {
    if (key == k) text = t;
  }
  if (!(value.is_string() && value.get<std::string>().empty())) {
    text += " (default " + value.dump() + ")";
  }
  return text;
}

// Every config leaf becomes a flag: top-level and objective keys as-is, LM
// keys with an `lm-` prefix and annealing keys with `anneal-`.
void AddConfigFlags(CLI::App* cmd, std::list<ConfigFlag>* flags, bool with_paths) {
  Json defaults = ToJson(RunConfig{});
  static const char* kPathKeys[] = {"object", "contactmap", "regions", "field", "property"};
  for (const auto& [key, value] : defaults.items()) {
    if (value.is_object()) {
      std::string prefix = key == "objective" ? "" : key + "-";
      for (const auto& [sub, sub_value] : value.items()) {
        flags->push_back({key, sub, sub_value, "", nullptr});
        flags->back().option =
            cmd->add_option(FlagName(prefix, sub), flags->back().text,
                            key + "." + sub + " (default " + sub_value.dump() + ")")
                ->type_name(TypeName(sub_value));
      }
      continue;
    }
    bool is_path =
        std::find(std::begin(kPathKeys), std::end(kPathKeys), key) != std::end(kPathKeys);
    if (is_path && !with_paths) continue;
    flags->push_back({"", key, value, "", nullptr});
    flags->back().option =
        cmd->add_option(FlagName("", key), flags->back().text, Describe(key, value))
            ->type_name(TypeName(value));
  }
}

Json ParseFlagValue(const ConfigFlag& flag) {
  const std::string& s = flag.text;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto fail = [&]() -> Json {
    throw InputError("invalid value '" + s + "' for " + flag.option->get_name());
  };
  if (flag.default_value.is_string()) return s;
  if (flag.default_value.is_number_unsigned()) {
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return fail();
    return v;
  }
  if (flag.default_value.is_number_integer()) {
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return fail();
    return v;
  }
  double v = 0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return fail();
  return v;
}

bool IsPathKey(const std::string& key) {
  return key == "object" || key == "contactmap" || key == "regions" || key == "field";
}

std::string AbsolutePath(const std::string& path, const fs::path& base) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_relative()) p = base / p;
  return fs::absolute(p).lexically_normal().string();
}

// Hands are named (shipped) or given by path.
bool IsHandPath(const std::string& hand) {
  return hand.find('/') != std::string::npos || fs::path(hand).has_extension();
}

// Defaults, then the config file, then flags.
RunConfig ResolveConfig(const std::string& config_path, const std::list<ConfigFlag>& flags) {
  Json merged = ToJson(RunConfig{});
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw InputError("cannot open config " + config_path);
    Json file;
    try {
      file = Json::parse(in);
    } catch (const Json::exception& e) {
      throw InputError(config_path + ": " + e.what());
    }
    if (!file.is_object()) throw InputError(config_path + ": expected a JSON object");
    fs::path base = fs::path(config_path).parent_path();
    for (auto& [key, value] : file.items()) {
      if (value.is_string() && (IsPathKey(key) || (key == "hand" && IsHandPath(value)))) {
        value = AbsolutePath(value.get<std::string>(), base);
      }
    }
    // Validate before merging so unknown keys are reported against the file.
    RunConfig scratch;
    UpdateFromJson(file, &scratch);
    merged.merge_patch(file);
  }
  Json overlay = Json::object();
  for (const ConfigFlag& flag : flags) {
    if (flag.option->count() == 0) continue;
    Json value = ParseFlagValue(flag);
    if (value.is_string() &&
        (IsPathKey(flag.key) || (flag.key == "hand" && IsHandPath(value)))) {
      value = AbsolutePath(value.get<std::string>(), fs::current_path());
    }
    if (flag.section.empty()) {
      overlay[flag.key] = value;
    } else {
      overlay[flag.section][flag.key] = value;
    }
  }
  merged.merge_patch(overlay);
  RunConfig config;
  UpdateFromJson(merged, &config);
  if (!(config.grid_spacing > 0.0) || !(config.grid_padding >= 0.0)) {
    throw InputError("grid_spacing must be positive and grid_padding non-negative");
  }
  if (config.num_samples < 1) throw InputError("num_samples must be positive");
  config.synthesis.objective.Validate();
  config.synthesis.lm.Validate();
  config.synthesis.anneal.Validate();
  if (config.synthesis.n_approach < 1) throw InputError("n_approach must be positive");
  return config;
}

HandModel LoadHand(const std::string& hand) { return HandModel::Load(ShippedHandPath(hand)); }

void RequireFile(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw InputError(std::string(what) + " not found: " + path);
}

struct Inputs {
  std::optional<ObjectModel> object;
  std::optional<ContactMap> map;
  Mesh mesh;  // the object surface, for exports
};

// Loads the object and contact map named by `config`.
Inputs LoadInputs(const RunConfig& config) {
  int sources = !config.contactmap.empty() + !config.regions.empty() + !config.field.empty();
  if (sources != 1) {
    throw InputError("give exactly one contact source: contactmap, regions or field");
  }
  Inputs in;
  std::vector<double> values;
  if (!config.field.empty()) {
    RequireFile(config.field, "contact field");
    if (!config.object.empty()) {
      throw InputError("a contact field carries its own mesh; drop the object path");
    }
    auto loaded = LoadPlyWithScalar(config.field, config.property);
    in.mesh = std::move(loaded.first);
    values = std::move(loaded.second);
  } else {
    if (config.object.empty()) throw InputError("object mesh path is required");
    RequireFile(config.object, "object mesh");
    in.mesh = LoadMesh(config.object);
  }
  in.object = ObjectModel::FromMesh(in.mesh, config.object_options());
  if (!config.field.empty()) {
    ScalarContactField field(in.mesh, std::move(values));
    in.map = BuildContactMap(field, in.object->samples(), config.tau_t, "field");
  } else if (!config.regions.empty()) {
    RequireFile(config.regions, "region spec");
    in.map = ManualContactMap(in.object->samples(), LoadRegions(config.regions));
  } else {
    RequireFile(config.contactmap, "contact map");
    in.map = ContactMap::Load(config.contactmap);
    // A map from another object, or in another frame, would silently produce
    // meaningless grasps.
    double tolerance = std::max(3.0 * config.grid_spacing, 0.002);
    int off = 0;
    for (const ContactPoint& p : in.map->points()) {
      off += std::abs(in.object->Query(p.position).value) > tolerance;
    }
    if (off > in.map->size() / 20) {
      throw InputError(std::to_string(off) + " of " + std::to_string(in.map->size()) +
                       " contact points are off the object surface");
    }
  }
  return in;
}

// Files written by a command; removed again unless committed.
class OutputGuard {
 public:
  explicit OutputGuard(fs::path dir) : dir_(std::move(dir)) {
    created_dir_ = !fs::exists(dir_);
    fs::create_directories(dir_);
  }
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    if (created_dir_) {
      fs::remove_all(dir_, ec);
      return;
    }
    for (const fs::path& p : files_) fs::remove_all(p, ec);
  }
  fs::path Add(const fs::path& relative) {
    fs::path p = dir_ / relative;
    if (!fs::exists(p)) files_.push_back(dir_ / *relative.begin());
    return p;
  }
  void Commit() { committed_ = true; }

 private:
  fs::path dir_;
  bool created_dir_ = false;
  bool committed_ = false;
  std::vector<fs::path> files_;
};

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

std::string Pretty(const Json& j) { return j.dump(2) + "\n"; }

std::string RankFileName(int rank) {
  char name[32];
  std::snprintf(name, sizeof(name), "grasp_rank%03d.obj", rank);
  return name;
}

void ExportObj(const fs::path& path, const Mesh& object, const HandModel& hand,
               const HandPose& pose) {
  std::vector<NamedMesh> meshes = {{"object", object}};
  for (NamedMesh& m : PosedHandMeshes(hand, pose)) meshes.push_back(std::move(m));
  WriteObj(path, meshes);
}

// --- contactmap -----------------------------------------------------------

struct ContactMapArgs {
  std::string mesh, field, property, regions, out, inspect;
  double tau_t = 0.3;
  int num_samples = 5000;
  uint64_t seed = 0;
};

void PrintSummary(const ContactMap& map, std::ostream& out) {
  int n = map.size(), a = map.NumAttractive();
  char line[160];
  std::snprintf(line, sizeof(line),
                "points %d attractive %d (%.2f%%) repulsive %d (%.2f%%)", n, a,
                100.0 * a / n, n - a, 100.0 * (n - a) / n);
  out << line;
  if (map.tau_t() != kNoThreshold) out << " tau_t " << map.tau_t();
  out << "\n";
}

int RunContactMap(const ContactMapArgs& args, std::ostream& out) {
  if (!args.inspect.empty()) {
    RequireFile(args.inspect, "contact map");
    PrintSummary(ContactMap::Load(args.inspect), out);
    return kExitOk;
  }
  if (args.out.empty()) throw InputError("--out is required");
  if (args.field.empty() == args.regions.empty()) {
    throw InputError("give exactly one of --field or --regions");
  }
  if (args.num_samples < 1) throw InputError("--num-samples must be positive");
  ContactMap map;
  if (!args.field.empty()) {
    RequireFile(args.field, "contact field");
    if (!args.mesh.empty()) throw InputError("--field carries its own mesh; drop --mesh");
    auto [mesh, values] = LoadPlyWithScalar(args.field, args.property);
    std::vector<SurfacePoint> samples = SampleSurface(mesh, args.num_samples, args.seed);
    ScalarContactField field(std::move(mesh), std::move(values));
    map = BuildContactMap(field, samples, args.tau_t, fs::path(args.field).filename().string());
  } else {
    if (args.mesh.empty()) throw InputError("--regions needs --mesh");
    RequireFile(args.mesh, "mesh");
    RequireFile(args.regions, "region spec");
    std::vector<SurfacePoint> samples =
        SampleSurface(LoadMesh(args.mesh), args.num_samples, args.seed);
    std::vector<std::string> warnings;
    map = ManualContactMap(samples, LoadRegions(args.regions), &warnings);
    for (const std::string& w : warnings) out << "warning: " << w << "\n";
  }
  map.Save(args.out);
  out << "wrote " << args.out << "\n";
  PrintSummary(map, out);
  return kExitOk;
}

// --- synthesize -------------------------------------------------------------

struct SynthesizeArgs {
  std::string config, out;
  int threads = 0;
  int top_k = 0;
  bool trace = false;
};

Json SampleSetJson(const RankedGraspSet& set) {
  std::vector<const RankedEntry*> sampled;
  for (const RankedEntry& e : set.entries) {
    if (!e.injected) sampled.push_back(&e);
  }
  std::sort(sampled.begin(), sampled.end(),
            [](const RankedEntry* a, const RankedEntry* b) { return a->index < b->index; });
  Json out = Json::array();
  for (const RankedEntry* e : sampled) {
    out.push_back({{"index", e->index},
                   {"seed", ToJson(e->seed)},
                   {"pose", ToJson(e->sampled_pose)},
                   {"energy", e->contact_energy}});
  }
  return out;
}

int RunSynthesize(const SynthesizeArgs& args, const std::list<ConfigFlag>& flags,
                  std::ostream& out) {
  if (args.top_k < 0) throw InputError("--top-k must be non-negative");
  RunConfig config = ResolveConfig(args.config, flags);
  HandModel hand = LoadHand(config.hand);
  Inputs in = LoadInputs(config);

  SynthesisConfig synthesis = config.synthesis;
  synthesis.threads = args.threads;
  RankedGraspSet ranked;
  OutputGuard guard(args.out);
  try {
    ranked = Synthesize(*in.object, *in.map, hand, synthesis);
    Json echo = ToJson(config);
    WriteText(guard.Add("config.json"), Pretty(echo));
    WriteText(guard.Add("ranked.json"), Pretty({{"config", echo}, {"ranked", ToJson(ranked)}}));
    WriteText(guard.Add("samples.json"), Pretty(SampleSetJson(ranked)));
    int k = std::min<int>(args.top_k, ranked.entries.size());
    if (k > 0) {
      fs::create_directories(guard.Add("grasps"));
      for (int i = 0; i < k; ++i) {
        const RankedEntry& e = ranked.entries[i];
        ExportObj(guard.Add(fs::path("grasps") / RankFileName(e.rank)), in.mesh, hand, e.pose);
      }
    }
    if (args.trace) {
      fs::create_directories(guard.Add("trace"));
      for (const RankedEntry& e : ranked.entries) {
        LmResult log;
        log.log = e.lm_log;
        char name[48];
        std::snprintf(name, sizeof(name), "candidate_%04d.jsonl", e.index);
        WriteText(guard.Add(fs::path("trace") / name), TraceJsonLines(log));
      }
    }
  } catch (const std::exception& e) {
    throw Error(std::string("synthesis failed: ") + e.what());
  }
  guard.Commit();
  const RankedEntry& best = ranked.entries.front();
  int flagged = std::count_if(ranked.entries.begin(), ranked.entries.end(),
                              [](const RankedEntry& e) { return e.flagged; });
  out << "ranked " << ranked.entries.size() << " grasps (" << flagged
      << " flagged); best L " << best.report.total << " L_grasp " << best.report.grasp()
      << "\nwrote " << (fs::path(args.out) / "ranked.json").string() << "\n";
  return kExitOk;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string config, manifest, out;
  std::vector<std::string> only;
  int threads = 0;
};

int RunEval(const EvalArgs& args, const std::list<ConfigFlag>& flags, std::ostream& out,
            std::ostream& err) {
  if (args.out.empty()) throw InputError("--out is required");
  RunConfig config = ResolveConfig(args.config, flags);
  HandModel hand = LoadHand(config.hand);
  fs::path manifest = args.manifest.empty() ? ShippedManifestPath() : fs::path(args.manifest);
  std::vector<ScenarioSpec> specs = ReadScenarioManifest(manifest);
  if (!args.only.empty()) {
    std::erase_if(specs, [&](const ScenarioSpec& s) {
      return std::find(args.only.begin(), args.only.end(), s.name) == args.only.end();
    });
    if (specs.empty()) throw InputError("no scenario matches --scenario");
  }
  SynthesisConfig synthesis = config.synthesis;
  synthesis.threads = args.threads;
  SceneOptions scene_options;
  scene_options.object = config.object_options();

  EvalReport report;
  Json errors = Json::array();
  for (const ScenarioSpec& spec : specs) {
    try {
      EvalScenario scenario = BuildScenario(spec, hand, scene_options);
      report.scenarios.push_back(EvaluateScenario(scenario, hand, synthesis));
      const ScenarioResult& r = report.scenarios.back();
      out << spec.name << ": residual rank " << r.residual_rank << (r.residual_flagged ? "*" : "")
          << ", contact-energy rank " << r.contact_energy_rank
          << (r.contact_energy_flagged ? "*" : "") << " of " << r.num_entries << "\n";
    } catch (const std::exception& e) {
      err << "scenario '" << spec.name << "' failed: " << e.what() << "\n";
      errors.push_back({{"scenario", spec.name}, {"error", e.what()}});
    }
  }
  auto median = [&](auto field) {
    std::vector<double> v;
    for (const ScenarioResult& r : report.scenarios) v.push_back(r.*field);
    return v.empty() ? Json(nullptr) : Json(Median(v));
  };
  Json j = ToJson(report);
  j["median_residual_rank"] = median(&ScenarioResult::residual_rank);
  j["median_contact_energy_rank"] = median(&ScenarioResult::contact_energy_rank);
  j["median_top1_grasp_by_residual"] = median(&ScenarioResult::top1_grasp_by_residual);
  j["median_top1_grasp_by_contact_energy"] =
      median(&ScenarioResult::top1_grasp_by_contact_energy);
  j["errors"] = errors;
  j["manifest"] = fs::absolute(manifest).lexically_normal().string();
  // Scenarios bring their own objects and contacts.
  Json echo = ToJson(config);
  for (const char* key : {"object", "contactmap", "regions", "field", "property"}) {
    echo.erase(key);
  }
  j["config"] = echo;
  fs::path out_path(args.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  WriteText(out_path, Pretty(j));
  out << "wrote " << out_path.string() << "\n";
  return errors.empty() ? kExitOk : kExitEval;
}

// --- export -----------------------------------------------------------------

struct ExportArgs {
  std::string run, out, metric = "residual";
  int top_k = 1;
  bool sampled = false;
};

Json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

int RunExport(const ExportArgs& args, std::ostream& out) {
  if (args.top_k < 1) throw InputError("--top-k must be positive");
  fs::path run(args.run);
  RunConfig config;
  UpdateFromJson(ReadJson(run / "config.json"), &config);
  Json ranked = ReadJson(run / "ranked.json");
  if (!ranked.contains("ranked") || !ranked["ranked"].contains("entries")) {
    throw InputError((run / "ranked.json").string() + " has no ranked entries");
  }
  RankMetric metric = ParseRankMetric(args.metric);
  HandModel hand = LoadHand(config.hand);
  Mesh mesh;
  if (!config.field.empty()) {
    RequireFile(config.field, "contact field");
    mesh = LoadPlyWithScalar(config.field, config.property).first;
  } else {
    RequireFile(config.object, "object mesh");
    mesh = LoadMesh(config.object);
  }
  std::vector<Json> entries(ranked["ranked"]["entries"].begin(),
                            ranked["ranked"]["entries"].end());
  auto key = [&](const Json& e) {
    double l = e.at("L").get<double>(), ce = e.at("contact_energy").get<double>();
    int index = e.at("index").get<int>();
    if (metric == RankMetric::kResidual) return std::tuple(l, ce, index);
    return std::tuple(ce, e.at("sampled_report").at("total").get<double>(), index);
  };
  std::stable_sort(entries.begin(), entries.end(),
                   [&](const Json& a, const Json& b) { return key(a) < key(b); });
  fs::path dir = args.out.empty() ? run / "grasps" : fs::path(args.out);
  fs::create_directories(dir);
  int k = std::min<int>(args.top_k, entries.size());
  for (int i = 0; i < k; ++i) {
    HandPose pose = PoseFromJson(entries[i].at(args.sampled ? "sampled_pose" : "pose"));
    ExportObj(dir / RankFileName(i + 1), mesh, hand, pose);
  }
  out << "exported " << k << " grasps to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contact-guided grasp synthesis for multi-fingered hands", "handgrasp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "handgrasp 0.1.0");

  ContactMapArgs cm;
  CLI::App* contactmap = app.add_subcommand(
      "contactmap", "Threshold a per-vertex contact field, or apply a region spec, into a map");
  contactmap->add_option("--field", cm.field, "PLY mesh with a per-vertex contact value");
  contactmap->add_option("--property", cm.property, "PLY vertex property (default quality)");
  contactmap->add_option("--tau-t", cm.tau_t, "attractive iff value >= tau_t")
      ->capture_default_str();
  contactmap->add_option("--mesh", cm.mesh, "object mesh for --regions");
  contactmap->add_option("--regions", cm.regions, "region spec file");
  contactmap->add_option("--num-samples", cm.num_samples, "surface samples")
      ->capture_default_str();
  contactmap->add_option("--seed", cm.seed, "sampling seed")->capture_default_str();
  contactmap->add_option("-o,--out", cm.out, "output .contactmap");
  contactmap->add_option("--inspect", cm.inspect, "print the summary of an existing map");

  SynthesizeArgs sy;
  std::list<ConfigFlag> sy_flags;
  CLI::App* synthesize =
      app.add_subcommand("synthesize", "Sample, refine and rank grasps for one object");
  synthesize->add_option("--config", sy.config, "JSON run config; flags override it");
  synthesize->add_option("-o,--out", sy.out, "output directory")->required();
  synthesize->add_option("--threads", sy.threads, "worker threads (0 = all cores)");
  synthesize->add_option("--top-k", sy.top_k, "export the best k grasps as OBJ");
  synthesize->add_flag("--trace", sy.trace, "write per-candidate LM traces");
  AddConfigFlags(synthesize, &sy_flags, true);

  EvalArgs ev;
  std::list<ConfigFlag> ev_flags;
  CLI::App* eval = app.add_subcommand("eval", "Run a scenario suite and report target ranks");
  eval->add_option("--manifest", ev.manifest, "scenario manifest (default: shipped suite)");
  eval->add_option("--config", ev.config, "JSON run config; flags override it");
  eval->add_option("-o,--out", ev.out, "report JSON path")->required();
  eval->add_option("--scenario", ev.only, "only run the named scenarios");
  eval->add_option("--threads", ev.threads, "worker threads (0 = all cores)");
  AddConfigFlags(eval, &ev_flags, false);

  ExportArgs ex;
  CLI::App* exporter =
      app.add_subcommand("export", "Write posed-hand OBJ files from a synthesize run");
  exporter->add_option("--run", ex.run, "synthesize output directory")->required();
  exporter->add_option("--top-k", ex.top_k, "number of grasps")->capture_default_str();
  exporter->add_option("--metric", ex.metric, "residual or contact_energy")
      ->capture_default_str();
  exporter->add_flag("--sampled", ex.sampled, "export the pre-refinement poses");
  exporter->add_option("-o,--out", ex.out, "output directory (default RUN/grasps)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  int failure = kExitSynthesis;
  if (*eval) failure = kExitEval;
  try {
    if (*contactmap) {
      failure = kExitInput;
      return RunContactMap(cm, out);
    }
    if (*synthesize) return RunSynthesize(sy, sy_flags, out);
    if (*eval) return RunEval(ev, ev_flags, out, err);
    return RunExport(ex, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return failure;
  }
}

}  // namespace handgrasp::cli
