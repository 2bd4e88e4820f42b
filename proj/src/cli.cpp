#include "omit/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "omit/oracle.hpp"
#include "omit/response.hpp"

namespace omit::cli {

namespace {

struct Flags {
  std::string scenario;
  std::string config;
  std::string out;
  std::string out_dir;
  std::string grid;
  std::string method;
  std::string phases;
  std::string root_case;
  double prominence = -1.0;
  bool skip_time_domain = false;
};

std::string method_suffix(Method m) {
  switch (m) {
    case Method::closed_form: return "closed";
    case Method::linear_solve: return "solve";
    case Method::eliminated: return "eliminated";
  }
  return "unknown";
}

std::filesystem::path with_suffix(const std::filesystem::path& path, const std::string& suffix) {
  std::filesystem::path out = path;
  out.replace_filename(path.stem().string() + "_" + suffix + path.extension().string());
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open '" + path.string() + "' for writing");
  file << text;
  if (!file) throw Error("failed writing '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json header(const char* command, const RunConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["scenario"] = cfg.scenario_label();
  return j;
}

// Primary artifact goes to --out, else --out-dir/<name>, else stdout.
void deliver(const RunConfig& cfg, const std::string& default_name, const std::string& text,
             std::ostream& out) {
  if (cfg.out) {
    write_text(*cfg.out, text);
  } else if (cfg.out_dir) {
    write_text(*cfg.out_dir / default_name, text);
  } else {
    out << text;
  }
}

double relative(cplx a, cplx ref) {
  const double scale = std::abs(ref);
  return scale > 0.0 ? std::abs(a - ref) / scale : std::abs(a - ref);
}

struct Deviation {
  double max = 0.0;
  double at = 0.0;
  std::size_t compared = 0;
  std::vector<double> failed;

  void add(double delta, double rel) {
    ++compared;
    if (rel > max || compared == 1) {
      if (rel >= max) {
        max = rel;
        at = delta;
      }
    }
  }

  Json json() const {
    return Json{{"max_relative_deviation", max}, {"at_delta", at}, {"points_compared", compared},
                {"points_failed", failed}};
  }
};

Json build_check(const RunConfig& cfg, const SystemParams& p, const SteadyState& ss,
                 bool time_domain) {
  Json j = header("check", cfg);
  j["grid"] = grid_to_json(cfg.grid);
  j["params"] = params_to_json(p);

  Deviation closed;
  Deviation eliminated;
  Deviation half_drive;
  Deviation td;
  std::vector<double> ratios;
  std::vector<double> skipped;
  const bool phonon = p.eps_m != 0.0;

  for (const double d : cfg.grid.points()) {
    cplx ref;
    try {
      ref = solve_sidebands(assemble_plus(p, ss, d)).value(Variable::c);
    } catch (const NumericalError&) {
      skipped.push_back(d);
      continue;
    }
    try {
      const cplx c = delta_c_plus_closed_form(p, ss, d);
      closed.add(d, relative(c, ref));
      ratios.push_back(std::abs(c / ref));
      if (phonon) {
        SidebandSystem half = assemble_plus(p, ss, d);
        half.rhs(1) *= 0.5;
        half_drive.add(d, relative(c, solve_sidebands(half).value(Variable::c)));
      }
    } catch (const NumericalError&) {
      closed.failed.push_back(d);
    }
    try {
      eliminated.add(d, relative(delta_c_plus_eliminated(p, ss, d), ref));
    } catch (const NumericalError&) {
      eliminated.failed.push_back(d);
    }
    if (time_domain) {
      try {
        td.add(d, relative(time_domain_delta_c(p, ss, d), ref));
      } catch (const NumericalError&) {
        td.failed.push_back(d);
      }
    }
  }

  j["reference"] = "linear_solve";
  j["skipped"] = skipped;
  Json c = closed.json();
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    c["ratio_abs"] = Json{{"min", ratios.front()},
                          {"median", ratios[ratios.size() / 2]},
                          {"max", ratios.back()}};
  }
  j["closed_form_vs_linear_solve"] = c;
  j["eliminated_vs_linear_solve"] = eliminated.json();
  if (phonon) {
    // The phonon drive per sideband is ambiguous (full or half amplitude);
    // report how the closed form fares against a halved sideband drive too.
    j["closed_form_vs_half_phonon_drive"] = half_drive.json();
  }
  if (time_domain) {
    Json t = td.json();
    t["mode"] = "periodic";
    j["time_domain_vs_linear_solve"] = t;
  }
  const DriftSpectrum spec = drift_spectrum(p, ss);
  j["drift"] = Json{{"max_real_eigenvalue", spec.max_real}, {"stable", spec.stable()}};
  return j;
}

Json build_features(const RunConfig& cfg, const SystemParams& p, const SteadyState& ss) {
  Json j = header("features", cfg);
  j["grid"] = grid_to_json(cfg.grid);
  j["prominence_fraction"] = cfg.prominence;
  if (cfg.scenario) {
    Json expected = Json::array();
    for (const auto& e : scenario(*cfg.scenario).expected_features) {
      expected.push_back(Json{{"kind", std::string(to_string(e.kind))}, {"location", e.location}});
    }
    j["expected_features"] = expected;
  }
  Json results = Json::array();
  for (const Method m : cfg.methods()) {
    const Profile prof = sweep(p, ss, cfg.grid, m);
    const double threshold = default_min_prominence(prof, cfg.prominence);
    const auto features = detect_features(prof, threshold);
    std::size_t peaks = 0;
    std::size_t dips = 0;
    for (const auto& f : features) (f.kind == FeatureKind::peak ? peaks : dips)++;
    results.push_back(Json{{"method", std::string(to_string(m))},
                           {"min_prominence", threshold},
                           {"peak_count", peaks},
                           {"dip_count", dips},
                           {"features", features_to_json(features)},
                           {"skipped", prof.skipped}});
  }
  j["results"] = results;
  return j;
}

RootCase auto_root_case(const SystemParams& p) {
  if (p.g2 != 0.0 || p.eps_m != 0.0) {
    throw ValidationError("no reduced denominator applies: roots need G2 = 0 and eps_m = 0");
  }
  if (p.g1 == 0.0 && p.ga == 0.0) return RootCase::eq13;
  if (p.g1 == 0.0) return RootCase::eq14;
  return RootCase::eq16;
}

Json build_roots(const RunConfig& cfg, const SystemParams& p, const SteadyState& ss,
                 std::optional<RootCase> forced) {
  Json j = header("roots", cfg);
  const RootReport report = denominator_roots(forced ? *forced : auto_root_case(p), p, ss);
  const Json body = roots_to_json(report);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j;
}

void emit_requested(const RunConfig& cfg, const SystemParams& p, const SteadyState& ss,
                    bool time_domain) {
  for (const auto& req : cfg.outputs) {
    if (req.kind == "profile_csv") {
      emit_profile_csv(sweep(p, ss, cfg.grid, cfg.methods().front()), req.path);
    } else if (req.kind == "features_json") {
      write_text(req.path, dump(build_features(cfg, p, ss)));
    } else if (req.kind == "roots_json") {
      write_text(req.path, dump(build_roots(cfg, p, ss, std::nullopt)));
    } else if (req.kind == "oracle_report_json") {
      write_text(req.path, dump(build_check(cfg, p, ss, time_domain)));
    }
  }
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const SystemParams p = cfg.resolved_params();
  const SteadyState ss = steady_state(p);
  const auto methods = cfg.methods();
  if (methods.size() > 1 && !cfg.out && !cfg.out_dir) {
    throw ValidationError("--method both needs --out or --out-dir");
  }
  for (const Method m : methods) {
    const Profile prof = sweep(p, ss, cfg.grid, m);
    std::ostringstream csv;
    write_profile_csv(prof, csv);
    if (methods.size() == 1) {
      deliver(cfg, "profile.csv", csv.str(), out);
    } else {
      const auto base = cfg.out ? *cfg.out : *cfg.out_dir / "profile.csv";
      write_text(with_suffix(base, method_suffix(m)), csv.str());
    }
  }
  emit_requested(cfg, p, ss, true);
  return ok;
}

int cmd_check(const RunConfig& cfg, bool time_domain, std::ostream& out) {
  const SystemParams p = cfg.resolved_params();
  const SteadyState ss = steady_state(p);
  deliver(cfg, "oracle_report.json", dump(build_check(cfg, p, ss, time_domain)), out);
  emit_requested(cfg, p, ss, time_domain);
  return ok;
}

int cmd_features(const RunConfig& cfg, std::ostream& out) {
  const SystemParams p = cfg.resolved_params();
  const SteadyState ss = steady_state(p);
  deliver(cfg, "features.json", dump(build_features(cfg, p, ss)), out);
  emit_requested(cfg, p, ss, true);
  return ok;
}

int cmd_roots(const RunConfig& cfg, const std::string& root_case, std::ostream& out) {
  const SystemParams p = cfg.resolved_params();
  const SteadyState ss = steady_state(p);
  std::optional<RootCase> forced;
  if (!root_case.empty()) forced = parse_root_case(root_case);
  deliver(cfg, "roots.json", dump(build_roots(cfg, p, ss, forced)), out);
  emit_requested(cfg, p, ss, true);
  return ok;
}

int cmd_phase_study(const RunConfig& cfg, std::ostream& out) {
  const SystemParams p = cfg.resolved_params();
  const auto methods = cfg.methods();
  if (methods.size() != 1) throw ValidationError("phase-study takes a single method");
  std::vector<double> phases = cfg.phases;
  if (phases.empty()) phases = {0.0, std::numbers::pi / 2.0, std::numbers::pi};

  const PhaseStudy study = phase_study(p, phases, cfg.grid, methods.front(), cfg.prominence);

  Json j = header("phase-study", cfg);
  j["grid"] = grid_to_json(cfg.grid);
  j["method"] = std::string(to_string(methods.front()));
  j["phases"] = phases;
  Json per_phase = Json::array();
  for (std::size_t k = 0; k < phases.size(); ++k) {
    per_phase.push_back(Json{{"phase", phases[k]}, {"features", features_to_json(study.features[k])}});
  }
  j["features_per_phase"] = per_phase;
  Json tracks = Json::array();
  for (const auto& t : study.tracks) {
    Json entries = Json::array();
    for (std::size_t k = 0; k < phases.size(); ++k) {
      const auto& f = t.per_phase[k];
      entries.push_back(f ? Json{{"phase", phases[k]}, {"location", f->location}, {"value", f->value},
                                 {"prominence", f->prominence}}
                          : Json(nullptr));
    }
    tracks.push_back(Json{{"kind", std::string(to_string(t.kind))}, {"per_phase", entries}});
  }
  j["tracks"] = tracks;
  j["quadratic_track"] = study.quadratic_track ? Json(*study.quadratic_track) : Json(nullptr);

  if (cfg.out_dir) {
    for (std::size_t k = 0; k < phases.size(); ++k) {
      std::filesystem::create_directories(*cfg.out_dir);
      emit_profile_csv(study.profiles[k], *cfg.out_dir / ("profile_phase_" + std::to_string(k) + ".csv"));
    }
  }
  deliver(cfg, "phase_study.json", dump(j), out);
  return ok;
}

int cmd_list(const RunConfig& cfg, std::ostream& out) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["scenarios"] = scenarios_to_json();
  deliver(cfg, "scenarios.json", dump(j), out);
  return ok;
}

Json load_json_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot read config '" + path + "'");
  try {
    return Json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

RunConfig resolve(const Flags& flags, bool needs_scenario) {
  RunConfig cfg;
  if (!flags.config.empty()) cfg = parse_config(load_json_file(flags.config));
  if (!flags.scenario.empty()) {
    cfg.scenario = flags.scenario;
    cfg.params.reset();
  }
  if (!flags.grid.empty()) cfg.grid = parse_grid(flags.grid);
  if (!flags.method.empty()) cfg.method = parse_method(flags.method);
  if (!flags.phases.empty()) cfg.phases = parse_phases(flags.phases);
  if (flags.prominence >= 0.0) cfg.prominence = flags.prominence;
  if (!flags.out.empty()) cfg.out = flags.out;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (needs_scenario && !cfg.scenario && !cfg.params) {
    throw ValidationError("no scenario given: use --scenario or a config with 'scenario' or 'params'");
  }
  if (cfg.scenario) scenario(*cfg.scenario);
  return cfg;
}

int report_error(std::ostream& err, const char* kind, const std::string& message, int code) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["error"] = Json{{"kind", kind}, {"message", message}, {"exit_code", code}};
  err << j.dump() << '\n';
  return code;
}

}  // namespace

SystemParams RunConfig::resolved_params() const {
  if (scenario) return omit::scenario(*scenario).params;
  if (params) return *params;
  throw ValidationError("no scenario given");
}

std::string RunConfig::scenario_label() const { return scenario ? *scenario : "inline"; }

std::vector<Method> RunConfig::methods() const {
  switch (method) {
    case MethodChoice::closed: return {Method::closed_form};
    case MethodChoice::solve: return {Method::linear_solve};
    case MethodChoice::eliminated: return {Method::eliminated};
    case MethodChoice::both: return {Method::closed_form, Method::linear_solve};
  }
  return {Method::linear_solve};
}

MethodChoice parse_method(std::string_view text) {
  if (text == "closed") return MethodChoice::closed;
  if (text == "solve") return MethodChoice::solve;
  if (text == "eliminated") return MethodChoice::eliminated;
  if (text == "both") return MethodChoice::both;
  throw ConfigError("unknown method '" + std::string(text) + "' (closed, solve, eliminated, both)");
}

RunConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const char* const known[] = {"scenario", "params", "grid", "method", "outputs", "phases", "prominence", "out_dir"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  RunConfig cfg;
  const bool has_scenario = doc.contains("scenario");
  const bool has_params = doc.contains("params");
  if (has_scenario == has_params) {
    throw ValidationError("config needs exactly one of 'scenario' or 'params'");
  }
  if (has_scenario) {
    if (!doc["scenario"].is_string()) throw ConfigError("'scenario' must be a string");
    cfg.scenario = doc["scenario"].get<std::string>();
  } else {
    cfg.params = params_from_json(doc["params"]);
  }

  if (doc.contains("grid")) {
    const Json& g = doc["grid"];
    if (g.is_string()) {
      cfg.grid = parse_grid(g.get<std::string>());
    } else if (g.is_object() && g.contains("min") && g.contains("max") && g.contains("count") &&
               g["min"].is_number() && g["max"].is_number() && g["count"].is_number_unsigned()) {
      cfg.grid = validate_grid(Grid{g["min"].get<double>(), g["max"].get<double>(), g["count"].get<std::size_t>()});
    } else {
      throw ConfigError("'grid' must be \"min:max:count\" or {min, max, count}");
    }
  }
  if (doc.contains("method")) {
    if (!doc["method"].is_string()) throw ConfigError("'method' must be a string");
    cfg.method = parse_method(doc["method"].get<std::string>());
  }
  if (doc.contains("prominence")) {
    if (!doc["prominence"].is_number()) throw ConfigError("'prominence' must be a number");
    cfg.prominence = doc["prominence"].get<double>();
    if (!(cfg.prominence >= 0.0)) throw ValidationError("prominence must be non-negative");
  }
  if (doc.contains("phases")) {
    const Json& ph = doc["phases"];
    if (ph.is_string()) {
      cfg.phases = parse_phases(ph.get<std::string>());
    } else if (ph.is_array()) {
      for (const auto& v : ph) {
        if (v.is_number()) cfg.phases.push_back(v.get<double>());
        else if (v.is_string()) cfg.phases.push_back(parse_phases(v.get<std::string>()).at(0));
        else throw ConfigError("'phases' entries must be numbers or strings");
      }
    } else {
      throw ConfigError("'phases' must be a list or a comma-separated string");
    }
  }
  if (doc.contains("out_dir")) {
    if (!doc["out_dir"].is_string()) throw ConfigError("'out_dir' must be a string");
    cfg.out_dir = doc["out_dir"].get<std::string>();
  }
  if (doc.contains("outputs")) {
    if (!doc["outputs"].is_array()) throw ConfigError("'outputs' must be a list");
    static const std::pair<const char*, const char*> defaults[] = {
        {"profile_csv", "profile.csv"},
        {"features_json", "features.json"},
        {"roots_json", "roots.json"},
        {"oracle_report_json", "oracle_report.json"}};
    for (const auto& o : doc["outputs"]) {
      OutputRequest req;
      std::string path;
      if (o.is_string()) {
        req.kind = o.get<std::string>();
      } else if (o.is_object() && o.contains("kind") && o["kind"].is_string()) {
        req.kind = o["kind"].get<std::string>();
        if (o.contains("path")) {
          if (!o["path"].is_string()) throw ConfigError("output 'path' must be a string");
          path = o["path"].get<std::string>();
          if (path.empty()) throw ValidationError("output path for '" + req.kind + "' is empty");
        }
      } else {
        throw ConfigError("'outputs' entries must be a kind or {kind, path}");
      }
      const auto it = std::find_if(std::begin(defaults), std::end(defaults),
                                   [&](const auto& d) { return req.kind == d.first; });
      if (it == std::end(defaults)) throw ConfigError("unknown output kind '" + req.kind + "'");
      const std::filesystem::path dir = cfg.out_dir ? *cfg.out_dir : std::filesystem::path(".");
      req.path = path.empty() ? dir / it->second : std::filesystem::path(path);
      cfg.outputs.push_back(req);
    }
  }
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probe response of a hybrid atom-optomechanical cavity", "omit"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&](CLI::App* sub, bool with_grid) {
    sub->add_option("--scenario", flags.scenario, "preset name (see list-scenarios)");
    sub->add_option("--config", flags.config, "JSON run configuration");
    sub->add_option("--out", flags.out, "output file (default: stdout)");
    sub->add_option("--out-dir", flags.out_dir, "output directory");
    if (with_grid) {
      sub->add_option("--grid", flags.grid, "detuning grid min:max:count (default 0:4:801)");
      sub->add_option("--method", flags.method, "closed | solve | eliminated | both (default solve)");
    }
  };

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "write a detuning profile as CSV");
  common(sweep_cmd, true);
  CLI::App* check_cmd = app.add_subcommand("check", "cross-check evaluators against the linear solve");
  common(check_cmd, true);
  check_cmd->add_flag("--skip-time-domain", flags.skip_time_domain, "omit the time-domain oracle");
  CLI::App* features_cmd = app.add_subcommand("features", "detect peaks and dips of Re(eps_out)");
  common(features_cmd, true);
  features_cmd->add_option("--prominence", flags.prominence, "minimum prominence, fraction of span (default 0.02)");
  CLI::App* roots_cmd = app.add_subcommand("roots", "roots of a reduced response denominator");
  common(roots_cmd, false);
  roots_cmd->add_option("--case", flags.root_case, "eq13 | eq14 | eq16 (default: from couplings)");
  CLI::App* phase_cmd = app.add_subcommand("phase-study", "sweeps across phonon-pump phases");
  common(phase_cmd, true);
  phase_cmd->add_option("--phases", flags.phases, "comma list, e.g. 0,pi/2,pi");
  phase_cmd->add_option("--prominence", flags.prominence, "minimum prominence, fraction of span (default 0.02)");
  CLI::App* list_cmd = app.add_subcommand("list-scenarios", "list presets and their expected features");
  list_cmd->add_option("--out", flags.out, "output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    return report_error(err, "config_parse", e.what(), config_parse);
  }

  try {
    if (list_cmd->parsed()) return cmd_list(resolve(flags, false), out);
    const RunConfig cfg = resolve(flags, true);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, out);
    if (check_cmd->parsed()) return cmd_check(cfg, !flags.skip_time_domain, out);
    if (features_cmd->parsed()) return cmd_features(cfg, out);
    if (roots_cmd->parsed()) return cmd_roots(cfg, flags.root_case, out);
    if (phase_cmd->parsed()) return cmd_phase_study(cfg, out);
  } catch (const ParseError& e) {
    return report_error(err, "config_parse", e.what(), config_parse);
  } catch (const ValidationError& e) {
    return report_error(err, "validation", e.what(), validation);
  } catch (const NumericalError& e) {
    return report_error(err, "numerical", e.what(), numerical);
  } catch (const std::exception& e) {
    return report_error(err, "io", e.what(), numerical);
  }
  return report_error(err, "config_parse", "no subcommand", config_parse);
}

}  // namespace omit::cli
