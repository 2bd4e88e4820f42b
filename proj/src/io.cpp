#include "omit/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "omit/errors.hpp"

namespace omit {

namespace {

struct ParamField {
  const char* key;
  double SystemParams::*member;
};

constexpr ParamField kParamFields[] = {
    {"omega_m", &SystemParams::omega_m},   {"omega_m_eff", &SystemParams::omega_m_eff},
    {"kappa", &SystemParams::kappa},       {"gamma_m", &SystemParams::gamma_m},
    {"gamma_1", &SystemParams::gamma_1},   {"gamma_2", &SystemParams::gamma_2},
    {"Omega", &SystemParams::rabi},        {"Delta_o", &SystemParams::delta_o},
    {"Delta_a", &SystemParams::delta_a},   {"Delta_b", &SystemParams::delta_b},
    {"G1", &SystemParams::g1},             {"G2", &SystemParams::g2},
    {"Ga", &SystemParams::ga},             {"eps_l", &SystemParams::eps_l},
    {"eps_p", &SystemParams::eps_p},       {"eps_m", &SystemParams::eps_m},
    {"Phi_m", &SystemParams::phi_m},       {"n_th", &SystemParams::n_th},
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

double parse_field(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ParseError("malformed CSV number '" + s + "'");
  return v;
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

void write_profile_csv(const Profile& profile, std::ostream& out) {
  if (profile.deltas.empty() || profile.responses.empty()) {
    throw ValidationError("refusing to write an empty profile");
  }
  const bool poles = !profile.skipped.empty();
  out << kCsvHeader << (poles ? ",pole" : "") << '\n';
  std::size_t r = 0;
  for (const double d : profile.deltas) {
    if (r < profile.responses.size() && profile.responses[r].delta == d) {
      const ProbeResponse& resp = profile.responses[r++];
      out << num(d) << ',' << num(resp.eps_out.real()) << ',' << num(resp.eps_out.imag()) << ','
          << num(resp.t_p.real()) << ',' << num(resp.t_p.imag()) << ',' << num(std::norm(resp.t_p));
      if (poles) out << ",0";
    } else {
      out << num(d) << ",nan,nan,nan,nan,nan,1";
    }
    out << '\n';
  }
}

void emit_profile_csv(const Profile& profile, const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_profile_csv(profile, buffer);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open '" + path.string() + "' for writing");
  file << buffer.str();
  if (!file) throw Error("failed writing '" + path.string() + "'");
}

std::vector<CsvRow> read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  const bool poles = line == std::string(kCsvHeader) + ",pole";
  if (!poles && line != kCsvHeader) throw ParseError("unexpected CSV header '" + line + "'");

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != (poles ? 7u : 6u)) throw ParseError("malformed CSV row '" + line + "'");
    CsvRow row;
    row.delta = parse_field(cells[0]);
    row.re_eps_out = parse_field(cells[1]);
    row.im_eps_out = parse_field(cells[2]);
    row.re_tp = parse_field(cells[3]);
    row.im_tp = parse_field(cells[4]);
    row.abs_tp2 = parse_field(cells[5]);
    row.pole = poles && cells[6] == "1";
    rows.push_back(row);
  }
  return rows;
}

Json params_to_json(const SystemParams& p) {
  Json j = Json::object();
  for (const auto& f : kParamFields) j[f.key] = p.*(f.member);
  return j;
}

SystemParams params_from_json(const Json& j, SystemParams base) {
  if (!j.is_object()) throw ParseError("params must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& f : kParamFields) {
      if (key != f.key) continue;
      if (!value.is_number()) throw ParseError("param '" + key + "' must be a number");
      base.*(f.member) = value.get<double>();
      known = true;
    }
    if (!known) throw ParseError("unknown param '" + key + "'");
  }
  return base;
}

Json grid_to_json(const Grid& g) { return Json{{"min", g.min}, {"max", g.max}, {"count", g.count}}; }

Json features_to_json(const std::vector<SpectralFeature>& features) {
  Json arr = Json::array();
  for (const auto& f : features) {
    arr.push_back(Json{{"kind", std::string(to_string(f.kind))},
                       {"location", f.location},
                       {"value", f.value},
                       {"prominence", f.prominence}});
  }
  return arr;
}

Json roots_to_json(const RootReport& report) {
  Json j;
  j["case"] = std::string(to_string(report.root_case));
  j["degree"] = report.coefficients.size() - 1;
  Json coeffs = Json::array();
  for (const cplx& c : report.coefficients) coeffs.push_back(complex_json(c));
  j["coefficients"] = coeffs;
  Json roots = Json::array();
  for (std::size_t i = 0; i < report.roots.size(); ++i) {
    const cplx r = report.roots[i];
    roots.push_back(Json{{"re", r.real()},
                         {"im", r.imag()},
                         {"residual", report.residuals[i]},
                         {"resonant", std::abs(r.imag()) <= report.resonance_threshold}});
  }
  j["roots"] = roots;
  j["resonance_threshold"] = report.resonance_threshold;
  j["resonant_count"] = report.resonant.size();
  if (report.warning) j["warning"] = *report.warning;
  return j;
}

Json scenarios_to_json() {
  Json arr = Json::array();
  for (const auto& preset : all_scenarios()) {
    Json expected = Json::array();
    for (const auto& e : preset.expected_features) {
      expected.push_back(Json{{"kind", std::string(to_string(e.kind))}, {"location", e.location}});
    }
    arr.push_back(Json{{"name", preset.name},
                       {"description", preset.description},
                       {"expected_features", expected},
                       {"params", params_to_json(preset.params)}});
  }
  return arr;
}

std::vector<double> parse_phases(std::string_view text) {
  auto number = [&](std::string_view s) -> double {
    const std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (str.empty() || used != str.size()) throw ParseError("cannot parse phase '" + std::string(text) + "'");
    return v;
  };

  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string_view tok = text.substr(start, comma - start);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    const std::size_t pi = tok.find("pi");
    if (pi == std::string_view::npos) {
      out.push_back(number(tok));
    } else {
      std::string_view head = tok.substr(0, pi);
      std::string_view tail = tok.substr(pi + 2);
      if (!head.empty() && head.back() == '*') head.remove_suffix(1);
      double value = std::numbers::pi * (head.empty() ? 1.0 : number(head));
      if (!tail.empty()) {
        if (tail.front() != '/') throw ParseError("cannot parse phase '" + std::string(tok) + "'");
        value /= number(tail.substr(1));
      }
      out.push_back(value);
    }
    start = comma + 1;
  }
  return out;
}

}  // namespace omit
