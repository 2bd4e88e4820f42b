#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "omit/cli.hpp"
#include "omit/errors.hpp"
#include "omit/io.hpp"
#include "support.hpp"

using namespace omit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "omit_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("profile CSV layout and round trip") {
  const SystemParams p = scenario("fig2").params;
  const Profile prof = sweep(p, steady_state(p), Grid{}, Method::linear_solve);
  std::ostringstream os;
  write_profile_csv(prof, os);
  const std::string text = os.str();
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 802);

  std::istringstream is(text);
  const auto rows = read_profile_csv(is);
  REQUIRE(rows.size() == prof.responses.size());
  std::size_t argmax = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const ProbeResponse& r = prof.responses[k];
    CHECK(rows[k].delta == r.delta);
    CHECK(rows[k].re_eps_out == r.eps_out.real());
    CHECK(rows[k].im_eps_out == r.eps_out.imag());
    CHECK(rows[k].re_tp == r.t_p.real());
    CHECK(rows[k].im_tp == r.t_p.imag());
    CHECK(rows[k].abs_tp2 == std::norm(r.t_p));
    if (k > 0) CHECK(rows[k].delta > rows[k - 1].delta);
    if (rows[k].re_eps_out > rows[argmax].re_eps_out) argmax = k;
  }
  CHECK(rows[argmax].delta == doctest::Approx(1.0));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k != argmax) CHECK(rows[k].re_eps_out < rows[argmax].re_eps_out);
  }

  std::ostringstream empty;
  CHECK_THROWS_AS(write_profile_csv(Profile{}, empty), ValidationError);
}

TEST_CASE("pole rows are marked") {
  SystemParams p = scenario("fig3").params;
  p.gamma_1 = p.gamma_2 = p.rabi = 0.0;
  const Profile prof = sweep(p, steady_state(p), Grid{0.0, 2.0, 201}, Method::closed_form);
  std::ostringstream os;
  write_profile_csv(prof, os);
  CHECK(os.str().rfind(std::string(kCsvHeader) + ",pole\n", 0) == 0);
  std::istringstream is(os.str());
  const auto rows = read_profile_csv(is);
  CHECK(rows.size() == 201);
  CHECK(std::count_if(rows.begin(), rows.end(), [](const CsvRow& r) { return r.pole; }) == 1);
}

TEST_CASE("params JSON") {
  const SystemParams p = scenario("fig7_phi_pi2").params;
  CHECK(params_from_json(params_to_json(p)) == p);
  CHECK(params_from_json(Json{{"kappa", 0.3}}, p).kappa == 0.3);
  CHECK_THROWS_AS(params_from_json(Json{{"kapa", 0.3}}), ParseError);
  CHECK_THROWS_AS(params_from_json(Json{{"kappa", "0.3"}}), ParseError);
}

TEST_CASE("phase lists") {
  const auto ph = parse_phases("0, pi/2,pi,2*pi/3,1.25");
  REQUIRE(ph.size() == 5);
  CHECK(ph[0] == 0.0);
  CHECK(ph[1] == doctest::Approx(std::numbers::pi / 2.0));
  CHECK(ph[2] == doctest::Approx(std::numbers::pi));
  CHECK(ph[3] == doctest::Approx(2.0 * std::numbers::pi / 3.0));
  CHECK(ph[4] == 1.25);
  CHECK_THROWS_AS(parse_phases("0,banana"), ParseError);
}

TEST_CASE("config documents") {
  const cli::RunConfig c = cli::parse_config(Json::parse(R"({"scenario":"fig4","grid":"0:2:11","method":"both",
      "outputs":["features_json",{"kind":"roots_json","path":"r.json"}],"phases":[0,"pi"],"prominence":0.05})"));
  CHECK(c.scenario == "fig4");
  CHECK(c.grid.count == 11);
  CHECK(c.methods().size() == 2);
  REQUIRE(c.outputs.size() == 2);
  CHECK(c.outputs[1].path == "r.json");
  CHECK(c.phases.at(1) == doctest::Approx(std::numbers::pi));
  CHECK(c.prominence == 0.05);

  const cli::RunConfig inline_cfg = cli::parse_config(Json::parse(R"({"params":{"kappa":0.2,"gamma_m":0.01}})"));
  CHECK(inline_cfg.resolved_params().kappa == 0.2);
  CHECK(inline_cfg.scenario_label() == "inline");

  CHECK_THROWS_AS(cli::parse_config(Json::parse(R"({"scenario":"fig2","params":{}})")), ValidationError);
  CHECK_THROWS_AS(cli::parse_config(Json::parse(R"({})")), ValidationError);
  CHECK_THROWS_AS(cli::parse_config(Json::parse(R"({"scenario":2})")), ParseError);
  CHECK_THROWS_AS(cli::parse_config(Json::parse(R"({"scenario":"fig2","colour":1})")), ParseError);
  CHECK_THROWS_AS(cli::parse_config(Json::parse(R"({"scenario":"fig2","outputs":["plot_png"]})")), ParseError);
  CHECK_THROWS_AS(cli::parse_config(Json::parse(R"({"scenario":"fig2","outputs":[{"kind":"roots_json","path":""}]})")),
                  ValidationError);
  CHECK_THROWS_AS(cli::parse_config(Json::parse(R"({"scenario":"fig2","method":"exact"})")), ParseError);
}

TEST_CASE("sweep command") {
  const fs::path dir = scratch("sweep");
  const Run r = run_cli({"sweep", "--scenario", "fig2", "--out", (dir / "profile.csv").string()});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  const std::string csv = slurp(dir / "profile.csv");
  CHECK(csv.rfind("delta,re_eps_out,im_eps_out,re_tp,im_tp,abs_tp2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 802);

  const Run again = run_cli({"sweep", "--scenario", "fig2"});
  CHECK(again.out == csv);

  CHECK(run_cli({"sweep", "--scenario", "fig4", "--grid", "0:4:41", "--method", "both", "--out-dir", dir.string()})
            .code == 0);
  CHECK(fs::exists(dir / "profile_closed.csv"));
  CHECK(fs::exists(dir / "profile_solve.csv"));
  CHECK(run_cli({"sweep", "--scenario", "fig4", "--method", "both"}).code == 3);
}

TEST_CASE("report commands emit versioned JSON") {
  const Run check = run_cli({"check", "--scenario", "fig6", "--grid", "0:4:21"});
  REQUIRE(check.code == 0);
  const Json c = Json::parse(check.out);
  CHECK(c["schema_version"] == "1");
  CHECK(c["closed_form_vs_linear_solve"]["max_relative_deviation"].get<double>() > 0.0);
  CHECK(c["eliminated_vs_linear_solve"]["max_relative_deviation"].get<double>() < 1e-9);
  CHECK(c["time_domain_vs_linear_solve"]["max_relative_deviation"].get<double>() < 1e-3);
  CHECK_FALSE(c.contains("closed_form_vs_half_phonon_drive"));

  const Json c7 = Json::parse(run_cli({"check", "--scenario", "fig7", "--grid", "0:4:11", "--skip-time-domain"}).out);
  CHECK(c7.contains("closed_form_vs_half_phonon_drive"));
  CHECK(c7["closed_form_vs_linear_solve"].contains("ratio_abs"));
  CHECK_FALSE(c7.contains("time_domain_vs_linear_solve"));

  const Json f = Json::parse(run_cli({"features", "--scenario", "fig5"}).out);
  CHECK(f["schema_version"] == "1");
  CHECK(f["expected_features"].size() == 2);
  CHECK(f["results"][0]["dip_count"] == 2);

  const Json roots = Json::parse(run_cli({"roots", "--scenario", "fig2"}).out);
  CHECK(roots["case"] == "eq13");
  CHECK(roots["roots"][0]["re"].get<double>() == doctest::Approx(1.0));
  CHECK(roots["roots"][0]["im"].get<double>() == doctest::Approx(-0.1));
  CHECK(run_cli({"roots", "--scenario", "fig6"}).code == 3);

  const Json list = Json::parse(run_cli({"list-scenarios"}).out);
  std::vector<std::string> names;
  for (const auto& s : list["scenarios"]) names.push_back(s["name"]);
  CHECK(names == scenario_names());
}

TEST_CASE("phase study command") {
  const fs::path dir = scratch("phase");
  const Run r = run_cli({"phase-study", "--scenario", "fig7", "--phases", "0,pi/2,pi", "--grid", "1.9:2.1:201",
                         "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(slurp(dir / "phase_study.json"));
  CHECK(j["phases"].size() == 3);
  CHECK_FALSE(j["quadratic_track"].is_null());
  for (int k = 0; k < 3; ++k) CHECK(fs::exists(dir / ("profile_phase_" + std::to_string(k) + ".csv")));
}

TEST_CASE("config file with flag overrides and requested outputs") {
  const fs::path dir = scratch("config");
  write(dir / "run.json", R"({"scenario":"fig3","grid":"0:4:81","outputs":["features_json","roots_json"],"out_dir":")" +
                              dir.string() + R"("})");
  const Run r = run_cli({"sweep", "--config", (dir / "run.json").string(), "--scenario", "fig2", "--grid", "0:2:5"});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 0);
  const std::string csv = slurp(dir / "profile.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  const Json f = Json::parse(slurp(dir / "features.json"));
  CHECK(f["scenario"] == "fig2");
  CHECK(Json::parse(slurp(dir / "roots.json"))["case"] == "eq13");
}

TEST_CASE("exit codes and error records") {
  const fs::path dir = scratch("errors");

  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"sweep", "--help"}).code == 0);

  const Run bad_flag = run_cli({"sweep", "--scenario", "fig2", "--colour", "red"});
  CHECK(bad_flag.code == 2);
  const Json e = Json::parse(bad_flag.err);
  CHECK(e["schema_version"] == "1");
  CHECK(e["error"]["kind"] == "config_parse");
  CHECK(e["error"]["exit_code"] == 2);

  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"sweep", "--scenario", "fig2", "--grid", "0:4"}).code == 2);
  CHECK(run_cli({"sweep", "--scenario", "fig2", "--method", "exact"}).code == 2);
  write(dir / "broken.json", "{\"scenario\": ");
  CHECK(run_cli({"sweep", "--config", (dir / "broken.json").string()}).code == 2);
  CHECK(run_cli({"sweep", "--config", (dir / "missing.json").string()}).code == 2);

  const Run unknown = run_cli({"sweep", "--scenario", "fig9"});
  CHECK(unknown.code == 3);
  CHECK(Json::parse(unknown.err)["error"]["kind"] == "validation");
  CHECK(run_cli({"sweep", "--scenario", "fig2", "--grid", "0:4:1"}).code == 3);
  CHECK(run_cli({"sweep"}).code == 3);
  write(dir / "neg.json", R"({"params":{"kappa":-1,"gamma_m":0.1}})");
  CHECK(run_cli({"sweep", "--config", (dir / "neg.json").string()}).code == 3);

  // Lossless, undetuned atoms without a control field: the atomic pair is singular.
  write(dir / "degenerate.json",
        R"({"params":{"kappa":0.1,"gamma_m":0.01,"Ga":0.5,"eps_l":0.1,"gamma_1":0,"gamma_2":0,"Delta_a":0,"Delta_b":0,"Omega":0}})");
  const Run num = run_cli({"sweep", "--config", (dir / "degenerate.json").string()});
  CHECK(num.code == 4);
  CHECK(Json::parse(num.err)["error"]["kind"] == "numerical");

  write(dir / "blocker", "x");
  CHECK(run_cli({"sweep", "--scenario", "fig2", "--out", (dir / "blocker" / "p.csv").string()}).code == 4);
}
