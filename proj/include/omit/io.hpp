#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "omit/analysis.hpp"
#include "omit/model.hpp"

namespace omit {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kCsvHeader = "delta,re_eps_out,im_eps_out,re_tp,im_tp,abs_tp2";

/// Writes one row per grid point, ordered by delta. Profiles with skipped
/// points get an extra `pole` column (1 for skipped rows). Values use 17
/// significant digits. Throws ValidationError for an empty profile.
void write_profile_csv(const Profile& profile, std::ostream& out);

/// As write_profile_csv, to a file. Throws Error on I/O failure.
void emit_profile_csv(const Profile& profile, const std::filesystem::path& path);

struct CsvRow {
  double delta = 0.0;
  double re_eps_out = 0.0;
  double im_eps_out = 0.0;
  double re_tp = 0.0;
  double im_tp = 0.0;
  double abs_tp2 = 0.0;
  bool pole = false;
};

std::vector<CsvRow> read_profile_csv(std::istream& in);

Json params_to_json(const SystemParams& p);
/// Keys missing from `j` keep the value in `base`; unknown keys are rejected.
SystemParams params_from_json(const Json& j, SystemParams base = {});

Json grid_to_json(const Grid& g);
Json features_to_json(const std::vector<SpectralFeature>& features);
Json roots_to_json(const RootReport& report);
Json scenarios_to_json();

/// Parses a phase list such as "0,pi/2,pi" or "0,1.5708".
std::vector<double> parse_phases(std::string_view text);

}  // namespace omit
