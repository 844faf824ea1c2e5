#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "kbilip/sampling.hpp"
#include "kbilip/tolerance.hpp"

namespace kbilip::cli {

enum ExitCode : int { kOk = 0, kNegative = 1, kUnknown = 2, kInputError = 3 };

// Flag values; unset fields fall back to the command's config source.
struct Overrides {
  std::optional<double> r0, rho;
  std::optional<int> radii, dirs;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps_zero_base, ratio_floor, check_tol, boundary_margin, lipschitz_cap,
      partial_growth;
  std::optional<std::string> catalog;

  SampleScheme apply(SampleScheme s) const;
  ToleranceConfig apply(ToleranceConfig t) const;
};

struct Result {
  int exit_code = kOk;
  nlohmann::json report;
  // One line for a human reader; the report carries the details.
  std::string summary;
};

Result check_contact(const std::string& f_path, const std::string& g_path, int fi, int gi,
                     const Overrides& o);
Result equiv(const std::string& f_path, const std::string& g_path, const Overrides& o);
Result probe(const std::string& config_path, const Overrides& o);
Result verify(const std::string& f_path, const std::string& g_path,
              const std::string& descriptor_path, const Overrides& o);

// Fields excluded when comparing reports for determinism.
inline constexpr const char* kTimestampFields[] = {"timestamp", "wall_time_s"};

// Copy of a report with the manifest's timestamp fields removed.
nlohmann::json strip_timestamps(nlohmann::json report);

const char* version();

}  // namespace kbilip::cli
