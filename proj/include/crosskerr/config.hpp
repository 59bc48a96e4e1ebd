#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crosskerr/models.hpp"

namespace crosskerr {

/// Thrown on malformed or incomplete run configurations; the message names
/// the offending section/key. Maps to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a sweep exceeds its flagged-point budget. Maps to exit code 3.
struct FlaggedPointsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sectioned key=value document. Keys carry explicit unit suffixes; '#'
/// starts a comment.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::filesystem::path& path);
  static ConfigFile parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section,
                         const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  /// Accepts plain numbers and pi expressions ("pi", "pi/2", "2pi", "-pi/4").
  double get_angle_rad(const std::string& section, const std::string& key) const;
  long get_int(const std::string& section, const std::string& key) const;
  long get_int_or(const std::string& section, const std::string& key,
                  long fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);
  /// "section.key=value", or "key=value" when the key is unique.
  void apply_override(const std::string& assignment);

  std::string serialize() const;

 private:
  const std::string* find(const std::string& section,
                          const std::string& key) const;
  // section -> ordered key/value pairs
  std::vector<std::pair<std::string,
                        std::vector<std::pair<std::string, std::string>>>>
      sections_;
};

/// Device block: a named preset plus optional per-key overrides.
DeviceParams device_from_config(const ConfigFile& config);

/// Parses "pi"-style angles ("pi", "pi/2", "2pi", "0.5pi", numbers).
double parse_angle(const std::string& text);

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
  std::string summary_json;
};

/// Executes the configured experiment and writes its data products into
/// `out_dir` (CSV grids, summary.json, resolved.cfg). Exit codes: 0 success,
/// 1 config error, 2 numerical failure, 3 flagged-point budget exceeded.
RunResult run_experiment(const ConfigFile& config,
                         const std::filesystem::path& out_dir, int workers);

/// Worker count resolution: explicit argument, else CROSSKERR_WORKERS, else 1.
int resolve_workers(int cli_value);

}  // namespace crosskerr
