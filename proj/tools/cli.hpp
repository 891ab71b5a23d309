#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace labelvec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConsistency = 3;
inline constexpr int kExitNumeric = 4;

/// Environment variable naming the default data directory.
inline constexpr const char* kDataDirEnv = "LABELVEC_DATA_DIR";

/// Runs one `labelvec` invocation; `args` excludes the program name.
/// Library errors are reported on `err` and mapped to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Effective classify configuration: the config file (paths relative to
/// its directory) with flag overrides applied (paths relative to the
/// working directory).
struct RunConfig {
  nlohmann::json config;
  std::filesystem::path output;
  std::size_t jobs = 1;

  /// Fingerprint of `config`; output path and job count are not part of it.
  std::string fingerprint() const;
};

int cmd_classify(const RunConfig& run, std::ostream& out);

}  // namespace labelvec::cli
