#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "saxe/config.hpp"

namespace saxe {

/// A stage that failed. `input_error` separates bad or missing inputs
/// (exit code 2) from internal failures (exit code 1).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message, bool input_error)
      : std::runtime_error("stage " + stage + ": " + message),
        stage_(std::move(stage)),
        input_error_(input_error) {}
  const std::string& stage() const { return stage_; }
  bool input_error() const { return input_error_; }

 private:
  std::string stage_;
  bool input_error_;
};

struct StageRecord {
  std::string name;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;   // label -> digest
  std::map<std::string, std::string> outputs;  // file name -> digest
  std::vector<std::string> warnings;
};

/// Stage names in pipeline order.
const std::vector<std::string>& stage_names();

/// True when the config names every input the stage needs that no earlier
/// stage produces.
bool stage_configured(const std::string& stage, const RunConfig& config);

/// Runs one stage. Outputs are written as `<name>.partial` under
/// `config.out` and renamed once the stage succeeds; a failed stage leaves
/// its partial files behind and throws StageError. The stage's record is
/// merged into `<out>/manifest.json`.
StageRecord run_stage(const std::string& stage, const RunConfig& config);

/// Runs `stage`, first running any earlier stage whose output it reads and
/// that has not yet written it under `config.out`.
std::vector<StageRecord> run_with_prerequisites(const std::string& stage, const RunConfig& config);

/// Runs every configured stage in order; returns their records.
std::vector<StageRecord> run_pipeline(const RunConfig& config);

/// Hex FNV-1a digest of the canonical config.
std::string config_hash(const RunConfig& config);

}  // namespace saxe
