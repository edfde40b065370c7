#pragma once

// Strict JSON config parsing for the bsf tool. Unknown keys and wrong types are config errors.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "bsf/experiments.hpp"
#include "bsf/oracle_lab.hpp"
#include "bsf/posterior.hpp"
#include "bsf/sampler.hpp"
#include "json.hpp"

namespace bsf::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Object view that records which keys were read; finish() rejects the rest.
class StrictObject {
 public:
  StrictObject(const nlohmann::json& j, std::string where);

  bool has(const std::string& key) const;
  const nlohmann::json& at(const std::string& key);
  StrictObject object(const std::string& key);

  template <class T>
  T get(const std::string& key) {
    try {
      return at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where_ + "." + key + " has the wrong type");
    }
  }
  template <class T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  void finish() const;
  const std::string& where() const { return where_; }

 private:
  const nlohmann::json* j_;
  std::string where_;
  std::vector<std::string> seen_;
};

nlohmann::json load_json(const std::filesystem::path& path);

struct DataSource {
  std::filesystem::path path;
  PayloadKind kind = PayloadKind::euclidean;
};

/// Common shape of the exact and mcmc configs.
struct ModelRunConfig {
  DataSource data;
  BsfConfig model;
  std::optional<int> max_k;
  std::optional<Partition> truth;
  ChainSchedule chain;
  std::uint64_t seed = 0;
};

struct OracleConfig {
  bool spd = false;
  GaussianOracleSpec gaussian;
  ObjectOracleSpec object;
};

struct ExperimentConfig {
  OracleConfig oracle;
  ScheduleSpec schedule;
  std::optional<Phi> phi;
  /// spd oracles only
  double sigma = 1.0;
  double log_zeta = 0.0;
  double log_delta_lambda = 0.0;
  std::vector<int> n_grid;
  int replicates = 1;
  std::uint64_t seed = 0;
  ExperimentMode mode = ExperimentMode::exact;
  ChainSchedule chain;
};

struct MisclassConfig {
  MisclassPlan plan;
};

struct GenDataConfig {
  OracleConfig oracle;
  int n = 0;
  std::uint64_t seed = 0;
};

struct VerifyConfig {
  int trials = 1000;
  std::uint64_t seed = 0;
};

ExperimentMode parse_mode(const std::string& s);
KernelSpec parse_kernel(StrictObject o);
BsfConfig parse_model(StrictObject o);
ChainSchedule parse_chain(StrictObject o);
Phi parse_phi(StrictObject o);
ScheduleSpec parse_schedule(StrictObject o);
OracleConfig parse_oracle(StrictObject o);

/// Relative data paths resolve against `base_dir`.
ModelRunConfig parse_model_run(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig parse_experiment(const nlohmann::json& j);
MisclassConfig parse_misclass(const nlohmann::json& j);
GenDataConfig parse_gen_data(const nlohmann::json& j);
VerifyConfig parse_verify(const nlohmann::json& j);

}  // namespace bsf::cli
