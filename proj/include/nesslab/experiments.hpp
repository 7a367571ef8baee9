#pragma once

#include "nesslab/config.hpp"

namespace nesslab::experiments {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0;
  std::string detail;
};

struct Summary {
  std::string experiment;
  std::string config_hash;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;

  bool all_pass() const;
  const Check* find(const std::string& name) const;
};

/// Dispatch on cfg.experiment, write every artifact under cfg.out_dir, and
/// return the machine-readable summary (also written as summary.json).
Summary run(const config::ExperimentConfig& cfg);

Summary run_check_adiabatic(const config::ExperimentConfig& cfg);
Summary run_model_spectrum(const config::ExperimentConfig& cfg);
Summary run_pt_compare(const config::ExperimentConfig& cfg);
Summary run_theta_scan(const config::ExperimentConfig& cfg);
Summary run_relaxation(const config::ExperimentConfig& cfg);
Summary run_ness_track(const config::ExperimentConfig& cfg);

}  // namespace nesslab::experiments
