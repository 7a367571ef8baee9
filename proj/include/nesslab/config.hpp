#pragma once

#include <optional>

#include "nesslab/model.hpp"

namespace nesslab::config {

/// One batch run: a model, the experiment to dispatch, and its sweep lists.
struct ExperimentConfig {
  model::ModelSpec model;
  std::string experiment;  // check-adiabatic | model-spectrum | pt-compare |
                           // theta-scan | relaxation | ness-track
  std::vector<double> tau_list{50.0, 158.0, 500.0, 1581.0, 5000.0};
  std::vector<double> g_list{0.02, 0.035, 0.05, 0.07, 0.1};
  std::vector<double> theta_im_list{-0.2, -0.25, -0.3};
  std::string observable = "sigma3";
  double relax_t_max = 0;  // 0: choose from the predicted rate
  double relax_dt = 0.37;
  std::string out_dir = "out";
  // synthetic-family controls for check-adiabatic
  double family_k_scale = 0.012;
  double family_nil_scale = 0.1;

  /// Canonical string of every field, used for the config-hash footer.
  std::string canonical() const;
  std::uint64_t hash() const;
};

/// Parse and validate a JSON config file. Throws ConfigError on malformed
/// input; nothing is written before parsing succeeds.
ExperimentConfig load(const std::string& path);
ExperimentConfig parse(const std::string& json_text);

Matrix observable_by_name(const std::string& name);

}  // namespace nesslab::config
