#include "nesslab/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nesslab/csvio.hpp"

namespace nesslab::config {

using nlohmann::json;

namespace {

std::vector<double> as_list(const json& j, const char* key) {
  std::vector<double> out;
  for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  if (out.empty()) throw ConfigError(std::string(key) + " must be non-empty");
  return out;
}

}  // namespace

ExperimentConfig parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.model = model::ModelSpec::defaults();
    auto& m = cfg.model;
    if (j.contains("omega0")) m.small.omega0 = j["omega0"].get<double>();
    if (j.contains("g")) m.g = j["g"].get<double>();
    if (j.contains("theta_im")) m.theta_im = j["theta_im"].get<double>();
    if (j.contains("delta")) m.delta = j["delta"].get<double>();
    if (j.contains("nu")) m.nu = j["nu"].get<double>();
    if (j.contains("ode_tol")) m.ode_tol = j["ode_tol"].get<double>();
    if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("s_samples")) m.s_samples = j["s_samples"].get<int>();
    if (j.contains("contour")) {
      if (j["contour"].contains("nodes"))
        m.contour_nodes = j["contour"]["nodes"].get<int>();
    }
    model::Schedule default_schedule;
    if (j.contains("schedule"))
      default_schedule = model::Schedule::parse(j["schedule"].get<std::string>());
    if (j.contains("reservoirs")) {
      m.reservoirs.clear();
      for (const auto& r : j["reservoirs"]) {
        model::ReservoirSpec rs;
        rs.beta = r.at("beta").get<double>();
        if (r.contains("modes")) rs.modes = r["modes"].get<int>();
        if (r.contains("u_max")) rs.u_max = r["u_max"].get<double>();
        rs.schedule = r.contains("schedule")
                          ? model::Schedule::parse(r["schedule"].get<std::string>())
                          : default_schedule;
        m.reservoirs.push_back(rs);
      }
    } else if (j.contains("schedule")) {
      for (auto& r : m.reservoirs) r.schedule = default_schedule;
    }

    cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("tau_list")) cfg.tau_list = as_list(j, "tau_list");
    if (j.contains("g_list")) cfg.g_list = as_list(j, "g_list");
    if (j.contains("theta_list")) cfg.theta_im_list = as_list(j, "theta_list");
    if (j.contains("observable")) cfg.observable = j["observable"].get<std::string>();
    if (j.contains("t_max")) cfg.relax_t_max = j["t_max"].get<double>();
    if (j.contains("dt")) cfg.relax_dt = j["dt"].get<double>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("family_k_scale"))
      cfg.family_k_scale = j["family_k_scale"].get<double>();
    if (j.contains("family_nil_scale"))
      cfg.family_nil_scale = j["family_nil_scale"].get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config schema error: ") + e.what());
  }

  static const char* known[] = {"check-adiabatic", "model-spectrum", "pt-compare",
                                "theta-scan",      "relaxation",     "ness-track"};
  bool ok = false;
  for (const char* k : known) ok = ok || cfg.experiment == k;
  if (!ok) throw ConfigError("unknown experiment '" + cfg.experiment + "'");

  cfg.model.validate();
  observable_by_name(cfg.observable);
  return cfg;
}

ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  auto d = [&](double v) { return csv::format_double(v); };
  os << "experiment=" << experiment << ";omega0=" << d(model.small.omega0)
     << ";g=" << d(model.g) << ";theta_im=" << d(model.theta_im)
     << ";delta=" << d(model.delta) << ";nu=" << d(model.nu)
     << ";nodes=" << model.contour_nodes << ";ode_tol=" << d(model.ode_tol)
     << ";seed=" << model.seed << ";s_samples=" << model.s_samples << ";reservoirs=";
  for (const auto& r : model.reservoirs)
    os << "(" << d(r.beta) << "," << r.modes << "," << d(r.u_max) << ","
       << r.schedule.name() << ")";
  os << ";tau=";
  for (double t : tau_list) os << d(t) << ",";
  os << ";gl=";
  for (double g : g_list) os << d(g) << ",";
  os << ";th=";
  for (double t : theta_im_list) os << d(t) << ",";
  os << ";obs=" << observable << ";t_max=" << d(relax_t_max) << ";dt=" << d(relax_dt)
     << ";k_scale=" << d(family_k_scale) << ";nil=" << d(family_nil_scale);
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const { return csv::fnv1a(canonical()); }

Matrix observable_by_name(const std::string& name) {
  using model::ModelOperators;
  if (name == "identity") return ModelOperators::pauli(0);
  if (name == "sigma1") return ModelOperators::pauli(1);
  if (name == "sigma2") return ModelOperators::pauli(2);
  if (name == "sigma3") return ModelOperators::pauli(3);
  if (name == "pop_up")
    return Matrix(0.5 * (ModelOperators::pauli(0) + ModelOperators::pauli(3)));
  throw ConfigError("unknown observable '" + name + "'");
}

}  // namespace nesslab::config
