#include "config.hpp"

#include <algorithm>
#include <fstream>

namespace bsf::cli {

StrictObject::StrictObject(const nlohmann::json& j, std::string where) : j_(&j), where_(std::move(where)) {
  if (!j.is_object()) throw ConfigError(where_ + " must be a JSON object");
}

bool StrictObject::has(const std::string& key) const { return j_->contains(key); }

const nlohmann::json& StrictObject::at(const std::string& key) {
  if (!has(key)) throw ConfigError("missing key " + where_ + "." + key);
  if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) seen_.push_back(key);
  return (*j_)[key];
}

StrictObject StrictObject::object(const std::string& key) { return StrictObject(at(key), where_ + "." + key); }

void StrictObject::finish() const {
  for (const auto& item : j_->items()) {
    if (std::find(seen_.begin(), seen_.end(), item.key()) == seen_.end()) {
      throw ConfigError("unknown key " + where_ + "." + item.key());
    }
  }
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return nlohmann::json::parse(in, nullptr, true, false);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

namespace {

Eigen::VectorXd to_vector(const nlohmann::json& j, const std::string& where) {
  try {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + " must be an array of numbers");
  }
}

Eigen::MatrixXd to_matrix(const nlohmann::json& j, const std::string& where) {
  std::vector<std::vector<double>> rows;
  try {
    rows = j.get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + " must be an array of numeric rows");
  }
  if (rows.empty()) throw ConfigError(where + " is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError(where + " has ragged rows");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

std::vector<Eigen::MatrixXd> to_matrices(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of matrices");
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_matrix(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

PayloadKind parse_kind(const std::string& s) {
  if (s == "euclidean") return PayloadKind::euclidean;
  if (s == "spd") return PayloadKind::spd;
  if (s == "laplacian") return PayloadKind::graph_laplacian;
  throw ConfigError("unknown data kind '" + s + "' (euclidean, spd, laplacian)");
}

}  // namespace

ExperimentMode parse_mode(const std::string& s) {
  if (s == "exact") return ExperimentMode::exact;
  if (s == "mcmc") return ExperimentMode::mcmc;
  throw ConfigError("mode must be exact or mcmc, got '" + s + "'");
}

KernelSpec parse_kernel(StrictObject o) {
  const auto family = o.get_or<std::string>("family", "euclidean");
  const double sigma = o.get_or("sigma", 1.0);
  const double log_zeta = o.get_or("log_zeta", 0.0);
  KernelSpec k;
  if (family == "euclidean") {
    k = KernelSpec::euclidean(sigma);
  } else if (family == "spd") {
    k = KernelSpec::spd(sigma, log_zeta);
  } else if (family == "graph") {
    const auto metric = o.get_or<std::string>("metric", "riemannian");
    if (metric != "riemannian" && metric != "frobenius") throw ConfigError("metric must be riemannian or frobenius");
    k = KernelSpec::graph(sigma, o.get_or("eta", 0.1),
                          metric == "riemannian" ? GraphMetric::riemannian : GraphMetric::frobenius, log_zeta);
  } else {
    throw ConfigError("unknown kernel family '" + family + "' (euclidean, spd, graph)");
  }
  o.finish();
  return k;
}

BsfConfig parse_model(StrictObject o) {
  BsfConfig cfg;
  cfg.log_delta = o.get_or("log_delta", 0.0);
  cfg.log_lambda = o.get_or("log_lambda", 0.0);
  if (o.has("kernel")) cfg.kernel = parse_kernel(o.object("kernel"));
  cfg.enum_cap = o.get_or("enum_cap", cfg.enum_cap);
  cfg.log_root = o.get_or("log_root", std::vector<double>{});
  o.finish();
  return cfg;
}

ChainSchedule parse_chain(StrictObject o) {
  ChainSchedule s;
  s.iters = o.get_or("iters", s.iters);
  s.burnin = o.get_or("burnin", s.burnin);
  s.thin = o.get_or("thin", s.thin);
  s.audit_every = o.get_or("audit_every", s.audit_every);
  o.finish();
  return s;
}

Phi parse_phi(StrictObject o) {
  Phi phi;
  phi.c1 = o.get_or("c1", phi.c1);
  phi.c2 = o.get_or("c2", phi.c2);
  phi.iota1 = o.get_or("iota1", phi.iota1);
  phi.iota2 = o.get_or("iota2", phi.iota2);
  o.finish();
  return phi;
}

ScheduleSpec parse_schedule(StrictObject o) {
  ScheduleSpec s;
  const auto kind = o.get_or<std::string>("kind", "corollary");
  if (kind == "corollary") {
    s.kind = ScheduleSpec::Kind::corollary;
    s.alpha = o.get_or("alpha", s.alpha);
    s.iota = o.get_or("iota", s.iota);
  } else if (kind == "miller") {
    s.kind = ScheduleSpec::Kind::miller;
  } else if (kind == "fixed") {
    s.kind = ScheduleSpec::Kind::fixed;
    s.fixed.sigma2 = o.get<double>("sigma2");
    s.fixed.log_delta = o.get_or("log_delta", 0.0);
    s.fixed.log_lambda = o.get<double>("log_lambda");
  } else {
    throw ConfigError("unknown schedule kind '" + kind + "' (corollary, miller, fixed)");
  }
  o.finish();
  return s;
}

OracleConfig parse_oracle(StrictObject o) {
  OracleConfig out;
  const auto type = o.get_or<std::string>("type", "gaussian");
  if (type == "gaussian") {
    auto& g = out.gaussian;
    const auto& means = o.at("means");
    if (!means.is_array() || means.empty()) throw ConfigError(o.where() + ".means must be a non-empty array");
    for (std::size_t i = 0; i < means.size(); ++i) g.means.push_back(to_vector(means[i], o.where() + ".means"));
    if (o.has("covariances")) {
      g.covariances = to_matrices(o.at("covariances"), o.where() + ".covariances");
    } else {
      for (const auto& m : g.means) g.covariances.push_back(Eigen::MatrixXd::Identity(m.size(), m.size()));
    }
    g.weights = o.get_or("weights", std::vector<double>{});
    try {
      g.validate();
      if (o.has("snr")) g = g.with_snr(o.get<double>("snr"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(o.where() + ": " + e.what());
    }
  } else if (type == "spd") {
    out.spd = true;
    auto& s = out.object;
    s.means = to_matrices(o.at("means"), o.where() + ".means");
    s.noise_scales = o.get<std::vector<double>>("noise_scales");
    s.nu = o.get_or("nu", s.nu);
    s.weights = o.get_or("weights", std::vector<double>{});
    try {
      s.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(o.where() + ": " + e.what());
    }
  } else {
    throw ConfigError("unknown oracle type '" + type + "' (gaussian, spd)");
  }
  o.finish();
  return out;
}

ModelRunConfig parse_model_run(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  StrictObject o(j, "config");
  ModelRunConfig c;
  {
    StrictObject d = o.object("data");
    c.data.path = d.get<std::string>("path");
    if (c.data.path.is_relative()) c.data.path = base_dir / c.data.path;
    c.data.kind = parse_kind(d.get_or<std::string>("kind", "euclidean"));
    d.finish();
  }
  if (o.has("model")) c.model = parse_model(o.object("model"));
  if (o.has("max_k")) c.max_k = o.get<int>("max_k");
  if (o.has("truth")) {
    try {
      c.truth = Partition::parse(o.get<std::string>("truth"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config.truth: ") + e.what());
    }
  }
  if (o.has("chain")) c.chain = parse_chain(o.object("chain"));
  c.seed = o.get_or<std::uint64_t>("seed", 0);
  o.finish();
  return c;
}

ExperimentConfig parse_experiment(const nlohmann::json& j) {
  StrictObject o(j, "config");
  ExperimentConfig c;
  c.oracle = parse_oracle(o.object("oracle"));
  if (c.oracle.spd) {
    c.sigma = o.get<double>("sigma");
    c.log_zeta = o.get_or("log_zeta", 0.0);
    c.log_delta_lambda = o.get<double>("log_delta_lambda");
  } else {
    c.schedule = parse_schedule(o.object("schedule"));
  }
  if (o.has("phi")) c.phi = parse_phi(o.object("phi"));
  c.n_grid = o.get<std::vector<int>>("n_grid");
  c.replicates = o.get<int>("replicates");
  c.seed = o.get_or<std::uint64_t>("seed", 0);
  c.mode = parse_mode(o.get_or<std::string>("mode", "exact"));
  if (o.has("chain")) c.chain = parse_chain(o.object("chain"));
  o.finish();
  return c;
}

MisclassConfig parse_misclass(const nlohmann::json& j) {
  StrictObject o(j, "config");
  MisclassConfig c;
  const OracleConfig oracle = parse_oracle(o.object("oracle"));
  if (oracle.spd) throw ConfigError("misclass needs a gaussian oracle");
  c.plan.base = oracle.gaussian;
  c.plan.snr_grid = o.get<std::vector<double>>("snr_grid");
  c.plan.n = o.get<int>("n");
  c.plan.replicates = o.get<int>("replicates");
  c.plan.master_seed = o.get_or<std::uint64_t>("seed", 0);
  c.plan.kappa = o.get_or("kappa", c.plan.kappa);
  c.plan.tail_draws = o.get_or("tail_draws", c.plan.tail_draws);
  o.finish();
  return c;
}

GenDataConfig parse_gen_data(const nlohmann::json& j) {
  StrictObject o(j, "config");
  GenDataConfig c;
  c.oracle = parse_oracle(o.object("oracle"));
  c.n = o.get<int>("n");
  c.seed = o.get_or<std::uint64_t>("seed", 0);
  o.finish();
  return c;
}

VerifyConfig parse_verify(const nlohmann::json& j) {
  StrictObject o(j, "config");
  VerifyConfig c;
  c.trials = o.get_or("trials", c.trials);
  c.seed = o.get_or<std::uint64_t>("seed", 0);
  o.finish();
  return c;
}

}  // namespace bsf::cli
