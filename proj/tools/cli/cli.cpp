#include "cli.hpp"

#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "bsf/io.hpp"
#include "config.hpp"

namespace bsf::cli {

namespace {

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> mode;
  std::optional<int> max_k;
};

int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::filesystem::path out_path(const Flags& f, const std::string& name) { return std::filesystem::path(f.out) / name; }

template <class Fn>
void emit(const Flags& f, const std::string& name, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_file(out_path(f, name), os.str());
}

nlohmann::json require_config(const Flags& f) {
  if (f.config.empty()) throw ConfigError("--config is required");
  return load_json(f.config);
}

std::filesystem::path config_dir(const Flags& f) {
  return std::filesystem::absolute(f.config).parent_path();
}

BsfModel load_model(const ModelRunConfig& c) {
  const Dataset data = read_dataset(c.data.path, c.data.kind);
  if (c.truth && c.truth->size() != data.size()) throw ConfigError("truth has the wrong length");
  return BsfModel(data, c.model);
}

int cmd_exact(const Flags& f, std::ostream& out) {
  const ModelRunConfig c = parse_model_run(require_config(f), config_dir(f));
  const BsfModel model = load_model(c);
  PosteriorOptions opts;
  if (const auto mk = f.max_k ? f.max_k : c.max_k) {
    if (*mk < 1) throw ConfigError("max-k must be at least 1");
    opts.bounds.max_blocks = *mk;
  }
  opts.truth = c.truth;
  opts.expected_hamming = c.truth.has_value();
  const PosteriorTable t = exact_posterior(model, opts);
  emit(f, "posterior.csv", [&](std::ostream& os) { write_posterior_csv(os, t); });
  emit(f, "k_marginal.csv", [&](std::ostream& os) { write_k_marginal_csv(os, t.k_marginal); });
  emit(f, "map.txt", [&](std::ostream& os) { os << t.map.to_string() << '\n'; });
  out << "n=" << t.n << " classes=" << t.class_count << " log_normalizer=" << format_double(t.log_normalizer)
      << '\n';
  out << "map=" << t.map.to_string() << " probability=" << format_double(t.map_probability) << '\n';
  if (t.truth_probability) {
    out << "truth probability=" << format_double(*t.truth_probability)
        << " expected_hamming=" << format_double(*t.expected_hamming) << '\n';
  }
  return kOk;
}

int cmd_mcmc(const Flags& f, std::ostream& out) {
  ModelRunConfig c = parse_model_run(require_config(f), config_dir(f));
  if (f.seed) c.seed = *f.seed;
  const BsfModel model = load_model(c);
  const ChainSummary s = run_chain(model, c.chain, c.seed);
  emit(f, "coclustering.csv", [&](std::ostream& os) { write_coclustering_csv(os, s.coclustering()); });
  emit(f, "k_histogram.csv", [&](std::ostream& os) { write_k_histogram_csv(os, s); });
  emit(f, "samples.csv", [&](std::ostream& os) { write_samples_csv(os, s); });
  out << "retained=" << s.retained() << '\n';
  out << "acceptance gibbs=" << format_double(s.gibbs.rate()) << " split=" << format_double(s.split.rate())
      << " merge=" << format_double(s.merge_moves.rate()) << '\n';
  return kOk;
}

int cmd_experiment(const Flags& f, std::ostream& out) {
  ExperimentConfig c = parse_experiment(require_config(f));
  ConsistencyPlan plan = c.oracle.spd
                             ? spd_consistency_plan(c.oracle.object, c.sigma, c.log_zeta, c.log_delta_lambda)
                             : gaussian_consistency_plan(c.oracle.gaussian, c.schedule);
  if (c.phi) plan.phi = *c.phi;
  plan.n_grid = c.n_grid;
  plan.replicates = c.replicates;
  plan.master_seed = f.seed ? *f.seed : c.seed;
  plan.mode = f.mode ? parse_mode(*f.mode) : c.mode;
  plan.chain = c.chain;
  plan.workers = f.workers ? *f.workers : default_workers();
  try {
    plan.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const ConsistencyResult r = consistency_experiment(plan);
  emit(f, "consistency_rows.csv", [&](std::ostream& os) { write_consistency_rows_csv(os, r.rows); });
  emit(f, "consistency_aggregate.csv", [&](std::ostream& os) { write_consistency_aggregates_csv(os, r.aggregates); });
  for (const auto& a : r.aggregates) {
    out << "n=" << a.n << " median_prob_truth=" << format_double(a.prob_truth.median)
        << " median_prob_k0=" << format_double(a.prob_k0.median) << " map_exact_rate=" << format_double(a.map_exact_rate)
        << " d_member_rate=" << format_double(a.d_member_rate) << '\n';
  }
  return kOk;
}

int cmd_misclass(const Flags& f, std::ostream& out) {
  MisclassConfig c = parse_misclass(require_config(f));
  if (f.seed) c.plan.master_seed = *f.seed;
  c.plan.workers = f.workers ? *f.workers : default_workers();
  try {
    c.plan.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const MisclassResult r = misclassification_experiment(c.plan);
  emit(f, "misclass_rows.csv", [&](std::ostream& os) { write_misclass_rows_csv(os, r.rows); });
  emit(f, "misclass_aggregate.csv", [&](std::ostream& os) { write_misclass_aggregates_csv(os, r.aggregates); });
  for (const auto& a : r.aggregates) {
    out << "snr=" << format_double(a.snr) << " median_expected_hamming=" << format_double(a.expected_hamming.median)
        << " bound_violations=" << a.bound_violations << '\n';
  }
  return kOk;
}

int cmd_verify(const Flags& f, std::ostream& out) {
  VerifyConfig c = f.config.empty() ? VerifyConfig{} : parse_verify(load_json(f.config));
  if (f.seed) c.seed = *f.seed;
  if (c.trials < 1) throw ConfigError("trials must be at least 1");
  const auto reports = verify_all(c.trials, c.seed);
  std::ostringstream table;
  write_lemma_table(table, reports);
  out << table.str();
  if (f.out != ".") write_file(out_path(f, "verify.txt"), table.str());
  for (const auto& r : reports)
    if (!r.pass) return kFailure;
  return kOk;
}

int cmd_gen_data(const Flags& f, std::ostream& out) {
  GenDataConfig c = parse_gen_data(require_config(f));
  if (f.seed) c.seed = *f.seed;
  if (c.n < 1) throw ConfigError("n must be positive");
  const OracleSample s =
      c.oracle.spd ? generate_spd(c.oracle.object, c.n, c.seed) : generate_gaussian(c.oracle.gaussian, c.n, c.seed);
  const std::string name = c.oracle.spd ? "data.txt" : "data.csv";
  emit(f, name, [&](std::ostream& os) { write_dataset(os, s.data); });
  emit(f, "truth.txt", [&](std::ostream& os) { os << s.truth.to_string() << '\n'; });
  out << "wrote " << out_path(f, name).string() << " n=" << c.n << " truth=" << s.truth.to_string() << '\n';
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian spanning forest clustering"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", f.config, "JSON config file");
    if (config_required) opt->required();
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "master seed (overrides the config)");
  };
  auto* exact = app.add_subcommand("exact", "exact posterior by enumeration");
  add_common(exact, true);
  exact->add_option("--max-k", f.max_k, "largest number of blocks");
  auto* mcmc = app.add_subcommand("mcmc", "Gibbs plus split-merge chain");
  add_common(mcmc, true);
  auto* experiment = app.add_subcommand("experiment", "posterior consistency over an n grid");
  add_common(experiment, true);
  experiment->add_option("--workers", f.workers, "worker threads");
  experiment->add_option("--mode", f.mode, "exact or mcmc")->check(CLI::IsMember({"exact", "mcmc"}));
  auto* misclass = app.add_subcommand("misclass", "misclassification rate over an SNR grid");
  add_common(misclass, true);
  misclass->add_option("--workers", f.workers, "worker threads");
  auto* verify = app.add_subcommand("verify", "randomized lemma checks");
  add_common(verify, false);
  auto* gen = app.add_subcommand("gen-data", "sample a dataset from an oracle");
  add_common(gen, true);

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }
  if (f.workers && *f.workers < 1) {
    err << "error: --workers must be at least 1\n";
    return kConfigError;
  }

  try {
    if (exact->parsed()) return cmd_exact(f, out);
    if (mcmc->parsed()) return cmd_mcmc(f, out);
    if (experiment->parsed()) return cmd_experiment(f, out);
    if (misclass->parsed()) return cmd_misclass(f, out);
    if (verify->parsed()) return cmd_verify(f, out);
    if (gen->parsed()) return cmd_gen_data(f, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IngestionError& e) {
    err << "ingestion error: " << e.what() << '\n';
    return kIngestionError;
  } catch (const CapExceeded& e) {
    err << "cap exceeded: " << e.what() << '\n';
    return kCapExceeded;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace bsf::cli
