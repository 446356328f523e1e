#include "spherekit/bench.hpp"
#include "spherekit/harmonics.hpp"
#include "spherekit/kernels.hpp"
#include "spherekit/losses.hpp"
#include "spherekit/optimizer.hpp"
#include "spherekit/sampling.hpp"
#include "spherekit/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return j;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

spherekit::LossWeights weights_from_json(const json& j) {
  reject_unknown_keys(j, {"lambda", "mu", "tau", "t_scale", "nu", "gamma", "epsilon"},
                      "weights");
  spherekit::LossWeights w;
  w.lambda = j.value("lambda", w.lambda);
  w.mu = j.value("mu", w.mu);
  w.tau = j.value("tau", w.tau);
  w.t_scale = j.value("t_scale", w.t_scale);
  w.nu = j.value("nu", w.nu);
  w.gamma = j.value("gamma", w.gamma);
  w.epsilon = j.value("epsilon", w.epsilon);
  return w;
}

spherekit::KernelSpec kernel_from_json(const json& j) {
  reject_unknown_keys(j, {"q", "family", "coefficients", "sigma", "s", "centered"},
                      "kernel");
  try {
    return spherekit::KernelSpec::from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("kernel config: ") + e.what());
  }
}

int cmd_expand(const std::string& family, int q, int order, double sigma, double s,
               const std::string& coeffs, const fs::path& out_dir) {
  spherekit::KernelSpec spec;
  if (family == "truncated") {
    std::vector<std::pair<int, double>> pairs;
    std::stringstream ss(coeffs);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("bad --coeffs entry " + item);
      pairs.emplace_back(std::stoi(item.substr(0, colon)),
                         std::stod(item.substr(colon + 1)));
    }
    spec = spherekit::KernelSpec::truncated(q, pairs);
  } else if (family == "rbf") {
    spec = spherekit::KernelSpec::rbf(q, sigma, order);
  } else if (family == "gendist") {
    spec = spherekit::KernelSpec::gen_dist(q, s, order);
  } else {
    throw ConfigError("unknown kernel family " + family);
  }

  // Independent quadrature extraction as a cross-check column.
  auto phi = [&spec](double t) { return spherekit::kernel_eval(spec, t); };
  const spherekit::CoefficientExpansion quad =
      spherekit::expand_coefficients(phi, q, spec.max_order());

  std::ofstream out = open_output(out_dir, "coefficients.csv");
  out << std::setprecision(17);
  out << "l,b_l,quadrature_b_l";
  if (family == "rbf") out << ",bound";
  out << '\n';
  for (int l = 0; l <= spec.max_order(); ++l) {
    out << l << ',' << spec.coefficient(l) << ','
        << quad.coefficients[static_cast<std::size_t>(l)];
    if (family == "rbf") out << ',' << spherekit::rbf_coefficient_bound(q, sigma, l);
    out << '\n';
  }

  json summary = spec.to_json();
  summary["quadrature_converged"] = quad.converged;
  summary["universal_up_to_probe"] =
      spherekit::is_universal(spec, spec.max_order()) ==
      spherekit::Universality::UniversalUpToProbe;
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const fs::path& out_dir) {
  std::vector<spherekit::SuiteResult> results;
  if (suite == "all") {
    results = spherekit::run_all_suites(seed);
  } else {
    results.push_back(spherekit::run_suite(suite, seed));
  }

  json report = json::array();
  bool all_passed = true;
  for (const spherekit::SuiteResult& r : results) {
    report.push_back(r.to_json());
    all_passed = all_passed && r.passed();
  }
  std::cout << report.dump(2) << '\n';
  if (!out_dir.empty()) {
    std::ofstream out = open_output(out_dir, "verify.json");
    out << report.dump(2) << '\n';
  }
  return all_passed ? 0 : kExitCheckFailure;
}

int cmd_minimize(const std::string& config_path, std::uint64_t seed_override,
                 bool seed_given, const fs::path& out_dir) {
  const json j = load_config(config_path);
  reject_unknown_keys(j, {"seed", "kernel", "weights", "optim", "data"}, "config");

  spherekit::OptimConfig config;
  config.seed = j.value("seed", std::uint64_t{0});
  if (seed_given) config.seed = seed_override;
  config.kernel = kernel_from_json(j.at("kernel"));
  if (j.contains("weights")) config.weights = weights_from_json(j.at("weights"));

  const json& opt = j.at("optim");
  reject_unknown_keys(
      opt, {"loss", "steps", "step_size", "eval_every", "mc_ref_size", "record_mc_mmd"},
      "optim");
  config.loss = spherekit::loss_kind_from_string(opt.value("loss", "sfrik"));
  config.steps = opt.value("steps", config.steps);
  config.step_size = opt.value("step_size", config.step_size);
  config.eval_every = opt.value("eval_every", config.eval_every);
  config.mc_ref_size = opt.value("mc_ref_size", config.mc_ref_size);
  config.record_mc_mmd = opt.value("record_mc_mmd", config.record_mc_mmd);

  const json& data_cfg = j.at("data");
  reject_unknown_keys(data_cfg, {"q", "n", "clusters", "noise_angle"}, "data");
  const spherekit::TwoViewBatch data = spherekit::generate_two_view_data(
      data_cfg.at("q").get<int>(), data_cfg.at("n").get<int>(),
      data_cfg.value("clusters", 0), data_cfg.value("noise_angle", 0.0), config.seed);

  const spherekit::Trajectory traj = spherekit::minimize(config, data);

  std::ofstream csv = open_output(out_dir, "trajectory.csv");
  traj.write_csv(csv);
  std::ofstream points = open_output(out_dir, "final_embeddings.csv");
  spherekit::export_sample_csv(points, traj.final_z1);

  const spherekit::TrajectoryRecord& last = traj.records.back();
  json summary = {{"steps", config.steps},
                  {"seed", config.seed},
                  {"loss", spherekit::to_string(config.loss)},
                  {"final_total", last.total},
                  {"final_align", last.align},
                  {"final_unif", last.unif},
                  {"final_mean_norm", last.mean_norm},
                  {"final_autocorr_dev", last.autocorr_dev},
                  {"final_mc_mmd", last.mc_mmd},
                  {"final_mc_mmd_se", last.mc_mmd_se}};
  std::ofstream sum = open_output(out_dir, "summary.json");
  sum << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_bench(const std::vector<int>& q_list, const std::vector<int>& batch_list,
              int batch_fixed, int q_fixed, int repeats, std::uint64_t seed,
              const fs::path& out_dir) {
  const spherekit::BenchSummary summary = spherekit::run_standard_bench(
      q_list, batch_list, batch_fixed, q_fixed, repeats, seed);
  std::ofstream csv = open_output(out_dir, "bench.csv");
  summary.write_csv(csv);
  std::ofstream fits = open_output(out_dir, "bench_fits.json");
  fits << summary.to_json()["fits"].dump(2) << '\n';
  std::cout << summary.to_json()["fits"].dump(2) << '\n';
  return 0;
}

int cmd_stats(const std::string& input, const std::string& kernel_path,
              std::uint64_t seed, int ref_size, const fs::path& out_dir) {
  std::ifstream in(input);
  if (!in) throw ConfigError("cannot open embeddings file " + input);
  const Eigen::MatrixXd z = spherekit::import_sample_csv(in);

  const spherekit::MomentStats moments = spherekit::embedding_moment_stats(z);
  json summary = {{"n", z.rows()},
                  {"q", z.cols()},
                  {"mean_norm", moments.mean_norm},
                  {"autocorr_dev", moments.autocorr_deviation}};

  if (!kernel_path.empty()) {
    spherekit::KernelSpec spec = kernel_from_json(load_config(kernel_path));
    if (!spec.centered) spec = spherekit::center_kernel(std::move(spec));
    const spherekit::SampleSet ref = spherekit::sample_uniform_sphere(
        static_cast<int>(z.cols()), ref_size, spherekit::rng::mix(seed, 0x726566ULL));
    const spherekit::McEstimate mmd = spherekit::mmd_to_uniform_mc(spec, z, ref);
    summary["mc_mmd"] = mmd.estimate;
    summary["mc_mmd_se"] = mmd.std_error;
  }

  std::cout << summary.dump(2) << '\n';
  if (!out_dir.empty()) {
    std::ofstream out = open_output(out_dir, "stats.json");
    out << summary.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotation-invariant kernels, MMD estimators and sphere optimization"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int threads = 1;
  app.add_option("--seed", seed, "Seed for all deterministic randomness");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Eigen thread count");

  auto* expand = app.add_subcommand("expand", "Legendre coefficient report for a kernel");
  std::string family = "rbf", coeffs;
  int q = 3, order = 20;
  double sigma = 1.0, s = 1.5;
  expand->add_option("--family", family, "truncated | rbf | gendist");
  expand->add_option("--q", q, "Ambient dimension");
  expand->add_option("--order", order, "Maximum expansion order");
  expand->add_option("--sigma", sigma, "RBF scale");
  expand->add_option("--s", s, "Generalized-distance exponent");
  expand->add_option("--coeffs", coeffs, "Truncated coefficients, e.g. 1:1,2:40");

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  std::string suite = "all";
  verify->add_option("--suite", suite, "Suite name, or \"all\"");

  auto* minimize = app.add_subcommand("minimize", "Projected gradient descent run");
  std::string config_path;
  minimize->add_option("--config", config_path, "Experiment config JSON")->required();

  auto* bench = app.add_subcommand("bench", "Complexity benchmark");
  std::vector<int> q_list = {1024, 2048, 4096, 8192, 16384};
  std::vector<int> batch_list = {64, 128, 256, 512};
  int batch_fixed = 256, q_fixed = 1024, repeats = 5;
  bench->add_option("--q-list", q_list, "Dimensions for the q sweep");
  bench->add_option("--batch-list", batch_list, "Batch sizes for the |I| sweep");
  bench->add_option("--batch", batch_fixed, "Fixed |I| for the q sweep");
  bench->add_option("--q", q_fixed, "Fixed q for the |I| sweep");
  bench->add_option("--repeats", repeats, "Timed repetitions per point");

  auto* stats = app.add_subcommand("stats", "Moment statistics of an embeddings CSV");
  std::string input, kernel_path;
  int ref_size = 4096;
  stats->add_option("--input", input, "Embeddings CSV, one row per point")->required();
  stats->add_option("--kernel", kernel_path, "Kernel JSON for an MC-MMD estimate");
  stats->add_option("--ref-size", ref_size, "Uniform reference sample size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  Eigen::setNbThreads(threads);
  try {
    if (*expand) return cmd_expand(family, q, order, sigma, s, coeffs, out_dir);
    if (*verify) return cmd_verify(suite, seed, out_dir);
    if (*minimize) return cmd_minimize(config_path, seed, app.count("--seed") > 0, out_dir);
    if (*bench)
      return cmd_bench(q_list, batch_list, batch_fixed, q_fixed, repeats, seed, out_dir);
    if (*stats) return cmd_stats(input, kernel_path, seed, ref_size, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
  return kExitUsage;
}
