// season: experiment runner for discriminator-guided refinement.
//
//   season run <config.json>
//   season verify <core|identity|bounds|samplers|all>
//   season sample|refine|train-discriminator|bounds [flags]
//
// Exit codes: 0 success, 1 failed verification, 2 validation error,
// 3 numeric failure.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "season/season.hpp"

namespace {

using season::Json;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

std::filesystem::path output_dir(const Json& cfg) {
  if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) return env;
  if (cfg.contains("output_dir")) {
    if (!cfg["output_dir"].is_string()) throw season::ValidationError("wrong type at /output_dir");
    return cfg["output_dir"].get<std::string>();
  }
  return "out";
}

Json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw season::ValidationError("cannot open config '" + path + "'");
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw season::ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

int execute(const Json& cfg) {
  const auto out = season::experiments::run(cfg);
  const auto dir = output_dir(cfg);
  out.commit(dir);
  for (const auto& [name, content] : out.files()) std::cout << (dir / name).string() << '\n';
  return 0;
}

template <class T>
void put_if(Json& j, const std::string& key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"season: discriminator-guided refinement experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  run->add_option("config", config_path, "config file")->required();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a property suite and print a JSON summary");
  verify->add_option("suite", suite, "core, identity, bounds, samplers or all")->required();

  // Flags shared by the thin pipeline wrappers.
  std::optional<std::uint64_t> seed;
  std::optional<std::string> generator, out_dir;
  std::optional<std::size_t> width, K, n_samples, train_samples, n, trials;
  std::optional<int> steps, sign_draws;
  std::optional<double> lr, T, delta, span;
  std::vector<double> nu, mu, eta;
  std::string normalization = "solve_lambda";

  auto* sample = app.add_subcommand("sample", "guided vs unguided reverse diffusion on a 1D bimodal toy");
  auto* refine = app.add_subcommand("refine", "refine a discrete base distribution");
  auto* train = app.add_subcommand("train-discriminator", "train one discriminator between data and base samples");
  auto* bounds = app.add_subcommand("bounds", "generalization bound trials in a known-population world");

  for (auto* sub : {sample, refine, train, bounds}) {
    sub->add_option("--generator", generator, "kl, reverse_kl or js_shifted");
    sub->add_option("--output-dir", out_dir, "output directory (OUTPUT_DIR overrides)");
  }
  for (auto* sub : {sample, train, bounds}) sub->add_option("--seed", seed, "random seed")->required();
  for (auto* sub : {sample, train}) {
    sub->add_option("--width", width, "hidden width");
    sub->add_option("--steps", steps, "gradient steps");
    sub->add_option("--lr", lr, "step size");
    sub->add_option("--train-samples", train_samples, "samples per class");
  }
  sample->add_option("--K", K, "reverse steps");
  sample->add_option("--T", T, "horizon");
  sample->add_option("--n-samples", n_samples, "output samples");
  refine->add_option("--mu", mu, "base weights")->delimiter(',')->required();
  refine->add_option("--nu", nu, "target weights (tabular optimum)")->delimiter(',');
  refine->add_option("--eta", eta, "class probabilities per point")->delimiter(',');
  refine->add_option("--normalization", normalization, "solve_lambda or rescale");
  bounds->add_option("--n", n, "sample size");
  bounds->add_option("--delta", delta, "confidence");
  bounds->add_option("--trials", trials, "trials");
  bounds->add_option("--span", span, "class span B");
  bounds->add_option("--sign-draws", sign_draws, "Rademacher sign draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return execute(load_config(config_path));
    if (*verify) {
      const Json summary = season::experiments::verify(suite);
      std::cout << summary.dump(2) << '\n';
      return summary["passed"].get<bool>() ? 0 : kExitVerifyFailed;
    }
    Json cfg = Json::object();
    put_if(cfg, "seed", seed);
    put_if(cfg, "generator", generator);
    put_if(cfg, "output_dir", out_dir);
    Json disc = Json::object(), sampler = Json::object(), dists = Json::object();
    put_if(disc, "width", width);
    put_if(disc, "steps", steps);
    put_if(disc, "lr", lr);
    put_if(disc, "train_samples", train_samples);
    put_if(sampler, "K", K);
    put_if(sampler, "T", T);
    put_if(sampler, "n_samples", n_samples);
    cfg["discriminator"] = disc;
    cfg["sampler"] = sampler;
    if (*sample) cfg["experiment"] = "refine-1d";
    if (*train) cfg["experiment"] = "train-discriminator";
    if (*refine) {
      cfg["experiment"] = "refine-discrete";
      cfg["normalization"] = normalization;
      dists["mu"] = mu;
      if (!nu.empty()) dists["nu"] = nu;
      if (!eta.empty()) dists["eta"] = eta;
      if (nu.empty() == eta.empty()) throw season::ValidationError("refine needs exactly one of --nu or --eta");
    }
    if (*bounds) {
      cfg["experiment"] = "bounds";
      put_if(cfg, "n", n);
      put_if(cfg, "delta", delta);
      put_if(cfg, "trials", trials);
      put_if(cfg, "span", span);
      put_if(cfg, "sign_draws", sign_draws);
    }
    cfg["distributions"] = dists;
    return execute(cfg);
  } catch (const season::ValidationError& e) {
    std::cerr << "season: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const season::NumericError& e) {
    std::cerr << "season: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const season::DomainError& e) {
    std::cerr << "season: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "season: error: " << e.what() << '\n';
    return 1;
  }
}
