#ifndef SEASON_EXPERIMENTS_HPP
#define SEASON_EXPERIMENTS_HPP

#include "season/io.hpp"
#include "season/oracle.hpp"

namespace season {

/// Named pipelines driven by a JSON config. Each returns the files it would
/// write; nothing touches the disk until the caller commits the OutputSet.
namespace experiments {

using detail::json_get;
using detail::json_get_or;

inline std::uint64_t require_seed(const Json& cfg) { return json_get<std::uint64_t>(cfg, "", "seed"); }

inline Json section(const Json& cfg, const std::string& key) {
  if (!cfg.contains(key)) return Json::object();
  if (!cfg[key].is_object()) throw ValidationError("expected an object at /" + key);
  return cfg[key];
}

inline Generator generator_of(const Json& cfg, const std::string& fallback = "js_shifted") {
  const auto name = json_get_or<std::string>(cfg, "", "generator", fallback);
  try {
    return Generator::from_name(name);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " at /generator");
  }
}

inline std::vector<Generator> generators_of(const Json& cfg) {
  const auto name = json_get_or<std::string>(cfg, "", "generator", "all");
  if (name == "all") return {Generator::kl(), Generator::reverse_kl(), Generator::js_shifted()};
  return {generator_of(cfg)};
}

/// 1D mixture {means: [...], vars: [...], weights: [...]}.
inline GaussianMixture mixture_1d(const Json& j, const std::string& path) {
  const auto means = json_get<std::vector<double>>(j, path, "means");
  const auto vars = json_get<std::vector<double>>(j, path, "vars");
  const auto weights = json_get<std::vector<double>>(j, path, "weights");
  if (means.size() != vars.size() || means.size() != weights.size())
    throw ValidationError("means, vars and weights differ in length at " + path);
  Batch m;
  std::vector<std::vector<double>> v;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (!(vars[i] > 0.0)) throw ValidationError("variance must be positive at " + path + "/vars/" + std::to_string(i));
    m.push_back({means[i]});
    v.push_back({vars[i]});
  }
  try {
    return GaussianMixture::diagonal(std::move(m), v, weights);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " at " + path);
  }
}

inline TrainConfig train_config(const Json& cfg, std::uint64_t seed) {
  const Json d = section(cfg, "discriminator");
  TrainConfig tc;
  tc.width = json_get_or<std::size_t>(d, "/discriminator", "width", 8);
  tc.steps = json_get_or<int>(d, "/discriminator", "steps", 100);
  tc.lr = json_get_or<double>(d, "/discriminator", "lr", 0.5);
  tc.seed = seed;
  if (tc.width == 0) throw ValidationError("width must be positive at /discriminator/width");
  if (tc.steps < 0) throw ValidationError("steps must be nonnegative at /discriminator/steps");
  if (!(tc.lr > 0.0)) throw ValidationError("lr must be positive at /discriminator/lr");
  return tc;
}

// ---------------------------------------------------------------- identity

inline std::vector<SpanClass> span_classes(const Json& cfg) {
  std::vector<SpanClass> out;
  if (!cfg.contains("classes")) return {SpanClass::constants(), SpanClass::bounded(0.5), SpanClass::bounded(1.0),
                                        SpanClass::bounded(2.0), SpanClass::rich()};
  if (!cfg["classes"].is_array() || cfg["classes"].empty())
    throw ValidationError("expected a nonempty array at /classes");
  for (std::size_t i = 0; i < cfg["classes"].size(); ++i) {
    const auto& c = cfg["classes"][i];
    if (c.is_string() && c.get<std::string>() == "inf")
      out.push_back(SpanClass::rich());
    else if (c.is_number() && c.get<double>() >= 0.0)
      out.push_back(SpanClass::bounded(c.get<double>()));
    else
      throw ValidationError("class span must be a nonnegative number or \"inf\" at /classes/" + std::to_string(i));
  }
  return out;
}

inline OutputSet identity_discrete(const Json& cfg) {
  const auto seed = require_seed(cfg);
  const auto gens = generators_of(cfg);
  const auto classes = span_classes(cfg);
  const Json d = section(cfg, "distributions");
  const auto instances = json_get_or<std::size_t>(d, "/distributions", "instances", 100);
  const auto kmin = json_get_or<std::size_t>(d, "/distributions", "min_support", 2);
  const auto kmax = json_get_or<std::size_t>(d, "/distributions", "max_support", 4);
  const auto alpha = json_get_or<double>(d, "/distributions", "alpha", 1.0);
  if (kmin < 1 || kmax < kmin) throw ValidationError("need 1 <= min_support <= max_support at /distributions");
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive at /distributions/alpha");
  const double tolerance = 1e-9;

  CsvTable terms({"instance_id", "d_H", "D_fH", "gain", "residual"});
  Json meta = Json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(split_seed(seed, i));
    const std::size_t k = kmin + static_cast<std::size_t>(rng.uniform() * static_cast<double>(kmax - kmin + 1));
    const auto [nu, mu] = random_instance(rng, std::min(k, kmax), alpha);
    const Generator gen = gens[i % gens.size()];
    const SpanClass cls = classes[(i / gens.size()) % classes.size()];
    const auto t = identity_terms(nu, mu, gen, cls);
    worst = std::max(worst, t.residual);
    terms.add_row({std::to_string(i), format_double(t.d_H), format_double(t.D_fH), format_double(t.gain),
                   format_double(t.residual)});
    meta.push_back({{"instance_id", i},
                    {"generator", std::string(gen.name())},
                    {"support_size", nu.size()},
                    {"span", cls.is_rich() ? Json("inf") : Json(cls.span)},
                    {"lambda", t.lambda}});
  }
  OutputSet out;
  out.add_csv("identity_terms.csv", terms);
  out.add_json("identity_summary.json", {{"experiment", "identity-discrete"},
                                         {"seed", seed},
                                         {"instances", meta},
                                         {"max_residual", worst},
                                         {"tolerance", tolerance},
                                         {"passed", worst <= tolerance}});
  return out;
}

// ---------------------------------------------------------------- refine-1d

struct GuidedRun {
  Batch base;
  Batch refined;
  Batch data;
  double w1_base;
  double w1_refined;
  std::vector<double> lambdas;
  std::vector<double> objectives;
  int unconverged_levels;
};

struct GuidedSetup {
  GaussianMixture data;
  GaussianMixture base;
  Generator gen = Generator::js_shifted();
  ReverseDiffusionConfig diffusion;
  TrainConfig train;
  std::size_t train_samples = 400;
  bool warm_start = true;
};

/// Trains one discriminator per level tau_{k+1} on data and base-model
/// samples both forward-noised to T - tau_{k+1}, then runs the reverse
/// sampler with and without guidance from the same seed.
inline GuidedRun guided_run(const GuidedSetup& s, std::uint64_t seed) {
  ReverseDiffusionConfig rc = s.diffusion;
  rc.seed = split_seed(seed, 1);
  const auto score = noised_mixture_score(s.base, rc);
  Rng rng(split_seed(seed, 2));
  std::vector<Discriminator> discs;
  std::vector<double> lambdas, objectives;
  int unconverged = 0;
  TrainConfig tc = s.train;
  tc.seed = split_seed(seed, 3);
  for (std::size_t k = 0; k < rc.K; ++k) {
    const double t = rc.forward_time(k + 1);
    Batch xd, xb;
    for (std::size_t i = 0; i < s.train_samples; ++i) {
      xd.push_back(s.data.sample(rng));
      xb.push_back(s.base.sample(rng));
    }
    xd = noise_batch(xd, rc.schedule, t, rng);
    xb = noise_batch(xb, rc.schedule, t, rng);
    auto r = (s.warm_start && !discs.empty())
                 ? train_from(discs.back(), WeightedBatch::uniform(xd), WeightedBatch::uniform(xb), tc)
                 : train(s.gen, xd, xb, tc);
    unconverged += r.converged ? 0 : 1;
    objectives.push_back(r.objective);
    lambdas.push_back(solve_lambda(r.disc, xb));
    discs.push_back(std::move(r.disc));
  }
  GuidedRun out;
  out.base = reverse_em(score, rc);
  out.refined = reverse_em(score, rc, &discs, &lambdas);
  Rng dr(split_seed(seed, 4));
  out.data = s.data.model().sample(dr, rc.n_samples);
  out.w1_base = w1_1d(out.base, out.data);
  out.w1_refined = w1_1d(out.refined, out.data);
  out.lambdas = std::move(lambdas);
  out.objectives = std::move(objectives);
  out.unconverged_levels = unconverged;
  return out;
}

inline GuidedSetup guided_setup(const Json& cfg) {
  const Json d = section(cfg, "distributions");
  const Json default_data = {{"means", {-2.0, 2.0}}, {"vars", {0.25, 0.25}}, {"weights", {0.5, 0.5}}};
  const Json default_base = {{"means", {-2.0, 2.0}}, {"vars", {0.25, 0.25}}, {"weights", {0.8, 0.2}}};
  GuidedSetup s{mixture_1d(d.value("data", default_data), "/distributions/data"),
                mixture_1d(d.value("base", default_base), "/distributions/base"),
                generator_of(cfg),
                {},
                train_config(cfg, 0),
                400,
                true};
  const Json sm = section(cfg, "sampler");
  const double T = json_get_or<double>(sm, "/sampler", "T", 3.0);
  const double beta = json_get_or<double>(sm, "/sampler", "beta", 1.0);
  if (!(T > 0.0)) throw ValidationError("T must be positive at /sampler/T");
  if (!(beta > 0.0)) throw ValidationError("beta must be positive at /sampler/beta");
  s.diffusion.schedule = OUSchedule::constant(beta, T);
  s.diffusion.K = json_get_or<std::size_t>(sm, "/sampler", "K", 20);
  s.diffusion.n_samples = json_get_or<std::size_t>(sm, "/sampler", "n_samples", 1000);
  if (s.diffusion.K == 0) throw ValidationError("K must be positive at /sampler/K");
  if (s.diffusion.n_samples == 0) throw ValidationError("n_samples must be positive at /sampler/n_samples");
  const Json dc = section(cfg, "discriminator");
  s.train_samples = json_get_or<std::size_t>(dc, "/discriminator", "train_samples", 400);
  s.warm_start = json_get_or<bool>(dc, "/discriminator", "warm_start", true);
  if (s.train_samples == 0) throw ValidationError("train_samples must be positive at /discriminator/train_samples");
  return s;
}

inline OutputSet refine_1d(const Json& cfg) {
  const auto seed = require_seed(cfg);
  const auto setup = guided_setup(cfg);
  const auto run = guided_run(setup, seed);
  OutputSet out;
  out.add_csv("samples_base.csv", samples_csv(run.base, split_seed(seed, 1)));
  out.add_csv("samples_refined.csv", samples_csv(run.refined, split_seed(seed, 1)));
  out.add_json("w1_report.json",
               {{"experiment", "refine-1d"},
                {"seed", seed},
                {"generator", std::string(setup.gen.name())},
                {"K", setup.diffusion.K},
                {"T", setup.diffusion.schedule.T()},
                {"n_samples", setup.diffusion.n_samples},
                {"w1_base", run.w1_base},
                {"w1_refined", run.w1_refined},
                {"improved", run.w1_refined < run.w1_base},
                {"level_lambdas", run.lambdas},
                {"level_objectives", run.objectives},
                {"unconverged_levels", run.unconverged_levels},
                {"note", "time-indexed guidance without Feynman-Kac correction; samples are not exact draws "
                         "from the refined model"}});
  return out;
}

// ---------------------------------------------------------------- bounds

struct BoundsSetup {
  DiscreteDistribution population;
  DiscreteDistribution base;
  Generator gen = Generator::js_shifted();
  std::size_t n = 200;
  double delta = 0.05;
  std::size_t trials = 100;
  double span = 2.0;
  int sign_draws = 200;
};

inline BoundsSetup bounds_setup(const Json& cfg) {
  const Json d = section(cfg, "distributions");
  const auto pop = d.value("population", std::vector<double>{0.3, 0.2, 0.15, 0.1, 0.1, 0.05, 0.05, 0.05});
  const auto base = d.value("base", std::vector<double>{0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125});
  if (pop.size() != base.size()) throw ValidationError("population and base differ in length at /distributions");
  for (std::size_t i = 0; i < base.size(); ++i)
    if (!(base[i] > 0.0)) throw ValidationError("base weights must be positive at /distributions/base/" + std::to_string(i));
  BoundsSetup s{DiscreteDistribution::on_integers(pop), DiscreteDistribution::on_integers(base)};
  s.gen = generator_of(cfg);
  s.n = json_get_or<std::size_t>(cfg, "", "n", 200);
  s.delta = json_get_or<double>(cfg, "", "delta", 0.05);
  s.trials = json_get_or<std::size_t>(cfg, "", "trials", 100);
  s.span = json_get_or<double>(cfg, "", "span", 2.0);
  s.sign_draws = json_get_or<int>(cfg, "", "sign_draws", 200);
  if (s.n == 0) throw ValidationError("n must be positive at /n");
  if (!(s.delta > 0.0 && s.delta < 1.0)) throw ValidationError("delta must lie in (0, 1) at /delta");
  if (!(s.span > 0.0) || std::isinf(s.span)) throw ValidationError("span must be positive and finite at /span");
  if (s.sign_draws < 1) throw ValidationError("sign_draws must be at least 1 at /sign_draws");
  return s;
}

/// One trial of the known-population world: draw P_hat, refine mu against it
/// within H_B, and assemble every term. Capacity terms use the centred class
/// {|h| <= B/2}, which has the same mean differences as H_B.
inline BoundReport bound_trial(const BoundsSetup& s, std::uint64_t seed) {
  Rng rng(seed);
  const Batch sample = s.population.sample(rng, s.n);
  const auto p_hat = DiscreteDistribution::empirical(sample);
  const SpanClass cls = SpanClass::bounded(s.span);
  const auto h = optimal_h_span(p_hat, s.base, s.gen, cls);
  const double D = objective_R(h, p_hat, s.base);
  const auto refined = refine_discrete(s.base, h).refined;
  const double gain = exact_fdiv(refined, s.base, s.gen);
  const double lhs = ipm_span(s.population, refined, cls);
  const double norm_H = s.span / 2.0;
  const auto rad = rademacher_tabular(sample, norm_H, s.sign_draws, split_seed(seed, 77));
  return generalization_report(lhs, D, gain, rad.value, norm_H, s.delta, s.n);
}

inline OutputSet bounds(const Json& cfg) {
  const auto seed = require_seed(cfg);
  const auto s = bounds_setup(cfg);
  Json trials = Json::array();
  std::size_t held = 0;
  for (std::size_t t = 0; t < s.trials; ++t) {
    const auto r = bound_trial(s, split_seed(seed, t));
    held += r.holds ? 1 : 0;
    trials.push_back(to_json(r));
  }
  OutputSet out;
  out.add_json("bound_report.json",
               {{"experiment", "bounds"},
                {"seed", seed},
                {"generator", std::string(s.gen.name())},
                {"n", s.n},
                {"delta", s.delta},
                {"span", s.span},
                {"norm_H", s.span / 2.0},
                {"sign_draws", s.sign_draws},
                {"trials", trials},
                {"holds_count", held},
                {"holds_fraction", static_cast<double>(held) / static_cast<double>(std::max<std::size_t>(s.trials, 1))},
                {"slow_rate_unit_norm", slow_rate(1.0, s.delta, s.n)}});
  return out;
}

// ---------------------------------------------------------------- discriminator / discrete refinement

inline OutputSet train_discriminator(const Json& cfg) {
  const auto seed = require_seed(cfg);
  const auto s = guided_setup(cfg);
  Rng rng(split_seed(seed, 2));
  Batch xd, xb;
  for (std::size_t i = 0; i < s.train_samples; ++i) {
    xd.push_back(s.data.sample(rng));
    xb.push_back(s.base.sample(rng));
  }
  TrainConfig tc = s.train;
  tc.seed = split_seed(seed, 3);
  const auto r = train(s.gen, xd, xb, tc);
  OutputSet out;
  out.add_json("discriminator.json", discriminator_to_json(r.disc));
  out.add_json("train_report.json", {{"experiment", "train-discriminator"},
                                     {"seed", seed},
                                     {"generator", std::string(s.gen.name())},
                                     {"objective", r.objective},
                                     {"converged", r.converged},
                                     {"grad_norm", r.grad_norm},
                                     {"steps", r.steps},
                                     {"final_lr", r.final_lr},
                                     {"lambda", solve_lambda(r.disc, xb)}});
  return out;
}

inline Normalization normalization_of(const Json& cfg) {
  const auto name = json_get_or<std::string>(cfg, "", "normalization", "solve_lambda");
  if (name == "solve_lambda") return Normalization::solve_lambda;
  if (name == "rescale") return Normalization::rescale;
  throw ValidationError("normalization must be solve_lambda or rescale at /normalization");
}

/// Discrete refinement from either class probabilities eta (h = Psi(eta)) or
/// the tabular optimum against a target nu.
inline OutputSet refine_discrete_pipeline(const Json& cfg) {
  const Json d = section(cfg, "distributions");
  const Generator gen = generator_of(cfg);
  const auto mu_w = json_get<std::vector<double>>(d, "/distributions", "mu");
  const auto mu = DiscreteDistribution::on_integers(mu_w);
  TabularDiscriminator h{mu.support(), {}, gen};
  if (d.contains("eta")) {
    const auto eta = json_get<std::vector<double>>(d, "/distributions", "eta");
    if (eta.size() != mu.size()) throw ValidationError("eta and mu differ in length at /distributions/eta");
    for (std::size_t i = 0; i < eta.size(); ++i) {
      if (!(eta[i] > 0.0 && eta[i] < 1.0))
        throw ValidationError("eta must lie in (0, 1) at /distributions/eta/" + std::to_string(i));
      h.values.push_back(link(gen, eta[i]));
    }
  } else {
    const auto nu_w = json_get<std::vector<double>>(d, "/distributions", "nu");
    if (nu_w.size() != mu_w.size()) throw ValidationError("nu and mu differ in length at /distributions/nu");
    h = exact_optimal_h(DiscreteDistribution::on_integers(nu_w), mu, gen);
  }
  const auto r = refine_discrete(mu, h, normalization_of(cfg));
  OutputSet out;
  out.add_csv("refined.csv", refined_csv(mu, r));
  out.add_json("refine_report.json", {{"experiment", "refine-discrete"},
                                      {"generator", std::string(gen.name())},
                                      {"lambda", r.lambda},
                                      {"refined", r.refined.weights()},
                                      {"gain", exact_fdiv(r.refined, mu, gen)}});
  return out;
}

inline std::vector<std::string> experiment_names() {
  return {"identity-discrete", "refine-1d", "bounds", "train-discriminator", "refine-discrete"};
}

inline OutputSet run(const Json& cfg) {
  if (!cfg.is_object()) throw ValidationError("config must be a JSON object at /");
  const auto name = json_get<std::string>(cfg, "", "experiment");
  if (name == "identity-discrete") return identity_discrete(cfg);
  if (name == "refine-1d") return refine_1d(cfg);
  if (name == "bounds") return bounds(cfg);
  if (name == "train-discriminator") return train_discriminator(cfg);
  if (name == "refine-discrete") return refine_discrete_pipeline(cfg);
  throw ValidationError("unknown experiment '" + name + "' at /experiment");
}

// ---------------------------------------------------------------- verify suites

struct Check {
  std::string name;
  bool passed;
  double value;
  double threshold;
};

inline Json to_json(const Check& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}};
}

inline Check at_most(std::string name, double value, double threshold) {
  return {std::move(name), value <= threshold, value, threshold};
}

inline Check at_least(std::string name, double value, double threshold) {
  return {std::move(name), value >= threshold, value, threshold};
}

inline const std::vector<Generator>& all_generators() {
  static const std::vector<Generator> g{Generator::kl(), Generator::reverse_kl(), Generator::js_shifted()};
  return g;
}

inline std::vector<Check> verify_core() {
  std::vector<Check> out;
  double fy = 0.0, conj = 0.0, deriv = 0.0, bayes = 0.0, prop = 0.0, roundtrip = 0.0;
  for (const Generator g : all_generators()) {
    for (int i = 0; i < 50; ++i) {
      const double t = std::pow(10.0, -3.0 + 5.0 * i / 49.0);
      fy = std::max(fy, std::abs(g.f(t) + g.conjugate(g.f_prime(t)) - t * g.f_prime(t)));
      const double s = g.f_prime(t);
      conj = std::max(conj, std::abs(conjugate_numeric(g, s) - g.conjugate(s)));
      const double e = 1e-6 * std::max(1.0, std::abs(s));
      const double fd = (g.conjugate(s + e) - g.conjugate(s - e)) / (2.0 * e);
      deriv = std::max(deriv, detail::relative_error(fd, g.f_prime_inv(s)));
    }
    for (int k = 1; k <= 9; ++k) {
      const double eta = 0.1 * k;
      double best_t = 0.0, best = kInf;
      for (int j = 1; j < 1000; ++j) {
        const double t = j * 1e-3;
        if (const double v = pointwise_loss(g, eta, t); v < best) {
          best = v;
          best_t = t;
        }
      }
      prop = std::max(prop, std::abs(best_t - eta) / 1e-3);
      const double t_star = detail::golden_section_max(
          [&](double t) { return -pointwise_loss(g, eta, t); }, std::max(best_t - 1e-3, 1e-9),
          std::min(best_t + 1e-3, 1.0 - 1e-9), 1e-12, 400);
      bayes = std::max(bayes, std::abs(pointwise_loss(g, eta, t_star) - bayes_pointwise_loss(g, eta)));
    }
    for (int k = 1; k < 100; ++k) {
      const double eta = k / 100.0;
      roundtrip = std::max(roundtrip, std::abs(inverse_link(g, link(g, eta)) - eta));
    }
  }
  out.push_back(at_most("fenchel_young_max_error", fy, 1e-10));
  out.push_back(at_most("conjugate_numeric_vs_closed_form", conj, 1e-6));
  out.push_back(at_most("conjugate_derivative_is_inverse_fprime", deriv, 1e-6));
  out.push_back(at_most("properness_argmin_in_grid_steps", prop, 1.0));
  out.push_back(at_most("bayes_loss_vs_infimum", bayes, 1e-6));
  out.push_back(at_most("link_round_trip", roundtrip, 1e-12));
  const Generator js = Generator::js_shifted();
  out.push_back(at_most("js_f0_equals_2log2", std::abs(js.f(0.0) - 2.0 * kLn2), 0.0));
  double shifted = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double eta = k / 100.0;
    auto corrected = [&](double e) { return bayes_pointwise_loss(js, e) + 2.0 * (1.0 - e) * kLn2; };
    shifted = std::max(shifted, std::abs(corrected(eta) - corrected(1.0 - eta)));
  }
  out.push_back(at_most("js_bayes_loss_symmetry_after_affine_shift", shifted, 1e-12));
  return out;
}

inline std::vector<Check> verify_identity(std::uint64_t seed = 2024) {
  std::vector<Check> out;
  double residual = 0.0, tv = 0.0, lam = 0.0;
  const auto classes = std::vector<SpanClass>{SpanClass::constants(), SpanClass::bounded(0.5),
                                              SpanClass::bounded(2.0), SpanClass::rich()};
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng(split_seed(seed, i));
    const auto [nu, mu] = random_instance(rng, 2 + i % 3);
    const Generator g = all_generators()[i % 3];
    residual = std::max(residual, identity_terms(nu, mu, g, classes[(i / 3) % classes.size()]).residual);
    const auto r = refine_discrete(mu, exact_optimal_h(nu, mu, g));
    tv = std::max(tv, total_variation(nu, r.refined));
    lam = std::max(lam, std::abs(r.lambda));
  }
  out.push_back(at_most("identity_residual", residual, 1e-9));
  out.push_back(at_most("rich_refinement_tv_to_target", tv, 1e-10));
  out.push_back(at_most("lambda_at_tabular_optimum", lam, 1e-10));
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    Rng rng(split_seed(seed ^ 0xd0a1, i));
    const auto [nu, mu] = random_instance(rng, 3);
    const auto r = dual_grid_min(nu, mu, all_generators()[i % 3], SpanClass::bounded(0.5 * (i % 3)));
    worst_gap = std::max(worst_gap, std::abs(r.gap));
  }
  out.push_back(at_most("dual_grid_gap", worst_gap, 2.0 / 200.0));
  return out;
}

inline std::vector<Check> verify_bounds(std::uint64_t seed = 2024) {
  std::vector<Check> out;
  out.push_back(at_most("slow_rate_formula", std::abs(slow_rate(1.0, 0.05, 200) - 2.0 * std::sqrt(std::log(20.0) / 400.0)),
                        1e-15));
  BoundsSetup s = bounds_setup(Json::object());
  std::size_t held = 0;
  for (std::size_t t = 0; t < s.trials; ++t) held += bound_trial(s, split_seed(seed, t)).holds ? 1 : 0;
  out.push_back(at_least("generalization_bound_holds", static_cast<double>(held), 95.0));
  int js_fail = 0, lemma_fail = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    Rng rng(split_seed(seed ^ 0x1e33, i));
    const auto [nu, mu] = random_instance(rng, 2 + i % 7);
    js_fail += js_kl_lemma_check(nu, mu).holds ? 0 : 1;
    for (const Generator g : all_generators()) lemma_fail += fdiv_kl_lemma_check(nu, mu, g).holds ? 0 : 1;
  }
  out.push_back(at_most("js_below_kl_failures", js_fail, 0.0));
  out.push_back(at_most("fdiv_kl_lemma_failures", lemma_fail, 0.0));
  out.push_back(at_most("convergence_bound_at_zero", std::abs(convergence_bound({})), 0.0));
  int monotone_fail = 0;
  Rng rng(split_seed(seed, 999));
  for (int i = 0; i < 100; ++i) {
    ConvergenceBoundInputs a{rng.uniform(), rng.uniform(), rng.uniform(), 1 + static_cast<std::size_t>(rng.uniform() * 3),
                             0.5 + 2.0 * rng.uniform(), 1 + static_cast<std::size_t>(rng.uniform() * 50), 1.0, rng.uniform()};
    auto b = a;
    b.eps_theta += rng.uniform();
    b.L += rng.uniform();
    b.m2 += rng.uniform();
    monotone_fail += convergence_bound(b) >= convergence_bound(a) ? 0 : 1;
  }
  out.push_back(at_most("convergence_bound_monotonicity_failures", monotone_fail, 0.0));
  double ou = 0.0;
  const auto sched = OUSchedule::constant(1.0, 5.0);
  for (int i = 0; i <= 20; ++i) {
    const auto [m, sg] = ou_params(sched, 5.0 * i / 20.0);
    ou = std::max(ou, std::abs(m * m + sg * sg - 1.0));
  }
  out.push_back(at_most("ou_m2_plus_sigma2_minus_1", ou, 1e-10));
  return out;
}

inline std::vector<Check> verify_samplers(std::uint64_t seed = 2024) {
  std::vector<Check> out;
  LangevinConfig lc;
  lc.step_size = 1e-3;
  lc.n_steps = 5000;
  lc.n_chains = 10000;
  lc.seed = seed;
  const auto xs = first_coordinates(langevin([](const Point& x) { return Point{-x[0]}; }, lc));
  const double m = detail::mean(xs);
  double var = 0.0;
  for (double x : xs) var += (x - m) * (x - m);
  var /= static_cast<double>(xs.size() - 1);
  out.push_back(at_most("ula_mean_in_standard_errors", std::abs(m) / detail::standard_error(xs), 3.0));
  out.push_back(at_most("ula_variance_relative_error", std::abs(var - 1.0), 0.05));

  ReverseDiffusionConfig rc;
  rc.K = 20;
  rc.n_samples = 200;
  rc.seed = seed;
  const auto score = noised_mixture_score(GaussianMixture::standard_normal(1), rc);
  std::vector<Discriminator> constant;
  for (std::size_t k = 0; k < rc.K; ++k)
    constant.emplace_back(Mlp(1, {4, 4}), Generator::js_shifted(), 0.0);
  out.push_back(at_most("constant_guidance_changes_trajectories", reverse_em(score, rc) == reverse_em(score, rc, &constant) ? 0.0 : 1.0, 0.0));
  out.push_back(at_most("w1_shift_example", std::abs(w1_1d(std::vector<double>{0, 0}, std::vector<double>{1, 1}) - 1.0), 0.0));
  out.push_back(at_most("langevin_determinism", langevin([](const Point& x) { return Point{-x[0]}; },
                                                         {1e-2, 100, 50, 1, std::nullopt, seed}) ==
                                                        langevin([](const Point& x) { return Point{-x[0]}; },
                                                                 {1e-2, 100, 50, 1, std::nullopt, seed})
                                                    ? 0.0
                                                    : 1.0,
                        0.0));
  return out;
}

inline std::vector<std::string> suite_names() { return {"core", "identity", "bounds", "samplers", "all"}; }

/// Runs a suite; returns the machine-readable summary (with "passed").
inline Json verify(const std::string& suite) {
  std::vector<std::pair<std::string, std::vector<Check>>> parts;
  const bool all = suite == "all";
  if (all || suite == "core") parts.emplace_back("core", verify_core());
  if (all || suite == "identity") parts.emplace_back("identity", verify_identity());
  if (all || suite == "bounds") parts.emplace_back("bounds", verify_bounds());
  if (all || suite == "samplers") parts.emplace_back("samplers", verify_samplers());
  if (parts.empty()) throw ValidationError("unknown suite '" + suite + "' (core, identity, bounds, samplers, all)");
  Json summary = {{"suite", suite}, {"suites", Json::object()}};
  bool passed = true;
  for (const auto& [name, checks] : parts) {
    Json arr = Json::array();
    for (const auto& c : checks) {
      arr.push_back(to_json(c));
      passed = passed && c.passed;
    }
    summary["suites"][name] = arr;
  }
  summary["passed"] = passed;
  return summary;
}

}  // namespace experiments
}  // namespace season

#endif  // SEASON_EXPERIMENTS_HPP
