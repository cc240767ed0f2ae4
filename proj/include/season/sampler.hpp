#ifndef SEASON_SAMPLER_HPP
#define SEASON_SAMPLER_HPP

#include <optional>

#include "season/discriminator.hpp"
#include "season/gaussian_mixture.hpp"
#include "season/ou.hpp"

namespace season {

using ScoreField = std::function<Point(const Point&)>;
/// Score at reverse step k (forward time T - tau_k).
using LevelScore = std::function<Point(const Point&, std::size_t)>;

inline constexpr double kDivergenceRadius = 1e6;

/// Seed of chain i; every chain owns an independent stream.
inline std::uint64_t chain_seed(std::uint64_t seed, std::size_t chain) { return split_seed(seed, chain); }

struct LangevinConfig {
  double step_size = 1e-3;
  int n_steps = 1000;
  std::size_t n_chains = 1000;
  std::size_t dim = 1;
  std::optional<Batch> init;  ///< explicit starting points; standard normal prior otherwise
  std::uint64_t seed = 0;
};

namespace detail {

inline double norm(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline void guard_divergence(const char* who, const Point& x, std::size_t chain, long step) {
  if (!(norm(x) <= kDivergenceRadius))
    throw NumericError(std::string(who) + ": chain " + std::to_string(chain) + " diverged at step " +
                       std::to_string(step));
}

}  // namespace detail

/// Unadjusted Langevin: x <- x + step score(x) + sqrt(2 step) z.
inline Batch langevin(const ScoreField& score, const LangevinConfig& cfg) {
  if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size))
    throw ValidationError("langevin: step_size must be positive and finite");
  if (cfg.n_steps < 0) throw ValidationError("langevin: n_steps must be nonnegative");
  const std::size_t chains = cfg.init ? cfg.init->size() : cfg.n_chains;
  if (chains == 0) throw ValidationError("langevin: need at least one chain");
  if (cfg.init && cfg.n_steps == 0) return *cfg.init;

  const double noise = std::sqrt(2.0 * cfg.step_size);
  Batch out;
  out.reserve(chains);
  for (std::size_t c = 0; c < chains; ++c) {
    Rng rng(chain_seed(cfg.seed, c));
    Point x = cfg.init ? (*cfg.init)[c] : rng.normal_vector(cfg.dim);
    for (int k = 0; k < cfg.n_steps; ++k) {
      const Point g = score(x);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += cfg.step_size * g[i] + noise * rng.normal();
      detail::guard_divergence("langevin", x, c, k);
    }
    out.push_back(std::move(x));
  }
  return out;
}

struct ReverseDiffusionConfig {
  OUSchedule schedule = OUSchedule::constant(1.0, 3.0);
  std::size_t K = 200;
  std::size_t n_samples = 1000;
  std::size_t dim = 1;
  std::uint64_t seed = 0;

  double step() const { return schedule.T() / static_cast<double>(K); }
  double tau(std::size_t k) const { return schedule.T() * static_cast<double>(k) / static_cast<double>(K); }
  /// Forward time at which the score of reverse step k is evaluated.
  double forward_time(std::size_t k) const { return schedule.T() - tau(k); }
};

/// Exact score of a Gaussian mixture pushed through the OU forward process to
/// time T - tau_k, as a per-level score handle.
inline LevelScore noised_mixture_score(const GaussianMixture& data, const ReverseDiffusionConfig& cfg) {
  auto levels = std::make_shared<std::vector<GaussianMixture>>();
  levels->reserve(cfg.K);
  for (std::size_t k = 0; k < cfg.K; ++k) {
    const auto [m, sigma] = ou_params(cfg.schedule, cfg.forward_time(k));
    levels->push_back(data.noised(m, sigma));
  }
  return [levels](const Point& x, std::size_t k) { return (*levels)[k].score(x); };
}

/// Euler-Maruyama discretisation of the reverse OU SDE started from the
/// standard normal prior, on the uniform grid tau_k = kT/K:
///
///   Y <- Y + s beta (Y + 2 (score(Y, k) + guidance_k(Y))) + sqrt(2 beta s) z
///
/// with beta evaluated at forward time T - tau_k and, when discriminators are
/// given, guidance_k = (log f'^{-1})'(h_k(Y) - lambda_k) grad h_k(Y), h_k =
/// discs[k] being the discriminator of level tau_{k+1}. lambdas defaults to 0.
inline Batch reverse_em(const LevelScore& base_score, const ReverseDiffusionConfig& cfg,
                        const std::vector<Discriminator>* discs = nullptr,
                        const std::vector<double>* lambdas = nullptr) {
  if (cfg.K == 0) throw ValidationError("reverse_em: K must be positive");
  if (lambdas && (!discs || lambdas->size() != cfg.K))
    throw ValidationError("reverse_em: level misalignment, normalisers do not match the discriminators");
  if (discs) {
    if (discs->size() != cfg.K)
      throw ValidationError("reverse_em: level misalignment, " + std::to_string(discs->size()) +
                            " discriminators for K = " + std::to_string(cfg.K) + " levels");
    for (std::size_t k = 0; k < cfg.K; ++k)
      if ((*discs)[k].dim() != cfg.dim)
        throw ValidationError("reverse_em: discriminator " + std::to_string(k) + " has wrong dimension");
  }
  const double s = cfg.step();
  std::vector<double> beta(cfg.K);
  for (std::size_t k = 0; k < cfg.K; ++k) beta[k] = cfg.schedule.beta(cfg.forward_time(k));

  Batch out;
  out.reserve(cfg.n_samples);
  for (std::size_t c = 0; c < cfg.n_samples; ++c) {
    Rng rng(chain_seed(cfg.seed, c));
    Point y = rng.normal_vector(cfg.dim);
    for (std::size_t k = 0; k < cfg.K; ++k) {
      Point drift = base_score(y, k);
      if (discs) {
        const Discriminator& d = (*discs)[k];
        const Generator gen = d.generator();
        const double h = d.h(y) - (lambdas ? (*lambdas)[k] : 0.0);
        if (!gen.in_conjugate_domain(h))
          throw DomainError("reverse_em: guidance h = " + std::to_string(h) + " outside the range of f' at level " +
                            std::to_string(k));
        const double mult = gen.log_f_prime_inv_deriv(h);
        const Point gh = input_grad(d, y);
        for (std::size_t i = 0; i < drift.size(); ++i) drift[i] += mult * gh[i];
      }
      const double noise = std::sqrt(2.0 * beta[k] * s);
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += s * beta[k] * (y[i] + 2.0 * drift[i]) + noise * rng.normal();
      detail::guard_divergence("reverse_em", y, c, static_cast<long>(k));
    }
    out.push_back(std::move(y));
  }
  return out;
}

inline std::vector<double> first_coordinates(const Batch& b) {
  std::vector<double> v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].size() != 1) throw ValidationError("expected a 1D batch");
    v[i] = b[i][0];
  }
  return v;
}

/// 1-Wasserstein distance of two equal-size 1D samples (sorted matching).
inline double w1_1d(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) throw ValidationError("w1_1d: sample sizes differ");
  if (a.empty()) throw ValidationError("w1_1d: empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

inline double w1_1d(const Batch& a, const Batch& b) {
  if (a.size() != b.size()) throw ValidationError("w1_1d: sample sizes differ");
  return w1_1d(first_coordinates(a), first_coordinates(b));
}

/// Kolmogorov-Smirnov statistic of a 1D sample against a CDF.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace season

#endif  // SEASON_SAMPLER_HPP
