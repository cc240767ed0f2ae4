#ifndef SEASON_REFINE_HPP
#define SEASON_REFINE_HPP

#include <sstream>

#include "season/discriminator.hpp"
#include "season/gaussian_mixture.hpp"

namespace season {

/// lambda with sum_i w_i f'^{-1}(h_i - lambda) = 1.
///
/// The left side is decreasing in lambda, so the root is bracketed by
/// geometric expansion (at most 200 doublings / halvings per side) and then
/// bisected until the bracket stops shrinking. Entries with h_i = -inf carry
/// zero ratio.
inline double solve_lambda(Generator gen, std::span<const double> h, std::span<const double> w) {
  if (h.size() != w.size() || h.empty()) throw ValidationError("solve_lambda: size mismatch");
  double h_max = -kInf;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (w[i] > 0.0) h_max = std::max(h_max, h[i]);
  if (!std::isfinite(h_max))
    throw NumericError("solve_lambda: every weighted value is -inf; expectation is identically 0");

  auto expectation = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
      if (w[i] > 0.0 && h[i] != -kInf) s += w[i] * gen.f_prime_inv(h[i] - lambda);
    return s;
  };
  auto excess = [&](double lambda) { return expectation(lambda) - 1.0; };

  // Smallest admissible lambda: h_max - lambda must stay below sup dom f*.
  const double floor = h_max - gen.conjugate_upper();
  double lo, hi;
  constexpr int kMaxExpansions = 200;
  if (std::isfinite(floor)) {
    double gap = 1.0;
    int k = 0;
    for (; k < kMaxExpansions && !(excess(floor + gap) > 0.0); ++k) gap *= 0.5;
    if (k == kMaxExpansions)
      throw NumericError("solve_lambda: could not bracket from below (expectation never reaches 1)");
    lo = floor + gap;
  } else {
    double step = 1.0;
    int k = 0;
    for (lo = h_max - step; k < kMaxExpansions && !(excess(lo) > 0.0); ++k) {
      step *= 2.0;
      lo = h_max - step;
    }
    if (k == kMaxExpansions)
      throw NumericError("solve_lambda: could not bracket from below (expectation never reaches 1)");
  }
  {
    double step = 1.0;
    int k = 0;
    for (hi = lo + step; k < kMaxExpansions && !(excess(hi) < 0.0); ++k) {
      step *= 2.0;
      hi = lo + step;
    }
    if (k == kMaxExpansions)
      throw NumericError("solve_lambda: could not bracket from above (expectation never drops below 1)");
  }
  return detail::bisect_decreasing(excess, lo, hi);
}

inline std::vector<double> tabular_values_on(const TabularDiscriminator& disc,
                                             const DiscreteDistribution& mu) {
  std::vector<double> h(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) h[i] = disc.h(mu.point(i));
  return h;
}

inline std::vector<double> net_values_on(const Discriminator& disc, const Batch& pts) {
  std::vector<double> h(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) h[i] = disc.h(pts[i]);
  return h;
}

inline double solve_lambda(const TabularDiscriminator& disc, const DiscreteDistribution& mu) {
  return solve_lambda(disc.gen, tabular_values_on(disc, mu), mu.weights());
}

inline double solve_lambda(const Discriminator& disc, const DiscreteDistribution& mu) {
  return solve_lambda(disc.generator(), net_values_on(disc, mu.support()), mu.weights());
}

/// Monte-Carlo version: expectation under mu replaced by the sample mean.
inline double solve_lambda(const Discriminator& disc, const Batch& mu_samples) {
  const std::vector<double> w(mu_samples.size(), 1.0 / static_cast<double>(mu_samples.size()));
  return solve_lambda(disc.generator(), net_values_on(disc, mu_samples), w);
}

/// How refined discrete weights are normalised.
///  - solve_lambda: mu_i f'^{-1}(h_i - lambda) with lambda from solve_lambda.
///  - rescale: mu_i f'^{-1}(h_i), divided by its total.
/// Both agree whenever lambda = 0, e.g. at an optimum of a class closed
/// under additive constants.
enum class Normalization { solve_lambda, rescale };

struct RefinedDiscrete {
  DiscreteDistribution refined;
  std::vector<double> ratio;  ///< dmu^H/dmu per support point
  double lambda;
};

inline RefinedDiscrete refine_discrete_values(const DiscreteDistribution& mu, Generator gen,
                                              std::span<const double> h,
                                              Normalization norm = Normalization::solve_lambda) {
  const double lambda = norm == Normalization::solve_lambda ? solve_lambda(gen, h, mu.weights()) : 0.0;
  std::vector<double> ratio(mu.size()), w(mu.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    ratio[i] = gen.f_prime_inv(h[i] - lambda);
    w[i] = mu.weight(i) * ratio[i];
    total += w[i];
  }
  if (!(total > 0.0)) throw NumericError("refine_discrete: every refined weight is zero");
  for (auto& r : ratio) r /= total;
  for (auto& x : w) x /= total;
  return {DiscreteDistribution(mu.support(), std::move(w)), std::move(ratio), lambda};
}

inline RefinedDiscrete refine_discrete(const DiscreteDistribution& mu, const TabularDiscriminator& disc,
                                       Normalization norm = Normalization::solve_lambda) {
  return refine_discrete_values(mu, disc.gen, tabular_values_on(disc, mu), norm);
}

inline RefinedDiscrete refine_discrete(const DiscreteDistribution& mu, const Discriminator& disc,
                                       Normalization norm = Normalization::solve_lambda) {
  return refine_discrete_values(mu, disc.generator(), net_values_on(disc, mu.support()), norm);
}

namespace detail {

inline std::string describe_point(const Point& x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

inline double shifted_h_checked(const Discriminator& disc, const Point& x, double lambda) {
  const double s = disc.h(x) - lambda;
  if (!disc.generator().in_conjugate_domain(s))
    throw DomainError("refined model: h - lambda = " + std::to_string(s) +
                      " at the boundary of the range of f' at x = " + describe_point(x));
  return s;
}

}  // namespace detail

/// grad log mu^H(x) = base_score(x) + (log f'^{-1})'(h(x) - lambda) grad h(x).
inline Point refined_score(const std::function<Point(const Point&)>& base_score,
                           const Discriminator& disc, const Point& x, double lambda = 0.0) {
  const double s = detail::shifted_h_checked(disc, x, lambda);
  const double mult = disc.generator().log_f_prime_inv_deriv(s);
  Point g = base_score(x);
  const Point gh = input_grad(disc, x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += mult * gh[i];
  return g;
}

/// mu(x) f'^{-1}(h(x) - lambda).
inline double refined_density_unnormalized(const ContinuousModel& base, const Discriminator& disc,
                                           const Point& x, double lambda = 0.0) {
  const double s = detail::shifted_h_checked(disc, x, lambda);
  return std::exp(base.log_density(x)) * disc.generator().f_prime_inv(s);
}

/// Refined continuous model mu^H exposed as a score field and an
/// unnormalised density. lambda is solved on a sample from mu at construction.
class RefinedModel {
 public:
  RefinedModel(ContinuousModel base, Discriminator disc, const Batch& mu_samples)
      : base_(std::move(base)), disc_(std::move(disc)) {
    lambda_ = solve_lambda(disc_, mu_samples);
    std::vector<double> r(mu_samples.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] = disc_.generator().f_prime_inv(disc_.h(mu_samples[i]) - lambda_);
    normalization_mean_ = detail::mean(r);
    normalization_se_ = detail::standard_error(r);
  }

  double lambda() const { return lambda_; }
  /// Sample mean of f'^{-1}(h - lambda) at construction (1 up to bisection accuracy).
  double normalization_mean() const { return normalization_mean_; }
  /// Its Monte-Carlo standard error, the recorded normalisation tolerance.
  double normalization_se() const { return normalization_se_; }
  const Discriminator& discriminator() const { return disc_; }
  const ContinuousModel& base() const { return base_; }

  Point score(const Point& x) const { return refined_score(base_.score, disc_, x, lambda_); }

  double density_unnormalized(const Point& x) const {
    return refined_density_unnormalized(base_, disc_, x, lambda_);
  }

  std::function<Point(const Point&)> score_field() const {
    return [this](const Point& x) { return score(x); };
  }

 private:
  ContinuousModel base_;
  Discriminator disc_;
  double lambda_ = 0.0;
  double normalization_mean_ = 1.0;
  double normalization_se_ = 0.0;
};

}  // namespace season

#endif  // SEASON_REFINE_HPP
