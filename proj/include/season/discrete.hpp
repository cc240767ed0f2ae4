#ifndef SEASON_DISCRETE_HPP
#define SEASON_DISCRETE_HPP

#include <map>
#include <string>

#include "season/common.hpp"
#include "season/random.hpp"

namespace season {

/// Finite distribution: distinct support points in R^d with probability weights.
class DiscreteDistribution {
 public:
  static constexpr double kWeightTolerance = 1e-12;

  DiscreteDistribution(Batch support, std::vector<double> weights)
      : support_(std::move(support)), weights_(std::move(weights)) {
    if (support_.empty()) throw ValidationError("discrete distribution needs a nonempty support");
    if (support_.size() != weights_.size())
      throw ValidationError("discrete distribution: support and weights differ in length");
    const std::size_t d = support_.front().size();
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (support_[i].size() != d) throw ValidationError("discrete distribution: mixed dimensions");
      if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
        throw ValidationError("discrete distribution: negative or non-finite weight");
      total += weights_[i];
    }
    if (std::abs(total - 1.0) > kWeightTolerance)
      throw ValidationError("discrete distribution: weights sum to " + std::to_string(total));
    for (std::size_t i = 0; i < support_.size(); ++i)
      for (std::size_t j = i + 1; j < support_.size(); ++j)
        if (support_[i] == support_[j])
          throw ValidationError("discrete distribution: repeated support point");
  }

  /// Rescales nonnegative weights to sum to one.
  static DiscreteDistribution normalized(Batch support, std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw ValidationError("discrete distribution: total mass is zero");
    for (double& w : weights) w /= total;
    return DiscreteDistribution(std::move(support), std::move(weights));
  }

  /// Distribution on the integers 0..k-1 (as 1D points).
  static DiscreteDistribution on_integers(std::vector<double> weights) {
    Batch support;
    for (std::size_t i = 0; i < weights.size(); ++i) support.push_back({static_cast<double>(i)});
    return normalized(std::move(support), std::move(weights));
  }

  /// Empirical distribution of a batch; repeated points are merged.
  static DiscreteDistribution empirical(const Batch& samples) {
    std::map<Point, double> counts;
    for (const auto& x : samples) counts[x] += 1.0;
    Batch support;
    std::vector<double> w;
    for (const auto& [x, c] : counts) {
      support.push_back(x);
      w.push_back(c);
    }
    return normalized(std::move(support), std::move(w));
  }

  std::size_t size() const { return support_.size(); }
  std::size_t dim() const { return support_.front().size(); }
  const Batch& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  const Point& point(std::size_t i) const { return support_[i]; }

  /// Index of x in the support, or size() when absent.
  std::size_t index_of(const Point& x) const {
    for (std::size_t i = 0; i < support_.size(); ++i)
      if (support_[i] == x) return i;
    return support_.size();
  }

  std::size_t sample_index(Rng& rng) const { return rng.categorical(weights_); }

  Batch sample(Rng& rng, std::size_t n) const {
    Batch out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(support_[sample_index(rng)]);
    return out;
  }

  /// Same support, new weights.
  DiscreteDistribution reweighted(std::vector<double> weights) const {
    return normalized(support_, std::move(weights));
  }

 private:
  Batch support_;
  std::vector<double> weights_;
};

/// Weights of nu laid out along mu's support. Throws DomainError when nu puts
/// mass outside mu's support.
inline std::vector<double> aligned_weights(const DiscreteDistribution& nu,
                                           const DiscreteDistribution& mu) {
  std::vector<double> out(mu.size(), 0.0);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu.weight(i) == 0.0) continue;
    const std::size_t j = mu.index_of(nu.point(i));
    if (j == mu.size())
      throw DomainError("absolute continuity violated: nu has mass off mu's support");
    out[j] = nu.weight(i);
  }
  return out;
}

/// Per-point density ratio dnu/dmu on mu's support (0 where nu is absent).
inline std::vector<double> discrete_ratio(const DiscreteDistribution& nu,
                                          const DiscreteDistribution& mu) {
  auto w = aligned_weights(nu, mu);
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (mu.weight(j) == 0.0) {
      if (w[j] > 0.0) throw DomainError("absolute continuity violated: mu has zero weight where nu does not");
      w[j] = 0.0;
    } else {
      w[j] /= mu.weight(j);
    }
  }
  return w;
}

/// Total variation (1/2) sum |p_i - q_i| of two aligned weight vectors.
inline double total_variation(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline double total_variation(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const auto pw = aligned_weights(p, q);
  return total_variation(pw, q.weights());
}

/// Dirichlet(alpha, ..., alpha) draw of length k.
inline std::vector<double> dirichlet(Rng& rng, std::size_t k, double alpha = 1.0) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    if (alpha == 1.0) {
      x = -std::log(rng.uniform_open());
    } else {
      // Marsaglia-Tsang for alpha >= 1, boosted for alpha < 1.
      const double a = alpha < 1.0 ? alpha + 1.0 : alpha;
      const double d = a - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
      double v;
      for (;;) {
        double z;
        do {
          z = rng.normal();
          v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) break;
      }
      x = d * v;
      if (alpha < 1.0) x *= std::pow(rng.uniform_open(), 1.0 / alpha);
    }
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace season

#endif  // SEASON_DISCRETE_HPP
