#ifndef SEASON_GAUSSIAN_MIXTURE_HPP
#define SEASON_GAUSSIAN_MIXTURE_HPP

#include <memory>

#include "season/common.hpp"
#include "season/random.hpp"

namespace season {

/// Density / score / sampler handle for a toy distribution on R^d.
struct ContinuousModel {
  std::function<double(const Point&)> log_density;
  std::function<Point(const Point&)> score;
  std::function<Point(Rng&)> sampler;
  std::size_t dim = 1;

  Batch sample(Rng& rng, std::size_t n) const {
    Batch out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sampler(rng));
    return out;
  }
};

/// Finite Gaussian mixture with full covariances. Small d only: covariances
/// are factorised once with a dense Cholesky.
class GaussianMixture {
 public:
  GaussianMixture(Batch means, std::vector<std::vector<double>> covs, std::vector<double> weights)
      : means_(std::move(means)), covs_(std::move(covs)), weights_(std::move(weights)) {
    if (means_.empty()) throw ValidationError("gaussian mixture needs at least one component");
    if (means_.size() != covs_.size() || means_.size() != weights_.size())
      throw ValidationError("gaussian mixture: means, covs and weights differ in length");
    dim_ = means_.front().size();
    double total = 0.0;
    for (std::size_t k = 0; k < means_.size(); ++k) {
      if (means_[k].size() != dim_) throw ValidationError("gaussian mixture: mean dimension mismatch");
      if (covs_[k].size() != dim_ * dim_)
        throw ValidationError("gaussian mixture: covariance must be d*d row-major");
      if (!(weights_[k] >= 0.0)) throw ValidationError("gaussian mixture: negative weight");
      total += weights_[k];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("gaussian mixture: weights must sum to 1");
    for (std::size_t k = 0; k < means_.size(); ++k) {
      for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < i; ++j)
          if (std::abs(covs_[k][i * dim_ + j] - covs_[k][j * dim_ + i]) > 1e-12)
            throw ValidationError("gaussian mixture: covariance not symmetric");
      chol_.push_back(cholesky(covs_[k]));
      double logdet = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) logdet += 2.0 * std::log(chol_.back()[i * dim_ + i]);
      log_norm_.push_back(-0.5 * (static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi) + logdet));
      log_weights_.push_back(std::log(weights_[k]));
    }
  }

  /// Diagonal / isotropic convenience: vars[k] is the per-axis variance vector.
  static GaussianMixture diagonal(Batch means, const std::vector<std::vector<double>>& vars,
                                  std::vector<double> weights) {
    std::vector<std::vector<double>> covs;
    for (const auto& v : vars) {
      std::vector<double> c(v.size() * v.size(), 0.0);
      for (std::size_t i = 0; i < v.size(); ++i) c[i * v.size() + i] = v[i];
      covs.push_back(std::move(c));
    }
    return GaussianMixture(std::move(means), std::move(covs), std::move(weights));
  }

  static GaussianMixture standard_normal(std::size_t d) {
    return diagonal({Point(d, 0.0)}, {std::vector<double>(d, 1.0)}, {1.0});
  }

  std::size_t dim() const { return dim_; }
  std::size_t components() const { return means_.size(); }
  const Batch& means() const { return means_; }
  const std::vector<std::vector<double>>& covs() const { return covs_; }
  const std::vector<double>& weights() const { return weights_; }

  double log_density(const Point& x) const {
    check_dim(x);
    std::vector<double> terms(components());
    for (std::size_t k = 0; k < components(); ++k) terms[k] = log_weights_[k] + component_log_pdf(k, x);
    return detail::log_sum_exp(terms);
  }

  double density(const Point& x) const { return std::exp(log_density(x)); }

  Point score(const Point& x) const {
    check_dim(x);
    std::vector<double> terms(components());
    for (std::size_t k = 0; k < components(); ++k) terms[k] = log_weights_[k] + component_log_pdf(k, x);
    const double lse = detail::log_sum_exp(terms);
    Point g(dim_, 0.0);
    for (std::size_t k = 0; k < components(); ++k) {
      const double resp = std::exp(terms[k] - lse);
      if (resp == 0.0) continue;
      Point diff(dim_);
      for (std::size_t i = 0; i < dim_; ++i) diff[i] = x[i] - means_[k][i];
      const Point p = solve(k, diff);
      for (std::size_t i = 0; i < dim_; ++i) g[i] -= resp * p[i];
    }
    return g;
  }

  Point sample(Rng& rng) const {
    const std::size_t k = rng.categorical(weights_);
    const Point z = rng.normal_vector(dim_);
    Point x = means_[k];
    const auto& L = chol_[k];
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j <= i; ++j) x[i] += L[i * dim_ + j] * z[j];
    return x;
  }

  /// Law of m X + sigma Z for X from this mixture and independent Z ~ N(0, I).
  GaussianMixture noised(double m, double sigma) const {
    Batch means = means_;
    for (auto& mu : means)
      for (auto& v : mu) v *= m;
    auto covs = covs_;
    for (auto& c : covs) {
      for (auto& v : c) v *= m * m;
      for (std::size_t i = 0; i < dim_; ++i) c[i * dim_ + i] += sigma * sigma;
    }
    return GaussianMixture(std::move(means), std::move(covs), weights_);
  }

  /// Mixture mean and covariance (row-major).
  std::pair<Point, std::vector<double>> moments() const {
    Point mean(dim_, 0.0);
    for (std::size_t k = 0; k < components(); ++k)
      for (std::size_t i = 0; i < dim_; ++i) mean[i] += weights_[k] * means_[k][i];
    std::vector<double> cov(dim_ * dim_, 0.0);
    for (std::size_t k = 0; k < components(); ++k)
      for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
          cov[i * dim_ + j] += weights_[k] * (covs_[k][i * dim_ + j] +
                                              (means_[k][i] - mean[i]) * (means_[k][j] - mean[j]));
    return {mean, cov};
  }

  /// CDF of a 1D mixture.
  double cdf(double x) const {
    if (dim_ != 1) throw ValidationError("cdf is defined for 1D mixtures only");
    double c = 0.0;
    for (std::size_t k = 0; k < components(); ++k)
      c += weights_[k] * 0.5 * std::erfc(-(x - means_[k][0]) / (std::sqrt(2.0 * covs_[k][0])));
    return c;
  }

  ContinuousModel model() const {
    auto self = std::make_shared<const GaussianMixture>(*this);
    ContinuousModel m;
    m.dim = dim_;
    m.log_density = [self](const Point& x) { return self->log_density(x); };
    m.score = [self](const Point& x) { return self->score(x); };
    m.sampler = [self](Rng& rng) { return self->sample(rng); };
    return m;
  }

 private:
  void check_dim(const Point& x) const {
    if (x.size() != dim_) throw ValidationError("gaussian mixture: point dimension mismatch");
  }

  std::vector<double> cholesky(const std::vector<double>& a) const {
    std::vector<double> L(dim_ * dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = a[i * dim_ + j];
        for (std::size_t k = 0; k < j; ++k) s -= L[i * dim_ + k] * L[j * dim_ + k];
        if (i == j) {
          if (!(s > 0.0)) throw ValidationError("gaussian mixture: covariance not positive definite");
          L[i * dim_ + i] = std::sqrt(s);
        } else {
          L[i * dim_ + j] = s / L[j * dim_ + j];
        }
      }
    }
    return L;
  }

  /// Sigma_k^{-1} v via the Cholesky factor.
  Point solve(std::size_t k, const Point& v) const {
    const auto& L = chol_[k];
    Point y(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      double s = v[i];
      for (std::size_t j = 0; j < i; ++j) s -= L[i * dim_ + j] * y[j];
      y[i] = s / L[i * dim_ + i];
    }
    Point x(dim_);
    for (std::size_t ii = dim_; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t j = ii + 1; j < dim_; ++j) s -= L[j * dim_ + ii] * x[j];
      x[ii] = s / L[ii * dim_ + ii];
    }
    return x;
  }

  double component_log_pdf(std::size_t k, const Point& x) const {
    const auto& L = chol_[k];
    Point y(dim_);
    double q = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      double s = x[i] - means_[k][i];
      for (std::size_t j = 0; j < i; ++j) s -= L[i * dim_ + j] * y[j];
      y[i] = s / L[i * dim_ + i];
      q += y[i] * y[i];
    }
    return log_norm_[k] - 0.5 * q;
  }

  Batch means_;
  std::vector<std::vector<double>> covs_;
  std::vector<double> weights_;
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> chol_;
  std::vector<double> log_norm_;
  std::vector<double> log_weights_;
};

inline ContinuousModel gaussian_mixture(Batch means, std::vector<std::vector<double>> covs,
                                        std::vector<double> weights) {
  return GaussianMixture(std::move(means), std::move(covs), std::move(weights)).model();
}

/// Largest relative error between the model score and a central finite
/// difference of its log-density over `probes` points drawn from the model.
inline double score_consistency_error(const ContinuousModel& model, Rng& rng, int probes = 100,
                                      double step = 1e-5) {
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    Point x = model.sampler(rng);
    const Point g = model.score(x);
    for (std::size_t i = 0; i < model.dim; ++i) {
      Point xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double fd = (model.log_density(xp) - model.log_density(xm)) / (2.0 * step);
      worst = std::max(worst, detail::relative_error(g[i], fd, 1e-3));
    }
  }
  return worst;
}

}  // namespace season

#endif  // SEASON_GAUSSIAN_MIXTURE_HPP
