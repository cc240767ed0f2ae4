#ifndef SEASON_OU_HPP
#define SEASON_OU_HPP

#include <optional>

#include "season/common.hpp"
#include "season/random.hpp"

namespace season {

/// Forward noising schedule dX = -beta_t X dt + sqrt(2 beta_t) dB on [0, T].
class OUSchedule {
 public:
  /// Constant beta; m_t and sigma_t in closed form.
  static OUSchedule constant(double beta, double T) {
    if (!(beta > 0.0) || !(T > 0.0)) throw ValidationError("OU schedule: beta and T must be positive");
    OUSchedule s;
    s.beta_ = [beta](double) { return beta; };
    s.constant_beta_ = beta;
    s.T_ = T;
    return s;
  }

  /// Arbitrary positive beta; the integral is computed by adaptive Simpson.
  static OUSchedule custom(std::function<double(double)> beta, double T) {
    if (!(T > 0.0)) throw ValidationError("OU schedule: T must be positive");
    OUSchedule s;
    s.beta_ = std::move(beta);
    s.T_ = T;
    return s;
  }

  double T() const { return T_; }
  double beta(double t) const { return beta_(t); }
  bool is_constant() const { return constant_beta_.has_value(); }

  /// int_0^t beta_s ds.
  double integrated_beta(double t) const {
    check_time(t);
    if (constant_beta_) return *constant_beta_ * t;
    return detail::adaptive_simpson(beta_, 0.0, t, 1e-8);
  }

 private:
  OUSchedule() = default;

  void check_time(double t) const {
    if (!(t >= 0.0 && t <= T_))
      throw DomainError("OU schedule: t = " + std::to_string(t) + " outside [0, T]");
  }

  std::function<double(double)> beta_;
  std::optional<double> constant_beta_;
  double T_ = 1.0;
};

struct OUParams {
  double m;
  double sigma;
};

/// Transition X_t | X_0 ~ N(m_t X_0, sigma_t^2 I) with m_t = exp(-int beta),
/// sigma_t^2 = 1 - exp(-2 int beta).
inline OUParams ou_params(const OUSchedule& schedule, double t) {
  const double integral = schedule.integrated_beta(t);
  return {std::exp(-integral), std::sqrt(-std::expm1(-2.0 * integral))};
}

inline Point noise_sample(const Point& x0, const OUSchedule& schedule, double t, Rng& rng) {
  const auto [m, sigma] = ou_params(schedule, t);
  Point x(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) x[i] = m * x0[i] + sigma * rng.normal();
  return x;
}

inline Point noise_sample(const Point& x0, const OUSchedule& schedule, double t,
                          std::uint64_t seed) {
  Rng rng(seed);
  return noise_sample(x0, schedule, t, rng);
}

inline Batch noise_batch(const Batch& x0, const OUSchedule& schedule, double t, Rng& rng) {
  const auto [m, sigma] = ou_params(schedule, t);
  Batch out;
  out.reserve(x0.size());
  for (const auto& x : x0) {
    Point y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = m * x[i] + sigma * rng.normal();
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace season

#endif  // SEASON_OU_HPP
