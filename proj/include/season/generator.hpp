#ifndef SEASON_GENERATOR_HPP
#define SEASON_GENERATOR_HPP

#include <string>
#include <string_view>

#include "season/common.hpp"

namespace season {

/// Convex generator f with f(1) = 0 and closed-form derivative, inverse
/// derivative and Fenchel conjugate.
///
/// The three built-ins are strictly convex and differentiable on (0, inf)
/// and have f'^{-1} >= 0 on the whole conjugate domain:
///
///   kl          f(t) = t log t                          f*(s) = exp(s - 1),      s in R
///   reverse_kl  f(t) = -log t                           f*(s) = -1 - log(-s),    s < 0
///   js_shifted  f(t) = t log t - (t+1) log(t+1) + 2 log 2
///                                                       f*(s) = -2 log 2 - log(1 - e^s), s < 0
///
/// f(0) is the right limit (0, +inf and 2 log 2 respectively).
class Generator {
 public:
  enum class Kind { kl, reverse_kl, js_shifted };

  constexpr explicit Generator(Kind kind) : kind_(kind) {}

  static constexpr Generator kl() { return Generator(Kind::kl); }
  static constexpr Generator reverse_kl() { return Generator(Kind::reverse_kl); }
  static constexpr Generator js_shifted() { return Generator(Kind::js_shifted); }

  static Generator from_name(std::string_view name) {
    if (name == "kl") return kl();
    if (name == "reverse_kl") return reverse_kl();
    if (name == "js_shifted") return js_shifted();
    throw ValidationError("unknown generator '" + std::string(name) +
                          "' (expected kl, reverse_kl or js_shifted)");
  }

  constexpr Kind kind() const { return kind_; }

  std::string_view name() const {
    switch (kind_) {
      case Kind::kl:
        return "kl";
      case Kind::reverse_kl:
        return "reverse_kl";
      case Kind::js_shifted:
        return "js_shifted";
    }
    return "";
  }

  friend constexpr bool operator==(Generator a, Generator b) { return a.kind_ == b.kind_; }

  /// f(t) for t >= 0; +inf where f is infinite.
  double f(double t) const {
    if (!(t >= 0.0)) throw DomainError("generator " + std::string(name()) + ": f(t) needs t >= 0");
    switch (kind_) {
      case Kind::kl:
        return t == 0.0 ? 0.0 : t * std::log(t);
      case Kind::reverse_kl:
        return t == 0.0 ? kInf : -std::log(t);
      case Kind::js_shifted:
        if (t == 0.0) return 2.0 * kLn2;
        if (std::isinf(t)) return -kInf;
        return -t * std::log1p(1.0 / t) - std::log1p(t) + 2.0 * kLn2;
    }
    return kInf;
  }

  /// f'(t) for t >= 0; f'(0) = -inf for every built-in.
  double f_prime(double t) const {
    if (!(t >= 0.0)) throw DomainError("generator " + std::string(name()) + ": f'(t) needs t >= 0");
    if (t == 0.0) return -kInf;
    switch (kind_) {
      case Kind::kl:
        return std::log(t) + 1.0;
      case Kind::reverse_kl:
        return -1.0 / t;
      case Kind::js_shifted:
        return -std::log1p(1.0 / t);
    }
    return 0.0;
  }

  double f_second(double t) const {
    if (!(t > 0.0)) throw DomainError("generator " + std::string(name()) + ": f''(t) needs t > 0");
    switch (kind_) {
      case Kind::kl:
        return 1.0 / t;
      case Kind::reverse_kl:
        return 1.0 / (t * t);
      case Kind::js_shifted:
        return 1.0 / (t * (t + 1.0));
    }
    return 0.0;
  }

  /// f'(e^z), evaluated without forming the ratio e^z.
  double f_prime_of_log_ratio(double z) const {
    switch (kind_) {
      case Kind::kl:
        return z + 1.0;
      case Kind::reverse_kl:
        return -std::exp(-z);
      case Kind::js_shifted:
        return -detail::softplus(-z);
    }
    return 0.0;
  }

  /// d/dz f'(e^z) = e^z f''(e^z).
  double f_prime_of_log_ratio_deriv(double z) const {
    switch (kind_) {
      case Kind::kl:
        return 1.0;
      case Kind::reverse_kl:
        return std::exp(-z);
      case Kind::js_shifted:
        return detail::sigmoid(-z);
    }
    return 0.0;
  }

  /// Open upper end of dom f* (the range of f'): +inf for kl, 0 otherwise.
  constexpr double conjugate_upper() const { return kind_ == Kind::kl ? kInf : 0.0; }

  bool in_conjugate_domain(double s) const { return s < conjugate_upper(); }

  /// f'^{-1}(s); s = -inf maps to 0.
  double f_prime_inv(double s) const {
    if (s == -kInf) return 0.0;
    check_range(s);
    switch (kind_) {
      case Kind::kl:
        return std::exp(s - 1.0);
      case Kind::reverse_kl:
        return -1.0 / s;
      case Kind::js_shifted:
        return 1.0 / std::expm1(-s);
    }
    return 0.0;
  }

  /// d/ds f'^{-1}(s) = (f*)''(s).
  double f_prime_inv_deriv(double s) const {
    if (s == -kInf) return 0.0;
    check_range(s);
    switch (kind_) {
      case Kind::kl:
        return std::exp(s - 1.0);
      case Kind::reverse_kl:
        return 1.0 / (s * s);
      case Kind::js_shifted: {
        const double em = std::expm1(-s);
        return (em + 1.0) / (em * em);
      }
    }
    return 0.0;
  }

  /// d/ds log f'^{-1}(s); the guidance multiplier in refined scores.
  double log_f_prime_inv_deriv(double s) const {
    check_range(s);
    switch (kind_) {
      case Kind::kl:
        return 1.0;
      case Kind::reverse_kl:
        return -1.0 / s;
      case Kind::js_shifted:
        return -1.0 / std::expm1(s);
    }
    return 0.0;
  }

  /// Closed-form f*(s); +inf outside the conjugate domain.
  double conjugate(double s) const {
    if (!in_conjugate_domain(s)) return kInf;
    switch (kind_) {
      case Kind::kl:
        return std::exp(s - 1.0);
      case Kind::reverse_kl:
        return -1.0 - std::log(-s);
      case Kind::js_shifted:
        return -2.0 * kLn2 - std::log(-std::expm1(s));
    }
    return kInf;
  }

  /// lim_{t->inf} f(t) / t, which fixes the Bayes loss at eta = 1.
  constexpr double recession_slope() const { return kind_ == Kind::kl ? kInf : 0.0; }

 private:
  void check_range(double s) const {
    if (!(s < conjugate_upper()))
      throw DomainError("generator " + std::string(name()) + ": s = " + std::to_string(s) +
                        " outside the range of f'");
  }

  Kind kind_;
};

inline double eval_f(Generator gen, double t) { return gen.f(t); }

inline double conjugate(Generator gen, double s) { return gen.conjugate(s); }

struct InvFprime {
  double value;
  double derivative;
};

/// f'^{-1}(s) together with its derivative.
inline InvFprime inv_fprime(Generator gen, double s) {
  return {gen.f_prime_inv(s), gen.f_prime_inv_deriv(s)};
}

/// sup_{t >= 0} (s t - f(t)) by log-grid scan plus golden-section refinement.
/// Returns +inf when the objective is still increasing at the end of the grid.
/// Test oracle for the closed-form conjugates; also the only conjugate for
/// prior-tilted generators.
inline double conjugate_numeric(const std::function<double(double)>& f, double s,
                                int points_per_decade = 40) {
  constexpr double kLogLo = -12.0, kLogHi = 12.0;
  const int n = static_cast<int>((kLogHi - kLogLo) * points_per_decade) + 1;
  auto objective = [&](double t) {
    const double ft = f(t);
    return std::isfinite(ft) ? s * t - ft : -kInf;
  };
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(n) + 1);
  ts.push_back(0.0);
  for (int i = 0; i < n; ++i)
    ts.push_back(std::pow(10.0, kLogLo + (kLogHi - kLogLo) * i / (n - 1)));
  std::size_t best = 0;
  double best_val = objective(ts[0]);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double v = objective(ts[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == ts.size() - 1) return kInf;
  const double lo = best == 0 ? 0.0 : ts[best - 1];
  const double hi = ts[best + 1];
  const double t_star = detail::golden_section_max(objective, lo, hi, 1e-15);
  return std::max(best_val, objective(t_star));
}

inline double conjugate_numeric(Generator gen, double s, int points_per_decade = 40) {
  return conjugate_numeric([gen](double t) { return gen.f(t); }, s, points_per_decade);
}

/// Composite link Psi(eta) = f'(eta / (1 - eta)), strictly increasing on (0, 1).
inline double link(Generator gen, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("link: eta must lie in (0, 1)");
  return gen.f_prime_of_log_ratio(std::log(eta) - std::log1p(-eta));
}

inline double inverse_link(Generator gen, double s) {
  const double r = gen.f_prime_inv(s);
  return r / (1.0 + r);
}

enum class LossSpace { link, probability };

/// The two partial losses l(+1, .) and l(-1, .) at one prediction.
struct PartialLossPair {
  double loss_pos;
  double loss_neg;
  LossSpace parametrization = LossSpace::probability;
};

/// l+ = -f'(eta/(1-eta)), l- = f*(f'(eta/(1-eta))) at prediction eta in (0, 1).
inline PartialLossPair partial_losses(Generator gen, double eta) {
  const double s = link(gen, eta);
  return {-s, gen.conjugate(s), LossSpace::probability};
}

/// Pointwise loss L(eta, t) = eta l+(t) + (1 - eta) l-(t).
inline double pointwise_loss(Generator gen, double eta, double t) {
  const auto p = partial_losses(gen, t);
  return eta * p.loss_pos + (1.0 - eta) * p.loss_neg;
}

/// Pointwise Bayes loss -(1 - eta) f(eta / (1 - eta)); endpoints are limits.
inline double bayes_pointwise_loss(Generator gen, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("bayes_pointwise_loss: eta outside [0, 1]");
  if (eta == 0.0) return -gen.f(0.0);
  if (eta == 1.0) return -gen.recession_slope();
  return -(1.0 - eta) * gen.f(eta / (1.0 - eta));
}

/// Generator rebuilt from a pointwise Bayes loss under class prior pi:
/// f_pi(u) = -(1 - pi + pi u) L(pi u / (1 - pi + pi u)).
/// Only a numeric conjugate is available.
class PerspectiveGenerator {
 public:
  PerspectiveGenerator(std::function<double(double)> bayes_loss, double pi)
      : bayes_loss_(std::move(bayes_loss)), pi_(pi) {
    if (!(pi > 0.0 && pi < 1.0)) throw DomainError("perspective_prior: pi must lie in (0, 1)");
  }

  double pi() const { return pi_; }

  double operator()(double u) const {
    if (!(u >= 0.0)) throw DomainError("perspective generator needs u >= 0");
    if (std::isinf(u)) return kInf;
    const double mass = 1.0 - pi_ + pi_ * u;
    return -mass * bayes_loss_(pi_ * u / mass);
  }

  double conjugate(double s) const {
    return conjugate_numeric([this](double u) { return (*this)(u); }, s);
  }

 private:
  std::function<double(double)> bayes_loss_;
  double pi_;
};

inline PerspectiveGenerator perspective_prior(std::function<double(double)> bayes_loss,
                                              double pi) {
  return PerspectiveGenerator(std::move(bayes_loss), pi);
}

inline PerspectiveGenerator perspective_prior(Generator gen, double pi) {
  return PerspectiveGenerator([gen](double eta) { return bayes_pointwise_loss(gen, eta); }, pi);
}

}  // namespace season

#endif  // SEASON_GENERATOR_HPP
