#ifndef SEASON_ORACLE_HPP
#define SEASON_ORACLE_HPP

#include "season/metrics.hpp"

namespace season {

/// h_i = f'(nu_i / mu_i) on mu's support; -inf where nu_i = 0.
inline TabularDiscriminator exact_optimal_h(const DiscreteDistribution& nu, const DiscreteDistribution& mu,
                                            Generator gen) {
  return train(gen, nu, mu);
}

/// Tabular class H_B = {h : max_i h_i - min_i h_i <= B} on a finite support.
/// Convex and closed under additive constants; B = 0 is the constants,
/// B = inf every function.
struct SpanClass {
  double span = kInf;

  static SpanClass rich() { return {kInf}; }
  static SpanClass constants() { return {0.0}; }
  static SpanClass bounded(double b) {
    if (!(b >= 0.0)) throw ValidationError("span class: B must be nonnegative");
    return {b};
  }
  bool is_rich() const { return std::isinf(span); }
};

/// Equality tolerance used by the rich-class IPM (0 or +inf).
inline constexpr double kRichEqualityTolerance = 1e-12;

/// d_{H_B}(p, q) on aligned weights: B TV(p, q), and for the rich class 0 or
/// +inf according to whether p = q.
inline double ipm_span(std::span<const double> p, std::span<const double> q, SpanClass cls) {
  if (cls.is_rich()) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (std::abs(p[i] - q[i]) > kRichEqualityTolerance) return kInf;
    return 0.0;
  }
  return cls.span * total_variation(p, q);
}

inline double ipm_span(const DiscreteDistribution& p, const DiscreteDistribution& q, SpanClass cls) {
  const auto [pw, qw] = union_weights(p, q);
  return ipm_span(pw, qw, cls);
}

/// Exact maximiser of R over H_B. The optimum clamps the unrestricted
/// optimum f'(nu_i / mu_i) into a window [a, a + B], with a fixed by the
/// stationarity of R along constants: E_mu[f'^{-1}(h)] = 1.
inline TabularDiscriminator optimal_h_span(const DiscreteDistribution& nu, const DiscreteDistribution& mu,
                                           Generator gen, SpanClass cls) {
  auto opt = exact_optimal_h(nu, mu, gen);
  if (cls.is_rich()) return opt;
  const auto& u = opt.values;
  double u_max = -kInf;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (mu.weight(i) > 0.0) u_max = std::max(u_max, u[i]);
  const double B = cls.span;
  auto clamped = [&](double a) {
    std::vector<double> h(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) h[i] = std::clamp(u[i], a, a + B);
    return h;
  };
  // 1 - E_mu[f'^{-1}(clamp(u, a, a + B))] is decreasing in a; it is <= 0 at
  // a = u_max (every value raised) and > 0 once a + B drops below min u.
  auto deficit = [&](double a) {
    const auto h = clamped(a);
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += mu.weight(i) * gen.f_prime_inv(h[i]);
    return 1.0 - s;
  };
  const double hi = u_max;
  double step = 1.0, lo = u_max - B - step;
  for (int k = 0; k < 200 && !(deficit(lo) > 0.0); ++k) {
    step *= 2.0;
    lo = u_max - B - step;
  }
  if (!(deficit(lo) > 0.0)) throw NumericError("optimal_h_span: could not bracket the window offset");
  const double a = detail::bisect_decreasing(deficit, lo, hi);
  return {mu.support(), clamped(a), gen};
}

/// D_{f,H_B}(nu, mu), exact.
inline double exact_DfH(const DiscreteDistribution& nu, const DiscreteDistribution& mu, Generator gen,
                        SpanClass cls) {
  return objective_R(optimal_h_span(nu, mu, gen, cls), nu, mu);
}

/// The three terms of d_H(nu, mu^H) = D_{f,H}(nu, mu) - I_f(mu^H : mu),
/// computed exactly with one class H_B.
struct IdentityTerms {
  double d_H;
  double D_fH;
  double gain;
  double lambda;
  double residual;  ///< |d_H - (D_fH - gain)|
  DiscreteDistribution refined;
};

inline IdentityTerms identity_terms(const DiscreteDistribution& nu, const DiscreteDistribution& mu, Generator gen,
                                    SpanClass cls) {
  const auto h = optimal_h_span(nu, mu, gen, cls);
  const double D = objective_R(h, nu, mu);
  auto ref = refine_discrete(mu, h);
  const double gain = exact_fdiv(ref.refined, mu, gen);
  const double dH = ipm_span(aligned_weights(nu, mu), ref.refined.weights(), cls);
  return {dH, D, gain, ref.lambda, std::abs(dH - (D - gain)), std::move(ref.refined)};
}

struct DualGridResult {
  std::vector<double> q;  ///< minimiser weights on mu's support
  double value;           ///< min of d_H(nu, Q) + I_f(Q : mu) over the grid
  double primal;          ///< exact D_{f,H}(nu, mu)
  double gap;             ///< value - primal
  double resolution;
  bool too_coarse;        ///< gap > 10 resolution
};

/// Brute-force dual: minimise d_H(nu, Q) + I_f(Q : mu) over the simplex grid
/// {Q : Q_i in resolution * Z} on mu's support (at most 4 points). nu and mu
/// are added as candidates so the rich class, whose d_H is finite only at
/// Q = nu, is handled exactly.
inline DualGridResult dual_grid_min(const DiscreteDistribution& nu, const DiscreteDistribution& mu, Generator gen,
                                    SpanClass cls, double resolution = 1.0 / 200.0) {
  const std::size_t k = mu.size();
  if (k > 4) throw ValidationError("dual_grid_min: supports of at most 4 points");
  if (!(resolution > 0.0 && resolution <= 1.0)) throw ValidationError("dual_grid_min: resolution in (0, 1]");
  const auto M = static_cast<int>(std::lround(1.0 / resolution));
  const auto nu_w = aligned_weights(nu, mu);

  auto objective = [&](std::span<const double> q) {
    double fd = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mu.weight(i) == 0.0) {
        if (q[i] > 0.0) return kInf;
        continue;
      }
      fd += mu.weight(i) * gen.f(q[i] / mu.weight(i));
    }
    return ipm_span(nu_w, q, cls) + fd;
  };

  DualGridResult best{{}, kInf, exact_DfH(nu, mu, gen, cls), 0.0, resolution, false};
  auto consider = [&](const std::vector<double>& q) {
    const double v = objective(q);
    if (v < best.value) {
      best.value = v;
      best.q = q;
    }
  };
  std::vector<int> counts(k, 0);
  std::vector<double> q(k);
  // Enumerate compositions of M into k nonnegative parts.
  auto recurse = [&](auto&& self, std::size_t i, int left) -> void {
    if (i + 1 == k) {
      counts[i] = left;
      for (std::size_t j = 0; j < k; ++j) q[j] = static_cast<double>(counts[j]) / static_cast<double>(M);
      consider(q);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[i] = c;
      self(self, i + 1, left - c);
    }
  };
  recurse(recurse, 0, M);
  consider(nu_w);
  consider(mu.weights());
  best.gap = best.value - best.primal;
  best.too_coarse = best.gap > 10.0 * resolution;
  return best;
}

/// Random pair (nu, mu) on the integers 0..k-1 with Dirichlet(alpha) weights.
inline std::pair<DiscreteDistribution, DiscreteDistribution> random_instance(Rng& rng, std::size_t k,
                                                                             double alpha = 1.0) {
  auto draw = [&] {
    auto w = dirichlet(rng, k, alpha);
    // Keep every point charged so ratios stay finite.
    for (auto& x : w) x = std::max(x, 1e-300);
    return DiscreteDistribution::on_integers(std::move(w));
  };
  auto nu = draw();
  auto mu = draw();
  return {std::move(nu), std::move(mu)};
}

}  // namespace season

#endif  // SEASON_ORACLE_HPP
