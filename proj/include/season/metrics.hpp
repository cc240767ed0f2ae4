#ifndef SEASON_METRICS_HPP
#define SEASON_METRICS_HPP

#include "season/refine.hpp"

namespace season {

/// Value with a Monte-Carlo standard error (0 for exact computations).
struct Estimate {
  double value;
  double se;
};

/// I_f(nu : mu) = sum_i mu_i f(nu_i / mu_i); +inf when nu is not absolutely
/// continuous with respect to mu.
inline double exact_fdiv(const DiscreteDistribution& nu, const DiscreteDistribution& mu, Generator gen) {
  std::vector<double> nu_w;
  try {
    nu_w = aligned_weights(nu, mu);
  } catch (const DomainError&) {
    return kInf;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.weight(i) == 0.0) {
      if (nu_w[i] > 0.0) return kInf;
      continue;
    }
    s += mu.weight(i) * gen.f(nu_w[i] / mu.weight(i));
  }
  return s;
}

inline double kl_divergence(const DiscreteDistribution& nu, const DiscreteDistribution& mu) {
  return exact_fdiv(nu, mu, Generator::kl());
}

/// Both distributions' weights laid out over the union of their supports.
inline std::pair<std::vector<double>, std::vector<double>> union_weights(const DiscreteDistribution& p,
                                                                         const DiscreteDistribution& q) {
  Batch support = p.support();
  for (const auto& x : q.support())
    if (p.index_of(x) == p.size()) support.push_back(x);
  std::vector<double> pw(support.size(), 0.0), qw(support.size(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (const auto j = p.index_of(support[i]); j < p.size()) pw[i] = p.weight(j);
    if (const auto j = q.index_of(support[i]); j < q.size()) qw[i] = q.weight(j);
  }
  return {std::move(pw), std::move(qw)};
}

/// Gain I_f(mu^H : mu) = E_mu[f(f'^{-1}(h - lambda))], exact on a discrete base.
inline double est_gain_direct(const TabularDiscriminator& disc, const DiscreteDistribution& mu) {
  const double lambda = solve_lambda(disc, mu);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu.weight(i) > 0.0) s += mu.weight(i) * disc.gen.f(disc.gen.f_prime_inv(disc.h(mu.point(i)) - lambda));
  return s;
}

/// Monte-Carlo version on samples from mu, with the given normaliser.
inline Estimate est_gain_direct(const Discriminator& disc, const Batch& mu_samples, double lambda) {
  const Generator gen = disc.generator();
  std::vector<double> v(mu_samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = gen.f(gen.f_prime_inv(disc.h(mu_samples[i]) - lambda));
  return {detail::mean(v), detail::standard_error(v)};
}

/// Monte-Carlo version with lambda solved on the same samples.
inline Estimate est_gain_direct(const Discriminator& disc, const Batch& mu_samples) {
  return est_gain_direct(disc, mu_samples, solve_lambda(disc, mu_samples));
}

/// Gain as the integral of f(t / (1 - t)) against the law of
/// eta = f'^{-1}(h) / (1 + f'^{-1}(h)) under mu. A sample with eta = 1
/// contributes +inf and raises a warning.
inline Estimate est_gain_pushforward(const Discriminator& disc, const Batch& mu_samples) {
  const Generator gen = disc.generator();
  std::vector<double> v(mu_samples.size());
  bool saturated = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double h = disc.h(mu_samples[i]);
    // h at or past the top of the range of f' means an infinite ratio.
    const double r = gen.in_conjugate_domain(h) ? gen.f_prime_inv(h) : kInf;
    const double eta = std::isinf(r) ? 1.0 : r / (1.0 + r);
    if (eta >= 1.0) {
      saturated = true;
      v[i] = kInf;
      continue;
    }
    v[i] = gen.f(eta / (1.0 - eta));
  }
  if (saturated) warning_sink()("est_gain_pushforward: eta = 1 on some sample, gain is +inf");
  return {detail::mean(v), detail::standard_error(v)};
}

/// Pushforward form from class probabilities directly.
inline Estimate gain_from_eta(Generator gen, std::span<const double> eta) {
  std::vector<double> v(eta.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = eta[i] >= 1.0 ? kInf : gen.f(eta[i] / (1.0 - eta[i]));
  return {detail::mean(v), detail::standard_error(v)};
}

/// Plug-in D_{f,H}: the objective R(h) of a trained discriminator on
/// evaluation data. Exact for tabular discriminators on discrete inputs.
inline double est_DfH(const TabularDiscriminator& disc, const DiscreteDistribution& nu,
                      const DiscreteDistribution& mu) {
  return objective_R(disc, nu, mu);
}

inline double est_DfH(const Discriminator& disc, const Batch& nu_eval, const Batch& mu_eval) {
  return objective_R(disc, nu_eval, mu_eval);
}

/// Sup-norm ball of tabular functions {|h_i| <= N}: the IPM sup is attained
/// at h_i = N sign(p_i - q_i), giving N sum_i |p_i - q_i|.
inline double ipm_tabular(const DiscreteDistribution& p, const DiscreteDistribution& q, double norm_H = 1.0) {
  const auto [pw, qw] = union_weights(p, q);
  return norm_H * 2.0 * total_variation(pw, qw);
}

/// Raw-output net with a hard clamp at +-N; the IPM-mode member of the
/// discriminator architecture.
struct ClampedNet {
  Mlp net;
  double bound;

  double h(const Point& x) const { return std::clamp(net.forward(x), -bound, bound); }
};

struct SignedFit {
  ClampedNet fn;
  double value;  ///< sum_i c_i h(x_i) at the returned parameters
  bool converged;
};

/// Gradient ascent of sum_i c_i clamp(net(x_i), -N, N) over the net
/// parameters, with step halving on decrease. Clamped points carry no
/// gradient.
inline SignedFit maximize_signed_sum(const Batch& x, std::span<const double> c, double norm_H,
                                     const TrainConfig& cfg) {
  if (x.empty() || x.size() != c.size()) throw ValidationError("maximize_signed_sum: size mismatch");
  Rng rng(cfg.seed);
  Mlp net(x.front().size(), {cfg.width, cfg.width}, cfg.activation);
  net.initialize(rng, cfg.init_scale);
  auto eval = [&](const Mlp& m, std::vector<double>* grad) {
    double v = 0.0;
    if (grad) grad->assign(m.parameter_count(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double out = m.forward(x[i]);
      v += c[i] * std::clamp(out, -norm_H, norm_H);
      if (grad && std::abs(out) < norm_H) m.backprop(x[i], c[i], grad, nullptr);
    }
    return v;
  };
  std::vector<double> g;
  double value = eval(net, &g);
  double lr = cfg.lr;
  std::vector<double> history{value};
  for (int step = 0; step < cfg.steps; ++step) {
    const auto saved = net.parameters();
    for (std::size_t i = 0; i < g.size(); ++i) net.parameters()[i] += lr * g[i];
    std::vector<double> gn;
    const double vn = eval(net, &gn);
    if (!std::isfinite(vn)) throw NumericError("ipm trainer diverged at step " + std::to_string(step));
    if (cfg.halving && vn < value) {
      net.parameters() = saved;
      lr *= 0.5;
      history.push_back(value);
      if (lr < 1e-14) break;
      continue;
    }
    value = vn;
    g = std::move(gn);
    history.push_back(value);
  }
  const std::size_t window = std::min<std::size_t>(100, history.size());
  double trailing_max = -kInf;
  for (std::size_t i = history.size() - window; i < history.size(); ++i)
    trailing_max = std::max(trailing_max, history[i]);
  return {{std::move(net), norm_H}, value, trailing_max - value <= 1e-8};
}

struct IpmEstimate {
  double value;
  bool converged;
};

/// Approximate sup over clamped nets of E_nu[h] - E_mu[h] (a lower bound on d_H).
inline IpmEstimate est_ipm(const Batch& nu_eval, const Batch& mu_eval, double norm_H, const TrainConfig& cfg) {
  if (nu_eval.empty() || mu_eval.empty()) throw ValidationError("est_ipm: empty batch");
  Batch x = nu_eval;
  x.insert(x.end(), mu_eval.begin(), mu_eval.end());
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    c[i] = i < nu_eval.size() ? 1.0 / static_cast<double>(nu_eval.size())
                              : -1.0 / static_cast<double>(mu_eval.size());
  const auto fit = maximize_signed_sum(x, c, norm_H, cfg);
  // h = 0 is in the class, so the sup is never negative.
  return {std::max(fit.value, 0.0), fit.converged};
}

inline IpmEstimate est_ipm(const DiscreteDistribution& nu, const DiscreteDistribution& mu, double norm_H) {
  return {ipm_tabular(nu, mu, norm_H), true};
}

/// Exact sup over {|h| <= N} of (1/n) sum_i zeta_i h(X_i): repeated points
/// share one value, so the sup is (N/n) sum_x |sum_{i: X_i = x} zeta_i|.
inline double tabular_sign_sup(const Batch& samples, std::span<const double> zeta, double norm_H) {
  std::map<Point, double> group;
  for (std::size_t i = 0; i < samples.size(); ++i) group[samples[i]] += zeta[i];
  double s = 0.0;
  for (const auto& [x, v] : group) s += std::abs(v);
  return norm_H * s / static_cast<double>(samples.size());
}

/// Empirical Rademacher complexity of the tabular ball {|h| <= N}, averaged
/// over n_sign_draws sign vectors.
inline Estimate rademacher_tabular(const Batch& samples, double norm_H, int n_sign_draws, std::uint64_t seed) {
  if (n_sign_draws < 1) throw ValidationError("rademacher: need at least one sign draw");
  if (samples.empty()) throw ValidationError("rademacher: empty sample");
  std::vector<double> v(n_sign_draws);
  for (int d = 0; d < n_sign_draws; ++d) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(d)));
    std::vector<double> zeta(samples.size());
    for (auto& z : zeta) z = rng.sign();
    v[d] = tabular_sign_sup(samples, zeta, norm_H);
  }
  return {detail::mean(v), n_sign_draws > 1 ? detail::standard_error(v) : 0.0};
}

/// Same with the sup approximated by the clamped-net trainer (a lower bound,
/// kept inside [0, N]).
inline Estimate rademacher_net(const Batch& samples, double norm_H, int n_sign_draws, std::uint64_t seed,
                               TrainConfig cfg) {
  if (n_sign_draws < 1) throw ValidationError("rademacher: need at least one sign draw");
  if (samples.empty()) throw ValidationError("rademacher: empty sample");
  std::vector<double> v(n_sign_draws);
  const double n = static_cast<double>(samples.size());
  for (int d = 0; d < n_sign_draws; ++d) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(d)));
    std::vector<double> c(samples.size());
    for (auto& z : c) z = rng.sign() / n;
    cfg.seed = split_seed(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(d));
    v[d] = std::clamp(maximize_signed_sum(samples, c, norm_H, cfg).value, 0.0, norm_H);
  }
  return {detail::mean(v), n_sign_draws > 1 ? detail::standard_error(v) : 0.0};
}

/// 2 N sqrt(ln(1/delta) / (2n)).
inline double slow_rate(double norm_H, double delta, std::size_t n) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("slow_rate: delta must lie in (0, 1)");
  if (n == 0) throw ValidationError("slow_rate: n must be positive");
  return 2.0 * norm_H * std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

struct BoundReport {
  double d_H_lhs = 0.0;
  double D_fH = 0.0;
  double gain_If = 0.0;
  double rademacher = 0.0;
  double slow_rate = 0.0;
  double norm_H = 1.0;
  double delta = 0.05;
  std::size_t n = 0;
  double tolerance = 0.0;
  bool lhs_is_lower_bound = false;  ///< LHS from an under-optimised sup
  bool holds = false;

  double rhs() const { return D_fH - gain_If + rademacher + slow_rate; }
};

/// Assembles d_H(P, mu^H) <= D_{f,H}(P_hat, mu) - I_f(mu^H : mu) + R_n(H) + slow rate.
inline BoundReport generalization_report(double d_H_lhs, double D_fH, double gain_If, double rademacher,
                                         double norm_H, double delta, std::size_t n, double tolerance = 1e-9,
                                         bool lhs_is_lower_bound = false) {
  BoundReport r;
  r.d_H_lhs = d_H_lhs;
  r.D_fH = D_fH;
  r.gain_If = gain_If;
  r.rademacher = rademacher;
  r.norm_H = norm_H;
  r.delta = delta;
  r.n = n;
  r.slow_rate = slow_rate(norm_H, delta, n);
  r.tolerance = tolerance;
  r.lhs_is_lower_bound = lhs_is_lower_bound;
  r.holds = r.d_H_lhs <= r.rhs() + tolerance;
  return r;
}

struct ConvergenceBoundInputs {
  double eps_theta = 0.0;
  double L = 0.0;
  double m2 = 0.0;
  std::size_t d = 1;
  double T = 1.0;
  std::size_t K = 1;
  double norm_H = 1.0;
  double forward_gap_If = 0.0;

  double step() const { return T / static_cast<double>(K); }
};

/// ||H|| (1 - exp(-(eps^2 + L^2 d s + L^2 m2^2 s^2) T)) + I_f(forward gap), s = T/K.
inline double convergence_bound(const ConvergenceBoundInputs& in) {
  if (!(in.eps_theta >= 0.0 && in.L >= 0.0 && in.m2 >= 0.0 && in.T >= 0.0 && in.norm_H >= 0.0 &&
        in.forward_gap_If >= 0.0))
    throw ValidationError("convergence_bound: inputs must be nonnegative");
  if (in.K == 0) throw ValidationError("convergence_bound: K must be positive");
  const double s = in.step();
  const double d = static_cast<double>(in.d);
  const double rate = in.eps_theta * in.eps_theta + in.L * in.L * d * s + in.L * in.L * in.m2 * in.m2 * s * s;
  return -in.norm_H * std::expm1(-rate * in.T) + in.forward_gap_If;
}

struct LemmaCheck {
  double lhs;
  double rhs;
  bool holds;
};

/// I_f(nu : mu) <= max_i |f'(nu_i / mu_i)| sqrt(KL(nu : mu)).
inline LemmaCheck fdiv_kl_lemma_check(const DiscreteDistribution& nu, const DiscreteDistribution& mu,
                                      Generator gen, double tolerance = 1e-12) {
  const double lhs = exact_fdiv(nu, mu, gen);
  const auto r = discrete_ratio(nu, mu);
  double sup = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (mu.weight(i) > 0.0) sup = std::max(sup, std::abs(gen.f_prime(r[i])));
  const double kl = kl_divergence(nu, mu);
  // 0 * inf: a zero KL means nu = mu and both sides vanish.
  const double rhs = kl == 0.0 ? 0.0 : sup * std::sqrt(std::max(kl, 0.0));
  return {lhs, rhs, lhs <= rhs + tolerance};
}

/// I_{js_shifted}(nu : mu) <= KL(nu : mu).
inline LemmaCheck js_kl_lemma_check(const DiscreteDistribution& nu, const DiscreteDistribution& mu,
                                    double tolerance = 1e-12) {
  const double lhs = exact_fdiv(nu, mu, Generator::js_shifted());
  const double rhs = kl_divergence(nu, mu);
  return {lhs, rhs, lhs <= rhs + tolerance};
}

struct ViCheck {
  double lhs;    ///< log sum_i mu_i exp(-L_i)
  double rhs;    ///< -(E_gibbs[L] + KL(gibbs : mu))
  DiscreteDistribution gibbs;
  bool holds;
};

/// Variational identity log E_mu[e^{-L}] = -min_Q (E_Q[L] + KL(Q : mu)), the
/// minimiser being the Gibbs posterior Q_i proportional to mu_i e^{-L_i}.
inline ViCheck vi_duality_check(const DiscreteDistribution& mu, std::span<const double> L,
                                double tolerance = 1e-10) {
  if (L.size() != mu.size()) throw ValidationError("vi_duality_check: loss vector size mismatch");
  std::vector<double> logw(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(L[i])) throw ValidationError("vi_duality_check: losses must be finite");
    logw[i] = mu.weight(i) > 0.0 ? std::log(mu.weight(i)) - L[i] : -kInf;
  }
  const double lhs = detail::log_sum_exp(logw);
  std::vector<double> q(mu.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::exp(logw[i] - lhs);
  auto gibbs = DiscreteDistribution::normalized(mu.support(), q);
  double expected = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) expected += gibbs.weight(i) * L[i];
  const double rhs = -(expected + kl_divergence(gibbs, mu));
  return {lhs, rhs, std::move(gibbs), std::abs(lhs - rhs) <= tolerance};
}

/// E_Q[L] + KL(Q : mu), the variational objective minimised by the Gibbs posterior.
inline double vi_objective(const DiscreteDistribution& q, const DiscreteDistribution& mu, std::span<const double> L) {
  const auto qw = aligned_weights(q, mu);
  double e = 0.0;
  for (std::size_t i = 0; i < qw.size(); ++i) e += qw[i] == 0.0 ? 0.0 : qw[i] * L[i];
  return e + kl_divergence(q, mu);
}

}  // namespace season

#endif  // SEASON_METRICS_HPP
