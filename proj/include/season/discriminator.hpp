#ifndef SEASON_DISCRIMINATOR_HPP
#define SEASON_DISCRIMINATOR_HPP

#include <iostream>
#include <string_view>

#include "season/discrete.hpp"
#include "season/generator.hpp"
#include "season/mlp.hpp"

namespace season {

/// Sink for non-fatal numeric warnings (defaults to std::clog).
inline std::function<void(std::string_view)>& warning_sink() {
  static std::function<void(std::string_view)> sink = [](std::string_view msg) {
    std::clog << "season: warning: " << msg << '\n';
  };
  return sink;
}

/// Points with probability weights; a batch of samples carries weights 1/n.
struct WeightedBatch {
  Batch points;
  std::vector<double> weights;

  static WeightedBatch uniform(Batch pts) {
    const double w = 1.0 / static_cast<double>(pts.size());
    std::vector<double> ws(pts.size(), w);
    return {std::move(pts), std::move(ws)};
  }

  static WeightedBatch from(const DiscreteDistribution& d) { return {d.support(), d.weights()}; }

  std::size_t size() const { return points.size(); }
};

/// Composite-link discriminator. The net emits a logit z(x), the class
/// probability is eta = sigmoid(z) so eta / (1 - eta) = e^z, and
///
///   h(x) = f'(e^{z(x)}) + b.
///
/// h - b therefore always lies in the range of f', and the free bias b makes
/// the class closed under additive constants.
class Discriminator {
 public:
  struct Output {
    double eta;
    double h;
  };

  Discriminator(Mlp net, Generator gen, double bias = 0.0)
      : net_(std::move(net)), gen_(gen), bias_(bias) {}

  /// Two hidden layers of the given width.
  static Discriminator make(std::size_t dim, std::size_t width, Generator gen, Rng& rng,
                            double init_scale = 1.0, Activation act = Activation::tanh) {
    Mlp net(dim, {width, width}, act);
    net.initialize(rng, init_scale);
    return Discriminator(std::move(net), gen, 0.0);
  }

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  Generator generator() const { return gen_; }
  double bias() const { return bias_; }
  void set_bias(double b) { bias_ = b; }
  std::size_t dim() const { return net_.input_dim(); }

  double logit(const Point& x) const { return net_.forward(x); }

  Output forward(const Point& x) const {
    const double z = logit(x);
    return {detail::sigmoid(z), gen_.f_prime_of_log_ratio(z) + bias_};
  }

  double h(const Point& x) const { return forward(x).h; }

  /// Flat parameter vector: net parameters followed by b.
  std::size_t parameter_count() const { return net_.parameter_count() + 1; }

  std::vector<double> parameters() const {
    auto p = net_.parameters();
    p.push_back(bias_);
    return p;
  }

  void set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) throw ValidationError("discriminator: parameter count mismatch");
    std::copy(p.begin(), p.end() - 1, net_.parameters().begin());
    bias_ = p.back();
  }

 private:
  Mlp net_;
  Generator gen_;
  double bias_;
};

/// One free value per support point; realises the rich class on a finite
/// support. Values may be -inf where the optimal ratio is zero.
struct TabularDiscriminator {
  Batch support;
  std::vector<double> values;
  Generator gen = Generator::kl();

  double h(const Point& x) const {
    for (std::size_t i = 0; i < support.size(); ++i)
      if (support[i] == x) return values[i];
    throw DomainError("tabular discriminator: point outside its support");
  }

  static TabularDiscriminator constant(const DiscreteDistribution& on, Generator gen, double c) {
    return {on.support(), std::vector<double>(on.size(), c), gen};
  }
};

namespace detail {

inline constexpr double kDomainMargin = 1e-6;

/// Pulls h back inside dom f* with the fixed margin; reports whether it moved.
inline double clamp_to_conjugate_domain(Generator gen, double h, bool& clamped) {
  const double upper = gen.conjugate_upper() - kDomainMargin;
  if (h > upper) {
    clamped = true;
    return upper;
  }
  return h;
}

/// sum_i w_i a_i with the convention 0 * (+-inf) = 0.
inline double weighted_sum(std::span<const double> w, std::span<const double> a) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) s += w[i] * a[i];
  return s;
}

}  // namespace detail

/// R(h) = E_nu[h] - E_mu[f* o h] from discriminator values at the nu and mu points.
inline double objective_from_values(Generator gen, std::span<const double> nu_w,
                                    std::span<const double> h_nu, std::span<const double> mu_w,
                                    std::span<const double> h_mu) {
  std::vector<double> conj(h_mu.size());
  for (std::size_t i = 0; i < h_mu.size(); ++i) conj[i] = gen.conjugate(h_mu[i]);
  return detail::weighted_sum(nu_w, h_nu) - detail::weighted_sum(mu_w, conj);
}

inline double objective_R(const Discriminator& disc, const WeightedBatch& nu,
                          const WeightedBatch& mu) {
  if (nu.size() == 0 || mu.size() == 0) throw ValidationError("objective_R: empty batch");
  const Generator gen = disc.generator();
  bool clamped = false;
  double value = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    value += nu.weights[i] * detail::clamp_to_conjugate_domain(gen, disc.h(nu.points[i]), clamped);
  for (std::size_t i = 0; i < mu.size(); ++i)
    value -= mu.weights[i] *
             gen.conjugate(detail::clamp_to_conjugate_domain(gen, disc.h(mu.points[i]), clamped));
  if (clamped) warning_sink()("objective_R: h clamped into the conjugate domain (bias too large)");
  return value;
}

inline double objective_R(const Discriminator& disc, const Batch& nu, const Batch& mu) {
  return objective_R(disc, WeightedBatch::uniform(nu), WeightedBatch::uniform(mu));
}

/// Exact R(h) for a tabular discriminator on two discrete distributions.
/// nu must be absolutely continuous w.r.t. the discriminator's support.
inline double objective_R(const TabularDiscriminator& disc, const DiscreteDistribution& nu,
                          const DiscreteDistribution& mu) {
  std::vector<double> h_nu(nu.size()), h_mu(mu.size());
  for (std::size_t i = 0; i < nu.size(); ++i)
    h_nu[i] = nu.weight(i) == 0.0 ? 0.0 : disc.h(nu.point(i));
  for (std::size_t i = 0; i < mu.size(); ++i) h_mu[i] = disc.h(mu.point(i));
  return objective_from_values(disc.gen, nu.weights(), h_nu, mu.weights(), h_mu);
}

struct GradResult {
  std::vector<double> grad;  ///< d R / d parameters, bias last
  double value;
};

/// Exact reverse-mode gradient of objective_R with respect to every
/// parameter, including the free bias.
inline GradResult grads(const Discriminator& disc, const WeightedBatch& nu, const WeightedBatch& mu) {
  if (nu.size() == 0 || mu.size() == 0) throw ValidationError("grads: empty batch");
  const Generator gen = disc.generator();
  const std::size_t np = disc.net().parameter_count();
  GradResult out{std::vector<double>(np + 1, 0.0), 0.0};
  std::vector<double> net_grad(np, 0.0);
  bool clamped = false;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double z = disc.logit(nu.points[i]);
    bool moved = false;
    const double h =
        detail::clamp_to_conjugate_domain(gen, gen.f_prime_of_log_ratio(z) + disc.bias(), moved);
    clamped |= moved;
    out.value += nu.weights[i] * h;
    if (moved) continue;
    const double dh = nu.weights[i];
    disc.net().backprop(nu.points[i], dh * gen.f_prime_of_log_ratio_deriv(z), &net_grad, nullptr);
    out.grad[np] += dh;
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double z = disc.logit(mu.points[i]);
    bool moved = false;
    const double h =
        detail::clamp_to_conjugate_domain(gen, gen.f_prime_of_log_ratio(z) + disc.bias(), moved);
    clamped |= moved;
    out.value -= mu.weights[i] * gen.conjugate(h);
    if (moved) continue;
    // (f*)' = f'^{-1}
    const double dh = -mu.weights[i] * gen.f_prime_inv(h);
    disc.net().backprop(mu.points[i], dh * gen.f_prime_of_log_ratio_deriv(z), &net_grad, nullptr);
    out.grad[np] += dh;
  }
  if (clamped) warning_sink()("grads: h clamped into the conjugate domain (bias too large)");
  std::copy(net_grad.begin(), net_grad.end(), out.grad.begin());
  return out;
}

inline GradResult grads(const Discriminator& disc, const Batch& nu, const Batch& mu) {
  return grads(disc, WeightedBatch::uniform(nu), WeightedBatch::uniform(mu));
}

/// grad_x h(x).
inline Point input_grad(const Discriminator& disc, const Point& x) {
  std::vector<double> g;
  const double z = disc.net().backprop(x, 1.0, nullptr, &g);
  const double dh = disc.generator().f_prime_of_log_ratio_deriv(z);
  for (auto& v : g) v *= dh;
  return g;
}

struct TrainConfig {
  std::size_t width = 32;
  int steps = 2000;
  double lr = 0.1;
  std::uint64_t seed = 0;
  bool halving = true;  ///< reject steps that decrease R and halve the step size
  bool train_bias = true;
  double init_scale = 1.0;
  Activation activation = Activation::tanh;
};

struct TrainResult {
  Discriminator disc;
  bool converged;
  double objective;
  double grad_norm;
  int steps;
  double final_lr;
};

namespace detail {

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

/// Gradient ascent on R from a given starting discriminator.
inline TrainResult train_from(Discriminator disc, const WeightedBatch& nu, const WeightedBatch& mu,
                              const TrainConfig& cfg) {
  // Clamp warnings are counted per run instead of printed per evaluation.
  int clamp_events = 0;
  auto saved_sink = warning_sink();
  warning_sink() = [&clamp_events](std::string_view) { ++clamp_events; };
  struct Restore {
    std::function<void(std::string_view)>& slot;
    std::function<void(std::string_view)> old;
    ~Restore() { slot = std::move(old); }
  } restore{warning_sink(), std::move(saved_sink)};

  double lr = cfg.lr;
  auto params = disc.parameters();
  auto g = grads(disc, nu, mu);
  if (!cfg.train_bias) g.grad.back() = 0.0;
  std::vector<double> history{g.value};
  int step = 0;
  for (; step < cfg.steps; ++step) {
    auto trial = params;
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += lr * g.grad[i];
    disc.set_parameters(trial);
    auto gn = grads(disc, nu, mu);
    if (!cfg.train_bias) gn.grad.back() = 0.0;
    if (!std::isfinite(gn.value))
      throw NumericError("discriminator training diverged at step " + std::to_string(step) +
                         " (objective " + std::to_string(gn.value) + ")");
    if (cfg.halving && gn.value < g.value) {
      disc.set_parameters(params);
      lr *= 0.5;
      history.push_back(g.value);
      if (lr < 1e-14) break;
      continue;
    }
    params = std::move(trial);
    g = std::move(gn);
    history.push_back(g.value);
  }
  disc.set_parameters(params);
  const std::size_t window = std::min<std::size_t>(100, history.size());
  double trailing_max = -kInf;
  for (std::size_t i = history.size() - window; i < history.size(); ++i)
    trailing_max = std::max(trailing_max, history[i]);
  const bool converged = trailing_max - g.value <= 1e-8;
  if (clamp_events > 0)
    restore.old("train: h clamped into the conjugate domain on " + std::to_string(clamp_events) +
                " evaluations");
  return {std::move(disc), converged, g.value, detail::norm2(g.grad), step, lr};
}

inline TrainResult train(Generator gen, const WeightedBatch& nu, const WeightedBatch& mu,
                         const TrainConfig& cfg) {
  if (nu.size() == 0 || mu.size() == 0) throw ValidationError("train: empty batch");
  if (nu.points.front().size() != mu.points.front().size())
    throw ValidationError("train: nu and mu batches differ in dimension");
  Rng rng(cfg.seed);
  auto disc = Discriminator::make(nu.points.front().size(), cfg.width, gen, rng, cfg.init_scale,
                                  cfg.activation);
  return train_from(std::move(disc), nu, mu, cfg);
}

inline TrainResult train(Generator gen, const Batch& nu, const Batch& mu, const TrainConfig& cfg) {
  return train(gen, WeightedBatch::uniform(nu), WeightedBatch::uniform(mu), cfg);
}

/// Tabular mode on discrete inputs: the closed-form optimum h_i = f'(nu_i / mu_i)
/// on mu's support.
inline TabularDiscriminator train(Generator gen, const DiscreteDistribution& nu,
                                  const DiscreteDistribution& mu) {
  const auto r = discrete_ratio(nu, mu);
  TabularDiscriminator t{mu.support(), std::vector<double>(mu.size()), gen};
  for (std::size_t i = 0; i < r.size(); ++i) t.values[i] = gen.f_prime(r[i]);
  return t;
}

/// Gradient of the exact tabular objective with respect to the table:
/// dR/dh_i = nu_i - mu_i f'^{-1}(h_i), laid out along mu's support.
inline std::vector<double> tabular_grads(const TabularDiscriminator& disc,
                                         const DiscreteDistribution& nu,
                                         const DiscreteDistribution& mu) {
  const auto nu_w = aligned_weights(nu, mu);
  std::vector<double> g(mu.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = nu_w[i] - mu.weight(i) * disc.gen.f_prime_inv(disc.h(mu.point(i)));
  return g;
}

}  // namespace season

#endif  // SEASON_DISCRIMINATOR_HPP
