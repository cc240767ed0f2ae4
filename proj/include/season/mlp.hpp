#ifndef SEASON_MLP_HPP
#define SEASON_MLP_HPP

#include "season/common.hpp"
#include "season/random.hpp"

namespace season {

enum class Activation { tanh, identity };

inline std::string_view activation_name(Activation a) {
  return a == Activation::tanh ? "tanh" : "identity";
}

inline Activation activation_from_name(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

/// Fully connected net R^d -> R with scalar output. Hidden layers share one
/// activation; the output layer is linear. Parameters live in one flat
/// vector, layer by layer as (W row-major [out x in], b).
class Mlp {
 public:
  struct Shape {
    std::size_t in;
    std::size_t out;
  };

  Mlp() = default;

  Mlp(std::size_t input_dim, std::vector<std::size_t> hidden, Activation act = Activation::tanh)
      : activation_(act) {
    std::size_t prev = input_dim;
    for (std::size_t w : hidden) {
      shapes_.push_back({prev, w});
      prev = w;
    }
    shapes_.push_back({prev, 1});
    std::size_t total = 0;
    for (const auto& s : shapes_) {
      offsets_.push_back(total);
      total += s.out * s.in + s.out;
    }
    params_.assign(total, 0.0);
  }

  /// Rebuild from explicit layer shapes (checkpoint loading).
  Mlp(std::vector<Shape> shapes, Activation act, std::vector<double> params)
      : shapes_(std::move(shapes)), activation_(act) {
    if (shapes_.empty() || shapes_.back().out != 1)
      throw ValidationError("mlp: last layer must have a single output");
    std::size_t total = 0;
    for (std::size_t l = 0; l < shapes_.size(); ++l) {
      if (l > 0 && shapes_[l].in != shapes_[l - 1].out)
        throw ValidationError("mlp: consecutive layer shapes do not chain");
      offsets_.push_back(total);
      total += shapes_[l].out * shapes_[l].in + shapes_[l].out;
    }
    if (params.size() != total) throw ValidationError("mlp: parameter count does not match shapes");
    params_ = std::move(params);
  }

  /// Glorot-uniform weights scaled by `scale`, zero biases.
  void initialize(Rng& rng, double scale = 1.0) {
    for (std::size_t l = 0; l < shapes_.size(); ++l) {
      const auto [in, out] = shapes_[l];
      const double a = scale * std::sqrt(6.0 / static_cast<double>(in + out));
      double* w = params_.data() + offsets_[l];
      for (std::size_t i = 0; i < in * out; ++i) w[i] = a * (2.0 * rng.uniform() - 1.0);
      for (std::size_t i = 0; i < out; ++i) w[in * out + i] = 0.0;
    }
  }

  std::size_t input_dim() const { return shapes_.front().in; }
  std::size_t parameter_count() const { return params_.size(); }
  const std::vector<Shape>& shapes() const { return shapes_; }
  Activation activation() const { return activation_; }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  double forward(std::span<const double> x) const {
    check_input(x);
    std::vector<double> cur(x.begin(), x.end()), next;
    for (std::size_t l = 0; l < shapes_.size(); ++l) {
      affine(l, cur, next);
      if (l + 1 < shapes_.size()) apply_activation(next);
      cur.swap(next);
    }
    return cur[0];
  }

  /// Forward pass that accumulates dout * d(output)/d(params) into `param_grad`
  /// (when non-null) and returns dout * d(output)/dx in `input_grad` (when
  /// non-null). Returns the output.
  double backprop(std::span<const double> x, double dout, std::vector<double>* param_grad,
                  std::vector<double>* input_grad) const {
    check_input(x);
    // Post-activation values per layer; acts[0] is the input.
    std::vector<std::vector<double>> acts;
    acts.reserve(shapes_.size() + 1);
    acts.emplace_back(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < shapes_.size(); ++l) {
      affine(l, acts.back(), next);
      if (l + 1 < shapes_.size()) apply_activation(next);
      acts.push_back(next);
    }
    const double out = acts.back()[0];

    std::vector<double> delta{dout}, prev_delta;
    for (std::size_t l = shapes_.size(); l-- > 0;) {
      const auto [in, nout] = shapes_[l];
      const double* w = params_.data() + offsets_[l];
      const auto& a_in = acts[l];
      if (param_grad) {
        double* gw = param_grad->data() + offsets_[l];
        for (std::size_t o = 0; o < nout; ++o) {
          const double d = delta[o];
          if (d == 0.0) continue;
          for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += d * a_in[i];
          gw[in * nout + o] += d;
        }
      }
      if (l == 0 && !input_grad) break;
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < nout; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] += w[o * in + i] * d;
      }
      if (l > 0 && activation_ == Activation::tanh)
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] *= 1.0 - a_in[i] * a_in[i];
      delta.swap(prev_delta);
    }
    if (input_grad) *input_grad = delta;
    return out;
  }

 private:
  void check_input(std::span<const double> x) const {
    if (x.size() != input_dim()) throw ValidationError("mlp: input dimension mismatch");
  }

  void affine(std::size_t l, const std::vector<double>& in_vals, std::vector<double>& out) const {
    const auto [in, nout] = shapes_[l];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + in * nout;
    out.assign(nout, 0.0);
    for (std::size_t o = 0; o < nout; ++o) {
      double s = b[o];
      for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * in_vals[i];
      out[o] = s;
    }
  }

  void apply_activation(std::vector<double>& v) const {
    if (activation_ == Activation::tanh)
      for (auto& x : v) x = std::tanh(x);
  }

  std::vector<Shape> shapes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
  Activation activation_ = Activation::tanh;
};

}  // namespace season

#endif  // SEASON_MLP_HPP
