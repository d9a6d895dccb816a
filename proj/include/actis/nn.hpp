#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "actis/rng.hpp"

namespace actis {

enum class Activation { LeakyRelu, Sigmoid, Softmax, Identity };

struct LayerSpec {
  int in_dim = 0;
  int out_dim = 0;
  Activation act = Activation::Identity;
};

// Probabilities are clamped to [kProbClip, 1-kProbClip] before logs.
inline constexpr double kProbClip = 1e-7;

// Weights ~ N(0, sqrt(2/in_dim)), biases zero.
void he_normal_init(Rng& rng, int in_dim, int out_dim, std::span<double> w);

void leaky_relu(std::span<const double> x, double slope, std::span<double> y);
void sigmoid(std::span<const double> x, std::span<double> y);
void softmax(std::span<const double> x, std::span<double> y);  // max-shifted

double loss_bce(int y, double p);
double loss_cce(int y, std::span<const double> p);

// Dense feed-forward network; weight matrices are row-major out_dim x in_dim.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<LayerSpec> layers, double leaky_slope, Rng& rng);

  int input_dim() const { return layers_.front().in_dim; }
  int output_dim() const { return layers_.back().out_dim; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  double leaky_slope() const { return slope_; }

  std::vector<double>& weights(int l) { return w_[l]; }
  std::vector<double>& biases(int l) { return b_[l]; }
  const std::vector<double>& weights(int l) const { return w_[l]; }
  const std::vector<double>& biases(int l) const { return b_[l]; }

  // Flattened parameter views, weights then biases per layer; the order
  // matches Gradients::views() and is what the optimizer binds to.
  std::vector<std::span<double>> param_views();

 private:
  std::vector<LayerSpec> layers_;
  std::vector<std::vector<double>> w_, b_;
  double slope_ = 0.01;
};

// Per-layer pre-activations and activations; act[0] is the input.
struct ForwardCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
};

// Runs the network, filling the cache. Returns the head output
// (cache.act.back()). Throws std::invalid_argument on shape mismatch.
const std::vector<double>& forward(const Mlp& net, std::span<const double> x,
                                   ForwardCache& cache);

struct Gradients {
  std::vector<std::vector<double>> gw, gb;

  Gradients() = default;
  explicit Gradients(const Mlp& net);
  void zero();
  void scale(double a);
  std::vector<std::span<const double>> views() const;
};

// Backpropagates from delta = dL/dz at the output layer (the fused head
// deltas below) and accumulates into grads. Optionally returns dL/dinput.
// Softmax is only supported at the head, where the loss fuses its Jacobian.
void backward(const Mlp& net, const ForwardCache& cache,
              std::span<const double> delta_out, Gradients& grads,
              std::vector<double>* input_grad = nullptr);

// Fused head deltas: d(loss)/d(pre-activation) at the output layer.
void delta_softmax_cce(std::span<const double> p, int y, std::span<double> d);
inline double delta_sigmoid_bce(double p, int y) { return p - y; }

// ---------------------------------------------------------------------------

struct RAdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Rectified Adam. Warms up without the adaptive denominator while the
// variance estimate is unreliable (rho_t <= 4), then applies the rectified
// step. Moment buffers are bound to the parameter layout on first use.
class RAdam {
 public:
  explicit RAdam(RAdamConfig cfg = {}) : cfg_(cfg) {}

  void step(const std::vector<std::span<double>>& params,
            const std::vector<std::span<const double>>& grads);

  std::int64_t steps() const { return t_; }
  const RAdamConfig& config() const { return cfg_; }
  void reset();

 private:
  RAdamConfig cfg_;
  std::int64_t t_ = 0;
  double beta1_pow_ = 1.0, beta2_pow_ = 1.0;  // beta^t, kept incrementally
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace actis
