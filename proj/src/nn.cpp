#include "actis/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "actis/kernels.hpp"

namespace actis {

void he_normal_init(Rng& rng, int in_dim, int out_dim, std::span<double> w) {
  if (in_dim < 1 || out_dim < 1)
    throw std::invalid_argument("he_normal_init: dims must be >= 1");
  const double stddev = std::sqrt(2.0 / in_dim);
  for (double& v : w) v = rng.normal(0.0, stddev);
}

void leaky_relu(std::span<const double> x, double slope, std::span<double> y) {
  kern::ops().leaky_relu(x.size(), slope, x.data(), y.data());
}

void sigmoid(std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void softmax(std::span<const double> x, std::span<double> y) {
  double mx = x[0];
  for (double v : x) mx = std::max(mx, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - mx);
    sum += y[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) y[i] /= sum;
}

namespace {
double clamp_prob(double p) {
  return std::clamp(p, kProbClip, 1.0 - kProbClip);
}
}  // namespace

double loss_bce(int y, double p) {
  p = clamp_prob(p);
  return -(y * std::log(p) + (1 - y) * std::log(1.0 - p));
}

double loss_cce(int y, std::span<const double> p) {
  if (y < 0 || static_cast<std::size_t>(y) >= p.size())
    throw std::invalid_argument("loss_cce: label out of range");
  return -std::log(clamp_prob(p[y]));
}

// ---------------------------------------------------------------------------

Mlp::Mlp(std::vector<LayerSpec> layers, double leaky_slope, Rng& rng)
    : layers_(std::move(layers)), slope_(leaky_slope) {
  if (layers_.empty()) throw std::invalid_argument("Mlp: no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& spec = layers_[l];
    if (spec.in_dim < 1 || spec.out_dim < 1)
      throw std::invalid_argument("Mlp: layer dims must be >= 1");
    if (l > 0 && spec.in_dim != layers_[l - 1].out_dim)
      throw std::invalid_argument("Mlp: layer shapes do not chain");
    w_.emplace_back(static_cast<std::size_t>(spec.out_dim) * spec.in_dim);
    b_.emplace_back(spec.out_dim, 0.0);
    he_normal_init(rng, spec.in_dim, spec.out_dim, w_.back());
  }
}

std::vector<std::span<double>> Mlp::param_views() {
  std::vector<std::span<double>> out;
  out.reserve(2 * w_.size());
  for (std::size_t l = 0; l < w_.size(); ++l) {
    out.emplace_back(w_[l]);
    out.emplace_back(b_[l]);
  }
  return out;
}

const std::vector<double>& forward(const Mlp& net, std::span<const double> x,
                                   ForwardCache& cache) {
  const int L = net.num_layers();
  if (static_cast<int>(x.size()) != net.input_dim())
    throw std::invalid_argument("forward: input size mismatch");
  cache.pre.resize(L);
  cache.act.resize(L + 1);
  cache.act[0].assign(x.begin(), x.end());
  for (int l = 0; l < L; ++l) {
    const auto& spec = net.layers()[l];
    auto& z = cache.pre[l];
    auto& a = cache.act[l + 1];
    z.resize(spec.out_dim);
    a.resize(spec.out_dim);
    kern::ops().matvec_bias(spec.out_dim, spec.in_dim, net.weights(l).data(),
                            net.biases(l).data(), cache.act[l].data(),
                            z.data());
    switch (spec.act) {
      case Activation::LeakyRelu:
        leaky_relu(z, net.leaky_slope(), a);
        break;
      case Activation::Sigmoid:
        sigmoid(z, a);
        break;
      case Activation::Softmax:
        softmax(z, a);
        break;
      case Activation::Identity:
        a = z;
        break;
    }
  }
  return cache.act.back();
}

Gradients::Gradients(const Mlp& net) {
  for (int l = 0; l < net.num_layers(); ++l) {
    gw.emplace_back(net.weights(l).size(), 0.0);
    gb.emplace_back(net.biases(l).size(), 0.0);
  }
}

void Gradients::zero() {
  for (auto& g : gw) std::fill(g.begin(), g.end(), 0.0);
  for (auto& g : gb) std::fill(g.begin(), g.end(), 0.0);
}

void Gradients::scale(double a) {
  for (auto& g : gw) kern::ops().scale(g.size(), a, g.data());
  for (auto& g : gb) kern::ops().scale(g.size(), a, g.data());
}

std::vector<std::span<const double>> Gradients::views() const {
  std::vector<std::span<const double>> out;
  out.reserve(2 * gw.size());
  for (std::size_t l = 0; l < gw.size(); ++l) {
    out.emplace_back(gw[l]);
    out.emplace_back(gb[l]);
  }
  return out;
}

void backward(const Mlp& net, const ForwardCache& cache,
              std::span<const double> delta_out, Gradients& grads,
              std::vector<double>* input_grad) {
  const int L = net.num_layers();
  std::vector<double> delta(delta_out.begin(), delta_out.end());
  std::vector<double> next;
  for (int l = L - 1; l >= 0; --l) {
    const auto& spec = net.layers()[l];
    kern::ops().ger(spec.out_dim, spec.in_dim, 1.0, delta.data(),
                    cache.act[l].data(), grads.gw[l].data());
    kern::ops().axpy(spec.out_dim, 1.0, delta.data(), grads.gb[l].data());
    if (l == 0 && !input_grad) break;
    next.resize(spec.in_dim);
    kern::ops().matvec_t(spec.out_dim, spec.in_dim, net.weights(l).data(),
                         delta.data(), next.data());
    if (l > 0) {
      const auto& prev = net.layers()[l - 1];
      switch (prev.act) {
        case Activation::LeakyRelu:
          kern::ops().leaky_relu_bwd(next.size(), net.leaky_slope(),
                                     cache.pre[l - 1].data(), next.data(),
                                     next.data());
          break;
        case Activation::Sigmoid:
          for (std::size_t i = 0; i < next.size(); ++i) {
            const double a = cache.act[l][i];
            next[i] *= a * (1.0 - a);
          }
          break;
        case Activation::Identity:
          break;
        case Activation::Softmax:
          throw std::logic_error(
              "backward: softmax is only supported at the output layer");
      }
    }
    delta.swap(next);
  }
  if (input_grad) *input_grad = delta;
}

void delta_softmax_cce(std::span<const double> p, int y, std::span<double> d) {
  for (std::size_t i = 0; i < p.size(); ++i)
    d[i] = p[i] - (static_cast<int>(i) == y ? 1.0 : 0.0);
}

// ---------------------------------------------------------------------------

void RAdam::reset() {
  t_ = 0;
  beta1_pow_ = beta2_pow_ = 1.0;
  m_.clear();
  v_.clear();
}

void RAdam::step(const std::vector<std::span<double>>& params,
                 const std::vector<std::span<const double>>& grads) {
  if (params.size() != grads.size())
    throw std::invalid_argument("RAdam: parameter/gradient slot mismatch");
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.size(), 0.0);
      v_.emplace_back(p.size(), 0.0);
    }
  }
  if (m_.size() != params.size())
    throw std::invalid_argument("RAdam: bound to a different layout");

  ++t_;
  beta1_pow_ *= cfg_.beta1;
  beta2_pow_ *= cfg_.beta2;
  const double inv_bc1 = 1.0 / (1.0 - beta1_pow_);
  const double inv_bc2 = 1.0 / (1.0 - beta2_pow_);
  const double rho_inf = 2.0 / (1.0 - cfg_.beta2) - 1.0;
  const double rho_t =
      rho_inf - 2.0 * static_cast<double>(t_) * beta2_pow_ / (1.0 - beta2_pow_);

  double step_scale = cfg_.lr;
  const bool rectified = rho_t > 4.0;
  if (rectified) {
    const double r_t = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                                 ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
    step_scale *= r_t;
  }

  for (std::size_t s = 0; s < params.size(); ++s) {
    if (params[s].size() != grads[s].size() || params[s].size() != m_[s].size())
      throw std::invalid_argument("RAdam: slot size mismatch");
    kern::ops().radam_update(params[s].size(), params[s].data(),
                             grads[s].data(), m_[s].data(), v_[s].data(),
                             cfg_.beta1, cfg_.beta2, inv_bc1, inv_bc2,
                             step_scale, cfg_.eps, rectified ? 1 : 0);
  }
}

}  // namespace actis
