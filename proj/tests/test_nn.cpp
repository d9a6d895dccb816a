#include <cmath>
#include <stdexcept>
#include <vector>

#include "actis/nn.hpp"
#include "actis/rng.hpp"
#include "doctest.h"

using namespace actis;

namespace {

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-6});
}

double loss_of(const Mlp& net, const std::vector<double>& x, int label,
               bool bce) {
  ForwardCache cache;
  const auto& p = forward(net, x, cache);
  return bce ? loss_bce(label, p[0]) : loss_cce(label, p);
}

// Smallest |pre-activation| across LeakyReLU layers. Finite differences
// sit on the wrong side of the kink when this is tiny, so such draws are
// resampled.
double kink_margin(const Mlp& net, const std::vector<double>& x) {
  ForwardCache cache;
  forward(net, x, cache);
  double margin = 1e9;
  for (int l = 0; l < net.num_layers(); ++l) {
    if (net.layers()[l].act != Activation::LeakyRelu) continue;
    for (const double v : cache.pre[l]) margin = std::min(margin, std::fabs(v));
  }
  return margin;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("activations and losses match hand values") {
  std::vector<double> z{0.0, 1.0, -1.0};
  std::vector<double> out(3);
  sigmoid(z, out);
  CHECK(out[0] == 0.5);
  CHECK(out[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));

  softmax(z, out);
  double sum = 0.0;
  for (const double p : out) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out[1] > out[0]);
  CHECK(out[0] > out[2]);

  CHECK(loss_bce(1, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(loss_bce(0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const std::vector<double> uniform4(4, 0.25);
  CHECK(loss_cce(2, uniform4) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  // clamping keeps the loss finite at the boundary
  CHECK(std::isfinite(loss_bce(1, 0.0)));
  CHECK(std::isfinite(loss_cce(0, std::vector<double>{0.0, 1.0})));
}

TEST_CASE("he initialization has the right spread") {
  Rng rng(101);
  const int in_dim = 50, out_dim = 20000;
  std::vector<double> w(static_cast<std::size_t>(in_dim) * out_dim);
  he_normal_init(rng, in_dim, out_dim, w);

  double mean = 0.0;
  for (const double v : w) mean += v;
  mean /= double(w.size());
  double var = 0.0;
  for (const double v : w) var += (v - mean) * (v - mean);
  var /= double(w.size() - 1);

  const double target = std::sqrt(2.0 / in_dim);
  CHECK(std::fabs(mean) < 3.0 * target / std::sqrt(double(w.size())));
  CHECK(std::sqrt(var) == doctest::Approx(target).epsilon(0.01));
}

TEST_CASE("shape validation") {
  Rng rng(1);
  CHECK_THROWS_AS(Mlp({{2, 3, Activation::LeakyRelu},
                       {4, 2, Activation::Softmax}},
                      0.01, rng),
                  std::invalid_argument);
  Mlp net({{2, 3, Activation::LeakyRelu}, {3, 2, Activation::Softmax}}, 0.01,
          rng);
  ForwardCache cache;
  CHECK_THROWS_AS(forward(net, std::vector<double>{1.0}, cache),
                  std::invalid_argument);
  const auto views = net.param_views();
  REQUIRE(views.size() == 4);  // weights+biases per layer
  CHECK(views[0].size() == 6);
  CHECK(views[1].size() == 3);
  CHECK(views[2].size() == 6);
  CHECK(views[3].size() == 2);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(555);
  const double h = 1e-5;
  int done = 0;
  while (done < 100) {
    const bool bce = rng.uniform() < 0.5;
    const int hidden_layers = static_cast<int>(rng.uniform_int(3));  // 0..2
    const int in_dim = 1 + static_cast<int>(rng.uniform_int(5));
    std::vector<LayerSpec> specs;
    int d = in_dim;
    for (int l = 0; l < hidden_layers; ++l) {
      const int width = 1 + static_cast<int>(rng.uniform_int(5));
      specs.push_back({d, width, Activation::LeakyRelu});
      d = width;
    }
    const int out_dim = bce ? 1 : 2 + static_cast<int>(rng.uniform_int(4));
    specs.push_back({d, out_dim, bce ? Activation::Sigmoid
                                     : Activation::Softmax});

    Mlp net(specs, 0.01, rng);
    std::vector<double> x(in_dim);
    for (auto& v : x) v = rng.uniform(-1.5, 1.5);
    if (kink_margin(net, x) < 1e-3) continue;

    ForwardCache cache;
    const auto& p = forward(net, x, cache);
    const int label = bce ? static_cast<int>(rng.uniform_int(2))
                          : static_cast<int>(rng.uniform_int(out_dim));
    // stay away from the probability clamp, where the fused delta is no
    // longer the exact derivative
    if (bce && (p[0] < 1e-4 || p[0] > 1.0 - 1e-4)) continue;
    if (!bce && p[label] < 1e-4) continue;

    std::vector<double> delta(out_dim);
    if (bce)
      delta[0] = delta_sigmoid_bce(p[0], label);
    else
      delta_softmax_cce(p, label, delta);
    Gradients grads(net);
    std::vector<double> input_grad;
    backward(net, cache, delta, grads, &input_grad);

    for (int l = 0; l < net.num_layers(); ++l) {
      for (const bool weights : {true, false}) {
        auto& params = weights ? net.weights(l) : net.biases(l);
        const auto& analytic = weights ? grads.gw[l] : grads.gb[l];
        for (std::size_t i = 0; i < params.size(); ++i) {
          const double orig = params[i];
          params[i] = orig + h;
          const double lp = loss_of(net, x, label, bce);
          params[i] = orig - h;
          const double lm = loss_of(net, x, label, bce);
          params[i] = orig;
          CHECK(rel_err(analytic[i], (lp - lm) / (2.0 * h)) < 1e-4);
        }
      }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double orig = x[i];
      x[i] = orig + h;
      const double lp = loss_of(net, x, label, bce);
      x[i] = orig - h;
      const double lm = loss_of(net, x, label, bce);
      x[i] = orig;
      CHECK(rel_err(input_grad[i], (lp - lm) / (2.0 * h)) < 1e-4);
    }
    ++done;
  }
}

TEST_CASE("optimizer matches an independent reference trajectory") {
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double rho_inf = 2.0 / (1.0 - b2) - 1.0;

  // the warmup/rectified boundary for these betas
  const auto rho_at = [&](int t) {
    return rho_inf - 2.0 * t * std::pow(b2, t) / (1.0 - std::pow(b2, t));
  };
  CHECK(rho_at(4) <= 4.0);
  CHECK(rho_at(5) > 4.0);

  const std::size_t n = 7;
  std::vector<double> p_ref(n), p_opt(n);
  Rng init(31);
  for (std::size_t i = 0; i < n; ++i) p_ref[i] = p_opt[i] = init.uniform(-1, 1);

  RAdam opt;
  std::vector<double> m(n, 0.0), v(n, 0.0);
  Rng grads_rng(77);
  for (int t = 1; t <= 20; ++t) {
    std::vector<double> g(n);
    for (auto& gi : g) gi = grads_rng.uniform(-1.0, 1.0);

    opt.step({std::span<double>(p_opt)},
             {std::span<const double>(g)});

    const double bc1 = 1.0 - std::pow(b1, t);
    const double bc2 = 1.0 - std::pow(b2, t);
    const double rho = rho_at(t);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      if (rho > 4.0) {
        const double r = std::sqrt(((rho - 4.0) * (rho - 2.0) * rho_inf) /
                                   ((rho_inf - 4.0) * (rho_inf - 2.0) * rho));
        p_ref[i] -= lr * r * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
      } else {
        p_ref[i] -= lr * (m[i] / bc1);
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      CHECK(p_opt[i] == doctest::Approx(p_ref[i]).epsilon(1e-12));
  }
  CHECK(opt.steps() == 20);
}

TEST_CASE("optimizer drives a quadratic to zero") {
  std::vector<double> w{3.0};
  RAdam opt;
  for (int t = 0; t < 5000; ++t) {
    const std::vector<double> g{2.0 * w[0]};
    opt.step({std::span<double>(w)}, {std::span<const double>(g)});
  }
  CHECK(std::fabs(w[0]) < 1e-3);
}

TEST_CASE("long training stays finite") {
  Rng rng(2024);
  Mlp net({{2, 8, Activation::LeakyRelu}, {8, 2, Activation::Softmax}}, 0.01,
          rng);
  RAdam opt;
  Gradients grads(net);
  ForwardCache cache;
  std::vector<double> delta(2);
  const auto params = net.param_views();
  for (int t = 0; t < 1000000; ++t) {
    const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const int label = static_cast<int>(rng.uniform_int(2));
    const auto& p = forward(net, x, cache);
    delta_softmax_cce(p, label, delta);
    grads.zero();
    backward(net, cache, delta, grads);
    opt.step(params, grads.views());
  }
  for (const auto& view : params)
    for (const double v : view) REQUIRE(std::isfinite(v));
  const std::vector<double> x{0.3, -0.4};
  ForwardCache c2;
  const auto& p = forward(net, x, c2);
  CHECK(std::isfinite(loss_cce(0, p)));
}

}  // TEST_SUITE
