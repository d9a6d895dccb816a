#include <cmath>
#include <vector>

#include "actis/kernels.hpp"
#include "actis/rng.hpp"
#include "doctest.h"

using namespace actis;

namespace {

std::vector<double> randv(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("dot and matvec match hand expansion") {
  const auto* sc = kern::backend_table(kern::Backend::Scalar);
  REQUIRE(sc != nullptr);
  const double a[3] = {1, 2, 3}, b[3] = {4, -5, 6};
  CHECK(sc->dot(3, a, b) == doctest::Approx(4 - 10 + 18));

  // y = Wx + bias, W 2x3 row-major
  const double w[6] = {1, 0, 2, -1, 3, 0.5};
  const double bias[2] = {10, -10};
  const double x[3] = {1, 2, 3};
  double y[2];
  sc->matvec_bias(2, 3, w, bias, x, y);
  CHECK(y[0] == doctest::Approx(1 + 0 + 6 + 10));
  CHECK(y[1] == doctest::Approx(-1 + 6 + 1.5 - 10));

  // out = W^T v
  const double v[2] = {2, -1};
  double out[3];
  sc->matvec_t(2, 3, w, v, out);
  CHECK(out[0] == doctest::Approx(1 * 2 + (-1) * (-1)));
  CHECK(out[1] == doctest::Approx(0 * 2 + 3 * (-1)));
  CHECK(out[2] == doctest::Approx(2 * 2 + 0.5 * (-1)));
}

TEST_CASE("elementwise ops match hand values") {
  const auto* sc = kern::backend_table(kern::Backend::Scalar);
  const double x[4] = {-2, -0.5, 0, 3};
  double y[4];
  sc->leaky_relu(4, 0.01, x, y);
  CHECK(y[0] == doctest::Approx(-0.02));
  CHECK(y[1] == doctest::Approx(-0.005));
  CHECK(y[2] == 0.0);
  CHECK(y[3] == 3.0);

  const double g[4] = {1, 1, 1, 1};
  double gin[4];
  sc->leaky_relu_bwd(4, 0.01, x, g, gin);
  CHECK(gin[0] == doctest::Approx(0.01));
  CHECK(gin[3] == doctest::Approx(1.0));

  const double p[3] = {1, -2, 5}, q[3] = {4, -2, 2};
  double d[3];
  sc->abs_diff(3, p, q, d);
  CHECK(d[0] == 3.0);
  CHECK(d[1] == 0.0);
  CHECK(d[2] == 3.0);
}

TEST_CASE("radam update arithmetic, both branches") {
  const auto* sc = kern::backend_table(kern::Backend::Scalar);
  const double g = 0.5, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double p = 1.0, m = 0.2, v = 0.04;
  // expected by hand
  const double m1 = b1 * m + (1 - b1) * g;
  const double v1 = b2 * v + (1 - b2) * g * g;
  const double inv_bc1 = 1.0 / (1 - 0.81);  // pretend t=2
  const double inv_bc2 = 1.0 / (1 - b2 * b2);

  SUBCASE("warmup branch ignores the variance") {
    sc->radam_update(1, &p, &g, &m, &v, b1, b2, inv_bc1, inv_bc2, 0.01, eps, 0);
    CHECK(m == doctest::Approx(m1).epsilon(1e-15));
    CHECK(v == doctest::Approx(v1).epsilon(1e-15));
    CHECK(p == doctest::Approx(1.0 - 0.01 * m1 * inv_bc1).epsilon(1e-15));
  }
  SUBCASE("rectified branch divides by the corrected rms") {
    sc->radam_update(1, &p, &g, &m, &v, b1, b2, inv_bc1, inv_bc2, 0.01, eps, 1);
    const double expect =
        1.0 - 0.01 * (m1 * inv_bc1) / (std::sqrt(v1 * inv_bc2) + eps);
    CHECK(p == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("vector backend agrees with the scalar reference") {
  if (!kern::backend_available(kern::Backend::Avx2)) return;
  const auto* sc = kern::backend_table(kern::Backend::Scalar);
  const auto* vx = kern::backend_table(kern::Backend::Avx2);
  Rng rng(20240817);

  for (const std::size_t n :
       {std::size_t(1), std::size_t(2), std::size_t(3), std::size_t(4),
        std::size_t(5), std::size_t(7), std::size_t(8), std::size_t(13),
        std::size_t(31), std::size_t(32), std::size_t(100),
        std::size_t(257)}) {
    CAPTURE(n);
    const auto a = randv(rng, n), b = randv(rng, n);

    CHECK(vx->dot(n, a.data(), b.data()) ==
          doctest::Approx(sc->dot(n, a.data(), b.data())).epsilon(1e-12));

    std::vector<double> y1(n), y2(n);
    vx->leaky_relu(n, 0.01, a.data(), y1.data());
    sc->leaky_relu(n, 0.01, a.data(), y2.data());
    check_close(y1, y2);

    vx->leaky_relu_bwd(n, 0.01, a.data(), b.data(), y1.data());
    sc->leaky_relu_bwd(n, 0.01, a.data(), b.data(), y2.data());
    check_close(y1, y2);

    vx->abs_diff(n, a.data(), b.data(), y1.data());
    sc->abs_diff(n, a.data(), b.data(), y2.data());
    check_close(y1, y2);

    y1 = b;
    y2 = b;
    vx->axpy(n, 0.37, a.data(), y1.data());
    sc->axpy(n, 0.37, a.data(), y2.data());
    check_close(y1, y2);

    y1 = a;
    y2 = a;
    vx->scale(n, -1.2, y1.data());
    sc->scale(n, -1.2, y2.data());
    check_close(y1, y2);

    // one radam slot per branch
    for (const int rectified : {0, 1}) {
      auto p1 = a, p2 = a;
      auto m1 = randv(rng, n), v1 = randv(rng, n);
      for (auto& val : v1) val = std::fabs(val);
      auto m2 = m1, v2 = v1;
      vx->radam_update(n, p1.data(), b.data(), m1.data(), v1.data(), 0.9,
                       0.999, 1.5, 1.2, 0.01, 1e-8, rectified);
      sc->radam_update(n, p2.data(), b.data(), m2.data(), v2.data(), 0.9,
                       0.999, 1.5, 1.2, 0.01, 1e-8, rectified);
      check_close(p1, p2);
      check_close(m1, m2);
      check_close(v1, v2);
    }
  }

  for (const auto [rows, cols] :
       {std::pair<std::size_t, std::size_t>{1, 1}, {2, 3}, {3, 5}, {4, 4},
        {5, 8}, {7, 13}, {32, 32}, {33, 17}}) {
    CAPTURE(rows);
    CAPTURE(cols);
    const auto w = randv(rng, rows * cols);
    const auto bias = randv(rng, rows);
    const auto x = randv(rng, cols);
    const auto v = randv(rng, rows);

    std::vector<double> y1(rows), y2(rows);
    vx->matvec_bias(rows, cols, w.data(), bias.data(), x.data(), y1.data());
    sc->matvec_bias(rows, cols, w.data(), bias.data(), x.data(), y2.data());
    check_close(y1, y2);

    std::vector<double> o1(cols), o2(cols);
    vx->matvec_t(rows, cols, w.data(), v.data(), o1.data());
    sc->matvec_t(rows, cols, w.data(), v.data(), o2.data());
    check_close(o1, o2);

    auto w1 = w, w2 = w;
    vx->ger(rows, cols, 0.73, v.data(), x.data(), w1.data());
    sc->ger(rows, cols, 0.73, v.data(), x.data(), w2.data());
    check_close(w1, w2);
  }
}

TEST_CASE("backend can be forced and restored") {
  const auto previous = kern::active_backend();
  kern::force_backend(kern::Backend::Scalar);
  CHECK(kern::active_backend() == kern::Backend::Scalar);
  CHECK(kern::backend_name(kern::active_backend()) == "scalar");
  CHECK(&kern::ops() == kern::backend_table(kern::Backend::Scalar));
  kern::force_backend(previous);
  CHECK(kern::active_backend() == previous);
}

}  // TEST_SUITE
