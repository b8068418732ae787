#include <doctest.h>

#include <cmath>
#include <vector>

#include "mbg/kernels.hpp"
#include "mbg/util.hpp"

using namespace mbg;

namespace {

template <typename T>
std::vector<T> random_vec(RngStream& rng, std::size_t n, double scale = 1.0) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(rng.normal() * scale);
  return v;
}

template <typename T>
void check_close(const std::vector<T>& a, const std::vector<T>& b, double tol) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i], db = b[i];
    const double scale = std::max({std::fabs(da), std::fabs(db), 1.0});
    worst = std::max(worst, std::fabs(da - db) / scale);
  }
  CHECK(worst < tol);
}

// exercises every GEMM-family entry of one variant against the scalar table
template <typename T>
void gemm_family_equivalence(double tol) {
  if (!kernels::avx2_available()) return;
  const auto& ref = kernels::variant<T>(kernels::Variant::scalar);
  const auto& simd = kernels::variant<T>(kernels::Variant::avx2);
  RngStream rng(1234);
  for (auto [m, k, t] : {std::array<std::size_t, 3>{5, 7, 33},
                         std::array<std::size_t, 3>{16, 16, 64},
                         std::array<std::size_t, 3>{3, 64, 257},
                         std::array<std::size_t, 3>{64, 19, 100}}) {
    const auto w = random_vec<T>(rng, m * k);
    const auto x = random_vec<T>(rng, k * t);
    const auto dy = random_vec<T>(rng, m * t);
    const auto dyn = random_vec<T>(rng, t * m);

    auto c1 = random_vec<T>(rng, m * t);
    auto c2 = c1;
    ref.gemm_acc(c1.data(), w.data(), x.data(), m, k, t);
    simd.gemm_acc(c2.data(), w.data(), x.data(), m, k, t);
    check_close(c1, c2, tol);

    auto dx1 = random_vec<T>(rng, k * t);
    auto dx2 = dx1;
    ref.gemm_at_acc(dx1.data(), w.data(), dy.data(), m, k, t, k);
    simd.gemm_at_acc(dx2.data(), w.data(), dy.data(), m, k, t, k);
    check_close(dx1, dx2, tol);

    auto dw1 = random_vec<T>(rng, m * k);
    auto dw2 = dw1;
    ref.gemm_bt_acc(dw1.data(), dy.data(), x.data(), m, k, t);
    simd.gemm_bt_acc(dw2.data(), dy.data(), x.data(), m, k, t);
    check_close(dw1, dw2, tol);

    // fused pairs must agree with two sequential single-output calls of the
    // same variant (bitwise) and with the scalar reference (tolerance)
    const auto wb = random_vec<T>(rng, m * k);
    const auto dyb = random_vec<T>(rng, m * t);
    auto f1 = random_vec<T>(rng, m * t);
    auto f2 = random_vec<T>(rng, m * t);
    auto g1s = f1, g2s = f2;
    simd.gemm_acc2(f1.data(), f2.data(), w.data(), wb.data(), x.data(), m, k,
                   t);
    simd.gemm_acc(g1s.data(), w.data(), x.data(), m, k, t);
    simd.gemm_acc(g2s.data(), wb.data(), x.data(), m, k, t);
    CHECK(f1 == g1s);
    CHECK(f2 == g2s);

    auto bt1 = random_vec<T>(rng, m * k);
    auto bt2 = random_vec<T>(rng, m * k);
    auto bt1r = bt1, bt2r = bt2;
    simd.gemm_bt2_acc(bt1.data(), bt2.data(), dy.data(), dyb.data(), x.data(),
                      m, k, t);
    ref.gemm_bt_acc(bt1r.data(), dy.data(), x.data(), m, k, t);
    ref.gemm_bt_acc(bt2r.data(), dyb.data(), x.data(), m, k, t);
    check_close(bt1, bt1r, tol);
    check_close(bt2, bt2r, tol);

    auto p1 = random_vec<T>(rng, t * m);
    auto p2 = p1;
    // here n := m (position-major output width)
    ref.gemm_xt_acc(p1.data(), x.data(), w.data(), k, t, m, t);
    simd.gemm_xt_acc(p2.data(), x.data(), w.data(), k, t, m, t);
    check_close(p1, p2, tol);

    auto q1 = random_vec<T>(rng, k * t);
    auto q2 = q1;
    ref.gemm_xt_in_acc(q1.data(), dyn.data(), w.data(), k, t, m, t);
    simd.gemm_xt_in_acc(q2.data(), dyn.data(), w.data(), k, t, m, t);
    check_close(q1, q2, tol);

    auto g1 = random_vec<T>(rng, k * m);
    auto g2 = g1;
    ref.ger_rows_acc(g1.data(), x.data(), dyn.data(), k, t, m);
    simd.ger_rows_acc(g2.data(), x.data(), dyn.data(), k, t, m);
    check_close(g1, g2, tol);

    auto v1 = random_vec<T>(rng, m);
    auto v2 = v1;
    const auto xv = random_vec<T>(rng, k);
    ref.matvec_t_acc(v1.data(), x.data(), xv.data(), k, m);
    // x reused as a (k x m) matrix when t == m; pick consistent sizes
    simd.matvec_t_acc(v2.data(), x.data(), xv.data(), k, m);
    check_close(v1, v2, tol);
  }
}

}  // namespace

TEST_CASE("gemm family: scalar oracle checks") {
  // small case verified against a hand-computed product
  const auto& kr = kernels::variant<float>(kernels::Variant::scalar);
  // W = [[1,2],[3,4]], X = [[1,0,2],[0,1,1]]
  std::vector<float> w = {1, 2, 3, 4};
  std::vector<float> x = {1, 0, 2, 0, 1, 1};
  std::vector<float> c(6, 0.0f);
  kr.gemm_acc(c.data(), w.data(), x.data(), 2, 2, 3);
  CHECK(c == std::vector<float>{1, 2, 4, 3, 4, 10});

  // gemm_xt_acc positions-major: C(t x n) += X^T Wt with X (k x t)
  std::vector<float> wt = {1, 2, 3, 4};  // (k=2 x n=2)
  std::vector<float> xx = {1, 0, 0, 1};  // (k=2 x t=2), columns (1,0) (0,1)
  std::vector<float> cc(4, 0.0f);
  kr.gemm_xt_acc(cc.data(), xx.data(), wt.data(), 2, 2, 2, 2);
  CHECK(cc == std::vector<float>{1, 2, 3, 4});
}

TEST_CASE("kernel equivalence: scalar vs avx2 (float)") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not available; skipping");
    return;
  }
  gemm_family_equivalence<float>(2e-4);
}

TEST_CASE("kernel equivalence: scalar vs avx2 (double)") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not available; skipping");
    return;
  }
  gemm_family_equivalence<double>(1e-12);
}

TEST_CASE("gated activation and exp: avx2 matches libm closely") {
  if (!kernels::avx2_available()) return;
  const auto& simd = kernels::variant<float>(kernels::Variant::avx2);
  RngStream rng(99);
  std::vector<float> zf(1000), zg(1000);
  for (std::size_t i = 0; i < zf.size(); ++i) {
    zf[i] = static_cast<float>(rng.uniform(-12.0, 12.0));
    zg[i] = static_cast<float>(rng.uniform(-12.0, 12.0));
  }
  std::vector<float> tv(zf.size()), sv(zf.size()), uv(zf.size());
  simd.gated_act(tv.data(), sv.data(), uv.data(), zf.data(), zg.data(),
                 zf.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < zf.size(); ++i) {
    worst = std::max(worst, std::fabs(double(tv[i]) - std::tanh(double(zf[i]))));
    worst = std::max(worst,
                     std::fabs(double(sv[i]) - 1.0 / (1.0 + std::exp(-double(zg[i])))));
  }
  CHECK(worst < 2e-6);

  std::vector<float> xs(997), es(997);
  for (std::size_t i = 0; i < xs.size(); ++i)
    xs[i] = static_cast<float>(rng.uniform(-80.0, 80.0));
  simd.vexp(es.data(), xs.data(), xs.size());
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = std::exp(double(xs[i]));
    worst_rel = std::max(worst_rel, std::fabs(es[i] - e) / e);
  }
  CHECK(worst_rel < 4e-7);
}

TEST_CASE("nll_grad: both variants agree with straightforward evaluation") {
  RngStream rng(7);
  const std::size_t t = 37, n = 256;
  std::vector<float> logits(t * n);
  for (auto& v : logits) v = static_cast<float>(rng.normal() * 3.0);
  std::vector<std::int32_t> targets(t);
  for (std::size_t i = 0; i < t; ++i)
    targets[i] = (i % 5 == 0) ? -1 : static_cast<std::int32_t>(rng.uniform_int(n));

  auto run = [&](kernels::Variant v, std::vector<float>& dl) {
    dl.assign(t * n, 0.5f);
    return kernels::variant<float>(v).nll_grad(logits.data(), targets.data(),
                                               0, t, n, 2.0f, dl.data());
  };
  std::vector<float> dls, dla;
  const double nll_s = run(kernels::Variant::scalar, dls);

  // independent long-double evaluation
  long double expect = 0.0L;
  for (std::size_t tau = 0; tau < t; ++tau) {
    if (targets[tau] < 0) continue;
    long double mx = logits[tau * n];
    for (std::size_t u = 1; u < n; ++u)
      mx = std::max<long double>(mx, logits[tau * n + u]);
    long double s = 0.0L;
    for (std::size_t u = 0; u < n; ++u)
      s += std::exp((long double)logits[tau * n + u] - mx);
    expect += std::log(s) + mx - (long double)logits[tau * n + targets[tau]];
  }
  CHECK(std::fabs(nll_s - (double)expect) < 1e-9 * std::fabs((double)expect));

  if (kernels::avx2_available()) {
    const double nll_a = run(kernels::Variant::avx2, dla);
    CHECK(std::fabs(nll_a - nll_s) < 1e-5);
    check_close(dls, dla, 1e-4);
  }

  // masked rows produce zero gradient
  for (std::size_t u = 0; u < n; ++u) CHECK(dls[0 * n + u] == 0.0f);
}

TEST_CASE("parallel_blocks covers every index exactly once") {
  std::vector<int> hits(1000, 0);
  parallel_blocks(hits.size(), 64, [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i) hits[i]++;
  });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("rng streams are deterministic and distinct") {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.raw() == b.raw());
  }
  CHECK(a.raw() != c.raw());
  CHECK(derive_seed(1, "x", 0) != derive_seed(1, "x", 1));
  CHECK(derive_seed(1, "x", 0) != derive_seed(1, "y", 0));
  CHECK(derive_seed(1, "x", 2) == derive_seed(1, "x", 2));
}
