#include "mbg/lsf.hpp"

#include <algorithm>
#include <cmath>

#include "mbg/util.hpp"

namespace mbg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// evaluates g_sym(omega) = g[m] + 2 sum_{i=1..m} g[m-i] cos(i*omega) for a
// symmetric polynomial of even degree 2m given as its full coefficient list
double eval_sym(const std::vector<double>& g, double omega) {
  const std::size_t m = (g.size() - 1) / 2;
  const double x = std::cos(omega);
  double acc = g[m];
  double c_prev = 1.0;  // cos(0)
  double c = x;         // cos(omega)
  for (std::size_t i = 1; i <= m; ++i) {
    acc += 2.0 * g[m - i] * c;
    const double c_next = 2.0 * x * c - c_prev;
    c_prev = c;
    c = c_next;
  }
  return acc;
}

// bisection on a bracketing interval, refined to 1e-12 in omega
double bisect_root(const std::vector<double>& g, double lo, double hi,
                   double flo) {
  for (int it = 0; it < 64 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eval_sym(g, mid);
    if ((fm >= 0.0) == (flo >= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// all unit-circle root angles of a symmetric even-degree polynomial,
// grid-scan + bisection; densifies when sign changes are missed
std::vector<double> sym_roots(const std::vector<double>& g,
                              std::size_t expected) {
  for (std::size_t grid = 4096; grid <= (1u << 22); grid *= 4) {
    std::vector<double> roots;
    double prev_omega = 0.0;
    double prev_val = eval_sym(g, prev_omega);
    for (std::size_t j = 1; j <= grid; ++j) {
      const double omega = kPi * double(j) / double(grid);
      const double val = eval_sym(g, omega);
      if ((val >= 0.0) != (prev_val >= 0.0))
        roots.push_back(bisect_root(g, prev_omega, omega, prev_val));
      prev_omega = omega;
      prev_val = val;
    }
    if (roots.size() == expected) return roots;
  }
  fail("lpc_to_lsf: root search failed (" + std::to_string(expected) +
       " roots expected); polynomial is degenerate");
}

// divides a polynomial by (1 + c1 z^-1 + c2 z^-2) given the factor is exact
std::vector<double> deflate(const std::vector<double>& poly, double c1,
                            double c2) {
  std::vector<double> out(poly.size() - (c2 != 0.0 ? 2 : 1), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = poly[i];
    if (i >= 1) v -= c1 * out[i - 1];
    if (i >= 2 && c2 != 0.0) v -= c2 * out[i - 2];
    out[i] = v;
  }
  return out;
}

// enforce exact coefficient symmetry (kills rounding drift)
void symmetrize(std::vector<double>& g) {
  const std::size_t d = g.size() - 1;
  for (std::size_t i = 0; 2 * i <= d; ++i) {
    const double v = 0.5 * (g[i] + g[d - i]);
    g[i] = v;
    g[d - i] = v;
  }
}

std::vector<double> convolve_quadratic(const std::vector<double>& poly,
                                       double b1) {
  // multiply by (1 + b1 z^-1 + z^-2)
  std::vector<double> out(poly.size() + 2, 0.0);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    out[i] += poly[i];
    out[i + 1] += poly[i] * b1;
    out[i + 2] += poly[i];
  }
  return out;
}

}  // namespace

bool lsf_frame_is_ordered(const double* lsf, std::size_t p) {
  double prev = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    if (!(lsf[i] > prev) || !(lsf[i] < kPi)) return false;
    prev = lsf[i];
  }
  return true;
}

std::vector<double> lpc_to_lsf(const std::vector<double>& alpha) {
  const std::size_t p = alpha.size();
  if (p < 1) fail("lpc_to_lsf: empty coefficient vector");
  if (!alpha_is_stable(alpha.data(), p))
    fail("lpc_to_lsf: unstable predictor, conversion refused");

  // A(z) coefficients, then sum/difference polynomials of degree p+1
  std::vector<double> a(p + 2, 0.0);
  a[0] = 1.0;
  for (std::size_t k = 1; k <= p; ++k) a[k] = -alpha[k - 1];
  std::vector<double> psum(p + 2), qdif(p + 2);
  for (std::size_t i = 0; i <= p + 1; ++i) {
    psum[i] = a[i] + a[p + 1 - i];
    qdif[i] = a[i] - a[p + 1 - i];
  }

  std::vector<double> pr, qr;
  if (p % 2 == 0) {
    auto pd = deflate(psum, 1.0, 0.0);   // remove root at z = -1
    auto qd = deflate(qdif, -1.0, 0.0);  // remove root at z = +1
    symmetrize(pd);
    symmetrize(qd);
    pr = sym_roots(pd, p / 2);
    qr = sym_roots(qd, p / 2);
  } else {
    auto qd = deflate(qdif, 0.0, -1.0);  // remove roots at z = +-1
    symmetrize(psum);
    symmetrize(qd);
    pr = sym_roots(psum, (p + 1) / 2);
    qr = p > 1 ? sym_roots(qd, (p - 1) / 2) : std::vector<double>{};
  }

  std::vector<double> lsf;
  lsf.reserve(p);
  for (std::size_t i = 0; i < pr.size(); ++i) {
    lsf.push_back(pr[i]);
    if (i < qr.size()) lsf.push_back(qr[i]);
  }
  if (lsf.size() != p || !lsf_frame_is_ordered(lsf.data(), p))
    fail("lpc_to_lsf: root interleaving failed");
  return lsf;
}

std::vector<double> lsf_to_lpc(const std::vector<double>& lsf) {
  const std::size_t p = lsf.size();
  if (p < 1) fail("lsf_to_lpc: empty frequency vector");
  if (!lsf_frame_is_ordered(lsf.data(), p))
    fail("lsf_to_lpc: frequencies must be strictly increasing in (0, pi)");

  // quadratic factors per root angle: odd-position frequencies belong to the
  // sum polynomial, even-position ones to the difference polynomial
  std::vector<double> pp = {1.0}, qq = {1.0};
  for (std::size_t i = 0; i < p; ++i) {
    const double b1 = -2.0 * std::cos(lsf[i]);
    if (i % 2 == 0)
      pp = convolve_quadratic(pp, b1);
    else
      qq = convolve_quadratic(qq, b1);
  }
  // restore the trivial roots removed during analysis
  if (p % 2 == 0) {
    std::vector<double> pl(pp.size() + 1, 0.0), ql(qq.size() + 1, 0.0);
    for (std::size_t i = 0; i < pp.size(); ++i) {  // times (1 + z^-1)
      pl[i] += pp[i];
      pl[i + 1] += pp[i];
    }
    for (std::size_t i = 0; i < qq.size(); ++i) {  // times (1 - z^-1)
      ql[i] += qq[i];
      ql[i + 1] -= qq[i];
    }
    pp = std::move(pl);
    qq = std::move(ql);
  } else {
    std::vector<double> ql(qq.size() + 2, 0.0);
    for (std::size_t i = 0; i < qq.size(); ++i) {  // times (1 - z^-2)
      ql[i] += qq[i];
      ql[i + 2] -= qq[i];
    }
    qq = std::move(ql);
  }

  std::vector<double> alpha(p, 0.0);
  for (std::size_t k = 1; k <= p; ++k)
    alpha[k - 1] = -0.5 * (pp[k] + qq[k]);
  return alpha;
}

LsfTrack lpc_track_to_lsf(const CoeffTrack& track) {
  LsfTrack out;
  out.order = track.order;
  out.source = track.source;
  out.freqs.resize(track.n_frames(), track.order, 0.0);
  std::vector<double> alpha(track.order);
  for (std::size_t i = 0; i < track.n_frames(); ++i) {
    const double* row = track.coeffs.row(i);
    std::copy(row, row + track.order, alpha.begin());
    const auto lsf = lpc_to_lsf(alpha);
    std::copy(lsf.begin(), lsf.end(), out.freqs.row(i));
  }
  return out;
}

CoeffTrack lsf_track_to_lpc(const LsfTrack& track) {
  CoeffTrack out;
  out.order = track.order;
  out.source = track.source;
  out.coeffs.resize(track.n_frames(), track.order, 0.0);
  out.silent.assign(track.n_frames(), false);
  std::vector<double> lsf(track.order);
  for (std::size_t i = 0; i < track.n_frames(); ++i) {
    const double* row = track.freqs.row(i);
    std::copy(row, row + track.order, lsf.begin());
    const auto alpha = lsf_to_lpc(lsf);
    std::copy(alpha.begin(), alpha.end(), out.coeffs.row(i));
  }
  return out;
}

}  // namespace mbg
