#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace pgrad {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  int evaluations = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1,1] (QUADPACK dqk15 tables).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, double& kronrod, double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double res_k = fc * kKronrodWeights[7];
  double res_g = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGK15Nodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    res_k += fsum * kKronrodWeights[i];
    if (i % 2 == 1) res_g += fsum * kGaussWeights[i / 2];
  }
  kronrod = res_k * half;
  err = std::abs((res_k - res_g) * half);
}

}  // namespace detail

// Adaptive bisection with a Gauss-Kronrod 15-point rule per segment.
// Relative tolerance is judged against both the local segment value and the
// running whole-interval estimate, so segments with negligible contribution
// do not force needless refinement near an endpoint.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                    int max_segments = 4096) {
  QuadratureResult out;
  if (a == b) return out;

  struct Seg {
    double a, b, value, err;
  };
  double v0, e0;
  detail::gk15(f, a, b, v0, e0);
  out.evaluations = 15;
  const double whole_scale = std::abs(v0);
  const double length = std::abs(b - a);

  std::vector<Seg> work{{a, b, v0, e0}};
  int segments = 1;
  while (!work.empty()) {
    Seg s = work.back();
    work.pop_back();
    const double local_tol =
        rel_tol * std::max(std::abs(s.value),
                           whole_scale * (std::abs(s.b - s.a) / length));
    if (s.err <= local_tol || segments >= max_segments) {
      out.value += s.value;
      out.error_estimate += s.err;
      if (s.err > local_tol) out.converged = false;
      continue;
    }
    const double m = 0.5 * (s.a + s.b);
    Seg left{s.a, m, 0, 0}, right{m, s.b, 0, 0};
    detail::gk15(f, left.a, left.b, left.value, left.err);
    detail::gk15(f, right.a, right.b, right.value, right.err);
    out.evaluations += 30;
    ++segments;
    work.push_back(left);
    work.push_back(right);
  }
  return out;
}

}  // namespace pgrad
