#ifndef PFC_SIMPLEX_HPP
#define PFC_SIMPLEX_HPP

#include <algorithm>
#include <functional>
#include <vector>

namespace pfc {

struct SimplexOptions {
  int max_iter = 2000;
  double f_tol = 1e-12;   // relative spread of simplex values
  double x_tol = 1e-10;   // simplex diameter relative to scale
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Nelder-Mead downhill simplex, standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2). step[i] sets the initial simplex extent.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, const std::vector<double>& step,
                                 const SimplexOptions& opts = {}) {
  const size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  std::vector<double> vals(n + 1);
  for (size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  SimplexResult res;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    // order: pts[lo] best, pts[hi] worst
    size_t lo = 0, hi = 0, next_hi = 0;
    for (size_t i = 1; i <= n; ++i) {
      if (vals[i] < vals[lo]) lo = i;
      if (vals[i] > vals[hi]) hi = i;
    }
    for (size_t i = 0; i <= n; ++i)
      if (i != hi && vals[i] > vals[next_hi]) next_hi = i;

    const double spread = std::abs(vals[hi] - vals[lo]);
    const double scale = std::abs(vals[hi]) + std::abs(vals[lo]) + 1e-300;
    double diam = 0.0;
    for (size_t i = 0; i <= n; ++i)
      for (size_t j = 0; j < n; ++j)
        diam = std::max(diam, std::abs(pts[i][j] - pts[lo][j]));
    if (spread <= opts.f_tol * scale || diam <= opts.x_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (size_t i = 0; i <= n; ++i)
      if (i != hi)
        for (size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

    auto blend = [&](double alpha) {
      std::vector<double> p(n);
      for (size_t j = 0; j < n; ++j) p[j] = centroid[j] + alpha * (pts[hi][j] - centroid[j]);
      return p;
    };

    std::vector<double> refl = blend(-1.0);
    double f_refl = f(refl);
    if (f_refl < vals[lo]) {
      std::vector<double> exp_pt = blend(-2.0);
      double f_exp = f(exp_pt);
      if (f_exp < f_refl) {
        pts[hi] = std::move(exp_pt);
        vals[hi] = f_exp;
      } else {
        pts[hi] = std::move(refl);
        vals[hi] = f_refl;
      }
    } else if (f_refl < vals[next_hi]) {
      pts[hi] = std::move(refl);
      vals[hi] = f_refl;
    } else {
      std::vector<double> con = blend(0.5);
      double f_con = f(con);
      if (f_con < vals[hi]) {
        pts[hi] = std::move(con);
        vals[hi] = f_con;
      } else {
        for (size_t i = 0; i <= n; ++i) {
          if (i == lo) continue;
          for (size_t j = 0; j < n; ++j) pts[i][j] = 0.5 * (pts[i][j] + pts[lo][j]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }

  size_t lo = 0;
  for (size_t i = 1; i <= n; ++i)
    if (vals[i] < vals[lo]) lo = i;
  res.x = pts[lo];
  res.value = vals[lo];
  res.iterations = iter;
  return res;
}

}  // namespace pfc

#endif
