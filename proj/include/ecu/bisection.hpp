#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ecu {

class NotBracketed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BisectionResult {
  double root = 0.0;
  double residual = 0.0;  // |f(root)|
  int iterations = 0;
  bool converged = false;  // residual <= value tolerance
};

struct BisectionOptions {
  double value_tol = 1e-10;
  double x_tol = 1e-15;
  int max_iter = 200;
};

/// Root of a non-decreasing f on [lo, hi], given f(lo) <= 0 <= f(hi) up to
/// value_tol. Halves until the bracket is narrower than x_tol (or stops
/// shrinking), then reports the endpoint with the smaller residual.
template <class F>
BisectionResult bisect_increasing(F&& f, double lo, double hi, BisectionOptions opt = {}) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > opt.value_tol || fhi < -opt.value_tol)
    throw NotBracketed("root not bracketed: f(lo)=" + std::to_string(flo) +
                       ", f(hi)=" + std::to_string(fhi));
  if (flo >= 0.0) return {lo, std::abs(flo), 0, true};
  if (fhi <= 0.0) return {hi, std::abs(fhi), 0, true};

  int it = 0;
  while (it < opt.max_iter && hi - lo > opt.x_tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    ++it;
    if (fm == 0.0) return {mid, 0.0, it, true};
    if (std::isnan(fm)) throw std::runtime_error("bisection hit NaN");
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  BisectionResult r = (-flo <= fhi) ? BisectionResult{lo, -flo, it, false}
                                    : BisectionResult{hi, fhi, it, false};
  r.converged = r.residual <= opt.value_tol;
  return r;
}

}  // namespace ecu
