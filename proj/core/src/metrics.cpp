#include "auditing/metrics.hpp"

#include <algorithm>

namespace auditing {

bool v_nu_member(double err_h, double best_err, double eps, double nu) {
  const double slack = (2.0 * nu + nu * nu) * std::max(best_err, eps);
  return err_h <= best_err + slack;
}

long long v_nu_error_allowance(std::size_t n, double best_err, double eps, double nu) {
  // Membership is monotone in the error count, so bisect on the same
  // predicate the scalar test uses; callers then agree bit-for-bit.
  auto ok = [&](long long e) {
    return v_nu_member(static_cast<double>(e) / static_cast<double>(n), best_err, eps, nu);
  };
  if (n == 0 || !ok(0)) return -1;
  long long lo = 0;
  long long hi = static_cast<long long>(n);
  if (ok(hi)) return hi;
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace auditing
