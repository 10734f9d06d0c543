#pragma once

#include <cstddef>
#include <stdexcept>

#include "auditing/types.hpp"

namespace auditing {

// Exact count/size pair; rate() is the only place a division happens.
struct ErrorCount {
  std::size_t errors = 0;
  std::size_t size = 0;

  double rate() const {
    return static_cast<double>(errors) / static_cast<double>(size);
  }
};

namespace detail {
inline void require_nonempty(const Pool& s) {
  if (s.empty()) throw std::invalid_argument("error metric on an empty sample");
}
}  // namespace detail

template <Hypothesis H>
ErrorCount count_errors(const Pool& s, const H& h) {
  detail::require_nonempty(s);
  ErrorCount out{0, s.size()};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (h.predict(s.point(i)) != s.label(i)) ++out.errors;
  }
  return out;
}

// Counts points that are truly negative but predicted positive.
template <Hypothesis H>
ErrorCount count_negative_errors(const Pool& s, const H& h) {
  detail::require_nonempty(s);
  ErrorCount out{0, s.size()};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.label(i) == Label::negative && h.predict(s.point(i)) == Label::positive) {
      ++out.errors;
    }
  }
  return out;
}

template <Hypothesis H>
double err_on_sample(const Pool& s, const H& h) {
  return count_errors(s, h).rate();
}

template <Hypothesis H>
double err_neg_on_sample(const Pool& s, const H& h) {
  return count_negative_errors(s, h).rate();
}

// Version-space slack test: err_h <= best + (2 nu + nu^2) max(best, eps).
bool v_nu_member(double err_h, double best_err, double eps, double nu);

template <Hypothesis H>
bool v_nu_member(const Pool& s, double eps, double nu, const H& h, double best_err) {
  return v_nu_member(err_on_sample(s, h), best_err, eps, nu);
}

// Largest error count e in [0, n] with v_nu_member(e / n, best_err, eps, nu).
// Returns -1 when even zero errors fail the test (best_err inconsistent).
long long v_nu_error_allowance(std::size_t n, double best_err, double eps, double nu);

}  // namespace auditing
