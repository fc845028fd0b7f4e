#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>

namespace nqpt::num {

// Root of f in [lo, hi] where f(lo) and f(hi) have opposite signs (or one is
// zero). Converges to full double precision. Throws Error(NoRoot) otherwise.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      const std::string& what);

// Same, with the endpoint values already known.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      double f_lo, double f_hi, const std::string& what);

// Local minimum of f on [lo, hi] (Brent). Returns (x, f(x)).
std::pair<double, double> minimize(const std::function<double(double)>& f, double lo, double hi);

// Bisection on a monotone predicate: pred(lo) == false, pred(hi) == true.
// Returns the midpoint of the final interval once hi - lo <= rel_tol * |hi|.
double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi,
                        double rel_tol);

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once; callers write results into slot i.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace nqpt::num
