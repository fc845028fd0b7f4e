#include "nqpt/numerics.hpp"

#include "nqpt/error.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace nqpt::num {

double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      const std::string& what) {
    return bracketed_root(f, lo, hi, f(lo), f(hi), what);
}

double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      double f_lo, double f_hi, const std::string& what) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || (f_lo > 0.0) == (f_hi > 0.0)) {
        std::ostringstream os;
        os << what << ": no sign change on [" << lo << ", " << hi << "]";
        throw Error(ErrorKind::NoRoot, os.str());
    }
    std::uintmax_t max_iter = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 1);
    auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
    double a = r.first, b = r.second;
    double fa = f(a), fb = f(b);
    return std::abs(fa) <= std::abs(fb) ? a : b;
}

std::pair<double, double> minimize(const std::function<double(double)>& f, double lo, double hi) {
    std::uintmax_t max_iter = 500;
    auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits / 2,
                                                   max_iter);
    return {r.first, r.second};
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi,
                        double rel_tol) {
    for (int it = 0; it < 200 && hi - lo > rel_tol * std::abs(hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace nqpt::num
