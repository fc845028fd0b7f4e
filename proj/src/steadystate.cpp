#include "nqpt/steadystate.hpp"

#include "nqpt/error.hpp"
#include "nqpt/numerics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nqpt {

namespace {

const double kSqrt8Pi = std::sqrt(8.0 * std::numbers::pi);

constexpr double kWidthLo = 1e-3;
constexpr double kWidthHi = 3.0;
constexpr int kWidthScan = 256;

const std::array<double, kWidthScan + 1>& width_scan_grid() {
    static const auto grid = [] {
        std::array<double, kWidthScan + 1> g{};
        for (int i = 0; i <= kWidthScan; ++i)
            g[i] = kWidthLo * std::pow(kWidthHi / kWidthLo, double(i) / kWidthScan);
        g[kWidthScan] = kWidthHi;
        return g;
    }();
    return grid;
}

// Root u = sigma0^2 of the critical-coupling relation
// V u^2 e^{-u} = 1 + Ng sqrt(u)/sqrt(8 pi) on (0, 2].
double critical_width_sq(const SystemParams& p) {
    auto h = [&](double u) {
        return p.v * u * u * std::exp(-u) - 1.0 - p.ng * std::sqrt(u) / kSqrt8Pi;
    };
    const double h_max = h(2.0);
    if (!(h_max > 0.0)) {
        std::ostringstream os;
        os << "critical-coupling relation has no root with u > 0 (V=" << p.v << ", Ng=" << p.ng
           << ")";
        throw Error(ErrorKind::NoRoot, os.str());
    }
    const double lo = 1e-12;
    return num::bracketed_root(h, lo, 2.0, h(lo), h_max, "lambda_s2");
}

double omega_c_of_width(double u, const SystemParams& p) {
    const double w = breathing_frequency(std::sqrt(u), p);
    return w * w / (32.0 * u);
}

SystemParams with_lambda(SystemParams p, double lambda) {
    p.lambda_coll = lambda;
    return p;
}

// Global minimum of E(gamma) sits at gamma != 0 and is strictly below E(0).
bool broken_is_global(const SystemParams& p) {
    const SteadyState st = find_steady_state(p);
    const double e0 = surface_energy(0.0, p);
    return st.gamma0 != 0.0 && st.energy0 < e0 - 1e-15 * std::max(1.0, std::abs(e0));
}

double coexistence_numeric(const SystemParams& p, double ls2) {
    auto pred = [&](double lambda) { return broken_is_global(with_lambda(p, lambda)); };
    double lo = 0.5 * ls2;
    while (pred(lo)) {
        lo *= 0.5;
        if (lo < 1e-6 * ls2) throw Error(ErrorKind::NoRoot, "coexistence: no normal phase found");
    }
    double hi = ls2 * (1.0 + 1e-7);
    if (!pred(hi)) {
        hi = ls2 * (1.0 + 1e-3);
        if (!pred(hi)) throw Error(ErrorKind::NoRoot, "coexistence: no broken phase found");
    }
    return num::bisect_predicate(pred, lo, hi, 1e-10);
}

} // namespace

const char* to_string(TransitionOrder o) {
    switch (o) {
    case TransitionOrder::second: return "second";
    case TransitionOrder::first_symmetric: return "first_symmetric";
    case TransitionOrder::first_asymmetric: return "first_asymmetric";
    case TransitionOrder::none: return "none";
    }
    return "none";
}

const char* to_string(CritMode m) {
    return m == CritMode::paper_formula ? "paper_formula" : "exact_numeric";
}

CritMode crit_mode_from_string(const std::string& s) {
    if (s == "paper_formula") return CritMode::paper_formula;
    if (s == "exact_numeric") return CritMode::exact_numeric;
    throw Error(ErrorKind::Parse, "mode must be paper_formula or exact_numeric, got '" + s + "'");
}

double solve_width(double gamma, const SystemParams& p) {
    if (!(std::abs(gamma) <= 1.0)) throw Error(ErrorKind::Domain, "|gamma| must be <= 1");
    auto f = [&](double s) { return width_residual(s, gamma, p); };
    const auto& grid = width_scan_grid();
    double s_prev = grid[0];
    double f_prev = f(s_prev);
    for (int i = 1; i <= kWidthScan; ++i) {
        const double s = grid[i];
        const double fs = f(s);
        if (f_prev < 0.0 && fs >= 0.0) {
            double root = num::bracketed_root(f, s_prev, s, f_prev, fs, "solve_width");
            // Newton polish; kept only if it improves the residual.
            const double fr = f(root);
            const double polished = root - fr / width_residual_slope(root, gamma, p);
            if (polished > s_prev && polished < s && std::abs(f(polished)) < std::abs(fr))
                root = polished;
            return root;
        }
        s_prev = s;
        f_prev = fs;
    }
    std::ostringstream os;
    os << "width residual has no sign change in [" << kWidthLo << ", " << kWidthHi
       << "] at gamma=" << gamma;
    throw Error(ErrorKind::NoBracket, os.str());
}

double surface_energy(double gamma, const SystemParams& p) {
    return reduced_potential(gamma, solve_width(gamma, p), p);
}

double surface_slope(double gamma, const SystemParams& p) {
    const double sigma = solve_width(gamma, p);
    const double q = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
    const double c = coupling_factor(gamma, p.chi);
    const double dc = 2.0 * p.chi * gamma + (1.0 - 2.0 * gamma * gamma) / q;
    const double k = p.lambda_coll * p.lambda_coll / p.omega_m_prime();
    // The width is stationary, so only the explicit gamma dependence survives.
    return 2.0 * p.omega_a * gamma - 2.0 * k * c * dc * std::exp(-2.0 * sigma * sigma);
}

std::vector<SurfacePoint> energy_surface(const SystemParams& p, int n_grid) {
    if (n_grid < 3) throw Error(ErrorKind::Domain, "energy_surface needs n_grid >= 3");
    std::vector<SurfacePoint> out(n_grid);
    const int span = n_grid - 1;
    for (int i = 0; i < n_grid; ++i) {
        const double g = double(2 * i - span) / span;
        out[i] = {g, surface_energy(g, p)};
    }
    return out;
}

SteadyState find_steady_state(const SystemParams& p, int n_grid) {
    p.validate();
    const auto surf = energy_surface(p, n_grid);
    const bool symmetric = p.chi == 0.0;
    std::size_t start = 0;
    if (symmetric)
        while (surf[start].gamma < 0.0) ++start;
    std::size_t best_i = start;
    for (std::size_t i = start + 1; i < surf.size(); ++i)
        if (surf[i].energy < surf[best_i].energy) best_i = i;

    double best_g = surf[best_i].gamma;
    double best_e = surf[best_i].energy;
    const double edge = 1.0 - 1e-12;
    auto slope = [&](double g) { return surface_slope(g, p); };
    auto try_cell = [&](std::size_t ia, std::size_t ib) {
        double a = std::max(surf[ia].gamma, -edge);
        double b = std::min(surf[ib].gamma, edge);
        if (symmetric && a < 0.0) return;
        double ga = slope(a);
        if (ga == 0.0) {
            a += 1e-6 * (b - a);
            ga = slope(a);
        }
        double gb = slope(b);
        if (gb == 0.0) {
            b -= 1e-6 * (b - a);
            gb = slope(b);
        }
        if (!(ga < 0.0 && gb > 0.0)) return;
        const double g = num::bracketed_root(slope, a, b, ga, gb, "find_steady_state");
        const double e = surface_energy(g, p);
        if (e < best_e) {
            best_e = e;
            best_g = g;
        }
    };
    if (best_i > 0) try_cell(best_i - 1, best_i);
    if (best_i + 1 < surf.size()) try_cell(best_i, best_i + 1);

    SteadyState st;
    st.gamma0 = best_g;
    st.sigma0 = solve_width(best_g, p);
    st.alpha0 = membrane_amplitude(best_g, st.sigma0, p);
    st.energy0 = reduced_potential(best_g, st.sigma0, p);
    return st;
}

double lambda_s2(const SystemParams& p) {
    p.validate();
    return p.lambda_omega() * std::exp(critical_width_sq(p));
}

LandauExpansion landau_coefficients(const SystemParams& p) {
    p.validate();
    LandauExpansion le;
    le.lambda_s2 = lambda_s2(p);
    const double s = solve_width(0.0, p);
    const double s2 = s * s;
    const double oa = p.omega_a;
    const double chi = p.chi;
    const double r = std::pow(p.lambda_coll / le.lambda_s2, 2);
    le.sigma0 = s;
    le.omega_sigma = breathing_frequency(s, p);
    const double w2 = le.omega_sigma * le.omega_sigma;

    const double d2 = -8.0 * oa * (4.0 / w2) * r * s;
    // Derivatives of the width residual at gamma = 0, used for sigma0''''.
    const double b2 = w2 / 4.0;
    const double b3 = -12.0 / (s2 * s2 * s) + p.v * (4.0 * s2 * s - 6.0 * s) * std::exp(-s2)
                      - 6.0 * p.ng / (kSqrt8Pi * s2 * s2);
    le.d2_sigma = d2;
    le.d3_sigma = 6.0 * chi * d2;
    le.d4_sigma = 12.0 * (chi * chi - 1.0) * d2 + 6.0 * (1.0 - 4.0 * s2) / s * d2 * d2
                  - 3.0 * (b3 / b2) * d2 * d2;

    le.a0 = -0.5 * oa + 0.5 / s2 - 0.5 * p.v * std::exp(-s2) + p.ng / (kSqrt8Pi * s);
    le.a2 = oa * (1.0 - r);
    le.a3 = -2.0 * oa * r * chi;
    le.a4 = oa * r * (1.0 + s * d2 - chi * chi);
    le.a5 = oa * r * (1.0 + 4.0 * s * d2) * chi;
    le.a6 = oa * r / 18.0
            * (24.0 * s * (chi * chi - 1.0) * d2 + 72.0 * chi * chi * s * d2 + s * le.d4_sigma
               + 3.0 * (1.0 - 4.0 * s2) * d2 * d2);
    le.a6_reduced = oa / 6.0 * r
                    * ((1.0 - 4.0 * s2) * d2 * d2 - 12.0 * s * (1.0 - 3.0 * chi * chi) * d2);
    return le;
}

double omega_c(const SystemParams& p) {
    p.validate();
    // Omega_c is evaluated at the current Omega_a and the loop looks for the
    // fixed point Omega_a = Omega_c(Omega_a), halving the step when it grows.
    auto eval = [&](double oa) {
        SystemParams q = p;
        q.omega_a = oa;
        return omega_c_of_width(critical_width_sq(q), q);
    };
    double oa = p.omega_a;
    double theta = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 500; ++it) {
        const double oc = eval(oa);
        const double res = oc - oa;
        if (std::abs(res) <= 1e-8 * std::abs(oc)) return oc;
        if (std::abs(res) > std::abs(prev)) theta *= 0.5;
        oa += theta * res;
        prev = res;
    }
    throw Error(ErrorKind::NoConvergence, "omega_c fixed point did not converge in 500 iterations");
}

FirstOrderMinima first_order_minima(const LandauExpansion& le) {
    if (!(le.a4 < 0.0 && le.a2 > 0.0 && le.a6 > 0.0))
        throw Error(ErrorKind::Domain, "first_order_minima needs a4 < 0, a2 > 0, a6 > 0");
    const double t = le.a4 / (3.0 * le.a6);
    const double radicand = t * t - le.a2 / (3.0 * le.a6);
    if (radicand < 0.0) throw Error(ErrorKind::NoSecondaryMinimum, "sextic has no secondary minimum");
    return {0.0, -t + std::sqrt(radicand)};
}

double lambda_s1(const SystemParams& p, CritMode mode) {
    p.validate();
    if (p.chi != 0.0) throw Error(ErrorKind::ModeMismatch, "lambda_s1 needs chi = 0");
    const double oc = omega_c(p);
    if (p.omega_a < oc * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "lambda_s1 needs omega_a >= omega_c (" << p.omega_a << " < " << oc << ")";
        throw Error(ErrorKind::ModeMismatch, os.str());
    }
    const double ls2 = lambda_s2(p);
    if (mode == CritMode::exact_numeric) return coexistence_numeric(p, ls2);

    const double u = critical_width_sq(p);
    const double rho = oc / p.omega_a;
    auto f = [&](double r) {
        return (rho - r) * (rho - r) - 13.0 / 24.0 * (1.0 - r) * (12.0 * rho + (1.0 / u - 4.0) * r);
    };
    const double r = num::bracketed_root(f, 0.0, 1.0, "lambda_s1");
    return ls2 * std::sqrt(r);
}

double lambda_a1(const SystemParams& p, CritMode mode) {
    p.validate();
    if (p.chi == 0.0) throw Error(ErrorKind::ModeMismatch, "lambda_a1 needs chi != 0");
    const double ls2 = lambda_s2(p);
    if (mode == CritMode::exact_numeric) {
        // E(gamma; -chi) = E(-gamma; chi), so only |chi| matters.
        SystemParams q = p;
        q.chi = std::abs(p.chi);
        return coexistence_numeric(q, ls2);
    }

    const double oc = omega_c(p);
    const double chi2 = p.chi * p.chi;
    if (!(p.omega_a < (1.0 - chi2) * oc)) {
        std::ostringstream os;
        os << "lambda_a1 closed-form relation needs omega_a < (1 - chi^2) omega_c = " << (1.0 - chi2) * oc;
        throw Error(ErrorKind::ModeMismatch, os.str());
    }
    const double rho = oc / p.omega_a;
    auto f = [&](double r) { return (1.0 - r) * (1.0 - chi2 - r / rho) - r * chi2; };
    const double r = num::bracketed_root(f, 0.0, 1.0, "lambda_a1");
    return ls2 * std::sqrt(r);
}

double lambda_spinodal(const SystemParams& p) {
    p.validate();
    SystemParams q = p;
    q.chi = std::abs(p.chi);
    const double ls2 = lambda_s2(q);
    constexpr int kGrid = 1000;
    auto pred = [&](double lambda) {
        const SystemParams s = with_lambda(q, lambda);
        auto slope = [&](double g) { return surface_slope(g, s); };
        int best = 1;
        double best_v = slope(1.0 / kGrid);
        for (int i = 2; i < kGrid; ++i) {
            const double v = slope(double(i) / kGrid);
            if (v < best_v) {
                best_v = v;
                best = i;
            }
        }
        const double lo = double(best - 1) / kGrid;
        const double hi = std::min(double(best + 1) / kGrid, 1.0 - 1e-9);
        const double m = std::min(best_v, num::minimize(slope, std::max(lo, 1e-9), hi).second);
        return m < -1e-12 * q.omega_a;
    };
    if (!pred(ls2)) return ls2;
    double lo = 0.5 * ls2;
    if (pred(lo)) throw Error(ErrorKind::NoRoot, "spinodal below half the critical coupling");
    return num::bisect_predicate(pred, lo, ls2, 1e-10);
}

double lambda_backward_relation(const SystemParams& p) {
    p.validate();
    const double ls2 = lambda_s2(p);
    auto f = [&](double r) {
        const LandauExpansion le = landau_coefficients(with_lambda(p, ls2 * std::sqrt(r)));
        if (p.chi == 0.0) return 4.0 * le.a2 * le.a6_reduced - le.a4 * le.a4;
        return 32.0 * le.a2 * le.a4 - 9.0 * le.a3 * le.a3;
    };
    constexpr double kStep = 0.005;
    double r_prev = 1.0 - 1e-9;
    double f_prev = f(r_prev);
    for (int k = 1; k <= 190; ++k) {
        const double r = 1.0 - k * kStep;
        const double fr = f(r);
        if ((fr > 0.0) != (f_prev > 0.0)) {
            const double root = num::bracketed_root(f, r, r_prev, fr, f_prev, "backward relation");
            return ls2 * std::sqrt(root);
        }
        r_prev = r;
        f_prev = fr;
    }
    throw Error(ErrorKind::NoRoot, "closed-form backward relation has no root for r in [0.05, 1)");
}

TransitionOrder classify_order(const SystemParams& p) {
    p.validate();
    if (p.chi != 0.0) return TransitionOrder::first_asymmetric;
    const LandauExpansion le = landau_coefficients(with_lambda(p, lambda_s2(p)));
    return le.a4 >= 0.0 ? TransitionOrder::second : TransitionOrder::first_symmetric;
}

double critical_coupling(const SystemParams& p, TransitionOrder order, CritMode mode) {
    switch (order) {
    case TransitionOrder::second: return lambda_s2(p);
    case TransitionOrder::first_symmetric: return lambda_s1(p, mode);
    case TransitionOrder::first_asymmetric: return lambda_a1(p, mode);
    case TransitionOrder::none: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<PhaseDiagramCell> phase_diagram(const SystemParams& p, ScanAxis axis, double lo,
                                            double hi, int n, double omega_a_lo,
                                            double omega_a_hi, int m, CritMode mode,
                                            unsigned threads) {
    if (n < 2 || m < 2) throw Error(ErrorKind::Domain, "phase_diagram needs n, m >= 2");
    std::vector<PhaseDiagramCell> cells(std::size_t(n) * m);
    num::parallel_for(cells.size(), threads, [&](std::size_t idx) {
        const int i = int(idx) / m;
        const int j = int(idx) % m;
        PhaseDiagramCell cell;
        cell.scan_value = lo + (hi - lo) * i / (n - 1);
        cell.omega_a = omega_a_lo + (omega_a_hi - omega_a_lo) * j / (m - 1);
        SystemParams q = p;
        (axis == ScanAxis::V ? q.v : q.ng) = cell.scan_value;
        q.omega_a = cell.omega_a;
        try {
            cell.order = classify_order(q);
            cell.lambda_crit = critical_coupling(q, cell.order, mode);
        } catch (const Error&) {
            cell.order = TransitionOrder::none;
            cell.lambda_crit = std::numeric_limits<double>::quiet_NaN();
        }
        cells[idx] = cell;
    });
    return cells;
}

} // namespace nqpt
