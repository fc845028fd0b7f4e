#include "nqpt/gpe.hpp"

#include "nqpt/error.hpp"
#include "nqpt/numerics.hpp"
#include "nqpt/steadystate.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nqpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long kEnergyWindow = 1000;
constexpr double kEnergyTol = 1e-12;  // relative change per unit imaginary time

template <typename T>
std::vector<T> tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& c, const std::vector<T>& d) {
    const std::size_t n = b.size();
    std::vector<double> cp(n);
    std::vector<T> x(n);
    double den = b[0];
    if (den == 0.0) throw Error(ErrorKind::Domain, "tridiagonal: zero pivot");
    cp[0] = c[0] / den;
    x[0] = d[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
        den = b[i] - a[i] * cp[i - 1];
        if (den == 0.0) throw Error(ErrorKind::Domain, "tridiagonal: zero pivot");
        cp[i] = c[i] / den;
        x[i] = (d[i] - a[i] * x[i - 1]) / den;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
    return x;
}

template <typename T>
std::vector<T> cyclic(const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<double>& c, const std::vector<T>& d) {
    const std::size_t n = b.size();
    if (n < 3 || a.size() != n || c.size() != n || d.size() != n)
        throw Error(ErrorKind::Domain, "cyclic tridiagonal: inconsistent sizes");
    const double top = a[0];       // row 0 couples to x[n-1]
    const double bottom = c[n - 1];  // row n-1 couples to x[0]
    const double g = -b[0];
    std::vector<double> bb(b);
    bb[0] = b[0] - g;
    bb[n - 1] = b[n - 1] - bottom * top / g;
    std::vector<T> x = tridiagonal(a, bb, c, d);
    std::vector<double> u(n, 0.0);
    u[0] = g;
    u[n - 1] = bottom;
    const std::vector<double> z = tridiagonal(a, bb, c, u);
    const T fact = (x[0] + top * x[n - 1] / g) / (1.0 + z[0] + top * z[n - 1] / g);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    return x;
}

// Fourth-order compact Laplacian: B L psi = D2 psi with B = I + delta^2/12.
struct Compact {
    int n;
    double h;
    std::vector<double> ba, bb, bc;

    Compact(int n_, double h_) : n(n_), h(h_), ba(n_, 1.0 / 12.0), bb(n_, 5.0 / 6.0), bc(n_, 1.0 / 12.0) {}

    std::vector<cplx> d2(const std::vector<cplx>& f) const {
        std::vector<cplx> out(n);
        const double s = 1.0 / (h * h);
        for (int j = 0; j < n; ++j)
            out[j] = s * (f[(j + n - 1) % n] - 2.0 * f[j] + f[(j + 1) % n]);
        return out;
    }
    std::vector<cplx> b(const std::vector<cplx>& f) const {
        std::vector<cplx> out(n);
        for (int j = 0; j < n; ++j)
            out[j] = (f[(j + n - 1) % n] + 10.0 * f[j] + f[(j + 1) % n]) / 12.0;
        return out;
    }
    // K psi = -L psi
    std::vector<cplx> kinetic(const std::vector<cplx>& f) const {
        std::vector<cplx> r = cyclic(ba, bb, bc, d2(f));
        for (auto& x : r) x = -x;
        return r;
    }
};

double overlap_p(const std::vector<double>& cos2z, const std::vector<cplx>& pm,
                 const std::vector<cplx>& pp, double chi, double h) {
    double s = 0.0;
    for (std::size_t j = 0; j < cos2z.size(); ++j)
        s += cos2z[j] * (chi * std::norm(pp[j]) + std::real(std::conj(pp[j]) * pm[j]));
    return h * s;
}

void normalize(std::vector<cplx>& pm, std::vector<cplx>& pp, double h) {
    double s = 0.0;
    for (std::size_t j = 0; j < pm.size(); ++j) s += std::norm(pm[j]) + std::norm(pp[j]);
    s *= h;
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::NoConvergence, "gpe: field norm collapsed");
    const double f = 1.0 / std::sqrt(s);
    for (auto& x : pm) x *= f;
    for (auto& x : pp) x *= f;
}

double energy_of(const Compact& op, const std::vector<double>& cos2z, const std::vector<cplx>& pm,
                 const std::vector<cplx>& pp, const SystemParams& p) {
    const auto km = op.kinetic(pm);
    const auto kp = op.kinetic(pp);
    double e = 0.0;
    for (int j = 0; j < op.n; ++j) {
        const double nm = std::norm(pm[j]);
        const double np = std::norm(pp[j]);
        const double dens = nm + np;
        e += std::real(std::conj(pm[j]) * km[j] + std::conj(pp[j]) * kp[j]);
        e += -0.5 * p.v * cos2z[j] * dens + 0.5 * p.ng * dens * dens + 0.5 * p.omega_a * (np - nm);
    }
    e *= op.h;
    const double pr = overlap_p(cos2z, pm, pp, p.chi, op.h);
    return e - p.lambda_coll * p.lambda_coll * pr * pr / p.omega_m_prime();
}

std::vector<double> grid_z(int n, double h) {
    std::vector<double> z(n);
    for (int j = 0; j < n; ++j) z[j] = -0.5 * kPi + j * h;
    return z;
}

GpeField solve_once(const SystemParams& p, const GpeOptions& opt) {
    const int n = opt.n_grid;
    const double h = kPi / n;
    const double dt = opt.dtau;
    GpeField f;
    f.n = n;
    f.h = h;
    f.z = grid_z(n, h);
    std::vector<double> cos2z(n);
    for (int j = 0; j < n; ++j) cos2z[j] = std::cos(2.0 * f.z[j]);

    double s0 = 0.3;
    try {
        s0 = solve_width(0.0, p);
    } catch (const Error&) {
    }
    auto& pm = f.psi_minus;
    auto& pp = f.psi_plus;
    pm.resize(n);
    pp.resize(n);
    for (int j = 0; j < n; ++j) {
        pm[j] = std::exp(-f.z[j] * f.z[j] / (2.0 * s0 * s0));
        pp[j] = opt.seed_plus * pm[j];
    }
    normalize(pm, pp, h);

    const Compact op(n, h);
    const double lam = p.lambda_coll;
    const cplx denom(p.omega_m, -p.gamma_m);
    f.alpha = lam * overlap_p(cos2z, pm, pp, p.chi, h) / denom;

    double shift = 0.0;  // running chemical-potential estimate; keeps the step factor near 1
    double e_check = energy_of(op, cos2z, pm, pp, p);
    const double h2 = 1.0 / (h * h);

    std::vector<double> la(n), lb(n), lc(n), wm(n), wp(n);
    std::vector<cplx> rhs(n), u(n);
    auto step_component = [&](std::vector<cplx>& psi, const std::vector<double>& w,
                              const std::vector<cplx>& x) {
        for (int j = 0; j < n; ++j) {
            lb[j] = 5.0 / 6.0 + 0.5 * dt * (2.0 * h2 + 5.0 / 6.0 * w[j]);
            la[j] = 1.0 / 12.0 + 0.5 * dt * (-h2 + w[(j + n - 1) % n] / 12.0);
            lc[j] = 1.0 / 12.0 + 0.5 * dt * (-h2 + w[(j + 1) % n] / 12.0);
            u[j] = w[j] * psi[j] + 2.0 * x[j];
        }
        const auto bpsi = op.b(psi);
        const auto dpsi = op.d2(psi);
        const auto bu = op.b(u);
        for (int j = 0; j < n; ++j) rhs[j] = bpsi[j] + 0.5 * dt * dpsi[j] - 0.5 * dt * bu[j];
        psi = cyclic(la, lb, lc, rhs);
    };

    std::vector<cplx> xm(n), xp(n);
    for (long step = 1; step <= opt.max_steps; ++step) {
        const double ra = lam * f.alpha.real();
        for (int j = 0; j < n; ++j) {
            const double dens = std::norm(pm[j]) + std::norm(pp[j]);
            const double common = -0.5 * p.v * cos2z[j] + p.ng * dens - shift;
            wm[j] = common - 0.5 * p.omega_a;
            wp[j] = common + 0.5 * p.omega_a - 2.0 * ra * p.chi * cos2z[j];
            xm[j] = -ra * cos2z[j] * pp[j];
            xp[j] = -ra * cos2z[j] * pm[j];
        }
        step_component(pm, wm, xm);
        step_component(pp, wp, xp);

        double nrm = 0.0;
        for (int j = 0; j < n; ++j) nrm += std::norm(pm[j]) + std::norm(pp[j]);
        nrm *= h;
        const double c = std::sqrt(nrm);
        if (std::isfinite(c) && c > 0.0) shift += 2.0 * (1.0 - c) / (dt * (1.0 + c));
        normalize(pm, pp, h);
        f.alpha = lam * overlap_p(cos2z, pm, pp, p.chi, h) / denom;

        if (opt.record_energy) f.energy_trace.push_back(energy_of(op, cos2z, pm, pp, p));
        if (step % kEnergyWindow == 0) {
            const double e = energy_of(op, cos2z, pm, pp, p);
            const double rate = std::abs(e - e_check) / (kEnergyWindow * dt * std::max(1.0, std::abs(e)));
            e_check = e;
            if (rate < kEnergyTol) {
                f.steps = step;
                f.converged = true;
                break;
            }
        }
    }
    if (!f.converged) {
        std::ostringstream os;
        os << "gpe: imaginary-time evolution did not converge in " << opt.max_steps
           << " steps (lambda=" << p.lambda_coll << ")";
        throw Error(ErrorKind::NoConvergence, os.str());
    }
    f.energy = energy_of(op, cos2z, pm, pp, p);
    return f;
}

struct GaussFit {
    const std::vector<double>& z;
    const std::vector<double>& y;

    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    int inputs() const { return 2; }
    int values() const { return static_cast<int>(z.size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
        for (std::size_t i = 0; i < z.size(); ++i)
            r[i] = x[0] * std::exp(-z[i] * z[i] / (x[1] * x[1])) - y[i];
        return 0;
    }
    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double e = std::exp(-z[i] * z[i] / (x[1] * x[1]));
            jac(i, 0) = e;
            jac(i, 1) = x[0] * e * 2.0 * z[i] * z[i] / (x[1] * x[1] * x[1]);
        }
        return 0;
    }
};

// Returns the fitted width, or 0 when the component is empty or the fit fails.
double fit_component(const std::vector<double>& z, const std::vector<cplx>& psi, double h, bool& failed) {
    double norm = 0.0;
    for (const auto& x : psi) norm += std::norm(x);
    norm *= h;
    failed = false;
    if (norm < 1e-8) {
        failed = true;
        return 0.0;
    }
    std::vector<double> zs, ys;
    double m0 = 0.0, m2 = 0.0, peak = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (std::abs(z[j]) > 0.25 * kPi + 1e-12) continue;
        const double d = std::norm(psi[j]);
        zs.push_back(z[j]);
        ys.push_back(d);
        m0 += d;
        m2 += d * z[j] * z[j];
        peak = std::max(peak, d);
    }
    if (zs.size() < 3 || !(m0 > 0.0)) {
        failed = true;
        return 0.0;
    }
    Eigen::VectorXd x(2);
    x << peak, std::sqrt(2.0 * m2 / m0);
    GaussFit fn{zs, ys};
    Eigen::LevenbergMarquardt<GaussFit> lm(fn);
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 2000;
    const auto status = lm.minimize(x);
    const double s = std::abs(x[1]);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !std::isfinite(s) || s == 0.0) {
        failed = true;
        return 0.0;
    }
    return s;
}

} // namespace

std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                             const std::vector<double>& c, const std::vector<double>& d) {
    return cyclic(a, b, c, d);
}

GpeField solve_ground(const SystemParams& p, const GpeOptions& opt) {
    p.validate();
    if (opt.n_grid < 64) throw Error(ErrorKind::Domain, "gpe: n_grid must be at least 64");
    if (!(opt.dtau > 0.0)) throw Error(ErrorKind::Domain, "gpe: dtau must be positive");
    if (opt.max_steps < 1) throw Error(ErrorKind::Domain, "gpe: max_steps must be positive");
    GpeField f = solve_once(p, opt);
    if (opt.check_grid) {
        GpeOptions fine = opt;
        fine.n_grid = 2 * opt.n_grid;
        fine.check_grid = false;
        fine.record_energy = false;
        const GpeField g = solve_once(p, fine);
        const double rel = std::abs(g.energy - f.energy) / std::max(1.0, std::abs(g.energy));
        if (rel > 1e-6) {
            std::ostringstream os;
            os << "gpe: doubling n=" << opt.n_grid << " changes the energy by " << rel << " (relative)";
            throw Error(ErrorKind::GridTooCoarse, os.str());
        }
    }
    return f;
}

double gpe_energy(const GpeField& f, const SystemParams& p) {
    const Compact op(f.n, f.h);
    std::vector<double> cos2z(f.n);
    for (int j = 0; j < f.n; ++j) cos2z[j] = std::cos(2.0 * f.z[j]);
    return energy_of(op, cos2z, f.psi_minus, f.psi_plus, p);
}

cplx gpe_membrane_amplitude(const GpeField& f, const SystemParams& p) {
    std::vector<double> cos2z(f.n);
    for (int j = 0; j < f.n; ++j) cos2z[j] = std::cos(2.0 * f.z[j]);
    return p.lambda_coll * overlap_p(cos2z, f.psi_minus, f.psi_plus, p.chi, f.h) /
           cplx(p.omega_m, -p.gamma_m);
}

WidthFit fit_widths(const GpeField& f) {
    WidthFit w;
    w.sigma_minus = fit_component(f.z, f.psi_minus, f.h, w.minus_failed);
    w.sigma_plus = fit_component(f.z, f.psi_plus, f.h, w.plus_failed);
    double s = 0.0;
    for (const auto& x : f.psi_plus) s += std::norm(x);
    w.gamma_fraction = f.h * s;
    return w;
}

double gpe_critical_coupling(const SystemParams& p, const GpeOptions& opt) {
    SystemParams q = p;
    q.lambda_coll = 0.0;
    GpeOptions o = opt;
    o.seed_plus = 0.0;
    o.check_grid = false;
    o.record_energy = false;
    const GpeField g = solve_ground(q, o);
    const int n = g.n;
    const double h = g.h;

    // Dense -B^{-1} D2 on the periodic grid.
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n), d2 = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        b(j, j) = 10.0 / 12.0;
        b(j, (j + 1) % n) = 1.0 / 12.0;
        b(j, (j + n - 1) % n) = 1.0 / 12.0;
        d2(j, j) = -2.0 / (h * h);
        d2(j, (j + 1) % n) = 1.0 / (h * h);
        d2(j, (j + n - 1) % n) = 1.0 / (h * h);
    }
    Eigen::MatrixXd hmat = -b.partialPivLu().solve(d2);
    Eigen::VectorXd phi(n), fvec(n);
    for (int j = 0; j < n; ++j) {
        phi[j] = g.psi_minus[j].real();
        const double c2 = std::cos(2.0 * g.z[j]);
        hmat(j, j) += -0.5 * p.v * c2 + p.ng * phi[j] * phi[j];
        fvec[j] = c2 * phi[j];
    }
    const double mu = h * phi.dot(hmat * phi);
    Eigen::MatrixXd a = 0.5 * (hmat + hmat.transpose());
    a.diagonal().array() += p.omega_a - mu;
    const Eigen::VectorXd x = a.partialPivLu().solve(fvec);
    const double resp = h * fvec.dot(x);
    if (!(resp > 0.0)) throw Error(ErrorKind::Domain, "gpe: non-positive response at the normal state");
    return std::sqrt(p.omega_m_prime() / resp);
}

std::vector<AnsatzRow> validate_ansatz(const SystemParams& p, const std::vector<double>& lambdas,
                                       const GpeOptions& opt, unsigned threads) {
    std::vector<AnsatzRow> rows(lambdas.size());
    num::parallel_for(lambdas.size(), threads, [&](std::size_t i) {
        AnsatzRow& r = rows[i];
        r.lambda = lambdas[i];
        const double nan = std::numeric_limits<double>::quiet_NaN();
        SystemParams q = p;
        q.lambda_coll = lambdas[i];
        double g_seed = 0.0;
        try {
            const SteadyState st = find_steady_state(q);
            r.sigma_gauss = st.sigma0;
            r.gamma_gauss = std::abs(st.gamma0);
            g_seed = st.gamma0;
        } catch (const Error&) {
            r.sigma_gauss = r.gamma_gauss = nan;
            r.flagged = true;
        }
        try {
            GpeField f = solve_ground(q, opt);
            // Imaginary time only finds the local minimum; a first-order broken
            // state needs a seed inside its own basin.
            if (std::abs(g_seed) > 1e-3 && std::abs(g_seed) < 1.0) {
                GpeOptions o = opt;
                o.seed_plus = g_seed / std::sqrt(1.0 - g_seed * g_seed);
                GpeField alt = solve_ground(q, o);
                if (alt.energy < f.energy) f = std::move(alt);
            }
            const WidthFit w = fit_widths(f);
            // Population-weighted width of the components that could be fitted.
            const double wm = w.minus_failed ? 0.0 : 1.0 - w.gamma_fraction;
            const double wp = w.plus_failed ? 0.0 : w.gamma_fraction;
            if (wm + wp > 0.0) r.sigma_gpe = (wm * w.sigma_minus + wp * w.sigma_plus) / (wm + wp);
            else {
                r.sigma_gpe = nan;
                r.flagged = true;
            }
            r.gamma_gpe = std::sqrt(w.gamma_fraction);
        } catch (const Error&) {
            r.sigma_gpe = r.gamma_gpe = nan;
            r.flagged = true;
        }
    });
    return rows;
}

} // namespace nqpt
