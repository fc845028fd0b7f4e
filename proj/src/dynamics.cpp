#include "nqpt/dynamics.hpp"

#include "nqpt/error.hpp"
#include "nqpt/steadystate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nqpt {

namespace {

const double kSqrt8Pi = std::sqrt(8.0 * std::numbers::pi);
constexpr cplx kI{0.0, 1.0};

using Packed = std::array<double, 8>;

Packed pack(const MeanFieldState& s) {
    return {s.alpha.real(),      s.alpha.imag(),      s.gamma_minus.real(), s.gamma_minus.imag(),
            s.gamma_plus.real(), s.gamma_plus.imag(), s.sigma,              s.sigma_dot};
}

MeanFieldState unpack(const Packed& y) {
    MeanFieldState s;
    s.alpha = {y[0], y[1]};
    s.gamma_minus = {y[2], y[3]};
    s.gamma_plus = {y[4], y[5]};
    s.sigma = y[6];
    s.sigma_dot = y[7];
    return s;
}

Packed pack(const MeanFieldRate& r) {
    return {r.d_alpha.real(),      r.d_alpha.imag(),      r.d_gamma_minus.real(),
            r.d_gamma_minus.imag(), r.d_gamma_plus.real(), r.d_gamma_plus.imag(),
            r.d_sigma,             r.d_sigma_dot};
}

Packed rhs(const Packed& y, const SystemParams& p) { return pack(eom_rhs(unpack(y), p)); }

Packed rk4_step(const Packed& y, const SystemParams& p, double h) {
    auto axpy = [](const Packed& a, double c, const Packed& b) {
        Packed out;
        for (int i = 0; i < 8; ++i) out[i] = a[i] + c * b[i];
        return out;
    };
    const Packed k1 = rhs(y, p);
    const Packed k2 = rhs(axpy(y, 0.5 * h, k1), p);
    const Packed k3 = rhs(axpy(y, 0.5 * h, k2), p);
    const Packed k4 = rhs(axpy(y, h, k3), p);
    Packed out;
    for (int i = 0; i < 8; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

double inf_norm(const ReducedState& y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
}

double frequency_scale(const SystemParams& p) { return std::max({p.omega_m, p.omega_a, 1.0}); }

Eigen::Matrix<double, 6, 6> reduced_jacobian(const ReducedState& y, const SystemParams& p) {
    Eigen::Matrix<double, 6, 6> j;
    for (int c = 0; c < 6; ++c) {
        const double h = 1e-7 * std::max(1.0, std::abs(y[c]));
        ReducedState yp = y, ym = y;
        yp[c] += h;
        ym[c] -= h;
        const ReducedState fp = reduced_rhs(yp, p);
        const ReducedState fm = reduced_rhs(ym, p);
        for (int r = 0; r < 6; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }
    return j;
}

void clamp_z(ReducedState& y) {
    const double z = std::hypot(y[2], y[3]);
    constexpr double kMax = 1.0 - 1e-12;
    if (z > kMax) {
        y[2] *= kMax / z;
        y[3] *= kMax / z;
    }
    y[4] = std::max(y[4], 1e-3);
}

} // namespace

const char* to_string(SweepDirection d) { return d == SweepDirection::forward ? "forward" : "backward"; }

PotentialGradient potential_gradient(const MeanFieldState& s, const SystemParams& p) {
    if (!(s.sigma > 0.0)) throw Error(ErrorKind::Domain, "sigma must be > 0");
    const double e = std::exp(-s.sigma * s.sigma);
    const double lam = p.lambda_coll;
    const double two_re_a = 2.0 * s.alpha.real();
    const double pol = p.chi * std::norm(s.gamma_plus)
                       + std::real(std::conj(s.gamma_plus) * s.gamma_minus);
    PotentialGradient g;
    g.d_alpha_conj = p.omega_m * s.alpha - lam * pol * e;
    g.d_gamma_plus_conj =
        0.5 * p.omega_a * s.gamma_plus - lam * two_re_a * e * (p.chi * s.gamma_plus + 0.5 * s.gamma_minus);
    g.d_gamma_minus_conj = -0.5 * p.omega_a * s.gamma_minus - lam * two_re_a * e * 0.5 * s.gamma_plus;
    const double sg = s.sigma;
    g.d_sigma = -1.0 / (sg * sg * sg) + p.v * sg * e - p.ng / (kSqrt8Pi * sg * sg)
                + 2.0 * sg * lam * two_re_a * pol * e;
    return g;
}

MeanFieldRate eom_rhs(const MeanFieldState& s, const SystemParams& p) {
    const PotentialGradient g = potential_gradient(s, p);
    MeanFieldRate r;
    r.d_alpha = -kI * g.d_alpha_conj - p.gamma_m * s.alpha;
    r.d_gamma_minus = -kI * g.d_gamma_minus_conj;
    r.d_gamma_plus = -kI * g.d_gamma_plus_conj;
    r.d_sigma = s.sigma_dot;
    r.d_sigma_dot = -4.0 * g.d_sigma;
    return r;
}

double chemical_potential(const MeanFieldState& s, const SystemParams& p) {
    const PotentialGradient g = potential_gradient(s, p);
    return std::real(std::conj(s.gamma_minus) * g.d_gamma_minus_conj
                     + std::conj(s.gamma_plus) * g.d_gamma_plus_conj)
           / s.norm();
}

double default_time_step(const SystemParams& p) { return 0.005 / std::max(p.omega_m, p.omega_a); }

MeanFieldState integrate(const MeanFieldState& s, const SystemParams& p, double t_final, double dt) {
    if (!(dt > 0.0) || !(t_final >= 0.0)) throw Error(ErrorKind::Domain, "need dt > 0 and t_final >= 0");
    double fastest = std::max(p.omega_m, p.omega_a);
    try {
        fastest = std::max(fastest, breathing_frequency(solve_width(0.0, p), p));
    } catch (const Error&) {
    }
    if (!(dt < 0.1 / fastest)) {
        std::ostringstream os;
        os << "dt=" << dt << " must be below 0.1/" << fastest;
        throw Error(ErrorKind::Domain, os.str());
    }
    const double n0 = s.norm();
    const long steps = std::max(1L, long(std::ceil(t_final / dt - 1e-9)));
    const double h = t_final / double(steps);
    Packed y = pack(s);
    if (t_final > 0.0)
        for (long k = 0; k < steps; ++k) y = rk4_step(y, p, h);
    MeanFieldState out = unpack(y);
    const double drift = std::abs(out.norm() - n0);
    if (drift > 1e-6) {
        std::ostringstream os;
        os << "norm drift " << drift << " with dt=" << dt;
        throw Error(ErrorKind::StepTooLarge, os.str());
    }
    return out;
}

ReducedState reduce(const MeanFieldState& s) {
    const double gm = std::abs(s.gamma_minus);
    const cplx z = gm > 0.0 ? s.gamma_plus * std::conj(s.gamma_minus) / gm : s.gamma_plus;
    return {s.alpha.real(), s.alpha.imag(), z.real(), z.imag(), s.sigma, s.sigma_dot};
}

MeanFieldState expand(const ReducedState& y) {
    MeanFieldState s;
    s.alpha = {y[0], y[1]};
    const cplx z{y[2], y[3]};
    s.gamma_plus = z;
    s.gamma_minus = std::sqrt(std::max(0.0, 1.0 - std::norm(z)));
    s.sigma = y[4];
    s.sigma_dot = y[5];
    return s;
}

ReducedState reduced_rhs(const ReducedState& y, const SystemParams& p) {
    const MeanFieldState s = expand(y);
    const MeanFieldRate r = eom_rhs(s, p);
    // Co-moving frame of gamma_-: subtract its phase velocity from z.
    const double phase_rate = s.gamma_minus.real() > 0.0
                                  ? std::imag(r.d_gamma_minus / s.gamma_minus)
                                  : 0.0;
    const cplx dz = r.d_gamma_plus - kI * phase_rate * s.gamma_plus;
    return {r.d_alpha.real(), r.d_alpha.imag(), dz.real(), dz.imag(), r.d_sigma, r.d_sigma_dot};
}

FixedPointInfo polish_fixed_point(const ReducedState& y0, const SystemParams& p) {
    FixedPointInfo info;
    ReducedState y = y0;
    clamp_z(y);
    const double scale = frequency_scale(p);
    ReducedState f = reduced_rhs(y, p);
    bool small_step = false;
    for (int it = 0; it < 60; ++it) {
        const auto j = reduced_jacobian(y, p);
        Eigen::Matrix<double, 6, 1> rhs_vec;
        for (int i = 0; i < 6; ++i) rhs_vec(i) = -f[i];
        const Eigen::Matrix<double, 6, 1> dy = j.colPivHouseholderQr().solve(rhs_vec);
        if (!dy.allFinite()) break;
        double step = 1.0;
        ReducedState trial{};
        ReducedState f_trial{};
        const double f0 = inf_norm(f);
        for (int ls = 0; ls < 30; ++ls) {
            for (int i = 0; i < 6; ++i) trial[i] = y[i] + step * dy(i);
            clamp_z(trial);
            f_trial = reduced_rhs(trial, p);
            if (inf_norm(f_trial) <= (1.0 - 1e-4 * step) * f0 || f0 == 0.0) break;
            step *= 0.5;
        }
        double dy_norm = 0.0;
        for (int i = 0; i < 6; ++i) dy_norm = std::max(dy_norm, std::abs(trial[i] - y[i]));
        y = trial;
        f = f_trial;
        if (dy_norm < 1e-13 * (1.0 + inf_norm(y))) {
            small_step = true;
            break;
        }
    }
    info.y = y;
    info.converged = small_step && inf_norm(f) < 1e-8 * scale;
    if (!info.converged) return info;
    const auto j = reduced_jacobian(y, p);
    const Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(j, false);
    double max_re = -std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    for (int i = 0; i < 6; ++i) {
        max_re = std::max(max_re, es.eigenvalues()(i).real());
        max_abs = std::max(max_abs, std::abs(es.eigenvalues()(i)));
    }
    info.max_growth = max_re;
    info.stable = max_re <= 1e-6 * std::max(max_abs, 1.0);
    return info;
}

RelaxResult relax(const MeanFieldState& s0, const SystemParams& p, const RelaxOptions& opt) {
    if (!(p.gamma_m > 0.0)) throw Error(ErrorKind::Domain, "relax needs gamma_m > 0");
    const double dt = opt.dt > 0.0 ? opt.dt : default_time_step(p);
    const double chunk = opt.chunk > 0.0 ? opt.chunk : 10.0 / p.gamma_m;
    const double t_max = opt.t_max > 0.0 ? opt.t_max : 1e4 / p.gamma_m;
    const long steps = std::max(1L, long(std::llround(chunk / dt)));
    const double h = chunk / double(steps);

    RelaxResult res;
    Packed y = pack(s0);
    double t = 0.0;
    while (t < t_max * (1.0 - 1e-12)) {
        ReducedState sum{}, lo, hi;
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
        for (long k = 0; k < steps; ++k) {
            y = rk4_step(y, p, h);
            const ReducedState r = reduce(unpack(y));
            for (int i = 0; i < 6; ++i) {
                sum[i] += r[i];
                lo[i] = std::min(lo[i], r[i]);
                hi[i] = std::max(hi[i], r[i]);
            }
        }
        t += chunk;
        const MeanFieldState cur = unpack(y);
        if (!std::isfinite(cur.sigma) || !(cur.sigma > 0.0)) break;
        const ReducedState yr = reduce(cur);
        if (inf_norm(reduced_rhs(yr, p)) < opt.rate_tol) {
            res.state = cur;
            res.converged = true;
            res.time = t;
            return res;
        }
        ReducedState avg;
        for (int i = 0; i < 6; ++i) avg[i] = sum[i] / double(steps);
        const FixedPointInfo fp = polish_fixed_point(avg, p);
        // Either close to the chunk average, or enclosed by the chunk's orbit
        // (slow, weakly damped breathing oscillation after a jump).
        bool inside = true;
        for (int i : {2, 3, 4}) {
            const double pad = 1e-3 * std::max(1.0, std::abs(fp.y[i]));
            inside = inside && fp.y[i] >= lo[i] - pad && fp.y[i] <= hi[i] + pad;
        }
        const bool near = inside || (std::hypot(fp.y[2] - avg[2], fp.y[3] - avg[3]) < 0.05
                                     && std::abs(fp.y[4] - avg[4]) < 0.05 * fp.y[4]);
        if (fp.converged && fp.stable && near) {
            res.state = expand(fp.y);
            res.converged = true;
            res.polished = true;
            res.time = t;
            return res;
        }
    }
    res.state = unpack(y);
    res.converged = false;
    res.time = t;
    return res;
}

SweepResult adiabatic_sweep(const SystemParams& p, double lambda_lo, double lambda_hi, int n_steps,
                            SweepDirection direction, const RelaxOptions& opt) {
    p.validate();
    if (n_steps < 10) throw Error(ErrorKind::Domain, "adiabatic_sweep needs n_steps >= 10");
    if (!(lambda_lo < lambda_hi) || lambda_lo < 0.0)
        throw Error(ErrorKind::Domain, "adiabatic_sweep needs 0 <= lambda_lo < lambda_hi");
    const int n = n_steps + 1;
    SweepResult out;
    out.direction = direction;
    out.lambdas.resize(n);
    out.gamma_inf.resize(n);
    out.alpha_inf.resize(n);
    out.sigma_inf.resize(n);
    out.gamma_signed.resize(n);
    out.converged.resize(n);
    for (int k = 0; k < n; ++k) out.lambdas[k] = lambda_lo + (lambda_hi - lambda_lo) * k / n_steps;

    const bool fwd = direction == SweepDirection::forward;
    SystemParams q = p;
    q.lambda_coll = fwd ? lambda_lo : lambda_hi;
    MeanFieldState state;
    if (fwd) {
        state.sigma = solve_width(0.0, q);
    } else {
        const SteadyState st = find_steady_state(q);
        state.alpha = st.alpha0;
        state.gamma_plus = st.gamma0;
        state.gamma_minus = std::sqrt(1.0 - st.gamma0 * st.gamma0);
        state.sigma = st.sigma0;
    }
    for (int step = 0; step < n; ++step) {
        const int k = fwd ? step : n - 1 - step;
        q.lambda_coll = out.lambdas[k];
        state.gamma_plus += 1e-6;
        const double norm = std::sqrt(state.norm());
        state.gamma_plus /= norm;
        state.gamma_minus /= norm;
        const RelaxResult r = relax(state, q, opt);
        state = r.state;
        const ReducedState y = reduce(state);
        out.gamma_inf[k] = std::abs(state.gamma_plus) / std::sqrt(state.norm());
        out.gamma_signed[k] = y[2];
        out.alpha_inf[k] = state.alpha;
        out.sigma_inf[k] = state.sigma;
        out.converged[k] = r.converged;
    }
    return out;
}

JumpPoints detect_jumps(const SweepResult& forward, const SweepResult& backward, double threshold,
                        double sentinel) {
    if (forward.lambdas != backward.lambdas)
        throw Error(ErrorKind::Domain, "detect_jumps needs identical coupling grids");
    JumpPoints jp;
    jp.lambda_f = jp.lambda_b = sentinel;
    const std::size_t n = forward.lambdas.size();
    bool got_f = false, got_b = false;
    for (std::size_t k = 1; k < n && !got_f; ++k)
        if (std::abs(forward.gamma_inf[k] - forward.gamma_inf[k - 1]) > threshold) {
            jp.lambda_f = forward.lambdas[k];
            got_f = true;
        }
    for (std::size_t k = n - 1; k-- > 0 && !got_b;)
        if (std::abs(backward.gamma_inf[k] - backward.gamma_inf[k + 1]) > threshold) {
            jp.lambda_b = backward.lambdas[k];
            got_b = true;
        }
    jp.found = got_f || got_b;
    return jp;
}

double hysteresis_area(const SweepResult& forward, const SweepResult& backward) {
    if (forward.lambdas != backward.lambdas)
        throw Error(ErrorKind::Domain, "hysteresis_area needs identical coupling grids");
    double area = 0.0;
    for (std::size_t k = 1; k < forward.lambdas.size(); ++k) {
        const double d0 = std::abs(forward.gamma_inf[k - 1] - backward.gamma_inf[k - 1]);
        const double d1 = std::abs(forward.gamma_inf[k] - backward.gamma_inf[k]);
        area += 0.5 * (d0 + d1) * (forward.lambdas[k] - forward.lambdas[k - 1]);
    }
    return area;
}

} // namespace nqpt
