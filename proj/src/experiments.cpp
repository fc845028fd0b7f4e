#include "nqpt/experiments.hpp"

#include "nqpt/dynamics.hpp"
#include "nqpt/fluctuations.hpp"
#include "nqpt/gpe.hpp"
#include "nqpt/numerics.hpp"
#include "nqpt/steadystate.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace nqpt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // no "-0" in the output
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Csv {
public:
    Csv(const ExperimentConfig& cfg, const std::string& name, const std::vector<std::string>& header)
        : path_((std::filesystem::path(cfg.out) / name).string()) {
        std::istringstream echo(serialize(cfg, {"threads", "out"}));
        std::string line;
        while (std::getline(echo, line)) body_ << "# " << line << '\n';
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << cells[i];
        body_ << '\n';
    }
    std::string write() const {
        std::ofstream f(path_, std::ios::binary);
        if (!f) throw Error(ErrorKind::Domain, "cannot write '" + path_ + "'");
        f << body_.str();
        return path_;
    }

private:
    std::string path_;
    std::ostringstream body_;
};

template <typename F>
double or_nan(F&& f) {
    try {
        return f();
    } catch (const Error&) {
        return kNaN;
    }
}

struct Ctx {
    const ExperimentConfig& cfg;
    SystemParams p;
    double scale = 1.0;  // lambda unit in absolute terms

    explicit Ctx(const ExperimentConfig& c) : cfg(c), p(c.params) {
        SystemParams q = p;
        q.lambda_coll = 0.0;
        q.validate();
        if (c.lambda_unit == LambdaUnit::lambda_s2) scale = lambda_s2(q);
        p.lambda_coll = c.params.lambda_coll * scale;
        p.validate();
    }
    std::vector<double> grid() const {
        return linspace(*cfg.lambda_lo * scale, *cfg.lambda_hi * scale, cfg.points);
    }
};

std::vector<std::string> steady(const Ctx& c) {
    const SteadyState st = find_steady_state(c.p, c.cfg.surface_grid);
    Csv s(c.cfg, "steady.csv", {"lambda", "gamma0", "re_alpha", "im_alpha", "sigma0", "energy0"});
    s.row({num17(c.p.lambda_coll), num17(st.gamma0), num17(st.alpha0.real()), num17(st.alpha0.imag()),
           num17(st.sigma0), num17(st.energy0)});
    Csv surf(c.cfg, "surface.csv", {"gamma", "energy", "sigma"});
    for (const SurfacePoint& pt : energy_surface(c.p, c.cfg.surface_grid))
        surf.row({num17(pt.gamma), num17(pt.energy), num17(or_nan([&] { return solve_width(pt.gamma, c.p); }))});
    return {s.write(), surf.write()};
}

std::vector<std::string> landau(const Ctx& c) {
    const LandauExpansion le = landau_coefficients(c.p);
    const TransitionOrder order = classify_order(c.p);
    const double oc = or_nan([&] { return omega_c(c.p); });
    Csv l(c.cfg, "landau.csv",
          {"a0", "a2", "a3", "a4", "a5", "a6", "sigma0", "omega_sigma", "lambda_s2", "omega_c", "order",
           "lambda", "a6_reduced"});
    l.row({num17(le.a0), num17(le.a2), num17(le.a3), num17(le.a4), num17(le.a5), num17(le.a6),
           num17(le.sigma0), num17(le.omega_sigma), num17(le.lambda_s2), num17(oc), to_string(order),
           num17(c.p.lambda_coll), num17(le.a6_reduced)});

    Csv k(c.cfg, "critical.csv", {"mode", "order", "lambda_crit", "status"});
    for (CritMode m : {CritMode::paper_formula, CritMode::exact_numeric}) {
        std::string status = "ok";
        double v = kNaN;
        try {
            v = critical_coupling(c.p, order, m);
        } catch (const Error& e) {
            status = to_string(e.kind());
        }
        k.row({to_string(m), to_string(order), num17(v), status});
    }
    return {l.write(), k.write()};
}

void sweep_rows(Csv& csv, const SweepResult& s) {
    for (std::size_t i = 0; i < s.lambdas.size(); ++i)
        csv.row({num17(s.lambdas[i]), num17(s.gamma_inf[i]), num17(s.alpha_inf[i].real()),
                 num17(s.alpha_inf[i].imag()), num17(s.sigma_inf[i]), num17(s.gamma_signed[i]),
                 s.converged[i] ? "1" : "0"});
}

std::vector<std::string> sweep(const Ctx& c) {
    const double lo = *c.cfg.lambda_lo * c.scale, hi = *c.cfg.lambda_hi * c.scale;
    const int steps = c.cfg.points - 1;
    SweepResult fwd, bwd;
    num::parallel_for(2, c.cfg.threads, [&](std::size_t i) {
        if (i == 0) fwd = adiabatic_sweep(c.p, lo, hi, steps, SweepDirection::forward);
        else bwd = adiabatic_sweep(c.p, lo, hi, steps, SweepDirection::backward);
    });
    const std::vector<std::string> cols = {"lambda", "gamma_inf", "re_alpha", "im_alpha",
                                           "sigma_inf", "gamma_signed", "converged"};
    Csv f(c.cfg, "forward.csv", cols);
    sweep_rows(f, fwd);
    Csv b(c.cfg, "backward.csv", cols);
    sweep_rows(b, bwd);

    const JumpPoints j = detect_jumps(fwd, bwd, c.cfg.jump_threshold);
    const double first_exact = or_nan([&] {
        return c.p.chi == 0.0 ? lambda_s1(c.p, CritMode::exact_numeric) : lambda_a1(c.p, CritMode::exact_numeric);
    });
    const double first_formula = or_nan([&] {
        return c.p.chi == 0.0 ? lambda_s1(c.p, CritMode::paper_formula) : lambda_a1(c.p, CritMode::paper_formula);
    });
    Csv jc(c.cfg, "jumps.csv",
           {"lambda_f", "lambda_b", "found", "hysteresis_area", "lambda_s2", "lambda_spinodal",
            "lambda_backward_relation", "lambda_first_exact", "lambda_first_formula"});
    jc.row({num17(j.lambda_f), num17(j.lambda_b), j.found ? "1" : "0", num17(hysteresis_area(fwd, bwd)),
            num17(lambda_s2(c.p)), num17(or_nan([&] { return lambda_spinodal(c.p); })),
            num17(or_nan([&] { return lambda_backward_relation(c.p); })), num17(first_exact), num17(first_formula)});
    return {f.write(), b.write(), jc.write()};
}

std::vector<std::string> phase(const Ctx& c) {
    const auto& g = c.cfg;
    const auto cells = phase_diagram(c.p, g.axis, *g.axis_lo, *g.axis_hi, g.axis_points, *g.omega_a_lo,
                                     *g.omega_a_hi, g.omega_a_points, g.mode, g.threads);
    Csv csv(g, "phase_diagram.csv", {g.axis == ScanAxis::V ? "v" : "ng", "omega_a", "order", "lambda_crit"});
    for (const auto& cell : cells)
        csv.row({num17(cell.scan_value), num17(cell.omega_a), to_string(cell.order), num17(cell.lambda_crit)});
    return {csv.write()};
}

void spectrum_rows(Csv& csv, const Spectrum& s) {
    const auto& l = s.branches[0].lambdas;
    for (std::size_t k = 0; k < l.size(); ++k) {
        std::vector<std::string> r{num17(l[k])};
        for (const auto& b : s.branches) r.push_back(num17(b.omega(k)));
        for (const auto& b : s.branches) r.push_back(num17(b.decay(k)));
        r.push_back(s.degenerate[k] ? "1" : "0");
        csv.row(r);
    }
}

std::vector<std::string> spectrum(const Ctx& c) {
    Spectrum s;
    if (c.cfg.source == SpectrumSource::minimal) {
        s = excitation_spectrum(c.p, c.grid(), c.cfg.threads);
    } else {
        const auto dir = c.cfg.source == SpectrumSource::forward ? SweepDirection::forward : SweepDirection::backward;
        const SweepResult sw =
            adiabatic_sweep(c.p, *c.cfg.lambda_lo * c.scale, *c.cfg.lambda_hi * c.scale, c.cfg.points - 1, dir);
        s = spectrum_along_hysteresis(c.p, sw);
    }
    Csv csv(c.cfg, "spectrum.csv",
            {"lambda", "omega_1", "omega_2", "omega_3", "decay_1", "decay_2", "decay_3", "degenerate"});
    spectrum_rows(csv, s);
    return {csv.write()};
}

std::vector<std::string> entangle(const Ctx& c) {
    const auto lambdas = c.grid();
    std::vector<double> en(lambdas.size(), kNaN);
    std::vector<std::string> status(lambdas.size(), "ok");
    std::vector<std::array<cplx, 3>> eig(lambdas.size());
    num::parallel_for(lambdas.size(), c.cfg.threads, [&](std::size_t k) {
        SystemParams q = c.p;
        q.lambda_coll = lambdas[k];
        try {
            const BdgMatrix m = bdg_matrix(find_steady_state(q), q);
            eig[k] = physical_eigenvalues(m);
            en[k] = logarithmic_negativity(stationary_covariance(m, q), {c.cfg.mode_a, c.cfg.mode_b});
        } catch (const Error& e) {
            status[k] = to_string(e.kind());
        }
    });
    const Spectrum s = track_branches(lambdas, eig);
    Csv csv(c.cfg, "entangle.csv",
            {"lambda", "e_n", "omega_1", "omega_2", "omega_3", "decay_1", "decay_2", "decay_3", "status"});
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        std::vector<std::string> r{num17(lambdas[k]), num17(en[k])};
        for (const auto& b : s.branches) r.push_back(num17(b.omega(k)));
        for (const auto& b : s.branches) r.push_back(num17(b.decay(k)));
        r.push_back(status[k]);
        csv.row(r);
    }
    return {csv.write()};
}

GpeOptions gpe_options(const ExperimentConfig& g) {
    GpeOptions o;
    o.n_grid = g.n_grid;
    o.dtau = g.dtau;
    o.max_steps = g.max_steps;
    o.check_grid = g.check_grid;
    return o;
}

std::vector<std::string> gpe(const Ctx& c) {
    const GpeField f = solve_ground(c.p, gpe_options(c.cfg));
    const WidthFit w = fit_widths(f);
    Csv prof(c.cfg, "gpe_profile.csv", {"z", "re_psi_minus", "im_psi_minus", "re_psi_plus", "im_psi_plus"});
    for (int j = 0; j < f.n; ++j)
        prof.row({num17(f.z[j]), num17(f.psi_minus[j].real()), num17(f.psi_minus[j].imag()),
                  num17(f.psi_plus[j].real()), num17(f.psi_plus[j].imag())});
    Csv sum(c.cfg, "gpe_summary.csv",
            {"lambda", "energy", "re_alpha", "im_alpha", "sigma_minus", "sigma_plus", "gamma_fraction", "steps",
             "fit_failed_minus", "fit_failed_plus"});
    sum.row({num17(c.p.lambda_coll), num17(f.energy), num17(f.alpha.real()), num17(f.alpha.imag()),
             num17(w.sigma_minus), num17(w.sigma_plus), num17(w.gamma_fraction), std::to_string(f.steps),
             w.minus_failed ? "1" : "0", w.plus_failed ? "1" : "0"});
    return {prof.write(), sum.write()};
}

std::vector<std::string> validate(const Ctx& c) {
    std::vector<double> lambdas;
    if (!c.cfg.lambda_list.empty())
        for (double x : c.cfg.lambda_list) lambdas.push_back(x * c.scale);
    else lambdas = c.grid();
    GpeOptions o = gpe_options(c.cfg);
    o.check_grid = false;
    const auto rows = validate_ansatz(c.p, lambdas, o, c.cfg.threads);
    Csv csv(c.cfg, "validate.csv", {"lambda", "sigma_gpe", "sigma_gauss", "gamma_gpe", "gamma_gauss", "flagged"});
    for (const auto& r : rows)
        csv.row({num17(r.lambda), num17(r.sigma_gpe), num17(r.sigma_gauss), num17(r.gamma_gpe),
                 num17(r.gamma_gauss), r.flagged ? "1" : "0"});
    return {csv.write()};
}

} // namespace

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw Error(ErrorKind::Domain, "linspace needs at least two points");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    v[n - 1] = hi;
    return v;
}

std::vector<std::string> run(const ExperimentConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    const Ctx c(cfg);
    switch (cfg.command) {
    case Command::steady: return steady(c);
    case Command::landau: return landau(c);
    case Command::sweep: return sweep(c);
    case Command::phase_diagram: return phase(c);
    case Command::spectrum: return spectrum(c);
    case Command::entangle: return entangle(c);
    case Command::gpe: return gpe(c);
    case Command::validate: return validate(c);
    }
    throw Error(ErrorKind::Domain, "unhandled command");
}

int exit_code(ErrorKind kind) { return 10 + static_cast<int>(kind); }

} // namespace nqpt
