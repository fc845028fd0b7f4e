#include "oracles.hpp"

#include "nqpt/error.hpp"
#include "nqpt/gpe.hpp"
#include "nqpt/steadystate.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace nqpt;

namespace {

SystemParams base(double lambda_ratio = 0.0, double chi = 0.0) {
    SystemParams p;
    p.v = 100;
    p.ng = 1;
    p.omega_a = 50;
    p.omega_m = 100;
    p.gamma_m = 10;
    p.chi = chi;
    p.lambda_coll = lambda_ratio * lambda_s2(p);
    return p;
}

GpeOptions fast() {
    GpeOptions o;
    o.n_grid = 256;
    return o;
}

double field_norm(const GpeField& f) {
    double s = 0;
    for (int j = 0; j < f.n; ++j) s += std::norm(f.psi_minus[j]) + std::norm(f.psi_plus[j]);
    return s * f.h;
}

template <class F>
bool throws_kind(F&& f, ErrorKind kind) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

} // namespace

TEST_CASE("cyclic tridiagonal solver matches a dense solve") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const int n = 37;
    std::vector<double> a(n), b(n), c(n), d(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        a[i] = u(rng);
        c[i] = u(rng);
        b[i] = 4 + u(rng);
        d[i] = u(rng);
        m(i, i) = b[i];
        m(i, (i + n - 1) % n) += a[i];
        m(i, (i + 1) % n) += c[i];
        rhs[i] = d[i];
    }
    const Eigen::VectorXd ref = m.partialPivLu().solve(rhs);
    const auto x = solve_cyclic_tridiagonal(a, b, c, d);
    for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref[i]) < 1e-13);
}

TEST_CASE("free lattice ground state") {
    SystemParams p = base();
    p.ng = 0;
    const GpeField f = solve_ground(p);
    REQUIRE(f.converged);
    CHECK(std::abs(f.energy - (oracle::lattice_ground_energy(p.v) - 0.5 * p.omega_a)) < 1e-7);
    const WidthFit w = fit_widths(f);
    CHECK(std::abs(w.sigma_minus / solve_width(0.0, p) - 1) < 0.02);
    CHECK(w.plus_failed);
    CHECK(w.gamma_fraction < 1e-12);
}

TEST_CASE("phase selection by the coupling") {
    SUBCASE("normal phase below the transition") {
        const GpeField f = solve_ground(base(0.5), fast());
        CHECK(fit_widths(f).gamma_fraction < 1e-3);
    }
    SUBCASE("excited component populated above it") {
        const GpeField f = solve_ground(base(1.5), fast());
        CHECK(fit_widths(f).gamma_fraction > 0.05);
        CHECK(std::abs(gpe_membrane_amplitude(f, base(1.5))) > 0);
    }
    SUBCASE("asymmetric coupling populates between the two thresholds") {
        SystemParams p = base(0.0, 1.0);
        p.lambda_coll = 0.5 * (lambda_a1(p) + lambda_s2(p));
        const auto rows = validate_ansatz(p, {p.lambda_coll}, fast());
        CHECK(rows[0].gamma_gpe > 0.3);
        CHECK(!rows[0].flagged);
    }
}

TEST_CASE("Gaussian fits") {
    GpeField f;
    f.n = 256;
    f.h = std::numbers::pi / f.n;
    const double s = 0.27;
    for (int j = 0; j < f.n; ++j) {
        f.z.push_back(-std::numbers::pi / 2 + j * f.h);
        f.psi_minus.push_back(1.7 * std::exp(-f.z[j] * f.z[j] / (2 * s * s)));
        f.psi_plus.push_back(0.0);
    }
    const WidthFit w = fit_widths(f);
    CHECK(!w.minus_failed);
    CHECK(std::abs(w.sigma_minus - s) < 1e-6 * s);
    CHECK(w.plus_failed);
    CHECK(w.sigma_plus == 0.0);
}

TEST_CASE("ground-state widths") {
    for (double r : {0.5, 1.5, 2.0}) {
        const GpeField f = solve_ground(base(r), fast());
        const WidthFit w = fit_widths(f);
        REQUIRE(!w.minus_failed);
        if (r > 1) {
            REQUIRE(!w.plus_failed);
            CHECK(std::abs(w.sigma_minus - w.sigma_plus) / w.sigma_minus < 0.05);
        }
    }
    const double far = fit_widths(solve_ground(base(0.0), fast())).sigma_minus;
    const double near = fit_widths(solve_ground(base(0.98), fast())).sigma_minus;
    CHECK(near > far);
}

TEST_CASE("imaginary-time propagation") {
    const SystemParams p = base(1.5);
    GpeOptions o = fast();
    o.record_energy = true;
    const GpeField f = solve_ground(p, o);
    REQUIRE(f.converged);
    CHECK(std::abs(field_norm(f) - 1) < 1e-12);
    double worst = 0;
    for (std::size_t k = 1; k < f.energy_trace.size(); ++k)
        worst = std::max(worst, (f.energy_trace[k] - f.energy_trace[k - 1]) / std::abs(f.energy_trace[k - 1]));
    CHECK(worst < 1e-12);
    CHECK(std::abs(gpe_energy(f, p) - f.energy) < 1e-12 * std::abs(f.energy));
    CHECK(std::abs(gpe_membrane_amplitude(f, p) - f.alpha) < 1e-12 * std::abs(f.alpha));

    GpeOptions fine = fast();
    fine.n_grid = 512;
    const GpeField g = solve_ground(p, fine);
    CHECK(std::abs(g.energy - f.energy) < 1e-6 * std::abs(g.energy));
}

TEST_CASE("critical coupling of the discretized equations") {
    const SystemParams p = base();
    const double lc = gpe_critical_coupling(p, fast());
    CHECK(std::abs(lc / lambda_s2(p) - 1) < 0.02);
    const double below = fit_widths(solve_ground(base(0.97 * lc / lambda_s2(p)), fast())).gamma_fraction;
    const double above = fit_widths(solve_ground(base(1.05 * lc / lambda_s2(p)), fast())).gamma_fraction;
    CHECK(below < 1e-3);
    CHECK(above > 1e-3);
}

TEST_CASE("ansatz validation rows") {
    const SystemParams p = base();
    const double l2 = lambda_s2(p);
    const auto rows = validate_ansatz(p, {0.5 * l2, 1.5 * l2}, fast(), 2);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(!r.flagged);
        CHECK(std::abs(r.sigma_gpe / r.sigma_gauss - 1) < 0.05);
    }
    CHECK(rows[0].gamma_gpe < 0.05);
    CHECK(std::abs(rows[1].gamma_gpe - rows[1].gamma_gauss) < 0.05);
}

TEST_CASE("solver errors") {
    const SystemParams p = base(1.5);
    GpeOptions o = fast();
    o.max_steps = 1000;
    CHECK(throws_kind([&] { solve_ground(p, o); }, ErrorKind::NoConvergence));
    o = fast();
    o.n_grid = 32;
    CHECK(throws_kind([&] { solve_ground(p, o); }, ErrorKind::Domain));
    o = fast();
    o.dtau = 0;
    CHECK(throws_kind([&] { solve_ground(p, o); }, ErrorKind::Domain));
    SystemParams steep = base();
    steep.v = 4000;
    steep.ng = 0;
    o = fast();
    o.n_grid = 64;
    o.check_grid = true;
    o.dtau = 1e-5;
    o.max_steps = 400000;
    CHECK(throws_kind([&] { solve_ground(steep, o); }, ErrorKind::GridTooCoarse));
}
