#include "nqpt/fluctuations.hpp"

#include "nqpt/error.hpp"
#include "nqpt/numerics.hpp"
#include "nqpt/steadystate.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nqpt {

namespace {

constexpr cplx kI{0.0, 1.0};

} // namespace

Mat6c assemble_bdg(const Mat3c& h, const Mat3c& g) {
    Mat6c m;
    m.topLeftCorner<3, 3>() = h;
    m.topRightCorner<3, 3>() = g;
    m.bottomLeftCorner<3, 3>() = -g;
    m.bottomRightCorner<3, 3>() = -h.conjugate();
    return m;
}

BdgMatrix bdg_matrix(const SteadyState& st, const SystemParams& p) {
    const double g0 = st.gamma0;
    const double s0 = st.sigma0;
    if (!(std::abs(g0) <= 1.0) || !(s0 > 0.0)) throw Error(ErrorKind::Domain, "invalid steady state");
    const double lam = p.lambda_coll;
    const double e = std::exp(-s0 * s0);
    const double q = std::sqrt(std::max(0.0, 1.0 - g0 * g0));
    const double re_a = st.alpha0.real();
    const double v_eff = effective_lattice_depth(st, p);

    BdgMatrix b;
    b.h.setZero();
    b.g.setZero();
    b.h(0, 0) = cplx(p.omega_m, -p.gamma_m);
    b.h(1, 1) = p.omega_a * (1.0 - 2.0 * g0 * g0) + 2.0 * lam * g0 * q * (2.0 * re_a) * e;
    b.h(2, 2) = 2.0 / (s0 * s0) + v_eff * (2.0 - s0 * s0) * s0 * s0 * e;
    b.h(0, 1) = b.h(1, 0) = -0.5 * lam * (1.0 - 2.0 * g0 * g0) * e;
    b.h(0, 2) = b.h(2, 0) = std::sqrt(2.0) * lam * g0 * q * s0 * s0 * e;
    b.h(1, 2) = b.h(2, 1) = std::sqrt(2.0) * lam * (1.0 - 2.0 * g0 * g0) * re_a * s0 * s0 * e;
    b.g(0, 1) = b.g(1, 0) = b.h(0, 1);
    b.g(0, 2) = b.g(2, 0) = b.h(0, 2);
    b.m = assemble_bdg(b.h, b.g);
    return b;
}

std::array<cplx, 6> all_eigenvalues(const BdgMatrix& bdg) {
    const Eigen::ComplexEigenSolver<Mat6c> es(bdg.m, false);
    std::array<cplx, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = es.eigenvalues()(i);
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

std::array<cplx, 3> physical_eigenvalues(const BdgMatrix& bdg) {
    const auto all = all_eigenvalues(bdg);
    return {all[0], all[1], all[2]};
}

Spectrum track_branches(const std::vector<double>& lambdas, const std::vector<std::array<cplx, 3>>& eig) {
    Spectrum sp;
    const std::size_t n = lambdas.size();
    for (auto& b : sp.branches) {
        b.lambdas = lambdas;
        b.nu.resize(n);
    }
    sp.degenerate.assign(n, false);
    std::array<int, 3> perm{0, 1, 2};
    for (std::size_t k = 0; k < n; ++k) {
        const auto& ev = eig[k];
        double scale = 1.0;
        for (const cplx& v : ev) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (std::abs(ev[i] - ev[j]) < 1e-2 * scale) sp.degenerate[k] = true;
        if (k == 0) {
            for (int b = 0; b < 3; ++b) sp.branches[b].nu[0] = ev[b];
            continue;
        }
        std::array<cplx, 3> pred;
        for (int b = 0; b < 3; ++b) {
            const cplx prev = sp.branches[b].nu[k - 1];
            pred[b] = prev;
            if (k >= 2) {
                const double h0 = lambdas[k - 1] - lambdas[k - 2];
                const double h1 = lambdas[k] - lambdas[k - 1];
                if (h0 != 0.0) pred[b] = prev + (prev - sp.branches[b].nu[k - 2]) * (h1 / h0);
            }
        }
        std::array<int, 3> best{0, 1, 2};
        double best_cost = std::numeric_limits<double>::infinity();
        std::iota(perm.begin(), perm.end(), 0);
        do {
            double cost = 0.0;
            for (int b = 0; b < 3; ++b) cost += std::abs(ev[perm[b]] - pred[b]);
            if (cost < best_cost) {
                best_cost = cost;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (int b = 0; b < 3; ++b) sp.branches[b].nu[k] = ev[best[b]];
    }
    return sp;
}

Spectrum excitation_spectrum(const SystemParams& p, const std::vector<double>& lambdas, unsigned threads) {
    std::vector<std::array<cplx, 3>> eig(lambdas.size());
    num::parallel_for(lambdas.size(), threads, [&](std::size_t k) {
        SystemParams q = p;
        q.lambda_coll = lambdas[k];
        eig[k] = physical_eigenvalues(bdg_matrix(find_steady_state(q), q));
    });
    return track_branches(lambdas, eig);
}

SteadyState steady_from_sweep(const SweepResult& sweep, std::size_t k, const SystemParams& p) {
    SteadyState st;
    st.alpha0 = sweep.alpha_inf[k];
    st.gamma0 = std::clamp(sweep.gamma_signed[k], -1.0, 1.0);
    st.sigma0 = sweep.sigma_inf[k];
    SystemParams q = p;
    q.lambda_coll = sweep.lambdas[k];
    st.energy0 = reduced_potential(st.gamma0, st.sigma0, q);
    return st;
}

Spectrum spectrum_along_hysteresis(const SystemParams& p, const SweepResult& sweep) {
    std::vector<std::array<cplx, 3>> eig(sweep.lambdas.size());
    for (std::size_t k = 0; k < sweep.lambdas.size(); ++k) {
        SystemParams q = p;
        q.lambda_coll = sweep.lambdas[k];
        eig[k] = physical_eigenvalues(bdg_matrix(steady_from_sweep(sweep, k, p), q));
    }
    return track_branches(sweep.lambdas, eig);
}

Mat6c quadrature_transform() {
    const double r = 1.0 / std::sqrt(2.0);
    Mat6c t = Mat6c::Zero();
    for (int i = 0; i < 3; ++i) {
        t(i, i) = r;
        t(i, i + 3) = r;
        t(i + 3, i) = -kI * r;
        t(i + 3, i + 3) = kI * r;
    }
    return t;
}

Mat6 quadrature_drift(const BdgMatrix& bdg) {
    const Mat6c t = quadrature_transform();
    const Mat6c a = t * (-kI * bdg.m) * t.inverse();
    return a.real();
}

Mat6 diffusion_matrix(const SystemParams& p) {
    Mat6 d = Mat6::Zero();
    d(0, 0) = d(3, 3) = p.gamma_m * (2.0 * p.n_bath + 1.0);
    return d;
}

Mat6 symplectic_form() {
    Mat6 j = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        j(i, i + 3) = 1.0;
        j(i + 3, i) = -1.0;
    }
    return j;
}

QuadratureCovariance stationary_covariance(const BdgMatrix& bdg, const SystemParams& p) {
    const Mat6 a = quadrature_drift(bdg);
    const Mat6 d = diffusion_matrix(p);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());

    // A mode that neither couples to the others nor dissipates keeps its
    // initial (vacuum) covariance; it is left out of the linear solve.
    std::vector<int> active;
    std::vector<int> frozen;
    for (int m = 0; m < 3; ++m) {
        const int idx[2] = {m, m + 3};
        bool isolated = true;
        for (int r : idx)
            for (int c = 0; c < 6; ++c) {
                if (c == m || c == m + 3) continue;
                if (std::abs(a(r, c)) > 1e-14 * scale || std::abs(a(c, r)) > 1e-14 * scale) isolated = false;
            }
        const double damping = std::abs(a(m, m) + a(m + 3, m + 3));
        const bool undriven = d(m, m) == 0.0 && d(m + 3, m + 3) == 0.0;
        if (isolated && undriven && damping <= 1e-14 * scale)
            frozen.push_back(m);
        else
            active.push_back(m);
    }
    std::vector<int> idx;
    for (int m : active) idx.push_back(m);
    for (int m : active) idx.push_back(m + 3);
    const int n = int(idx.size());
    Eigen::MatrixXd ar(n, n), dr(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            ar(i, j) = a(idx[i], idx[j]);
            dr(i, j) = d(idx[i], idx[j]);
        }
    const Eigen::EigenSolver<Eigen::MatrixXd> es(ar, false);
    for (int i = 0; i < n; ++i)
        if (es.eigenvalues()(i).real() >= 0.0) {
            std::ostringstream os;
            os << "drift eigenvalue " << es.eigenvalues()(i) << " has non-negative real part";
            throw Error(ErrorKind::UnstableDrift, os.str());
        }

    // A C + C A^T = -D restricted to the upper triangle of symmetric C.
    const int nu = n * (n + 1) / 2;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) pairs.emplace_back(i, j);
    Eigen::MatrixXd l(nu, nu);
    Eigen::VectorXd rhs(nu);
    for (int col = 0; col < nu; ++col) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
        e(pairs[col].first, pairs[col].second) = 1.0;
        e(pairs[col].second, pairs[col].first) = 1.0;
        const Eigen::MatrixXd le = ar * e + e * ar.transpose();
        for (int row = 0; row < nu; ++row) l(row, col) = le(pairs[row].first, pairs[row].second);
    }
    for (int row = 0; row < nu; ++row) rhs(row) = -dr(pairs[row].first, pairs[row].second);
    const Eigen::VectorXd sol = l.fullPivLu().solve(rhs);

    QuadratureCovariance cov;
    cov.c.setZero();
    for (int m : frozen) cov.c(m, m) = cov.c(m + 3, m + 3) = 0.5;
    for (int k = 0; k < nu; ++k) {
        const int i = idx[pairs[k].first];
        const int j = idx[pairs[k].second];
        cov.c(i, j) = cov.c(j, i) = sol(k);
    }
    return cov;
}

double uncertainty_margin(const QuadratureCovariance& cov) {
    const Mat6c m = cov.c.cast<cplx>() + 0.5 * kI * symplectic_form().cast<cplx>();
    const Eigen::SelfAdjointEigenSolver<Mat6c> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double partial_transpose_nu(const QuadratureCovariance& cov, std::pair<int, int> modes) {
    const int m1 = modes.first, m2 = modes.second;
    if (m1 < 0 || m1 > 2 || m2 < 0 || m2 > 2 || m1 == m2) throw Error(ErrorKind::Domain, "invalid mode pair");
    const int sel[4] = {m1, m1 + 3, m2, m2 + 3};
    Eigen::Matrix4d c4;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c4(i, j) = cov.c(sel[i], sel[j]);
    const double det_u = c4.topLeftCorner<2, 2>().determinant();
    const double det_w = c4.bottomRightCorner<2, 2>().determinant();
    const double det_v = c4.topRightCorner<2, 2>().determinant();
    const double sigma = det_u + det_w - 2.0 * det_v;
    double disc = sigma * sigma - 4.0 * c4.determinant();
    if (disc < 0.0) {
        if (disc < -1e-12 * std::max(1.0, sigma * sigma)) {
            std::ostringstream os;
            os << "negative discriminant " << disc << " in symplectic eigenvalue";
            throw Error(ErrorKind::ComplexRoot, os.str());
        }
        disc = 0.0;
    }
    const double inner = sigma - std::sqrt(disc);
    if (inner < 0.0) throw Error(ErrorKind::ComplexRoot, "negative symplectic radicand");
    return std::sqrt(0.5 * inner);
}

double logarithmic_negativity(const QuadratureCovariance& cov, std::pair<int, int> modes) {
    return std::max(0.0, -std::log(2.0 * partial_transpose_nu(cov, modes)));
}

} // namespace nqpt
