#pragma once

#include "nqpt/dynamics.hpp"
#include "nqpt/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

namespace nqpt {

using Mat3c = Eigen::Matrix<cplx, 3, 3>;
using Mat6c = Eigen::Matrix<cplx, 6, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Mode order: 0 = membrane, 1 = atomic transition, 2 = breathing.
enum Mode : int { kMembrane = 0, kAtomic = 1, kBreathing = 2 };

struct BdgMatrix {
    Mat6c m;
    Mat3c h;
    Mat3c g;
};

Mat6c assemble_bdg(const Mat3c& h, const Mat3c& g);
BdgMatrix bdg_matrix(const SteadyState& steady, const SystemParams& p);

// Eigenvalues with Re >= 0 partner selection: the three with largest real
// part, sorted by decreasing real part.
std::array<cplx, 3> physical_eigenvalues(const BdgMatrix& bdg);
std::array<cplx, 6> all_eigenvalues(const BdgMatrix& bdg);

struct SpectrumBranch {
    std::vector<double> lambdas;
    std::vector<cplx> nu;

    double omega(std::size_t k) const { return nu[k].real(); }
    double decay(std::size_t k) const { return -nu[k].imag(); }
};

struct Spectrum {
    std::array<SpectrumBranch, 3> branches;  // 0: omega_1, 1: omega_2, 2: omega_3
    std::vector<bool> degenerate;            // DegenerateMatch flag per coupling
};

// Continues three eigenvalue sets along a coupling grid. Branches start in
// decreasing-frequency order at the first point.
Spectrum track_branches(const std::vector<double>& lambdas, const std::vector<std::array<cplx, 3>>& eig);

Spectrum excitation_spectrum(const SystemParams& p, const std::vector<double>& lambdas,
                             unsigned threads = 1);
Spectrum spectrum_along_hysteresis(const SystemParams& p, const SweepResult& sweep);

// Steady state reconstructed from a sweep point (branch solution).
SteadyState steady_from_sweep(const SweepResult& sweep, std::size_t k, const SystemParams& p);

struct QuadratureCovariance {
    Mat6 c;  // basis (q_a, q_g, q_s, p_a, p_g, p_s)
};

Mat6c quadrature_transform();
Mat6 quadrature_drift(const BdgMatrix& bdg);
Mat6 diffusion_matrix(const SystemParams& p);
Mat6 symplectic_form();

QuadratureCovariance stationary_covariance(const BdgMatrix& bdg, const SystemParams& p);

// Smallest eigenvalue of C + iJ/2.
double uncertainty_margin(const QuadratureCovariance& cov);

// Smallest symplectic eigenvalue of the partial transpose of the mode pair.
double partial_transpose_nu(const QuadratureCovariance& cov, std::pair<int, int> modes);
double logarithmic_negativity(const QuadratureCovariance& cov, std::pair<int, int> modes);

} // namespace nqpt
