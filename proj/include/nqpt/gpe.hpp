#pragma once

#include "nqpt/model.hpp"

#include <vector>

namespace nqpt {

// One lattice period z in [-pi/2, pi/2) with periodic wrap-around.
struct GpeField {
    int n = 0;
    double h = 0.0;
    std::vector<double> z;
    std::vector<cplx> psi_minus;
    std::vector<cplx> psi_plus;
    cplx alpha{0.0, 0.0};
    double energy = 0.0;
    long steps = 0;
    bool converged = false;
    std::vector<double> energy_trace;  // filled when GpeOptions::record_energy
};

struct GpeOptions {
    int n_grid = 512;
    double dtau = 1e-4;
    long max_steps = 100000;
    double seed_plus = 0.1;     // initial psi_+ = seed_plus * psi_-
    bool record_energy = false;  // energy after every step (diagnostics)
    bool check_grid = false;    // rerun at 2n; GridTooCoarse if energies differ > 1e-6
};

GpeField solve_ground(const SystemParams& p, const GpeOptions& opt = {});

// Energy of the fields with the membrane eliminated at its stationary value.
double gpe_energy(const GpeField& f, const SystemParams& p);

// Stationary membrane amplitude implied by the fields.
cplx gpe_membrane_amplitude(const GpeField& f, const SystemParams& p);

// Solves the periodic tridiagonal system a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i
// (indices mod n) by a rank-one correction of the open tridiagonal sweep.
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                             const std::vector<double>& c, const std::vector<double>& d);

struct WidthFit {
    double sigma_minus = 0.0;
    double sigma_plus = 0.0;
    double gamma_fraction = 0.0;
    bool minus_failed = false;
    bool plus_failed = false;
};

// Gaussian fit A exp(-z^2/sigma^2) to |psi|^2 on |z| <= pi/4.
WidthFit fit_widths(const GpeField& f);

// Coupling at which the normal state (psi_+ = 0) of the discretized
// equations becomes unstable towards psi_+ population.
double gpe_critical_coupling(const SystemParams& p, const GpeOptions& opt = {});

struct AnsatzRow {
    double lambda = 0.0;
    double sigma_gpe = 0.0;
    double sigma_gauss = 0.0;
    double gamma_gpe = 0.0;    // sqrt of the psi_+ population
    double gamma_gauss = 0.0;  // |gamma0| of the Gaussian steady state
    bool flagged = false;
};

std::vector<AnsatzRow> validate_ansatz(const SystemParams& p, const std::vector<double>& lambdas,
                                       const GpeOptions& opt = {}, unsigned threads = 1);

} // namespace nqpt
