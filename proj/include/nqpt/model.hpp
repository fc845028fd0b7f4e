#pragma once

#include <complex>

namespace nqpt {

using cplx = std::complex<double>;

// All frequency-like quantities are in units of the recoil frequency.
struct SystemParams {
    double v = 100.0;          // lattice depth V
    double ng = 1.0;           // collective contact interaction Ng
    double omega_a = 50.0;     // atomic transition frequency
    double omega_m = 100.0;    // membrane frequency
    double gamma_m = 10.0;     // membrane damping
    double chi = 0.0;          // coupling asymmetry mu_+/mu_-
    double lambda_coll = 0.0;  // collective coupling sqrt(N)*lambda
    double n_bath = 0.0;       // thermal occupation of the membrane bath

    bool operator==(const SystemParams&) const = default;

    double omega_m_prime() const { return omega_m + gamma_m * gamma_m / omega_m; }
    double lambda_omega() const;

    // Throws Error(Domain) if any invariant is violated.
    void validate() const;
};

struct MeanFieldState {
    cplx alpha{0.0, 0.0};
    cplx gamma_minus{1.0, 0.0};
    cplx gamma_plus{0.0, 0.0};
    double sigma = 0.3;
    double sigma_dot = 0.0;

    double norm() const { return std::norm(gamma_minus) + std::norm(gamma_plus); }
};

struct SteadyState {
    cplx alpha0{0.0, 0.0};
    double gamma0 = 0.0;
    double sigma0 = 0.0;
    double energy0 = 0.0;
};

// chi*gamma^2 + gamma*sqrt(1 - gamma^2)
double coupling_factor(double gamma, double chi);

double reduced_potential(double gamma, double sigma, const SystemParams& p);
double full_potential(const MeanFieldState& s, const SystemParams& p);
cplx membrane_amplitude(double gamma, double sigma, const SystemParams& p);

// dE/dsigma of the reduced potential; its -→+ zero crossing fixes the width.
double width_residual(double sigma, double gamma, const SystemParams& p);
// d/dsigma of width_residual.
double width_residual_slope(double sigma, double gamma, const SystemParams& p);

double breathing_frequency(double sigma0, const SystemParams& p);
double effective_lattice_depth(const SteadyState& steady, const SystemParams& p);
double displacement_mode_frequency(double sigma0, const SystemParams& p);

} // namespace nqpt
