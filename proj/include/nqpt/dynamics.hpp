#pragma once

#include "nqpt/model.hpp"

#include <array>
#include <limits>
#include <vector>

namespace nqpt {

struct MeanFieldRate {
    cplx d_alpha{0.0, 0.0};
    cplx d_gamma_minus{0.0, 0.0};
    cplx d_gamma_plus{0.0, 0.0};
    double d_sigma = 0.0;
    double d_sigma_dot = 0.0;
};

// Wirtinger/ordinary partial derivatives of the full potential.
struct PotentialGradient {
    cplx d_alpha_conj;
    cplx d_gamma_minus_conj;
    cplx d_gamma_plus_conj;
    double d_sigma;
};

PotentialGradient potential_gradient(const MeanFieldState& s, const SystemParams& p);
MeanFieldRate eom_rhs(const MeanFieldState& s, const SystemParams& p);

// Common rotation frequency of (gamma_-, gamma_+) at a stationary point.
double chemical_potential(const MeanFieldState& s, const SystemParams& p);

double default_time_step(const SystemParams& p);

// Fixed-step RK4. Throws StepTooLarge if the norm drifts by more than 1e-6.
MeanFieldState integrate(const MeanFieldState& s, const SystemParams& p, double t_final, double dt);

// Gauge-invariant coordinates (Re a, Im a, Re z, Im z, sigma, sigma_dot) with
// z = gamma_+ conj(gamma_-)/|gamma_-|; the global phase of gamma drops out.
using ReducedState = std::array<double, 6>;
ReducedState reduce(const MeanFieldState& s);
MeanFieldState expand(const ReducedState& y);
ReducedState reduced_rhs(const ReducedState& y, const SystemParams& p);

struct FixedPointInfo {
    ReducedState y{};
    bool converged = false;
    bool stable = false;
    double max_growth = 0.0;  // largest real part of the linearized flow
};

// Newton iteration on reduced_rhs(y) = 0 starting from y0, followed by a
// linear stability check.
FixedPointInfo polish_fixed_point(const ReducedState& y0, const SystemParams& p);

struct RelaxOptions {
    double dt = 0.0;         // 0 -> default_time_step
    double rate_tol = 1e-9;  // max |dy/dt| of the reduced coordinates
    double chunk = 0.0;      // 0 -> 10/Gamma_m
    double t_max = 0.0;      // 0 -> 1e4/Gamma_m
};

struct RelaxResult {
    MeanFieldState state;
    bool converged = false;
    bool polished = false;  // fixed point finished by Newton instead of integration
    double time = 0.0;
};

RelaxResult relax(const MeanFieldState& s, const SystemParams& p, const RelaxOptions& opt = {});

enum class SweepDirection { forward, backward };
const char* to_string(SweepDirection d);

struct SweepResult {
    std::vector<double> lambdas;
    std::vector<double> gamma_inf;   // |gamma_+|
    std::vector<cplx> alpha_inf;
    std::vector<double> sigma_inf;
    std::vector<double> gamma_signed;  // Re z: |gamma_+| with the sign of the relative phase
    std::vector<bool> converged;
    SweepDirection direction = SweepDirection::forward;
};

// n_steps intervals, n_steps + 1 couplings. Lambdas are stored in increasing
// order for both directions.
SweepResult adiabatic_sweep(const SystemParams& p, double lambda_lo, double lambda_hi, int n_steps,
                            SweepDirection direction, const RelaxOptions& opt = {});

struct JumpPoints {
    double lambda_f = 0.0;
    double lambda_b = 0.0;
    bool found = false;
};

// First coupling on the new branch in each direction. When neither sweep
// jumps, returns lambda_f = lambda_b = sentinel with found = false.
JumpPoints detect_jumps(const SweepResult& forward, const SweepResult& backward,
                        double threshold = 0.05,
                        double sentinel = std::numeric_limits<double>::quiet_NaN());

// Integral of |gamma_fwd - gamma_bwd| over lambda (trapezoid).
double hysteresis_area(const SweepResult& forward, const SweepResult& backward);

} // namespace nqpt
