#pragma once

#include "nqpt/model.hpp"

#include <string>
#include <vector>

namespace nqpt {

struct LandauExpansion {
    double a0 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0;
    // Sixth-order coefficient in the truncated closed form, which leaves out the
    // fourth width derivative. Only used for the closed-form coexistence/backward
    // relations.
    double a6_reduced = 0;
    double sigma0 = 0;
    double d2_sigma = 0, d3_sigma = 0, d4_sigma = 0;
    double omega_sigma = 0;
    double lambda_s2 = 0;
};

enum class TransitionOrder { second, first_symmetric, first_asymmetric, none };
enum class CritMode { paper_formula, exact_numeric };
enum class ScanAxis { V, Ng };

const char* to_string(TransitionOrder o);
const char* to_string(CritMode m);
CritMode crit_mode_from_string(const std::string& s);

struct SurfacePoint {
    double gamma;
    double energy;
};

struct FirstOrderMinima {
    double gamma1;
    double gamma23_sq;
};

struct PhaseDiagramCell {
    double omega_a = 0;
    double scan_value = 0;
    TransitionOrder order = TransitionOrder::none;
    double lambda_crit = 0;
};

constexpr int kDefaultSurfaceGrid = 2001;

double solve_width(double gamma, const SystemParams& p);

// E(gamma) = E[gamma, sigma0(gamma)] and its total derivative in gamma.
double surface_energy(double gamma, const SystemParams& p);
double surface_slope(double gamma, const SystemParams& p);

std::vector<SurfacePoint> energy_surface(const SystemParams& p, int n_grid);
SteadyState find_steady_state(const SystemParams& p, int n_grid = kDefaultSurfaceGrid);

double lambda_s2(const SystemParams& p);
LandauExpansion landau_coefficients(const SystemParams& p);
double omega_c(const SystemParams& p);
FirstOrderMinima first_order_minima(const LandauExpansion& le);

double lambda_s1(const SystemParams& p, CritMode mode = CritMode::exact_numeric);
double lambda_a1(const SystemParams& p, CritMode mode = CritMode::exact_numeric);

// Smallest coupling at which E(gamma) has a local minimum at gamma != 0 on the
// favoured side (gamma*chi >= 0). In the first-order regimes this is where the
// upper branch of a backward sweep ends.
double lambda_spinodal(const SystemParams& p);

// Coupling at which the closed-form backward-jump relation holds:
// 4 a2 a6 = a4^2 (reduced a6) for chi = 0, 32 a2 a4 = 9 a3^2 otherwise.
double lambda_backward_relation(const SystemParams& p);

TransitionOrder classify_order(const SystemParams& p);

// Critical coupling matching the order: lambda_s2, lambda_s1 or lambda_a1.
double critical_coupling(const SystemParams& p, TransitionOrder order, CritMode mode);

std::vector<PhaseDiagramCell> phase_diagram(const SystemParams& p, ScanAxis axis, double lo,
                                            double hi, int n, double omega_a_lo,
                                            double omega_a_hi, int m,
                                            CritMode mode = CritMode::exact_numeric,
                                            unsigned threads = 1);

} // namespace nqpt
