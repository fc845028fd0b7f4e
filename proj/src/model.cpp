#include "nqpt/model.hpp"

#include "nqpt/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nqpt {

namespace {

const double kSqrt8Pi = std::sqrt(8.0 * std::numbers::pi);

void check_gamma_sigma(double gamma, double sigma) {
    if (!(std::abs(gamma) <= 1.0) || !(sigma > 0.0) || !std::isfinite(sigma)) {
        std::ostringstream os;
        os << "need |gamma| <= 1 and sigma > 0, got gamma=" << gamma << " sigma=" << sigma;
        throw Error(ErrorKind::Domain, os.str());
    }
}

} // namespace

double SystemParams::lambda_omega() const { return std::sqrt(omega_a * omega_m_prime()); }

void SystemParams::validate() const {
    auto bad = [](const char* what) { throw Error(ErrorKind::Domain, what); };
    const double all[] = {v, ng, omega_a, omega_m, gamma_m, chi, lambda_coll, n_bath};
    for (double x : all)
        if (!std::isfinite(x)) bad("parameters must be finite");
    if (!(v > 0.0)) bad("v must be > 0");
    if (!(omega_a > 0.0)) bad("omega_a must be > 0");
    if (!(omega_m > 0.0)) bad("omega_m must be > 0");
    if (gamma_m < 0.0) bad("gamma_m must be >= 0");
    if (ng < 0.0) bad("ng must be >= 0");
    if (lambda_coll < 0.0) bad("lambda must be >= 0");
    if (n_bath < 0.0) bad("n_bath must be >= 0");
}

double coupling_factor(double gamma, double chi) {
    return chi * gamma * gamma + gamma * std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
}

double reduced_potential(double gamma, double sigma, const SystemParams& p) {
    check_gamma_sigma(gamma, sigma);
    const double c = coupling_factor(gamma, p.chi);
    const double s2 = sigma * sigma;
    const double k = p.lambda_coll * p.lambda_coll / p.omega_m_prime();
    return 0.5 * p.omega_a * (2.0 * gamma * gamma - 1.0) - k * c * c * std::exp(-2.0 * s2)
           + 0.5 / s2 - 0.5 * p.v * std::exp(-s2) + p.ng / (kSqrt8Pi * sigma);
}

double full_potential(const MeanFieldState& s, const SystemParams& p) {
    if (!(s.sigma > 0.0) || std::abs(s.norm() - 1.0) > 1e-5)
        throw Error(ErrorKind::Domain, "invalid mean-field state");
    const double s2 = s.sigma * s.sigma;
    const double pol = p.chi * std::norm(s.gamma_plus)
                       + std::real(std::conj(s.gamma_plus) * s.gamma_minus);
    return p.omega_m * std::norm(s.alpha)
           + 0.5 * p.omega_a * (std::norm(s.gamma_plus) - std::norm(s.gamma_minus))
           - p.lambda_coll * 2.0 * s.alpha.real() * pol * std::exp(-s2)
           + 0.5 / s2 - 0.5 * p.v * std::exp(-s2) + p.ng / (kSqrt8Pi * s.sigma);
}

cplx membrane_amplitude(double gamma, double sigma, const SystemParams& p) {
    check_gamma_sigma(gamma, sigma);
    const double c = coupling_factor(gamma, p.chi);
    return p.lambda_coll * c * std::exp(-sigma * sigma) / cplx(p.omega_m, -p.gamma_m);
}

double width_residual(double sigma, double gamma, const SystemParams& p) {
    check_gamma_sigma(gamma, sigma);
    const double c = coupling_factor(gamma, p.chi);
    const double s2 = sigma * sigma;
    const double k = p.lambda_coll * p.lambda_coll / p.omega_m_prime();
    return p.v * sigma * std::exp(-s2) + 4.0 * sigma * k * c * c * std::exp(-2.0 * s2)
           - 1.0 / (s2 * sigma) - p.ng / (kSqrt8Pi * s2);
}

double width_residual_slope(double sigma, double gamma, const SystemParams& p) {
    check_gamma_sigma(gamma, sigma);
    const double c = coupling_factor(gamma, p.chi);
    const double s2 = sigma * sigma;
    const double k = p.lambda_coll * p.lambda_coll / p.omega_m_prime();
    return p.v * (1.0 - 2.0 * s2) * std::exp(-s2)
           + 4.0 * k * c * c * (1.0 - 4.0 * s2) * std::exp(-2.0 * s2)
           + 3.0 / (s2 * s2) + 2.0 * p.ng / (kSqrt8Pi * s2 * sigma);
}

double breathing_frequency(double sigma0, const SystemParams& p) {
    if (!(sigma0 > 0.0)) throw Error(ErrorKind::Domain, "sigma0 must be > 0");
    const double s2 = sigma0 * sigma0;
    const double radicand = 4.0 * (3.0 / (s2 * s2)
                                   + p.ng / (std::sqrt(2.0 * std::numbers::pi) * s2 * sigma0)
                                   + p.v * (1.0 - 2.0 * s2) * std::exp(-s2));
    if (!(radicand > 0.0)) {
        std::ostringstream os;
        os << "breathing-mode radicand " << radicand << " at sigma0=" << sigma0;
        throw Error(ErrorKind::NonPositiveRadicand, os.str());
    }
    return std::sqrt(radicand);
}

double effective_lattice_depth(const SteadyState& st, const SystemParams& p) {
    const double g2 = st.gamma0 * st.gamma0;
    const double ratio2 = p.lambda_coll * p.lambda_coll / (p.omega_a * p.omega_m_prime());
    return p.v + 4.0 * p.omega_a * ratio2 * g2 * (1.0 - g2) * std::exp(-st.sigma0 * st.sigma0);
}

double displacement_mode_frequency(double sigma0, const SystemParams& p) {
    return std::sqrt(4.0 * p.v) * std::exp(-sigma0 * sigma0);
}

} // namespace nqpt
