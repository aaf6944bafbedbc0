#pragma once

#include <string>
#include <vector>

#include "besov/estimates.hpp"
#include "besov/operator.hpp"

namespace besov {

// Operator-level bounds.  The Hilbert-space bounds are exercised on normal
// matrices, where K_A is exact; the others use the computed profile.

// ||f(A)|| for f = sum c_j e_{tau_j}: normal A against 2K^2(1+2log(1+2s/e))||f||_inf,
// otherwise the sectorial constant 4(2pi+3log2) M(log M+1)(1+4log(1+s/e))||f||_inf
EstimateReport check_band_operator(const MatrixOperator& A, const std::vector<cplx>& coeffs,
                                   const std::vector<double>& taus, double eps, double sigma,
                                   const QuadratureConfig& cfg = {});
// ||f(A)|| <= 2 K^2 ||f||_B
EstimateReport check_hilbert_bound(const MatrixOperator& A, const AnalyticFunction& f, const QuadratureConfig& cfg = {});
// ||f(A)|| <= gamma_hat ||f||_B and gamma_hat <= 8(2+log2) M(log M+1)
EstimateReport check_sectorial_bound(const MatrixOperator& A, const AnalyticFunction& f,
                                     const QuadratureConfig& cfg = {});
// ||g(A) e^{-tau A}|| <= 2K^2 (2 + log(1+1/(omega tau))/2) ||g||_{H_omega}
EstimateReport check_smoothed_window(const MatrixOperator& A, const AnalyticFunction& g, double omega, double tau,
                                     const QuadratureConfig& cfg = {});
// ||g(A)(lambda+A)^{-alpha}|| <= (4+1/alpha) m^{-alpha} K^2 ||g||_{H_omega}, m = min(omega, Re lambda)
EstimateReport check_fractional_smoothing(const MatrixOperator& A, const AnalyticFunction& g, double omega,
                                          cplx lambda, double alpha, const QuadratureConfig& cfg = {});
// ||f'(A)|| <= 3K^2/omega ||f||_{H_omega}
EstimateReport check_deriv_operator(const MatrixOperator& A, const AnalyticFunction& f, double omega,
                                    const QuadratureConfig& cfg = {});

// ||e^{-tA}|| <= M e^{-omega t}, omega rounded down and M rounded up to three digits
struct StabilityFit {
    double M = 1.0;
    double omega = 0.0;
    double slope = 0.0;  // raw regression slope
};
StabilityFit fit_exponential_stability(const MatrixOperator& A);

// ||f(A)|| <= 6 M^2 int h/(omega+t)
EstimateReport check_exp_stable_decay(const MatrixOperator& A, const AnalyticFunction& f, const DecayProfile& h,
                                      const QuadratureConfig& cfg = {});

// ||exp(-t A^{-1})|| against 2M^2(2-e^{-t/w}) or 2M^2(2-e^{-1}+e^{-1}log(t/w))
EstimateReport inverse_generator_check(const MatrixOperator& A, double t, const QuadratureConfig& cfg = {});
// f_t(A/w - I) with f_t = expinv(t/w) against the direct exponential; lhs is the Frobenius defect
EstimateReport inverse_generator_calculus(const MatrixOperator& A, double t, const QuadratureConfig& cfg = {});
// measured C_A (1 + log(1+t)), reported only
EstimateReport inverse_generator_growth(const MatrixOperator& A, double t, const QuadratureConfig& cfg = {});

// ||V(A)^n|| <= 2K^2(3+2log 2n), V(A) = (A-I)(A+I)^{-1}
EstimateReport cayley_power_check(const MatrixOperator& A, int n, const QuadratureConfig& cfg = {});
// Frobenius distance between V(A)^n and the calculus value of cayley(n)
EstimateReport cayley_power_calculus(const MatrixOperator& A, int n, const QuadratureConfig& cfg = {});

// Hausdorff distance (finite M_A) or one-sided inclusion defect between
// eig(f(A)) u {f(inf)} and f(sigma(A)) u {f(inf)}
EstimateReport spectral_mapping_check(const MatrixOperator& A, const AnalyticFunction& f,
                                      const QuadratureConfig& cfg = {});

struct Curve {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const;
};

struct ConvergenceDemo {
    Curve curve;  // n, ||f(A/n)x - f(0)x||, ||f(nA)x - f(0)x||
    EstimateReport report;
};

// f_n(z) = f(z/n); asserts the last value is below a tenth of the first.  The
// dilation f(nz) is tabulated alongside without any assertion.
ConvergenceDemo convergence_demo(const MatrixOperator& A, const AnalyticFunction& f, const std::vector<int>& ns,
                                 const Vec& x, const QuadratureConfig& cfg = {});

}  // namespace besov
