#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "besov/function.hpp"
#include "json.hpp"

namespace besov {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr int kMaxOperatorSize = 64;

struct OperatorProfile {
    double K_A = 1.0;
    double K_argmax_t = 0.0;
    bool K_settled = true;
    double M_A = 1.0;  // +inf when a nonzero eigenvalue sits on the imaginary axis
    double gamma_hat = 2.0;
    double gamma_argmax_alpha = kInf;
    double gamma_weak_sample = 0.0;

    nlohmann::json to_json() const;
};

// Dense complex matrix A with spectrum in the closed right half-plane.  Jordan
// blocks on the imaginary axis are rejected at construction.
class MatrixOperator {
public:
    explicit MatrixOperator(Mat A);

    const Mat& matrix() const { return A_; }
    Eigen::Index n() const { return A_.rows(); }
    const Vec& eigenvalues() const { return lambda_; }
    bool diagonalizable() const { return diagonalizable_; }
    const Mat& eigenvectors() const { return V_; }  // meaningful when diagonalizable
    double spectral_abscissa_min() const { return min_re_; }
    double norm() const { return norm_; }
    bool is_normal(double tol = 1e-10) const;
    bool touches_axis() const { return min_re_ <= axis_tol(); }
    double axis_tol() const { return 1e-10 * std::max(1.0, norm_); }
    // complex Schur form A = Q T Q^*
    const Mat& schur_q() const { return Q_; }
    const Mat& schur_t() const { return T_; }

    // computed on first use and cached; not safe to call concurrently
    const OperatorProfile& profile(const QuadratureConfig& cfg = {}) const;

    MatrixOperator shifted(cplx a) const { return MatrixOperator(A_ + a * Mat::Identity(n(), n())); }
    MatrixOperator scaled(double b) const { return MatrixOperator(b * A_); }

private:
    Mat A_, V_, Q_, T_;
    Vec lambda_;
    bool diagonalizable_ = false;
    double min_re_ = 0.0, norm_ = 0.0;
    mutable std::optional<OperatorProfile> profile_;
};

double opnorm(const Mat& M);  // spectral norm

// (zI + A)^{-1}
Mat resolvent(const MatrixOperator& A, cplx z);
// e^{-tA}
Mat semigroup(const MatrixOperator& A, double t);

OperatorProfile compute_profile(const MatrixOperator& A, const QuadratureConfig& cfg = {}, std::uint64_t seed = 42);
// int ||(alpha+i beta+A)^{-2}|| d beta
QuadResult<double> resolvent_sq_integral(const MatrixOperator& A, double alpha, const QuadratureConfig& cfg = {});
// int |<(alpha+i beta+A)^{-2} x, y>| d beta
QuadResult<double> weak_resolvent_sq_integral(const MatrixOperator& A, double alpha, const Vec& x, const Vec& y,
                                              const QuadratureConfig& cfg = {});

struct CalculusResult {
    Mat value;
    double error_bound = 0.0;  // Frobenius norm
    bool extrapolated = false;
};

// f(inf) I - (2/pi) int_0^inf int_R alpha (alpha - i beta + A)^{-2} f'(alpha + i beta) d beta d alpha
CalculusResult apply_calculus(const MatrixOperator& A, const AnalyticFunction& f, const QuadratureConfig& cfg = {});
// sum c_k e^{-t_k A} + int e^{-tA} density(t) dt
CalculusResult hp_apply(const MatrixOperator& A, const HalfLineMeasure& mu, const QuadratureConfig& cfg = {});
// V f(Lambda) V^{-1}, or the Taylor matrix on Jordan blocks
Mat oracle_apply(const MatrixOperator& A, const AnalyticFunction& f);

double semigroup_reconstruct_check(const MatrixOperator& A, double t, const Vec& x, const Vec& xstar,
                                   const QuadratureConfig& cfg = {});

// text format: n, then n rows of n complex entries
Mat read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Mat& M);
// diag(...), jordan(lambda,m), normal_random(n,seed,re=[..],im=[..]),
// diagonalizable_random(n,seed,re,im), sectorial_random(n,seed,angle), [[..],[..]]
Mat make_matrix(const std::string& spec);
// a family spec or the path of a matrix file
MatrixOperator load_operator(const std::string& spec_or_path);

Vec random_unit_vector(Eigen::Index n, std::uint64_t seed);

}  // namespace besov
