#pragma once

#include <string>
#include <utility>
#include <vector>

#include "besov/norms.hpp"
#include "json.hpp"

namespace besov {

// One numerically computed left side against a closed-form right side.
struct EstimateReport {
    enum class Kind { Bound, Equality, Report };

    std::string estimate_id;
    Kind kind = Kind::Bound;
    double lhs = 0.0, lhs_error = 0.0;
    double rhs = 0.0, rhs_error = 0.0;
    double eq_tol = 0.0;  // Equality: |lhs - rhs| <= eq_tol
    double slack = 0.0;
    bool pass = true;
    bool certified = true;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::pair<std::string, double>> info;  // reported, never asserted
    std::string note;

    EstimateReport& param(const std::string& k, const std::string& v);
    EstimateReport& param(const std::string& k, double v);
    // slack = rhs - lhs; Bound passes when lhs <= rhs + lhs_error + rhs_error + 1e-9 max(1,|rhs|)
    void finalize();

    std::string params_string() const;
    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

std::string kind_name(EstimateReport::Kind k);
// shortest round-trip text of a double
std::string fmt_num(double v);

// sup_y |f(x+iy)|
SupResult vertical_sup_value(const AnalyticFunction& f, double x, const QuadratureConfig& cfg);

EstimateReport check_band_embedding(const std::vector<cplx>& coeffs, const std::vector<double>& taus, double eps,
                                    double sigma, const QuadratureConfig& cfg = {});
EstimateReport check_deriv_bound(const AnalyticFunction& f, double omega, const QuadratureConfig& cfg = {});
EstimateReport check_product_bound(const AnalyticFunction& f, const AnalyticFunction& g, double omega,
                                   const QuadratureConfig& cfg = {});
// f = e_tau * g with g bounded on Re z > -omega
EstimateReport check_exp_window(const AnalyticFunction& g, double tau, double omega, const QuadratureConfig& cfg = {});
EstimateReport check_decay_majorant(const AnalyticFunction& f, const DecayProfile& h, double omega,
                                    const QuadratureConfig& cfg = {});
// f = c * prod r_{a_k} (a_k > 0), whose exact boundary majorant is |c| prod (a_k^2 + t^2)^{-1/2}
std::pair<AnalyticFunction, DecayProfile> rational_decay_family(cplx c, const std::vector<double>& poles);

double exact_expinv_norm(double t);
EstimateReport check_expinv(double t, const QuadratureConfig& cfg = {});
EstimateReport check_vitse_reg(double t, const QuadratureConfig& cfg = {});
EstimateReport check_cayley(int n, const QuadratureConfig& cfg = {});
double bernstein_constant(double alpha, double beta, double theta);
EstimateReport check_bernstein(const BernsteinFunction& fb, double alpha, double beta, double theta, cplx lambda,
                               const QuadratureConfig& cfg = {});

}  // namespace besov
