#pragma once

#include <map>
#include <string>

#include "besov/function.hpp"
#include "json.hpp"

namespace besov {

struct NormReport {
    double value = 0.0;
    double error_bound = 0.0;
    std::map<std::string, double> pieces;
    bool certified = true;

    nlohmann::json to_json() const;
};

// sup |f| over the line Re z = -omega + 1e-6 (omega = 0: the boundary of the right half-plane)
NormReport hinf_norm(const AnalyticFunction& f, const QuadratureConfig& cfg = {}, double omega = 0.0);
NormReport b0_norm(const AnalyticFunction& f, const QuadratureConfig& cfg = {});
NormReport b_norm(const AnalyticFunction& f, const QuadratureConfig& cfg = {});
NormReport e0_norm(const AnalyticFunction& g, const QuadratureConfig& cfg = {});

// x -> sup_y |f'(x+iy)| with the search window chosen from the function's envelopes
SupResult vertical_sup_deriv(const AnalyticFunction& f, double x, const QuadratureConfig& cfg);
// x -> int |g'(x+iy)| dy
QuadResult<double> vertical_l1_deriv(const AnalyticFunction& g, double x, const QuadratureConfig& cfg);

inline constexpr double kBoundaryOffset = 1e-6;

}  // namespace besov
