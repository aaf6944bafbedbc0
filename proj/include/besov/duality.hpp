#pragma once

#include "besov/norms.hpp"

namespace besov {

struct PairingResult {
    cplx value;
    double error_bound = 0.0;
    double g_e0 = 0.0;  // E0 seminorm of g used in the outer envelope
};

// <g,f> = int_0^inf x int_R g'(x-iy) f'(x+iy) dy dx
PairingResult pairing(const AnalyticFunction& g, const AnalyticFunction& f, const QuadratureConfig& cfg = {});

// |f(z) - f(inf) - (2/pi) <r_z, f>|
double reproduce_residual(const AnalyticFunction& f, cplx z, const QuadratureConfig& cfg = {});

}  // namespace besov
