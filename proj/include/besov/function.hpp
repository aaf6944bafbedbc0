#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "besov/common.hpp"
#include "besov/quadrature.hpp"

namespace besov {

// Finite measure on [0, inf): atoms plus a density built from closed-form terms.
struct HalfLineMeasure {
    struct Atom {
        double t;
        cplx c;
    };
    struct DensityTerm {
        enum class Kind { ExpPoly, Indicator } kind = Kind::ExpPoly;
        cplx coeff = 1.0;
        int k = 0;          // ExpPoly: coeff * t^k e^{-rate t}
        cplx rate = 1.0;
        double a = 0, b = 1;  // Indicator: coeff on [a,b]
    };
    std::vector<Atom> atoms;
    std::vector<DensityTerm> density;

    void validate() const;
    cplx density_at(double t) const;
    bool has_density() const { return !density.empty(); }
    double total_variation() const;  // upper bound, exact for single terms
    cplx laplace(cplx z) const;
    cplx laplace_deriv(cplx z) const;
    DecayEnvelope density_envelope() const;
    std::vector<double> density_breaks() const;
    std::string describe() const;

    static HalfLineMeasure dirac(double t, cplx c = 1.0);
    static HalfLineMeasure lebesgue(double a, double b, cplx c = 1.0);
    static HalfLineMeasure exp_density(cplx rate, cplx c = 1.0, int k = 0);
    HalfLineMeasure operator+(const HalfLineMeasure& o) const;
};

struct BernsteinFunction {
    double a = 0.0, b = 0.0;
    std::vector<std::pair<double, double>> jumps;  // (position s > 0, weight w > 0)

    void validate() const;
    cplx eval(cplx z) const;
    cplx deriv(cplx z) const;
    double at_infinity() const;  // +inf when unbounded
    std::string describe() const;
};

struct DecayProfile {
    std::function<double(double)> h;
    std::string name;

    // nonincreasing on a geometric grid and dominating |f(delta+is)| for |s| >= t
    bool check_nonincreasing(double t_max = 1e4) const;
};

// meromorphic continuation data: analytic on |zeta| >= R with
// |f(zeta) - f(inf)| <= C0/|zeta| and |f'(zeta)| <= C1/|zeta|^2 there.
struct FarField {
    double R = 0, C0 = 0, C1 = 0;
};

struct AnalyticFunction {
    std::string name;
    std::function<cplx(cplx)> f;
    std::function<cplx(cplx)> df;  // empty: Cauchy fallback
    std::optional<cplx> at_inf;
    double hinf_bound = kInf;      // certified bound of sup |f| on the open right half-plane
    double extends_left = 0.0;     // analytic and bounded on Re z > -omega for omega < extends_left
    bool in_B = true;
    bool in_E = false;
    std::optional<std::pair<double, double>> band;
    std::optional<DecayEnvelope> outer_env;     // x -> sup_y |f'(x+iy)|
    std::optional<DecayEnvelope> vertical_env;  // |y| -> sup_{x>0} |f'(x+iy)|
    std::optional<FarField> far;
    std::vector<double> peaks;  // heights y where |f'(x+iy)| concentrates
    double period = 0.0;        // f'(x+i.) periodic in y with this period
    bool singular_at_zero = false;
    std::optional<HalfLineMeasure> measure;

    cplx eval(cplx z) const { return f(z); }
    cplx deriv(cplx z) const;
    bool has_deriv() const { return static_cast<bool>(df); }
    // exact value when known; otherwise f(2^12) checked against f(2^11)
    cplx value_at_infinity(bool* certified = nullptr) const;
};

cplx deriv_fallback(const AnalyticFunction& f, cplx z, double rel_tol = 1e-10);
// j-th derivative by the Cauchy integral on a circle of radius r around z
cplx cauchy_derivative(const std::function<cplx(cplx)>& f, cplx z, double r, int order, double rel_tol = 1e-10);

namespace fn {
AnalyticFunction constant(cplx c);
AnalyticFunction exponential(double a);
AnalyticFunction resolvent(cplx a);
AnalyticFunction cayley(int n);
AnalyticFunction eta();
AnalyticFunction eta_dilated(double delta);
AnalyticFunction expinv(double t);
AnalyticFunction vitse(double t);
AnalyticFunction laplace(const HalfLineMeasure& mu);
AnalyticFunction band(double eps, double sigma, const std::vector<cplx>& coeffs, const std::vector<double>& taus);
AnalyticFunction bernstein_res(const BernsteinFunction& fb, double alpha, double beta, double theta, cplx lambda);

AnalyticFunction add(const AnalyticFunction& f, const AnalyticFunction& g);
AnalyticFunction mul(const AnalyticFunction& f, const AnalyticFunction& g);
AnalyticFunction scale(const AnalyticFunction& f, cplx c);
AnalyticFunction shift(const AnalyticFunction& f, cplx a);
AnalyticFunction dilate(const AnalyticFunction& f, double b);
AnalyticFunction reciprocal(const AnalyticFunction& f);
AnalyticFunction power(const AnalyticFunction& f, double beta);
AnalyticFunction derivative(const AnalyticFunction& f);
}  // namespace fn

// Text grammar, e.g. "exp(a=1)", "resolvent(a=1+2i)", "mul(resolvent(a=1),cayley(n=2))".
AnalyticFunction make_catalog(const std::string& spec);
HalfLineMeasure parse_measure(const std::string& spec);
BernsteinFunction parse_bernstein(const std::string& spec);
cplx parse_complex(const std::string& text);
std::string format_complex(cplx z);

// The catalog used by the property and acceptance suites.
std::vector<std::string> catalog_specs();

}  // namespace besov
