#pragma once

#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace besov {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorKind {
    UnknownSpec,
    InvalidParameter,
    RangeViolation,
    NonConvergence,
    DepthExceeded,
    EnvelopeViolated,
    DivergenceSuspicion,
    UnboundedSuspicion,
    SingularShift,
    NotDiagonalizable,
    SpectrumViolation,
    SizeLimit,
    ProfileDivergence,
    IntegralNotNormConvergent,
    ParseError,
    IoError,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct QuadratureConfig {
    double abs_tol = 1e-8;
    double rel_tol = 1e-7;
    int max_depth = 40;
    double line_trunc_factor = 1e3;
    int sup_grid_points = 257;
    int sup_refine_rounds = 30;
    int max_panels = 4000;

    void validate() const;
    QuadratureConfig tightened(double factor) const {
        QuadratureConfig c = *this;
        c.abs_tol *= factor;
        c.rel_tol *= factor;
        return c;
    }
};

}  // namespace besov
