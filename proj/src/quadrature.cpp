#include "besov/quadrature.hpp"

#include <sstream>

namespace besov {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnknownSpec: return "UnknownSpec";
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::RangeViolation: return "RangeViolation";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::DepthExceeded: return "DepthExceeded";
        case ErrorKind::EnvelopeViolated: return "EnvelopeViolated";
        case ErrorKind::DivergenceSuspicion: return "DivergenceSuspicion";
        case ErrorKind::UnboundedSuspicion: return "UnboundedSuspicion";
        case ErrorKind::SingularShift: return "SingularShift";
        case ErrorKind::NotDiagonalizable: return "NotDiagonalizable";
        case ErrorKind::SpectrumViolation: return "SpectrumViolation";
        case ErrorKind::SizeLimit: return "SizeLimit";
        case ErrorKind::ProfileDivergence: return "ProfileDivergence";
        case ErrorKind::IntegralNotNormConvergent: return "IntegralNotNormConvergent";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0) || !(line_trunc_factor > 0) || sup_grid_points < 3 ||
        sup_refine_rounds < 1 || max_depth < 10 || max_panels < 16)
        throw Error(ErrorKind::InvalidParameter, "quadrature config out of range");
}

DecayEnvelope DecayEnvelope::power(double p, double C, double T0) {
    if (!(p > 0) || !(C >= 0)) throw Error(ErrorKind::InvalidParameter, "power envelope needs p>0, C>=0");
    DecayEnvelope e;
    Term t;
    t.kind = Kind::Power;
    t.p = p;
    t.C = C;
    e.terms_.push_back(t);
    e.T0_ = T0;
    return e;
}

DecayEnvelope DecayEnvelope::exponential(double a, double C, double T0) {
    if (!(a > 0) || !(C >= 0)) throw Error(ErrorKind::InvalidParameter, "exp envelope needs a>0, C>=0");
    DecayEnvelope e;
    Term t;
    t.kind = Kind::Exp;
    t.a = a;
    t.C = C;
    e.terms_.push_back(t);
    e.T0_ = T0;
    return e;
}

DecayEnvelope DecayEnvelope::resolvent(double M, double shift, double T0) {
    if (!(M >= 0) || !(shift >= 0)) throw Error(ErrorKind::InvalidParameter, "resolvent envelope needs M,shift>=0");
    DecayEnvelope e;
    Term t;
    t.kind = Kind::Resolvent;
    t.M = M;
    t.shift = shift;
    e.terms_.push_back(t);
    e.T0_ = T0;
    return e;
}

DecayEnvelope DecayEnvelope::custom(std::function<double(double)> bound, std::function<double(double)> tail,
                                    double T0) {
    DecayEnvelope e;
    Term t;
    t.kind = Kind::Custom;
    t.bound_fn = std::move(bound);
    t.tail_fn = std::move(tail);
    e.terms_.push_back(t);
    e.T0_ = T0;
    return e;
}

double DecayEnvelope::bound(double t) const {
    double s = 0.0;
    for (const auto& x : terms_) {
        switch (x.kind) {
            case Kind::Power: s += x.C * std::pow(t, -x.p); break;
            case Kind::Exp: s += x.C * std::exp(-x.a * t); break;
            case Kind::Resolvent: s += x.M * x.M / (x.shift * x.shift + t * t); break;
            case Kind::Custom: s += x.bound_fn(t); break;
        }
    }
    return s;
}

double DecayEnvelope::tail(double T) const {
    double s = 0.0;
    for (const auto& x : terms_) {
        switch (x.kind) {
            case Kind::Power:
                if (x.C == 0) break;
                if (x.p <= 1.0) return kInf;
                s += x.C * std::pow(T, 1.0 - x.p) / (x.p - 1.0);
                break;
            case Kind::Exp: s += x.C * std::exp(-x.a * T) / x.a; break;
            case Kind::Resolvent:
                if (x.shift > 0)
                    s += x.M * x.M / x.shift * (0.5 * kPi - std::atan(T / x.shift));
                else
                    s += x.M * x.M / T;
                break;
            case Kind::Custom: s += x.tail_fn(T); break;
        }
    }
    return s;
}

DecayEnvelope DecayEnvelope::operator+(const DecayEnvelope& o) const {
    DecayEnvelope e = *this;
    if (is_zero()) e.T0_ = o.T0_;
    else if (!o.is_zero()) e.T0_ = std::max(T0_, o.T0_);
    e.terms_.insert(e.terms_.end(), o.terms_.begin(), o.terms_.end());
    return e;
}

DecayEnvelope DecayEnvelope::scaled(double c) const {
    c = std::abs(c);
    DecayEnvelope e = *this;
    for (auto& x : e.terms_) {
        switch (x.kind) {
            case Kind::Power:
            case Kind::Exp: x.C *= c; break;
            case Kind::Resolvent: x.M *= std::sqrt(c); break;
            case Kind::Custom: {
                auto b = x.bound_fn, t = x.tail_fn;
                x.bound_fn = [b, c](double s) { return c * b(s); };
                x.tail_fn = [t, c](double s) { return c * t(s); };
                break;
            }
        }
    }
    return e;
}

DecayEnvelope DecayEnvelope::dilated(double b) const {
    if (!(b > 0)) throw Error(ErrorKind::InvalidParameter, "dilation factor must be positive");
    DecayEnvelope e = *this;
    e.T0_ = T0_ / b;
    for (auto& x : e.terms_) {
        switch (x.kind) {
            case Kind::Power: x.C *= std::pow(b, 1.0 - x.p); break;
            case Kind::Exp:
                x.C *= b;
                x.a *= b;
                break;
            case Kind::Resolvent:
                x.M /= std::sqrt(b);
                x.shift /= b;
                break;
            case Kind::Custom: {
                auto bf = x.bound_fn, tf = x.tail_fn;
                x.bound_fn = [bf, b](double s) { return b * bf(b * s); };
                x.tail_fn = [tf, b](double s) { return tf(b * s); };
                break;
            }
        }
    }
    return e;
}

DecayEnvelope DecayEnvelope::with_T0(double T0) const {
    DecayEnvelope e = *this;
    e.T0_ = T0;
    return e;
}

double DecayEnvelope::truncation_point(double budget, double start) const {
    double T = std::max({T0_, start, 1e-12});
    for (int i = 0; i < 2000; ++i) {
        const double tl = tail(T);
        if (std::isinf(tl)) throw Error(ErrorKind::DivergenceSuspicion, "envelope tail not integrable: " + describe());
        if (tl <= budget) return T;
        T *= 2.0;
        if (T > 1e300) break;
    }
    throw Error(ErrorKind::DivergenceSuspicion, "no truncation point for envelope " + describe());
}

std::string DecayEnvelope::describe() const {
    if (terms_.empty()) return "zero";
    std::ostringstream os;
    os.precision(6);
    for (size_t i = 0; i < terms_.size(); ++i) {
        const auto& x = terms_[i];
        if (i) os << " + ";
        switch (x.kind) {
            case Kind::Power: os << "POWER(p=" << x.p << ",C=" << x.C << ")"; break;
            case Kind::Exp: os << "EXP(a=" << x.a << ",C=" << x.C << ")"; break;
            case Kind::Resolvent: os << "RESOLVENT(M=" << x.M << ",shift=" << x.shift << ")"; break;
            case Kind::Custom: os << "CUSTOM"; break;
        }
    }
    os << " for t>=" << T0_;
    return os.str();
}

SupResult sup_on_vertical_line(const std::function<double(double)>& phi, const SupOptions& opt,
                               const QuadratureConfig& cfg) {
    const int N = cfg.sup_grid_points | 1;
    const double scale = opt.scale > 0 ? opt.scale : 1.0;
    const double Y = std::max(opt.Y, scale);
    const double U = std::asinh(Y / scale);
    std::vector<double> ys;
    ys.reserve(2 * N);
    for (int j = 0; j < N; ++j) {
        const double u = -U + 2.0 * U * j / (N - 1);
        ys.push_back(scale * std::sinh(u));
    }
    ys[N / 2] = 0.0;
    if (opt.period > 0) {
        for (int j = 0; j < N; ++j) ys.push_back(-0.5 * opt.period + opt.period * j / (N - 1));
    }
    for (double y : opt.extra)
        if (std::isfinite(y)) ys.push_back(y);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    const int n = static_cast<int>(ys.size());
    std::vector<double> vals(n);
    for (int j = 0; j < n; ++j) {
        vals[j] = phi(ys[j]);
        if (std::isnan(vals[j]))
            throw Error(ErrorKind::NonConvergence, "NaN in supremum search at y=" + std::to_string(ys[j]));
    }

    auto better = [](double v1, double y1, double v2, double y2) {
        // values equal up to rounding count as ties
        if (!std::isfinite(v1) || !std::isfinite(v2) || std::abs(v1 - v2) > 1e-12 * std::max(std::abs(v1), std::abs(v2)))
            return v1 > v2;
        return std::abs(y1) < std::abs(y2);
    };
    std::vector<int> cand;
    for (int j = 0; j < n; ++j) {
        const double l = j > 0 ? vals[j - 1] : -kInf;
        const double r = j + 1 < n ? vals[j + 1] : -kInf;
        if (vals[j] >= l && vals[j] >= r) cand.push_back(j);
    }
    std::sort(cand.begin(), cand.end(),
              [&](int a, int b) { return better(vals[a], ys[a], vals[b], ys[b]); });
    if (cand.size() > 5) cand.resize(5);

    SupResult best;
    best.value = -kInf;
    for (int j = 0; j < n; ++j)
        if (better(vals[j], ys[j], best.value, best.arg)) {
            best.value = vals[j];
            best.arg = ys[j];
        }
    const double grid_best = best.value;
    bool at_edge = false;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double last_change = 0.0;
    for (int j : cand) {
        double a = ys[std::max(j - 1, 0)], b = ys[std::min(j + 1, n - 1)];
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = phi(c), fd = phi(d);
        double lbest = vals[j], lbest_y = ys[j];
        for (int it = 0; it < cfg.sup_refine_rounds; ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = phi(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = phi(d);
            }
            const double prev = lbest;
            if (better(fc, c, lbest, lbest_y)) {
                lbest = fc;
                lbest_y = c;
            }
            if (better(fd, d, lbest, lbest_y)) {
                lbest = fd;
                lbest_y = d;
            }
            if (it == cfg.sup_refine_rounds - 1) last_change = std::max(last_change, lbest - prev);
        }
        if (better(lbest, lbest_y, best.value, best.arg)) {
            best.value = lbest;
            best.arg = lbest_y;
            at_edge = j == 0 || j == n - 1;
        }
    }
    const double ref = std::max(std::abs(best.value), 1e-300);
    best.uncertain = at_edge || last_change > 1e-9 * ref || (best.value - grid_best) > 1e-2 * ref;
    return best;
}

namespace {
double cnorm(const cplx& z) { return std::abs(z); }
double rnorm(double x) { return std::abs(x); }
}  // namespace

QuadResult<cplx> integrate_interval(const CplxFn& g, double a, double b, const QuadratureConfig& cfg,
                                    const std::vector<double>& breaks) {
    return integrate_interval_v<cplx>(g, a, b, cfg, cnorm, cplx(0.0), breaks);
}
QuadResult<cplx> integrate_halfline(const CplxFn& g, const DecayEnvelope& env, const QuadratureConfig& cfg,
                                    const HalfLineOptions& opt) {
    return integrate_halfline_v<cplx>(g, env, cfg, cnorm, cplx(0.0), opt);
}
QuadResult<cplx> integrate_line(const CplxFn& g, const DecayEnvelope& env, const QuadratureConfig& cfg,
                                const HalfLineOptions& opt) {
    return integrate_line_v<cplx>(g, env, cfg, cnorm, cplx(0.0), opt);
}
QuadResult<double> integrate_interval_real(const RealFn& g, double a, double b, const QuadratureConfig& cfg,
                                           const std::vector<double>& breaks) {
    return integrate_interval_v<double>(g, a, b, cfg, rnorm, 0.0, breaks);
}
QuadResult<double> integrate_halfline_real(const RealFn& g, const DecayEnvelope& env, const QuadratureConfig& cfg,
                                           const HalfLineOptions& opt) {
    return integrate_halfline_v<double>(g, env, cfg, rnorm, 0.0, opt);
}
QuadResult<double> integrate_line_real(const RealFn& g, const DecayEnvelope& env, const QuadratureConfig& cfg,
                                       const HalfLineOptions& opt) {
    return integrate_line_v<double>(g, env, cfg, rnorm, 0.0, opt);
}

}  // namespace besov
