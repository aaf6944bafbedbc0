#include "besov/operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <tuple>
#include <unsupported/Eigen/MatrixFunctions>

#include "besov/norms.hpp"
#include "besov/spec_parser.hpp"

namespace besov {

namespace {

constexpr double kBendAngle = kPi / 3;
const cplx kI(0.0, 1.0);

Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

// (w I + T)^{-1} for upper triangular T
Mat tri_inverse(const Mat& T, cplx w) {
    Mat M = T;
    M.diagonal().array() += w;
    return M.triangularView<Eigen::Upper>().solve(identity(T.rows()));
}

Mat tri_inverse_sq(const Mat& T, cplx w) {
    const Mat X = tri_inverse(T, w);
    return X.triangularView<Eigen::Upper>() * X;
}

double sup_bound(const AnalyticFunction& f, const QuadratureConfig& cfg) {
    if (std::isfinite(f.hinf_bound)) return f.hinf_bound;
    const NormReport h = hinf_norm(f, cfg);
    return h.value * (1 + 1e-3) + h.error_bound;
}

double max_abs_peak(const AnalyticFunction& f) {
    double m = 0.0;
    for (double p : f.peaks) m = std::max(m, std::abs(p));
    return m;
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

struct KSweep {
    double K = 1.0, t = 0.0;
    bool settled = true;
};

// sup_t ||e^{-tA}|| on a geometric grid, extended until the running max is flat for two decades
KSweep semigroup_sup(const MatrixOperator& A) {
    auto knorm = [&](double t) { return opnorm(semigroup(A, t)); };
    KSweep r;
    constexpr int per = 16;
    int last_gain = -5;
    std::vector<double> decade_best;
    bool settled = false;
    for (int d = -4; d < 8; ++d) {
        for (int j = 0; j < per; ++j) {
            const double t = std::pow(10.0, d + double(j) / per);
            const double v = knorm(t);
            if (!std::isfinite(v)) throw Error(ErrorKind::ProfileDivergence, "semigroup norm is not finite");
            if (v > r.K * (1 + 1e-9)) {
                r.K = v;
                r.t = t;
                last_gain = d;
            }
        }
        decade_best.push_back(r.K);
        if (d >= 1 && d - last_gain >= 2) {
            settled = true;
            break;
        }
    }
    if (!settled) {
        const size_t m = decade_best.size();
        if (decade_best[m - 1] > decade_best[m - 3] * (1 + 1e-3))
            throw Error(ErrorKind::ProfileDivergence,
                        "||e^{-tA}|| still growing at t = 1e8 (" + std::to_string(decade_best[m - 1]) + ")");
        r.settled = false;
    }
    if (r.t > 0) {
        // golden section in log t around the grid maximum
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = std::log(r.t) - std::log(10.0) / per, b = std::log(r.t) + std::log(10.0) / per;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = knorm(std::exp(c)), fd = knorm(std::exp(d));
        for (int it = 0; it < 30; ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = knorm(std::exp(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = knorm(std::exp(d));
            }
            if (std::max(fc, fd) > r.K) {
                r.K = std::max(fc, fd);
                r.t = std::exp(fc > fd ? c : d);
            }
        }
    }
    return r;
}

double sectoriality(const MatrixOperator& A, const QuadratureConfig& cfg) {
    const double tol = A.axis_tol();
    double min_pos_re = 1.0;
    for (const cplx& l : A.eigenvalues()) {
        if (l.real() <= tol && std::abs(l) > tol) return kInf;
        if (l.real() > tol) min_pos_re = std::min(min_pos_re, l.real());
    }
    const Mat& T = A.schur_t();
    const double tiny = 1e-9 * std::max(1.0, A.norm());
    auto phi = [&](double y) {
        const cplx z(0.0, y == 0 ? tiny : y);
        return opnorm(z * tri_inverse(T, z));
    };
    SupOptions opt;
    opt.scale = std::clamp(min_pos_re, 1e-6, 1.0);
    opt.Y = 1e4 * std::max(1.0, A.norm());
    for (const cplx& l : A.eigenvalues()) opt.extra.push_back(-l.imag());
    const SupResult s = sup_on_vertical_line(phi, opt, cfg);
    return std::max(s.value, 1.0);
}

HalfLineOptions beta_options(const MatrixOperator& A, double alpha) {
    HalfLineOptions opt;
    opt.scale = std::max(alpha, 1e-9);
    opt.compactify = true;
    for (const cplx& l : A.eigenvalues()) opt.breaks.push_back(-l.imag());
    opt.breaks = sorted_unique(opt.breaks);
    return opt;
}

// ||(zeta + A)^{-2}|| <= 4/|zeta|^2 once |zeta| >= 2||A||
DecayEnvelope resolvent_sq_envelope(const MatrixOperator& A, double alpha) {
    return DecayEnvelope::resolvent(2.0, alpha, 2.0 * A.norm());
}

QuadratureConfig alpha_scaled(const QuadratureConfig& cfg, double alpha) {
    QuadratureConfig c = cfg;
    c.abs_tol = cfg.abs_tol / alpha;
    return c;
}

template <class F>
std::pair<double, double> log_golden_max(F&& v, double x0, double width, double best, double best_x, int rounds) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(x0) - width, b = std::log(x0) + width;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = v(std::exp(c)), fd = v(std::exp(d));
    for (int it = 0; it < rounds; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = v(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = v(std::exp(d));
        }
        if (fc > best) {
            best = fc;
            best_x = std::exp(c);
        }
        if (fd > best) {
            best = fd;
            best_x = std::exp(d);
        }
    }
    return {best, best_x};
}

cplx boundary_value(const AnalyticFunction& f, cplx z) {
    if (z.real() > 0) return f.eval(z);
    // first-order extrapolation of the boundary limit from two offset lines
    return 2.0 * f.eval(z + kBoundaryOffset) - f.eval(z + 2 * kBoundaryOffset);
}

CalculusResult apply_direct(const MatrixOperator& A, const AnalyticFunction& f, const QuadratureConfig& cfg) {
    const Eigen::Index n = A.n();
    const Mat& T = A.schur_t();
    const Mat& Q = A.schur_q();
    bool cert_inf = false;
    const cplx finf = f.value_at_infinity(&cert_inf);
    CalculusResult r;
    r.value = finf * identity(n);
    r.error_bound = cert_inf ? 0.0 : 1e-6 * std::abs(finf) * std::sqrt(double(n));
    if (!f.outer_env) throw Error(ErrorKind::DivergenceSuspicion, f.name + ": no outer decay envelope");
    if (f.outer_env->is_zero()) return r;

    const double hf = sup_bound(f, cfg);
    const double sphi = std::sin(kBendAngle);
    const double rn = std::sqrt(double(n));
    const double pk = max_abs_peak(f);
    std::vector<double> base_breaks = {0.0};
    for (const cplx& l : A.eigenvalues()) base_breaks.push_back(l.imag());
    for (double p : f.peaks) base_breaks.push_back(p);
    base_breaks = sorted_unique(base_breaks);
    auto frob = [](const Mat& m) { return m.norm(); };
    const Mat zero = Mat::Zero(n, n);

    const DecayEnvelope& fenv = *f.outer_env;
    // alpha int ||(alpha + i beta + A)^{-2}|| d beta <= 4 pi for alpha >= 2||A||
    const DecayEnvelope env = fenv.scaled(4.0 * kPi * rn * 1.01).with_T0(std::max(fenv.T0(), 2.0 * A.norm()));
    // absolute inner tolerance, relaxed to a fraction of the outer envelope once that is small
    auto inner_tol = [&](double a) {
        double t = cfg.abs_tol / std::max(1.0, a * a);
        if (a >= env.T0() && a > 0) t = std::max(t, cfg.rel_tol * env.bound(a) / a);
        return 0.1 * t;
    };
    auto inner = [&](double a) -> Mat {
        // tails bent into Im zeta < 0: f' moves right, |a - i zeta| >= max(2||A||, |zeta|/2)
        const double Tc = std::max({4.0 * A.norm(), 2.0 * a, 1.0, 2.0 * pk + 1.0});
        auto H = [&](cplx zeta) -> Mat { return tri_inverse_sq(T, a - kI * zeta) * f.deriv(a + kI * zeta); };
        // |f'| on the ray is bounded both by sup|f|/(2 Re) and by the outer envelope at Re = a + s sin(phi)
        auto bound = [=, &fenv](double s) {
            const double x = a + s * sphi;
            double fb = hf / (2.0 * x);
            if (x >= fenv.T0()) fb = std::min(fb, fenv.bound(x));
            return rn * 16.0 / (Tc * Tc + s * s) * fb;
        };
        auto tail = [=, &fenv](double S) {
            double t = rn * 4.0 * hf / (sphi * Tc * Tc) * std::log1p(Tc * Tc / (S * S));
            if (a + S * sphi >= fenv.T0()) t = std::min(t, rn * 16.0 / (Tc * Tc * sphi) * fenv.tail(a + S * sphi));
            return t;
        };
        QuadratureConfig c = cfg;
        c.abs_tol = inner_tol(a);
        c.rel_tol = 0.1 * cfg.rel_tol;
        std::vector<double> br;
        for (double b : base_breaks)
            if (std::abs(b) < Tc) br.push_back(b);
        return integrate_bent_line_v<Mat>(H, Tc, +1, kBendAngle, DecayEnvelope::custom(bound, tail), c, frob, zero, br,
                                          0.25 * Tc, true)
            .value;
    };
    auto P = [&](double a) -> Mat { return a * inner(a); };
    HalfLineOptions opt;
    opt.scale = 1.0;
    opt.first_panel_power = f.singular_at_zero ? 4 : 0;
    opt.compactify = true;
    auto q = integrate_halfline_v<Mat>(P, env, cfg, frob, zero, opt);
    // alpha e(alpha) <= 0.1 abs_tol min(alpha, 1/alpha) + 0.1 rel_tol (||P(alpha)|| + env(alpha))
    const double Tout = env.truncation_point(0.25 * cfg.abs_tol, 1.0);
    const double inner_err = 0.1 * cfg.abs_tol * (0.5 + std::log(std::max(1.0, Tout))) +
                             0.1 * cfg.rel_tol * (q.value.norm() + env.tail(env.T0()));
    r.value -= (2.0 / kPi) * (Q * q.value * Q.adjoint());
    r.error_bound += (2.0 / kPi) * (q.error + inner_err);
    return r;
}

}  // namespace

nlohmann::json OperatorProfile::to_json() const {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return "inf";
    };
    nlohmann::json j;
    j["K_A"] = K_A;
    j["K_argmax_t"] = K_argmax_t;
    j["K_settled"] = K_settled;
    j["M_A"] = num(M_A);
    j["gamma_hat"] = gamma_hat;
    j["gamma_argmax_alpha"] = num(gamma_argmax_alpha);
    j["gamma_weak_sample"] = gamma_weak_sample;
    return j;
}

double opnorm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    // largest eigenvalue of M^* M; an order of magnitude cheaper than an SVD at these sizes
    const Mat H = M.adjoint() * M;
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

MatrixOperator::MatrixOperator(Mat A) : A_(std::move(A)) {
    if (A_.rows() != A_.cols() || A_.rows() == 0) throw Error(ErrorKind::InvalidParameter, "matrix must be square");
    if (A_.rows() > kMaxOperatorSize)
        throw Error(ErrorKind::SizeLimit, "matrix size " + std::to_string(A_.rows()) + " exceeds 64");
    if (!A_.allFinite()) throw Error(ErrorKind::InvalidParameter, "matrix has non-finite entries");
    const Eigen::Index n = A_.rows();
    norm_ = opnorm(A_);
    Eigen::ComplexEigenSolver<Mat> es(A_);
    lambda_ = es.eigenvalues();
    V_ = es.eigenvectors();
    Eigen::ComplexSchur<Mat> cs(A_);
    Q_ = cs.matrixU();
    T_ = cs.matrixT();
    min_re_ = kInf;
    for (const cplx& l : lambda_) min_re_ = std::min(min_re_, l.real());
    const double tol = axis_tol();
    if (min_re_ < -tol)
        throw Error(ErrorKind::SpectrumViolation, "eigenvalue with negative real part " + std::to_string(min_re_));
    Eigen::BDCSVD<Mat> vs(V_);
    const auto& sv = vs.singularValues();
    diagonalizable_ = sv(n - 1) > 0 && sv(0) / sv(n - 1) < 1e10;
    // eigenvalues on the imaginary axis must be semisimple
    const double cluster = 1e-6 * std::max(1.0, norm_);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx l = lambda_(k);
        if (l.real() > tol) continue;
        int m = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs(lambda_(j) - l) <= cluster) ++m;
        if (m < 2) continue;
        Eigen::BDCSVD<Mat> rs(A_ - l * identity(n));
        int rank = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (rs.singularValues()(j) > 1e-8 * std::max(1.0, norm_)) ++rank;
        if (n - rank < m)
            throw Error(ErrorKind::SpectrumViolation,
                        "Jordan block on the imaginary axis at " + format_complex(l) + "; the semigroup is unbounded");
    }
}

bool MatrixOperator::is_normal(double tol) const {
    const Mat c = A_ * A_.adjoint() - A_.adjoint() * A_;
    return c.norm() <= tol * std::max(1.0, norm_ * norm_);
}

const OperatorProfile& MatrixOperator::profile(const QuadratureConfig& cfg) const {
    if (!profile_) profile_ = compute_profile(*this, cfg);
    return *profile_;
}

Mat resolvent(const MatrixOperator& A, cplx z) {
    const Mat M = z * identity(A.n()) + A.matrix();
    Eigen::PartialPivLU<Mat> lu(M);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) throw Error(ErrorKind::SingularShift, "-z is (numerically) an eigenvalue, z = " + format_complex(z));
    Mat X = lu.inverse();
    const double resid = (M * X - identity(A.n())).norm();
    if (resid > 1e-10 * std::max(1.0, 1.0 / rc))
        throw Error(ErrorKind::NonConvergence, "resolvent residual " + std::to_string(resid));
    return X;
}

Mat semigroup(const MatrixOperator& A, double t) {
    if (!(t >= 0)) throw Error(ErrorKind::InvalidParameter, "semigroup needs t >= 0");
    if (t == 0) return identity(A.n());
    const Mat M = -t * A.matrix();
    return M.exp();
}

QuadResult<double> resolvent_sq_integral(const MatrixOperator& A, double alpha, const QuadratureConfig& cfg) {
    if (!(alpha > 0)) throw Error(ErrorKind::InvalidParameter, "alpha must be positive");
    const Mat& T = A.schur_t();
    auto G = [&](double beta) { return opnorm(tri_inverse_sq(T, cplx(alpha, beta))); };
    return integrate_line_real(G, resolvent_sq_envelope(A, alpha), cfg, beta_options(A, alpha));
}

QuadResult<double> weak_resolvent_sq_integral(const MatrixOperator& A, double alpha, const Vec& x, const Vec& y,
                                              const QuadratureConfig& cfg) {
    if (!(alpha > 0)) throw Error(ErrorKind::InvalidParameter, "alpha must be positive");
    const Mat& T = A.schur_t();
    const Vec xs = A.schur_q().adjoint() * x, ys = A.schur_q().adjoint() * y;
    auto G = [&](double beta) { return std::abs(ys.dot(tri_inverse_sq(T, cplx(alpha, beta)) * xs)); };
    return integrate_line_real(G, resolvent_sq_envelope(A, alpha).scaled(x.norm() * y.norm()), cfg,
                               beta_options(A, alpha));
}

OperatorProfile compute_profile(const MatrixOperator& A, const QuadratureConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    OperatorProfile p;
    const KSweep ks = semigroup_sup(A);
    p.K_A = ks.K;
    p.K_argmax_t = ks.t;
    p.K_settled = ks.settled;
    p.M_A = sectoriality(A, cfg);

    // gamma_hat: (2/pi) sup_alpha alpha int ||(alpha+i beta+A)^{-2}|| d beta; the alpha -> inf limit is 2
    auto gv = [&](double a) { return 2.0 / kPi * a * resolvent_sq_integral(A, a, alpha_scaled(cfg, a)).value; };
    double best = 0.0, best_a = 1.0;
    int best_k = 0;
    for (int k = -20; k <= 20; ++k) {
        const double a = std::ldexp(1.0, k);
        const double v = gv(a);
        if (v > best) {
            best = v;
            best_a = a;
            best_k = k;
        }
    }
    if (best_k > -20 && best_k < 20) std::tie(best, best_a) = log_golden_max(gv, best_a, std::log(2.0), best, best_a, 25);
    if (best > 2.0) {
        p.gamma_hat = best;
        p.gamma_argmax_alpha = best_a;
    } else {
        p.gamma_hat = 2.0;
        p.gamma_argmax_alpha = kInf;
    }

    // weak lower bound from random unit pairs, evaluated jointly on shared nodes
    constexpr int pairs = 200;
    const Eigen::Index n = A.n();
    Mat X(n, pairs), Y(n, pairs);
    for (int j = 0; j < pairs; ++j) {
        X.col(j) = random_unit_vector(n, seed + 2 * j);
        Y.col(j) = random_unit_vector(n, seed + 2 * j + 1);
    }
    const Mat Xs = A.schur_q().adjoint() * X, Ys = A.schur_q().adjoint() * Y;
    const Mat& T = A.schur_t();
    double weak = 0.0;
    for (int k = -10; k <= 10; ++k) {
        const double a = std::ldexp(1.0, k);
        auto G = [&](double beta) -> Eigen::VectorXd {
            const Mat W = tri_inverse_sq(T, cplx(a, beta)) * Xs;
            return (Ys.conjugate().cwiseProduct(W)).colwise().sum().cwiseAbs().transpose();
        };
        auto maxnorm = [](const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); };
        auto q = integrate_line_v<Eigen::VectorXd>(G, resolvent_sq_envelope(A, a), alpha_scaled(cfg, a), maxnorm,
                                                   Eigen::VectorXd::Zero(pairs), beta_options(A, a));
        weak = std::max(weak, 2.0 / kPi * a * q.value.maxCoeff());
    }
    p.gamma_weak_sample = weak;
    return p;
}

CalculusResult apply_calculus(const MatrixOperator& A, const AnalyticFunction& f, const QuadratureConfig& cfg) {
    cfg.validate();
    if (!f.in_B) throw Error(ErrorKind::IntegralNotNormConvergent, f.name + " is not flagged as a member of B");
    if (!A.touches_axis()) return apply_direct(A, f, cfg);
    if (std::isfinite(A.profile(cfg).M_A)) return apply_direct(A, f, cfg);
    // spectrum on the imaginary axis without sectoriality: f(A + eps) for three eps, quadratic extrapolation to 0
    const double eps[3] = {1e-3, 1e-4, 1e-5};
    CalculusResult F[3];
    for (int k = 0; k < 3; ++k) F[k] = apply_direct(A.shifted(eps[k]), f, cfg);
    CalculusResult r;
    r.value = Mat::Zero(A.n(), A.n());
    for (int k = 0; k < 3; ++k) {
        double L = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != k) L *= eps[j] / (eps[j] - eps[k]);
        r.value += L * F[k].value;
        r.error_bound += std::abs(L) * F[k].error_bound;
    }
    // the linear two-level estimate from the two smallest shifts measures the extrapolation error
    const Mat lin = (eps[1] * F[2].value - eps[2] * F[1].value) / (eps[1] - eps[2]);
    r.error_bound += (lin - r.value).norm();
    r.extrapolated = true;
    return r;
}

CalculusResult hp_apply(const MatrixOperator& A, const HalfLineMeasure& mu, const QuadratureConfig& cfg) {
    cfg.validate();
    mu.validate();
    const Eigen::Index n = A.n();
    CalculusResult r;
    r.value = Mat::Zero(n, n);
    for (const auto& at : mu.atoms) r.value += at.c * semigroup(A, at.t);
    if (!mu.has_density()) return r;
    const double K = semigroup_sup(A).K;
    auto g = [&](double t) -> Mat { return semigroup(A, t) * mu.density_at(t); };
    auto frob = [](const Mat& m) { return m.norm(); };
    HalfLineOptions opt;
    opt.scale = 1.0;
    opt.breaks = mu.density_breaks();
    const DecayEnvelope env = mu.density_envelope().scaled(K * std::sqrt(double(n)) * 1.01);
    auto q = integrate_halfline_v<Mat>(g, env, cfg, frob, Mat::Zero(n, n), opt);
    r.value += q.value;
    r.error_bound = q.error;
    return r;
}

Mat oracle_apply(const MatrixOperator& A, const AnalyticFunction& f) {
    const Eigen::Index n = A.n();
    if (A.diagonalizable()) {
        Vec d(n);
        for (Eigen::Index k = 0; k < n; ++k) d(k) = boundary_value(f, A.eigenvalues()(k));
        const Mat& V = A.eigenvectors();
        return V * d.asDiagonal() * V.partialPivLu().inverse();
    }
    // block diagonal of Jordan blocks J(lambda, m) in canonical form
    const Mat& M = A.matrix();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool super = j == i + 1 && (M(i, j) == 1.0 || M(i, j) == 0.0);
            if (!super && M(i, j) != 0.0)
                throw Error(ErrorKind::NotDiagonalizable, "defective matrix outside the Jordan-block helper");
            if (super && M(i, j) == 1.0 && M(i, i) != M(j, j))
                throw Error(ErrorKind::NotDiagonalizable, "Jordan chain with unequal diagonal");
        }
    Mat out = Mat::Zero(n, n);
    Eigen::Index s = 0;
    while (s < n) {
        Eigen::Index e = s + 1;
        while (e < n && M(e - 1, e) == 1.0) ++e;
        const cplx l = M(s, s);
        const Eigen::Index m = e - s;
        std::vector<cplx> taylor(static_cast<size_t>(m));
        taylor[0] = boundary_value(f, l);
        if (m > 1) {
            if (!(l.real() > 0))
                throw Error(ErrorKind::NotDiagonalizable, "Jordan block on the imaginary axis");
            taylor[1] = f.deriv(l);
            double fact = 1.0;
            for (Eigen::Index j = 2; j < m; ++j) {
                fact *= double(j);
                taylor[j] = cauchy_derivative(f.f, l, 0.5 * l.real(), int(j)) / fact;
            }
        }
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i; j < m; ++j) out(s + i, s + j) = taylor[static_cast<size_t>(j - i)];
        s = e;
    }
    return out;
}

double semigroup_reconstruct_check(const MatrixOperator& A, double t, const Vec& x, const Vec& xstar,
                                   const QuadratureConfig& cfg) {
    cfg.validate();
    if (!(t > 0)) throw Error(ErrorKind::InvalidParameter, "t must be positive");
    if (x.size() != A.n() || xstar.size() != A.n()) throw Error(ErrorKind::InvalidParameter, "vector size mismatch");
    const double a = 1.0 / t;
    const Mat& T = A.schur_t();
    const Vec xs = A.schur_q().adjoint() * x, ys = A.schur_q().adjoint() * xstar;
    // tails bent into Im zeta > 0 where e^{i zeta t} decays
    const double Tc = std::max({4.0 * A.norm(), 2.0 * a, 1.0});
    const double sphi = std::sin(kBendAngle);
    const double C = 16.0 * x.norm() * xstar.norm() * std::exp(1.0);
    auto h = [&](cplx zeta) -> cplx {
        const cplx w = a + kI * zeta;
        return ys.dot(tri_inverse_sq(T, w) * xs) * std::exp(w * t);
    };
    auto bound = [=](double s) { return C / (Tc * Tc + s * s) * std::exp(-s * t * sphi); };
    auto tail = [=](double S) { return C / (Tc * Tc * t * sphi) * std::exp(-S * t * sphi); };
    std::vector<double> br = {0.0};
    for (const cplx& l : A.eigenvalues())
        if (std::abs(l.imag()) < Tc) br.push_back(-l.imag());
    QuadratureConfig c = cfg;
    c.abs_tol = cfg.abs_tol * t;
    auto cabs = [](const cplx& v) { return std::abs(v); };
    auto q = integrate_bent_line_v<cplx>(h, Tc, -1, kBendAngle, DecayEnvelope::custom(bound, tail), c, cabs, cplx(0.0),
                                         sorted_unique(br), std::max(1.0 / t, 0.25 * Tc));
    const cplx rec = q.value / (2.0 * kPi * t);
    const cplx ref = xstar.dot(semigroup(A, t) * x);
    return std::abs(rec - ref);
}

// ---------------------------------------------------------------- matrix text and families

Mat read_matrix(std::istream& in) {
    long n = 0;
    if (!(in >> n) || n <= 0) throw Error(ErrorKind::ParseError, "matrix file: expected a positive size");
    if (n > kMaxOperatorSize) throw Error(ErrorKind::SizeLimit, "matrix size " + std::to_string(n) + " exceeds 64");
    Mat M(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            std::string tok;
            if (!(in >> tok)) throw Error(ErrorKind::ParseError, "matrix file: too few entries");
            M(i, j) = parse_complex(tok);
        }
    std::string extra;
    if (in >> extra) throw Error(ErrorKind::ParseError, "matrix file: trailing data '" + extra + "'");
    return M;
}

void write_matrix(std::ostream& out, const Mat& M) {
    out << M.rows() << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << format_complex(M(i, j));
        out << '\n';
    }
}

Vec random_unit_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = N(rng);
        v(i) = cplx(re, N(rng));
    }
    return v / v.norm();
}

namespace {

using spec::Node;

Mat gaussian(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Mat G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = N(rng);
            G(i, j) = cplx(re, N(rng));
        }
    return G;
}

std::pair<double, double> range_of(const Node& n, const std::string& key, std::pair<double, double> def) {
    const Node* v = spec::kw(n, key);
    if (!v) return def;
    auto items = spec::as_list(*v);
    if (items.size() != 2) throw Error(ErrorKind::ParseError, key + " must be [lo,hi]");
    const double lo = spec::real_of(items[0], key), hi = spec::real_of(items[1], key);
    if (!(lo <= hi)) throw Error(ErrorKind::InvalidParameter, key + " needs lo <= hi");
    return {lo, hi};
}

Eigen::Index size_of(const Node& n) {
    const double d = spec::get_r(n, "n", 0, std::nullopt);
    if (d < 1 || d != std::floor(d)) throw Error(ErrorKind::InvalidParameter, "n must be a positive integer");
    if (d > kMaxOperatorSize) throw Error(ErrorKind::SizeLimit, "matrix size exceeds 64");
    return static_cast<Eigen::Index>(d);
}

// well-conditioned random similarity
Mat random_similar(const Vec& lam, std::mt19937_64& rng) {
    const Eigen::Index n = lam.size();
    const Mat S = identity(n) + (0.5 / std::sqrt(double(n))) * gaussian(n, rng);
    return S * lam.asDiagonal() * S.partialPivLu().inverse();
}

Mat from_rows(const Node& n) {
    const auto rows = spec::as_list(n);
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    if (m == 0 || m > kMaxOperatorSize) throw Error(ErrorKind::SizeLimit, "matrix literal has bad size");
    Mat M(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& r = rows[static_cast<size_t>(i)];
        if (r.kind != Node::Kind::List || static_cast<Eigen::Index>(r.items.size()) != m)
            throw Error(ErrorKind::ParseError, "matrix literal must be square");
        for (Eigen::Index j = 0; j < m; ++j) M(i, j) = spec::num_of(r.items[static_cast<size_t>(j)], "entry");
    }
    return M;
}

}  // namespace

Mat make_matrix(const std::string& text) {
    const Node n = spec::parse(text);
    if (n.kind == Node::Kind::List) return from_rows(n);
    if (n.kind == Node::Kind::Number) return Mat::Constant(1, 1, n.num);
    const std::string& id = n.name;
    if (id == "matrix") {
        const Node* rows = spec::kw(n, "rows", 0);
        if (!rows) throw Error(ErrorKind::ParseError, "matrix needs rows");
        return from_rows(*rows);
    }
    if (id == "diag") {
        std::vector<Node> vals = n.positional;
        if (vals.size() == 1 && vals[0].kind == Node::Kind::List) vals = vals[0].items;
        if (vals.empty()) throw Error(ErrorKind::InvalidParameter, "diag needs entries");
        if (vals.size() > kMaxOperatorSize) throw Error(ErrorKind::SizeLimit, "matrix size exceeds 64");
        Vec d(static_cast<Eigen::Index>(vals.size()));
        for (size_t k = 0; k < vals.size(); ++k) d(static_cast<Eigen::Index>(k)) = spec::num_of(vals[k], "diag entry");
        return d.asDiagonal();
    }
    if (id == "jordan") {
        const cplx l = spec::get_c(n, "lambda", 0, std::nullopt);
        const double m = spec::get_r(n, "m", 1, std::nullopt);
        if (m < 1 || m != std::floor(m) || m > kMaxOperatorSize)
            throw Error(ErrorKind::InvalidParameter, "jordan block size must be in 1..64");
        const Eigen::Index k = static_cast<Eigen::Index>(m);
        Mat J = l * identity(k);
        for (Eigen::Index i = 0; i + 1 < k; ++i) J(i, i + 1) = 1.0;
        return J;
    }
    if (id == "normal_random" || id == "diagonalizable_random") {
        const Eigen::Index m = size_of(n);
        const auto seed = static_cast<std::uint64_t>(spec::get_r(n, "seed", 1, 42.0));
        const auto re = range_of(n, "re", {0.5, 5.0});
        const auto im = range_of(n, "im", {-5.0, 5.0});
        if (re.first < 0) throw Error(ErrorKind::InvalidParameter, "spectrum box must lie in Re >= 0");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        Vec lam(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double x = re.first + (re.second - re.first) * U(rng);
            lam(k) = cplx(x, im.first + (im.second - im.first) * U(rng));
        }
        if (id == "diagonalizable_random") return random_similar(lam, rng);
        const Mat Qm = Eigen::HouseholderQR<Mat>(gaussian(m, rng)).householderQ();
        return Qm * lam.asDiagonal() * Qm.adjoint();
    }
    if (id == "sectorial_random") {
        const Eigen::Index m = size_of(n);
        const auto seed = static_cast<std::uint64_t>(spec::get_r(n, "seed", 1, 42.0));
        const double angle = spec::get_r(n, "angle", 2, kPi / 4);
        if (!(angle > 0 && angle < kPi / 2)) throw Error(ErrorKind::InvalidParameter, "angle must lie in (0, pi/2)");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        Vec lam(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double r = 0.5 + 4.5 * U(rng);
            lam(k) = std::polar(r, angle * (2 * U(rng) - 1));
        }
        return random_similar(lam, rng);
    }
    throw Error(ErrorKind::UnknownSpec, "unknown operator family '" + id + "'");
}

MatrixOperator load_operator(const std::string& spec_or_path) {
    std::ifstream in(spec_or_path);
    if (in) return MatrixOperator(read_matrix(in));
    return MatrixOperator(make_matrix(spec_or_path));
}

}  // namespace besov
