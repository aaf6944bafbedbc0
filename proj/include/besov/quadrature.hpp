#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "besov/common.hpp"

namespace besov {

// Majorant |g(t)| <= bound(t) for t >= T0, with a closed-form tail integral.
class DecayEnvelope {
public:
    enum class Kind { Power, Exp, Resolvent, Custom };

    struct Term {
        Kind kind = Kind::Power;
        double p = 2.0;      // Power exponent
        double a = 1.0;      // Exp rate
        double C = 0.0;      // Power / Exp constant
        double M = 0.0;      // Resolvent: M^2 / (shift^2 + t^2)
        double shift = 1.0;
        std::function<double(double)> bound_fn;
        std::function<double(double)> tail_fn;
    };

    DecayEnvelope() = default;  // the zero envelope

    static DecayEnvelope power(double p, double C, double T0 = 0.0);
    static DecayEnvelope exponential(double a, double C, double T0 = 0.0);
    static DecayEnvelope resolvent(double M, double shift, double T0 = 0.0);
    static DecayEnvelope custom(std::function<double(double)> bound, std::function<double(double)> tail,
                                double T0 = 0.0);

    double bound(double t) const;
    double tail(double T) const;
    double T0() const { return T0_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    DecayEnvelope operator+(const DecayEnvelope& o) const;
    DecayEnvelope scaled(double c) const;
    // envelope of t -> b * g(b t)
    DecayEnvelope dilated(double b) const;
    DecayEnvelope with_T0(double T0) const;

    // smallest T >= max(T0, start) (doubling) with tail(T) <= budget
    double truncation_point(double budget, double start) const;

    std::string describe() const;

private:
    std::vector<Term> terms_;
    double T0_ = 0.0;
};

template <class V>
struct QuadResult {
    V value;
    double error = 0.0;
    long evals = 0;
};

struct SupResult {
    double value = 0.0;
    double arg = 0.0;
    bool uncertain = false;
};

struct SupOptions {
    double scale = 1.0;   // finest length scale of the sinh grid
    double Y = 100.0;     // half-width of the search window
    double period = 0.0;  // > 0 adds a uniform grid over one period
    std::vector<double> extra;  // additional grid points (known peak locations)
};

SupResult sup_on_vertical_line(const std::function<double(double)>& phi, const SupOptions& opt,
                               const QuadratureConfig& cfg);

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478381, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class V, class F, class N>
void gk21(F& f, double a, double b, N& norm, const V& zero, V& kron, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    V fc = f(c);
    V resk = fc * kWgk[10];
    V resg = zero;
    for (int j = 0; j < 10; ++j) {
        const double dx = h * kXgk[j];
        V s = f(c - dx) + f(c + dx);
        resk += s * kWgk[j];
        if (j % 2 == 1) resg += s * kWg[j / 2];
    }
    kron = resk * h;
    V diff = (resk - resg) * h;
    err = norm(diff);
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (10/21) bisection over [a,b] split at the given breakpoints.
template <class V, class F, class N>
QuadResult<V> integrate_interval_v(F&& f, double a, double b, const QuadratureConfig& cfg, N&& norm,
                                   const V& zero, const std::vector<double>& breaks = {}) {
    if (!(a < b)) {
        if (a == b) return {zero, 0.0, 0};
        throw Error(ErrorKind::InvalidParameter, "integrate_interval requires a < b");
    }
    struct Panel {
        double a, b;
        V val;
        double err;
        int depth;
    };
    std::vector<Panel> panels;
    long evals = 0;
    auto eval_panel = [&](double lo, double hi, int depth) {
        Panel p{lo, hi, zero, 0.0, depth};
        detail::gk21(f, lo, hi, norm, zero, p.val, p.err);
        evals += 21;
        panels.push_back(std::move(p));
    };
    std::vector<double> edges{a};
    for (double x : breaks)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (size_t i = 0; i + 1 < edges.size(); ++i) eval_panel(edges[i], edges[i + 1], 0);

    auto cmp = [&](size_t i, size_t j) { return panels[i].err < panels[j].err; };
    std::priority_queue<size_t, std::vector<size_t>, decltype(cmp)> heap(cmp);
    for (size_t i = 0; i < panels.size(); ++i) heap.push(i);

    V total = zero;
    double err_total = 0.0;
    auto recompute = [&]() {
        total = zero;
        err_total = 0.0;
        for (const auto& p : panels) {
            if (p.depth < 0) continue;
            total += p.val;
            err_total += p.err;
        }
    };
    recompute();
    int since_recompute = 0;
    double frozen_err = 0.0;
    while (true) {
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * norm(total));
        if (err_total <= tol) break;
        if (heap.empty()) break;
        size_t idx = heap.top();
        heap.pop();
        Panel& p = panels[idx];
        const double width = p.b - p.a;
        const double mid = 0.5 * (p.a + p.b);
        if (p.depth >= cfg.max_depth || mid <= p.a || mid >= p.b ||
            width <= 1e-14 * std::max(std::abs(p.a), std::abs(p.b))) {
            frozen_err += p.err;
            continue;  // cannot refine further; stays in the sum
        }
        if (static_cast<int>(panels.size()) >= cfg.max_panels) {
            throw Error(ErrorKind::DepthExceeded,
                        "panel budget exhausted on [" + std::to_string(a) + "," + std::to_string(b) + "]");
        }
        const double lo = p.a, hi = p.b;
        const int depth = p.depth;
        total -= p.val;
        err_total -= p.err;
        p.depth = -1;  // retired
        size_t n0 = panels.size();
        eval_panel(lo, mid, depth + 1);
        eval_panel(mid, hi, depth + 1);
        for (size_t k = n0; k < panels.size(); ++k) {
            total += panels[k].val;
            err_total += panels[k].err;
            heap.push(k);
        }
        if (++since_recompute >= 64) {
            recompute();
            since_recompute = 0;
        }
    }
    // deterministic final summation in left-to-right order
    std::vector<const Panel*> live;
    for (const auto& p : panels)
        if (p.depth >= 0) live.push_back(&p);
    std::sort(live.begin(), live.end(), [](const Panel* x, const Panel* y) { return x->a < y->a; });
    QuadResult<V> r{zero, 0.0, evals};
    for (const Panel* p : live) {
        r.value += p->val;
        r.error += p->err;
    }
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * norm(r.value));
    if (r.error > tol && frozen_err > 0.5 * (r.error - tol)) {
        throw Error(ErrorKind::DepthExceeded, "max_depth reached with error " + std::to_string(r.error) +
                                                  " > tol " + std::to_string(tol));
    }
    return r;
}

struct HalfLineOptions {
    double scale = 1.0;              // first geometric panel is [0, scale]
    std::vector<double> breaks;      // extra breakpoints inside (0, inf)
    int first_panel_power = 0;       // > 1: substitute t = scale*u^k on the first panel
    bool check_envelope = true;
    // integrate [S, inf) as int_0^1 g(S/u) S/u^2 du instead of truncating; suits
    // integrands with algebraic tails, the envelope is then only checked pointwise
    bool compactify = false;
};

// Integral over [0, inf) with certified truncation by a decay envelope.
template <class V, class F, class N>
QuadResult<V> integrate_halfline_v(F&& f, const DecayEnvelope& env, const QuadratureConfig& cfg, N&& norm,
                                   const V& zero, const HalfLineOptions& opt = {}) {
    const double s = opt.scale > 0 ? opt.scale : 1.0;
    const double tail_budget = 0.25 * cfg.abs_tol;
    const bool compact = opt.compactify && !env.is_zero();
    double T = 0.0, tail = 0.0;
    if (compact) {
        T = std::max(env.T0(), s);
        for (double x : opt.breaks) T = std::max(T, 2.0 * x);
    } else {
        T = env.is_zero() ? std::max(env.T0(), s) : env.truncation_point(tail_budget, s);
        tail = env.is_zero() ? 0.0 : env.tail(T);
    }

    double worst_ratio = 0.0, worst_t = 0.0;
    auto g = [&](double t) -> V {
        V v = f(t);
        if (opt.check_envelope && t >= env.T0() && t > 0) {
            const double b = env.bound(t);
            const double nv = norm(v);
            const double ratio = nv / (b + 1e-300);
            if (nv > 1.1 * b + 1e-13 && ratio > worst_ratio) {
                worst_ratio = ratio;
                worst_t = t;
            }
        }
        return v;
    };

    std::vector<double> edges;
    for (double e = s; e < T; e *= 2.0) edges.push_back(e);
    for (double x : opt.breaks)
        if (x > 0 && x < T) edges.push_back(x);

    QuadratureConfig inner = cfg;
    inner.abs_tol = 0.5 * cfg.abs_tol;
    QuadResult<V> res{zero, 0.0, 0};
    if (opt.first_panel_power > 1) {
        const int k = opt.first_panel_power;
        const double s_end = std::min(s, T);
        auto mapped = [&](double u) -> V {
            const double t = s_end * std::pow(u, k);
            return g(t) * (s_end * k * std::pow(u, k - 1));
        };
        QuadratureConfig c1 = inner;
        c1.abs_tol *= 0.5;
        std::vector<double> ub;
        for (double x : opt.breaks)
            if (x > 0 && x < s_end) ub.push_back(std::pow(x / s_end, 1.0 / k));
        auto r1 = integrate_interval_v<V>(mapped, 0.0, 1.0, c1, norm, zero, ub);
        std::vector<double> rest;
        for (double e : edges)
            if (e > s_end) rest.push_back(e);
        auto r2 = s_end < T ? integrate_interval_v<V>(g, s_end, T, c1, norm, zero, rest) : QuadResult<V>{zero, 0.0, 0};
        res.value = r1.value + r2.value;
        res.error = r1.error + r2.error;
        res.evals = r1.evals + r2.evals;
    } else {
        res = integrate_interval_v<V>(g, 0.0, T, inner, norm, zero, edges);
    }
    if (compact) {
        auto mapped = [&](double u) -> V { return g(T / u) * (T / (u * u)); };
        auto rt = integrate_interval_v<V>(mapped, 0.0, 1.0, inner, norm, zero);
        res.value += rt.value;
        res.error += rt.error;
        res.evals += rt.evals;
    }
    if (worst_ratio > 0) {
        throw Error(ErrorKind::EnvelopeViolated, "integrand exceeds envelope by factor " +
                                                     std::to_string(worst_ratio) + " at t=" + std::to_string(worst_t) +
                                                     " (" + env.describe() + ")");
    }
    res.error += tail;
    return res;
}

// Integral over the real line; the envelope bounds |g(t)| for |t| >= T0.
template <class V, class F, class N>
QuadResult<V> integrate_line_v(F&& f, const DecayEnvelope& env, const QuadratureConfig& cfg, N&& norm,
                               const V& zero, const HalfLineOptions& opt = {}) {
    HalfLineOptions pos = opt, neg = opt;
    pos.breaks.clear();
    neg.breaks.clear();
    for (double x : opt.breaks) {
        if (x > 0) pos.breaks.push_back(x);
        if (x < 0) neg.breaks.push_back(-x);
    }
    QuadratureConfig half = cfg;
    half.abs_tol *= 0.5;
    auto fp = [&](double t) -> V { return f(t); };
    auto fn = [&](double t) -> V { return f(-t); };
    auto r1 = integrate_halfline_v<V>(fp, env, half, norm, zero, pos);
    auto r2 = integrate_halfline_v<V>(fn, env, half, norm, zero, neg);
    return {r1.value + r2.value, r1.error + r2.error, r1.evals + r2.evals};
}

// Integral of an analytic G over the real y-line, with both tails |y| > T bent
// into the half-plane sign(Im y) = -sigma at angle phi.  tail_env bounds |G| along
// the bent rays as a function of arclength s.
template <class V, class G, class N>
QuadResult<V> integrate_bent_line_v(G&& g, double T, int sigma, double phi, const DecayEnvelope& tail_env,
                                    const QuadratureConfig& cfg, N&& norm, const V& zero,
                                    const std::vector<double>& breaks = {}, double tail_scale = 1.0,
                                    bool compactify_tails = false) {
    const cplx uR = std::polar(1.0, -sigma * phi);
    const cplx uL = -std::polar(1.0, sigma * phi);
    QuadratureConfig mid = cfg, tails = cfg;
    mid.abs_tol *= 0.5;
    tails.abs_tol *= 0.25;
    auto fm = [&](double y) -> V { return g(cplx(y, 0.0)); };
    auto rm = integrate_interval_v<V>(fm, -T, T, mid, norm, zero, breaks);
    HalfLineOptions ho;
    ho.scale = tail_scale;
    ho.compactify = compactify_tails;
    auto fr = [&](double s) -> V { return g(cplx(T, 0.0) + s * uR) * uR; };
    auto fl = [&](double s) -> V { return g(cplx(-T, 0.0) + s * uL) * uL; };
    auto rr = integrate_halfline_v<V>(fr, tail_env, tails, norm, zero, ho);
    auto rl = integrate_halfline_v<V>(fl, tail_env, tails, norm, zero, ho);
    return {rm.value + rr.value - rl.value, rm.error + rr.error + rl.error, rm.evals + rr.evals + rl.evals};
}

// Scalar convenience wrappers.
using RealFn = std::function<double(double)>;
using CplxFn = std::function<cplx(double)>;

QuadResult<cplx> integrate_interval(const CplxFn& g, double a, double b, const QuadratureConfig& cfg,
                                    const std::vector<double>& breaks = {});
QuadResult<cplx> integrate_halfline(const CplxFn& g, const DecayEnvelope& env, const QuadratureConfig& cfg,
                                    const HalfLineOptions& opt = {});
QuadResult<cplx> integrate_line(const CplxFn& g, const DecayEnvelope& env, const QuadratureConfig& cfg,
                                const HalfLineOptions& opt = {});
QuadResult<double> integrate_interval_real(const RealFn& g, double a, double b, const QuadratureConfig& cfg,
                                           const std::vector<double>& breaks = {});
QuadResult<double> integrate_halfline_real(const RealFn& g, const DecayEnvelope& env, const QuadratureConfig& cfg,
                                           const HalfLineOptions& opt = {});
QuadResult<double> integrate_line_real(const RealFn& g, const DecayEnvelope& env, const QuadratureConfig& cfg,
                                       const HalfLineOptions& opt = {});

}  // namespace besov
