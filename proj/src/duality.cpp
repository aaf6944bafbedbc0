#include "besov/duality.hpp"

#include <algorithm>
#include <cmath>

namespace besov {

namespace {

constexpr double kBendAngle = kPi / 3;

double sup_bound(const AnalyticFunction& f, const QuadratureConfig& cfg) {
    if (std::isfinite(f.hinf_bound)) return f.hinf_bound;
    const NormReport h = hinf_norm(f, cfg);
    return h.value * (1 + 1e-3) + h.error_bound;
}

std::vector<double> inner_breaks(const AnalyticFunction& g, const AnalyticFunction& f, double T) {
    std::vector<double> br = {0.0};
    for (double p : f.peaks)
        if (std::abs(p) < T) br.push_back(p);
    // g'(x - iy) peaks where -y is a peak of g'
    for (double p : g.peaks)
        if (std::abs(p) < T) br.push_back(-p);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

}  // namespace

PairingResult pairing(const AnalyticFunction& g, const AnalyticFunction& f, const QuadratureConfig& cfg) {
    cfg.validate();
    if (!f.in_B) throw Error(ErrorKind::DivergenceSuspicion, f.name + " is not flagged as a member of B");
    if (!f.outer_env) throw Error(ErrorKind::DivergenceSuspicion, f.name + ": no outer decay envelope");
    if (!g.far && !g.vertical_env) throw Error(ErrorKind::DivergenceSuspicion, g.name + ": no decay data in E");
    const NormReport ge = e0_norm(g, cfg);
    const double E = ge.value + ge.error_bound;
    const double hf = sup_bound(f, cfg);
    const double sphi = std::sin(kBendAngle);
    double pk = 0.0;
    for (double p : f.peaks) pk = std::max(pk, std::abs(p));
    for (double p : g.peaks) pk = std::max(pk, std::abs(p));
    auto cabs = [](const cplx& v) { return std::abs(v); };
    const cplx I(0.0, 1.0);

    // how far any inner integral overshot its own target; 1 means all met it
    double overshoot = 1.0;
    auto inner = [&](double x) -> cplx {
        auto G = [&](cplx zeta) { return g.deriv(x - I * zeta) * f.deriv(x + I * zeta); };
        QuadratureConfig c = cfg;
        // the outer integrand is x * inner(x), so an inner error d costs x * d; near x = 0 a fixed
        // absolute target would ask for cancellation beyond double precision at boundary poles
        c.abs_tol = 0.1 * cfg.abs_tol / std::max(x, 1e-300);
        c.rel_tol = 0.1 * cfg.rel_tol;
        if (g.far) {
            // bend the tails into Im zeta < 0, where f' is evaluated further right and g' is in its far field
            const double C1 = g.far->C1;
            const double T = std::max({g.far->R + x, 2.0 * x, 1.0, 2.0 * pk + 1.0});
            auto bound = [=](double s) { return 4.0 * C1 / (T * T + s * s) * hf / (2.0 * (x + s * sphi)); };
            auto tail = [=](double S) { return C1 * hf / (sphi * T * T) * std::log1p(T * T / (S * S)); };
            const DecayEnvelope env = DecayEnvelope::custom(bound, tail);
            auto q = integrate_bent_line_v<cplx>(G, T, +1, kBendAngle, env, c, cabs, cplx(0.0), inner_breaks(g, f, T),
                                                 0.25 * T);
            overshoot = std::max(overshoot, q.error / (c.abs_tol + c.rel_tol * std::abs(q.value)));
            return q.value;
        }
        // straight line: |G(y)| <= |g'(x-iy)| sup|f'(x+i.)|
        const double fs = vertical_sup_deriv(f, x, cfg).value * 1.01;
        const DecayEnvelope env = g.vertical_env->scaled(fs);
        HalfLineOptions opt;
        opt.scale = std::max(x, 1e-6);
        opt.breaks = inner_breaks(g, f, kInf);
        auto q = integrate_line_v<cplx>([&](double y) { return G(cplx(y, 0.0)); }, env, c, cabs, cplx(0.0), opt);
        return q.value;
    };
    auto P = [&](double x) -> cplx { return x * inner(x); };
    HalfLineOptions opt;
    opt.scale = 1.0;
    opt.first_panel_power = f.singular_at_zero ? 4 : 0;
    auto q = integrate_halfline_v<cplx>(P, f.outer_env->scaled(E), cfg, cabs, cplx(0.0), opt);
    PairingResult r;
    r.value = q.value;
    // inner tolerances are a tenth of the outer ones
    r.error_bound = q.error + overshoot * 0.1 * (cfg.abs_tol + cfg.rel_tol * std::abs(q.value));
    r.g_e0 = ge.value;
    return r;
}

double reproduce_residual(const AnalyticFunction& f, cplx z, const QuadratureConfig& cfg) {
    if (z.real() < 0) throw Error(ErrorKind::InvalidParameter, "reproduce_residual needs Re z >= 0");
    if (z.real() == 0) z += kBoundaryOffset;
    const AnalyticFunction rz = fn::resolvent(z);
    const PairingResult p = pairing(rz, f, cfg);
    return std::abs(f.eval(z) - f.value_at_infinity() - 2.0 / kPi * p.value);
}

}  // namespace besov
