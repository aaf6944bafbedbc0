#include "besov/function.hpp"
#include "besov/spec_parser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace besov {

namespace {

double factorial(int k) {
    double r = 1.0;
    for (int j = 2; j <= k; ++j) r *= j;
    return r;
}

// ratio p1/p2 ~ m/n with small denominators -> common period, else the larger one
double combine_period(double p1, double p2) {
    if (p1 <= 0) return p2;
    if (p2 <= 0) return p1;
    const double r = p1 / p2;
    for (int n = 1; n <= 64; ++n) {
        const double m = std::round(r * n);
        if (m >= 1 && std::abs(r * n - m) < 1e-9 * n) return n * p1;
    }
    return std::max(p1, p2);
}

// 2*pi / gcd of the positive atom positions (rational approximation)
double atom_period(const std::vector<double>& ts) {
    double g = 0.0;
    for (double t : ts) {
        if (t <= 0) continue;
        if (g == 0.0) {
            g = t;
            continue;
        }
        bool found = false;
        for (int q = 1; q <= 1000 && !found; ++q) {
            const double pg = std::round(g * q / t * 1.0);
            (void)pg;
            // find q with t/(g/q) integral
            const double base = g / q;
            const double k = t / base;
            if (std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, k)) {
                g = base;
                found = true;
            }
        }
        if (!found) return 2.0 * kPi / *std::min_element(ts.begin(), ts.end()) * 8.0;
    }
    return g > 0 ? 2.0 * kPi / g : 0.0;
}

std::vector<double> merge_peaks(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }), a.end());
    return a;
}

std::optional<DecayEnvelope> sum_env(const std::optional<DecayEnvelope>& a, const std::optional<DecayEnvelope>& b) {
    if (!a || !b) return std::nullopt;
    return *a + *b;
}

}  // namespace

// ---------------------------------------------------------------- measure

void HalfLineMeasure::validate() const {
    for (const auto& a : atoms)
        if (!(a.t >= 0) || !std::isfinite(a.t) || !std::isfinite(std::abs(a.c)))
            throw Error(ErrorKind::InvalidParameter, "measure atoms need finite t >= 0");
    for (const auto& d : density) {
        if (d.kind == DensityTerm::Kind::ExpPoly) {
            if (!(d.rate.real() > 0) || d.k < 0 || d.k > 20)
                throw Error(ErrorKind::InvalidParameter, "density term needs Re rate > 0 and 0 <= k <= 20");
        } else if (!(d.a >= 0) || !(d.b > d.a) || !std::isfinite(d.b)) {
            throw Error(ErrorKind::InvalidParameter, "indicator density needs 0 <= a < b < inf");
        }
    }
}

cplx HalfLineMeasure::density_at(double t) const {
    cplx s = 0.0;
    for (const auto& d : density) {
        if (d.kind == DensityTerm::Kind::ExpPoly)
            s += d.coeff * std::pow(t, d.k) * std::exp(-d.rate * t);
        else if (t >= d.a && t <= d.b)
            s += d.coeff;
    }
    return s;
}

double HalfLineMeasure::total_variation() const {
    double s = 0.0;
    for (const auto& a : atoms) s += std::abs(a.c);
    for (const auto& d : density) {
        if (d.kind == DensityTerm::Kind::ExpPoly)
            s += std::abs(d.coeff) * factorial(d.k) / std::pow(d.rate.real(), d.k + 1);
        else
            s += std::abs(d.coeff) * (d.b - d.a);
    }
    return s;
}

namespace {

cplx indicator_laplace(double a, double b, cplx z) {
    if (std::abs(z) * b < 1.0) {
        cplx s = 0.0, zp = 1.0;
        double fact = 1.0;  // (m+1)!
        for (int m = 0; m < 40; ++m) {
            fact *= (m + 1);
            s += zp * (std::pow(b, m + 1) - std::pow(a, m + 1)) / fact;
            zp *= -z;
        }
        return s;
    }
    return (std::exp(-a * z) - std::exp(-b * z)) / z;
}

cplx indicator_laplace_deriv(double a, double b, cplx z) {
    if (std::abs(z) * b < 1.0) {
        cplx s = 0.0, zp = 1.0;
        double fact = 1.0;  // m!
        for (int m = 0; m < 40; ++m) {
            if (m > 0) fact *= m;
            s += zp * (std::pow(b, m + 2) - std::pow(a, m + 2)) / (fact * (m + 2));
            zp *= -z;
        }
        return -s;
    }
    const cplx ea = std::exp(-a * z), eb = std::exp(-b * z);
    return ((b * eb - a * ea) * z - (ea - eb)) / (z * z);
}

// sup_y |int_a^b t e^{-t(x+iy)} dt| = int_a^b t e^{-tx} dt
double indicator_first_moment(double a, double b, double x) {
    if (x * b < 1e-3) return 0.5 * (b * b - a * a);
    return (std::exp(-a * x) * (a * x + 1.0) - std::exp(-b * x) * (b * x + 1.0)) / (x * x);
}

}  // namespace

cplx HalfLineMeasure::laplace(cplx z) const {
    cplx s = 0.0;
    for (const auto& a : atoms) s += a.c * std::exp(-a.t * z);
    for (const auto& d : density) {
        if (d.kind == DensityTerm::Kind::ExpPoly)
            s += d.coeff * factorial(d.k) / std::pow(z + d.rate, d.k + 1);
        else
            s += d.coeff * indicator_laplace(d.a, d.b, z);
    }
    return s;
}

cplx HalfLineMeasure::laplace_deriv(cplx z) const {
    cplx s = 0.0;
    for (const auto& a : atoms)
        if (a.t > 0) s -= a.c * a.t * std::exp(-a.t * z);
    for (const auto& d : density) {
        if (d.kind == DensityTerm::Kind::ExpPoly)
            s -= d.coeff * factorial(d.k + 1) / std::pow(z + d.rate, d.k + 2);
        else
            s += d.coeff * indicator_laplace_deriv(d.a, d.b, z);
    }
    return s;
}

DecayEnvelope HalfLineMeasure::density_envelope() const {
    DecayEnvelope env;
    for (const auto& d : density) {
        const double c = std::abs(d.coeff);
        if (d.kind == DensityTerm::Kind::ExpPoly) {
            const int k = d.k;
            const double rho = d.rate.real();
            env = env + DecayEnvelope::custom([c, k, rho](double t) { return c * std::pow(t, k) * std::exp(-rho * t); },
                                              [c, k, rho](double T) {
                                                  double s = 0.0, term = 1.0;
                                                  for (int j = 0; j <= k; ++j) {
                                                      if (j > 0) term *= rho * T / j;
                                                      s += term;
                                                  }
                                                  return c * factorial(k) * std::exp(-rho * T) * s / std::pow(rho, k + 1);
                                              });
        } else {
            const double a = d.a, b = d.b;
            env = env + DecayEnvelope::custom([c, b](double t) { return t <= b ? c : 0.0; },
                                              [c, a, b](double T) { return c * std::max(0.0, b - std::max(T, a)); });
        }
    }
    return env;
}

std::vector<double> HalfLineMeasure::density_breaks() const {
    std::vector<double> br;
    for (const auto& d : density)
        if (d.kind == DensityTerm::Kind::Indicator) {
            br.push_back(d.a);
            br.push_back(d.b);
        }
    return br;
}

std::string HalfLineMeasure::describe() const {
    std::ostringstream os;
    os << "laplace(";
    bool first = true;
    if (!atoms.empty()) {
        os << "atoms=[";
        for (size_t i = 0; i < atoms.size(); ++i) {
            if (i) os << ",";
            os << "(" << format_complex(atoms[i].t) << "," << format_complex(atoms[i].c) << ")";
        }
        os << "]";
        first = false;
    }
    if (!density.empty()) {
        if (!first) os << ";";
        os << "density=[";
        for (size_t i = 0; i < density.size(); ++i) {
            const auto& d = density[i];
            if (i) os << ",";
            if (d.kind == DensityTerm::Kind::ExpPoly)
                os << "exp(rate=" << format_complex(d.rate) << ",coeff=" << format_complex(d.coeff) << ",k=" << d.k << ")";
            else
                os << "unit(a=" << format_complex(d.a) << ",b=" << format_complex(d.b)
                   << ",coeff=" << format_complex(d.coeff) << ")";
        }
        os << "]";
    }
    os << ")";
    return os.str();
}

HalfLineMeasure HalfLineMeasure::dirac(double t, cplx c) {
    HalfLineMeasure m;
    m.atoms.push_back({t, c});
    return m;
}

HalfLineMeasure HalfLineMeasure::lebesgue(double a, double b, cplx c) {
    HalfLineMeasure m;
    DensityTerm d;
    d.kind = DensityTerm::Kind::Indicator;
    d.a = a;
    d.b = b;
    d.coeff = c;
    m.density.push_back(d);
    return m;
}

HalfLineMeasure HalfLineMeasure::exp_density(cplx rate, cplx c, int k) {
    HalfLineMeasure m;
    DensityTerm d;
    d.rate = rate;
    d.coeff = c;
    d.k = k;
    m.density.push_back(d);
    return m;
}

HalfLineMeasure HalfLineMeasure::operator+(const HalfLineMeasure& o) const {
    HalfLineMeasure m = *this;
    m.atoms.insert(m.atoms.end(), o.atoms.begin(), o.atoms.end());
    m.density.insert(m.density.end(), o.density.begin(), o.density.end());
    return m;
}

// ---------------------------------------------------------------- bernstein

void BernsteinFunction::validate() const {
    if (!(a >= 0) || !(b >= 0)) throw Error(ErrorKind::InvalidParameter, "Bernstein function needs a, b >= 0");
    for (auto [s, w] : jumps)
        if (!(s > 0) || !(w > 0)) throw Error(ErrorKind::InvalidParameter, "Bernstein jumps need s > 0, w > 0");
    if (a == 0 && b == 0 && jumps.empty()) throw Error(ErrorKind::InvalidParameter, "Bernstein function is zero");
}

cplx BernsteinFunction::eval(cplx z) const {
    cplx s = a + b * z;
    for (auto [t, w] : jumps) s += w * (1.0 - std::exp(-t * z));
    return s;
}

cplx BernsteinFunction::deriv(cplx z) const {
    cplx s = b;
    for (auto [t, w] : jumps) s += w * t * std::exp(-t * z);
    return s;
}

double BernsteinFunction::at_infinity() const {
    if (b > 0) return kInf;
    double s = a;
    for (auto [t, w] : jumps) s += w;
    return s;
}

std::string BernsteinFunction::describe() const {
    std::ostringstream os;
    os << "a=" << format_complex(a) << ",b=" << format_complex(b);
    if (!jumps.empty()) {
        os << ",jumps=[";
        for (size_t i = 0; i < jumps.size(); ++i) {
            if (i) os << ",";
            os << "(" << format_complex(jumps[i].first) << "," << format_complex(jumps[i].second) << ")";
        }
        os << "]";
    }
    return os.str();
}

bool DecayProfile::check_nonincreasing(double t_max) const {
    double prev = h(0.0);
    for (double t = 1e-3; t <= t_max; t *= 1.25) {
        const double v = h(t);
        if (!(v >= 0) || v > prev * (1 + 1e-12) + 1e-300) return false;
        prev = v;
    }
    return true;
}

// ---------------------------------------------------------------- derivatives

cplx cauchy_derivative(const std::function<cplx(cplx)>& f, cplx z, double r, int order, double rel_tol) {
    if (!(r > 0)) throw Error(ErrorKind::InvalidParameter, "Cauchy radius must be positive");
    int N = 64;
    std::vector<cplx> samples(N);
    double fmax = 0.0;
    for (int k = 0; k < N; ++k) {
        samples[k] = f(z + std::polar(r, 2.0 * kPi * k / N));
        fmax = std::max(fmax, std::abs(samples[k]));
    }
    auto estimate = [&](int n) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k) s += samples[k] * std::polar(1.0, -2.0 * kPi * order * k / n);
        return s * factorial(order) / (static_cast<double>(n) * std::pow(r, order));
    };
    cplx prev = estimate(N);
    for (int doubling = 0; doubling < 8; ++doubling) {
        std::vector<cplx> next(2 * N);
        for (int k = 0; k < N; ++k) next[2 * k] = samples[k];
        for (int k = 0; k < N; ++k) {
            next[2 * k + 1] = f(z + std::polar(r, 2.0 * kPi * (2 * k + 1) / (2 * N)));
            fmax = std::max(fmax, std::abs(next[2 * k + 1]));
        }
        samples.swap(next);
        N *= 2;
        cplx cur = estimate(N);
        const double floor = 1e-15 * fmax * factorial(order) / std::pow(r, order);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + floor) return cur;
        prev = cur;
    }
    throw Error(ErrorKind::NonConvergence, "Cauchy derivative did not converge");
}

cplx deriv_fallback(const AnalyticFunction& f, cplx z, double rel_tol) {
    double r;
    if (z.real() > 0)
        r = 0.5 * z.real();
    else if (f.extends_left > -z.real())
        r = 0.5 * (z.real() + std::min(f.extends_left, z.real() + 2.0));
    else
        throw Error(ErrorKind::InvalidParameter, "fallback derivative needs Re z > 0");
    return cauchy_derivative(f.f, z, r, 1, rel_tol);
}

cplx AnalyticFunction::deriv(cplx z) const { return df ? df(z) : deriv_fallback(*this, z); }

cplx AnalyticFunction::value_at_infinity(bool* certified) const {
    if (at_inf) {
        if (certified) *certified = true;
        return *at_inf;
    }
    if (certified) *certified = false;
    const cplx v1 = f(std::ldexp(1.0, 11)), v2 = f(std::ldexp(1.0, 12));
    return 2.0 * v2 - v1;
}

// ---------------------------------------------------------------- catalog

namespace fn {

AnalyticFunction constant(cplx c) {
    AnalyticFunction g;
    g.name = "const(c=" + format_complex(c) + ")";
    g.f = [c](cplx) { return c; };
    g.df = [](cplx) { return cplx(0.0); };
    g.at_inf = c;
    g.hinf_bound = std::abs(c);
    g.extends_left = kInf;
    g.in_B = g.in_E = true;
    g.outer_env = DecayEnvelope();
    g.vertical_env = DecayEnvelope();
    g.far = FarField{0.0, 0.0, 0.0};
    g.measure = HalfLineMeasure::dirac(0.0, c);
    return g;
}

AnalyticFunction exponential(double a) {
    if (!(a >= 0) || !std::isfinite(a)) throw Error(ErrorKind::InvalidParameter, "exp needs real a >= 0");
    if (a == 0) {
        AnalyticFunction g = constant(1.0);
        g.name = "exp(a=0)";
        return g;
    }
    AnalyticFunction g;
    g.name = "exp(a=" + format_complex(a) + ")";
    g.f = [a](cplx z) { return std::exp(-a * z); };
    g.df = [a](cplx z) { return -a * std::exp(-a * z); };
    g.at_inf = 0.0;
    g.hinf_bound = 1.0;
    g.extends_left = kInf;
    g.outer_env = DecayEnvelope::exponential(a, a);
    g.period = 2.0 * kPi / a;
    g.band = std::make_pair(a, a);
    g.measure = HalfLineMeasure::dirac(a);
    return g;
}

AnalyticFunction resolvent(cplx a) {
    if (!(a.real() >= 0)) throw Error(ErrorKind::InvalidParameter, "resolvent needs Re a >= 0");
    AnalyticFunction g;
    g.name = "resolvent(a=" + format_complex(a) + ")";
    g.f = [a](cplx z) { return 1.0 / (z + a); };
    g.df = [a](cplx z) {
        const cplx w = z + a;
        return -1.0 / (w * w);
    };
    g.at_inf = 0.0;
    const double s = a.real();
    g.hinf_bound = s > 0 ? 1.0 / s : kInf;
    g.extends_left = s;
    g.in_B = s > 0;
    g.in_E = true;
    g.outer_env = DecayEnvelope::custom([s](double x) { return 1.0 / ((x + s) * (x + s)); },
                                        [s](double T) { return 1.0 / (T + s); }, s > 0 ? 0.0 : 1e-300);
    g.vertical_env = DecayEnvelope::power(2.0, 4.0, 2.0 * std::abs(a.imag()));
    g.far = FarField{2.0 * std::abs(a), 2.0, 4.0};
    g.peaks = {-a.imag()};
    if (s > 0) g.measure = HalfLineMeasure::exp_density(a);
    return g;
}

AnalyticFunction cayley(int n) {
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "cayley needs n >= 1");
    AnalyticFunction g;
    g.name = "cayley(n=" + std::to_string(n) + ")";
    g.f = [n](cplx z) { return std::pow((z - 1.0) / (z + 1.0), n); };
    g.df = [n](cplx z) {
        const cplx w = z + 1.0;
        return 2.0 * n * std::pow((z - 1.0) / w, n - 1) / (w * w);
    };
    g.at_inf = 1.0;
    g.hinf_bound = 1.0;
    g.extends_left = 1.0;
    g.in_E = true;
    const double c = 2.0 * n;
    g.outer_env = DecayEnvelope::custom([c](double x) { return c / ((x + 1) * (x + 1)); },
                                        [c](double T) { return c / (T + 1); });
    g.vertical_env = DecayEnvelope::power(2.0, c);
    g.far = FarField{2.0 * n + 2.0, 8.0 * std::exp(1.0) * n, 8.0 * std::exp(1.0) * n};
    g.peaks = {0.0};
    if (n == 1) g.measure = HalfLineMeasure::dirac(0.0) + HalfLineMeasure::exp_density(1.0, -2.0);
    return g;
}

AnalyticFunction laplace(const HalfLineMeasure& mu) {
    mu.validate();
    AnalyticFunction g;
    g.name = mu.describe();
    g.f = [mu](cplx z) { return mu.laplace(z); };
    g.df = [mu](cplx z) { return mu.laplace_deriv(z); };
    cplx at0 = 0.0;
    bool has_pos_atoms = false;
    std::vector<double> pos;
    DecayEnvelope outer;
    DecayEnvelope vert;
    double extends = kInf;
    bool indicator = false;
    double R = 1.0, C0 = 0.0, C1 = 0.0;
    for (const auto& a : mu.atoms) {
        if (a.t == 0) {
            at0 += a.c;
        } else {
            has_pos_atoms = true;
            pos.push_back(a.t);
            outer = outer + DecayEnvelope::exponential(a.t, std::abs(a.c) * a.t);
        }
    }
    for (const auto& d : mu.density)
        if (d.kind == HalfLineMeasure::DensityTerm::Kind::ExpPoly) R = std::max(R, 2.0 * std::abs(d.rate));
    for (const auto& d : mu.density) {
        const double c = std::abs(d.coeff);
        if (d.kind == HalfLineMeasure::DensityTerm::Kind::ExpPoly) {
            const int k = d.k;
            const double rho = d.rate.real();
            outer = outer + DecayEnvelope::custom(
                                [c, k, rho](double x) { return c * factorial(k + 1) / std::pow(x + rho, k + 2); },
                                [c, k, rho](double T) { return c * factorial(k) / std::pow(T + rho, k + 1); });
            vert = vert + DecayEnvelope::power(k + 2.0, c * factorial(k + 1) * std::pow(2.0, k + 2),
                                               2.0 * std::abs(d.rate.imag()));
            extends = std::min(extends, rho);
            g.peaks.push_back(-d.rate.imag());
            C0 += c * factorial(k) * std::pow(2.0, k + 1) / std::pow(R, k);
            C1 += c * factorial(k + 1) * std::pow(2.0, k + 2) / std::pow(R, k);
        } else {
            indicator = true;
            const double a = d.a, b = d.b;
            outer = outer + DecayEnvelope::custom([c, a, b](double x) { return c * indicator_first_moment(a, b, x); },
                                                  [c, a](double T) {
                                                      if (a > 0) return c * std::exp(-a * T) * (a / T + 1.0 / (T * T)) / a;
                                                      return c / T;
                                                  });
            vert = vert + DecayEnvelope::power(1.0, 2.0 * b * c);
        }
    }
    g.at_inf = at0;
    g.hinf_bound = mu.total_variation();
    g.extends_left = extends;
    g.outer_env = outer;
    g.in_E = !has_pos_atoms && !indicator;
    if (!has_pos_atoms) g.vertical_env = vert;
    if (!has_pos_atoms && !indicator) g.far = FarField{R, C0, C1};
    g.period = atom_period(pos);
    g.peaks.push_back(0.0);
    g.peaks = merge_peaks(g.peaks, {});
    g.measure = mu;
    return g;
}

AnalyticFunction eta() {
    AnalyticFunction g = laplace(HalfLineMeasure::lebesgue(0.0, 1.0));
    g.name = "eta";
    return g;
}

AnalyticFunction eta_dilated(double delta) {
    if (!(delta > 0)) throw Error(ErrorKind::InvalidParameter, "eta needs delta > 0");
    AnalyticFunction g = dilate(eta(), delta);
    g.name = "eta(delta=" + format_complex(delta) + ")";
    return g;
}

AnalyticFunction expinv(double t) {
    if (!(t > 0)) throw Error(ErrorKind::InvalidParameter, "expinv needs t > 0");
    AnalyticFunction g;
    g.name = "expinv(t=" + format_complex(t) + ")";
    g.f = [t](cplx z) { return std::exp(-t / (z + 1.0)); };
    g.df = [t](cplx z) {
        const cplx w = z + 1.0;
        return t / (w * w) * std::exp(-t / w);
    };
    g.at_inf = 1.0;
    g.hinf_bound = 1.0;
    g.extends_left = 1.0;
    g.in_E = true;
    g.outer_env = DecayEnvelope::custom([t](double x) { return t / ((x + 1) * (x + 1)); },
                                        [t](double T) { return t / (T + 1); });
    g.vertical_env = DecayEnvelope::power(2.0, t);
    const double R = std::max(2.0, 2.0 * t);
    g.far = FarField{R, 4.0 * t * std::exp(1.0), 4.0 * t * std::exp(1.0)};
    // boundary maxima of |f'| sit where |z+1|^2 = t
    g.peaks = {0.0};
    if (t > 1) g.peaks = {-std::sqrt(t - 1), 0.0, std::sqrt(t - 1)};
    return g;
}

AnalyticFunction vitse(double t) {
    if (!(t > 0)) throw Error(ErrorKind::InvalidParameter, "vitse needs t > 0");
    AnalyticFunction g;
    g.name = "vitse(t=" + format_complex(t) + ")";
    g.f = [t](cplx z) {
        const cplx q = z / (z + 1.0);
        return q * q * std::exp(-t / z);
    };
    g.df = [t](cplx z) {
        const cplx w = 1.0 + z;
        return (t + (t + 2.0) * z) / (w * w * w) * std::exp(-t / z);
    };
    g.at_inf = 1.0;
    g.hinf_bound = 1.0;
    g.in_E = true;
    const double c = std::sqrt(2.0) * (t + 2.0);
    g.outer_env = DecayEnvelope::custom([c](double x) { return c / ((x + 1) * (x + 1)); },
                                        [c](double T) { return c / (T + 1); });
    g.vertical_env = DecayEnvelope::power(2.0, c);
    g.far = FarField{std::max(2.0, 2.0 * t), 10.0 * (t + 2.0), 20.0 * (t + 2.0)};
    g.peaks = {0.0};
    return g;
}

AnalyticFunction band(double eps, double sigma, const std::vector<cplx>& coeffs, const std::vector<double>& taus) {
    if (!(eps > 0) || !(sigma > eps)) throw Error(ErrorKind::InvalidParameter, "band needs 0 < eps < sigma");
    if (coeffs.size() != taus.size() || coeffs.empty())
        throw Error(ErrorKind::InvalidParameter, "band needs matching non-empty coeffs and taus");
    HalfLineMeasure mu;
    for (size_t j = 0; j < taus.size(); ++j) {
        if (taus[j] < eps - 1e-15 || taus[j] > sigma + 1e-15)
            throw Error(ErrorKind::InvalidParameter, "band frequency outside [eps, sigma]");
        mu.atoms.push_back({taus[j], coeffs[j]});
    }
    AnalyticFunction g = laplace(mu);
    std::ostringstream os;
    os << "band(eps=" << format_complex(eps) << ",sigma=" << format_complex(sigma) << ";coeffs=[";
    for (size_t j = 0; j < coeffs.size(); ++j) os << (j ? "," : "") << format_complex(coeffs[j]);
    os << "];taus=[";
    for (size_t j = 0; j < taus.size(); ++j) os << (j ? "," : "") << format_complex(taus[j]);
    os << "])";
    g.name = os.str();
    g.band = std::make_pair(eps, sigma);
    return g;
}

AnalyticFunction bernstein_res(const BernsteinFunction& fb, double alpha, double beta, double theta, cplx lambda) {
    fb.validate();
    if (!(alpha > 0 && alpha < 1)) throw Error(ErrorKind::InvalidParameter, "bernstein_res needs alpha in (0,1)");
    if (!(beta > 1 && beta <= 1.0 / alpha + 1e-12))
        throw Error(ErrorKind::InvalidParameter, "bernstein_res needs beta in (1, 1/alpha]");
    if (!(theta > 0 && theta < kPi / 2)) throw Error(ErrorKind::InvalidParameter, "bernstein_res needs theta in (0, pi/2)");
    if (!(std::abs(lambda) > 0) || std::abs(std::arg(lambda)) >= theta)
        throw Error(ErrorKind::InvalidParameter, "bernstein_res needs lambda in the open sector of angle theta");
    AnalyticFunction g;
    std::ostringstream os;
    os << "bernstein_res(" << fb.describe() << ",alpha=" << format_complex(alpha) << ",beta=" << format_complex(beta)
       << ",theta=" << format_complex(theta) << ",lambda=" << format_complex(lambda) << ")";
    g.name = os.str();
    g.f = [fb, alpha, beta, lambda](cplx z) {
        const cplx w = std::pow(z, alpha);
        return 1.0 / (lambda + std::pow(fb.eval(w), beta));
    };
    g.df = [fb, alpha, beta, lambda](cplx z) {
        const cplx w = std::pow(z, alpha);
        const cplx fw = fb.eval(w);
        const cplx den = lambda + std::pow(fw, beta);
        return -alpha * beta * std::pow(fw, beta - 1.0) * fb.deriv(w) * std::pow(z, alpha - 1.0) / (den * den);
    };
    const double finf = fb.at_infinity();
    g.at_inf = std::isinf(finf) ? cplx(0.0) : 1.0 / (lambda + std::pow(finf, beta));
    const double kappa = std::cos((alpha * beta * kPi / 2 + theta) / 2);
    const double ca = std::cos(alpha * kPi / 2);
    const double L = std::abs(lambda);
    g.hinf_bound = 1.0 / (kappa * L);
    g.outer_env = DecayEnvelope::custom(
        [=](double x) {
            const double u = ca * std::pow(x, alpha);
            const double fr = fb.eval(u).real(), dr = fb.deriv(u).real();
            return alpha * beta * dr /
                   (kappa * kappa * std::pow(L + std::pow(fr, beta), 1 + 1 / beta) * std::pow(x, 1 - alpha));
        },
        [=](double T) {
            const double t1 = std::pow(fb.eval(ca * std::pow(T, alpha)).real(), beta);
            const double tinf = std::isinf(finf) ? kInf : std::pow(finf, beta);
            if (!(t1 > 0)) return kInf;
            return (1.0 / t1 - (std::isinf(tinf) ? 0.0 : 1.0 / tinf)) / (ca * kappa * kappa);
        });
    g.peaks = {0.0};
    g.singular_at_zero = true;
    return g;
}

// ---------------------------------------------------------------- algebra

AnalyticFunction add(const AnalyticFunction& f, const AnalyticFunction& g) {
    AnalyticFunction h;
    h.name = "add(" + f.name + "," + g.name + ")";
    auto ff = f.f, gf = g.f;
    h.f = [ff, gf](cplx z) { return ff(z) + gf(z); };
    h.df = [f, g](cplx z) { return f.deriv(z) + g.deriv(z); };
    if (f.at_inf && g.at_inf) h.at_inf = *f.at_inf + *g.at_inf;
    h.hinf_bound = f.hinf_bound + g.hinf_bound;
    h.extends_left = std::min(f.extends_left, g.extends_left);
    h.in_B = f.in_B && g.in_B;
    h.in_E = f.in_E && g.in_E;
    if (f.band && g.band)
        h.band = std::make_pair(std::min(f.band->first, g.band->first), std::max(f.band->second, g.band->second));
    h.outer_env = sum_env(f.outer_env, g.outer_env);
    h.vertical_env = sum_env(f.vertical_env, g.vertical_env);
    if (f.far && g.far) h.far = FarField{std::max(f.far->R, g.far->R), f.far->C0 + g.far->C0, f.far->C1 + g.far->C1};
    h.peaks = merge_peaks(f.peaks, g.peaks);
    h.period = combine_period(f.period, g.period);
    h.singular_at_zero = f.singular_at_zero || g.singular_at_zero;
    if (f.measure && g.measure) h.measure = *f.measure + *g.measure;
    return h;
}

AnalyticFunction mul(const AnalyticFunction& f, const AnalyticFunction& g) {
    AnalyticFunction h;
    h.name = "mul(" + f.name + "," + g.name + ")";
    auto ff = f.f, gf = g.f;
    h.f = [ff, gf](cplx z) { return ff(z) * gf(z); };
    h.df = [f, g](cplx z) { return f.deriv(z) * g.f(z) + f.f(z) * g.deriv(z); };
    if (f.at_inf && g.at_inf) h.at_inf = *f.at_inf * *g.at_inf;
    h.hinf_bound = f.hinf_bound * g.hinf_bound;
    h.extends_left = std::min(f.extends_left, g.extends_left);
    h.in_B = f.in_B && g.in_B;
    if (f.band && g.band) h.band = std::make_pair(f.band->first + g.band->first, f.band->second + g.band->second);
    const bool finite = std::isfinite(f.hinf_bound) && std::isfinite(g.hinf_bound);
    if (finite && f.outer_env && g.outer_env)
        h.outer_env = f.outer_env->scaled(g.hinf_bound) + g.outer_env->scaled(f.hinf_bound);
    if (finite && f.vertical_env && g.vertical_env)
        h.vertical_env = f.vertical_env->scaled(g.hinf_bound) + g.vertical_env->scaled(f.hinf_bound);
    h.in_E = f.in_E && g.in_E && h.vertical_env.has_value();
    if (f.far && g.far && f.at_inf && g.at_inf) {
        const double R = std::max({f.far->R, g.far->R, 1e-300});
        const double u = std::abs(*f.at_inf), v = std::abs(*g.at_inf);
        FarField ff2;
        ff2.R = R;
        ff2.C1 = f.far->C1 * (v + g.far->C0 / R) + (u + f.far->C0 / R) * g.far->C1;
        ff2.C0 = f.far->C0 * (v + g.far->C0 / R) + u * g.far->C0;
        h.far = ff2;
    }
    h.peaks = merge_peaks(f.peaks, g.peaks);
    h.period = combine_period(f.period, g.period);
    h.singular_at_zero = f.singular_at_zero || g.singular_at_zero;
    return h;
}

AnalyticFunction scale(const AnalyticFunction& f, cplx c) {
    AnalyticFunction h = f;
    h.name = "scale(" + f.name + ",c=" + format_complex(c) + ")";
    auto ff = f.f;
    h.f = [ff, c](cplx z) { return c * ff(z); };
    h.df = [f, c](cplx z) { return c * f.deriv(z); };
    if (f.at_inf) h.at_inf = c * *f.at_inf;
    const double ac = std::abs(c);
    h.hinf_bound = f.hinf_bound * ac;
    if (f.outer_env) h.outer_env = f.outer_env->scaled(ac);
    if (f.vertical_env) h.vertical_env = f.vertical_env->scaled(ac);
    if (f.far) h.far = FarField{f.far->R, f.far->C0 * ac, f.far->C1 * ac};
    if (f.measure) {
        HalfLineMeasure m = *f.measure;
        for (auto& a : m.atoms) a.c *= c;
        for (auto& d : m.density) d.coeff *= c;
        h.measure = m;
    }
    return h;
}

AnalyticFunction shift(const AnalyticFunction& f, cplx a) {
    if (!(a.real() >= 0)) throw Error(ErrorKind::InvalidParameter, "shift needs Re a >= 0");
    AnalyticFunction h = f;
    h.name = "shift(" + f.name + ",a=" + format_complex(a) + ")";
    auto ff = f.f;
    h.f = [ff, a](cplx z) { return ff(z + a); };
    h.df = [f, a](cplx z) { return f.deriv(z + a); };
    h.extends_left = f.extends_left + a.real();
    if (f.vertical_env) {
        const double im = std::abs(a.imag());
        if (im == 0)
            h.vertical_env = f.vertical_env;
        else
            h.vertical_env =
                f.vertical_env->dilated(0.5).scaled(2.0).with_T0(std::max(2.0 * f.vertical_env->T0(), 2.0 * im));
    }
    if (f.far) {
        const double aa = std::abs(a);
        h.far = FarField{std::max(f.far->R + aa, 2.0 * aa), 2.0 * f.far->C0, 4.0 * f.far->C1};
    }
    h.peaks.clear();
    for (double p : f.peaks) h.peaks.push_back(p - a.imag());
    h.singular_at_zero = false;
    h.measure.reset();
    if (f.measure && a.imag() == 0) {
        bool ok = true;
        HalfLineMeasure m = *f.measure;
        for (auto& at : m.atoms) at.c *= std::exp(-a.real() * at.t);
        for (auto& d : m.density) {
            if (d.kind == HalfLineMeasure::DensityTerm::Kind::ExpPoly)
                d.rate += a;
            else
                ok = false;
        }
        if (ok) h.measure = m;
    }
    return h;
}

AnalyticFunction dilate(const AnalyticFunction& f, double b) {
    if (!(b > 0)) throw Error(ErrorKind::InvalidParameter, "dilate needs b > 0");
    AnalyticFunction h = f;
    h.name = "dilate(" + f.name + ",b=" + format_complex(b) + ")";
    auto ff = f.f;
    h.f = [ff, b](cplx z) { return ff(b * z); };
    h.df = [f, b](cplx z) { return b * f.deriv(b * z); };
    h.extends_left = f.extends_left / b;
    if (f.outer_env) h.outer_env = f.outer_env->dilated(b);
    if (f.vertical_env) h.vertical_env = f.vertical_env->dilated(b);
    if (f.far) h.far = FarField{f.far->R / b, f.far->C0 / b, f.far->C1 / b};
    for (double& p : h.peaks) p /= b;
    h.period = f.period / b;
    if (f.band) h.band = std::make_pair(f.band->first * b, f.band->second * b);
    if (f.measure) {
        HalfLineMeasure m = *f.measure;
        for (auto& at : m.atoms) at.t *= b;
        for (auto& d : m.density) {
            if (d.kind == HalfLineMeasure::DensityTerm::Kind::ExpPoly) {
                d.coeff /= std::pow(b, d.k + 1);
                d.rate /= b;
            } else {
                d.coeff /= b;
                d.a *= b;
                d.b *= b;
            }
        }
        h.measure = m;
    }
    return h;
}

namespace {

std::vector<cplx> sample_grid() {
    std::vector<cplx> pts;
    const double xs[] = {1e-6, 1e-3, 0.01, 0.1, 0.5, 1, 2, 5, 10, 100, 1e4};
    const double ys[] = {0, 1e-3, 0.01, 0.1, 0.3, 1, 2, 3, 5, 10, 30, 100, 1e3, 1e5};
    for (double x : xs)
        for (double y : ys) {
            pts.emplace_back(x, y);
            if (y != 0) pts.emplace_back(x, -y);
        }
    return pts;
}

}  // namespace

AnalyticFunction reciprocal(const AnalyticFunction& f) {
    double m = kInf, M = 0.0;
    for (cplx z : sample_grid()) {
        const double v = std::abs(f.f(z));
        m = std::min(m, v);
        M = std::max(M, v);
    }
    if (f.at_inf) m = std::min(m, std::abs(*f.at_inf));
    if (!(m > 1e-12 * std::max(M, 1e-300)) || !std::isfinite(m))
        throw Error(ErrorKind::RangeViolation, "reciprocal: |f| not bounded away from 0 on the sample grid");
    const double lb = m / 1.1;
    AnalyticFunction h;
    h.name = "recip(" + f.name + ")";
    auto ff = f.f;
    h.f = [ff](cplx z) { return 1.0 / ff(z); };
    h.df = [f](cplx z) {
        const cplx v = f.f(z);
        return -f.deriv(z) / (v * v);
    };
    if (f.at_inf) h.at_inf = 1.0 / *f.at_inf;
    h.hinf_bound = 1.0 / lb;
    h.in_B = f.in_B;
    if (f.outer_env) h.outer_env = f.outer_env->scaled(1.0 / (lb * lb));
    h.peaks = f.peaks;
    h.period = f.period;
    h.singular_at_zero = f.singular_at_zero;
    return h;
}

AnalyticFunction power(const AnalyticFunction& f, double beta) {
    double m = kInf;
    for (cplx z : sample_grid()) {
        const cplx v = f.f(z);
        m = std::min(m, std::abs(v));
        if (std::abs(v) > 0 && std::abs(std::arg(v)) > kPi - 1e-9)
            throw Error(ErrorKind::RangeViolation, "power: range meets the branch cut");
    }
    if (beta < 1 && !(m > 0)) throw Error(ErrorKind::RangeViolation, "power: f vanishes on the sample grid");
    AnalyticFunction h;
    h.name = "power(" + f.name + ",beta=" + format_complex(beta) + ")";
    auto ff = f.f;
    h.f = [ff, beta](cplx z) { return std::pow(ff(z), beta); };
    h.df = [f, beta](cplx z) { return beta * std::pow(f.f(z), beta - 1.0) * f.deriv(z); };
    if (f.at_inf) h.at_inf = std::pow(*f.at_inf, beta);
    const double lb = m / 1.1;
    h.hinf_bound = beta > 0 ? std::pow(f.hinf_bound, beta) : std::pow(lb, beta);
    h.in_B = f.in_B;
    if (f.outer_env && std::isfinite(f.hinf_bound)) {
        const double k = std::abs(beta) * std::max(std::pow(f.hinf_bound, beta - 1.0),
                                                   lb > 0 ? std::pow(lb, beta - 1.0) : 0.0);
        if (std::isfinite(k)) h.outer_env = f.outer_env->scaled(k);
    }
    h.peaks = f.peaks;
    h.period = f.period;
    h.singular_at_zero = f.singular_at_zero;
    return h;
}

AnalyticFunction derivative(const AnalyticFunction& f) {
    AnalyticFunction h;
    h.name = "deriv(" + f.name + ")";
    h.f = [f](cplx z) { return f.deriv(z); };
    h.at_inf = 0.0;
    h.extends_left = f.extends_left;
    h.in_B = f.in_B;
    if (f.outer_env) {
        const DecayEnvelope e = *f.outer_env;
        h.outer_env = DecayEnvelope::custom([e](double x) { return 2.0 / x * e.bound(0.5 * x); },
                                            [e](double T) { return 4.0 / T * e.tail(0.5 * T); }, 2.0 * e.T0() + 1e-12);
    }
    h.peaks = f.peaks;
    h.period = f.period;
    h.singular_at_zero = f.singular_at_zero;
    return h;
}

}  // namespace fn

// ---------------------------------------------------------------- parsing

std::string format_complex(cplx z) {
    auto fmt = [](double v) {
        if (v == 0) return std::string("0");
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    if (z.imag() == 0) return fmt(z.real());
    std::string im = fmt(std::abs(z.imag()));
    if (im == "1") im = "";
    if (z.real() == 0) return (z.imag() < 0 ? "-" : "") + im + "i";
    return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + im + "i";
}

namespace {

using spec::Node;
using spec::kw;
using spec::num_of;
using spec::real_of;
using spec::get_c;
using spec::get_r;
using spec::as_list;


HalfLineMeasure::DensityTerm density_term(const Node& n) {
    if (n.kind != Node::Kind::Spec) throw Error(ErrorKind::ParseError, "density term must be named");
    HalfLineMeasure::DensityTerm d;
    if (n.name == "exp" || n.name == "tpow" || n.name == "gamma") {
        d.kind = HalfLineMeasure::DensityTerm::Kind::ExpPoly;
        d.rate = get_c(n, "rate", 0, 1.0);
        d.coeff = get_c(n, "coeff", 1, 1.0);
        d.k = static_cast<int>(get_r(n, "k", 2, 0.0));
    } else if (n.name == "unit" || n.name == "lebesgue" || n.name == "indicator") {
        d.kind = HalfLineMeasure::DensityTerm::Kind::Indicator;
        d.a = get_r(n, "a", 0, 0.0);
        d.b = get_r(n, "b", 1, 1.0);
        d.coeff = get_c(n, "coeff", 2, 1.0);
    } else {
        throw Error(ErrorKind::UnknownSpec, "unknown density term '" + n.name + "'");
    }
    return d;
}

HalfLineMeasure measure_of(const Node& n) {
    HalfLineMeasure mu;
    if (const Node* a = kw(n, "atoms")) {
        for (const Node& item : as_list(*a)) {
            if (item.kind != Node::Kind::List || item.items.size() != 2)
                throw Error(ErrorKind::ParseError, "atoms must be (t,c) pairs");
            mu.atoms.push_back({real_of(item.items[0], "atom position"), num_of(item.items[1], "atom weight")});
        }
    }
    if (const Node* d = kw(n, "density"))
        for (const Node& item : as_list(*d)) mu.density.push_back(density_term(item));
    mu.validate();
    return mu;
}

BernsteinFunction bernstein_of(const Node& n) {
    BernsteinFunction fb;
    const Node* src = &n;
    if (const Node* inner = kw(n, "fb")) src = inner;
    fb.a = get_r(*src, "a", static_cast<size_t>(-1), 0.0);
    fb.b = get_r(*src, "b", static_cast<size_t>(-1), 0.0);
    if (const Node* j = kw(*src, "jumps")) {
        for (const Node& item : as_list(*j)) {
            if (item.kind != Node::Kind::List || item.items.size() != 2)
                throw Error(ErrorKind::ParseError, "jumps must be (s,w) pairs");
            fb.jumps.emplace_back(real_of(item.items[0], "jump position"), real_of(item.items[1], "jump weight"));
        }
    }
    fb.validate();
    return fb;
}

AnalyticFunction build(const Node& n) {
    if (n.kind == Node::Kind::Number) return fn::constant(n.num);
    if (n.kind != Node::Kind::Spec) throw Error(ErrorKind::ParseError, "expected a function spec");
    const std::string& id = n.name;
    auto sub = [&](size_t i) -> AnalyticFunction {
        if (i >= n.positional.size()) throw Error(ErrorKind::InvalidParameter, id + " needs function arguments");
        return build(n.positional[i]);
    };
    if (id == "const" || id == "constant") return fn::constant(get_c(n, "c", 0, std::nullopt));
    if (id == "exp") {
        const cplx a = get_c(n, "a", 0, 1.0);
        if (a.imag() != 0) throw Error(ErrorKind::InvalidParameter, "exp needs real a >= 0 (e^{-az} is unbounded otherwise)");
        return fn::exponential(a.real());
    }
    if (id == "resolvent" || id == "r") return fn::resolvent(get_c(n, "a", 0, std::nullopt));
    if (id == "cayley" || id == "cayley_pow") {
        const double nn = get_r(n, "n", 0, std::nullopt);
        if (nn != std::floor(nn)) throw Error(ErrorKind::InvalidParameter, "cayley needs integer n");
        return fn::cayley(static_cast<int>(nn));
    }
    if (id == "eta" || id == "eta_dilated") {
        if (kw(n, "delta", 0)) return fn::eta_dilated(get_r(n, "delta", 0, std::nullopt));
        return fn::eta();
    }
    if (id == "expinv" || id == "exp_inv_shift") return fn::expinv(get_r(n, "t", 0, std::nullopt));
    if (id == "vitse" || id == "vitse_reg") return fn::vitse(get_r(n, "t", 0, std::nullopt));
    if (id == "laplace") return fn::laplace(measure_of(n));
    if (id == "band") {
        const double eps = get_r(n, "eps", static_cast<size_t>(-1), std::nullopt);
        const double sigma = get_r(n, "sigma", static_cast<size_t>(-1), std::nullopt);
        std::vector<cplx> coeffs;
        std::vector<double> taus;
        const Node* c = kw(n, "coeffs");
        if (!c) throw Error(ErrorKind::InvalidParameter, "band requires coeffs");
        const Node* t = kw(n, "taus");
        for (const Node& item : as_list(*c)) {
            if (item.kind == Node::Kind::List && item.items.size() == 2) {
                coeffs.push_back(num_of(item.items[0], "coefficient"));
                taus.push_back(real_of(item.items[1], "frequency"));
            } else {
                coeffs.push_back(num_of(item, "coefficient"));
            }
        }
        if (t)
            for (const Node& item : as_list(*t)) taus.push_back(real_of(item, "frequency"));
        return fn::band(eps, sigma, coeffs, taus);
    }
    if (id == "bernstein_res" || id == "bernstein_resolvent") {
        BernsteinFunction fb = bernstein_of(n);
        return fn::bernstein_res(fb, get_r(n, "alpha", static_cast<size_t>(-1), std::nullopt),
                                 get_r(n, "beta", static_cast<size_t>(-1), std::nullopt),
                                 get_r(n, "theta", static_cast<size_t>(-1), std::nullopt),
                                 get_c(n, "lambda", static_cast<size_t>(-1), std::nullopt));
    }
    if (id == "add") return fn::add(sub(0), sub(1));
    if (id == "mul") return fn::mul(sub(0), sub(1));
    if (id == "scale") return fn::scale(sub(0), get_c(n, "c", 1, std::nullopt));
    if (id == "shift") return fn::shift(sub(0), get_c(n, "a", 1, std::nullopt));
    if (id == "dilate") return fn::dilate(sub(0), get_r(n, "b", 1, std::nullopt));
    if (id == "recip" || id == "reciprocal") return fn::reciprocal(sub(0));
    if (id == "power") return fn::power(sub(0), get_r(n, "beta", 1, std::nullopt));
    if (id == "deriv") return fn::derivative(sub(0));
    throw Error(ErrorKind::UnknownSpec, "unknown function '" + id + "'");
}

}  // namespace

AnalyticFunction make_catalog(const std::string& spec) {
    return build(spec::parse(spec));
}

HalfLineMeasure parse_measure(const std::string& spec) {
    Node n = spec::parse(spec);
    if (n.kind != Node::Kind::Spec) throw Error(ErrorKind::ParseError, "expected measure spec");
    if (n.name == "dirac" || n.name == "delta") return HalfLineMeasure::dirac(get_r(n, "t", 0, 0.0), get_c(n, "c", 1, 1.0));
    if (n.name == "unit" || n.name == "lebesgue") return HalfLineMeasure::lebesgue(get_r(n, "a", 0, 0.0), get_r(n, "b", 1, 1.0));
    if (n.name != "laplace" && n.name != "measure") throw Error(ErrorKind::UnknownSpec, "unknown measure '" + n.name + "'");
    return measure_of(n);
}

BernsteinFunction parse_bernstein(const std::string& spec) {
    Node n = spec::parse(spec);
    if (n.kind != Node::Kind::Spec) throw Error(ErrorKind::ParseError, "expected bernstein spec");
    return bernstein_of(n);
}

cplx parse_complex(const std::string& text) {
    Node n = spec::parse(text);
    return num_of(n, "value");
}

std::vector<std::string> catalog_specs() {
    return {
        "const(c=3)",
        "exp(a=1)",
        "exp(a=2.5)",
        "resolvent(a=1)",
        "resolvent(a=1+2i)",
        "cayley(n=1)",
        "cayley(n=4)",
        "eta",
        "eta(delta=0.5)",
        "expinv(t=2)",
        "vitse(t=1)",
        "laplace(atoms=[(0,1)];density=exp(rate=1,coeff=-2))",
        "band(eps=1,sigma=4;coeffs=[1,-1];taus=[1,4])",
        "bernstein_res(b=1,alpha=0.5,beta=2,theta=pi/4,lambda=1)",
    };
}

}  // namespace besov
