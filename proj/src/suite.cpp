#include "besov/suite.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "besov/spec_parser.hpp"

namespace besov {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const char* kAllSuite = R"(# function-level bounds
band_embedding: coeffs=[1,-1]; taus=[1,4]; eps=1; sigma=4
band_embedding: coeffs=[1,1]; taus=[1,2]; eps=1; sigma=2
derivative_bound: f=resolvent(a=2),exp(a=1),const(c=2); omega=1
derivative_bound: f=cayley(n=2); omega=0.5
product_bound: f=resolvent(a=1),exp(a=1); g=resolvent(a=2),cayley(n=1); omega=0.5
exp_window: g=const(c=1),resolvent(a=1),cayley(n=2); tau=0.1,1; omega=0.1,0.5
decay_majorant: c=1; poles=[1,1]; omega=0.5,1,2
decay_majorant: c=2i; poles=[1]; omega=1
decay_majorant: c=3; poles=[0.5,2,4]; omega=0.25
expinv_exact_norm: t=0.25,1,4,100
vitse_regularisation: t=0.001,1,10,100
cayley_power: n=1,2,8,64
bernstein_resolvent: fb=bernstein(b=1),bernstein(jumps=[(1,1)]); alpha=0.5; beta=2; theta=pi/4; lambda=1
bernstein_resolvent: fb=bernstein(b=1); alpha=1/3; beta=2.5; theta=pi/3; lambda=2
bernstein_resolvent: fb=bernstein(jumps=[(1,1)]); alpha=0.25; beta=3; theta=pi/6; lambda=1+0.2i

# operator bounds
hilbert_bound: A=diag(1,2),normal_random(n=4,seed=3); f=exp(a=1),cayley(n=8),eta,vitse(t=10)
sectorial_gamma: A=sectorial_random(n=4,seed=3,angle=pi/4),diagonalizable_random(n=4,seed=5); f=exp(a=1),cayley(n=8),eta
band_operator: A=diag(1,2),sectorial_random(n=4,seed=7,angle=pi/6); coeffs=[1,-1]; taus=[1,4]; eps=1; sigma=4
smoothed_window: A=normal_random(n=3,seed=5); g=resolvent(a=2); omega=0.1,1; tau=0.1,1
fractional_smoothing: A=normal_random(n=3,seed=5); g=resolvent(a=2); omega=1; lambda=1; alpha=0.5,1,2
deriv_operator: A=diag(1,2); f=resolvent(a=2),exp(a=1),cayley(n=1); omega=0.5
exp_stable_decay: A=diag(0.5,3),diag(1,1+2i),normal_random(n=3,seed=2); c=1; poles=[1,1]
inverse_generator: A=diag(2),diag(1,4); t=0.1,1,10,100
cayley_power_operator: A=diag(1,2),diag(i,-i,1); n=1,16,64
spectral_mapping: A=diag(1,2); f=cayley(n=1)
spectral_mapping: A=[[1,1],[0,1]]; f=exp(a=1)
spectral_mapping: A=sectorial_random(n=4,seed=11,angle=pi/4); f=eta
spectral_mapping: A=diag(i,-i,1); f=exp(a=1)
convergence_demo: A=diag(1,2),sectorial_random(n=3,seed=1,angle=pi/4),normal_random(n=4,seed=9); f=exp(a=1); n=[1,4,16,64]
)";

using Params = std::map<std::string, std::string>;

struct Context {
    QuadratureConfig cfg;
    std::uint64_t seed = 42;
    std::map<std::string, std::unique_ptr<MatrixOperator>> ops;
    std::vector<Curve> curves;

    const MatrixOperator& op(const std::string& spec) {
        auto& slot = ops[spec];
        if (!slot) slot = std::make_unique<MatrixOperator>(load_operator(spec));
        return *slot;
    }
};

const std::string& need(const Params& p, const std::string& k) {
    auto it = p.find(k);
    if (it == p.end()) throw Error(ErrorKind::InvalidParameter, "missing parameter '" + k + "'");
    return it->second;
}

double real_param(const Params& p, const std::string& k) {
    const cplx z = parse_complex(need(p, k));
    if (z.imag() != 0) throw Error(ErrorKind::InvalidParameter, "parameter '" + k + "' must be real");
    return z.real();
}

std::vector<cplx> list_param(const Params& p, const std::string& k) {
    std::vector<cplx> out;
    for (const auto& n : spec::as_list(spec::parse(need(p, k)))) out.push_back(spec::num_of(n, k));
    return out;
}

std::vector<double> real_list(const Params& p, const std::string& k) {
    std::vector<double> out;
    for (cplx z : list_param(p, k)) {
        if (z.imag() != 0) throw Error(ErrorKind::InvalidParameter, "parameter '" + k + "' must be real");
        out.push_back(z.real());
    }
    return out;
}

int int_param(const Params& p, const std::string& k) {
    const double v = real_param(p, k);
    if (v != std::floor(v)) throw Error(ErrorKind::InvalidParameter, "parameter '" + k + "' must be an integer");
    return static_cast<int>(v);
}

using Runner = std::function<std::vector<EstimateReport>(const Params&, Context&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
    static const std::vector<std::pair<std::string, Runner>> reg = {
        {"band_embedding",
         [](const Params& p, Context& c) {
             return std::vector{check_band_embedding(list_param(p, "coeffs"), real_list(p, "taus"),
                                                     real_param(p, "eps"), real_param(p, "sigma"), c.cfg)};
         }},
        {"derivative_bound",
         [](const Params& p, Context& c) {
             return std::vector{check_deriv_bound(make_catalog(need(p, "f")), real_param(p, "omega"), c.cfg)};
         }},
        {"product_bound",
         [](const Params& p, Context& c) {
             return std::vector{check_product_bound(make_catalog(need(p, "f")), make_catalog(need(p, "g")),
                                                    real_param(p, "omega"), c.cfg)};
         }},
        {"exp_window",
         [](const Params& p, Context& c) {
             return std::vector{check_exp_window(make_catalog(need(p, "g")), real_param(p, "tau"),
                                                 real_param(p, "omega"), c.cfg)};
         }},
        {"decay_majorant",
         [](const Params& p, Context& c) {
             auto [f, h] = rational_decay_family(parse_complex(need(p, "c")), real_list(p, "poles"));
             return std::vector{check_decay_majorant(f, h, real_param(p, "omega"), c.cfg)};
         }},
        {"expinv_exact_norm",
         [](const Params& p, Context& c) { return std::vector{check_expinv(real_param(p, "t"), c.cfg)}; }},
        {"vitse_regularisation",
         [](const Params& p, Context& c) { return std::vector{check_vitse_reg(real_param(p, "t"), c.cfg)}; }},
        {"cayley_power", [](const Params& p, Context& c) { return std::vector{check_cayley(int_param(p, "n"), c.cfg)}; }},
        {"bernstein_resolvent",
         [](const Params& p, Context& c) {
             return std::vector{check_bernstein(parse_bernstein(need(p, "fb")), real_param(p, "alpha"),
                                                real_param(p, "beta"), real_param(p, "theta"),
                                                parse_complex(need(p, "lambda")), c.cfg)};
         }},
        {"hilbert_bound",
         [](const Params& p, Context& c) {
             return std::vector{check_hilbert_bound(c.op(need(p, "A")), make_catalog(need(p, "f")), c.cfg)};
         }},
        {"sectorial_gamma",
         [](const Params& p, Context& c) {
             return std::vector{check_sectorial_bound(c.op(need(p, "A")), make_catalog(need(p, "f")), c.cfg)};
         }},
        {"band_operator",
         [](const Params& p, Context& c) {
             return std::vector{check_band_operator(c.op(need(p, "A")), list_param(p, "coeffs"), real_list(p, "taus"),
                                                    real_param(p, "eps"), real_param(p, "sigma"), c.cfg)};
         }},
        {"smoothed_window",
         [](const Params& p, Context& c) {
             return std::vector{check_smoothed_window(c.op(need(p, "A")), make_catalog(need(p, "g")),
                                                      real_param(p, "omega"), real_param(p, "tau"), c.cfg)};
         }},
        {"fractional_smoothing",
         [](const Params& p, Context& c) {
             return std::vector{check_fractional_smoothing(c.op(need(p, "A")), make_catalog(need(p, "g")),
                                                           real_param(p, "omega"), parse_complex(need(p, "lambda")),
                                                           real_param(p, "alpha"), c.cfg)};
         }},
        {"deriv_operator",
         [](const Params& p, Context& c) {
             return std::vector{
                 check_deriv_operator(c.op(need(p, "A")), make_catalog(need(p, "f")), real_param(p, "omega"), c.cfg)};
         }},
        {"exp_stable_decay",
         [](const Params& p, Context& c) {
             auto [f, h] = rational_decay_family(parse_complex(need(p, "c")), real_list(p, "poles"));
             return std::vector{check_exp_stable_decay(c.op(need(p, "A")), f, h, c.cfg)};
         }},
        {"inverse_generator",
         [](const Params& p, Context& c) {
             const auto& A = c.op(need(p, "A"));
             const double t = real_param(p, "t");
             return std::vector{inverse_generator_check(A, t, c.cfg), inverse_generator_calculus(A, t, c.cfg),
                                inverse_generator_growth(A, t, c.cfg)};
         }},
        {"cayley_power_operator",
         [](const Params& p, Context& c) {
             const auto& A = c.op(need(p, "A"));
             const int n = int_param(p, "n");
             return std::vector{cayley_power_check(A, n, c.cfg), cayley_power_calculus(A, n, c.cfg)};
         }},
        {"spectral_mapping",
         [](const Params& p, Context& c) {
             return std::vector{spectral_mapping_check(c.op(need(p, "A")), make_catalog(need(p, "f")), c.cfg)};
         }},
        {"convergence_demo",
         [](const Params& p, Context& c) {
             const auto& A = c.op(need(p, "A"));
             std::vector<int> ns;
             for (double v : real_list(p, "n")) ns.push_back(static_cast<int>(v));
             Vec x;
             if (p.count("x")) {
                 const auto xs = list_param(p, "x");
                 x.resize(static_cast<Eigen::Index>(xs.size()));
                 for (size_t i = 0; i < xs.size(); ++i) x(static_cast<Eigen::Index>(i)) = xs[i];
             } else {
                 x = Vec::Ones(A.n()) / std::sqrt(double(A.n()));
             }
             auto d = convergence_demo(A, make_catalog(need(p, "f")), ns, x, c.cfg);
             d.curve.name = "convergence_demo_" + std::to_string(c.curves.size() + 1);
             c.curves.push_back(d.curve);
             return std::vector{d.report};
         }},
    };
    return reg;
}

const Runner* find_runner(const std::string& id) {
    for (const auto& [k, r] : registry())
        if (k == id) return &r;
    return nullptr;
}

std::string params_label(const Params& p, const std::vector<std::string>& order) {
    std::string s;
    for (const auto& k : order) s += (s.empty() ? "" : ";") + k + "=" + p.at(k);
    return s;
}

// n or t against lhs and rhs, one curve per remaining parameter set
void add_sweep_curves(const std::vector<EstimateReport>& reports, std::vector<Curve>& curves) {
    const std::vector<std::pair<std::string, std::string>> sweeps = {
        {"cayley_power", "n"},         {"expinv_exact_norm", "t"},     {"vitse_regularisation", "t"},
        {"cayley_power_operator", "n"}, {"inverse_generator", "t"}, {"inverse_generator_growth", "t"}};
    for (const auto& [id, key] : sweeps) {
        std::vector<std::string> groups;
        std::vector<Curve> local;
        for (const auto& r : reports) {
            if (r.estimate_id != id) continue;
            double x = 0;
            std::string rest;
            for (const auto& [k, v] : r.params) {
                if (k == key)
                    x = parse_complex(v).real();
                else
                    rest += k + "=" + v + ";";
            }
            auto it = std::find(groups.begin(), groups.end(), rest);
            size_t g = static_cast<size_t>(it - groups.begin());
            if (it == groups.end()) {
                groups.push_back(rest);
                Curve c;
                c.name = id + "_" + std::to_string(groups.size());
                c.columns = {key, "lhs", "rhs"};
                local.push_back(c);
            }
            local[g].rows.push_back({x, r.lhs, r.rhs});
        }
        for (auto& c : local) {
            std::sort(c.rows.begin(), c.rows.end());
            curves.push_back(c);
        }
    }
}

}  // namespace

std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(' || ch == '[') ++depth;
        if (ch == ')' || ch == ']') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (depth != 0) throw Error(ErrorKind::ParseError, "unbalanced brackets in '" + s + "'");
    out.push_back(trim(cur));
    return out;
}

std::vector<std::map<std::string, std::string>> ManifestEntry::expand() const {
    std::vector<std::map<std::string, std::string>> out(1);
    for (const auto& [k, vals] : grid) {
        std::vector<std::map<std::string, std::string>> next;
        for (const auto& m : out)
            for (const auto& v : vals) {
                auto c = m;
                c[k] = v;
                next.push_back(std::move(c));
            }
        out = std::move(next);
    }
    return out;
}

std::vector<ManifestEntry> parse_manifest(const std::string& text) {
    std::vector<ManifestEntry> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorKind::ParseError, "manifest line " + std::to_string(lineno) + ": expected 'id: key=values'");
        ManifestEntry e;
        e.id = trim(line.substr(0, colon));
        e.line = lineno;
        if (!find_runner(e.id))
            throw Error(ErrorKind::UnknownSpec, "manifest line " + std::to_string(lineno) + ": unknown validator '" +
                                                    e.id + "'");
        const std::string rest = trim(line.substr(colon + 1));
        if (!rest.empty()) {
            for (const auto& part : split_top(rest, ';')) {
                if (part.empty()) continue;
                const auto eq = part.find('=');
                if (eq == std::string::npos)
                    throw Error(ErrorKind::ParseError,
                                "manifest line " + std::to_string(lineno) + ": expected key=values in '" + part + "'");
                const std::string key = trim(part.substr(0, eq));
                for (const auto& [k, v] : e.grid)
                    if (k == key)
                        throw Error(ErrorKind::ParseError,
                                    "manifest line " + std::to_string(lineno) + ": repeated key '" + key + "'");
                auto vals = split_top(part.substr(eq + 1), ',');
                for (const auto& v : vals)
                    if (v.empty())
                        throw Error(ErrorKind::ParseError,
                                    "manifest line " + std::to_string(lineno) + ": empty value for '" + key + "'");
                e.grid.emplace_back(key, vals);
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

const std::string& default_manifest() {
    static const std::string s = kAllSuite;
    return s;
}

std::vector<ManifestEntry> load_manifest(const std::string& path_or_name) {
    if (path_or_name == "all") return parse_manifest(default_manifest());
    std::ifstream in(path_or_name);
    if (!in) throw Error(ErrorKind::IoError, "cannot read manifest '" + path_or_name + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

std::vector<std::string> validator_ids() {
    std::vector<std::string> ids;
    for (const auto& [k, r] : registry()) ids.push_back(k);
    return ids;
}

bool SuiteResult::all_pass() const { return failed() == 0; }

int SuiteResult::failed() const {
    return static_cast<int>(std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.pass; }));
}

nlohmann::json SuiteResult::to_json() const {
    nlohmann::json j;
    j["schema"] = "besov-calc/1";
    j["seed"] = seed;
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    j["reports"] = arr;
    j["summary"] = {{"total", reports.size()}, {"failed", failed()}, {"all_pass", all_pass()}};
    return j;
}

std::string SuiteResult::to_csv() const {
    std::string s = EstimateReport::csv_header() + "\n";
    for (const auto& r : reports) s += r.csv_row() + "\n";
    return s;
}

SuiteResult run_suite(const std::vector<ManifestEntry>& manifest, const QuadratureConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Context ctx;
    ctx.cfg = cfg;
    ctx.seed = seed;
    SuiteResult res;
    res.seed = seed;
    for (const auto& e : manifest) {
        const Runner* run = find_runner(e.id);
        if (!run) throw Error(ErrorKind::UnknownSpec, "unknown validator '" + e.id + "'");
        std::vector<std::string> order;
        for (const auto& [k, v] : e.grid) order.push_back(k);
        for (const auto& p : e.expand()) {
            try {
                for (auto& r : (*run)(p, ctx)) res.reports.push_back(std::move(r));
            } catch (const Error& err) {
                EstimateReport r;
                r.estimate_id = e.id;
                r.param("manifest", params_label(p, order));
                r.lhs = std::nan("");
                r.rhs = std::nan("");
                r.slack = std::nan("");
                r.pass = false;
                r.certified = false;
                r.note = err.what();
                res.reports.push_back(std::move(r));
            }
        }
    }
    std::stable_sort(res.reports.begin(), res.reports.end(),
                     [](const auto& a, const auto& b) { return a.estimate_id < b.estimate_id; });
    add_sweep_curves(res.reports, ctx.curves);
    res.curves = std::move(ctx.curves);
    return res;
}

}  // namespace besov
