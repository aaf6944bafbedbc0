#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "besov/duality.hpp"
#include "besov/suite.hpp"

namespace besov::cli {

namespace {

struct RunConfig {
    std::string f, g, A, out, manifest = "all", plot_data;
    double tol = 0.0;
    std::uint64_t seed = 42;
    std::vector<int> ns = {1, 4, 16, 64};
};

QuadratureConfig quad_config(const RunConfig& rc) {
    QuadratureConfig c;
    if (rc.tol > 0) {
        c.abs_tol = rc.tol;
        c.rel_tol = 10 * rc.tol;
    }
    c.validate();
    return c;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
    o << text;
    if (!o) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

// --out PREFIX writes PREFIX.json and PREFIX.csv
void emit(const RunConfig& rc, const nlohmann::json& j, const std::string& csv) {
    if (rc.out.empty()) return;
    write_file(rc.out + ".json", j.dump(2) + "\n");
    write_file(rc.out + ".csv", csv);
}

void emit_curves(const RunConfig& rc, const std::vector<Curve>& curves) {
    if (rc.plot_data.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(rc.plot_data, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create '" + rc.plot_data + "'");
    for (const auto& c : curves) write_file(rc.plot_data + "/" + c.name + ".csv", c.to_csv());
}

nlohmann::json header(const std::string& command, const RunConfig& rc, const QuadratureConfig& c) {
    nlohmann::json j;
    j["schema"] = "besov-calc/1";
    j["command"] = command;
    j["seed"] = rc.seed;
    j["abs_tol"] = c.abs_tol;
    j["rel_tol"] = c.rel_tol;
    return j;
}

nlohmann::json matrix_json(const Mat& M) {
    auto re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        auto r = nlohmann::json::array(), s = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            r.push_back(M(i, j).real());
            s.push_back(M(i, j).imag());
        }
        re.push_back(r);
        im.push_back(s);
    }
    return {{"re", re}, {"im", im}};
}

int cmd_norm(const RunConfig& rc, std::ostream& out) {
    const auto cfg = quad_config(rc);
    const AnalyticFunction f = make_catalog(rc.f);
    auto j = header("norm", rc, cfg);
    j["f"] = f.name;
    std::string csv = "norm,value,error_bound,certified\n";
    auto add = [&](const std::string& name, const NormReport& r) {
        j[name] = r.to_json();
        csv += name + "," + fmt_num(r.value) + "," + fmt_num(r.error_bound) + "," + (r.certified ? "true" : "false") +
               "\n";
        out << name << " " << fmt_num(r.value) << " +- " << fmt_num(r.error_bound) << "\n";
    };
    add("b", b_norm(f, cfg));
    add("hinf", hinf_norm(f, cfg));
    add("b0", b0_norm(f, cfg));
    if (f.in_E) add("e0", e0_norm(f, cfg));
    emit(rc, j, csv);
    return 0;
}

int cmd_pair(const RunConfig& rc, std::ostream& out) {
    const auto cfg = quad_config(rc);
    if (rc.g.empty()) throw Error(ErrorKind::InvalidParameter, "pair needs --g");
    const AnalyticFunction f = make_catalog(rc.f), g = make_catalog(rc.g);
    const PairingResult p = pairing(g, f, cfg);
    auto j = header("pair", rc, cfg);
    j["f"] = f.name;
    j["g"] = g.name;
    j["value"] = {{"re", p.value.real()}, {"im", p.value.imag()}};
    j["error_bound"] = p.error_bound;
    j["g_e0"] = p.g_e0;
    out << "pairing " << format_complex(p.value) << " +- " << fmt_num(p.error_bound) << "\n";
    emit(rc, j,
         "re,im,error_bound\n" + fmt_num(p.value.real()) + "," + fmt_num(p.value.imag()) + "," +
             fmt_num(p.error_bound) + "\n");
    return 0;
}

int cmd_apply(const RunConfig& rc, std::ostream& out) {
    const auto cfg = quad_config(rc);
    const MatrixOperator A = load_operator(rc.A);
    const AnalyticFunction f = make_catalog(rc.f);
    const CalculusResult r = apply_calculus(A, f, cfg);
    auto j = header("apply", rc, cfg);
    j["f"] = f.name;
    j["A"] = matrix_json(A.matrix());
    j["value"] = matrix_json(r.value);
    j["error_bound"] = r.error_bound;
    j["extrapolated"] = r.extrapolated;
    std::ostringstream mat;
    write_matrix(mat, r.value);
    out << mat.str() << "error_bound " << fmt_num(r.error_bound) << (r.extrapolated ? " (extrapolated)" : "")
        << "\n";
    std::string csv = "row,col,re,im\n";
    for (Eigen::Index i = 0; i < r.value.rows(); ++i)
        for (Eigen::Index k = 0; k < r.value.cols(); ++k)
            csv += std::to_string(i) + "," + std::to_string(k) + "," + fmt_num(r.value(i, k).real()) + "," +
                   fmt_num(r.value(i, k).imag()) + "\n";
    emit(rc, j, csv);
    return 0;
}

int cmd_profile(const RunConfig& rc, std::ostream& out) {
    const auto cfg = quad_config(rc);
    const MatrixOperator A = load_operator(rc.A);
    const OperatorProfile p = compute_profile(A, cfg, rc.seed);
    auto j = header("profile", rc, cfg);
    j["A"] = matrix_json(A.matrix());
    const nlohmann::json pj = p.to_json();
    j["profile"] = pj;
    j["normal"] = A.is_normal();
    j["diagonalizable"] = A.diagonalizable();
    std::string csv = "quantity,value\n";
    for (const auto& [k, v] : pj.items()) {
        const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        csv += k + "," + s + "\n";
        out << k << " " << s << "\n";
    }
    emit(rc, j, csv);
    return 0;
}

int cmd_suite(const RunConfig& rc, std::ostream& out) {
    const auto cfg = quad_config(rc);
    const SuiteResult r = run_suite(load_manifest(rc.manifest), cfg, rc.seed);
    auto j = r.to_json();
    const std::string csv = r.to_csv();
    out << csv;
    emit(rc, j, csv);
    emit_curves(rc, r.curves);
    return r.all_pass() ? 0 : 2;
}

int cmd_demo(const RunConfig& rc, std::ostream& out) {
    const auto cfg = quad_config(rc);
    const MatrixOperator A = load_operator(rc.A.empty() ? "diag(1,2)" : rc.A);
    const AnalyticFunction f = make_catalog(rc.f.empty() ? "exp(a=1)" : rc.f);
    const Vec x = random_unit_vector(A.n(), rc.seed);
    ConvergenceDemo d = convergence_demo(A, f, rc.ns, x, cfg);
    auto j = header("demo", rc, cfg);
    j["report"] = d.report.to_json();
    const std::string csv = d.curve.to_csv();
    out << csv << "pass " << (d.report.pass ? "true" : "false") << "\n";
    emit(rc, j, csv);
    emit_curves(rc, {d.curve});
    return d.report.pass ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"besov-calc: norms, pairings and the B-calculus on small matrices"};
    app.name("besov-calc");
    app.require_subcommand(1);
    RunConfig rc;
    auto common = [&](CLI::App* sc) {
        sc->add_option("--tol", rc.tol, "absolute quadrature tolerance");
        sc->add_option("--out", rc.out, "write OUT.json and OUT.csv");
        sc->add_option("--seed", rc.seed, "seed for random vectors")->capture_default_str();
    };
    auto* norm = app.add_subcommand("norm", "B, H-infinity, B0 and E0 norms of a function");
    norm->add_option("--f", rc.f, "function spec")->required();
    common(norm);
    auto* pair = app.add_subcommand("pair", "the pairing <g,f>");
    pair->add_option("--f", rc.f, "function spec")->required();
    pair->add_option("--g", rc.g, "function spec")->required();
    common(pair);
    auto* apply = app.add_subcommand("apply", "f(A) by the calculus integral");
    apply->add_option("--A", rc.A, "matrix family spec or file")->required();
    apply->add_option("--f", rc.f, "function spec")->required();
    common(apply);
    auto* profile = app.add_subcommand("profile", "K_A, M_A and gamma estimates");
    profile->add_option("--A", rc.A, "matrix family spec or file")->required();
    common(profile);
    auto* suite = app.add_subcommand("suite", "run a manifest of bound checks");
    suite->add_option("--manifest", rc.manifest, "manifest file, or 'all'")->capture_default_str();
    suite->add_option("--plot-data", rc.plot_data, "directory for curve CSVs");
    common(suite);
    auto* demo = app.add_subcommand("demo", "convergence of f(A/n)x to f(0)x");
    demo->add_option("--A", rc.A, "matrix family spec or file");
    demo->add_option("--f", rc.f, "function spec");
    demo->add_option("--n", rc.ns, "dilation factors");
    demo->add_option("--plot-data", rc.plot_data, "directory for curve CSVs");
    common(demo);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "besov-calc: " << e.what() << "\n";
        return 1;
    }
    try {
        if (norm->parsed()) return cmd_norm(rc, out);
        if (pair->parsed()) return cmd_pair(rc, out);
        if (apply->parsed()) return cmd_apply(rc, out);
        if (profile->parsed()) return cmd_profile(rc, out);
        if (suite->parsed()) return cmd_suite(rc, out);
        if (demo->parsed()) return cmd_demo(rc, out);
    } catch (const std::exception& e) {
        err << "besov-calc: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace besov::cli
