#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracmix/errors.hpp"
#include "fracmix/specfun.hpp"

namespace fracmix::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump_to(std::ostringstream& os, const json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << json(it.key()).dump() << ": ";
                dump_to(os, it.value(), indent + 2);
            }
            os << "\n" << close << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            const bool nested = j.front().is_structured();
            os << (nested ? "[\n" : "[");
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << (nested ? ",\n" : ", ");
                first = false;
                if (nested) os << pad;
                dump_to(os, v, indent + 2);
            }
            os << (nested ? "\n" + close + "]" : "]");
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            os << (std::isfinite(v) ? num(v) : "null");
            return;
        }
        default: os << j.dump(); return;
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

double get_num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

std::vector<double> unit_grid(int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[i] = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    return x;
}

std::vector<double> time_grid(const FracProblem& p, int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        t[i] = n == 1 ? 0.0 : -p.p + (p.p + p.q) * i / (n - 1);
        if (std::fabs(t[i]) < 1e-15 * (p.p + p.q)) t[i] = 0.0;
    }
    return t;
}

std::pair<std::vector<double>, std::vector<double>> read_samples(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sample file " + path.string());
    std::vector<double> x, y;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) {
            if (x.empty()) continue;  // header
            throw ConfigError("malformed sample line in " + path.string() + ": " + line);
        }
        x.push_back(a);
        y.push_back(b);
    }
    return {x, y};
}

void write_u_grid(const SolutionField& field, const RunConfig& cfg) {
    std::ostringstream os;
    os << "x,t,u\n";
    const std::vector<double> xs = unit_grid(cfg.grid.nx);
    for (double t : time_grid(field.problem, cfg.grid.nt)) {
        const CoefficientSet slice = time_slice(field, t);
        for (double x : xs) os << num(x) << ',' << num(t) << ',' << num(synthesize(slice, x)) << '\n';
    }
    write_file(cfg.out / "u.csv", os.str());
}

void write_f(const SolutionField& field, const RunConfig& cfg) {
    std::ostringstream os;
    os << "x,f\n";
    for (double x : unit_grid(cfg.grid.nx)) os << num(x) << ',' << num(eval_f(field, x)) << '\n';
    write_file(cfg.out / "f.csv", os.str());
}

VerifyOptions verify_options(const RunConfig& cfg) {
    VerifyOptions o;
    if (cfg.has("verify")) {
        const json& v = cfg.doc["verify"];
        o.nx = static_cast<int>(get_num(v, "nx", o.nx));
        o.nt = static_cast<int>(get_num(v, "nt", o.nt));
        o.quad_nodes = static_cast<int>(get_num(v, "quad_nodes", o.quad_nodes));
    }
    return o;
}

json full_report(const SolutionField& field, const SpatialFunction& phi, const SpatialFunction& psi,
                 const RunConfig& cfg) {
    const ResidualReport r = verify_field(field, phi, psi, verify_options(cfg));
    json j = to_json(r);
    j["regularity"] = to_json(regularity_report(phi, psi));
    j["kernel_bound"] = kernel_bound(field.problem);
    j["passed"] = passes(r, cfg.thresholds);
    j["thresholds"] = {{"pde", cfg.thresholds.pde},
                       {"transmit", cfg.thresholds.transmit},
                       {"boundary", cfg.thresholds.boundary},
                       {"continuity", cfg.thresholds.continuity}};
    return j;
}

}  // namespace

std::string dump(const json& j) {
    std::ostringstream os;
    dump_to(os, j, 0);
    os << "\n";
    return os.str();
}

SpatialFunction parse_data(const json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("data descriptor must be an object");
    if (j.contains("zero")) return SpatialFunction::coefficients(CoefficientSet{});
    if (j.contains("coefficients")) return SpatialFunction::coefficients(coefficients_from_json(j["coefficients"]));
    if (j.contains("atoms")) {
        ExactFunction f;
        for (const json& a : j["atoms"]) {
            TrigAtom t;
            const std::string fn = a.value("fn", "cos");
            if (fn == "cos") t.fn = TrigAtom::Fn::cos;
            else if (fn == "sin") t.fn = TrigAtom::Fn::sin;
            else throw ConfigError("atom fn must be \"cos\" or \"sin\"");
            t.k = a.value("k", 0);
            t.power = a.value("power", 0);
            t.amp = a.value("amp", 1.0);
            if (t.k < 0 || t.power < 0) throw ConfigError("atom k and power must be non-negative");
            f.atoms.push_back(t);
        }
        return SpatialFunction::exact(f);
    }
    if (j.contains("samples")) {
        fs::path p = j["samples"].get<std::string>();
        if (p.is_relative()) p = base / p;
        auto [x, y] = read_samples(p);
        try {
            return SpatialFunction::samples(std::move(x), std::move(y));
        } catch (const DomainError& e) {
            throw ConfigError(p.string() + ": " + e.what());
        }
    }
    throw ConfigError("data descriptor needs one of: atoms, coefficients, samples, zero");
}

SpatialFunction RunConfig::data(const std::string& key) const {
    if (!has(key)) return SpatialFunction::coefficients(CoefficientSet{});
    return parse_data(doc[key], base);
}

CoefficientSet coefficients_from_json(const json& j) {
    CoefficientSet c;
    c.c0 = j.value("c0", 0.0);
    if (j.contains("c1")) c.c1 = j["c1"].get<std::vector<double>>();
    if (j.contains("c2")) c.c2 = j["c2"].get<std::vector<double>>();
    const std::size_t n = std::max(c.c1.size(), c.c2.size());
    c.c1.resize(n, 0.0);
    c.c2.resize(n, 0.0);
    return c;
}

json to_json(const CoefficientSet& c) { return {{"c0", c.c0}, {"c1", c.c1}, {"c2", c.c2}}; }

json to_json(const FracProblem& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"p", p.p},
            {"q", p.q},         {"K", p.K},       {"tol", p.tol}};
}

FracProblem problem_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("'problem' must be an object");
    FracProblem p;
    p.alpha = get_num(j, "alpha", p.alpha);
    p.beta = get_num(j, "beta", p.beta);
    p.gamma = get_num(j, "gamma", p.gamma);
    p.p = get_num(j, "p", p.p);
    p.q = get_num(j, "q", p.q);
    p.K = static_cast<int>(get_num(j, "K", p.K));
    p.tol = get_num(j, "tol", p.tol);
    return p;
}

json to_json(const SolutionField& f) {
    const ModeState& st = f.modes;
    json modes = json::array();
    for (int k = 1; k <= st.K(); ++k) {
        const ModeCoefficients& m = st.at(k);
        modes.push_back({{"k", k},       {"v1", m.v1},   {"v2", m.v2}, {"w1", m.w1}, {"w2", m.w2},
                         {"w1p", m.w1p}, {"w2p", m.w2p}, {"f1", m.f1}, {"f2", m.f2}});
    }
    return {{"problem", to_json(f.problem)},
            {"mean", {{"v0", st.v0}, {"w0", st.w0}, {"w0p", st.w0p}, {"f0", st.f0}}},
            {"modes", modes},
            {"source", to_json(f.source)},
            {"phi", to_json(phi_of(f))},
            {"psi", to_json(psi_of(f))}};
}

SolutionField field_from_json(const json& j) {
    SolutionField f;
    f.problem = problem_from_json(j.at("problem"));
    const json& mean = j.at("mean");
    f.modes.v0 = mean.at("v0").get<double>();
    f.modes.w0 = mean.at("w0").get<double>();
    f.modes.w0p = mean.at("w0p").get<double>();
    f.modes.f0 = mean.at("f0").get<double>();
    for (const json& m : j.at("modes")) {
        ModeCoefficients c;
        c.v1 = m.at("v1").get<double>();
        c.v2 = m.at("v2").get<double>();
        c.w1 = m.at("w1").get<double>();
        c.w2 = m.at("w2").get<double>();
        c.w1p = m.at("w1p").get<double>();
        c.w2p = m.at("w2p").get<double>();
        c.f1 = m.at("f1").get<double>();
        c.f2 = m.at("f2").get<double>();
        f.modes.modes.push_back(c);
    }
    f.problem.K = f.modes.K();
    f.source = j.contains("source") ? coefficients_from_json(j["source"]) : f.modes.source();
    return f;
}

json to_json(const ResidualReport& r) {
    json series = json::array();
    for (const SeriesTail& s : r.tails.series) {
        series.push_back({{"name", s.name},
                          {"partial_sum", s.partial_sum},
                          {"last_quartile_ratio", s.last_quartile_ratio},
                          {"non_decaying", s.non_decaying}});
    }
    return {{"pde_plus", r.pde_plus},
            {"pde_minus", r.pde_minus},
            {"transmit", r.transmit},
            {"boundary_t", r.boundary_t},
            {"boundary_x", r.boundary_x},
            {"continuity", r.continuity},
            {"tails", {{"reference", r.tails.reference}, {"series", series}}}};
}

json to_json(const std::vector<RegularityCheck>& checks) {
    json a = json::array();
    for (const RegularityCheck& c : checks) {
        a.push_back({{"condition", c.name},
                     {"set", c.full_set ? "both_branches" : "positive_branch"},
                     {"magnitude", c.magnitude},
                     {"passed", c.passed}});
    }
    return a;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    RunConfig cfg;
    try {
        cfg.doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    if (!cfg.doc.is_object()) throw ConfigError("config must be a JSON object");
    cfg.base = path.parent_path();
    if (cfg.has("problem")) cfg.problem = problem_from_json(cfg.doc["problem"]);
    if (cfg.has("grid")) {
        cfg.grid.nx = static_cast<int>(get_num(cfg.doc["grid"], "nx", cfg.grid.nx));
        cfg.grid.nt = static_cast<int>(get_num(cfg.doc["grid"], "nt", cfg.grid.nt));
    }
    if (cfg.has("thresholds")) {
        const json& t = cfg.doc["thresholds"];
        cfg.thresholds.pde = get_num(t, "pde", cfg.thresholds.pde);
        cfg.thresholds.transmit = get_num(t, "transmit", cfg.thresholds.transmit);
        cfg.thresholds.boundary = get_num(t, "boundary", cfg.thresholds.boundary);
        cfg.thresholds.continuity = get_num(t, "continuity", cfg.thresholds.continuity);
    }
    return cfg;
}

int cmd_inverse(const RunConfig& cfg) {
    const SpatialFunction phi = cfg.data("phi"), psi = cfg.data("psi");
    const int K = cfg.problem.K;
    const SolutionField field = solve_inverse(project(phi, K), project(psi, K), cfg.problem);
    fs::create_directories(cfg.out);
    write_f(field, cfg);
    write_u_grid(field, cfg);
    write_file(cfg.out / "coefficients.json", dump(to_json(field)));
    write_file(cfg.out / "report.json", dump(full_report(field, phi, psi, cfg)));
    return ok;
}

int cmd_forward(const RunConfig& cfg) {
    const int K = cfg.problem.K;
    const SolutionField field = solve_forward(cfg.problem, project(cfg.data("source"), K),
                                              project(cfg.data("initial"), K), project(cfg.data("velocity"), K));
    fs::create_directories(cfg.out);
    write_u_grid(field, cfg);
    write_file(cfg.out / "coefficients.json", dump(to_json(field)));
    return ok;
}

int cmd_verify(const RunConfig& cfg, const fs::path& field_file) {
    std::ifstream in(field_file);
    if (!in) throw ConfigError("cannot open field file " + field_file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("field file is not valid JSON: " + std::string(e.what()));
    }
    SolutionField field;
    try {
        field = field_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError("field file is incomplete: " + std::string(e.what()));
    }
    field.problem.validate();
    // Boundary data from the config when given, else the snapshots stored with the field.
    const SpatialFunction phi = cfg.has("phi") ? cfg.data("phi")
                                               : SpatialFunction::coefficients(coefficients_from_json(j.at("phi")));
    const SpatialFunction psi = cfg.has("psi") ? cfg.data("psi")
                                               : SpatialFunction::coefficients(coefficients_from_json(j.at("psi")));
    const json report = full_report(field, phi, psi, cfg);
    fs::create_directories(cfg.out);
    write_file(cfg.out / "verify_report.json", dump(report));
    std::cout << dump(report);
    return report["passed"].get<bool>() ? ok : verify_failed;
}

int cmd_specfun_table(const RunConfig& cfg) {
    if (!cfg.has("specfun_table")) throw ConfigError("missing 'specfun_table' section");
    const json& t = cfg.doc["specfun_table"];
    const std::string fn = t.value("function", "ml");
    const int n = static_cast<int>(get_num(t, "points", 0));
    if (n < 0) throw ConfigError("'points' must be non-negative");
    auto range = [&](const char* key, double& lo, double& hi) {
        if (!t.contains(key)) throw ConfigError(std::string("missing range '") + key + "'");
        const json& r = t[key];
        if (!r.is_array() || r.size() != 2) throw ConfigError(std::string("'") + key + "' must be [from, to]");
        lo = r[0].get<double>();
        hi = r[1].get<double>();
    };
    auto at = [&](double lo, double hi, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
    std::ostringstream os;
    if (fn == "ml") {
        const double a = get_num(t, "alpha", 1.0), b = get_num(t, "beta", 1.0);
        double lo = 0, hi = 0;
        range("z", lo, hi);
        os << "z,ml\n";
        for (int i = 0; i < n; ++i) {
            const double z = at(lo, hi, i);
            os << num(z) << ',' << num(ml(a, b, z)) << '\n';
        }
    } else if (fn == "e1") {
        const double a = get_num(t, "a", 0.5), d1 = get_num(t, "delta1", 1.5);
        const double rho1 = get_num(t, "rho1", 1.0), rho2 = get_num(t, "rho2", d1 - 1.0);
        double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
        range("x", xlo, xhi);
        if (t.contains("y")) range("y", ylo, yhi);
        else ylo = xlo, yhi = xhi;
        const E1Params par = E1Params::convolution(a, d1);
        os << "x,y,e1,e1_via_integral,diff\n";
        for (int i = 0; i < n; ++i) {
            const double x = at(xlo, xhi, i), y = at(ylo, yhi, i);
            const double s = e1(par, x, y), q = e1_via_integral(par, rho1, rho2, x, y);
            os << num(x) << ',' << num(y) << ',' << num(s) << ',' << num(q) << ',' << num(std::fabs(s - q)) << '\n';
        }
    } else {
        throw ConfigError("specfun_table.function must be \"ml\" or \"e1\"");
    }
    fs::create_directories(cfg.out);
    write_file(cfg.out / "specfun_table.csv", os.str());
    return ok;
}

int run(int argc, char** argv) {
    CLI::App app{"Inverse source problems for a mixed sub-diffusion / diffusion-wave equation"};
    app.require_subcommand(1);
    std::string config, out = ".", field;
    int nx = -1, nt = -1, modes = -1;
    double tol = -1.0;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON config file")->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--grid-nx", nx, "x points of the output grids");
        sub->add_option("--grid-nt", nt, "t points of the output grids");
        sub->add_option("--modes", modes, "number of mode pairs K");
        sub->add_option("--tol", tol, "solvability tolerance");
    };
    CLI::App* inv = app.add_subcommand("inverse", "recover f from u(x,q) and u(x,-p)");
    CLI::App* fwd = app.add_subcommand("forward", "evaluate u for a given source");
    CLI::App* ver = app.add_subcommand("verify", "residual checks of a stored field");
    CLI::App* tab = app.add_subcommand("specfun-table", "tabulate ml or e1");
    for (CLI::App* s : {inv, fwd, ver, tab}) common(s);
    ver->add_option("--field", field, "coefficients.json from a previous run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_config;
    }

    RunConfig cfg;
    try {
        cfg = load_config(config);
        cfg.out = out;
        if (nx >= 0) cfg.grid.nx = nx;
        if (nt >= 0) cfg.grid.nt = nt;
        if (modes >= 0) cfg.problem.K = modes;
        if (tol > 0.0) cfg.problem.tol = tol;
        if (cfg.grid.nx < 1 || cfg.grid.nt < 1) throw ConfigError("grid sizes must be positive");
        cfg.problem.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return bad_config;
    } catch (const ConstraintError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return bad_config;
    }

    try {
        if (*inv) return cmd_inverse(cfg);
        if (*fwd) return cmd_forward(cfg);
        if (*ver) return cmd_verify(cfg, field);
        return cmd_specfun_table(cfg);
    } catch (const SolvabilityError& e) {
        std::cerr << "solvability error: " << e.what() << "\n";
        return unsolvable;
    } catch (const DivisionError& e) {
        std::cerr << "solvability error: mode " << e.k << ", denominator " << num(e.value) << " (" << e.what()
                  << ")\n";
        return unsolvable;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return bad_config;
    } catch (const ConstraintError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return bad_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
}

}  // namespace fracmix::cli
