// Command-line front end. Exit codes: 0 ok, 1 verification failed, 2 parse
// or usage error, 3 unknown vertex, 4 iteration limit (value still printed),
// 5 dimension mismatch, 6 size cap, 7 other precondition.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "reslab/error.hpp"
#include "reslab/io.hpp"
#include "reslab/resistance.hpp"
#include "reslab/verify.hpp"

using namespace reslab;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kParse = 2, kUnknownVertex = 3, kMaxIters = 4, kDimension = 5, kTooLarge = 6,
            kPrecondition = 7 };

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return kParse;
        case ErrorCode::UnknownVertex: return kUnknownVertex;
        case ErrorCode::DimensionMismatch: return kDimension;
        case ErrorCode::TooLarge: return kTooLarge;
        default: return kPrecondition;
    }
}

struct Options {
    std::string format = "csv";
    std::string out;
    std::uint64_t seed = 0;
    double solver_tol = 0.0;
    std::optional<double> tol;
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::pair<std::string, std::string> pair_of(const std::string& s, const char* flag) {
    const auto parts = split(s);
    if (parts.size() != 2) throw Error(ErrorCode::ParseError, std::string(flag) + " expects two labels A,B");
    return {parts[0], parts[1]};
}

SolveConfig solve_config(const Options& opt) {
    SolveConfig cfg;
    if (opt.solver_tol > 0.0) cfg.tol_rel = opt.solver_tol;
    if (const char* env = std::getenv("RESLAB_MAX_ITERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v <= 0) throw Error(ErrorCode::ParseError, "RESLAB_MAX_ITERS must be a positive integer");
        cfg.max_iters = v;
    }
    return cfg;
}

// whole output in one write; to a file through a rename so readers never see a partial file
void emit(const Options& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text << std::flush;
        return;
    }
    const std::string tmp = opt.out + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::ParseError, "cannot write '" + opt.out + "'");
        f << text;
    }
    std::filesystem::rename(tmp, opt.out);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int finish(const SolveTrace& trace) {
    if (!trace.hit_max_iters) return kOk;
    std::cerr << "warning: a solve stopped at the iteration limit; the value is not certified\n";
    return kMaxIters;
}

int cmd_resistance(const std::string& file, const std::string& kind_name, std::optional<double> t,
                   const std::string& pair, const Options& opt) {
    const NetworkForm form = load_network(file);
    const SolveConfig cfg = solve_config(opt);
    ResistanceKind kind;
    if (kind_name == "t") {
        if (!t) throw Error(ErrorCode::NonPositiveT, "--t is required for kind t");
        kind = ResistanceKind::t_resistance(*t);
    } else if (kind_name != "elementary") {
        throw Error(ErrorCode::ParseError, "unknown kind '" + kind_name + "'");
    }
    SolveTrace trace;
    Json j{{"kind", kind_name}};
    if (kind.type == ResistanceKind::Type::TResistance) j["t"] = kind.t;

    if (!pair.empty()) {
        const auto [x, y] = pair_of(pair, "--pair");
        form.vertex_index(x);
        form.vertex_index(y);
        const ExtNonNeg v = kind.type == ResistanceKind::Type::Elementary
                                ? elementary_resistance(form, x, y, cfg, &trace)
                                : t_resistance(form, x, y, kind.t, cfg, &trace);
        if (opt.format == "json") {
            j["pair"] = {x, y};
            j["value"] = value_to_json(v);
            if (trace.hit_max_iters) j["warning"] = "max_iters";
            emit(opt, dump(j));
        } else {
            emit(opt, format_value(v) + "\n");
        }
        return finish(trace);
    }

    const ResistanceMatrix m = resistance_matrix(form, kind, cfg, &trace);
    const std::size_t n = m.labels.size();
    if (opt.format == "json") {
        j["labels"] = m.labels;
        Json rows = Json::array();
        for (const auto& row : m.entries) {
            Json r = Json::array();
            for (const auto& v : row) r.push_back(value_to_json(v));
            rows.push_back(r);
        }
        j["matrix"] = rows;
        if (trace.hit_max_iters) j["warning"] = "max_iters";
        emit(opt, dump(j));
    } else {
        std::string text;
        for (const auto& l : m.labels) text += "," + l;
        text += "\n";
        for (std::size_t i = 0; i < n; ++i) {
            text += m.labels[i];
            for (std::size_t k = 0; k < n; ++k) text += "," + (i == k ? std::string("0") : format_value(m.entries[i][k]));
            text += "\n";
        }
        emit(opt, text);
    }
    return finish(trace);
}

int cmd_functional(const std::string& file, const std::string& op, const std::string& vector_file,
                   std::optional<double> alpha, const std::string& K, double p_pen, const Options& opt) {
    const NetworkForm form = load_network(file);
    const SolveConfig cfg = solve_config(opt);
    const VertexVector f = load_vector(form, vector_file);
    SolveTrace trace;
    ExtNonNeg value;
    if (op == "eval") {
        value = form.evaluate(f);
    } else if (op == "luxemburg") {
        value = luxemburg(form, f, cfg);
    } else if (op == "orlicz") {
        value = orlicz(form, f, cfg);
    } else if (op == "conjugate") {
        value = conjugate(form, f, cfg, &trace);
    } else if (op == "approx") {
        if (!alpha) throw Error(ErrorCode::NonPositiveAlpha, "--alpha is required for approx");
        const std::vector<std::string> labels = K.empty() ? form.labels() : split(K);
        for (const auto& l : labels) form.vertex_index(l);
        value = ExtNonNeg::finite(approximating_form(form, *alpha, labels, p_pen, f, cfg, &trace));
    } else {
        throw Error(ErrorCode::ParseError, "unknown operation '" + op + "'");
    }
    if (opt.format == "json") {
        Json j{{"op", op}, {"value", value_to_json(value)}};
        if (trace.hit_max_iters) j["warning"] = "max_iters";
        emit(opt, dump(j));
    } else {
        emit(opt, format_value(value) + "\n");
    }
    return finish(trace);
}

struct VerifyArgs {
    std::vector<std::string> files;
    std::vector<std::string> checks;
    std::string t_list = "0.25,1,4";
    std::string alphas = "1,10,100,1000";
    std::string glue;
    std::string ends;
    double eps = 0.1;
    std::optional<double> p;
    int samples = 200;
};

std::vector<double> numbers(const std::string& s, const char* flag) {
    std::vector<double> out;
    for (const auto& item : split(s)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, std::string(flag) + ": '" + item + "' is not a number");
        }
    }
    return out;
}

int cmd_verify(const VerifyArgs& a, const Options& opt) {
    const SolveConfig cfg = solve_config(opt);
    std::vector<NetworkForm> forms;
    for (const auto& f : a.files) forms.push_back(load_network(f));
    const NetworkForm& form = forms.front();
    const std::vector<double> ts = numbers(a.t_list, "--t");
    auto tol = [&](double fallback) { return opt.tol.value_or(fallback); };

    std::vector<std::string> checks = a.checks;
    if (checks.size() == 1 && checks[0] == "all") {
        checks = {"contraction", "triangle", "delta2", "sup_approx"};
        if (form.num_classes() <= cfg.orlicz_class_cap) checks.push_back("fundamental");
        if (homogeneity_exponent(form)) {
            checks.push_back("homogeneous");
            checks.push_back("p_contraction");
        }
    }

    std::vector<VerifyReport> reports;
    for (const auto& name : checks) {
        if (name == "contraction") {
            reports.push_back(check_contraction_compatibility(form, {}, a.samples, opt.seed, tol(1e-9)));
        } else if (name == "triangle") {
            for (double t : ts) reports.push_back(check_triangle(form, t, {}, cfg, tol(1e-5)));
        } else if (name == "additivity_identify" || name == "additivity_resistor") {
            if (forms.size() != 2) throw Error(ErrorCode::ParseError, name + " needs two network files");
            const auto [xi1, xi2] = pair_of(a.glue, "--glue");
            const auto [x1, x2] = pair_of(a.ends, "--ends");
            for (double t : ts)
                reports.push_back(name == "additivity_identify"
                                      ? check_additivity_identify(forms[0], xi1, forms[1], xi2, x1, x2, t, cfg, tol(1e-4))
                                      : check_additivity_resistor(forms[0], xi1, forms[1], xi2, x1, x2, t, a.eps, cfg,
                                                                  tol(1e-4)));
        } else if (name == "homogeneous") {
            const auto p = a.p ? a.p : homogeneity_exponent(form);
            if (!p) throw Error(ErrorCode::MixedExponents, "form is not positively homogeneous with a single exponent");
            reports.push_back(check_homogeneous_identity(form, *p, ts, {}, cfg, tol(1e-3)));
        } else if (name == "fundamental") {
            reports.push_back(
                check_fundamental_inequalities(form, sample_vectors(form, a.samples, opt.seed), cfg, tol(1e-4)));
        } else if (name == "delta2") {
            const Delta2Estimate est = estimate_delta2_nabla2(form, sample_vectors(form, a.samples, opt.seed));
            VerifyReport r = est.report;
            r.witness["C_hat"] = value_to_json(est.C_hat);
            r.witness["K_hat"] = value_to_json(est.K_hat);
            r.witness["nabla2_plausible"] = est.nabla2_plausible;
            reports.push_back(std::move(r));
        } else if (name == "p_contraction") {
            const auto p = a.p ? a.p : homogeneity_exponent(form);
            if (!p) throw Error(ErrorCode::MixedExponents, "form is not positively homogeneous with a single exponent");
            reports.push_back(check_p_contraction_map(form, *p, a.samples, opt.seed, tol(1e-9)));
        } else if (name == "sup_approx") {
            reports.push_back(check_sup_approximation(form, sample_vectors(form, a.samples, opt.seed),
                                                      numbers(a.alphas, "--alpha"), cfg, tol(1e-2)));
        } else {
            throw Error(ErrorCode::ParseError, "unknown checker '" + name + "'");
        }
    }

    bool ok = true;
    for (const auto& r : reports) ok = ok && r.passed;
    if (opt.format == "csv") {
        std::string text = "property,passed,samples,worst_violation,tolerance\n";
        for (const auto& r : reports)
            text += r.property + "," + (r.passed ? "true" : "false") + "," + std::to_string(r.samples) + "," +
                    format_real(r.worst_violation) + "," + format_real(r.tolerance) + "\n";
        emit(opt, text);
    } else {
        emit(opt, dump(to_json(reports)));
    }
    return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resistance quantities of convex network energies"};
    app.require_subcommand(1);
    Options opt;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", opt.out, "write output to PATH");
        sub->add_option("--seed", opt.seed, "sampling seed");
        sub->add_option("--solver-tol", opt.solver_tol, "relative solver tolerance");
    };

    std::string file, kind = "elementary", pair;
    std::optional<double> t;
    auto* res = app.add_subcommand("resistance", "elementary or t-resistance for one pair or all pairs");
    res->add_option("file", file, "network file")->required();
    res->add_option("--kind", kind)->check(CLI::IsMember({"elementary", "t"}));
    res->add_option("--t", t, "t > 0 for kind t");
    res->add_option("--pair", pair, "A,B");
    common(res);

    std::string op, vector_file, K;
    std::optional<double> alpha;
    double p_pen = 2.0;
    auto* fun = app.add_subcommand("functional", "eval, luxemburg, orlicz, conjugate or approx at a vector");
    fun->add_option("file", file, "network file")->required();
    fun->add_option("op", op)->required()->check(CLI::IsMember({"eval", "luxemburg", "orlicz", "conjugate", "approx"}));
    fun->add_option("--vector", vector_file, "JSON object label -> value")->required();
    fun->add_option("--alpha", alpha, "penalty strength for approx");
    fun->add_option("--K", K, "penalty labels for approx, comma separated (default: all)");
    fun->add_option("--p-pen", p_pen, "penalty exponent for approx");
    common(fun);

    VerifyArgs va;
    std::string checks = "all";
    auto* ver = app.add_subcommand("verify", "run property checkers and print a JSON report");
    ver->add_option("files", va.files, "one network file, or two for additivity")->required()->expected(1, 2);
    ver->add_option("--check", checks,
                    "comma separated: contraction, triangle, additivity_identify, additivity_resistor, homogeneous, "
                    "fundamental, delta2, p_contraction, sup_approx, or all");
    ver->add_option("--t", va.t_list, "comma separated t values");
    ver->add_option("--alpha", va.alphas, "alpha schedule for sup_approx");
    ver->add_option("--glue", va.glue, "XI1,XI2 for additivity");
    ver->add_option("--ends", va.ends, "X1,X2 for additivity");
    ver->add_option("--eps", va.eps, "connector parameter for additivity_resistor");
    ver->add_option("--p", va.p, "homogeneity exponent (default: detected)");
    ver->add_option("--samples", va.samples, "samples per sampled checker");
    ver->add_option("--tol", opt.tol, "tolerance for every checker (default: per checker)");
    common(ver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kParse;
    }
    if (ver->parsed() && !ver->count("--format")) opt.format = "json";

    try {
        if (res->parsed()) return cmd_resistance(file, kind, t, pair, opt);
        if (fun->parsed()) return cmd_functional(file, op, vector_file, alpha, K, p_pen, opt);
        va.checks = split(checks);
        return cmd_verify(va, opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPrecondition;
    }
}
