#include "fraclab/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fraclab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + (path.empty() ? "/" : path) + ": " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) fail(path + "/" + it.key(), "unknown key");
}

const json* maybe(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

std::array<double, 2> as_point(const json& v, const std::string& path, int dim) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        fail(path, "expected an array of " + std::to_string(dim) + " number(s)");
    std::array<double, 2> out{0.0, 0.0};
    for (int d = 0; d < dim; ++d) out[d] = as_number(v[d], path + "[" + std::to_string(d) + "]");
    return out;
}

RegionSpec parse_region(const json& v, const std::string& path, int dim) {
    if (!v.is_object()) fail(path, "expected an object");
    check_keys(v, path, {"shape", "center", "radius", "half_widths"});
    RegionSpec spec;
    if (auto* p = maybe(v, "shape")) spec.shape = as_string(*p, path + "/shape");
    if (spec.shape != "ball" && spec.shape != "box") fail(path + "/shape", "must be 'ball' or 'box'");
    if (auto* p = maybe(v, "center")) spec.center = as_point(*p, path + "/center", dim);
    if (spec.shape == "ball") {
        auto* p = maybe(v, "radius");
        if (!p) fail(path, "ball region needs 'radius'");
        spec.radius = as_number(*p, path + "/radius");
    } else {
        auto* p = maybe(v, "half_widths");
        if (!p) fail(path, "box region needs 'half_widths'");
        spec.half_widths = as_point(*p, path + "/half_widths", dim);
    }
    return spec;
}

ProfileSpec parse_profile(const json& v, const std::string& path, int dim) {
    if (!v.is_object()) fail(path, "expected an object");
    check_keys(v, path, {"center", "radius", "amplitude"});
    ProfileSpec spec;
    if (auto* p = maybe(v, "center")) spec.center = as_point(*p, path + "/center", dim);
    auto* p = maybe(v, "radius");
    if (!p) fail(path, "profile needs 'radius'");
    spec.radius = as_number(*p, path + "/radius");
    if (auto* q = maybe(v, "amplitude")) spec.amplitude = as_number(*q, path + "/amplitude");
    return spec;
}

json region_json(const RegionSpec& spec, int dim) {
    json v;
    v["shape"] = spec.shape;
    v["center"] = std::vector<double>(spec.center.begin(), spec.center.begin() + dim);
    if (spec.shape == "ball")
        v["radius"] = spec.radius;
    else
        v["half_widths"] = std::vector<double>(spec.half_widths.begin(), spec.half_widths.begin() + dim);
    return v;
}

json profile_json(const ProfileSpec& spec, int dim) {
    json v;
    v["center"] = std::vector<double>(spec.center.begin(), spec.center.begin() + dim);
    v["radius"] = spec.radius;
    v["amplitude"] = spec.amplitude;
    return v;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config error at /: not valid JSON (") + e.what() + ")");
    }
    if (!root.is_object()) fail("", "top level must be an object");
    check_keys(root, "", {"grid", "s", "lambda_shift", "domain", "coefficients", "solver",
                          "dictionary", "recover", "runge_study", "alessandrini", "forward",
                          "verify", "seed", "threads", "debug"});

    ExperimentConfig cfg;

    auto* grid = maybe(root, "grid");
    if (!grid) fail("/grid", "missing required section");
    if (!grid->is_object()) fail("/grid", "expected an object");
    check_keys(*grid, "/grid", {"dim", "points", "half_length"});
    if (auto* p = maybe(*grid, "dim")) cfg.dim = as_int(*p, "/grid/dim");
    if (cfg.dim != 1 && cfg.dim != 2) fail("/grid/dim", "must be 1 or 2");
    if (auto* p = maybe(*grid, "points")) cfg.points = as_int(*p, "/grid/points");
    if (cfg.points < 16 || cfg.points % 2 != 0) fail("/grid/points", "must be even and >= 16");
    if (auto* p = maybe(*grid, "half_length")) cfg.half_length = as_number(*p, "/grid/half_length");
    if (!(cfg.half_length > 0.0)) fail("/grid/half_length", "must be positive");

    auto* sval = maybe(root, "s");
    if (!sval) fail("/s", "missing required key");
    cfg.s = as_number(*sval, "/s");
    if (!(cfg.s > 0.0)) fail("/s", "must be positive");
    if (std::abs(cfg.s - std::round(cfg.s)) < 1e-9) fail("/s", "must be non-integer");

    if (auto* p = maybe(root, "lambda_shift")) cfg.lambda_shift = as_number(*p, "/lambda_shift");

    auto* domain = maybe(root, "domain");
    if (!domain) fail("/domain", "missing required section");
    if (!domain->is_object()) fail("/domain", "expected an object");
    check_keys(*domain, "/domain", {"omega", "w1", "w2"});
    for (const char* key : {"omega", "w1", "w2"}) {
        auto* p = maybe(*domain, key);
        if (!p) fail(std::string("/domain/") + key, "missing required region");
        RegionSpec spec = parse_region(*p, std::string("/domain/") + key, cfg.dim);
        if (key == std::string("omega")) cfg.omega = spec;
        else if (key == std::string("w1")) cfg.w1 = spec;
        else cfg.w2 = spec;
    }

    if (auto* coeffs = maybe(root, "coefficients")) {
        if (!coeffs->is_array()) fail("/coefficients", "expected an array");
        for (std::size_t i = 0; i < coeffs->size(); ++i) {
            const json& entry = (*coeffs)[i];
            std::string path = "/coefficients[" + std::to_string(i) + "]";
            if (!entry.is_object()) fail(path, "expected an object");
            check_keys(entry, path, {"alpha", "center", "radius", "amplitude"});
            auto* a = maybe(entry, "alpha");
            if (!a) fail(path, "coefficient needs 'alpha'");
            if (!a->is_array() || static_cast<int>(a->size()) != cfg.dim)
                fail(path + "/alpha", "expected an array of " + std::to_string(cfg.dim) + " integer(s)");
            int a0 = as_int((*a)[0], path + "/alpha[0]");
            int a1 = cfg.dim == 2 ? as_int((*a)[1], path + "/alpha[1]") : 0;
            if (a0 < 0 || a1 < 0) fail(path + "/alpha", "entries must be >= 0");
            json profile = entry;
            profile.erase("alpha");
            CoefficientSpec cs;
            cs.alpha = MultiIndex::of(cfg.dim, a0, a1);
            cs.profile = parse_profile(profile, path, cfg.dim);
            cfg.coefficients.push_back(cs);
        }
    }

    if (auto* solver = maybe(root, "solver")) {
        if (!solver->is_object()) fail("/solver", "expected an object");
        check_keys(*solver, "/solver", {"method", "tol_dense", "tol_iterative",
                                        "max_iteration_factor", "condition_limit"});
        if (auto* p = maybe(*solver, "method")) {
            std::string m = as_string(*p, "/solver/method");
            if (m == "dense") cfg.solver.method = SolveMethod::dense;
            else if (m == "iterative") cfg.solver.method = SolveMethod::iterative;
            else fail("/solver/method", "must be 'dense' or 'iterative'");
        }
        if (auto* p = maybe(*solver, "tol_dense")) cfg.solver.tol_dense = as_number(*p, "/solver/tol_dense");
        if (auto* p = maybe(*solver, "tol_iterative"))
            cfg.solver.tol_iterative = as_number(*p, "/solver/tol_iterative");
        if (auto* p = maybe(*solver, "max_iteration_factor"))
            cfg.solver.max_iteration_factor = as_int(*p, "/solver/max_iteration_factor");
        if (auto* p = maybe(*solver, "condition_limit"))
            cfg.solver.condition_limit = as_number(*p, "/solver/condition_limit");
    }

    if (auto* dict = maybe(root, "dictionary")) {
        if (!dict->is_object()) fail("/dictionary", "expected an object");
        check_keys(*dict, "/dictionary", {"radius_cells", "stride_cells", "max_elements"});
        if (auto* p = maybe(*dict, "radius_cells"))
            cfg.dictionary.radius_cells = as_int(*p, "/dictionary/radius_cells");
        if (auto* p = maybe(*dict, "stride_cells"))
            cfg.dictionary.stride_cells = as_int(*p, "/dictionary/stride_cells");
        if (auto* p = maybe(*dict, "max_elements"))
            cfg.dictionary.max_elements = as_int(*p, "/dictionary/max_elements");
    }

    if (auto* rec = maybe(root, "recover")) {
        if (!rec->is_object()) fail("/recover", "expected an object");
        check_keys(*rec, "/recover", {"order_m", "rho_cells", "cutoff_width_cells",
                                      "center_stride_cells", "report_margin_cells", "peeling",
                                      "fixed_point_sweeps", "runge_error_threshold", "plateau",
                                      "pass_threshold", "lambda_reg"});
        if (auto* p = maybe(*rec, "order_m")) cfg.recover_order_m = as_int(*p, "/recover/order_m");
        if (auto* p = maybe(*rec, "rho_cells")) cfg.rho_cells = as_int(*p, "/recover/rho_cells");
        if (auto* p = maybe(*rec, "cutoff_width_cells"))
            cfg.cutoff_width_cells = as_int(*p, "/recover/cutoff_width_cells");
        if (auto* p = maybe(*rec, "center_stride_cells"))
            cfg.center_stride_cells = as_int(*p, "/recover/center_stride_cells");
        if (auto* p = maybe(*rec, "report_margin_cells"))
            cfg.report_margin_cells = as_number(*p, "/recover/report_margin_cells");
        if (auto* p = maybe(*rec, "peeling")) cfg.peeling = as_bool(*p, "/recover/peeling");
        if (auto* p = maybe(*rec, "fixed_point_sweeps"))
            cfg.fixed_point_sweeps = as_int(*p, "/recover/fixed_point_sweeps");
        if (auto* p = maybe(*rec, "runge_error_threshold"))
            cfg.runge_error_threshold = as_number(*p, "/recover/runge_error_threshold");
        if (auto* p = maybe(*rec, "plateau")) {
            cfg.plateau = parse_region(*p, "/recover/plateau", cfg.dim);
            if (cfg.plateau.shape != "box") fail("/recover/plateau/shape", "plateau must be a box");
        }
        if (auto* p = maybe(*rec, "pass_threshold"))
            cfg.recover_pass_threshold = as_number(*p, "/recover/pass_threshold");
        if (auto* p = maybe(*rec, "lambda_reg")) cfg.runge_lambda_reg = as_number(*p, "/recover/lambda_reg");
    }

    if (auto* rs = maybe(root, "runge_study")) {
        if (!rs->is_object()) fail("/runge_study", "expected an object");
        check_keys(*rs, "/runge_study", {"target", "sizes", "lambda_reg", "pass_error"});
        if (auto* p = maybe(*rs, "target")) cfg.runge_target = parse_profile(*p, "/runge_study/target", cfg.dim);
        if (auto* p = maybe(*rs, "sizes")) {
            if (!p->is_array() || p->empty()) fail("/runge_study/sizes", "expected a nonempty array");
            cfg.runge_sizes.clear();
            for (std::size_t i = 0; i < p->size(); ++i)
                cfg.runge_sizes.push_back(as_int((*p)[i], "/runge_study/sizes[" + std::to_string(i) + "]"));
            for (std::size_t i = 0; i < cfg.runge_sizes.size(); ++i)
                if (cfg.runge_sizes[i] < 1 || (i > 0 && cfg.runge_sizes[i] <= cfg.runge_sizes[i - 1]))
                    fail("/runge_study/sizes", "must be positive and strictly increasing");
        }
        if (auto* p = maybe(*rs, "lambda_reg"))
            cfg.runge_study_lambda_reg = as_number(*p, "/runge_study/lambda_reg");
        if (auto* p = maybe(*rs, "pass_error")) cfg.runge_pass_error = as_number(*p, "/runge_study/pass_error");
    }

    if (auto* al = maybe(root, "alessandrini")) {
        if (!al->is_object()) fail("/alessandrini", "expected an object");
        check_keys(*al, "/alessandrini", {"cases", "tolerance"});
        if (auto* p = maybe(*al, "cases")) cfg.alessandrini_cases = as_int(*p, "/alessandrini/cases");
        if (auto* p = maybe(*al, "tolerance"))
            cfg.alessandrini_tolerance = as_number(*p, "/alessandrini/tolerance");
    }

    if (auto* fw = maybe(root, "forward")) {
        if (!fw->is_object()) fail("/forward", "expected an object");
        check_keys(*fw, "/forward", {"datum"});
        if (auto* p = maybe(*fw, "datum")) cfg.forward_datum = parse_profile(*p, "/forward/datum", cfg.dim);
    }

    if (auto* vf = maybe(root, "verify")) {
        if (!vf->is_object()) fail("/verify", "expected an object");
        check_keys(*vf, "/verify", {"suites", "samples"});
        if (auto* p = maybe(*vf, "suites")) {
            if (!p->is_array()) fail("/verify/suites", "expected an array");
            cfg.verify_suites.clear();
            for (std::size_t i = 0; i < p->size(); ++i)
                cfg.verify_suites.push_back(as_string((*p)[i], "/verify/suites[" + std::to_string(i) + "]"));
        }
        if (auto* p = maybe(*vf, "samples")) cfg.verify_samples = as_int(*p, "/verify/samples");
    }

    if (auto* p = maybe(root, "seed")) {
        if (!p->is_number_integer()) fail("/seed", "expected an integer");
        cfg.seed = p->get<unsigned long long>();
    }
    if (auto* p = maybe(root, "threads")) {
        cfg.threads = as_int(*p, "/threads");
        if (cfg.threads < 1) fail("/threads", "must be >= 1");
        cfg.solver.threads = cfg.threads;
    }

    if (auto* dbg = maybe(root, "debug")) {
        if (!dbg->is_object()) fail("/debug", "expected an object");
        check_keys(*dbg, "/debug", {"inject_adjoint_sign_error"});
        if (auto* p = maybe(*dbg, "inject_adjoint_sign_error"))
            cfg.inject_adjoint_sign_error = as_bool(*p, "/debug/inject_adjoint_sign_error");
    }

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error at /: cannot open file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json root;
    root["grid"] = {{"dim", cfg.dim}, {"points", cfg.points}, {"half_length", cfg.half_length}};
    root["s"] = cfg.s;
    root["lambda_shift"] = cfg.lambda_shift;
    root["domain"] = {{"omega", region_json(cfg.omega, cfg.dim)},
                      {"w1", region_json(cfg.w1, cfg.dim)},
                      {"w2", region_json(cfg.w2, cfg.dim)}};
    json coeffs = json::array();
    for (const auto& c : cfg.coefficients) {
        json entry = profile_json(c.profile, cfg.dim);
        entry["alpha"] = cfg.dim == 1 ? json::array({c.alpha.entries[0]})
                                      : json::array({c.alpha.entries[0], c.alpha.entries[1]});
        coeffs.push_back(entry);
    }
    root["coefficients"] = coeffs;
    root["solver"] = {{"method", cfg.solver.method == SolveMethod::dense ? "dense" : "iterative"},
                      {"tol_dense", cfg.solver.tol_dense},
                      {"tol_iterative", cfg.solver.tol_iterative},
                      {"max_iteration_factor", cfg.solver.max_iteration_factor},
                      {"condition_limit", cfg.solver.condition_limit}};
    root["dictionary"] = {{"radius_cells", cfg.dictionary.radius_cells},
                          {"stride_cells", cfg.dictionary.stride_cells},
                          {"max_elements", cfg.dictionary.max_elements}};
    json rec = {{"order_m", cfg.recover_order_m},
                {"rho_cells", cfg.rho_cells},
                {"cutoff_width_cells", cfg.cutoff_width_cells},
                {"center_stride_cells", cfg.center_stride_cells},
                {"report_margin_cells", cfg.report_margin_cells},
                {"peeling", cfg.peeling},
                {"fixed_point_sweeps", cfg.fixed_point_sweeps},
                {"runge_error_threshold", cfg.runge_error_threshold},
                {"pass_threshold", cfg.recover_pass_threshold},
                {"lambda_reg", cfg.runge_lambda_reg}};
    if (cfg.plateau.half_widths[0] > 0.0) rec["plateau"] = region_json(cfg.plateau, cfg.dim);
    root["recover"] = rec;
    root["runge_study"] = {{"target", profile_json(cfg.runge_target, cfg.dim)},
                           {"sizes", cfg.runge_sizes},
                           {"lambda_reg", cfg.runge_study_lambda_reg},
                           {"pass_error", cfg.runge_pass_error}};
    root["alessandrini"] = {{"cases", cfg.alessandrini_cases}, {"tolerance", cfg.alessandrini_tolerance}};
    root["forward"] = {{"datum", profile_json(cfg.forward_datum, cfg.dim)}};
    root["verify"] = {{"suites", cfg.verify_suites}, {"samples", cfg.verify_samples}};
    root["seed"] = cfg.seed;
    root["threads"] = cfg.threads;
    root["debug"] = {{"inject_adjoint_sign_error", cfg.inject_adjoint_sign_error}};
    return root.dump(2) + "\n";
}

Grid build_grid(const ExperimentConfig& cfg) { return Grid(cfg.dim, cfg.points, cfg.half_length); }

NodeSet build_region(const Grid& grid, const RegionSpec& spec, const std::string& label) {
    if (spec.shape == "ball") return make_ball_nodeset(grid, BallSpec{spec.center, spec.radius}, label);
    return make_box_nodeset(grid, BoxSpec{spec.center, spec.half_widths}, label);
}

DomainLayout build_layout(const ExperimentConfig& cfg, const Grid& grid) {
    return DomainLayout::create(build_region(grid, cfg.omega, "omega"),
                                build_region(grid, cfg.w1, "w1"),
                                build_region(grid, cfg.w2, "w2"));
}

GridFunction profile_field(const Grid& grid, const ProfileSpec& spec) {
    if (!(spec.radius > 0.0))
        throw ConfigError("config error at /: profile radius must be positive");
    GridFunction f(grid);
    const double r2 = spec.radius * spec.radius;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double t2 = grid.periodic_dist2(grid.node_coords(i), spec.center) / r2;
        if (t2 < 1.0) f[i] = spec.amplitude * std::exp(1.0 - 1.0 / (1.0 - t2));
    }
    return f;
}

PDOCoefficients build_coefficients(const ExperimentConfig& cfg, const Grid& grid) {
    PDOCoefficients coeffs(cfg.dim);
    for (const auto& c : cfg.coefficients) coeffs.set(c.alpha, profile_field(grid, c.profile));
    if (cfg.inject_adjoint_sign_error) coeffs.debug_flip_adjoint_sign(true);
    return coeffs;
}

ForwardProblem build_problem(const ExperimentConfig& cfg, const Grid& grid, const NodeSet& omega) {
    return ForwardProblem(grid, cfg.s, build_coefficients(cfg, grid), omega, cfg.lambda_shift);
}

ForwardProblem build_reference_problem(const ExperimentConfig& cfg, const Grid& grid,
                                       const NodeSet& omega) {
    return ForwardProblem(grid, cfg.s, PDOCoefficients(cfg.dim), omega, cfg.lambda_shift);
}

RecoverConfig build_recover_config(const ExperimentConfig& cfg, const Grid& grid) {
    RecoverConfig rc;
    rc.order_m = cfg.recover_order_m;
    rc.rho = cfg.rho_cells * grid.spacing();
    rc.cutoff_width = cfg.cutoff_width_cells * grid.spacing();
    rc.center_stride_cells = cfg.center_stride_cells;
    rc.report_margin = cfg.report_margin_cells >= 0.0 ? cfg.report_margin_cells * grid.spacing() : -1.0;
    rc.peeling = cfg.peeling;
    rc.fixed_point_sweeps = cfg.fixed_point_sweeps;
    rc.runge_error_threshold = cfg.runge_error_threshold;
    rc.plateau = BoxSpec{cfg.plateau.center, cfg.plateau.half_widths};
    rc.runge.lambda_reg = cfg.runge_lambda_reg;
    return rc;
}

} // namespace fraclab
