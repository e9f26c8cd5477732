#include "wlab/commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "wlab/dimension.hpp"
#include "wlab/fibres.hpp"
#include "wlab/transversality.hpp"
#include "wlab/verify.hpp"
#include "wlab/weierstrass.hpp"

namespace wlab {

namespace fs = std::filesystem;

namespace {

struct Context {
    const RunConfig& config;
    const System& sys;
    fs::path out;
    const CommandInputs& inputs;
    CommandResult& result;

    std::uint64_t seed(const char* op) const { return derive_seed(config.compute.seed, op); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream os(out / name, std::ios::binary);
        os << text;
        if (!os) throw std::runtime_error(fmt::format("cannot write '{}'", (out / name).string()));
        result.files.push_back(name);
    }

    template <class Writer>
    void csv(const std::string& name, Writer&& w) const {
        if (!config.output.csv) return;
        std::ostringstream os;
        w(os);
        write(name, os.str());
    }
};

Json analytic(double value, const char* formula) { return Json{{"value", value}, {"formula", formula}}; }
Json empirical(double value, double se) { return Json{{"value", value}, {"stderr", se}}; }

Json plan_json(const TruncationPlan& p) { return Json{{"depth", p.depth}, {"tail_bound", p.tail_bound}}; }

Json fit_json(const LinearFit& f) {
    return Json{{"slope", f.slope}, {"stderr", f.stderr_slope}, {"intercept", f.intercept}, {"points", f.points}};
}

Json measure_json(const RunConfig& c, const BernoulliMeasure& m) {
    static const char* names[] = {"equilibrium", "critical", "uniform", "bernoulli"};
    return Json{{"kind", names[static_cast<int>(c.measure.kind)]}, {"p", m.p()}};
}

Json bowen_json(const BowenSolution& b) {
    return Json{{"s_star", b.s_star},         {"residual", b.residual}, {"iterations", b.iterations},
                {"bracket", {b.bracket_lo, b.bracket_hi}}, {"p_star", b.p_star}, {"formula", "bowen-root"}};
}

Json prediction_json(const DimPrediction& d) {
    return Json{{"entropy", analytic(d.entropy, "bernoulli-entropy")},
                {"log_tau_prime", analytic(d.log_tau_prime, "lyapunov-tau")},
                {"log_lambda", analytic(d.log_lambda, "lyapunov-lambda")},
                {"first", analytic(d.first, "ledrappier-young-first")},
                {"second", analytic(d.second, "ledrappier-young-second")},
                {"dim_mu", analytic(d.dim_mu, "ledrappier-young-min")},
                {"argmin", d.argmin},
                {"at_least_one", d.at_least_one},
                {"graph_dim", analytic(d.graph_dim, "bowen-root")}};
}

Json box_json(const BoxCountResult& b, std::size_t points, int k0, int k1) {
    return Json{{"dimension", empirical(b.fit.slope, b.fit.stderr_slope)},
                {"fit", fit_json(b.fit)},
                {"scales", {k0, k1}},
                {"window", {b.exponents.at(b.window_first), b.exponents.at(b.window_last)}},
                {"graph_points", points},
                {"envelope_pad", b.envelope_pad},
                {"envelope_exponent", b.envelope_exponent},
                {"min_points_per_column", b.min_points_per_column},
                {"undersampled", b.undersampled},
                {"warning", b.warning}};
}

Json corr_json(const CorrDimEstimate& c) {
    return Json{{"dimension", empirical(c.degenerate ? 0.0 : c.fit.slope, c.degenerate ? 0.0 : c.fit.stderr_slope)},
                {"degenerate", c.degenerate},
                {"n", c.n},
                {"window", {c.radii.empty() ? 0.0 : c.radii.at(c.window_first),
                            c.radii.empty() ? 0.0 : c.radii.at(c.window_last)}}};
}

bool analytic_checks_apply(const System& sys) {
    const auto& s = sys.spec();
    return s.g_kind == DisplacementKind::cosine && s.lambda_kind == LambdaKind::tau_power;
}

Json example2_json(const Example2Check& e) {
    return Json{{"cond1_margins", e.cond1_margins},
                {"cond1_min_margin", analytic(e.cond1_min_margin, "example2-condition-1")},
                {"cond1", e.cond1},
                {"g_first", analytic(e.g_first, "G-penalty")},
                {"g_second", analytic(e.g_second, "G-penalty")},
                {"cond2_sum", analytic(e.cond2_sum, "example2-condition-2")},
                {"delta0", analytic(e.delta0, "delta0-endpoints")},
                {"cond2_margin", e.cond2_margin},
                {"cond2", e.cond2},
                {"certified", e.certified},
                {"claimed_dim", e.claimed_dim}};
}

Json cosine_json(const CosineLemmaCheck& c) {
    return Json{{"g_gamma", analytic(c.g_gamma, "G-penalty")},
                {"g_gamma_over_tau", analytic(c.g_gamma_over_tau, "G-penalty")},
                {"sum", c.sum},
                {"delta0", analytic(c.delta0, "delta0-endpoints")},
                {"holds", c.holds}};
}

Json transversality_json(const System& sys, const ScanResult& scan) {
    const Delta0 d = delta0_compute(sys);
    const Delta0 dg = delta0_grid(sys, 1000);
    Json j{{"delta0", {{"value", d.value}, {"i", d.i}, {"j", d.j}, {"x", d.x}, {"formula", "delta0-endpoints"}}},
           {"delta0_grid", {{"value", dg.value}, {"grid", 1000}}},
           {"beta", analytic(beta_constant(sys), "beta-constant")},
           {"scan", {{"margin", scan.margin}, {"xi", scan.xi}, {"eta", scan.eta}, {"x", scan.x},
                     {"evaluated", scan.evaluated}}}};
    if (analytic_checks_apply(sys)) {
        j["example2"] = sys.spec().scale_t == 1.0 ? example2_json(thm_example2_check(sys)) : Json(nullptr);
        j["cosine_lemma"] = cosine_json(cosine_lemma_check(sys));
    } else {
        j["example2"] = nullptr;
        j["cosine_lemma"] = nullptr;
    }
    return j;
}

Json verdict_json(const Verdict& v) {
    return Json{{"certified", v.certified},
                {"by", v.by.empty() ? Json(nullptr) : Json(v.by)},
                {"claimed_dim", v.certified ? Json(v.claimed_dim) : Json(nullptr)}};
}

ScanOptions scan_options(const RunConfig& c) {
    ScanOptions o;
    o.n_xi = o.n_eta = c.compute.scan_xi;
    o.n_x = c.compute.scan_x;
    return o;
}

GraphSample graph(const Context& ctx) {
    return sample_graph_grid(ctx.sys, ctx.config.compute.graph_points, truncation_depth(ctx.sys, ctx.config.compute.tol));
}

void cmd_validate(const Context& ctx, Json& j) {
    const System& s = ctx.sys;
    std::vector<double> lambda, gamma, tau_prime;
    for (int i = 0; i < s.cells(); ++i) {
        lambda.push_back(s.lambda(i));
        gamma.push_back(s.gamma(i));
        tau_prime.push_back(1.0 / s.length(i));
    }
    j["valid"] = true;
    j["violations"] = Json::array();
    j["system"] = Json{{"cells", s.cells()},     {"breakpoints", s.spec().breakpoints},
                       {"lambda", lambda},       {"gamma", gamma},
                       {"tau_prime", tau_prime}, {"g_sup_norm", s.g_sup_norm()},
                       {"g_prime_sup_norm", s.g_prime_sup_norm()}};
}

void cmd_eval(const Context& ctx, Json& j) {
    std::vector<double> xs = ctx.inputs.eval_x;
    if (xs.empty())
        for (int k = 0; k <= 10; ++k) xs.push_back(k / 10.0);
    for (double x : xs)
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(fmt::format("eval point {} outside [0, 1]", x));
    const GraphSample g = sample_graph(ctx.sys, xs, truncation_depth(ctx.sys, ctx.config.compute.tol));
    j["plan"] = plan_json(g.plan);
    Json pts = Json::array();
    for (const auto& p : g.points) pts.push_back(Json{{"x", p.x}, {"w", p.w}});
    j["points"] = pts;
    ctx.csv("eval.csv", [&](std::ostream& os) { write_csv(os, g); });
}

void cmd_sample_graph(const Context& ctx, Json& j) {
    const GraphSample g = sample_graph_grid(ctx.sys, ctx.config.compute.samples,
                                            truncation_depth(ctx.sys, ctx.config.compute.tol));
    double lo = g.points.front().w, hi = lo;
    for (const auto& p : g.points) {
        lo = std::min(lo, p.w);
        hi = std::max(hi, p.w);
    }
    j["plan"] = plan_json(g.plan);
    j["points"] = g.points.size();
    j["w_min"] = lo;
    j["w_max"] = hi;
    ctx.csv("graph.csv", [&](std::ostream& os) { write_csv(os, g); });
}

void cmd_bowen(const Context& ctx, Json& j) { j["bowen"] = bowen_json(bowen_solve(ctx.sys)); }

void cmd_dims(const Context& ctx, Json& j) {
    const BernoulliMeasure m = resolve_measure(ctx.config, ctx.sys);
    PointwiseOptions po;
    po.anchors = ctx.config.compute.anchors;
    po.references = ctx.config.compute.samples;
    po.tol = ctx.config.compute.tol;
    const PointwiseDimResult pw = pointwise_dim_mu(ctx.sys, m, ctx.seed("dims.pointwise"), po);
    j["measure"] = measure_json(ctx.config, m);
    j["prediction"] = prediction_json(formula_dims(m, ctx.sys));
    j["pointwise"] = Json{{"dimension", empirical(pw.mean, pw.mean_stderr)},
                          {"median", pw.median},
                          {"iqr", pw.iqr},
                          {"anchors", pw.anchors},
                          {"usable_anchors", pw.slopes.size()},
                          {"references", pw.references},
                          {"radii", pw.radii}};
    ctx.csv("pointwise.csv", [&](std::ostream& os) {
        os << "anchor,slope\n";
        for (std::size_t k = 0; k < pw.slopes.size(); ++k) os << fmt::format("{},{:.17g}\n", k, pw.slopes[k]);
    });
}

void cmd_boxdim(const Context& ctx, Json& j) {
    const auto& c = ctx.config.compute;
    const GraphSample g = graph(ctx);
    const BoxCountResult b = box_count_graph(g, c.scale_min, c.scale_max);
    j["box_count"] = box_json(b, g.points.size(), c.scale_min, c.scale_max);
    ctx.csv("box.csv", [&](std::ostream& os) { write_box_csv(os, b); });
}

void cmd_theta(const Context& ctx, Json& j) {
    const auto& c = ctx.config.compute;
    const BernoulliMeasure m = resolve_measure(ctx.config, ctx.sys);
    const ThetaField tf = theta_field(ctx.sys, c.theta_tol);
    std::vector<double> v = theta_distribution(ctx.sys, m, c.theta_x, c.samples, ctx.seed("theta"), tf.depth);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    j["x"] = c.theta_x;
    j["depth"] = tf.depth;
    j["tail_bound"] = tf.tail_bound;
    j["samples"] = v.size();
    j["theta_min"] = *lo;
    j["theta_max"] = *hi;
    j["sup_bound"] = analytic(ctx.sys.g_prime_sup_norm() * ctx.sys.gamma_max() / (1.0 - ctx.sys.gamma_max()),
                              "theta-sup-bound");
    ctx.csv("theta.csv", [&](std::ostream& os) {
        os << "sample,x,theta\n";
        for (std::size_t k = 0; k < v.size(); ++k) os << fmt::format("{},{:.17g},{:.17g}\n", k, c.theta_x, v[k]);
    });
    const CorrDimEstimate cd = correlation_dim(std::move(v));
    j["corr_dim"] = corr_json(cd);
    ctx.csv("theta_corr.csv", [&](std::ostream& os) { write_corr_csv(os, cd); });
}

void cmd_transversality(const Context& ctx, Json& j) {
    j["transversality"] = transversality_json(ctx.sys, eps_delta_scan_all(ctx.sys, scan_options(ctx.config)));
}

void cmd_tsujii(const Context& ctx, Json& j) {
    const auto& c = ctx.config.compute;
    const ScanResult scan = eps_delta_scan_all(ctx.sys, scan_options(ctx.config));
    if (!(scan.margin > 0.0))
        throw std::domain_error(fmt::format("transversality.no_margin: scan margin {} is not positive", scan.margin));
    const RecursionCheck r = beta_and_recursion_check(ctx.sys, scan.margin, c.tsujii_levels, ctx.seed("tsujii"));
    const BernoulliMeasure m = resolve_measure(ctx.config, ctx.sys);
    const KsResult ks = selfsimilarity_check(ctx.sys, m, c.theta_x, c.ks_samples, ctx.seed("tsujii.ks"));
    Json levels = Json::array();
    for (std::size_t k = 0; k < r.integrals.radii.size(); ++k) {
        levels.push_back(Json{{"r", r.integrals.radii[k]},
                              {"I", empirical(r.integrals.values[k], r.integrals.stderr_values[k])},
                              {"hits", r.integrals.hits[k]},
                              {"starved", static_cast<bool>(r.integrals.starved[k])},
                              {"slack", k == 0 ? Json(nullptr) : Json(r.slack[k - 1])},
                              {"sigma", k == 0 ? Json(nullptr) : Json(r.sigma[k - 1])},
                              {"bound", r.bound[k]}});
    }
    j["recursion"] = Json{{"beta", analytic(r.beta, "beta-constant")},
                          {"eps", r.eps},
                          {"delta", r.delta},
                          {"alpha", r.alpha},
                          {"constant", analytic(r.constant, "recursion-constant")},
                          {"holds", r.holds},
                          {"levels", levels}};
    j["selfsimilarity"] = Json{{"x", c.theta_x}, {"distance", ks.distance}, {"critical", ks.critical},
                               {"pass", ks.pass}, {"n", ks.n}};
    ctx.csv("tsujii.csv", [&](std::ostream& os) {
        os << "r,I,stderr,hits,bound\n";
        for (std::size_t k = 0; k < r.integrals.radii.size(); ++k)
            os << fmt::format("{:.17g},{:.17g},{:.17g},{},{:.17g}\n", r.integrals.radii[k], r.integrals.values[k],
                              r.integrals.stderr_values[k], r.integrals.hits[k], r.bound[k]);
    });
}

void cmd_sweep(const Context& ctx, Json& j) {
    const auto& c = ctx.config.compute;
    SweepOptions o;
    o.graph_points = c.graph_points;
    o.k0 = c.scale_min;
    o.k1 = c.scale_max;
    o.theta_samples = c.samples;
    o.tol = c.tol;
    const auto rows = example_sweep(c.sweep.family, sweep_values(c.sweep), ctx.seed("sweep"), o);
    Json arr = Json::array();
    for (const auto& r : rows)
        arr.push_back(Json{{"t", r.t},
                           {"s_bowen", analytic(r.s_bowen, "bowen-root")},
                           {"boxdim", empirical(r.boxdim, r.boxdim_err)},
                           {"corrdim", r.corrdim}});
    j["t_range"] = {sweep_t_min(c.sweep.family), sweep_t_max(c.sweep.family)};
    j["rows"] = arr;
    ctx.csv("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, rows); });
}

void cmd_verify(const Context& ctx, Json& j) {
    const auto checks = run_verify_suite(ctx.config.compute.seed);
    Json arr = Json::array();
    std::size_t failed = 0;
    for (const auto& c : checks) {
        failed += c.pass ? 0 : 1;
        arr.push_back(Json{{"module", c.module}, {"name", c.name}, {"pass", c.pass}, {"value", c.value},
                           {"threshold", c.threshold}, {"detail", c.detail}});
    }
    j["checks"] = arr;
    j["passed"] = checks.size() - failed;
    j["failed"] = failed;
    if (failed > 0) ctx.result.exit_code = exit_numerical;
}

void cmd_report(const Context& ctx, Json& j) {
    const auto& c = ctx.config.compute;
    const BowenSolution b = bowen_solve(ctx.sys);
    const BernoulliMeasure m = resolve_measure(ctx.config, ctx.sys);
    j["bowen"] = bowen_json(b);
    j["measure"] = measure_json(ctx.config, m);
    j["prediction"] = prediction_json(formula_dims(m, ctx.sys));
    j["transversality"] = transversality_json(ctx.sys, eps_delta_scan_all(ctx.sys, scan_options(ctx.config)));
    j["verdict"] = verdict_json(certification_verdict(ctx.sys));

    const GraphSample g = graph(ctx);
    const BoxCountResult box = box_count_graph(g, c.scale_min, c.scale_max);
    j["box_count"] = box_json(box, g.points.size(), c.scale_min, c.scale_max);
    ctx.csv("box.csv", [&](std::ostream& os) { write_box_csv(os, box); });

    const ThetaField tf = theta_field(ctx.sys, c.theta_tol);
    const CorrDimEstimate cd =
        correlation_dim(theta_distribution(ctx.sys, m, c.theta_x, c.samples, ctx.seed("theta"), tf.depth));
    j["theta_corr_dim"] = corr_json(cd);
    ctx.csv("theta_corr.csv", [&](std::ostream& os) { write_corr_csv(os, cd); });
}

using Handler = std::function<void(const Context&, Json&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h{
        {"validate", cmd_validate}, {"eval", cmd_eval},     {"sample-graph", cmd_sample_graph},
        {"bowen", cmd_bowen},       {"dims", cmd_dims},     {"boxdim", cmd_boxdim},
        {"theta", cmd_theta},       {"transversality", cmd_transversality},
        {"tsujii", cmd_tsujii},     {"sweep", cmd_sweep},   {"verify", cmd_verify},
        {"report", cmd_report}};
    return h;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"validate", "eval",           "sample-graph", "bowen",
                                                "dims",     "boxdim",         "theta",        "transversality",
                                                "tsujii",   "sweep",          "verify",       "report"};
    return names;
}

Json document_header(const std::string& kind, const RunConfig* config) {
    Json j{{"schema_version", schema_version}, {"kind", kind}};
    Json prov{{"version", wlab_version}};
    if (config) {
        RunConfig hashed = *config;
        hashed.output.dir.clear();  // neither where results go nor the worker count changes them
        hashed.compute.threads = 0;
        prov["config_hash"] = fmt::format("{:016x}", fnv1a(echo_config(hashed)));
        prov["seed"] = config->compute.seed;
    } else {
        prov["config_hash"] = nullptr;
        prov["seed"] = nullptr;
    }
    j["provenance"] = prov;
    return j;
}

Json invalid_system_document(const std::vector<Violation>& violations) {
    Json j = document_header("validate", nullptr);
    Json arr = Json::array();
    for (const auto& v : violations)
        arr.push_back(Json{{"code", "system." + v.code}, {"message", v.message}, {"interval", v.interval}});
    j["valid"] = false;
    j["violations"] = arr;
    return j;
}

Json error_document(const std::string& code, const std::string& message) {
    Json j = document_header("error", nullptr);
    j["code"] = code;
    j["message"] = message;
    return j;
}

Verdict certification_verdict(const System& sys) {
    Verdict v;
    if (!analytic_checks_apply(sys)) return v;
    if (sys.spec().scale_t == 1.0 && thm_example2_check(sys).certified) {
        v.certified = true;
        v.by = "example2-conditions";
    } else if (cosine_lemma_check(sys).holds) {
        v.certified = true;
        v.by = "cosine-transversality";
    }
    if (v.certified) v.claimed_dim = bowen_solve(sys).s_star;
    return v;
}

CommandResult run_command(const std::string& name, const RunConfig& config, const fs::path& out,
                          const CommandInputs& inputs) {
    CommandResult result;
    const auto it = handlers().find(name);
    if (it == handlers().end()) {
        result.exit_code = exit_invalid;
        result.summary = error_document("cli.unknown_command", fmt::format("unknown subcommand '{}'", name));
        return result;
    }
    fs::create_directories(out);
    const System sys(config.system);
    Context ctx{config, sys, out, inputs, result};
    Json j = document_header(name, &config);
    try {
        it->second(ctx, j);
    } catch (const BracketFailure& e) {
        result.exit_code = exit_numerical;
        j = error_document("dimension.bracket_failure", e.what());
    } catch (const FibreFailure& e) {
        result.exit_code = exit_numerical;
        j = error_document("fibres.fibre_failure", e.what());
    } catch (const InvalidSystem& e) {
        result.exit_code = exit_invalid;
        j = invalid_system_document(e.violations());
    } catch (const std::invalid_argument& e) {
        result.exit_code = exit_invalid;
        j = error_document(name + ".invalid_argument", e.what());
    } catch (const std::exception& e) {
        result.exit_code = exit_numerical;
        j = error_document(name + ".numerical", e.what());
    }
    result.summary = j;
    ctx.write("config.yaml", echo_config(config));
    ctx.write("schema.json", dump(output_schema()));
    ctx.write(name + ".json", dump(j));
    return result;
}

Json output_schema() {
    const Json num = Json{{"type", Json::array({"number", "null"})}};
    const Json tagged{{"type", "object"},
                      {"required", {"value", "formula"}},
                      {"properties", {{"value", num}, {"formula", {{"type", "string"}}}}}};
    const Json measured{{"type", "object"},
                        {"required", {"value", "stderr"}},
                        {"properties", {{"value", num}, {"stderr", num}}}};
    Json s{{"$schema", "http://json-schema.org/draft-07/schema#"},
           {"title", "wlab summary document"},
           {"type", "object"},
           {"definitions", {{"analytic", tagged}, {"empirical", measured}}},
           {"required", {"schema_version", "kind", "provenance"}}};
    Json kinds = command_names();
    kinds.push_back("error");
    s["properties"] = Json{
        {"schema_version", {{"const", schema_version}}},
        {"kind", {{"enum", kinds}}},
        {"provenance",
         {{"type", "object"},
          {"required", {"version", "config_hash", "seed"}},
          {"properties",
           {{"version", {{"type", "string"}}},
            {"config_hash", {{"type", Json::array({"string", "null"})}, {"pattern", "^[0-9a-f]{16}$"}}},
            {"seed", {{"type", Json::array({"integer", "null"})}}}}}}}};

    const auto ref = [](const char* d) { return Json{{"$ref", std::string("#/definitions/") + d}}; };
    const auto obj = [](std::initializer_list<const char*> req, Json props = Json::object()) {
        Json r = Json::array();
        for (const char* k : req) r.push_back(k);
        return Json{{"type", "object"}, {"required", r}, {"properties", props}};
    };
    const Json bowen = obj({"s_star", "residual", "p_star", "formula"},
                           {{"s_star", {{"type", "number"}}}, {"p_star", {{"type", "array"}}}});
    const Json prediction = obj({"entropy", "first", "second", "dim_mu", "graph_dim"},
                                {{"entropy", ref("analytic")},
                                 {"first", ref("analytic")},
                                 {"second", ref("analytic")},
                                 {"dim_mu", ref("analytic")},
                                 {"graph_dim", ref("analytic")}});
    const Json box = obj({"dimension", "fit", "scales"}, {{"dimension", ref("empirical")}});
    const Json corr = obj({"dimension", "degenerate"}, {{"dimension", ref("empirical")}});
    const Json trans = obj({"delta0", "beta", "scan", "example2", "cosine_lemma"}, {{"beta", ref("analytic")}});

    const std::map<std::string, Json> per_kind{
        {"validate", obj({"valid", "violations"})},
        {"eval", obj({"plan", "points"})},
        {"sample-graph", obj({"plan", "points", "w_min", "w_max"})},
        {"bowen", obj({"bowen"}, {{"bowen", bowen}})},
        {"dims", obj({"measure", "prediction", "pointwise"},
                     {{"prediction", prediction}, {"pointwise", obj({"dimension"}, {{"dimension", ref("empirical")}})}})},
        {"boxdim", obj({"box_count"}, {{"box_count", box}})},
        {"theta", obj({"x", "depth", "samples", "corr_dim"}, {{"corr_dim", corr}})},
        {"transversality", obj({"transversality"}, {{"transversality", trans}})},
        {"tsujii", obj({"recursion", "selfsimilarity"})},
        {"sweep", obj({"t_range", "rows"})},
        {"verify", obj({"checks", "passed", "failed"})},
        {"report", obj({"bowen", "measure", "prediction", "transversality", "verdict", "box_count", "theta_corr_dim"},
                       {{"bowen", bowen},
                        {"prediction", prediction},
                        {"transversality", trans},
                        {"verdict", obj({"certified", "by", "claimed_dim"})},
                        {"box_count", box},
                        {"theta_corr_dim", corr}})},
        {"error", obj({"code", "message"})}};
    Json all = Json::array();
    for (const auto& [kind, body] : per_kind)
        all.push_back(Json{{"if", {{"properties", {{"kind", {{"const", kind}}}}}}}, {"then", body}});
    s["allOf"] = all;
    return s;
}

}  // namespace wlab
