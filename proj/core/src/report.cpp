#include "pmhd/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pmhd/format.hpp"

namespace pmhd {

using json = nlohmann::ordered_json;

namespace {

// JSON has no inf/nan literals; represent them as strings.
json num(double v) {
    if (std::isfinite(v)) return v;
    return fmt_double(v);
}

json fit_to_json(const FitResult& f) {
    return {{"slope", num(f.slope)},     {"intercept", num(f.intercept)},
            {"c_fit", num(f.c_fit)},     {"residual", num(f.residual)},
            {"points_used", f.points_used}, {"exact_regime", f.exact_regime},
            {"flag", f.flag}};
}

json hyp_to_json(const HypothesisReport& h) {
    return {{"b_min", num(h.b_min)},           {"b_sup", num(h.b_sup)},
            {"grad_b_sup", num(h.grad_b_sup)}, {"hess_b_sup", num(h.hess_b_sup)},
            {"u0_sup", num(h.u0_sup)},         {"grad_u0_sup", num(h.grad_u0_sup)},
            {"t_star", num(h.t_star)}};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string frame_name(Frame f) { return f == Frame::lagrangian ? "lagrangian" : "eulerian"; }
std::string variant_name(RhoVariant v) {
    return v == RhoVariant::theorem_form ? "theorem_form" : "prop_form";
}
std::string sign_name(RhoSign s) { return s == RhoSign::paper ? "paper" : "flipped"; }

}  // namespace

std::string report_to_json(const SweepReport& r) {
    json j;
    j["meta"] = {{"workers", r.workers},
                 {"total_trajectories", r.total_trajectories},
                 {"total_steps", r.total_steps},
                 {"no_data", r.no_data},
                 {"overall_pass", r.overall_pass},
                 {"empirical_eps_T", num(r.empirical_eps_T)}};
    j["hypotheses"] = {{"grid", hyp_to_json(r.hyp_grid)},
                       {"envelope", hyp_to_json(r.envelope)},
                       {"t_star", num(r.t_star)}};
    j["eps_list"] = json::array();
    for (double e : r.eps_list) j["eps_list"].push_back(num(e));

    j["claims"] = json::array();
    for (const ClaimTable& c : r.claims) {
        json errs = json::array();
        for (double v : c.errors) errs.push_back(num(v));
        j["claims"].push_back({{"name", c.name},
                               {"errors", errs},
                               {"fit", fit_to_json(c.fit)},
                               {"window", json::array({c.window_lo, c.window_hi})},
                               {"pass", c.pass},
                               {"note", c.note}});
    }

    j["bounds"] = json::array();
    for (const BoundCheck& b : r.bounds)
        j["bounds"].push_back({{"name", b.name},
                               {"eps", num(b.eps)},
                               {"measured", num(b.measured)},
                               {"bound", num(b.bound)},
                               {"margin", num(b.margin)},
                               {"pass", b.pass}});

    j["density"] = json::array();
    for (const DensityAdjudication& d : r.density) {
        json combos = json::array();
        for (const DensityCombo& c : d.combos) {
            json errs = json::array();
            for (double v : c.errors) errs.push_back(num(v));
            combos.push_back({{"variant", variant_name(c.variant)},
                              {"sign", sign_name(c.sign)},
                              {"errors", errs},
                              {"fit", fit_to_json(c.fit)}});
        }
        json winner;
        if (d.winner >= 0)
            winner = {{"variant", variant_name(d.combos[d.winner].variant)},
                      {"sign", sign_name(d.combos[d.winner].sign)}};
        j["density"].push_back({{"frame", frame_name(d.frame)},
                                {"horizon", num(d.horizon)},
                                {"combos", combos},
                                {"winner", winner},
                                {"winner_pass", d.winner_pass},
                                {"loser_floor", num(d.loser_floor)},
                                {"loser_flatness", num(d.loser_flatness)},
                                {"direct_vs_conservative", num(d.direct_vs_conservative)}});
    }

    j["inversion"] = json::array();
    for (const InversionCheck& ic : r.inversion)
        j["inversion"].push_back({{"label", ic.label},
                                  {"t", num(ic.t)},
                                  {"eps", num(ic.eps)},
                                  {"nodes", ic.nodes},
                                  {"converged", ic.converged},
                                  {"max_newton_iters", ic.max_newton_iters},
                                  {"max_preimage_disp_over_eps",
                                   num(ic.max_preimage_disp_over_eps)},
                                  {"pass", ic.pass}});

    if (r.caustic) {
        const CausticSection& c = *r.caustic;
        j["caustic"] = {{"eps", num(c.eps)},
                        {"t_numeric", c.t_numeric ? json(num(*c.t_numeric)) : json()},
                        {"t_predicted", c.t_predicted ? json(num(*c.t_predicted)) : json()},
                        {"argmin_seed", json::array({num(c.argmin_seed.x), num(c.argmin_seed.y)})},
                        {"min_jacobian", num(c.min_jacobian)},
                        {"rel_error", num(c.rel_error)},
                        {"pass", c.pass}};
    }

    j["config"] = json::parse(r.config_echo.empty() ? "{}" : r.config_echo);
    return j.dump(2) + "\n";
}

namespace {

std::string csv_errors(const SweepReport& r) {
    std::ostringstream out;
    out << "claim,eps,linf_error\n";
    for (const ClaimTable& c : r.claims)
        for (size_t e = 0; e < c.errors.size(); ++e)
            out << c.name << ',' << fmt_double(r.eps_list[e]) << ',' << fmt_double(c.errors[e])
                << '\n';
    return out.str();
}

std::string csv_slopes(const SweepReport& r) {
    std::ostringstream out;
    out << "claim,slope,c_fit,residual,points_used,flag,window_lo,window_hi,pass\n";
    for (const ClaimTable& c : r.claims)
        out << c.name << ',' << fmt_double(c.fit.slope) << ',' << fmt_double(c.fit.c_fit) << ','
            << fmt_double(c.fit.residual) << ',' << c.fit.points_used << ',' << c.fit.flag << ','
            << fmt_double(c.window_lo) << ',' << fmt_double(c.window_hi) << ','
            << (c.pass ? "1" : "0") << '\n';
    return out.str();
}

std::string csv_bounds(const SweepReport& r) {
    std::ostringstream out;
    out << "bound,eps,measured,bound_value,margin,pass\n";
    for (const BoundCheck& b : r.bounds)
        out << b.name << ',' << fmt_double(b.eps) << ',' << fmt_double(b.measured) << ','
            << fmt_double(b.bound) << ',' << fmt_double(b.margin) << ',' << (b.pass ? "1" : "0")
            << '\n';
    return out.str();
}

std::string csv_density(const SweepReport& r) {
    std::ostringstream out;
    out << "frame,variant,sign,eps,linf_error,winner\n";
    for (const DensityAdjudication& d : r.density)
        for (size_t c = 0; c < d.combos.size(); ++c)
            for (size_t e = 0; e < d.combos[c].errors.size(); ++e)
                out << frame_name(d.frame) << ',' << variant_name(d.combos[c].variant) << ','
                    << sign_name(d.combos[c].sign) << ',' << fmt_double(r.eps_list[e]) << ','
                    << fmt_double(d.combos[c].errors[e]) << ','
                    << (static_cast<int>(c) == d.winner ? "1" : "0") << '\n';
    return out.str();
}

std::string csv_inversion(const SweepReport& r) {
    std::ostringstream out;
    out << "label,t,eps,nodes,converged,max_newton_iters,max_preimage_disp_over_eps,pass\n";
    for (const InversionCheck& ic : r.inversion)
        out << ic.label << ',' << fmt_double(ic.t) << ',' << fmt_double(ic.eps) << ',' << ic.nodes
            << ',' << ic.converged << ',' << ic.max_newton_iters << ','
            << fmt_double(ic.max_preimage_disp_over_eps) << ',' << (ic.pass ? "1" : "0") << '\n';
    return out.str();
}

}  // namespace

std::string summary_from_json(const std::string& report_json) {
    json j = json::parse(report_json);
    std::ostringstream md;
    auto n2s = [](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_null()) return "-";
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
        return fmt_double(v.get<double>());
    };

    md << "# Sweep summary\n\n";
    const json& meta = j.at("meta");
    if (meta.value("no_data", false)) md << "**no data** (empty seed set or eps list)\n\n";
    md << "overall: " << (meta.value("overall_pass", false) ? "PASS" : "FAIL") << "\n\n";
    md << "- workers: " << n2s(meta.at("workers")) << "\n";
    md << "- trajectories: " << n2s(meta.at("total_trajectories"))
       << ", steps: " << n2s(meta.at("total_steps")) << "\n";
    md << "- empirical eps_T (largest eps with all per-eps checks passing): "
       << n2s(meta.at("empirical_eps_T")) << "\n";
    md << "- t_star: " << n2s(j.at("hypotheses").at("t_star")) << "\n\n";

    md << "## Claims\n\n";
    md << "| claim | slope | C_fit | window | flag | pass |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const json& c : j.at("claims")) {
        const json& f = c.at("fit");
        std::string flag = f.value("flag", "");
        md << "| " << c.at("name").get<std::string>() << " | " << n2s(f.at("slope")) << " | "
           << n2s(f.at("c_fit")) << " | [" << n2s(c.at("window")[0]) << ", "
           << n2s(c.at("window")[1]) << "] | " << (flag.empty() ? "-" : flag) << " | "
           << (c.at("pass").get<bool>() ? "PASS" : "FAIL") << " |\n";
        std::string note = c.value("note", "");
        if (!note.empty()) md << "|  | " << note << " | | | | |\n";
    }

    md << "\n## A priori bounds (worst margin per eps)\n\n";
    md << "| bound | eps | measured | bound | margin | pass |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const json& b : j.at("bounds"))
        md << "| " << b.at("name").get<std::string>() << " | " << n2s(b.at("eps")) << " | "
           << n2s(b.at("measured")) << " | " << n2s(b.at("bound")) << " | " << n2s(b.at("margin"))
           << " | " << (b.at("pass").get<bool>() ? "PASS" : "FAIL") << " |\n";

    md << "\n## Density adjudication\n\n";
    for (const json& d : j.at("density")) {
        md << "- frame **" << d.at("frame").get<std::string>() << "** (horizon "
           << n2s(d.at("horizon")) << "): ";
        if (d.at("winner").is_null() || d.at("winner").empty()) {
            md << "no winner\n";
            continue;
        }
        md << "winner `" << d.at("winner").at("variant").get<std::string>() << "/"
           << d.at("winner").at("sign").get<std::string>() << "` ("
           << (d.at("winner_pass").get<bool>() ? "slope ok" : "slope out of window")
           << "), losing variant floor " << n2s(d.at("loser_floor")) << " (flatness "
           << n2s(d.at("loser_flatness")) << "), direct-vs-conservative max dev "
           << n2s(d.at("direct_vs_conservative")) << "\n";
    }

    if (j.contains("inversion") && !j.at("inversion").empty()) {
        md << "\n## Newton inversion\n\n";
        md << "| label | t | eps | converged | max iters | max |y-x|/eps | pass |\n";
        md << "|---|---|---|---|---|---|---|\n";
        for (const json& ic : j.at("inversion"))
            md << "| " << ic.at("label").get<std::string>() << " | " << n2s(ic.at("t")) << " | "
               << n2s(ic.at("eps")) << " | " << n2s(ic.at("converged")) << "/"
               << n2s(ic.at("nodes")) << " | " << n2s(ic.at("max_newton_iters")) << " | "
               << n2s(ic.at("max_preimage_disp_over_eps")) << " | "
               << (ic.at("pass").get<bool>() ? "PASS" : "FAIL") << " |\n";
    }

    if (j.contains("caustic")) {
        const json& c = j.at("caustic");
        md << "\n## Caustic\n\n";
        md << "- eps " << n2s(c.at("eps")) << ": detected t = " << n2s(c.at("t_numeric"))
           << ", predicted t = " << n2s(c.at("t_predicted")) << ", rel error "
           << n2s(c.at("rel_error")) << ", min J = " << n2s(c.at("min_jacobian")) << " -> "
           << (c.at("pass").get<bool>() ? "PASS" : "FAIL") << "\n";
    }
    return md.str();
}

bool report_pass_from_json(const std::string& report_json) {
    json j = json::parse(report_json);
    return j.at("meta").value("overall_pass", false);
}

void emit_report(const SweepReport& report, const std::set<ReportFormat>& formats,
                 const std::string& dir) {
    std::filesystem::create_directories(dir);
    if (formats.count(ReportFormat::csv)) {
        write_file(dir + "/errors.csv", csv_errors(report));
        write_file(dir + "/slopes.csv", csv_slopes(report));
        write_file(dir + "/bounds.csv", csv_bounds(report));
        write_file(dir + "/density.csv", csv_density(report));
        write_file(dir + "/inversion.csv", csv_inversion(report));
    }
    std::string js;
    if (formats.count(ReportFormat::json) || formats.count(ReportFormat::markdown))
        js = report_to_json(report);
    if (formats.count(ReportFormat::json)) write_file(dir + "/report.json", js);
    if (formats.count(ReportFormat::markdown)) write_file(dir + "/summary.md", summary_from_json(js));
}

}  // namespace pmhd
