#include "pmhd/config.hpp"

#include <fstream>

#include <json.hpp>

#include "pmhd/errors.hpp"

namespace pmhd {

using json = nlohmann::ordered_json;

std::vector<Vec2> SeedSpec::materialize(const Rect& domain) const {
    if (!points.empty()) return points;
    std::vector<Vec2> out;
    if (grid_nx < 1 || grid_ny < 1) return out;
    Rect r{{domain.lo.x + inset, domain.lo.y + inset},
           {domain.hi.x - inset, domain.hi.y - inset}};
    if (!r.valid()) throw ConfigError("seed inset leaves an empty rectangle");
    out.reserve(static_cast<size_t>(grid_nx) * grid_ny);
    for (int j = 0; j < grid_ny; ++j)
        for (int i = 0; i < grid_nx; ++i) {
            double fx = grid_nx == 1 ? 0.5 : static_cast<double>(i) / (grid_nx - 1);
            double fy = grid_ny == 1 ? 0.5 : static_cast<double>(j) / (grid_ny - 1);
            out.push_back({r.lo.x + fx * (r.hi.x - r.lo.x), r.lo.y + fy * (r.hi.y - r.lo.y)});
        }
    return out;
}

void ExperimentConfig::validate(double t_star) const {
    fields.validate();
    domain.validate();
    for (size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0)) throw ConfigError("eps_list entries must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ConfigError("eps_list must be strictly decreasing");
    }
    if (!(T > 0)) throw ConfigError("T must be positive");
    if (!allow_beyond_t_star && T >= t_star)
        throw ConfigError("T must be below t_star = 1/(||u0|| ||grad b||); "
                          "set allow_beyond_t_star for caustic experiments");
    if (output_times < 2) throw ConfigError("output_times must be >= 2");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (fields.b.family == BFamily::exponential &&
        (domain.rect.lo.x < fields.b.window_lo || domain.rect.hi.x > fields.b.window_hi))
        throw ConfigError("domain exceeds the exponential b window");
}

std::vector<double> ExperimentConfig::lagrangian_times() const {
    std::vector<double> ts(output_times);
    for (int i = 0; i < output_times; ++i) ts[i] = T * i / (output_times - 1);
    return ts;
}

// ------------------------------------------------------------------- JSON I/O

namespace {

Vec2 vec2_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(std::string(what) + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(Vec2 v) { return json::array({v.x, v.y}); }

BField b_from_json(const json& j) {
    BField b;
    std::string fam = j.at("family").get<std::string>();
    if (fam == "constant") {
        b.family = BFamily::constant;
        b.b0 = j.at("b0").get<double>();
    } else if (fam == "sinusoidal") {
        b.family = BFamily::sinusoidal;
        b.b0 = j.at("b0").get<double>();
        b.amplitude = j.at("amplitude").get<double>();
        b.wavevector = vec2_from(j.at("wavevector"), "b.wavevector");
    } else if (fam == "gaussian") {
        b.family = BFamily::gaussian;
        b.b0 = j.at("b0").get<double>();
        b.amplitude = j.at("amplitude").get<double>();
        b.center = vec2_from(j.at("center"), "b.center");
        b.sigma = j.at("sigma").get<double>();
    } else if (fam == "exponential") {
        b.family = BFamily::exponential;
        b.b0 = j.at("b0").get<double>();
        b.lambda = j.at("lambda").get<double>();
        b.window_lo = j.at("window").at(0).get<double>();
        b.window_hi = j.at("window").at(1).get<double>();
    } else {
        throw ConfigError("unknown b family: " + fam);
    }
    return b;
}

json b_to_json(const BField& b) {
    switch (b.family) {
        case BFamily::constant: return {{"family", "constant"}, {"b0", b.b0}};
        case BFamily::sinusoidal:
            return {{"family", "sinusoidal"}, {"b0", b.b0}, {"amplitude", b.amplitude},
                    {"wavevector", to_json(b.wavevector)}};
        case BFamily::gaussian:
            return {{"family", "gaussian"}, {"b0", b.b0}, {"amplitude", b.amplitude},
                    {"center", to_json(b.center)}, {"sigma", b.sigma}};
        case BFamily::exponential:
            return {{"family", "exponential"}, {"b0", b.b0}, {"lambda", b.lambda},
                    {"window", json::array({b.window_lo, b.window_hi})}};
    }
    return {};
}

U0Field u0_from_json(const json& j) {
    U0Field u;
    std::string fam = j.at("family").get<std::string>();
    if (fam == "constant") {
        u.family = U0Family::constant;
        u.vector = vec2_from(j.at("value"), "u0.value");
    } else if (fam == "rigid_rotation") {
        u.family = U0Family::rigid_rotation;
        u.omega = j.at("omega").get<double>();
    } else if (fam == "gaussian_modulated") {
        u.family = U0Family::gaussian_modulated;
        u.vector = vec2_from(j.at("value"), "u0.value");
        u.center = vec2_from(j.at("center"), "u0.center");
        u.sigma = j.at("sigma").get<double>();
    } else {
        throw ConfigError("unknown u0 family: " + fam);
    }
    return u;
}

json u0_to_json(const U0Field& u) {
    switch (u.family) {
        case U0Family::constant: return {{"family", "constant"}, {"value", to_json(u.vector)}};
        case U0Family::rigid_rotation:
            return {{"family", "rigid_rotation"}, {"omega", u.omega}};
        case U0Family::gaussian_modulated:
            return {{"family", "gaussian_modulated"}, {"value", to_json(u.vector)},
                    {"center", to_json(u.center)}, {"sigma", u.sigma}};
    }
    return {};
}

Rho0Field rho0_from_json(const json& j) {
    Rho0Field r;
    std::string fam = j.at("family").get<std::string>();
    if (fam == "constant") {
        r.family = Rho0Family::constant;
        r.base = j.at("value").get<double>();
    } else if (fam == "gaussian") {
        r.family = Rho0Family::gaussian;
        r.base = j.at("base").get<double>();
        r.amplitude = j.at("amplitude").get<double>();
        r.center = vec2_from(j.at("center"), "rho0.center");
        r.sigma = j.at("sigma").get<double>();
    } else if (fam == "sinusoidal") {
        r.family = Rho0Family::sinusoidal;
        r.base = j.at("base").get<double>();
        r.amplitude = j.at("amplitude").get<double>();
        r.wavevector = vec2_from(j.at("wavevector"), "rho0.wavevector");
    } else {
        throw ConfigError("unknown rho0 family: " + fam);
    }
    return r;
}

json rho0_to_json(const Rho0Field& r) {
    switch (r.family) {
        case Rho0Family::constant: return {{"family", "constant"}, {"value", r.base}};
        case Rho0Family::gaussian:
            return {{"family", "gaussian"}, {"base", r.base}, {"amplitude", r.amplitude},
                    {"center", to_json(r.center)}, {"sigma", r.sigma}};
        case Rho0Family::sinusoidal:
            return {{"family", "sinusoidal"}, {"base", r.base}, {"amplitude", r.amplitude},
                    {"wavevector", to_json(r.wavevector)}};
    }
    return {};
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        const json& jf = j.at("fields");
        cfg.fields.b = b_from_json(jf.at("b"));
        cfg.fields.u0 = u0_from_json(jf.at("u0"));
        if (jf.contains("rho0")) cfg.fields.rho0 = rho0_from_json(jf.at("rho0"));

        const json& jd = j.at("domain");
        cfg.domain.rect.lo = vec2_from(jd.at("rect").at(0), "domain.rect.lo");
        cfg.domain.rect.hi = vec2_from(jd.at("rect").at(1), "domain.rect.hi");
        cfg.domain.resolution = jd.value("resolution", 64);

        if (j.contains("seeds")) {
            const json& js = j.at("seeds");
            if (js.contains("points"))
                for (const auto& p : js.at("points"))
                    cfg.seeds.points.push_back(vec2_from(p, "seed"));
            if (js.contains("grid")) {
                cfg.seeds.grid_nx = js.at("grid").at(0).get<int>();
                cfg.seeds.grid_ny = js.at("grid").at(1).get<int>();
            }
            cfg.seeds.inset = js.value("inset", 0.0);
        }

        cfg.eps_list = j.value("eps_list", std::vector<double>{});
        cfg.T = j.value("T", 1.0);
        cfg.allow_beyond_t_star = j.value("allow_beyond_t_star", false);
        cfg.output_times = j.value("output_times", 33);
        cfg.workers = j.value("workers", 1);
        cfg.output_dir = j.value("output_dir", std::string("out"));

        if (j.contains("integrator")) {
            const json& ji = j.at("integrator");
            std::string m = ji.value("method", std::string("dopri5"));
            if (m == "rk4") cfg.integrator.method = OdeMethod::rk4;
            else if (m == "dopri5") cfg.integrator.method = OdeMethod::dopri5;
            else throw ConfigError("unknown integrator method: " + m);
            cfg.integrator.eta = ji.value("eta", 20.0);
            cfg.integrator.h_max = ji.value("h_max", 1e-2);
            cfg.integrator.abs_tol = ji.value("abs_tol", 1e-6);
        }

        if (j.contains("eulerian")) {
            const json& je = j.at("eulerian");
            cfg.eulerian.grid_resolution = je.value("grid_resolution", 8);
            cfg.eulerian.grid_inset = je.value("grid_inset", 0.5);
            cfg.eulerian.time_factor = je.value("time_factor", 0.5);
            if (je.contains("time")) cfg.eulerian.time = je.at("time").get<double>();
            cfg.eulerian.newton_tol = je.value("newton_tol", 1e-10);
        }

        if (j.contains("density")) {
            const json& jr = j.at("density");
            std::string conv = jr.value("convention", std::string("conservative"));
            if (conv == "conservative") cfg.density.convention = RhoConvention::conservative;
            else if (conv == "paper_literal") cfg.density.convention = RhoConvention::paper_literal;
            else throw ConfigError("unknown density convention: " + conv);
            std::string var = jr.value("variant", std::string("theorem_form"));
            if (var == "theorem_form") cfg.density.variant = RhoVariant::theorem_form;
            else if (var == "prop_form") cfg.density.variant = RhoVariant::prop_form;
            else throw ConfigError("unknown density variant: " + var);
            std::string sg = jr.value("sign", std::string("flipped"));
            if (sg == "paper") cfg.density.sign = RhoSign::paper;
            else if (sg == "flipped") cfg.density.sign = RhoSign::flipped;
            else throw ConfigError("unknown density sign: " + sg);
            cfg.density.time_factor = jr.value("time_factor", 0.05);
            if (jr.contains("time")) cfg.density.time = jr.at("time").get<double>();
            cfg.density.output_times = jr.value("output_times", 17);
        }

        if (j.contains("caustic")) {
            const json& jc = j.at("caustic");
            cfg.caustic.enabled = jc.value("enabled", false);
            cfg.caustic.t_max_factor = jc.value("t_max_factor", 1.3);
            if (jc.contains("t_max")) cfg.caustic.t_max = jc.at("t_max").get<double>();
            if (jc.contains("eps")) cfg.caustic.eps = jc.at("eps").get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["fields"]["b"] = b_to_json(cfg.fields.b);
    j["fields"]["u0"] = u0_to_json(cfg.fields.u0);
    j["fields"]["rho0"] = rho0_to_json(cfg.fields.rho0);
    j["domain"]["rect"] = json::array({to_json(cfg.domain.rect.lo), to_json(cfg.domain.rect.hi)});
    j["domain"]["resolution"] = cfg.domain.resolution;
    json js;
    if (!cfg.seeds.points.empty()) {
        js["points"] = json::array();
        for (Vec2 p : cfg.seeds.points) js["points"].push_back(to_json(p));
    } else {
        js["grid"] = json::array({cfg.seeds.grid_nx, cfg.seeds.grid_ny});
        js["inset"] = cfg.seeds.inset;
    }
    j["seeds"] = js;
    j["eps_list"] = cfg.eps_list;
    j["T"] = cfg.T;
    j["allow_beyond_t_star"] = cfg.allow_beyond_t_star;
    j["output_times"] = cfg.output_times;
    j["integrator"] = {{"method", cfg.integrator.method == OdeMethod::rk4 ? "rk4" : "dopri5"},
                       {"eta", cfg.integrator.eta},
                       {"h_max", cfg.integrator.h_max},
                       {"abs_tol", cfg.integrator.abs_tol}};
    j["eulerian"] = {{"grid_resolution", cfg.eulerian.grid_resolution},
                     {"grid_inset", cfg.eulerian.grid_inset},
                     {"time_factor", cfg.eulerian.time_factor},
                     {"newton_tol", cfg.eulerian.newton_tol}};
    if (cfg.eulerian.time) j["eulerian"]["time"] = *cfg.eulerian.time;
    j["density"] = {
        {"convention",
         cfg.density.convention == RhoConvention::conservative ? "conservative" : "paper_literal"},
        {"variant", cfg.density.variant == RhoVariant::theorem_form ? "theorem_form" : "prop_form"},
        {"sign", cfg.density.sign == RhoSign::paper ? "paper" : "flipped"},
        {"time_factor", cfg.density.time_factor},
        {"output_times", cfg.density.output_times}};
    if (cfg.density.time) j["density"]["time"] = *cfg.density.time;
    j["caustic"] = {{"enabled", cfg.caustic.enabled}, {"t_max_factor", cfg.caustic.t_max_factor}};
    if (cfg.caustic.t_max) j["caustic"]["t_max"] = *cfg.caustic.t_max;
    if (cfg.caustic.eps) j["caustic"]["eps"] = *cfg.caustic.eps;
    j["workers"] = cfg.workers;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2);
}

}  // namespace pmhd
