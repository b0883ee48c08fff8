#include "xva/app/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "xva/errors.hpp"

namespace xva::app {

using nlohmann::json;

namespace {

// Object reader that remembers which keys were read so leftovers can be rejected.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key); }

    const json& get(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) throw ConfigError(sub(key), "missing required field");
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(sub(key), "missing required field");
        }
        const json& v = get(key);
        if (!v.is_number()) throw ConfigError(sub(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(sub(key), "must be finite");
        return d;
    }

    long long integer(const std::string& key, long long fallback, long long min_value) {
        if (!has(key)) return fallback;
        const json& v = get(key);
        if (!v.is_number_integer()) throw ConfigError(sub(key), "expected an integer");
        const long long n = v.get<long long>();
        if (n < min_value) throw ConfigError(sub(key), "must be >= " + std::to_string(min_value));
        return n;
    }

    std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = get(key);
        if (!v.is_number_unsigned()) throw ConfigError(sub(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = get(key);
        if (!v.is_boolean()) throw ConfigError(sub(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(sub(key), "missing required field");
        }
        const json& v = get(key);
        if (!v.is_string()) throw ConfigError(sub(key), "expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!used_.count(item.key())) throw ConfigError(sub(item.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

TimeFunction parse_tf(const json& j, const std::string& path) {
    if (j.is_number()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
        return TimeFunction(v);
    }
    if (!j.is_object()) throw ConfigError(path, "expected a number or {\"breaks\": [...], \"values\": [...]}");
    Obj o(j, path);
    const json& b = o.get("breaks");
    const json& v = o.get("values");
    o.finish();
    auto numbers = [](const json& arr, const std::string& p) {
        if (!arr.is_array()) throw ConfigError(p, "expected an array of numbers");
        std::vector<double> out;
        for (const json& e : arr) {
            if (!e.is_number()) throw ConfigError(p, "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    };
    try {
        return TimeFunction::piecewise(numbers(b, path + ".breaks"), numbers(v, path + ".values"));
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

TimeFunction tf(Obj& o, const std::string& key, const TimeFunction& fallback) {
    if (!o.has(key)) return fallback;
    return parse_tf(o.get(key), o.sub(key));
}

json emit_tf(const TimeFunction& f) {
    switch (f.kind()) {
    case TimeFunction::Kind::constant:
        return f(0.0);
    case TimeFunction::Kind::piecewise:
        return json{{"breaks", f.breaks()}, {"values", f.values()}};
    case TimeFunction::Kind::callable:
        break;
    }
    throw ConfigError("", "callable time functions cannot be written to a config");
}

std::vector<double> number_array(Obj& o, const std::string& key) {
    if (!o.has(key)) return {};
    const json& j = o.get(key);
    if (!j.is_array()) throw ConfigError(o.sub(key), "expected an array of numbers");
    std::vector<double> out;
    for (const json& e : j) {
        if (!e.is_number()) throw ConfigError(o.sub(key), "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<TimeFunction> tf_array(Obj& o, const std::string& key) {
    if (!o.has(key)) return {};
    const json& j = o.get(key);
    if (!j.is_array()) throw ConfigError(o.sub(key), "expected an array");
    std::vector<TimeFunction> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_tf(j[i], o.sub(key) + "[" + std::to_string(i) + "]"));
    return out;
}

Preset parse_preset(const std::string& s, const std::string& path) {
    if (s == "black_scholes") return Preset::black_scholes;
    if (s == "heston") return Preset::heston;
    if (s == "garch") return Preset::garch;
    if (s == "power") return Preset::power;
    throw ConfigError(path, "unknown preset '" + s + "' (black_scholes | heston | garch | power)");
}

ModelConfig parse_model(const json& j, double horizon) {
    Obj o(j, "model");
    ModelConfig m;
    m.preset = parse_preset(o.string("preset"), "model.preset");
    PowerModel& p = m.params;
    p.horizon = horizon;
    p.drift_b = tf(o, "b", TimeFunction(0.0));
    p.correlation = tf(o, "rho", TimeFunction(0.0));
    m.s0 = o.number("s0", 100.0);
    m.v0 = o.number("v0");
    if (!(m.s0 > 0.0)) throw ConfigError("model.s0", "must be positive");
    if (!(m.v0 > 0.0)) throw ConfigError("model.v0", "must be positive");

    switch (m.preset) {
    case Preset::black_scholes:
        p.k = TimeFunction(0.0);
        p.l0 = TimeFunction(0.0);
        p.theta0 = TimeFunction(0.0);
        p.theta1 = TimeFunction(1.0);
        break;
    case Preset::heston:
    case Preset::garch:
        p.k = tf(o, "k", TimeFunction(0.0));
        p.l0 = tf(o, "l0", TimeFunction(0.0));
        p.theta0 = TimeFunction(0.0);
        p.theta1 = tf(o, "theta1", TimeFunction(1.0));
        p.vols = {PowerTerm{tf(o, "lambda", TimeFunction(0.0)), m.preset == Preset::heston ? 0.5 : 1.0}};
        break;
    case Preset::power: {
        p.k = tf(o, "k", TimeFunction(0.0));
        p.l0 = tf(o, "l0", TimeFunction(0.0));
        p.theta0 = tf(o, "theta0", TimeFunction(0.0));
        p.theta1 = tf(o, "theta1", TimeFunction(1.0));
        const auto l = tf_array(o, "l");
        const auto alpha = number_array(o, "alpha");
        const auto lambda = tf_array(o, "lambda");
        const auto beta = number_array(o, "beta");
        if (l.size() != alpha.size()) throw ConfigError("model.alpha", "needs one exponent per entry of model.l");
        if (lambda.size() != beta.size()) throw ConfigError("model.beta", "needs one exponent per entry of model.lambda");
        for (std::size_t i = 0; i < l.size(); ++i) p.drifts.push_back(PowerDrift{l[i], alpha[i]});
        for (std::size_t i = 0; i < lambda.size(); ++i) p.vols.push_back(PowerTerm{lambda[i], beta[i]});
        break;
    }
    }
    o.finish();

    try {
        p.validate(false);
    } catch (const InvariantViolation& e) {
        static const std::map<std::string, std::string> where = {{"k_nonnegative", "model.k"},
                                                                 {"l_nonpositive", "model.l"},
                                                                 {"alpha_range", "model.alpha"},
                                                                 {"beta_range", "model.beta"},
                                                                 {"correlation", "model.rho"}};
        const auto it = where.find(e.condition());
        throw ConfigError(it == where.end() ? "model" : it->second, e.what());
    }
    return m;
}

Payoff parse_payoff(const json& j) {
    Obj o(j, "market.payoff");
    Payoff p;
    const std::string kind = o.string("kind");
    if (kind == "constant") {
        p.kind = Payoff::Kind::constant;
        p.value = o.number("value");
    } else if (kind == "capped_call") {
        p.kind = Payoff::Kind::capped_call;
        p.strike = o.number("strike");
        p.cap = o.number("cap");
    } else if (kind == "put") {
        p.kind = Payoff::Kind::put;
        p.strike = o.number("strike");
    } else {
        throw ConfigError("market.payoff.kind", "unknown payoff kind '" + kind + "' (constant | capped_call | put)");
    }
    p.offset = o.number("offset", 0.0);
    o.finish();
    try {
        p.validate();
    } catch (const InvariantViolation& e) {
        throw ConfigError("market.payoff", e.what());
    }
    return p;
}

json emit_payoff(const Payoff& p) {
    json j;
    switch (p.kind) {
    case Payoff::Kind::constant:
        j = {{"kind", "constant"}, {"value", p.value}};
        break;
    case Payoff::Kind::capped_call:
        j = {{"kind", "capped_call"}, {"strike", p.strike}, {"cap", p.cap}};
        break;
    case Payoff::Kind::put:
        j = {{"kind", "put"}, {"strike", p.strike}};
        break;
    case Payoff::Kind::callable:
        throw ConfigError("market.payoff", "callable payoffs cannot be written to a config");
    }
    j["offset"] = p.offset;
    return j;
}

PartyDefault parse_party(const json& j, const std::string& path) {
    Obj o(j, path);
    PartyDefault d;
    d.intensity = tf(o, "intensity", TimeFunction(0.0));
    d.threshold.shape = o.number("shape", 1.0);
    d.threshold.rate = o.number("rate", 1.0);
    o.finish();
    if (!(d.threshold.shape > 0.0)) throw ConfigError(path + ".shape", "must be positive");
    if (!(d.threshold.rate > 0.0)) throw ConfigError(path + ".rate", "must be positive");
    return d;
}

json emit_party(const PartyDefault& d) {
    return json{{"intensity", emit_tf(d.intensity)}, {"shape", d.threshold.shape}, {"rate", d.threshold.rate}};
}

MarketSpec parse_market(const json& j, double horizon) {
    Obj o(j, "market");
    MarketSpec m;
    m.horizon = horizon;
    m.r_hat = tf(o, "r", TimeFunction(0.0));
    m.c_plus = tf(o, "c_plus", m.r_hat);
    m.c_minus = tf(o, "c_minus", m.r_hat);
    m.f_plus = tf(o, "f_plus", m.r_hat);
    m.f_minus = tf(o, "f_minus", m.r_hat);
    m.h_plus = tf(o, "h_plus", m.r_hat);
    m.h_minus = tf(o, "h_minus", m.r_hat);
    m.alpha_frac = tf(o, "alpha_frac", TimeFunction(1.0));
    m.beta_frac = tf(o, "beta_frac", TimeFunction(1.0));
    m.lgd_I = o.number("lgd_I", 0.0);
    m.lgd_C = o.number("lgd_C", 0.0);
    m.investor_is_bank = o.boolean("investor_is_bank", false);
    m.dividend.kind = Dividend::Kind::constant;
    m.dividend.level = tf(o, "dividend", TimeFunction(0.0));
    if (o.has("hedge")) {
        Obj h(o.get("hedge"), "market.hedge");
        const std::string kind = h.string("kind", std::string("none"));
        if (kind == "none") {
            m.hedge.kind = Hedge::Kind::none;
        } else if (kind == "proportional") {
            m.hedge.kind = Hedge::Kind::proportional;
            m.hedge.delta = tf(h, "delta", TimeFunction(0.0));
        } else {
            throw ConfigError("market.hedge.kind", "unknown hedge kind '" + kind + "' (none | proportional)");
        }
        h.finish();
    }
    m.payoff = parse_payoff(o.get("payoff"));
    o.finish();
    if (!(m.lgd_I >= 0.0 && m.lgd_I <= 1.0)) throw ConfigError("market.lgd_I", "must lie in [0, 1]");
    if (!(m.lgd_C >= 0.0 && m.lgd_C <= 1.0)) throw ConfigError("market.lgd_C", "must lie in [0, 1]");
    return m;
}

std::optional<std::pair<double, double>> parse_range(Obj& o, const std::string& key) {
    if (!o.has(key)) return std::nullopt;
    const json& j = o.get(key);
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(o.sub(key), "expected [lo, hi]");
    }
    const double lo = j[0].get<double>();
    const double hi = j[1].get<double>();
    if (!(hi > lo)) throw ConfigError(o.sub(key), "need lo < hi");
    return std::make_pair(lo, hi);
}

} // namespace

std::string to_string(Preset preset) {
    switch (preset) {
    case Preset::black_scholes:
        return "black_scholes";
    case Preset::heston:
        return "heston";
    case Preset::garch:
        return "garch";
    case Preset::power:
        return "power";
    }
    return "power";
}

RunConfig load_config(const json& doc) {
    Obj root(doc, "");
    RunConfig c;

    {
        Obj g(root.get("grid"), "grid");
        c.grid.t0 = g.number("t0", 0.0);
        c.grid.T = g.number("T", 1.0);
        c.grid.n_steps = static_cast<int>(g.integer("n_steps", 500, 1));
        c.grid.nt = static_cast<int>(g.integer("nt", 6, 2));
        c.grid.nx = static_cast<int>(g.integer("nx", 41, 1));
        c.grid.nv = static_cast<int>(g.integer("nv", 9, 1));
        c.grid.x_range = parse_range(g, "x_range");
        c.grid.v_range = parse_range(g, "v_range");
        g.finish();
        if (!(c.grid.t0 >= 0.0)) throw ConfigError("grid.t0", "must be >= 0");
        if (!(c.grid.T > c.grid.t0)) throw ConfigError("grid.T", "must exceed grid.t0");
        if (c.grid.v_range && !(c.grid.v_range->first > 0.0)) throw ConfigError("grid.v_range", "lower end must be > 0");
    }

    c.model = parse_model(root.get("model"), c.grid.T);
    c.market = parse_market(root.get("market"), c.grid.T);

    c.market.defaults.horizon = c.grid.T;
    if (root.has("defaults")) {
        Obj d(root.get("defaults"), "defaults");
        if (d.has("investor")) c.market.defaults.investor = parse_party(d.get("investor"), "defaults.investor");
        if (d.has("counterparty")) {
            c.market.defaults.counterparty = parse_party(d.get("counterparty"), "defaults.counterparty");
        }
        d.finish();
    }

    if (root.has("mc")) {
        Obj m(root.get("mc"), "mc");
        c.mc.n_paths = static_cast<std::size_t>(m.integer("n_paths", 4000, 2));
        c.mc.master_seed = m.seed("master_seed", 42);
        c.mc.node_steps = static_cast<int>(m.integer("node_steps", 20, 1));
        c.mc.coverage_limit = m.number("coverage_limit", 0.01);
        c.mc.hull_paths = static_cast<std::size_t>(m.integer("hull_paths", 2000, 10));
        c.mc.residual_paths = static_cast<std::size_t>(m.integer("residual_paths", 10000, 2));
        c.mc.residual_steps = static_cast<int>(m.integer("residual_steps", 200, 1));
        c.mc.simulate_paths = static_cast<std::size_t>(m.integer("simulate_paths", 1000, 1));
        c.mc.record_stride = static_cast<int>(m.integer("record_stride", 1, 1));
        c.mc.default_samples = static_cast<std::size_t>(m.integer("default_samples", 100000, 1));
        c.mc.check_defaults_mc = m.boolean("check_defaults_mc", true);
        c.mc.oracle_paths = static_cast<std::size_t>(m.integer("oracle_paths", 20000, 2));
        m.finish();
        if (!(c.mc.coverage_limit >= 0.0 && c.mc.coverage_limit <= 1.0)) {
            throw ConfigError("mc.coverage_limit", "must lie in [0, 1]");
        }
    }

    if (root.has("solver")) {
        Obj s(root.get("solver"), "solver");
        c.solver.max_iter = static_cast<int>(s.integer("max_iter", 30, 1));
        c.solver.tol = s.number("tol", 1e-6);
        c.solver.gamma = s.number("gamma", 0.0);
        c.solver.time_slabs = static_cast<int>(s.integer("time_slabs", 1, 1));
        c.solver.slab_budget = s.number("slab_budget", 0.5);
        c.solver.stop_at_noise_floor = s.boolean("stop_at_noise_floor", true);
        c.solver.fresh_validation = s.boolean("fresh_validation", true);
        c.solver.monotone_shift = s.boolean("monotone_shift", true);
        s.finish();
        if (!(c.solver.tol >= 0.0)) throw ConfigError("solver.tol", "must be >= 0");
        if (!(c.solver.gamma >= 0.0)) throw ConfigError("solver.gamma", "must be >= 0");
        if (!(c.solver.slab_budget > 0.0)) throw ConfigError("solver.slab_budget", "must be positive");
    }
    root.finish();

    try {
        c.market.validate();
    } catch (const InvariantViolation& e) {
        static const std::map<std::string, std::string> where = {
            {"fraction_order", "market.alpha_frac"}, {"lgd_range", "market.lgd_I"},
            {"intensity_nonnegative", "defaults"},   {"intensity_integrable", "defaults"},
            {"r_hat", "market.r"},                   {"horizon", "grid.T"}};
        const auto it = where.find(e.condition());
        throw ConfigError(it == where.end() ? "market" : it->second, e.what());
    } catch (const DomainError& e) {
        throw ConfigError("defaults", e.what());
    }
    if (c.solver.gamma > 0.0 && c.model.params.theta0.sup_abs(0.0, c.grid.T) != 0.0) {
        throw ConfigError("solver.gamma", "gamma > 0 needs theta(., 0) = 0, i.e. model.theta0 = 0");
    }
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
    }
    return load_config(doc);
}

json to_json(const RunConfig& c) {
    json j;
    const PowerModel& p = c.model.params;
    json model{{"preset", to_string(c.model.preset)},
               {"b", emit_tf(p.drift_b)},
               {"rho", emit_tf(p.correlation)},
               {"s0", c.model.s0},
               {"v0", c.model.v0}};
    switch (c.model.preset) {
    case Preset::black_scholes:
        break;
    case Preset::heston:
    case Preset::garch:
        model["k"] = emit_tf(p.k);
        model["l0"] = emit_tf(p.l0);
        model["theta1"] = emit_tf(p.theta1);
        model["lambda"] = emit_tf(p.vols.front().lambda);
        break;
    case Preset::power: {
        model["k"] = emit_tf(p.k);
        model["l0"] = emit_tf(p.l0);
        model["theta0"] = emit_tf(p.theta0);
        model["theta1"] = emit_tf(p.theta1);
        json l = json::array(), alpha = json::array(), lambda = json::array(), beta = json::array();
        for (const auto& d : p.drifts) {
            l.push_back(emit_tf(d.l));
            alpha.push_back(d.alpha);
        }
        for (const auto& v : p.vols) {
            lambda.push_back(emit_tf(v.lambda));
            beta.push_back(v.beta);
        }
        model["l"] = l;
        model["alpha"] = alpha;
        model["lambda"] = lambda;
        model["beta"] = beta;
        break;
    }
    }
    j["model"] = model;

    const MarketSpec& m = c.market;
    json hedge{{"kind", m.hedge.kind == Hedge::Kind::proportional ? "proportional" : "none"}};
    if (m.hedge.kind == Hedge::Kind::proportional) hedge["delta"] = emit_tf(m.hedge.delta);
    j["market"] = json{{"r", emit_tf(m.r_hat)},
                       {"c_plus", emit_tf(m.c_plus)},
                       {"c_minus", emit_tf(m.c_minus)},
                       {"f_plus", emit_tf(m.f_plus)},
                       {"f_minus", emit_tf(m.f_minus)},
                       {"h_plus", emit_tf(m.h_plus)},
                       {"h_minus", emit_tf(m.h_minus)},
                       {"alpha_frac", emit_tf(m.alpha_frac)},
                       {"beta_frac", emit_tf(m.beta_frac)},
                       {"lgd_I", m.lgd_I},
                       {"lgd_C", m.lgd_C},
                       {"investor_is_bank", m.investor_is_bank},
                       {"dividend", emit_tf(m.dividend.level)},
                       {"hedge", hedge},
                       {"payoff", emit_payoff(m.payoff)}};
    j["defaults"] = json{{"investor", emit_party(m.defaults.investor)},
                         {"counterparty", emit_party(m.defaults.counterparty)}};

    json grid{{"t0", c.grid.t0}, {"T", c.grid.T}, {"n_steps", c.grid.n_steps},
              {"nt", c.grid.nt}, {"nx", c.grid.nx}, {"nv", c.grid.nv}};
    if (c.grid.x_range) grid["x_range"] = {c.grid.x_range->first, c.grid.x_range->second};
    if (c.grid.v_range) grid["v_range"] = {c.grid.v_range->first, c.grid.v_range->second};
    j["grid"] = grid;

    j["mc"] = json{{"n_paths", c.mc.n_paths},
                   {"master_seed", c.mc.master_seed},
                   {"node_steps", c.mc.node_steps},
                   {"coverage_limit", c.mc.coverage_limit},
                   {"hull_paths", c.mc.hull_paths},
                   {"residual_paths", c.mc.residual_paths},
                   {"residual_steps", c.mc.residual_steps},
                   {"simulate_paths", c.mc.simulate_paths},
                   {"record_stride", c.mc.record_stride},
                   {"default_samples", c.mc.default_samples},
                   {"check_defaults_mc", c.mc.check_defaults_mc},
                   {"oracle_paths", c.mc.oracle_paths}};
    j["solver"] = json{{"max_iter", c.solver.max_iter},
                       {"tol", c.solver.tol},
                       {"gamma", c.solver.gamma},
                       {"time_slabs", c.solver.time_slabs},
                       {"slab_budget", c.solver.slab_budget},
                       {"stop_at_noise_floor", c.solver.stop_at_noise_floor},
                       {"fresh_validation", c.solver.fresh_validation},
                       {"monotone_shift", c.solver.monotone_shift}};
    return j;
}

VolModel physical_model(const RunConfig& config, bool require_positivity) {
    VolModel m = build_power_model(config.model.params, require_positivity);
    m.name = to_string(config.model.preset);
    return m;
}

VolModel pricing_model(const RunConfig& config, bool require_positivity) {
    return measure_change(physical_model(config, require_positivity), config.market.r_hat, config.solver.gamma);
}

PositivityReport positivity(const RunConfig& config) { return check_positivity(config.model.params); }

McConfig mc_config(const RunConfig& config) {
    McConfig mc;
    mc.n_paths = config.mc.n_paths;
    mc.master_seed = config.mc.master_seed;
    mc.node_steps = config.mc.node_steps;
    mc.coverage_limit = config.mc.coverage_limit;
    return mc;
}

SolverConfig solver_config(const RunConfig& config) {
    SolverConfig s;
    s.max_iter = config.solver.max_iter;
    s.tol = config.solver.tol;
    s.slab_budget = config.solver.slab_budget;
    s.min_slabs = config.solver.time_slabs;
    s.stop_at_noise_floor = config.solver.stop_at_noise_floor;
    s.fresh_validation = config.solver.fresh_validation;
    s.monotone_shift = config.solver.monotone_shift;
    return s;
}

SolverGrid solver_grid(const RunConfig& config, const VolModel& model_Q) {
    SolverGrid g;
    g.t0 = config.grid.t0;
    g.T = config.grid.T;
    g.nt = config.grid.nt;
    g.nx = config.grid.nx;
    g.nv = config.grid.nv;
    if (!config.grid.x_range || !config.grid.v_range) {
        const Hull hull = auto_hull(model_Q, g.t0, g.T, std::log(config.model.s0), config.model.v0, config.mc.hull_paths,
                                    derive_seed(config.mc.master_seed, 0xA11ULL));
        g.x_lo = hull.x_lo;
        g.x_hi = hull.x_hi;
        g.v_lo = hull.v_lo;
        g.v_hi = hull.v_hi;
    }
    if (config.grid.x_range) {
        g.x_lo = config.grid.x_range->first;
        g.x_hi = config.grid.x_range->second;
    }
    if (config.grid.v_range) {
        g.v_lo = config.grid.v_range->first;
        g.v_hi = config.grid.v_range->second;
    }
    return g;
}

} // namespace xva::app
