#include "safeset/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "safeset/error.hpp"
#include "safeset/systems.hpp"

namespace safeset {

namespace {

/// Reads the members of one JSON object and rejects any it did not ask for.
class ObjectReader {
public:
    ObjectReader(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) {
            throw ParseError(where_ + ": expected an object");
        }
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const Json& at(const std::string& key) {
        if (!obj_.contains(key)) {
            throw ParseError(where_ + ": missing key '" + key + "'");
        }
        seen_.insert(key);
        return obj_.at(key);
    }

    template <typename T>
    T get(const std::string& key) {
        return convert<T>(at(key), key);
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) {
        return has(key) ? get<T>(key) : fallback;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (seen_.count(key) == 0) {
                throw ParseError(where_ + ": unknown key '" + key + "'");
            }
        }
    }

    const std::string& where() const { return where_; }

private:
    template <typename T>
    T convert(const Json& j, const std::string& key) const {
        const auto fail = [&] { return ParseError(where_ + "." + key + ": wrong type"); };
        if constexpr (std::is_same_v<T, double>) {
            if (!j.is_number()) throw fail();
        } else if constexpr (std::is_integral_v<T>) {
            if (!j.is_number_integer()) throw fail();
            if constexpr (std::is_unsigned_v<T>) {
                if (j.is_number_unsigned() == false && j.get<std::int64_t>() < 0) throw fail();
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!j.is_string()) throw fail();
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!j.is_boolean()) throw fail();
        }
        try {
            return j.get<T>();
        } catch (const nlohmann::json::exception&) {
            throw fail();
        }
    }

    const Json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

OssSpec parse_oss(const Json& j) {
    ObjectReader r(j, "oss");
    OssSpec spec;
    if (r.has("continuous")) {
        const auto& dims = r.at("continuous");
        if (!dims.is_array()) {
            throw ParseError("oss.continuous: expected an array");
        }
        for (std::size_t i = 0; i < dims.size(); ++i) {
            ObjectReader d(dims[i], "oss.continuous[" + std::to_string(i) + "]");
            spec.cont_dims.push_back(ContinuousDim{d.get<std::string>("name"), d.get<double>("lower"),
                                                   d.get<double>("upper")});
            spec.delta.push_back(d.get<double>("delta"));
            d.finish();
        }
    }
    if (r.has("discrete")) {
        const auto& dims = r.at("discrete");
        if (!dims.is_array()) {
            throw ParseError("oss.discrete: expected an array");
        }
        for (std::size_t i = 0; i < dims.size(); ++i) {
            ObjectReader d(dims[i], "oss.discrete[" + std::to_string(i) + "]");
            spec.disc_dims.push_back(
                DiscreteDim{d.get<std::string>("name"), d.get<std::vector<std::int64_t>>("values")});
            d.finish();
        }
    }
    spec.horizon = r.get<int>("horizon");
    r.finish();
    spec.validate();

    std::set<std::string> names;
    for (const auto& name : spec.dim_names()) {
        if (name.empty() || name.find_first_of(",\"\n\r") != std::string::npos) {
            throw SpecError("dimension name '" + name + "' is empty or contains a CSV delimiter");
        }
        if (name == "id" || name == "p_hat" || name == "M" || !names.insert(name).second) {
            throw SpecError("dimension name '" + name + "' is reserved or repeated");
        }
    }
    return spec;
}

void expect_layout(const OssSpec& spec, std::size_t cont, std::size_t disc, const std::string& system) {
    if (spec.cont_dims.size() != cont || spec.disc_dims.size() != disc) {
        throw SpecError(system + " needs an OSS with " + std::to_string(cont) + " continuous and " +
                        std::to_string(disc) + " discrete dimensions");
    }
}

std::unique_ptr<SystemModel> build_cliff(const Json& params, const OssSpec& spec) {
    expect_layout(spec, 2, 0, "cliff_integrator");
    ObjectReader r(params, "system.params");
    CliffIntegratorParams p;
    p.dt = r.get_or("dt", p.dt);
    p.noise = r.get_or("noise", p.noise);
    p.cliff = r.get_or("cliff", p.cliff);
    p.v_min = r.get_or("v_min", p.v_min);
    p.v_max = r.get_or("v_max", p.v_max);
    p.brake = r.get_or("brake", p.brake);
    r.finish();
    return std::make_unique<CliffIntegrator>(p);
}

std::unique_ptr<SystemModel> build_walker(const Json& params, const OssSpec& spec) {
    expect_layout(spec, 4, 0, "drift_walker");
    ObjectReader r(params, "system.params");
    DriftWalkerParams p;
    if (r.has("drift_knots")) {
        p.drift_knots.clear();
        for (const auto& knot : r.at("drift_knots")) {
            if (!knot.is_array() || knot.size() != 2 || !knot[0].is_number() || !knot[1].is_number()) {
                throw ParseError("system.params.drift_knots: expected [velocity, drift] pairs");
            }
            p.drift_knots.emplace_back(knot[0].get<double>(), knot[1].get<double>());
        }
    }
    p.limit = r.get_or("limit", p.limit);
    p.push_amplitude = r.get_or("push_amplitude", p.push_amplitude);
    p.push_period = r.get_or("push_period", p.push_period);
    p.sagittal_coupling = r.get_or("sagittal_coupling", p.sagittal_coupling);
    p.retention = r.get_or("retention", p.retention);
    p.noise = r.get_or("noise", p.noise);
    r.finish();
    return std::make_unique<DriftWalker>(std::move(p));
}

std::unique_ptr<SystemModel> build_hopper(const Json& params, const OssSpec& spec) {
    expect_layout(spec, 2, 1, "mode_hopper");
    ObjectReader r(params, "system.params");
    ModeHopperParams p;
    p.modes = r.get_or("modes", p.modes);
    p.gains = r.get_or("gains", p.gains);
    p.band_edges = r.get_or("band_edges", p.band_edges);
    p.transitions = r.get_or("transitions", p.transitions);
    p.bias = r.get_or("bias", p.bias);
    p.noise = r.get_or("noise", p.noise);
    p.failure_threshold = r.get_or("failure_threshold", p.failure_threshold);
    p.init_limit = r.get_or("init_limit", p.init_limit);
    r.finish();
    for (const auto q : spec.disc_dims[0].values) {
        if (std::find(p.modes.begin(), p.modes.end(), q) == p.modes.end()) {
            throw SpecError("mode_hopper: OSS mode " + std::to_string(q) + " is not a declared system mode");
        }
    }
    return std::make_unique<ModeHopper>(std::move(p));
}

std::unique_ptr<SystemModel> build_hazard(const Json& params, const OssSpec& spec) {
    ObjectReader r(params, "system.params");
    HazardFieldParams p;
    using Vec = std::vector<double>;
    p.region_lower = r.get_or("region_lower", Vec{});
    p.region_upper = r.get_or("region_upper", Vec{});
    p.fail_probability = r.get_or("fail_probability", p.fail_probability);
    p.sink = r.get_or("sink", Vec{});
    p.drift = r.get_or("drift", Vec{});
    p.refuse_lower = r.get_or("refuse_lower", Vec{});
    p.refuse_upper = r.get_or("refuse_upper", Vec{});
    r.finish();
    const auto n = spec.cont_dims.size();
    for (const auto* v : {&p.region_lower, &p.sink, &p.drift, &p.refuse_lower}) {
        if (!v->empty() && v->size() != n) {
            throw SpecError("hazard_field: parameter vectors need one entry per continuous dimension");
        }
    }
    return std::make_unique<HazardField>(std::move(p));
}

std::unique_ptr<SystemModel> build_fixed(const Json& params, const OssSpec&) {
    ObjectReader(params, "system.params").finish();
    return std::make_unique<HazardField>(fixed_point_params());
}

using Builder = std::function<std::unique_ptr<SystemModel>(const Json&, const OssSpec&)>;

const std::map<std::string, Builder>& registry() {
    static const std::map<std::string, Builder> systems{
        {"cliff_integrator", build_cliff}, {"drift_walker", build_walker}, {"fixed_point", build_fixed},
        {"hazard_field", build_hazard},    {"mode_hopper", build_hopper},
    };
    return systems;
}

}  // namespace

QuantifyConfig CampaignConfig::quantify_config() const {
    QuantifyConfig q;
    q.epsilon = epsilon;
    q.beta = beta;
    q.seed = seed;
    q.max_runs = max_runs;
    q.capacity = capacity;
    return q;
}

Json CampaignConfig::to_json() const {
    Json cont = Json::array();
    for (std::size_t i = 0; i < oss.cont_dims.size(); ++i) {
        const auto& d = oss.cont_dims[i];
        cont.push_back(Json{{"name", d.name}, {"lower", d.lower}, {"upper", d.upper}, {"delta", oss.delta[i]}});
    }
    Json disc = Json::array();
    for (const auto& d : oss.disc_dims) {
        disc.push_back(Json{{"name", d.name}, {"values", d.values}});
    }
    Json j;
    j["system"] = Json{{"name", system.name}, {"params", system.params}};
    j["oss"] = Json{{"continuous", cont}, {"discrete", disc}, {"horizon", oss.horizon}};
    j["epsilon"] = epsilon;
    j["beta"] = beta;
    j["seed"] = seed;
    j["max_runs"] = max_runs;
    j["oracle_trials"] = oracle_trials;
    j["output_dir"] = output_dir;
    j["capacity"] = capacity;
    return j;
}

CampaignConfig parse_config(const Json& doc) {
    ObjectReader r(doc, "config");
    CampaignConfig cfg;
    {
        ObjectReader s(r.at("system"), "system");
        cfg.system.name = s.get<std::string>("name");
        if (s.has("params")) {
            cfg.system.params = s.at("params");
        }
        s.finish();
    }
    cfg.oss = parse_oss(r.at("oss"));
    cfg.epsilon = r.get<double>("epsilon");
    cfg.beta = r.get<double>("beta");
    cfg.seed = r.get_or<std::uint64_t>("seed", cfg.seed);
    cfg.max_runs = r.get_or<std::size_t>("max_runs", cfg.max_runs);
    cfg.oracle_trials = r.get_or<std::size_t>("oracle_trials", cfg.oracle_trials);
    cfg.output_dir = r.get_or<std::string>("output_dir", cfg.output_dir);
    cfg.capacity = r.get_or<std::size_t>("capacity", cfg.capacity);
    r.finish();

    cfg.quantify_config().validate();
    if (cfg.oracle_trials == 0) {
        throw DomainError("oracle_trials must be at least 1");
    }
    make_system(cfg.system, cfg.oss);
    return cfg;
}

CampaignConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config '" + path + "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

std::vector<std::string> system_names() {
    std::vector<std::string> names;
    for (const auto& [name, builder] : registry()) {
        names.push_back(name);
    }
    return names;
}

std::unique_ptr<SystemModel> make_system(const SystemConfig& cfg, const OssSpec& spec) {
    const auto it = registry().find(cfg.name);
    if (it == registry().end()) {
        throw SpecError("unknown system '" + cfg.name + "'");
    }
    return it->second(cfg.params, spec);
}

}  // namespace safeset
