#include "ineq/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ineq/rng.hpp"
#include "json.hpp"

namespace ineq::config {

using nlohmann::json;

RunConfig::RunConfig() {
    calib.seed = derive_seed(seed, Stream::Calib);
    bootstrap.seed = derive_seed(seed, Stream::Bootstrap);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path, "config error at '" + path + "': " + msg);
}

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

double get_num(const json& obj, const std::string& path, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::int64_t get_int(const json& obj, const std::string& path, const std::string& key,
                     std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

std::string get_str(const json& obj, const std::string& path, const std::string& key,
                    const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> get_grid(const json& obj, const std::string& path, const std::string& key,
                             std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(path + "." + key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) fail(path + "." + key, "grid must be strictly increasing");
    return out;
}

} // namespace

RunConfig parse(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail("<root>", std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail("<root>", "top level must be an object");

    RunConfig cfg;
    require_keys(root, "",
                 {"seed", "threads", "output_dir", "targets", "env", "base_params", "calib",
                  "bootstrap", "sweeps", "industries", "microsim", "regress"});

    cfg.seed = static_cast<std::uint64_t>(get_int(root, "", "seed", static_cast<std::int64_t>(cfg.seed)));
    cfg.threads = static_cast<int>(get_int(root, "", "threads", cfg.threads));
    if (cfg.threads < 0) fail("threads", "must be >= 0");
    cfg.output_dir = get_str(root, "", "output_dir", cfg.output_dir);

    if (root.contains("targets")) {
        const json& t = root.at("targets");
        require_keys(t, "targets", {"values", "ses"});
        auto read6 = [&](const char* key, std::array<double, 6>& out) {
            if (!t.contains(key)) return;
            const json& arr = t.at(key);
            if (!arr.is_array() || arr.size() != 6)
                fail(std::string("targets.") + key, "expected exactly 6 numbers");
            for (int i = 0; i < 6; ++i) {
                if (!arr[i].is_number()) fail(std::string("targets.") + key, "expected numbers");
                out[static_cast<std::size_t>(i)] = arr[i].get<double>();
            }
        };
        read6("values", cfg.targets.values);
        read6("ses", cfg.targets.ses);
        for (double s : cfg.targets.ses)
            if (!(s > 0.0)) fail("targets.ses", "standard errors must be positive");
    }

    if (root.contains("env")) {
        const json& e = root.at("env");
        require_keys(e, "env",
                     {"cv_h", "s_share", "gamma_l", "xi", "m3_anchor", "sigma_eps", "top_q", "a_norm"});
        cfg.env.cv_h = get_num(e, "env", "cv_h", cfg.env.cv_h);
        cfg.env.s_share = get_num(e, "env", "s_share", cfg.env.s_share);
        cfg.env.gamma_l = get_num(e, "env", "gamma_l", cfg.env.gamma_l);
        cfg.env.xi = get_num(e, "env", "xi", cfg.env.xi);
        cfg.env.m3_anchor = get_num(e, "env", "m3_anchor", cfg.env.m3_anchor);
        cfg.env.sigma_eps = get_num(e, "env", "sigma_eps", cfg.env.sigma_eps);
        cfg.env.top_q = get_num(e, "env", "top_q", cfg.env.top_q);
        cfg.env.a_norm = get_num(e, "env", "a_norm", cfg.env.a_norm);
        if (!cfg.env.valid()) fail("env", "values violate the fixed-environment invariants");
    }

    if (root.contains("base_params")) {
        const json& p = root.at("base_params");
        require_keys(p, "base_params", {"r", "sigma", "eta0", "eta1", "giniK"});
        cfg.base_params.r = get_num(p, "base_params", "r", cfg.base_params.r);
        cfg.base_params.sigma = get_num(p, "base_params", "sigma", cfg.base_params.sigma);
        cfg.base_params.eta0 = get_num(p, "base_params", "eta0", cfg.base_params.eta0);
        cfg.base_params.eta1 = get_num(p, "base_params", "eta1", cfg.base_params.eta1);
        cfg.base_params.giniK = get_num(p, "base_params", "giniK", cfg.base_params.giniK);
        if (!cfg.base_params.valid()) fail("base_params", "values violate the parameter invariants");
    }

    if (root.contains("calib")) {
        const json& c = root.at("calib");
        require_keys(c, "calib",
                     {"de_population", "de_generations", "de_mutation", "de_crossover", "nm_starts",
                      "nm_max_iter", "nm_tolerance", "fd_step"});
        cfg.calib.de_population = static_cast<int>(get_int(c, "calib", "de_population", cfg.calib.de_population));
        cfg.calib.de_generations = static_cast<int>(get_int(c, "calib", "de_generations", cfg.calib.de_generations));
        cfg.calib.de_mutation = get_num(c, "calib", "de_mutation", cfg.calib.de_mutation);
        cfg.calib.de_crossover = get_num(c, "calib", "de_crossover", cfg.calib.de_crossover);
        cfg.calib.nm_starts = static_cast<int>(get_int(c, "calib", "nm_starts", cfg.calib.nm_starts));
        cfg.calib.nm_max_iter = static_cast<int>(get_int(c, "calib", "nm_max_iter", cfg.calib.nm_max_iter));
        cfg.calib.nm_tolerance = get_num(c, "calib", "nm_tolerance", cfg.calib.nm_tolerance);
        cfg.calib.fd_step = get_num(c, "calib", "fd_step", cfg.calib.fd_step);
        if (!cfg.calib.valid()) fail("calib", "values violate the calibration-config invariants");
    }

    if (root.contains("bootstrap")) {
        const json& b = root.at("bootstrap");
        require_keys(b, "bootstrap", {"b", "ci_level", "augmented", "xi_range"});
        cfg.bootstrap.b = static_cast<int>(get_int(b, "bootstrap", "b", cfg.bootstrap.b));
        cfg.bootstrap.ci_level = get_num(b, "bootstrap", "ci_level", cfg.bootstrap.ci_level);
        if (b.contains("augmented")) {
            if (!b.at("augmented").is_boolean()) fail("bootstrap.augmented", "expected a boolean");
            cfg.bootstrap_augmented = b.at("augmented").get<bool>();
        }
        if (b.contains("xi_range")) {
            const json& xr = b.at("xi_range");
            if (!xr.is_array() || xr.size() != 2 || !xr[0].is_number() || !xr[1].is_number())
                fail("bootstrap.xi_range", "expected [lo, hi]");
            cfg.bootstrap.xi_range = {{xr[0].get<double>(), xr[1].get<double>()}};
        } else if (cfg.bootstrap_augmented) {
            cfg.bootstrap.xi_range = {{0.07, 0.25}};
        }
        if (!cfg.bootstrap.valid()) fail("bootstrap", "values violate the bootstrap-config invariants");
    }

    if (root.contains("sweeps")) {
        const json& s = root.at("sweeps");
        require_keys(s, "sweeps", {"xi_grid", "eta1_grid", "giniK_grid", "contour"});
        cfg.xi_grid = get_grid(s, "sweeps", "xi_grid", cfg.xi_grid);
        cfg.eta1_grid = get_grid(s, "sweeps", "eta1_grid", cfg.eta1_grid);
        cfg.giniK_grid = get_grid(s, "sweeps", "giniK_grid", cfg.giniK_grid);
        if (s.contains("contour")) {
            const json& c = s.at("contour");
            require_keys(c, "sweeps.contour", {"eta1_range", "giniK_range", "resolution"});
            auto range = [&](const char* key, std::array<double, 2>& out) {
                if (!c.contains(key)) return;
                const json& r = c.at(key);
                if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number() ||
                    !(r[0].get<double>() < r[1].get<double>()))
                    fail(std::string("sweeps.contour.") + key, "expected [lo, hi] with lo < hi");
                out = {r[0].get<double>(), r[1].get<double>()};
            };
            range("eta1_range", cfg.contour.eta1_range);
            range("giniK_range", cfg.contour.giniK_range);
            cfg.contour.resolution =
                static_cast<int>(get_int(c, "sweeps.contour", "resolution", cfg.contour.resolution));
            if (cfg.contour.resolution < 2) fail("sweeps.contour.resolution", "must be >= 2");
        }
    }

    if (root.contains("industries")) {
        const json& arr = root.at("industries");
        if (!arr.is_array()) fail("industries", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& row = arr[i];
            const std::string path = "industries[" + std::to_string(i) + "]";
            require_keys(row, path, {"label", "giniK", "xi"});
            scenarios::IndustrySpec spec;
            spec.label = get_str(row, path, "label", "");
            spec.giniK = get_num(row, path, "giniK", 0.0);
            spec.xi = get_num(row, path, "xi", 0.0);
            if (spec.label.empty()) fail(path + ".label", "must be non-empty");
            if (!(spec.giniK > 0.0 && spec.giniK < 1.0)) fail(path + ".giniK", "must be in (0,1)");
            if (!(spec.xi >= 0.0 && spec.xi < 1.0)) fail(path + ".xi", "must be in [0,1)");
            cfg.industries.push_back(std::move(spec));
        }
    }

    if (root.contains("microsim")) {
        const json& m = root.at("microsim");
        require_keys(m, "microsim", {"n_workers", "n_firms"});
        cfg.microsim.n_workers = static_cast<int>(get_int(m, "microsim", "n_workers", cfg.microsim.n_workers));
        cfg.microsim.n_firms = static_cast<int>(get_int(m, "microsim", "n_firms", cfg.microsim.n_firms));
        if (cfg.microsim.n_workers < 1) fail("microsim.n_workers", "must be >= 1");
        if (cfg.microsim.n_firms < 1) fail("microsim.n_firms", "must be >= 1");
    }

    if (root.contains("regress")) {
        const json& r = root.at("regress");
        require_keys(r, "regress", {"oews_2019", "oews_2023", "aioe"});
        cfg.regress.oews_2019 = get_str(r, "regress", "oews_2019", "");
        cfg.regress.oews_2023 = get_str(r, "regress", "oews_2023", "");
        cfg.regress.aioe = get_str(r, "regress", "aioe", "");
    }

    // Stage seeds derive from the one global seed so stages rerun
    // independently yet reproducibly.
    cfg.calib.seed = derive_seed(cfg.seed, Stream::Calib);
    cfg.bootstrap.seed = derive_seed(cfg.seed, Stream::Bootstrap);
    return cfg;
}

RunConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string canonical_json(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["targets"] = {{"values", cfg.targets.values}, {"ses", cfg.targets.ses}};
    j["env"] = {{"cv_h", cfg.env.cv_h},       {"s_share", cfg.env.s_share},
                {"gamma_l", cfg.env.gamma_l}, {"xi", cfg.env.xi},
                {"m3_anchor", cfg.env.m3_anchor}, {"sigma_eps", cfg.env.sigma_eps},
                {"top_q", cfg.env.top_q},     {"a_norm", cfg.env.a_norm}};
    j["base_params"] = {{"r", cfg.base_params.r},
                        {"sigma", cfg.base_params.sigma},
                        {"eta0", cfg.base_params.eta0},
                        {"eta1", cfg.base_params.eta1},
                        {"giniK", cfg.base_params.giniK}};
    j["calib"] = {{"de_population", cfg.calib.de_population},
                  {"de_generations", cfg.calib.de_generations},
                  {"de_mutation", cfg.calib.de_mutation},
                  {"de_crossover", cfg.calib.de_crossover},
                  {"nm_starts", cfg.calib.nm_starts},
                  {"nm_max_iter", cfg.calib.nm_max_iter},
                  {"nm_tolerance", cfg.calib.nm_tolerance},
                  {"fd_step", cfg.calib.fd_step}};
    j["bootstrap"] = {{"b", cfg.bootstrap.b},
                      {"ci_level", cfg.bootstrap.ci_level},
                      {"augmented", cfg.bootstrap_augmented}};
    if (cfg.bootstrap.xi_range) j["bootstrap"]["xi_range"] = *cfg.bootstrap.xi_range;
    j["sweeps"] = {{"xi_grid", cfg.xi_grid},
                   {"eta1_grid", cfg.eta1_grid},
                   {"giniK_grid", cfg.giniK_grid},
                   {"contour",
                    {{"eta1_range", cfg.contour.eta1_range},
                     {"giniK_range", cfg.contour.giniK_range},
                     {"resolution", cfg.contour.resolution}}}};
    json inds = json::array();
    for (const auto& i : cfg.industries)
        inds.push_back({{"label", i.label}, {"giniK", i.giniK}, {"xi", i.xi}});
    j["industries"] = inds;
    j["microsim"] = {{"n_workers", cfg.microsim.n_workers}, {"n_firms", cfg.microsim.n_firms}};
    j["regress"] = {{"oews_2019", cfg.regress.oews_2019},
                    {"oews_2023", cfg.regress.oews_2023},
                    {"aioe", cfg.regress.aioe}};
    return j.dump();  // nlohmann::json keeps object keys sorted
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace ineq::config
