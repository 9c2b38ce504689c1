#include "gs2d/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "gs2d/errors.hpp"

namespace gs2d {

namespace {

std::string trim(std::string_view sv) {
    const auto b = sv.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = sv.find_last_not_of(" \t\r");
    return std::string(sv.substr(b, e - b + 1));
}

double parse_double(const std::string& value, const std::string& key, int line) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out))
        throw ConfigError("unparsable numeric value '" + value + "' for key '" + key +
                              "' at line " + std::to_string(line),
                          key, line);
    return out;
}

long long parse_int(const std::string& value, const std::string& key, int line) {
    long long out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("unparsable integer value '" + value + "' for key '" + key +
                              "' at line " + std::to_string(line),
                          key, line);
    return out;
}

// raw values gathered before the typed config is assembled
struct RawConfig {
    std::map<std::string, std::pair<std::string, int>> values; // key -> (text, line)
};

struct KeySpec {
    const char* section;
};

const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> table = {
        {"r", {"grid"}},
        {"n", {"grid"}},
        {"spacing", {"grid"}},
        {"kind", {"model"}},
        {"model", {"model"}}, // accepted alias for kind
        {"mu", {"model"}},
        {"sigma", {"model"}},
        {"gamma0", {"model"}},
        {"theta", {"model"}},
        {"tau", {"model"}},
        {"a", {"constraint"}},
        {"b", {"constraint"}},
        {"dt0", {"solver"}},
        {"tol_grad", {"solver"}},
        {"tol_pohozaev", {"solver"}},
        {"max_iters", {"solver"}},
        {"reproject_every", {"solver"}},
        {"n_starts", {"solver"}},
        {"seed", {"solver"}},
        {"s_scan", {"solver"}},
        {"s_range", {"solver"}},
        {"s_max", {"solver"}},
        {"trail_stride", {"solver"}},
        {"envelope_q", {"verify"}},
        {"envelope_eps", {"verify"}},
        {"audit_box", {"verify"}},
        {"audit_samples", {"verify"}},
        {"axis_margin", {"verify"}},
        {"gn_cap", {"verify"}},
        {"probe_samples", {"verify"}},
    };
    return table;
}

const std::array<std::string, 5>& section_names() {
    static const std::array<std::string, 5> names = {"grid", "model", "constraint", "solver",
                                                     "verify"};
    return names;
}

} // namespace

ParsedConfig parse_config(const std::string& text) {
    RawConfig raw;
    std::string section;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find_first_of("#;"); hash != std::string::npos)
            line.erase(hash);
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno),
                                  {}, lineno);
            section = trim(t.substr(1, t.size() - 2));
            const auto& names = section_names();
            if (std::find(names.begin(), names.end(), section) == names.end())
                throw ConfigError("unknown section [" + section + "] at line " +
                                      std::to_string(lineno),
                                  section, lineno);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno), {},
                              lineno);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        const auto it = key_table().find(key);
        if (it == key_table().end())
            throw ConfigError("unknown key '" + key + "' at line " + std::to_string(lineno),
                              key, lineno);
        if (!section.empty() && section != it->second.section)
            throw ConfigError("key '" + key + "' does not belong to section [" + section +
                                  "] at line " + std::to_string(lineno),
                              key, lineno);
        if (key == "model")
            key = "kind";
        if (raw.values.count(key))
            throw ConfigError("duplicate key '" + key + "' at line " + std::to_string(lineno),
                              key, lineno);
        raw.values[key] = {value, lineno};
    }

    auto take = [&](const char* key) -> std::optional<std::pair<std::string, int>> {
        auto it = raw.values.find(key);
        if (it == raw.values.end())
            return std::nullopt;
        auto out = it->second;
        raw.values.erase(it);
        return out;
    };
    auto required = [&](const char* key) {
        auto v = take(key);
        if (!v)
            throw ConfigError(std::string("missing required key '") + key + "'", key);
        return *v;
    };
    auto dbl = [&](const char* key, double fallback) {
        auto v = take(key);
        return v ? parse_double(v->first, key, v->second) : fallback;
    };
    auto integer = [&](const char* key, long long fallback) {
        auto v = take(key);
        return v ? parse_int(v->first, key, v->second) : fallback;
    };

    ParsedConfig out;
    SolverConfig& cfg = out.config;

    // model
    const auto kind_raw = required("kind");
    const ModelKind kind = model_kind_from_string(kind_raw.first);
    const auto mu_raw = required("mu");
    const double mu = parse_double(mu_raw.first, "mu", mu_raw.second);
    if (!(mu > 0.0))
        throw ConfigError("mu must be positive", "mu", mu_raw.second);
    const auto sigma_raw = required("sigma");
    const double sigma = parse_double(sigma_raw.first, "sigma", sigma_raw.second);
    const double gamma0 = dbl("gamma0", 1.0);
    std::optional<double> theta, tau;
    if (auto v = take("theta"))
        theta = parse_double(v->first, "theta", v->second);
    if (auto v = take("tau"))
        tau = parse_double(v->first, "tau", v->second);
    cfg.model = NonlinearityModel(kind, mu, sigma, gamma0, theta, tau);

    // constraint
    const auto a_raw = required("a");
    const auto b_raw = required("b");
    cfg.constraint = MassConstraint(parse_double(a_raw.first, "a", a_raw.second),
                                    parse_double(b_raw.first, "b", b_raw.second), gamma0);

    // grid
    cfg.grid.r = dbl("r", 12.0);
    cfg.grid.n = static_cast<int>(integer("n", 1024));
    if (auto v = take("spacing")) {
        const std::string& sp = v->first;
        if (sp == "uniform") {
            cfg.grid.spacing = GridSpacing::uniform();
        } else if (sp.rfind("geometric:", 0) == 0) {
            cfg.grid.spacing =
                GridSpacing::geometric(parse_double(sp.substr(10), "spacing", v->second));
        } else {
            throw ConfigError("spacing must be 'uniform' or 'geometric:<ratio>' at line " +
                                  std::to_string(v->second),
                              "spacing", v->second);
        }
    }

    // solver
    cfg.flow.dt0 = dbl("dt0", cfg.flow.dt0);
    cfg.flow.tol_grad = dbl("tol_grad", cfg.flow.tol_grad);
    cfg.flow.tol_pohozaev = dbl("tol_pohozaev", cfg.flow.tol_pohozaev);
    cfg.flow.max_iters = static_cast<int>(integer("max_iters", cfg.flow.max_iters));
    cfg.flow.reproject_every =
        static_cast<int>(integer("reproject_every", cfg.flow.reproject_every));
    cfg.flow.n_starts = static_cast<int>(integer("n_starts", cfg.flow.n_starts));
    cfg.flow.seed = static_cast<std::uint64_t>(integer("seed", (long long)cfg.flow.seed));
    cfg.flow.s_scan = dbl("s_scan", cfg.flow.s_scan);
    cfg.flow.s_range = dbl("s_range", cfg.flow.s_range);
    cfg.flow.s_max = dbl("s_max", cfg.flow.s_max);
    cfg.flow.trail_stride = static_cast<int>(integer("trail_stride", cfg.flow.trail_stride));

    // verify
    cfg.verify.envelope_q = dbl("envelope_q", cfg.verify.envelope_q);
    cfg.verify.envelope_eps = dbl("envelope_eps", cfg.verify.envelope_eps);
    cfg.verify.audit_box = dbl("audit_box", cfg.verify.audit_box);
    cfg.verify.audit_samples =
        static_cast<int>(integer("audit_samples", cfg.verify.audit_samples));
    cfg.verify.axis_margin = dbl("axis_margin", cfg.verify.axis_margin);
    cfg.verify.gn_cap = dbl("gn_cap", cfg.verify.gn_cap);
    cfg.verify.probe_samples =
        static_cast<int>(integer("probe_samples", cfg.verify.probe_samples));

    if (!raw.values.empty()) {
        const auto& [key, where] = *raw.values.begin();
        throw ConfigError("unused key '" + key + "' at line " + std::to_string(where.second),
                          key, where.second);
    }

    cfg.validate();
    if (auto warn = cfg.admissibility_warning())
        out.warnings.push_back(*warn);
    return out;
}

ParsedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string fmt(double x) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

std::string render_config(const SolverConfig& c) {
    std::ostringstream os;
    os << "[grid]\n";
    os << "r = " << fmt(c.grid.r) << "\n";
    os << "n = " << c.grid.n << "\n";
    if (c.grid.spacing.kind == GridSpacing::Kind::Geometric)
        os << "spacing = geometric:" << fmt(c.grid.spacing.ratio) << "\n";
    else
        os << "spacing = uniform\n";
    os << "\n[model]\n";
    os << "kind = " << to_string(c.model.kind()) << "\n";
    os << "mu = " << fmt(c.model.mu()) << "\n";
    os << "sigma = " << fmt(c.model.sigma()) << "\n";
    os << "gamma0 = " << fmt(c.model.gamma0()) << "\n";
    os << "theta = " << fmt(c.model.theta()) << "\n";
    os << "tau = " << fmt(c.model.tau()) << "\n";
    os << "\n[constraint]\n";
    os << "a = " << fmt(c.constraint.a) << "\n";
    os << "b = " << fmt(c.constraint.b) << "\n";
    os << "\n[solver]\n";
    os << "dt0 = " << fmt(c.flow.dt0) << "\n";
    os << "tol_grad = " << fmt(c.flow.tol_grad) << "\n";
    os << "tol_pohozaev = " << fmt(c.flow.tol_pohozaev) << "\n";
    os << "max_iters = " << c.flow.max_iters << "\n";
    os << "reproject_every = " << c.flow.reproject_every << "\n";
    os << "n_starts = " << c.flow.n_starts << "\n";
    os << "seed = " << c.flow.seed << "\n";
    os << "s_scan = " << fmt(c.flow.s_scan) << "\n";
    os << "s_range = " << fmt(c.flow.s_range) << "\n";
    os << "s_max = " << fmt(c.flow.s_max) << "\n";
    os << "trail_stride = " << c.flow.trail_stride << "\n";
    os << "\n[verify]\n";
    os << "envelope_q = " << fmt(c.verify.envelope_q) << "\n";
    os << "envelope_eps = " << fmt(c.verify.envelope_eps) << "\n";
    os << "audit_box = " << fmt(c.verify.audit_box) << "\n";
    os << "audit_samples = " << c.verify.audit_samples << "\n";
    os << "axis_margin = " << fmt(c.verify.axis_margin) << "\n";
    os << "gn_cap = " << fmt(c.verify.gn_cap) << "\n";
    os << "probe_samples = " << c.verify.probe_samples << "\n";
    return os.str();
}

} // namespace gs2d
