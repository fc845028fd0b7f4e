#include "nqpt/config.hpp"

#include "nqpt/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace nqpt {

namespace {

struct Source {
    std::string value;
    std::string where;  // "line 7" or "override --chi"
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const Source& src, const std::string& expect) {
    throw Error(ErrorKind::Parse, src.where + ": key '" + key + "' expects " + expect + ", got '" +
                                      src.value + "'");
}

double to_real(const std::string& key, const Source& src) {
    const std::string& s = src.value;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x))
        bad_value(key, src, "a finite real");
    return x;
}

long to_integer(const std::string& key, const Source& src) {
    const std::string& s = src.value;
    long x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, src, "an integer");
    return x;
}

bool to_bool(const std::string& key, const Source& src) {
    if (src.value == "1" || src.value == "true") return true;
    if (src.value == "0" || src.value == "false") return false;
    bad_value(key, src, "0/1 or true/false");
}

std::vector<double> to_list(const std::string& key, const Source& src) {
    std::vector<double> out;
    std::stringstream ss(src.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_real(key, {trim(item), src.where}));
    if (out.empty()) bad_value(key, src, "a comma-separated list of reals");
    return out;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_range(const std::optional<double>& lo, const std::optional<double>& hi, const char* name) {
    if (lo && hi && !(*lo < *hi))
        throw Error(ErrorKind::Parse, std::string(name) + ": range requires lo < hi");
}

void require(bool present, const std::string& key, Command c) {
    if (!present)
        throw Error(ErrorKind::MissingRequired,
                    "command '" + std::string(to_string(c)) + "' needs key '" + key + "'");
}

ExperimentConfig build(const std::map<std::string, Source>& kv) {
    ExperimentConfig c;
    const auto& keys = config_keys();
    for (const auto& [k, src] : kv) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw Error(ErrorKind::UnknownKey, src.where + ": unknown key '" + k + "'");
    }
    auto get = [&](const char* k) -> const Source* {
        const auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };

    const Source* cmd = get("command");
    if (!cmd) throw Error(ErrorKind::MissingRequired, "no command given");
    try {
        c.command = command_from_string(cmd->value);
    } catch (const Error&) {
        bad_value("command", *cmd, "one of steady, landau, sweep, phase-diagram, spectrum, entangle, gpe, validate");
    }

    auto real = [&](const char* k, double& dst) {
        if (const Source* s = get(k)) dst = to_real(k, *s);
    };
    auto opt_real = [&](const char* k, std::optional<double>& dst) {
        if (const Source* s = get(k)) dst = to_real(k, *s);
    };
    auto count = [&](const char* k, auto& dst, long min) {
        if (const Source* s = get(k)) {
            const long v = to_integer(k, *s);
            if (v < min) bad_value(k, *s, "an integer >= " + std::to_string(min));
            dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
        }
    };

    real("v", c.params.v);
    real("ng", c.params.ng);
    real("omega_a", c.params.omega_a);
    real("omega_m", c.params.omega_m);
    real("gamma_m", c.params.gamma_m);
    real("chi", c.params.chi);
    real("lambda", c.params.lambda_coll);
    real("n_bath", c.params.n_bath);
    if (const Source* s = get("lambda_unit")) {
        if (s->value == "absolute") c.lambda_unit = LambdaUnit::absolute;
        else if (s->value == "lambda_s2") c.lambda_unit = LambdaUnit::lambda_s2;
        else bad_value("lambda_unit", *s, "absolute or lambda_s2");
    }
    opt_real("lambda_lo", c.lambda_lo);
    opt_real("lambda_hi", c.lambda_hi);
    count("points", c.points, 2);
    if (const Source* s = get("lambda_list")) c.lambda_list = to_list("lambda_list", *s);
    count("surface_grid", c.surface_grid, 3);
    real("jump_threshold", c.jump_threshold);
    if (const Source* s = get("axis")) {
        if (s->value == "v") c.axis = ScanAxis::V;
        else if (s->value == "ng") c.axis = ScanAxis::Ng;
        else bad_value("axis", *s, "v or ng");
    }
    opt_real("axis_lo", c.axis_lo);
    opt_real("axis_hi", c.axis_hi);
    count("axis_points", c.axis_points, 1);
    opt_real("omega_a_lo", c.omega_a_lo);
    opt_real("omega_a_hi", c.omega_a_hi);
    count("omega_a_points", c.omega_a_points, 1);
    if (const Source* s = get("mode")) {
        try {
            c.mode = crit_mode_from_string(s->value);
        } catch (const Error&) {
            bad_value("mode", *s, "paper_formula or exact_numeric");
        }
    }
    if (const Source* s = get("source")) {
        if (s->value == "minimal") c.source = SpectrumSource::minimal;
        else if (s->value == "forward") c.source = SpectrumSource::forward;
        else if (s->value == "backward") c.source = SpectrumSource::backward;
        else bad_value("source", *s, "minimal, forward or backward");
    }
    count("mode_a", c.mode_a, 0);
    count("mode_b", c.mode_b, 0);
    count("n_grid", c.n_grid, 64);
    real("dtau", c.dtau);
    count("max_steps", c.max_steps, 1);
    if (const Source* s = get("check_grid")) c.check_grid = to_bool("check_grid", *s);
    count("threads", c.threads, 1);
    if (const Source* s = get("out")) c.out = s->value;

    check_range(c.lambda_lo, c.lambda_hi, "lambda_lo/lambda_hi");
    check_range(c.axis_lo, c.axis_hi, "axis_lo/axis_hi");
    check_range(c.omega_a_lo, c.omega_a_hi, "omega_a_lo/omega_a_hi");
    if (c.mode_a > 2 || c.mode_b > 2 || c.mode_a == c.mode_b)
        throw Error(ErrorKind::Parse, "mode_a/mode_b must be two different modes in 0..2");
    if (!(c.dtau > 0.0)) throw Error(ErrorKind::Parse, "dtau must be positive");

    switch (c.command) {
    case Command::sweep:
    case Command::spectrum:
    case Command::entangle:
        require(c.lambda_lo.has_value(), "lambda_lo", c.command);
        require(c.lambda_hi.has_value(), "lambda_hi", c.command);
        break;
    case Command::phase_diagram:
        require(c.axis_lo.has_value(), "axis_lo", c.command);
        require(c.axis_hi.has_value(), "axis_hi", c.command);
        require(c.omega_a_lo.has_value(), "omega_a_lo", c.command);
        require(c.omega_a_hi.has_value(), "omega_a_hi", c.command);
        break;
    case Command::validate:
        require(!c.lambda_list.empty() || (c.lambda_lo && c.lambda_hi), "lambda_list", c.command);
        break;
    default: break;
    }
    return c;
}

} // namespace

const char* to_string(Command c) {
    switch (c) {
    case Command::steady: return "steady";
    case Command::landau: return "landau";
    case Command::sweep: return "sweep";
    case Command::phase_diagram: return "phase-diagram";
    case Command::spectrum: return "spectrum";
    case Command::entangle: return "entangle";
    case Command::gpe: return "gpe";
    case Command::validate: return "validate";
    }
    return "?";
}

Command command_from_string(const std::string& s) {
    for (Command c : {Command::steady, Command::landau, Command::sweep, Command::phase_diagram,
                      Command::spectrum, Command::entangle, Command::gpe, Command::validate})
        if (s == to_string(c)) return c;
    throw Error(ErrorKind::Parse, "unknown command '" + s + "'");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "command",   "v",          "ng",           "omega_a",    "omega_m",        "gamma_m",
        "chi",       "lambda",     "n_bath",       "lambda_unit", "lambda_lo",     "lambda_hi",
        "points",    "lambda_list", "surface_grid", "jump_threshold", "axis",      "axis_lo",
        "axis_hi",   "axis_points", "omega_a_lo",  "omega_a_hi", "omega_a_points", "mode",
        "source",    "mode_a",     "mode_b",       "n_grid",     "dtau",           "max_steps",
        "check_grid", "threads",   "out"};
    return keys;
}

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
    std::map<std::string, Source> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(lineno);
        if (eq == std::string::npos)
            throw Error(ErrorKind::Parse, where + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorKind::Parse, where + ": empty key");
        if (kv.count(key)) throw Error(ErrorKind::Parse, where + ": duplicate key '" + key + "'");
        kv[key] = {value, where};
    }
    for (const auto& [k, v] : overrides) kv[k] = {trim(v), "override --" + k};
    return build(kv);
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Parse, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string serialize(const ExperimentConfig& c, const std::vector<std::string>& skip) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto put = [&](const char* k, const std::string& v) { kv.emplace_back(k, v); };
    put("command", to_string(c.command));
    put("v", fmt(c.params.v));
    put("ng", fmt(c.params.ng));
    put("omega_a", fmt(c.params.omega_a));
    put("omega_m", fmt(c.params.omega_m));
    put("gamma_m", fmt(c.params.gamma_m));
    put("chi", fmt(c.params.chi));
    put("lambda", fmt(c.params.lambda_coll));
    put("n_bath", fmt(c.params.n_bath));
    put("lambda_unit", c.lambda_unit == LambdaUnit::absolute ? "absolute" : "lambda_s2");
    if (c.lambda_lo) put("lambda_lo", fmt(*c.lambda_lo));
    if (c.lambda_hi) put("lambda_hi", fmt(*c.lambda_hi));
    put("points", std::to_string(c.points));
    if (!c.lambda_list.empty()) {
        std::string s;
        for (std::size_t i = 0; i < c.lambda_list.size(); ++i) s += (i ? "," : "") + fmt(c.lambda_list[i]);
        put("lambda_list", s);
    }
    put("surface_grid", std::to_string(c.surface_grid));
    put("jump_threshold", fmt(c.jump_threshold));
    put("axis", c.axis == ScanAxis::V ? "v" : "ng");
    if (c.axis_lo) put("axis_lo", fmt(*c.axis_lo));
    if (c.axis_hi) put("axis_hi", fmt(*c.axis_hi));
    put("axis_points", std::to_string(c.axis_points));
    if (c.omega_a_lo) put("omega_a_lo", fmt(*c.omega_a_lo));
    if (c.omega_a_hi) put("omega_a_hi", fmt(*c.omega_a_hi));
    put("omega_a_points", std::to_string(c.omega_a_points));
    put("mode", to_string(c.mode));
    put("source", c.source == SpectrumSource::minimal   ? "minimal"
                  : c.source == SpectrumSource::forward ? "forward"
                                                        : "backward");
    put("mode_a", std::to_string(c.mode_a));
    put("mode_b", std::to_string(c.mode_b));
    put("n_grid", std::to_string(c.n_grid));
    put("dtau", fmt(c.dtau));
    put("max_steps", std::to_string(c.max_steps));
    put("check_grid", c.check_grid ? "1" : "0");
    put("threads", std::to_string(c.threads));
    put("out", c.out);

    std::string s;
    for (const auto& [k, v] : kv) {
        if (std::find(skip.begin(), skip.end(), k) != skip.end()) continue;
        s += k + " = " + v + "\n";
    }
    return s;
}

} // namespace nqpt
