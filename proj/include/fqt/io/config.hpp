// Run configuration: a flat sectioned key = value format.
//
//   # comment
//   [section]
//   key = 1.5e-2          # number
//   key = word            # bare word
//   key = "text"          # quoted string
//   key = true            # boolean
//   key = [0.1, 0.2]      # number array
//
// Sections: [run], [system], [baths], [modulation], [output]. Unknown sections
// or keys and duplicate keys are errors.

#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fqt/currents.hpp"
#include "fqt/error.hpp"
#include "fqt/floquet.hpp"
#include "fqt/model.hpp"

namespace fqt::io {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RunMode { point, sweep_tb, sweep_nu, preset };
enum class OutputFormat { csv, json };

inline std::string_view to_string(RunMode m) noexcept {
    switch (m) {
    case RunMode::point: return "point";
    case RunMode::sweep_tb: return "sweep-tb";
    case RunMode::sweep_nu: return "sweep-nu";
    case RunMode::preset: return "preset";
    }
    return "?";
}

inline std::string_view to_string(OutputFormat f) noexcept {
    return f == OutputFormat::csv ? "csv" : "json";
}

struct RunConfig {
    RunMode mode{RunMode::point};
    std::string preset;
    SystemParams system{SystemParams::canonical()};
    BathSpec baths;
    WeightOptions weights;
    GridSpec grid;
    unsigned threads{0};
    std::string output_path;
    OutputFormat format{OutputFormat::csv};
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

struct Value {
    enum class Kind { number, word, string, boolean, array } kind{Kind::word};
    std::string text;
    double number{0.0};
    bool boolean{false};
    std::vector<double> array;
    int line{0};
};

using Section = std::map<std::string, Value>;

[[noreturn]] inline void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

inline Value parse_value(std::string_view raw, int line) {
    const std::string_view s = trim(raw);
    Value v;
    v.line = line;
    if (s.empty()) fail(line, "missing value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
        v.kind = Value::Kind::string;
        v.text = std::string(s.substr(1, s.size() - 2));
        return v;
    }
    if (s.front() == '[') {
        if (s.back() != ']') fail(line, "unterminated array");
        v.kind = Value::Kind::array;
        std::string_view body = trim(s.substr(1, s.size() - 2));
        while (!body.empty()) {
            const auto comma = body.find(',');
            const auto item = trim(body.substr(0, comma));
            const auto num = parse_number(item);
            if (!num) fail(line, "array entry '" + std::string(item) + "' is not a number");
            v.array.push_back(*num);
            if (comma == std::string_view::npos) break;
            body = trim(body.substr(comma + 1));
            if (body.empty()) fail(line, "trailing comma in array");
        }
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = Value::Kind::boolean;
        v.boolean = s == "true";
        return v;
    }
    if (const auto num = parse_number(s)) {
        v.kind = Value::Kind::number;
        v.number = *num;
        return v;
    }
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
              c == '/')) {
            fail(line, "cannot parse value '" + std::string(s) + "'");
        }
    }
    v.kind = Value::Kind::word;
    v.text = std::string(s);
    return v;
}

inline std::map<std::string, Section> tokenize(std::string_view text) {
    static const std::set<std::string> sections{"run", "system", "baths", "modulation", "output"};
    std::map<std::string, Section> doc;
    std::string current;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string_view s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line_no, "malformed section header");
            current = std::string(trim(s.substr(1, s.size() - 2)));
            if (!sections.count(current)) fail(line_no, "unknown section [" + current + "]");
            if (doc.count(current)) fail(line_no, "duplicate section [" + current + "]");
            doc[current];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
        if (current.empty()) fail(line_no, "key outside of any section");
        const std::string key(trim(s.substr(0, eq)));
        if (key.empty()) fail(line_no, "empty key");
        for (char c : key) {
            if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
                  c == '_')) {
                fail(line_no, "key '" + key + "' must be lowercase snake_case");
            }
        }
        Section& sec = doc[current];
        if (sec.count(key)) fail(line_no, "duplicate key '" + key + "' in [" + current + "]");
        sec[key] = parse_value(s.substr(eq + 1), line_no);
    }
    return doc;
}

// Typed, consuming access to one section; leftover keys are reported as unknown.
class Reader {
public:
    Reader(std::string name, Section sec) : name_(std::move(name)), sec_(std::move(sec)) {}

    std::optional<double> number(const std::string& key) {
        auto v = take(key);
        if (!v) return std::nullopt;
        if (v->kind != Value::Kind::number) fail(v->line, where(key) + " must be a number");
        return v->number;
    }

    std::optional<std::string> word(const std::string& key) {
        auto v = take(key);
        if (!v) return std::nullopt;
        if (v->kind != Value::Kind::word && v->kind != Value::Kind::string) {
            fail(v->line, where(key) + " must be a word or string");
        }
        return v->text;
    }

    std::optional<bool> boolean(const std::string& key) {
        auto v = take(key);
        if (!v) return std::nullopt;
        if (v->kind != Value::Kind::boolean) fail(v->line, where(key) + " must be true or false");
        return v->boolean;
    }

    std::optional<std::vector<double>> array(const std::string& key) {
        auto v = take(key);
        if (!v) return std::nullopt;
        if (v->kind != Value::Kind::array) fail(v->line, where(key) + " must be an array");
        return v->array;
    }

    std::optional<long long> integer(const std::string& key) {
        auto v = take(key);
        if (!v) return std::nullopt;
        if (v->kind != Value::Kind::number || v->number != static_cast<double>(
                                                                static_cast<long long>(v->number))) {
            fail(v->line, where(key) + " must be an integer");
        }
        return static_cast<long long>(v->number);
    }

    int line_of(const std::string& key) const {
        const auto it = seen_.find(key);
        return it == seen_.end() ? 0 : it->second;
    }

    void finish() const {
        if (!sec_.empty()) {
            const auto& [key, v] = *sec_.begin();
            fail(v.line, "unknown key '" + key + "' in [" + name_ + "]");
        }
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

private:
    std::optional<Value> take(const std::string& key) {
        const auto it = sec_.find(key);
        if (it == sec_.end()) return std::nullopt;
        Value v = it->second;
        seen_[key] = v.line;
        sec_.erase(it);
        return v;
    }

    std::string name_;
    Section sec_;
    std::map<std::string, int> seen_;
};

// Re-raises a model validation failure with the offending location.
template <class F>
void check(const Reader& r, const std::string& key, F&& f) {
    try {
        f();
    } catch (const ModelError& e) {
        const int line = r.line_of(key);
        throw ConfigError((line > 0 ? "config line " + std::to_string(line) + ": " : "config: ") +
                          r.where(key) + ": " + e.what());
    }
}

} // namespace detail

inline bool is_preset_name(std::string_view name) {
    return name == "fig4" || name == "fig5" || name == "fig6" || name == "fig8" ||
           name == "fig10" || name == "fig11";
}

inline WeightsBackend parse_backend(std::string_view s) {
    if (s == "closed" || s == "closed-form" || s == "closed_form") return WeightsBackend::closed_form;
    if (s == "quadrature") return WeightsBackend::quadrature;
    throw ConfigError("weights backend must be 'closed' or 'quadrature', got '" + std::string(s) +
                      "'");
}

inline OutputFormat parse_format(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("output format must be 'csv' or 'json', got '" + std::string(s) + "'");
}

inline RunConfig parse_config(std::string_view text) {
    using detail::Reader;
    auto doc = detail::tokenize(text);
    auto section = [&doc](const std::string& name) {
        auto it = doc.find(name);
        Reader r(name, it == doc.end() ? detail::Section{} : it->second);
        return r;
    };

    RunConfig cfg;
    Reader run = section("run");
    const std::string mode = run.word("mode").value_or("point");
    if (mode == "point") {
        cfg.mode = RunMode::point;
    } else if (mode == "sweep-tb" || mode == "sweep_tb") {
        cfg.mode = RunMode::sweep_tb;
    } else if (mode == "sweep-nu" || mode == "sweep_nu") {
        cfg.mode = RunMode::sweep_nu;
    } else if (mode == "preset" || mode == "figure-preset") {
        cfg.mode = RunMode::preset;
    } else {
        detail::fail(run.line_of("mode"),
                     "[run] mode must be point, sweep-tb, sweep-nu or preset, got '" + mode + "'");
    }
    if (auto p = run.word("preset")) {
        if (!is_preset_name(*p)) {
            detail::fail(run.line_of("preset"), "[run] preset '" + *p +
                                                    "' is not one of fig4, fig5, fig6, fig8, "
                                                    "fig10, fig11");
        }
        cfg.preset = *p;
        if (!run.line_of("mode")) cfg.mode = RunMode::preset;
    }
    if (cfg.mode == RunMode::preset && cfg.preset.empty()) {
        detail::fail(run.line_of("mode"), "[run] mode = preset needs a preset name");
    }
    if (auto b = run.word("weights")) {
        try {
            cfg.weights.backend = parse_backend(*b);
        } catch (const ConfigError& e) {
            detail::fail(run.line_of("weights"), e.what());
        }
    }
    if (auto q = run.integer("q_max")) {
        if (*q < 0 || *q > max_harmonic_order) {
            detail::fail(run.line_of("q_max"), "[run] q_max must lie in [0, 10]");
        }
        cfg.weights.q_max = static_cast<int>(*q);
    }
    if (auto r = run.boolean("renormalize")) cfg.weights.renormalize = *r;
    if (auto t = run.integer("threads")) {
        if (*t < 0) detail::fail(run.line_of("threads"), "[run] threads must be >= 0");
        cfg.threads = static_cast<unsigned>(*t);
    }
    const bool sweep = cfg.mode == RunMode::sweep_tb || cfg.mode == RunMode::sweep_nu;
    cfg.grid.spacing = cfg.mode == RunMode::sweep_tb ? Spacing::log : Spacing::linear;
    const auto gmin = run.number("grid_min");
    const auto gmax = run.number("grid_max");
    const auto gpts = run.integer("grid_points");
    const auto gsp = run.word("grid_spacing");
    if (sweep) {
        if (!gmin || !gmax) {
            detail::fail(run.line_of("mode"), "[run] sweeps need grid_min and grid_max");
        }
        cfg.grid.min = *gmin;
        cfg.grid.max = *gmax;
        if (gpts) {
            if (*gpts < 3) detail::fail(run.line_of("grid_points"), "[run] grid_points must be >= 3");
            cfg.grid.points = static_cast<std::size_t>(*gpts);
        }
        if (gsp) {
            if (*gsp == "linear") {
                cfg.grid.spacing = Spacing::linear;
            } else if (*gsp == "log") {
                cfg.grid.spacing = Spacing::log;
            } else {
                detail::fail(run.line_of("grid_spacing"), "[run] grid_spacing must be linear or log");
            }
        }
        detail::check(run, "grid_min", [&] { (void)make_grid(cfg.grid); });
    }
    run.finish();

    if (cfg.mode != RunMode::preset && !doc.count("baths")) {
        throw ConfigError("config: missing required section [baths]");
    }

    Reader sys = section("system");
    auto set = [](Reader& r, const char* key, double& dst) {
        if (auto v = r.number(key)) dst = *v;
    };
    set(sys, "omega_e", cfg.system.omega_e);
    set(sys, "omega_0", cfg.system.omega_0);
    set(sys, "omega_c", cfg.system.omega_c);
    set(sys, "omega_eb", cfg.system.omega_eb);
    set(sys, "omega_bc", cfg.system.omega_bc);
    set(sys, "omega_ce", cfg.system.omega_ce);
    sys.finish();

    Reader baths = section("baths");
    for (const char* key : {"t_e", "t_c"}) {
        if (cfg.mode != RunMode::preset && !doc["baths"].count(key)) {
            throw ConfigError(std::string("config: [baths] is missing required key '") + key + "'");
        }
    }
    set(baths, "t_e", cfg.baths.t_e);
    set(baths, "t_b", cfg.baths.t_b);
    set(baths, "t_c", cfg.baths.t_c);
    set(baths, "kappa", cfg.baths.kappa);
    baths.finish();
    detail::check(baths, "t_e", [&] { validate(cfg.baths); });

    Reader mod = section("modulation");
    const std::string scheme = mod.word("scheme").value_or("unmodulated");
    const auto lambda = mod.number("lambda");
    const auto nu = mod.number("nu");
    const auto waveform = mod.array("waveform");
    auto reject = [&](bool present, const char* key) {
        if (present) {
            detail::fail(mod.line_of(key), std::string("[modulation] ") + key +
                                               " does not apply to scheme '" + scheme + "'");
        }
    };
    if (scheme == "unmodulated") {
        reject(lambda.has_value(), "lambda");
        reject(nu.has_value(), "nu");
        reject(waveform.has_value(), "waveform");
        cfg.system.modulation = Unmodulated{};
    } else if (scheme == "sinusoidal") {
        reject(waveform.has_value(), "waveform");
        if (!lambda) throw ConfigError("config: [modulation] sinusoidal needs lambda");
        cfg.system.modulation = Sinusoidal{*lambda, nu.value_or(1.0)};
    } else if (scheme == "pi_flip" || scheme == "pi-flip") {
        reject(lambda.has_value(), "lambda");
        reject(waveform.has_value(), "waveform");
        cfg.system.modulation = PiFlip{nu.value_or(1.0)};
    } else if (scheme == "tabulated") {
        reject(lambda.has_value(), "lambda");
        if (!waveform) throw ConfigError("config: [modulation] tabulated needs waveform");
        cfg.system.modulation = Tabulated{*waveform, nu.value_or(1.0)};
    } else {
        detail::fail(mod.line_of("scheme"),
                     "[modulation] scheme must be unmodulated, sinusoidal, pi_flip or tabulated");
    }
    mod.finish();
    detail::check(mod, lambda ? "lambda" : "nu", [&] { validate(cfg.system); });

    if (cfg.mode == RunMode::sweep_nu && std::holds_alternative<Unmodulated>(cfg.system.modulation)) {
        throw ConfigError("config: sweep-nu needs a modulated [modulation] scheme");
    }
    if (std::holds_alternative<Tabulated>(cfg.system.modulation) &&
        cfg.weights.backend == WeightsBackend::closed_form && cfg.mode != RunMode::preset) {
        throw ConfigError("config: tabulated modulation needs [run] weights = quadrature");
    }

    Reader out = section("output");
    if (auto p = out.word("path")) cfg.output_path = *p;
    if (auto f = out.word("format")) {
        try {
            cfg.format = parse_format(*f);
        } catch (const ConfigError& e) {
            detail::fail(out.line_of("format"), e.what());
        }
    }
    out.finish();
    return cfg;
}

// Inverse of parse_config for non-preset modes.
inline std::string render_config(const RunConfig& c) {
    std::ostringstream os;
    const auto num = [](double v) { return format_double(v); };
    os << "[run]\nmode = " << to_string(c.mode) << '\n';
    if (!c.preset.empty()) os << "preset = " << c.preset << '\n';
    os << "weights = " << (c.weights.backend == WeightsBackend::closed_form ? "closed" : "quadrature")
       << "\nq_max = " << c.weights.q_max
       << "\nrenormalize = " << (c.weights.renormalize ? "true" : "false") << '\n';
    if (c.mode == RunMode::sweep_tb || c.mode == RunMode::sweep_nu) {
        os << "grid_min = " << num(c.grid.min) << "\ngrid_max = " << num(c.grid.max)
           << "\ngrid_points = " << c.grid.points
           << "\ngrid_spacing = " << (c.grid.spacing == Spacing::log ? "log" : "linear") << '\n';
    }
    const SystemParams& s = c.system;
    os << "\n[system]\nomega_e = " << num(s.omega_e) << "\nomega_0 = " << num(s.omega_0)
       << "\nomega_c = " << num(s.omega_c) << "\nomega_eb = " << num(s.omega_eb)
       << "\nomega_bc = " << num(s.omega_bc) << "\nomega_ce = " << num(s.omega_ce) << '\n';
    os << "\n[baths]\nt_e = " << num(c.baths.t_e) << "\nt_b = " << num(c.baths.t_b)
       << "\nt_c = " << num(c.baths.t_c) << "\nkappa = " << num(c.baths.kappa) << '\n';
    os << "\n[modulation]\nscheme = " << scheme_name(s.modulation) << '\n';
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Sinusoidal>) os << "lambda = " << num(m.lambda) << '\n';
            if constexpr (std::is_same_v<T, Tabulated>) {
                os << "waveform = [";
                for (std::size_t i = 0; i < m.waveform.size(); ++i) {
                    os << (i ? ", " : "") << num(m.waveform[i]);
                }
                os << "]\n";
            }
            if constexpr (!std::is_same_v<T, Unmodulated>) os << "nu = " << num(m.nu) << '\n';
        },
        s.modulation);
    return os.str();
}

} // namespace fqt::io
