// CSV and JSON emission. Numbers use %.17g, '\n' line endings and no
// timestamps, so identical runs give byte-identical files.

#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fqt/currents.hpp"
#include "fqt/io/config.hpp"
#include "fqt/version.hpp"

namespace fqt::io {

inline constexpr const char* csv_columns = "j_e,j_b,j_c,beta_plus,beta_minus,residual,bm_flag,status";

// One emitted table: a sweep, or a single point shown as a one-row sweep.
struct Table {
    SweepAxis axis{SweepAxis::tb};
    std::vector<SweepRow> rows;
    std::vector<std::optional<double>> beta_plus;  // one per row
    std::vector<std::optional<double>> beta_minus;
};

inline Table to_table(const SweepResult& r) {
    Table t;
    t.axis = r.axis;
    t.rows = r.rows;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        t.beta_plus.push_back(r.beta_plus_at(i));
        t.beta_minus.push_back(r.beta_minus_at(i));
    }
    return t;
}

inline std::string format_beta(const std::optional<double>& b) {
    if (!b) return "";
    if (std::isinf(*b)) return *b > 0 ? "inf" : "-inf";
    return format_double(*b);
}

inline std::string status_of(const SweepRow& r) {
    return r.ok() ? "ok" : "error:" + r.error_code;
}

inline void write_csv(std::ostream& os, const Table& t) {
    os << to_string(t.axis) << ',' << csv_columns << '\n';
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const SweepRow& r = t.rows[i];
        os << format_double(r.s) << ',';
        if (r.ok()) {
            const CurrentsReport& c = *r.report;
            os << format_double(c.j_e) << ',' << format_double(c.j_b) << ',' << format_double(c.j_c)
               << ',' << format_beta(t.beta_plus[i]) << ',' << format_beta(t.beta_minus[i]) << ','
               << format_double(c.conservation_residual) << ',' << (c.born_markov.flag ? 1 : 0);
        } else {
            os << ",,,,,,";
        }
        os << ',' << status_of(r) << '\n';
    }
}

inline nlohmann::ordered_json beta_json(const std::optional<double>& b) {
    if (!b) return nullptr;
    if (std::isinf(*b)) return "divergent";
    return *b;
}

inline nlohmann::ordered_json config_json(const SweepConfig& c, std::string_view mode) {
    nlohmann::ordered_json j;
    j["mode"] = mode;
    j["axis"] = to_string(c.axis);
    j["grid"] = {{"min", c.grid.min},
                 {"max", c.grid.max},
                 {"points", c.grid.points},
                 {"spacing", c.grid.spacing == Spacing::log ? "log" : "linear"}};
    const SystemParams& s = c.params;
    j["system"] = {{"omega_e", s.omega_e},   {"omega_0", s.omega_0},   {"omega_c", s.omega_c},
                   {"omega_eb", s.omega_eb}, {"omega_bc", s.omega_bc}, {"omega_ce", s.omega_ce}};
    j["baths"] = {{"t_e", c.baths.t_e},
                  {"t_b", c.baths.t_b},
                  {"t_c", c.baths.t_c},
                  {"kappa", c.baths.kappa}};
    nlohmann::ordered_json m;
    m["scheme"] = scheme_name(s.modulation);
    std::visit(
        [&m](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Sinusoidal>) m["lambda"] = v.lambda;
            if constexpr (std::is_same_v<T, Tabulated>) m["waveform"] = v.waveform;
            if constexpr (!std::is_same_v<T, Unmodulated>) m["nu"] = v.nu;
        },
        s.modulation);
    j["modulation"] = m;
    j["weights"] = {
        {"backend", c.weights.backend == WeightsBackend::closed_form ? "closed" : "quadrature"},
        {"q_max", c.weights.q_max},
        {"renormalize", c.weights.renormalize}};
    return j;
}

inline void write_json(std::ostream& os, const Table& t, const nlohmann::ordered_json& config) {
    nlohmann::ordered_json doc;
    doc["version"] = version;
    doc["config"] = config;
    doc["columns"] = nlohmann::ordered_json::array(
        {to_string(t.axis), "j_e", "j_b", "j_c", "beta_plus", "beta_minus", "residual", "bm_flag",
         "status"});
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const SweepRow& r = t.rows[i];
        nlohmann::ordered_json row;
        row[std::string(to_string(t.axis))] = r.s;
        if (r.ok()) {
            const CurrentsReport& c = *r.report;
            row["j_e"] = c.j_e;
            row["j_b"] = c.j_b;
            row["j_c"] = c.j_c;
            row["beta_plus"] = beta_json(t.beta_plus[i]);
            row["beta_minus"] = beta_json(t.beta_minus[i]);
            row["residual"] = c.conservation_residual;
            row["bm_flag"] = c.born_markov.flag;
            row["status"] = "ok";
        } else {
            for (const char* k : {"j_e", "j_b", "j_c", "beta_plus", "beta_minus", "residual",
                                  "bm_flag"}) {
                row[k] = nullptr;
            }
            row["status"] = status_of(r);
            row["message"] = r.error_message;
        }
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
}

} // namespace fqt::io
