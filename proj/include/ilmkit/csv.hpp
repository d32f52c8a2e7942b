#ifndef ILMKIT_CSV_HPP
#define ILMKIT_CSV_HPP

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/events.hpp"
#include "ilmkit/mcmc.hpp"
#include "ilmkit/population.hpp"
#include "ilmkit/predictive.hpp"

namespace ilm {

// Shortest round-trip formatting: locale-independent and byte-stable, so
// identical runs produce identical files.
inline std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw data_error(context + ": cannot parse number '" + s + "'");
    return v;
}

inline long parse_long(const std::string& s, const std::string& context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw data_error(context + ": cannot parse integer '" + s + "'");
    return v;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw data_error("empty file: " + path);
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        table.rows.push_back(split_csv_line(line));
        if (table.rows.back().size() != table.header.size())
            throw data_error(path + ": row " + std::to_string(table.rows.size()) +
                             " has wrong field count");
    }
    return table;
}

inline void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                           const std::string& path) {
    if (table.header != expected) {
        std::string want;
        for (const std::string& h : expected) want += (want.empty() ? "" : ",") + h;
        throw data_error(path + ": expected header '" + want + "'");
    }
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    out << content;
    if (!out.good()) throw data_error("write failed: " + path);
}

// ---- population: id,x,y ----------------------------------------------------

inline void write_population(const std::string& path, const Population& pop) {
    std::string s = "id,x,y\n";
    for (std::size_t i = 0; i < pop.size(); ++i)
        s += std::to_string(i) + "," + format_double(pop.x(i)) + "," + format_double(pop.y(i)) +
             "\n";
    write_text_file(path, s);
}

inline Population read_population(const std::string& path) {
    const CsvTable table = read_csv(path);
    require_header(table, {"id", "x", "y"}, path);
    const std::size_t n = table.rows.size();
    std::vector<std::pair<double, double>> coords(n);
    std::vector<char> seen(n, 0);
    for (const auto& row : table.rows) {
        const long id = parse_long(row[0], path);
        if (id < 0 || id >= static_cast<long>(n) || seen[static_cast<std::size_t>(id)])
            throw data_error(path + ": ids must cover 0.." + std::to_string(n - 1) +
                             " exactly once");
        seen[static_cast<std::size_t>(id)] = 1;
        coords[static_cast<std::size_t>(id)] = {parse_double(row[1], path),
                                                parse_double(row[2], path)};
    }
    try {
        return build_population(coords);
    } catch (const input_error& e) {
        throw data_error(path + ": " + e.what());
    }
}

// ---- events: id,t_exposed,t_infectious,t_removed ---------------------------

inline void write_events(const std::string& path, const EventHistory& history) {
    auto field = [](const std::optional<int>& t) {
        return t.has_value() ? std::to_string(*t) : std::string();
    };
    std::string s = "id,t_exposed,t_infectious,t_removed\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        const IndividualEvents& e = history.events[i];
        s += std::to_string(i) + "," + field(e.exposure) + "," + field(e.infectious) + "," +
             field(e.removal) + "\n";
    }
    write_text_file(path, s);
}

// Rows may arrive in any order; individuals without a row never leave the
// susceptible state. Validation against a framework/horizon happens when the
// caller assembles the EventHistory.
inline std::vector<IndividualEvents> read_events(const std::string& path, std::size_t n) {
    const CsvTable table = read_csv(path);
    require_header(table, {"id", "t_exposed", "t_infectious", "t_removed"}, path);
    std::vector<IndividualEvents> events(n);
    std::vector<char> seen(n, 0);
    auto field = [&](const std::string& s) -> std::optional<int> {
        if (s.empty()) return std::nullopt;
        return static_cast<int>(parse_long(s, path));
    };
    for (const auto& row : table.rows) {
        const long id = parse_long(row[0], path);
        if (id < 0 || id >= static_cast<long>(n))
            throw data_error(path + ": id " + std::to_string(id) + " outside population 0.." +
                             std::to_string(n - 1));
        if (seen[static_cast<std::size_t>(id)])
            throw data_error(path + ": duplicate id " + std::to_string(id));
        seen[static_cast<std::size_t>(id)] = 1;
        events[static_cast<std::size_t>(id)] = {field(row[1]), field(row[2]), field(row[3])};
    }
    return events;
}

// ---- epidemic curve: t,new_infections --------------------------------------

inline void write_curve(const std::string& path, const std::vector<int>& curve) {
    std::string s = "t,new_infections\n";
    for (std::size_t t = 0; t < curve.size(); ++t)
        s += std::to_string(t + 1) + "," + std::to_string(curve[t]) + "\n";
    write_text_file(path, s);
}

inline std::vector<int> read_curve(const std::string& path) {
    const CsvTable table = read_csv(path);
    require_header(table, {"t", "new_infections"}, path);
    std::vector<int> curve;
    for (const auto& row : table.rows)
        curve.push_back(static_cast<int>(parse_long(row[1], path)));
    return curve;
}

// ---- posterior draws: iter,log_post,<params...> ----------------------------

inline void write_draws(const std::string& path, const std::vector<std::string>& names,
                        const ChainOutput& chain) {
    std::string s = "iter,log_post";
    for (const std::string& n : names) s += "," + n;
    s += "\n";
    for (std::size_t k = 0; k < chain.draws.size(); ++k) {
        s += std::to_string(chain.kept_iterations[k]) + "," + format_double(chain.log_post[k]);
        for (double x : chain.draws[k]) s += "," + format_double(x);
        s += "\n";
    }
    write_text_file(path, s);
}

struct DrawsFile {
    std::vector<std::string> names;
    DrawMatrix draws;
    std::vector<double> log_post;
};

inline DrawsFile read_draws(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header.size() < 3 || table.header[0] != "iter" || table.header[1] != "log_post")
        throw data_error(path + ": expected header 'iter,log_post,<params...>'");
    DrawsFile out;
    out.names.assign(table.header.begin() + 2, table.header.end());
    for (const auto& row : table.rows) {
        out.log_post.push_back(parse_double(row[1], path));
        std::vector<double> theta;
        for (std::size_t c = 2; c < row.size(); ++c) theta.push_back(parse_double(row[c], path));
        out.draws.push_back(std::move(theta));
    }
    return out;
}

// ---- predictive envelope: t,median,q025,q975 --------------------------------

inline void write_envelope(const std::string& path, const PredictiveEnvelope& env) {
    std::string s = "t,median,q025,q975\n";
    for (std::size_t t = 0; t < env.median.size(); ++t)
        s += std::to_string(t + 1) + "," + format_double(env.median[t]) + "," +
             format_double(env.q025[t]) + "," + format_double(env.q975[t]) + "\n";
    write_text_file(path, s);
}

}  // namespace ilm

#endif
