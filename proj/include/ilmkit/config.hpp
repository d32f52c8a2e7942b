#ifndef ILMKIT_CONFIG_HPP
#define ILMKIT_CONFIG_HPP

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ilmkit/errors.hpp"

namespace ilm {

// INI-style run configuration: [section] headers, key = value lines,
// comments from '#' or ';' to end of line. Values are kept verbatim
// (trimmed), so parse -> serialize -> parse is a fixed point.
class Config {
  public:
    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find_first_of("#;");
            if (hash != std::string::npos) line.erase(hash);
            const std::string t = trim(line);
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']' || t.size() < 3)
                    throw config_error("line " + std::to_string(lineno) + ": bad section header");
                section = trim(t.substr(1, t.size() - 2));
                continue;
            }
            const std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error("line " + std::to_string(lineno) + ": expected key = value");
            if (section.empty())
                throw config_error("line " + std::to_string(lineno) + ": entry outside a section");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty())
                throw config_error("line " + std::to_string(lineno) + ": empty key");
            if (cfg.find(section, key) != nullptr)
                throw config_error("duplicate key '" + key + "' in [" + section + "]");
            cfg.entries_.push_back({section, key, value});
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    std::string serialize() const {
        std::string out;
        std::string section;
        for (const Entry& e : entries_) {
            if (e.section != section) {
                if (!out.empty()) out += "\n";
                out += "[" + e.section + "]\n";
                section = e.section;
            }
            out += e.key + " = " + e.value + "\n";
        }
        return out;
    }

    bool has(const std::string& section, const std::string& key) const {
        return find(section, key) != nullptr;
    }

    std::string get(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) throw config_error("missing required key '" + key + "' in [" + section + "]");
        return e->value;
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        const Entry* e = find(section, key);
        return e ? e->value : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(get(section, key), section, key);
    }
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        const Entry* e = find(section, key);
        return e ? to_double(e->value, section, key) : fallback;
    }
    long get_long(const std::string& section, const std::string& key) const {
        return to_long(get(section, key), section, key);
    }
    long get_long_or(const std::string& section, const std::string& key, long fallback) const {
        const Entry* e = find(section, key);
        return e ? to_long(e->value, section, key) : fallback;
    }
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
        const Entry* e = find(section, key);
        if (!e) return fallback;
        const std::string& v = e->value;
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        throw config_error("key '" + key + "' in [" + section + "]: expected true/false");
    }

    // Whitespace- or comma-separated token list.
    std::vector<std::string> get_tokens(const std::string& section, const std::string& key) const {
        return tokenize(get(section, key));
    }
    std::vector<std::string> get_tokens_or(const std::string& section,
                                           const std::string& key) const {
        const Entry* e = find(section, key);
        return e ? tokenize(e->value) : std::vector<std::string>{};
    }
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const {
        std::vector<double> out;
        for (const std::string& t : get_tokens(section, key))
            out.push_back(to_double(t, section, key));
        return out;
    }
    std::vector<double> get_doubles_or(const std::string& section, const std::string& key) const {
        std::vector<double> out;
        for (const std::string& t : get_tokens_or(section, key))
            out.push_back(to_double(t, section, key));
        return out;
    }

    // Keys of one section, in file order (used to bind priors by name).
    std::vector<std::pair<std::string, std::string>> section(const std::string& name) const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const Entry& e : entries_)
            if (e.section == name) out.emplace_back(e.key, e.value);
        return out;
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        for (Entry& e : entries_)
            if (e.section == section && e.key == key) {
                e.value = value;
                return;
            }
        entries_.push_back({section, key, value});
    }

    bool operator==(const Config& other) const = default;

  private:
    struct Entry {
        std::string section, key, value;
        bool operator==(const Entry&) const = default;
    };

    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static std::vector<std::string> tokenize(const std::string& v) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : v) {
            if (c == ' ' || c == '\t' || c == ',') {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) out.push_back(cur);
        return out;
    }

    static double to_double(const std::string& v, const std::string& section,
                            const std::string& key) {
        const char* begin = v.c_str();
        char* end = nullptr;
        const double x = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            throw config_error("key '" + key + "' in [" + section + "]: not a number: '" + v +
                               "'");
        return x;
    }

    static long to_long(const std::string& v, const std::string& section, const std::string& key) {
        const char* begin = v.c_str();
        char* end = nullptr;
        const long x = std::strtol(begin, &end, 10);
        if (end == begin || *end != '\0')
            throw config_error("key '" + key + "' in [" + section + "]: not an integer: '" + v +
                               "'");
        return x;
    }

    const Entry* find(const std::string& section, const std::string& key) const {
        for (const Entry& e : entries_)
            if (e.section == section && e.key == key) return &e;
        return nullptr;
    }

    std::vector<Entry> entries_;
};

}  // namespace ilm

#endif
