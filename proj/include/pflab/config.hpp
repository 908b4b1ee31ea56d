#pragma once

#include <map>
#include <set>

#include "pflab/domain.hpp"

namespace pflab {

// Structured plain-text experiment configuration: key = value pairs grouped
// into [tables], one experiment per file. Values are numbers, quoted
// strings, booleans, "inf", or flat arrays. Unknown keys are rejected.
struct config_value {
    enum class type_t { number, string, boolean, array };
    type_t type = type_t::number;
    real num = 0;
    std::string str;
    bool boolean = false;
    std::vector<real> array;
    int line = 0;
};

struct config_table {
    std::map<std::string, config_value> values;
    int line = 0;
};

class config_file {
public:
    std::string path;
    std::map<std::string, config_table> tables; // "" is the root table

    static config_file parse(const std::string& path, const std::string& text) {
        config_file cf;
        cf.path = path;
        std::string section;
        cf.tables[section] = {};
        int lineno = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t eol = text.find('\n', pos);
            std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
            pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
            ++lineno;
            const std::size_t hash = find_comment(line);
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') cf.fail(lineno, "unterminated table header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) cf.fail(lineno, "empty table name");
                if (cf.tables.count(section)) cf.fail(lineno, "duplicate table [" + section + "]");
                cf.tables[section].line = lineno;
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) cf.fail(lineno, "expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty()) cf.fail(lineno, "empty key");
            if (val.empty()) cf.fail(lineno, "empty value for key '" + key + "'");
            auto& table = cf.tables[section];
            if (table.values.count(key))
                cf.fail(lineno, "duplicate key '" + key + "'");
            table.values[key] = cf.parse_value(val, lineno);
        }
        return cf;
    }

    static config_file load(const std::string& path) {
        std::ifstream in(path);
        require(in.good(), "config: cannot open " + path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return parse(path, text);
    }

    [[noreturn]] void fail(int line, const std::string& what) const {
        std::ostringstream s;
        s << path << ":" << line << ": " << what;
        throw std::invalid_argument(s.str());
    }

    const config_table* table(const std::string& name) const {
        const auto it = tables.find(name);
        return it == tables.end() ? nullptr : &it->second;
    }

    const config_value* find(const std::string& section, const std::string& key) const {
        const auto* t = table(section);
        if (!t) return nullptr;
        const auto it = t->values.find(key);
        return it == t->values.end() ? nullptr : &it->second;
    }

    real number(const std::string& section, const std::string& key) const {
        const auto* v = find(section, key);
        if (!v) missing(section, key);
        if (v->type != config_value::type_t::number)
            fail(v->line, "key '" + key + "' must be a number");
        return v->num;
    }

    real number_or(const std::string& section, const std::string& key, real fallback) const {
        return find(section, key) ? number(section, key) : fallback;
    }

    std::string string(const std::string& section, const std::string& key) const {
        const auto* v = find(section, key);
        if (!v) missing(section, key);
        if (v->type != config_value::type_t::string)
            fail(v->line, "key '" + key + "' must be a quoted string");
        return v->str;
    }

    bool boolean_or(const std::string& section, const std::string& key, bool fallback) const {
        const auto* v = find(section, key);
        if (!v) return fallback;
        if (v->type != config_value::type_t::boolean)
            fail(v->line, "key '" + key + "' must be true or false");
        return v->boolean;
    }

    std::vector<real> array(const std::string& section, const std::string& key) const {
        const auto* v = find(section, key);
        if (!v) missing(section, key);
        if (v->type != config_value::type_t::array)
            fail(v->line, "key '" + key + "' must be an array [..]");
        return v->array;
    }

    // reject keys that no experiment consumed
    void check_known(const std::map<std::string, std::set<std::string>>& allowed) const {
        for (const auto& [section, table] : tables) {
            const auto it = allowed.find(section);
            if (it == allowed.end()) {
                if (section.empty() && table.values.empty()) continue;
                fail(table.line ? table.line : 1, "unknown table [" + section + "]");
            }
            for (const auto& [key, value] : table.values)
                if (!it->second.count(key))
                    fail(value.line, "unknown key '" + key + "' in table [" + section + "]");
        }
    }

private:
    [[noreturn]] void missing(const std::string& section, const std::string& key) const {
        std::ostringstream s;
        s << path << ": missing required key '" << key << "'";
        if (!section.empty()) s << " in table [" << section << "]";
        throw std::invalid_argument(s.str());
    }

    static std::size_t find_comment(const std::string& line) {
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) return i;
        }
        return std::string::npos;
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    config_value parse_value(const std::string& raw, int line) const {
        config_value v;
        v.line = line;
        if (raw.front() == '"') {
            if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
            v.type = config_value::type_t::string;
            v.str = raw.substr(1, raw.size() - 2);
            return v;
        }
        if (raw == "true" || raw == "false") {
            v.type = config_value::type_t::boolean;
            v.boolean = raw == "true";
            return v;
        }
        if (raw.front() == '[') {
            if (raw.back() != ']') fail(line, "unterminated array");
            v.type = config_value::type_t::array;
            std::string inner = raw.substr(1, raw.size() - 2);
            std::size_t start = 0;
            while (start < inner.size()) {
                std::size_t comma = inner.find(',', start);
                std::string tok = trim(inner.substr(
                    start, comma == std::string::npos ? std::string::npos : comma - start));
                if (!tok.empty()) v.array.push_back(parse_number(tok, line));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            return v;
        }
        v.type = config_value::type_t::number;
        v.num = parse_number(raw, line);
        return v;
    }

    real parse_number(const std::string& tok, int line) const {
        if (tok == "inf") return inf;
        try {
            std::size_t used = 0;
            const real x = std::stod(tok, &used);
            if (used != tok.size()) fail(line, "malformed number '" + tok + "'");
            return x;
        } catch (const std::invalid_argument&) {
            fail(line, "malformed number '" + tok + "'");
        } catch (const std::out_of_range&) {
            fail(line, "number out of range '" + tok + "'");
        }
    }
};

// Domain construction from the [domain] table.
inline domain_spec domain_from_config(const config_file& cf) {
    const std::string kind = cf.string("domain", "kind");
    auto pt = [&](const std::string& key) {
        point c{};
        if (cf.find("domain", key)) {
            const auto arr = cf.array("domain", key);
            require(arr.size() <= 3, "config: center must have at most 3 entries");
            for (std::size_t i = 0; i < arr.size(); ++i) c[static_cast<int>(i)] = arr[i];
        }
        return c;
    };
    if (kind == "interval")
        return make_interval(cf.number("domain", "a"), cf.number("domain", "b"));
    if (kind == "box") {
        const auto lo = cf.array("domain", "lo");
        const auto hi = cf.array("domain", "hi");
        return make_box(lo, hi);
    }
    if (kind == "ball")
        return make_ball(static_cast<int>(cf.number("domain", "dim")), pt("center"),
                         cf.number("domain", "radius"));
    if (kind == "annulus")
        return make_annulus(static_cast<int>(cf.number("domain", "dim")), pt("center"),
                            cf.number("domain", "r_in"), cf.number("domain", "r_out"));
    if (kind == "tower")
        return make_tower(static_cast<int>(cf.number("domain", "dim")),
                          static_cast<int>(cf.number("domain", "levels")),
                          cf.number("domain", "eps"));
    if (kind == "punctured_box")
        return make_punctured_box(static_cast<int>(cf.number("domain", "dim")),
                                  static_cast<int>(cf.number("domain", "side")),
                                  cf.number("domain", "eps"));
    if (kind == "strip")
        return make_strip(cf.number("domain", "alpha"), cf.number("domain", "truncation"));
    fail("config: unknown domain kind '" + kind + "'");
}

} // namespace pflab
