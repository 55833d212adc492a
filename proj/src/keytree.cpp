#include "erw/keytree.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace erw {

namespace {

using nlohmann::json;

struct Line {
    int indent = 0;
    std::string text; // content with indent stripped
    std::size_t number = 0;
};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + what);
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_json_scalar(const std::string& s, json& out) {
    if (s == "null") {
        out = nullptr;
        return true;
    }
    if (s == "true" || s == "false") {
        out = (s == "true");
        return true;
    }
    // accept into numbers anything nlohmann accepts
    json j = json::parse(s, nullptr, false);
    if (!j.is_discarded() && (j.is_number() || j.is_string())) {
        out = j;
        return true;
    }
    return false;
}

json parse_scalar(const std::string& raw, std::size_t line) {
    std::string s = strip(raw);
    if (s.empty()) fail(line, "empty value");
    if (s.front() == '[') {
        json j = json::parse(s, nullptr, false);
        if (j.is_discarded() || !j.is_array()) fail(line, "malformed inline list: " + s);
        return j;
    }
    if (s == "{}") return json::object();
    json out;
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        json j = json::parse(s, nullptr, false);
        if (j.is_discarded()) fail(line, "malformed quoted string: " + s);
        return j;
    }
    if (parse_json_scalar(s, out)) return out;
    return json(s);
}

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::size_t i = 0;
        while (i < raw.size() && raw[i] == ' ') ++i;
        if (i < raw.size() && raw[i] == '\t') fail(number, "tabs are not allowed for indentation");
        if (i >= raw.size() || raw[i] == '#') continue;
        lines.push_back({static_cast<int>(i), raw.substr(i), number});
    }
    return lines;
}

class Parser {
public:
    explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

    json parse_top() {
        if (lines_.empty()) return json::object();
        json out = parse_block(lines_.front().indent);
        if (pos_ != lines_.size()) fail(lines_[pos_].number, "unexpected indentation");
        return out;
    }

private:
    std::vector<Line> lines_;
    std::size_t pos_ = 0;

    bool done() const { return pos_ >= lines_.size(); }
    const Line& cur() const { return lines_[pos_]; }

    // a block is a run of lines at exactly `indent`, either all list items
    // or all key-value entries
    json parse_block(int indent) {
        if (done() || cur().indent != indent) fail(done() ? 0 : cur().number, "expected a block");
        if (cur().text.rfind("- ", 0) == 0 || cur().text == "-") return parse_list(indent);
        return parse_map(indent);
    }

    json parse_map(int indent) {
        json out = json::object();
        while (!done() && cur().indent == indent && cur().text.rfind("- ", 0) != 0) {
            const Line line = cur();
            const std::size_t colon = find_key_colon(line.text, line.number);
            std::string key = strip(line.text.substr(0, colon));
            std::string rest = strip(line.text.substr(colon + 1));
            if (key.empty()) fail(line.number, "empty key");
            if (out.contains(key)) fail(line.number, "duplicate key: " + key);
            ++pos_;
            if (!rest.empty()) {
                out[key] = parse_scalar(rest, line.number);
            } else {
                if (done() || cur().indent <= indent)
                    fail(line.number, "key '" + key + "' has no value");
                out[key] = parse_block(cur().indent);
            }
        }
        return out;
    }

    json parse_list(int indent) {
        json out = json::array();
        while (!done() && cur().indent == indent && cur().text.rfind("-", 0) == 0) {
            const Line line = cur();
            std::string rest = line.text.size() > 1 ? strip(line.text.substr(1)) : std::string();
            if (rest.empty()) fail(line.number, "empty list item");
            // a list item is either a scalar or the first entry of a map
            // whose keys align two columns past the dash
            const int item_indent = indent + 2;
            if (looks_like_entry(rest)) {
                lines_[pos_] = {item_indent, rest, line.number};
                out.push_back(parse_map(item_indent));
            } else {
                ++pos_;
                out.push_back(parse_scalar(rest, line.number));
            }
        }
        return out;
    }

    static bool looks_like_entry(const std::string& s) {
        // "key: ..." with an unquoted, un-bracketed colon
        if (!s.empty() && (s.front() == '[' || s.front() == '"')) return false;
        const std::size_t colon = s.find(':');
        if (colon == std::string::npos) return false;
        return colon + 1 == s.size() || s[colon + 1] == ' ';
    }

    static std::size_t find_key_colon(const std::string& s, std::size_t number) {
        const std::size_t colon = s.find(':');
        if (colon == std::string::npos || (colon + 1 != s.size() && s[colon + 1] != ' '))
            fail(number, "expected 'key: value', got '" + s + "'");
        return colon;
    }
};

std::string format_number(const json& j) {
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    if (j.is_number_unsigned()) return std::to_string(j.get<unsigned long long>());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    return buf;
}

bool needs_quotes(const std::string& s) {
    if (s.empty()) return true;
    if (s.front() == ' ' || s.back() == ' ' || s.front() == '[' || s.front() == '{' ||
        s.front() == '"' || s.front() == '#' || s.front() == '-')
        return true;
    if (s.find(": ") != std::string::npos || s.back() == ':') return true;
    json probe;
    return parse_json_scalar(s, probe) && !probe.is_string();
}

std::string scalar_text(const json& j) {
    if (j.is_null()) return "null";
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number()) return format_number(j);
    const std::string s = j.get<std::string>();
    if (needs_quotes(s)) return json(s).dump();
    return s;
}

bool is_scalar_array(const json& j) {
    for (const auto& v : j)
        if (v.is_object() || v.is_array()) return false;
    return true;
}

void emit(const json& j, int indent, std::string& out);

void emit_value_inline_or_block(const std::string& key, const json& v, int indent,
                                std::string& out) {
    const std::string pad(indent, ' ');
    if (v.is_object()) {
        if (v.empty()) {
            out += pad + key + ": {}\n";
        } else {
            out += pad + key + ":\n";
            emit(v, indent + 2, out);
        }
    } else if (v.is_array()) {
        if (v.empty() || is_scalar_array(v)) {
            out += pad + key + ": " + v.dump() + "\n";
        } else {
            out += pad + key + ":\n";
            emit(v, indent + 2, out);
        }
    } else {
        out += pad + key + ": " + scalar_text(v) + "\n";
    }
}

void emit(const json& j, int indent, std::string& out) {
    const std::string pad(indent, ' ');
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            emit_value_inline_or_block(it.key(), it.value(), indent, out);
    } else if (j.is_array()) {
        for (const auto& item : j) {
            if (item.is_object() && !item.empty()) {
                bool first = true;
                for (auto it = item.begin(); it != item.end(); ++it) {
                    if (first) {
                        std::string entry;
                        emit_value_inline_or_block(it.key(), it.value(), indent + 2, entry);
                        entry.replace(0, indent + 2, pad + "- ");
                        out += entry;
                        first = false;
                    } else {
                        emit_value_inline_or_block(it.key(), it.value(), indent + 2, out);
                    }
                }
            } else {
                out += pad + "- " + (item.is_structured() ? item.dump() : scalar_text(item)) + "\n";
            }
        }
    }
}

} // namespace

json parse_config_text(const std::string& text) {
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return json::parse(text);
    return Parser(split_lines(text)).parse_top();
}

json parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string serialize_keytree(const json& tree) {
    std::string out;
    emit(tree, 0, out);
    return out;
}

std::string config_hash(const json& tree) {
    const std::string canonical = tree.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace erw
