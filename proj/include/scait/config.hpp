// Line-oriented `key = value` configuration with # comments.
#ifndef SCAIT_CONFIG_HPP
#define SCAIT_CONFIG_HPP

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "scait/common.hpp"

namespace scait::cfg {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

class Config {
  public:
    static Config parse(const std::string& text) {
        Config c;
        int line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            std::string line = nl == std::string::npos ? text.substr(start) : text.substr(start, nl - start);
            start = nl == std::string::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw FormatError("config: line " + std::to_string(line_no) + ": expected 'key = value'");
            std::string key = detail::trim(line.substr(0, eq));
            std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw FormatError("config: line " + std::to_string(line_no) + ": empty key");
            c.values_[key] = value;
        }
        return c;
    }

    static Config load(const std::string& path) {
        byte_vec bytes = read_file(path);
        return parse(std::string(bytes.begin(), bytes.end()));
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_real(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return parse_real(key, it->second);
    }

    long long get_int(const std::string& key, long long fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return parse_int(key, it->second);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const std::string& v = it->second;
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw FormatError("config: key '" + key + "': bad boolean '" + v + "'");
    }

    // Comma-separated values; empty string -> empty list.
    std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        auto it = values_.find(key);
        if (it == values_.end()) return out;
        const std::string& v = it->second;
        std::size_t start = 0;
        while (start <= v.size()) {
            std::size_t comma = v.find(',', start);
            std::string item =
                detail::trim(comma == std::string::npos ? v.substr(start) : v.substr(start, comma - start));
            if (!item.empty()) out.push_back(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    std::vector<double> get_real_list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& item : get_list(key)) out.push_back(parse_real(key, item));
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    static double parse_real(const std::string& key, const std::string& v) {
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (end != v.c_str() + v.size() || v.empty())
            throw FormatError("config: key '" + key + "': bad number '" + v + "'");
        return x;
    }
    static long long parse_int(const std::string& key, const std::string& v) {
        char* end = nullptr;
        long long x = std::strtoll(v.c_str(), &end, 10);
        if (end != v.c_str() + v.size() || v.empty())
            throw FormatError("config: key '" + key + "': bad integer '" + v + "'");
        return x;
    }

    std::map<std::string, std::string> values_;
};

}  // namespace scait::cfg

#endif  // SCAIT_CONFIG_HPP
