#include "flattop/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "flattop/errors.hpp"

namespace flattop {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(s);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
    return v;
}

std::optional<bool> to_event(const std::string& s) {
    std::string low = s;
    std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
    if (low == "1" || low == "true") return true;
    if (low == "0" || low == "false") return false;
    return std::nullopt;
}

CensoredSample make_sample(const std::vector<double>& times, const std::vector<bool>& events) {
    if (times.empty()) throw ParseError("input contains no observations");
    CensoredSample s;
    s.times = Eigen::Map<const Eigen::VectorXd>(times.data(), static_cast<Eigen::Index>(times.size()));
    s.event.resize(static_cast<Eigen::Index>(events.size()));
    for (std::size_t i = 0; i < events.size(); ++i) s.event[static_cast<Eigen::Index>(i)] = events[i];
    return s;
}

}  // namespace

CensoredSample parse_sample_csv(std::istream& in) {
    std::vector<double> times;
    std::vector<bool> events;
    std::string line;
    long lineno = 0;
    bool seen_row = false;
    int time_col = 0, event_col = 1;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = split(t, ',');
        const auto where = "line " + std::to_string(lineno) + ": ";
        if (!seen_row) {
            seen_row = true;
            if (!to_double(fields[0])) {
                time_col = event_col = -1;
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    if (fields[i] == "time") time_col = static_cast<int>(i);
                    if (fields[i] == "event") event_col = static_cast<int>(i);
                }
                if (time_col < 0) throw ParseError(where + "header has no 'time' column", lineno);
                columns = fields.size();
                continue;
            }
        }
        if (columns == 0) {
            columns = fields.size();
            if (columns > 2) throw ParseError(where + "expected 1 or 2 columns (time,event)", lineno);
            if (columns == 1) event_col = -1;
        }
        if (fields.size() != columns) {
            throw ParseError(where + "expected " + std::to_string(columns) + " fields, found " +
                                 std::to_string(fields.size()),
                             lineno);
        }
        const auto time = to_double(fields[static_cast<std::size_t>(time_col)]);
        if (!time || !std::isfinite(*time)) {
            throw ParseError(where + "time '" + fields[static_cast<std::size_t>(time_col)] + "' is not a finite number",
                             lineno);
        }
        bool event = true;
        if (event_col >= 0) {
            const auto e = to_event(fields[static_cast<std::size_t>(event_col)]);
            if (!e) {
                throw ParseError(where + "event '" + fields[static_cast<std::size_t>(event_col)] +
                                     "' must be 0, 1, true or false",
                                 lineno);
            }
            event = *e;
        }
        times.push_back(*time);
        events.push_back(event);
    }
    return make_sample(times, events);
}

CensoredSample parse_sample_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    std::vector<double> times;
    std::vector<bool> events;
    auto number = [](const nlohmann::json& v, const std::string& what) {
        if (!v.is_number()) throw ParseError(what + " is not a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ParseError(what + " is not finite");
        return x;
    };
    auto flag = [](const nlohmann::json& v, const std::string& what) {
        if (v.is_boolean()) return v.get<bool>();
        if (v.is_number_integer() && (v.get<long>() == 0 || v.get<long>() == 1)) return v.get<long>() == 1;
        throw ParseError(what + " must be 0, 1, true or false");
    };
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            const auto& v = j[i];
            const std::string what = "entry " + std::to_string(i);
            if (v.is_object()) {
                if (!v.contains("time")) throw ParseError(what + " has no 'time'");
                times.push_back(number(v["time"], what + " time"));
                events.push_back(v.contains("event") ? flag(v["event"], what + " event") : true);
            } else {
                times.push_back(number(v, what));
                events.push_back(true);
            }
        }
    } else if (j.is_object() && j.contains("time") && j["time"].is_array()) {
        for (std::size_t i = 0; i < j["time"].size(); ++i) {
            times.push_back(number(j["time"][i], "time[" + std::to_string(i) + "]"));
        }
        if (j.contains("event")) {
            const auto& ev = j["event"];
            if (!ev.is_array() || ev.size() != times.size()) throw ParseError("'event' must match 'time' in length");
            for (std::size_t i = 0; i < ev.size(); ++i) events.push_back(flag(ev[i], "event[" + std::to_string(i) + "]"));
        } else {
            events.assign(times.size(), true);
        }
    } else {
        throw ParseError("JSON sample must be an array or an object with a 'time' array");
    }
    return make_sample(times, events);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + path + "' failed");
}

CensoredSample read_sample(const std::string& path) {
    const std::string text = read_text(path);
    if (std::filesystem::path(path).extension() == ".json") return parse_sample_json(text);
    std::istringstream in(text);
    return parse_sample_csv(in);
}

Eigen::VectorXd parse_grid_spec(const std::string& spec) {
    const std::string s = trim(spec);
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) throw ParseError("grid spec '" + spec + "' must be min:max:count");
        const auto lo = to_double(parts[0]);
        const auto hi = to_double(parts[1]);
        const auto count = to_double(parts[2]);
        if (!lo || !hi || !count) throw ParseError("grid spec '" + spec + "' has a non-numeric field");
        if (!(*count >= 1.0) || *count != std::floor(*count)) throw ParseError("grid count must be a positive integer");
        if (!(*hi >= *lo)) throw ParseError("grid spec needs max >= min");
        if (*count == 1.0) {
            if (*hi != *lo) throw ParseError("a one-point grid needs min == max");
            return Eigen::VectorXd::Constant(1, *lo);
        }
        return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(*count), *lo, *hi);
    }
    const auto parts = split(s, ',');
    Eigen::VectorXd out(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto v = to_double(parts[i]);
        if (!v || !std::isfinite(*v)) throw ParseError("grid value '" + parts[i] + "' is not a finite number");
        out[static_cast<Eigen::Index>(i)] = *v;
    }
    if (out.size() == 0) throw ParseError("empty grid spec");
    return out;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    for (const auto& p : split(trim(spec), ',')) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
        if (ec != std::errc() || ptr != p.data() + p.size() || v <= 0) {
            throw ParseError("'" + p + "' is not a positive integer");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("empty integer list");
    return out;
}

namespace {

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> vec_to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

KernelTable cached_table(const FlatTopSpec& spec, double tol, const std::optional<std::string>& cache_path) {
    if (!cache_path) return build_table(spec, tol);
    nlohmann::json cache = nlohmann::json::object();
    if (std::filesystem::exists(*cache_path)) {
        try {
            cache = nlohmann::json::parse(read_text(*cache_path));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("table cache '" + *cache_path + "' is not valid JSON: " + e.what());
        }
        if (!cache.is_object() || cache.value("schema", 0) != 1 || !cache.contains("tables")) {
            throw ParseError("table cache '" + *cache_path + "' has an unknown layout");
        }
        for (const auto& e : cache["tables"]) {
            try {
                if (parse_family(e.at("family").get<std::string>()) != spec.family || e.at("c").get<double>() != spec.c ||
                    e.at("b").get<double>() != spec.b || e.at("tol").get<double>() != tol) {
                    continue;
                }
                FlatTopSpec stored = spec;
                stored.effective_c = e.at("effective_c").get<double>();
                return KernelTable(stored, tol, e.at("spacing").get<double>(), vec_from_json(e.at("k")),
                                   vec_from_json(e.at("dk")), vec_from_json(e.at("kbar")));
            } catch (const nlohmann::json::exception& ex) {
                throw ParseError("table cache '" + *cache_path + "' entry is malformed: " + ex.what());
            }
        }
    } else {
        cache["schema"] = 1;
        cache["tables"] = nlohmann::json::array();
    }
    KernelTable table = build_table(spec, tol);
    cache["tables"].push_back({{"family", to_string(spec.family)},
                               {"c", spec.c},
                               {"b", spec.b},
                               {"effective_c", spec.effective_c},
                               {"tol", tol},
                               {"spacing", table.spacing()},
                               {"k", vec_to_std(table.k_values())},
                               {"dk", vec_to_std(table.dk_values())},
                               {"kbar", vec_to_std(table.kbar_values())}});
    write_text(*cache_path, cache.dump());
    return table;
}

}  // namespace flattop
