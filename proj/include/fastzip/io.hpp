#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "signal.hpp"
#include "util.hpp"

namespace fastzip {

enum class IoError {
    FileNotFound,
    BadHeader,
    BadRow,
    EmptyRecording,
};

inline const char* io_error_name(IoError e) {
    switch (e) {
        case IoError::FileNotFound: return "FileNotFound";
        case IoError::BadHeader: return "BadHeader";
        case IoError::BadRow: return "BadRow";
        case IoError::EmptyRecording: return "EmptyRecording";
    }
    return "?";
}

inline const char* raw_modality_name(RawModality m) {
    switch (m) {
        case RawModality::Accelerometer3d: return "accelerometer";
        case RawModality::Gyroscope3d: return "gyroscope";
        case RawModality::Barometer: return "barometer";
    }
    return "?";
}

inline std::optional<RawModality> parse_raw_modality(const std::string& s) {
    if (s == "accelerometer") return RawModality::Accelerometer3d;
    if (s == "gyroscope") return RawModality::Gyroscope3d;
    if (s == "barometer") return RawModality::Barometer;
    return std::nullopt;
}

// car<i>_spot<j>_<modality>.csv
inline std::string recording_filename(int car, int spot, RawModality m) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "car%d_spot%d_%s.csv", car, spot, raw_modality_name(m));
    return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) a++;
    while (b > a && std::isspace((unsigned char)s[b - 1])) b--;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline bool parse_double(const std::string& s, double* out) {
    if (s.empty()) return false;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    *out = v;
    return true;
}

}  // namespace detail

// Header `t,<name>[,<name>,<name>]`; one value column means a scalar stream,
// three mean a 3-axis stream. Column names beyond `t` are free-form.
inline Expected<RawRecording, IoError> read_recording_csv(std::istream& in, RawModality modality,
                                                          double nominal_rate) {
    std::string line;
    if (!std::getline(in, line)) return IoError::BadHeader;
    auto head = detail::split_commas(line);
    if (head.size() != 2 && head.size() != 4) return IoError::BadHeader;
    if (head[0] != "t") return IoError::BadHeader;
    const int vals = int(head.size()) - 1;
    if ((modality == RawModality::Barometer) != (vals == 1)) return IoError::BadHeader;

    RawRecording rec;
    rec.modality = modality;
    rec.nominal_rate = nominal_rate;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        auto cols = detail::split_commas(line);
        if (int(cols.size()) != vals + 1) return IoError::BadRow;
        double t, v[3] = {0, 0, 0};
        if (!detail::parse_double(cols[0], &t)) return IoError::BadRow;
        for (int c = 0; c < vals; c++)
            if (!detail::parse_double(cols[c + 1], &v[c])) return IoError::BadRow;
        rec.t.push_back(t);
        rec.x.push_back(v[0]);
        if (vals == 3) {
            rec.y.push_back(v[1]);
            rec.z.push_back(v[2]);
        }
    }
    if (rec.t.empty()) return IoError::EmptyRecording;
    return rec;
}

inline Expected<RawRecording, IoError> read_recording_csv(const std::string& path,
                                                          RawModality modality,
                                                          double nominal_rate) {
    std::ifstream in(path);
    if (!in) return IoError::FileNotFound;
    return read_recording_csv(in, modality, nominal_rate);
}

inline void write_recording_csv(std::ostream& out, const RawRecording& rec) {
    if (rec.channels() == 1)
        out << "t,p\n";
    else
        out << "t,x,y,z\n";
    char buf[160];
    for (size_t i = 0; i < rec.size(); i++) {
        if (rec.channels() == 1)
            std::snprintf(buf, sizeof buf, "%.6f,%.9g\n", rec.t[i], rec.x[i]);
        else
            std::snprintf(buf, sizeof buf, "%.6f,%.9g,%.9g,%.9g\n", rec.t[i], rec.x[i], rec.y[i],
                          rec.z[i]);
        out << buf;
    }
}

inline bool write_recording_csv(const std::string& path, const RawRecording& rec) {
    std::ofstream out(path);
    if (!out) return false;
    write_recording_csv(out, rec);
    return bool(out);
}

// Preprocessed single-channel streams travel as `t,<label>` CSV at the
// channel's canonical rate; labels double as filename stems.
inline const char* channel_label(Modality m) {
    switch (m) {
        case Modality::Acv: return "acv";
        case Modality::Ach: return "ach";
        case Modality::Gyr: return "gyr";
        case Modality::Bar: return "bar";
    }
    return "?";
}

inline std::string stream_filename(int car, int spot, Modality m) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "car%d_spot%d_%s.csv", car, spot, channel_label(m));
    return buf;
}

inline void write_series_csv(std::ostream& out, const Series& s) {
    out << "t," << channel_label(s.modality) << "\n";
    char buf[80];
    for (size_t i = 0; i < s.v.size(); i++) {
        std::snprintf(buf, sizeof buf, "%.6f,%.17g\n", s.start_time + double(i) / s.rate, s.v[i]);
        out << buf;
    }
}

inline bool write_series_csv(const std::string& path, const Series& s) {
    std::ofstream out(path);
    if (!out) return false;
    write_series_csv(out, s);
    return bool(out);
}

inline Expected<Series, IoError> read_series_csv(std::istream& in, Modality m) {
    std::string line;
    if (!std::getline(in, line)) return IoError::BadHeader;
    auto cols = detail::split_commas(detail::trim(line));
    if (cols.size() != 2 || cols[0] != "t" || cols[1] != channel_label(m))
        return IoError::BadHeader;
    Series s;
    s.modality = m;
    s.rate = modality_rate(m);
    bool first = true;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty()) continue;
        auto row = detail::split_commas(line);
        double t, v;
        if (row.size() != 2 || !detail::parse_double(row[0], &t) ||
            !detail::parse_double(row[1], &v))
            return IoError::BadRow;
        if (first) {
            s.start_time = t;
            first = false;
        }
        s.v.push_back(v);
    }
    if (s.v.empty()) return IoError::EmptyRecording;
    return s;
}

inline Expected<Series, IoError> read_series_csv(const std::string& path, Modality m) {
    std::ifstream in(path);
    if (!in) return IoError::FileNotFound;
    return read_series_csv(in, m);
}

// Line-based `key = value` config. '#' starts a comment; blank lines ignored;
// later keys override earlier ones.
using ConfigMap = std::map<std::string, std::string>;

inline Expected<ConfigMap, IoError> parse_config_text(std::istream& in) {
    ConfigMap out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) return IoError::BadRow;
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) return IoError::BadRow;
        out[key] = val;
    }
    return out;
}

inline Expected<ConfigMap, IoError> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return IoError::FileNotFound;
    return parse_config_text(in);
}

inline double config_double(const ConfigMap& cfg, const std::string& key, double fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    double v;
    return detail::parse_double(it->second, &v) ? v : fallback;
}

inline long config_long(const ConfigMap& cfg, const std::string& key, long fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    char* end = nullptr;
    long v = std::strtol(it->second.c_str(), &end, 10);
    return (end == it->second.c_str() + it->second.size() && !it->second.empty()) ? v : fallback;
}

inline std::string config_string(const ConfigMap& cfg, const std::string& key,
                                 const std::string& fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

inline std::vector<double> config_double_list(const ConfigMap& cfg, const std::string& key,
                                              const std::vector<double>& fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    std::vector<double> out;
    for (const auto& part : detail::split_commas(it->second)) {
        double v;
        if (!detail::parse_double(part, &v)) return fallback;
        out.push_back(v);
    }
    return out.empty() ? fallback : out;
}

// Config file resolution: explicit path wins, then the FASTZIP_CONFIG
// environment variable, then ./fastzip.conf if present, else empty config.
inline ConfigMap resolve_config(const std::string& explicit_path, std::string* used_path = nullptr) {
    auto attempt = [&](const std::string& p) -> std::optional<ConfigMap> {
        auto r = load_config_file(p);
        if (!r.ok()) return std::nullopt;
        if (used_path) *used_path = p;
        return r.value();
    };
    if (!explicit_path.empty()) {
        if (auto c = attempt(explicit_path)) return *c;
        if (used_path) *used_path = "";
        return {};
    }
    if (const char* env = std::getenv("FASTZIP_CONFIG")) {
        if (env[0] != '\0')
            if (auto c = attempt(env)) return *c;
    }
    if (auto c = attempt("fastzip.conf")) return *c;
    if (used_path) *used_path = "";
    return {};
}

}  // namespace fastzip
