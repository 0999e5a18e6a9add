#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gnlab {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV table with full-precision numeric cells.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<double>& vals) {
        if (vals.size() != header_.size())
            throw std::invalid_argument("CsvWriter: column count mismatch");
        std::vector<std::string> r;
        r.reserve(vals.size());
        for (double v : vals) r.push_back(fmt17(v));
        rows_.push_back(std::move(r));
    }
    void row_raw(std::vector<std::string> vals) {
        if (vals.size() != header_.size())
            throw std::invalid_argument("CsvWriter: column count mismatch");
        rows_.push_back(std::move(vals));
    }

    void save(const std::filesystem::path& path) const {
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path.string());
        out << join(header_) << "\n";
        for (const auto& r : rows_) out << join(r) << "\n";
    }

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            s += v[i];
        }
        return s;
    }
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// JSON sidecar recording the run configuration plus a stable hash of it, so
// outputs can be matched to the parameters that produced them.
inline void write_sidecar(const std::filesystem::path& path, nlohmann::json config) {
    std::string canon = config.dump();
    std::size_t h = std::hash<std::string>{}(canon);
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016zx", h);
    config["config_hash"] = hex;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << config.dump(2) << "\n";
}

}  // namespace gnlab
