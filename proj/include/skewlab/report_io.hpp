#pragma once

// Deterministic output helpers: every artifact embeds the resolved config
// and the library version, and reruns with identical config produce
// byte-identical files.

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "skewlab/common.hpp"

namespace skewlab {

inline constexpr const char* kVersion = "skewlab 0.1.0";

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file " + path.string());
    os << content;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

/// CSV with the config audit trail in comment lines.
class CsvWriter {
public:
    CsvWriter(std::string header, const nlohmann::json& config) {
        os_ << "# version: " << kVersion << "\n";
        os_ << "# config: " << config.dump() << "\n";
        os_ << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

}  // namespace skewlab
