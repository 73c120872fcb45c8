#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "hilfer/errors.hpp"

namespace hilfer {

/// CSV writer: header row, period decimal separator, 17 significant digits
/// (round-trip-exact doubles), LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : os_(path, std::ios::binary) {
        if (!os_) throw ConfigError("CsvWriter: cannot open " + path);
    }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            os_ << cols[i] << (i + 1 < cols.size() ? "," : "");
        os_ << "\n";
    }

    void row(const std::vector<double>& vals) {
        char buf[40];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
            os_ << buf << (i + 1 < vals.size() ? "," : "");
        }
        os_ << "\n";
    }

    void row_named(const std::string& name, const std::vector<double>& vals) {
        os_ << name << (vals.empty() ? "" : ",");
        char buf[40];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
            os_ << buf << (i + 1 < vals.size() ? "," : "");
        }
        os_ << "\n";
    }

private:
    std::ofstream os_;
};

}  // namespace hilfer
