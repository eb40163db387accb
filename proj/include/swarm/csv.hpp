#pragma once

// CSV emission: header always present, comma separator, floating point at 17
// significant digits through std::to_chars, no locale involvement. Output
// bytes depend only on the values.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "swarm/errors.hpp"

namespace swarm {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw ValidationError("cannot open output file: " + path);
    }

    CsvWriter& field(std::string_view s) {
        sep();
        out_ << s;
        return *this;
    }
    CsvWriter& field(double v) { return field(std::string_view(format_double(v))); }
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(long long v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter& field(std::uint64_t v) {
        sep();
        out_ << v;
        return *this;
    }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

  private:
    void sep() {
        if (!first_) out_ << ',';
        first_ = false;
    }
    std::ofstream out_;
    bool first_ = true;
};

} // namespace swarm
