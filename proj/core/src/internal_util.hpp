// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "depwarp/errors.hpp"

namespace depwarp::detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

// 6 significant digits, '.' decimal separator, locale-independent.
inline std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

// CSV/TSV writers do not quote; reject separators embedded in tokens.
inline void require_plain_token(const std::string& value, const std::string& what) {
    if (value.find_first_of(",\t\r\n") != std::string::npos)
        throw ValidationError(what + " contains a separator character: " + value);
}

}  // namespace depwarp::detail
