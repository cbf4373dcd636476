// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Shared numeric helpers and a minimal CSV reader used by the file-format
// loaders across the library.

#ifndef lscm_common_hpp
#define lscm_common_hpp

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lscm
{

constexpr double pi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

// dB reference is 1.0 linear; absolute calibration (dBm) is out of scope.
inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Shortest decimal representation that round-trips a double. Artifacts must
// be byte-identical across runs, so all numeric output goes through here.
inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = std::strtod(buf, nullptr);
    for (int prec = 1; prec < 17; ++prec)
    {
        char shorter[32];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == back)
            return shorter;
    }
    return buf;
}

namespace csv
{

inline std::vector<std::string> split_line(const std::string &line)
{
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
    {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        size_t start = field.find_first_not_of(' ');
        out.push_back(start == std::string::npos ? std::string() : field.substr(start));
    }
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

struct Row
{
    size_t line_no; // 1-based, including header and comment lines
    std::vector<std::string> fields;
};

// Reads a CSV file; '#'-prefixed lines before the header are treated as
// comments and skipped. The first non-comment line is the header.
struct File
{
    std::vector<std::string> header;
    std::vector<Row> rows;
    std::vector<std::string> comments;
};

inline File read_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open file: " + path);
    File f;
    std::string line;
    size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (!have_header && line[0] == '#')
        {
            f.comments.push_back(line);
            continue;
        }
        if (!have_header)
        {
            f.header = split_line(line);
            have_header = true;
            continue;
        }
        f.rows.push_back({line_no, split_line(line)});
    }
    if (!have_header)
        throw std::runtime_error("empty file: " + path);
    return f;
}

inline double parse_double(const std::string &s, const std::string &path, size_t line_no)
{
    char *end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed numeric field '" + s + "'");
    return v;
}

inline long parse_long(const std::string &s, const std::string &path, size_t line_no)
{
    char *end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed integer field '" + s + "'");
    return v;
}

} // namespace csv

} // namespace lscm

#endif
