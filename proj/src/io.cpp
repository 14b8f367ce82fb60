#include "slicedot/io.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "slicedot/errors.hpp"

namespace slicedot {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw NumericError("format_double: conversion failed");
    return std::string(buf, ptr);
}

PointCloud read_cloud_csv(const std::string& path, bool weighted) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(field, &pos);
                while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos])))
                    ++pos;
                if (pos != field.size()) throw std::invalid_argument(field);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" + field +
                                 "'");
            }
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(rows.front().size()) + " columns, got " +
                             std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");
    const std::size_t cols = rows.front().size();
    if (weighted && cols < 2)
        throw ParseError(path + ": weighted input needs at least 2 columns");
    const std::size_t d = weighted ? cols - 1 : cols;
    Matrix points(rows.size(), d);
    std::vector<double> weights;
    if (weighted) weights.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < d; ++c)
            points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        if (weighted) weights.push_back(rows[r][cols - 1]);
    }
    if (weighted) {
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw ParseError(path + ": negative weight");
            sum += w;
        }
        if (!(sum > 0.0)) throw ParseError(path + ": weights sum to zero");
        for (double& w : weights) w /= sum;
        return PointCloud(std::move(points), std::move(weights));
    }
    return PointCloud(std::move(points));
}

void write_cloud_csv(const std::string& path, const PointCloud& cloud, bool weighted) {
    std::ostringstream out;
    for (std::size_t r = 0; r < cloud.size(); ++r) {
        for (Eigen::Index c = 0; c < cloud.dim(); ++c) {
            if (c > 0) out << ',';
            out << format_double(cloud.points()(static_cast<Eigen::Index>(r), c));
        }
        if (weighted) out << ',' << format_double(cloud.weight(r));
        out << '\n';
    }
    write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "'");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string content_hash(const std::string& content) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : content) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace slicedot
