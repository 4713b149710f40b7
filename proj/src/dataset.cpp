#include "que/dataset.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace que {

namespace {

double parse_field(const std::string& field, const std::string& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
        if (pos != field.size()) {
            throw IoError(path + ": trailing characters in numeric field '" + field + "'");
        }
        return v;
    } catch (const std::invalid_argument&) {
        throw IoError(path + ": cannot parse numeric field '" + field + "'");
    } catch (const std::out_of_range&) {
        throw IoError(path + ": numeric field out of range '" + field + "'");
    }
}

// Shortest round-trip decimal representation.
std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

Dataset Dataset::load_csv(const std::string& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            row.push_back(parse_field(field, path));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw IoError(path + ": ragged CSV rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw IoError(path + ": no data rows");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return Dataset(std::move(m));
}

void Dataset::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    for (Eigen::Index i = 0; i < n(); ++i) {
        for (Eigen::Index j = 0; j < d(); ++j) {
            if (j) out << ',';
            out << format_double(samples_(i, j));
        }
        out << '\n';
    }
}

Dataset Dataset::load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "QUED", 4) != 0) {
        throw IoError(path + ": bad magic, not a QUED file");
    }
    std::uint32_t n32 = 0, d32 = 0;
    if (!in.read(reinterpret_cast<char*>(&n32), 4) || !in.read(reinterpret_cast<char*>(&d32), 4)) {
        throw IoError(path + ": truncated header");
    }
    if (n32 == 0 || d32 == 0) {
        throw IoError(path + ": empty dimensions in header");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n32), static_cast<Eigen::Index>(d32));
    std::vector<double> row(d32);
    for (std::uint32_t i = 0; i < n32; ++i) {
        if (!in.read(reinterpret_cast<char*>(row.data()),
                     static_cast<std::streamsize>(sizeof(double) * d32))) {
            throw IoError(path + ": truncated payload");
        }
        for (std::uint32_t j = 0; j < d32; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        }
    }
    return Dataset(std::move(m));
}

void Dataset::save_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write("QUED", 4);
    const std::uint32_t n32 = static_cast<std::uint32_t>(n());
    const std::uint32_t d32 = static_cast<std::uint32_t>(d());
    out.write(reinterpret_cast<const char*>(&n32), 4);
    out.write(reinterpret_cast<const char*>(&d32), 4);
    std::vector<double> row(d32);
    for (Eigen::Index i = 0; i < n(); ++i) {
        for (Eigen::Index j = 0; j < d(); ++j) {
            row[static_cast<std::size_t>(j)] = samples_(i, j);
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(sizeof(double) * d32));
    }
}

} // namespace que
