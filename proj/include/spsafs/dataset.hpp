#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spsafs {

// Read-only view of a dense row-major matrix.
struct MatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    const double* row(std::size_t r) const { return data + r * cols; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct Dataset {
    std::vector<double> features;  // row-major, n_rows x n_features
    std::vector<int> labels;       // encoded 0..class_count-1
    std::vector<std::string> class_names;  // in order of first appearance
    std::size_t n_rows = 0;
    std::size_t n_features = 0;

    int class_count() const { return static_cast<int>(class_names.size()); }
    double at(std::size_t r, std::size_t c) const {
        return features[r * n_features + c];
    }
    MatrixView view() const { return {features.data(), n_rows, n_features}; }
};

struct CsvOptions {
    bool has_header = false;
    // Index of the label column; negative counts from the end (-1 = last).
    int label_column = -1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    std::stringstream ss(line);
    while (std::getline(ss, current, ',')) fields.push_back(trim(current));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace detail

// Load a CSV with numeric feature columns and one categorical label column.
// Malformed input reports the 1-based row and column of the offending cell.
inline Dataset load_csv(const std::string& path, const CsvOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_columns = 0;
    bool header_skipped = !options.has_header;

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (n_columns == 0) {
            n_columns = fields.size();
            if (n_columns < 2)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": need at least one feature column and a label");
        } else if (fields.size() != n_columns) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(n_columns) + " columns, found " +
                                     std::to_string(fields.size()));
        }

        int label_col = options.label_column;
        if (label_col < 0) label_col += static_cast<int>(n_columns);
        if (label_col < 0 || label_col >= static_cast<int>(n_columns))
            throw std::runtime_error(path + ": label column out of range");

        for (std::size_t c = 0; c < n_columns; ++c) {
            if (static_cast<int>(c) == label_col) {
                const std::string& name = fields[c];
                int code = -1;
                for (std::size_t k = 0; k < ds.class_names.size(); ++k)
                    if (ds.class_names[k] == name) code = static_cast<int>(k);
                if (code < 0) {
                    code = static_cast<int>(ds.class_names.size());
                    ds.class_names.push_back(name);
                }
                ds.labels.push_back(code);
            } else {
                try {
                    std::size_t used = 0;
                    const double v = std::stod(fields[c], &used);
                    if (used != fields[c].size()) throw std::invalid_argument("trailing");
                    ds.features.push_back(v);
                } catch (const std::exception&) {
                    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                             ": column " + std::to_string(c + 1) +
                                             ": not a number: '" + fields[c] + "'");
                }
            }
        }
        ++ds.n_rows;
    }

    if (ds.n_rows == 0) throw std::runtime_error(path + ": no data rows");
    ds.n_features = n_columns - 1;
    return ds;
}

// Per-feature z-score parameters. Features with zero spread map to zero so
// they carry no information instead of blowing up.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;  // standard deviation; 0 marks a constant feature

    static Standardizer fit(MatrixView m) {
        Standardizer z;
        z.mean.assign(m.cols, 0.0);
        z.scale.assign(m.cols, 0.0);
        if (m.rows == 0) return z;
        for (std::size_t r = 0; r < m.rows; ++r)
            for (std::size_t c = 0; c < m.cols; ++c) z.mean[c] += m.at(r, c);
        for (std::size_t c = 0; c < m.cols; ++c) z.mean[c] /= static_cast<double>(m.rows);
        for (std::size_t r = 0; r < m.rows; ++r)
            for (std::size_t c = 0; c < m.cols; ++c) {
                const double d = m.at(r, c) - z.mean[c];
                z.scale[c] += d * d;
            }
        for (std::size_t c = 0; c < m.cols; ++c)
            z.scale[c] = std::sqrt(z.scale[c] / static_cast<double>(m.rows));
        return z;
    }

    void apply(double* data, std::size_t rows, std::size_t cols) const {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                double& v = data[r * cols + c];
                v = scale[c] > 0.0 ? (v - mean[c]) / scale[c] : 0.0;
            }
    }
};

}  // namespace spsafs
