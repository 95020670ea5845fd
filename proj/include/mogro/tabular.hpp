#pragma once

// Semi-synthetic instances from tabular data: standardize the feature
// columns, regress each objective column on them (OLS), rescale rows so the
// largest feature norm is 1 (scaling the coefficient vectors inversely, which
// preserves every predicted reward), and optionally subsample rows to K arms.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mogro/errors.hpp"
#include "mogro/instance.hpp"
#include "mogro/linalg.hpp"
#include "mogro/rng.hpp"

namespace mogro {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC-4180: quoted fields may contain commas, CRLF and doubled quotes.
inline CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    char c;
    std::vector<std::vector<std::string>> out;
    while (in.get(c)) {
        saw_any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            record.push_back(field);
            field.clear();
        } else if (c == '\r') {
            // swallow; LF handles the record break
        } else if (c == '\n') {
            record.push_back(field);
            field.clear();
            out.push_back(record);
            record.clear();
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw parse_error("csv: unterminated quoted field");
    if (!field.empty() || !record.empty()) {
        record.push_back(field);
        out.push_back(record);
    }
    if (!saw_any || out.empty()) throw parse_error("csv: empty input");
    table.header = out.front();
    table.rows.assign(out.begin() + 1, out.end());
    return table;
}

inline CsvTable parse_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for read: " + path);
    return parse_csv(f);
}

namespace detail {

inline int column_index(const CsvTable& t, const std::string& name) {
    for (size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return static_cast<int>(i);
    throw schema_error("missing column: " + name);
}

inline double parse_number(const std::string& s, const std::string& col, size_t row) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw parse_error("");
        return v;
    } catch (...) {
        throw parse_error("non-numeric cell in column '" + col + "' at data row " +
                          std::to_string(row + 1) + ": '" + s + "'");
    }
}

}  // namespace detail

inline Instance ingest_tabular(const CsvTable& table,
                               const std::vector<std::string>& feature_columns,
                               const std::vector<std::string>& objective_columns, double noise_sd,
                               int subsample_k = 0, RngStream* rng = nullptr) {
    const int d = static_cast<int>(feature_columns.size());
    const int M = static_cast<int>(objective_columns.size());
    if (d < 1 || M < 1) throw invalid_config("ingest_tabular: need feature and objective columns");
    const size_t n = table.rows.size();
    if (static_cast<int>(n) < d + 1)
        throw invalid_config("ingest_tabular: need at least d+1 rows");

    std::vector<int> fcol(d), ocol(M);
    for (int j = 0; j < d; ++j) fcol[j] = detail::column_index(table, feature_columns[j]);
    for (int m = 0; m < M; ++m) ocol[m] = detail::column_index(table, objective_columns[m]);

    std::vector<Vector> X(n, Vector(d));
    std::vector<Vector> Y(n, Vector(M));
    for (size_t r = 0; r < n; ++r) {
        if (table.rows[r].size() != table.header.size())
            throw parse_error("csv: ragged row " + std::to_string(r + 1));
        for (int j = 0; j < d; ++j)
            X[r][j] = detail::parse_number(table.rows[r][fcol[j]], feature_columns[j], r);
        for (int m = 0; m < M; ++m)
            Y[r][m] = detail::parse_number(table.rows[r][ocol[m]], objective_columns[m], r);
    }

    // z-score each feature column
    for (int j = 0; j < d; ++j) {
        double mean = 0.0;
        for (size_t r = 0; r < n; ++r) mean += X[r][j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (size_t r = 0; r < n; ++r) var += (X[r][j] - mean) * (X[r][j] - mean);
        var /= static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (sd <= 0.0)
            throw rank_error("constant feature column: " + feature_columns[j]);
        for (size_t r = 0; r < n; ++r) X[r][j] = (X[r][j] - mean) / sd;
    }

    // OLS on the standardized features
    Matrix G(d, d);
    for (size_t r = 0; r < n; ++r)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) G(i, j) += X[r][i] * X[r][j];
    {
        const EigenDecomposition ed = jacobi_eigen(G);
        if (ed.values.front() <= 1e-10 * std::max(ed.values.back(), 1e-300))
            throw rank_error("singular design matrix (features not linearly independent)");
    }
    std::vector<Vector> thetas(M);
    for (int m = 0; m < M; ++m) {
        Vector b(d, 0.0);
        for (size_t r = 0; r < n; ++r)
            for (int j = 0; j < d; ++j) b[j] += X[r][j] * Y[r][m];
        thetas[m] = least_squares_solve(G, b);
    }

    // subsample rows to K arms, uniformly without replacement
    std::vector<size_t> keep(n);
    std::iota(keep.begin(), keep.end(), size_t{0});
    if (subsample_k > 0 && static_cast<size_t>(subsample_k) < n) {
        if (!rng) throw invalid_config("ingest_tabular: subsampling requires an RngStream");
        for (int i = 0; i < subsample_k; ++i) {
            const size_t j =
                i + static_cast<size_t>(rng->uniform01() * static_cast<double>(n - i));
            std::swap(keep[i], keep[std::min(j, n - 1)]);
        }
        keep.resize(subsample_k);
    }

    // row rescale: max feature norm becomes 1; coefficients absorb the factor
    double max_norm = 0.0;
    for (size_t r : keep) max_norm = std::max(max_norm, norm2(X[r]));
    if (max_norm <= 0.0) throw rank_error("all selected feature rows are zero");

    Instance inst;
    inst.d = d;
    inst.M = M;
    inst.K = static_cast<int>(keep.size());
    inst.sigma = noise_sd;
    inst.x_max = 1.0;
    inst.features.reserve(keep.size());
    for (size_t r : keep) inst.features.push_back(scaled(X[r], 1.0 / max_norm));
    inst.objectives.reserve(M);
    double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0;
    for (int m = 0; m < M; ++m) {
        inst.objectives.push_back(scaled(thetas[m], max_norm));
        const double nn = norm2(inst.objectives.back());
        lmin = std::min(lmin, nn);
        lmax = std::max(lmax, nn);
    }
    inst.l = lmin;
    inst.L = lmax;
    return inst;
}

inline Instance ingest_tabular_file(const std::string& path,
                                    const std::vector<std::string>& feature_columns,
                                    const std::vector<std::string>& objective_columns,
                                    double noise_sd, int subsample_k = 0,
                                    RngStream* rng = nullptr) {
    const CsvTable t = parse_csv_file(path);
    return ingest_tabular(t, feature_columns, objective_columns, noise_sd, subsample_k, rng);
}

}  // namespace mogro
