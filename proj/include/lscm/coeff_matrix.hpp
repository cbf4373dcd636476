// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Coefficient matrix relating expected per-beam RSRP to expected per-angle
// channel gains:
//   A(m, n) = P * g^2 * ( Nx*Ny*(1 - e^{-sigma^2})
//                         + e^{-sigma^2} * ((sum cos psi)^2 + (sum sin psi)^2) )
// where n flattens grid cell (i, j) azimuth-fastest. The coherent-sum form
// equals the double sum over antenna pairs of cos(psi - psi') and costs
// O(Nx*Ny) per entry instead of O((Nx*Ny)^2).

#ifndef lscm_coeff_matrix_hpp
#define lscm_coeff_matrix_hpp

#include <Eigen/Dense>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lscm/array_model.hpp"
#include "lscm/common.hpp"

namespace lscm
{

struct CoefficientMatrix
{
    Eigen::MatrixXd a;        // M x N, linear power units
    Eigen::VectorXd col_norms; // l2 norm per column
    Eigen::MatrixXd a_hat;    // column-normalized; zero-norm columns stay zero
    std::vector<int> zero_columns;
    std::vector<std::string> col_labels; // `t<tilt>_a<azimuth>` per flattened cell

    int rows() const { return static_cast<int>(a.rows()); }
    int cols() const { return static_cast<int>(a.cols()); }

    // Recomputes col_norms, a_hat and the zero-column list from a.
    void finalize()
    {
        col_norms = a.colwise().norm();
        a_hat = a;
        zero_columns.clear();
        for (int n = 0; n < cols(); ++n)
        {
            if (col_norms(n) > 0.0)
                a_hat.col(n) /= col_norms(n);
            else
                zero_columns.push_back(n);
        }
    }
};

inline double compute_coefficient(const ArrayConfig &cfg, const AngularGrid &grid,
                                  const GainPattern &pattern, const BeamCodebook &codebook,
                                  int m, int i, int j)
{
    double sum_cos = 0.0, sum_sin = 0.0;
    for (int x = 0; x < cfg.n_x; ++x)
        for (int y = 0; y < cfg.n_y; ++y)
        {
            double psi = steering_phase(cfg, grid, codebook, m, i, j, x, y);
            sum_cos += std::cos(psi);
            sum_sin += std::sin(psi);
        }
    double g = pattern.at(i, j);
    double nt = static_cast<double>(cfg.n_x) * cfg.n_y;
    double e = std::exp(-cfg.sigma * cfg.sigma);
    return cfg.power * g * g * (nt * (1.0 - e) + e * (sum_cos * sum_cos + sum_sin * sum_sin));
}

inline CoefficientMatrix build_matrix(const ArrayConfig &cfg, const AngularGrid &grid,
                                      const GainPattern &pattern, const BeamCodebook &codebook)
{
    cfg.validate();
    grid.validate();
    codebook.validate(cfg);
    if (pattern.gains.rows() != grid.n_tilt() || pattern.gains.cols() != grid.n_azimuth())
        throw std::invalid_argument("build_matrix: gain pattern does not match grid");

    CoefficientMatrix cm;
    cm.a.resize(codebook.size(), grid.size());
    cm.col_labels.resize(grid.size());
    for (int i = 0; i < grid.n_tilt(); ++i)
        for (int j = 0; j < grid.n_azimuth(); ++j)
        {
            int n = grid.flat_index(i, j);
            cm.col_labels[n] = "t" + format_double(grid.tilt_deg[i]) + "_a" +
                               format_double(grid.azimuth_deg[j]);
            for (int m = 0; m < codebook.size(); ++m)
                cm.a(m, n) = compute_coefficient(cfg, grid, pattern, codebook, m, i, j);
        }
    cm.finalize();
    return cm;
}

struct ColumnRestriction
{
    CoefficientMatrix matrix;
    std::vector<int> index_map; // restricted column -> original flattened index
};

// Keeps the n columns with the largest l2 norms, ties broken toward lower
// original index; the index map preserves original flattened indices.
inline ColumnRestriction top_n_columns(const CoefficientMatrix &cm, int n)
{
    if (n <= 0)
        throw std::invalid_argument("top_n_columns: n must be positive");
    if (n > cm.cols())
        throw std::invalid_argument("top_n_columns: n exceeds column count");
    std::vector<int> order(cm.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return cm.col_norms(a) > cm.col_norms(b);
    });
    order.resize(n);

    ColumnRestriction out;
    out.index_map = order;
    out.matrix.a.resize(cm.rows(), n);
    out.matrix.col_labels.resize(n);
    for (int k = 0; k < n; ++k)
    {
        out.matrix.a.col(k) = cm.a.col(order[k]);
        out.matrix.col_labels[k] = cm.col_labels.empty() ? std::string() : cm.col_labels[order[k]];
    }
    out.matrix.finalize();
    return out;
}

inline CoefficientMatrix restrict_rows(const CoefficientMatrix &cm, const std::vector<int> &row_idx)
{
    if (row_idx.empty())
        throw std::invalid_argument("restrict_rows: empty row set");
    CoefficientMatrix out;
    out.a.resize(static_cast<int>(row_idx.size()), cm.cols());
    for (size_t r = 0; r < row_idx.size(); ++r)
    {
        if (row_idx[r] < 0 || row_idx[r] >= cm.rows())
            throw std::invalid_argument("restrict_rows: row index out of range");
        out.a.row(static_cast<int>(r)) = cm.a.row(row_idx[r]);
    }
    out.col_labels = cm.col_labels;
    out.finalize();
    return out;
}

// Dense CSV export: optional leading '#' comment lines, then a header row of
// flattened angle labels, then one row per beam.
inline void save_matrix_csv(const std::string &path, const CoefficientMatrix &cm,
                            const std::vector<std::string> &comments = {})
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    for (const auto &c : comments)
        out << "# " << c << '\n';
    for (int n = 0; n < cm.cols(); ++n)
        out << (n ? "," : "") << (cm.col_labels.empty() ? "c" + std::to_string(n) : cm.col_labels[n]);
    out << '\n';
    for (int m = 0; m < cm.rows(); ++m)
    {
        for (int n = 0; n < cm.cols(); ++n)
            out << (n ? "," : "") << format_double(cm.a(m, n));
        out << '\n';
    }
}

inline CoefficientMatrix load_matrix_csv(const std::string &path)
{
    csv::File f = csv::read_file(path);
    CoefficientMatrix cm;
    cm.col_labels = f.header;
    cm.a.resize(static_cast<int>(f.rows.size()), static_cast<int>(f.header.size()));
    for (size_t m = 0; m < f.rows.size(); ++m)
    {
        if (f.rows[m].fields.size() != f.header.size())
            throw std::runtime_error(path + ":" + std::to_string(f.rows[m].line_no) +
                                     ": field count does not match header");
        for (size_t n = 0; n < f.header.size(); ++n)
            cm.a(static_cast<int>(m), static_cast<int>(n)) =
                csv::parse_double(f.rows[m].fields[n], path, f.rows[m].line_no);
    }
    cm.finalize();
    return cm;
}

inline nlohmann::json matrix_to_json(const CoefficientMatrix &cm)
{
    nlohmann::json j;
    j["col_labels"] = cm.col_labels;
    j["rows"] = cm.rows();
    j["cols"] = cm.cols();
    std::vector<std::vector<double>> rows(cm.rows());
    for (int m = 0; m < cm.rows(); ++m)
    {
        rows[m].resize(cm.cols());
        for (int n = 0; n < cm.cols(); ++n)
            rows[m][n] = cm.a(m, n);
    }
    j["a"] = rows;
    std::vector<double> norms(cm.col_norms.data(), cm.col_norms.data() + cm.cols());
    j["col_norms"] = norms;
    j["zero_columns"] = cm.zero_columns;
    return j;
}

inline CoefficientMatrix matrix_from_json(const nlohmann::json &j)
{
    CoefficientMatrix cm;
    cm.col_labels = j.value("col_labels", std::vector<std::string>{});
    auto rows = j.at("a").get<std::vector<std::vector<double>>>();
    int m_count = static_cast<int>(rows.size());
    int n_count = m_count ? static_cast<int>(rows[0].size()) : 0;
    cm.a.resize(m_count, n_count);
    for (int m = 0; m < m_count; ++m)
    {
        if (static_cast<int>(rows[m].size()) != n_count)
            throw std::runtime_error("matrix_from_json: ragged rows");
        for (int n = 0; n < n_count; ++n)
            cm.a(m, n) = rows[m][n];
    }
    cm.finalize();
    return cm;
}

} // namespace lscm

#endif
