// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Transmit array geometry, angular discretization grid, element gain pattern
// and beam codebook. The steering phase computed here is the geometric phase
// of a uniform rectangular array element minus the precoder phase of the
// selected beam; all downstream coefficient computations reduce to it.

#ifndef lscm_array_model_hpp
#define lscm_array_model_hpp

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lscm/common.hpp"

namespace lscm
{

struct ArrayConfig
{
    int n_x = 1;              // antennas along x
    int n_y = 1;              // antennas along y
    double d_x = 0.05;        // element spacing along x [m]
    double d_y = 0.05;        // element spacing along y [m]
    double wavelength = 0.1;  // carrier wavelength [m]
    double sigma = 0.0;       // std of per-antenna phase error [rad]
    double power = 1.0;       // transmit power, linear units

    int n_antennas() const { return n_x * n_y; }

    void validate() const
    {
        if (n_x < 1 || n_y < 1)
            throw std::invalid_argument("ArrayConfig: n_x and n_y must be >= 1");
        if (d_x <= 0.0 || d_y <= 0.0)
            throw std::invalid_argument("ArrayConfig: element spacings must be positive");
        if (wavelength <= 0.0)
            throw std::invalid_argument("ArrayConfig: wavelength must be positive");
        if (sigma < 0.0)
            throw std::invalid_argument("ArrayConfig: sigma must be nonnegative");
        if (power <= 0.0)
            throw std::invalid_argument("ArrayConfig: power must be positive");
    }
};

// Discretized tilt/azimuth angles in degrees. Flattening is row-major with
// azimuth varying fastest: cell (i, j) maps to index i * n_azimuth + j.
struct AngularGrid
{
    std::vector<double> tilt_deg;
    std::vector<double> azimuth_deg;

    int n_tilt() const { return static_cast<int>(tilt_deg.size()); }
    int n_azimuth() const { return static_cast<int>(azimuth_deg.size()); }
    int size() const { return n_tilt() * n_azimuth(); }

    int flat_index(int i, int j) const
    {
        check_cell(i, j);
        return i * n_azimuth() + j;
    }

    std::pair<int, int> cell(int n) const
    {
        if (n < 0 || n >= size())
            throw std::out_of_range("AngularGrid: flat index out of range");
        return {n / n_azimuth(), n % n_azimuth()};
    }

    void check_cell(int i, int j) const
    {
        if (i < 0 || i >= n_tilt() || j < 0 || j >= n_azimuth())
            throw std::out_of_range("AngularGrid: cell index out of range");
    }

    void validate() const
    {
        if (tilt_deg.empty() || azimuth_deg.empty())
            throw std::invalid_argument("AngularGrid: angle lists must be nonempty");
        for (size_t i = 1; i < tilt_deg.size(); ++i)
            if (tilt_deg[i] <= tilt_deg[i - 1])
                throw std::invalid_argument("AngularGrid: tilt angles must be strictly increasing");
        for (size_t j = 1; j < azimuth_deg.size(); ++j)
            if (azimuth_deg[j] <= azimuth_deg[j - 1])
                throw std::invalid_argument("AngularGrid: azimuth angles must be strictly increasing");
    }

    // Regular grid covering [lo, hi] with the given step; endpoints included
    // when they land on the lattice. Default spacing elsewhere in the toolkit
    // is 2 degrees in tilt and 5 degrees in azimuth.
    static AngularGrid regular(double tilt_lo, double tilt_hi, double tilt_step,
                               double az_lo, double az_hi, double az_step)
    {
        if (tilt_step <= 0.0 || az_step <= 0.0)
            throw std::invalid_argument("AngularGrid::regular: steps must be positive");
        AngularGrid g;
        for (double t = tilt_lo; t <= tilt_hi + 1e-9; t += tilt_step)
            g.tilt_deg.push_back(t);
        for (double a = az_lo; a <= az_hi + 1e-9; a += az_step)
            g.azimuth_deg.push_back(a);
        g.validate();
        return g;
    }
};

// Amplitude element gain per grid cell (linear, not dB).
struct GainPattern
{
    Eigen::MatrixXd gains; // n_tilt x n_azimuth

    double at(int i, int j) const
    {
        if (i < 0 || i >= gains.rows() || j < 0 || j >= gains.cols())
            throw std::out_of_range("GainPattern: index out of range");
        return gains(i, j);
    }
};

inline double element_gain(const GainPattern &pattern, int i, int j) { return pattern.at(i, j); }

// Phase-only precoders, one n_x x n_y phase matrix per beam.
struct BeamCodebook
{
    std::vector<Eigen::MatrixXd> phase; // radians
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(phase.size()); }

    void validate(const ArrayConfig &cfg) const
    {
        for (const auto &p : phase)
            if (p.rows() != cfg.n_x || p.cols() != cfg.n_y)
                throw std::invalid_argument("BeamCodebook: phase matrix does not match array dimensions");
        if (!labels.empty() && labels.size() != phase.size())
            throw std::invalid_argument("BeamCodebook: label count does not match beam count");
    }
};

// Geometric phase of antenna element (x, y) toward direction (tilt, azimuth):
//   2*pi*(d_x*x/lambda)*cos(tilt)*sin(azimuth) + 2*pi*(d_y*y/lambda)*sin(tilt)
// Antenna indices are zero-based; a constant index offset only shifts all
// phases of a direction by a common constant, which cancels in |.|^2 sums.
inline double geometric_phase(const ArrayConfig &cfg, double tilt_deg, double azimuth_deg,
                              int x, int y)
{
    double th = deg2rad(tilt_deg);
    double ph = deg2rad(azimuth_deg);
    return 2.0 * pi * (cfg.d_x * x / cfg.wavelength) * std::cos(th) * std::sin(ph) +
           2.0 * pi * (cfg.d_y * y / cfg.wavelength) * std::sin(th);
}

inline double steering_phase(const ArrayConfig &cfg, const AngularGrid &grid,
                             const BeamCodebook &codebook, int m, int i, int j, int x, int y)
{
    grid.check_cell(i, j);
    if (m < 0 || m >= codebook.size())
        throw std::out_of_range("steering_phase: beam index out of range");
    if (x < 0 || x >= cfg.n_x || y < 0 || y >= cfg.n_y)
        throw std::out_of_range("steering_phase: antenna index out of range");
    return geometric_phase(cfg, grid.tilt_deg[i], grid.azimuth_deg[j], x, y) -
           codebook.phase[m](x, y);
}

// Conjugate-match steering: beam m's precoder phase equals the geometric
// phase at its steer direction, so the coherent sum peaks there.
inline BeamCodebook make_dft_codebook(const ArrayConfig &cfg,
                                      const std::vector<std::pair<double, double>> &steer_directions)
{
    if (steer_directions.empty())
        throw std::invalid_argument("make_dft_codebook: empty direction list");
    BeamCodebook cb;
    for (const auto &[tilt, az] : steer_directions)
    {
        Eigen::MatrixXd p(cfg.n_x, cfg.n_y);
        for (int x = 0; x < cfg.n_x; ++x)
            for (int y = 0; y < cfg.n_y; ++y)
                p(x, y) = geometric_phase(cfg, tilt, az, x, y);
        cb.phase.push_back(std::move(p));
        cb.labels.push_back("t" + format_double(tilt) + "_a" + format_double(az));
    }
    return cb;
}

// Synthetic element pattern, parabolic in dB around boresight with a floor.
// Attenuation reaches 3 dB (power) at half the 3 dB beamwidth from boresight.
// Gain here is amplitude, so the dB value is applied as 10^(dB/20).
struct ParabolicGainModel
{
    double peak_db = 8.0;
    double tilt_3db_deg = 12.0;
    double azimuth_3db_deg = 65.0;
    double floor_db = -30.0; // minimum gain, dB
    double boresight_tilt_deg = 0.0;
    double boresight_azimuth_deg = 0.0;

    double gain_db(double tilt_deg, double azimuth_deg) const
    {
        double dt = (tilt_deg - boresight_tilt_deg) / tilt_3db_deg;
        double da = (azimuth_deg - boresight_azimuth_deg) / azimuth_3db_deg;
        double att = 12.0 * dt * dt + 12.0 * da * da;
        return std::max(peak_db - att, floor_db);
    }

    double gain_linear(double tilt_deg, double azimuth_deg) const
    {
        return std::pow(10.0, gain_db(tilt_deg, azimuth_deg) / 20.0);
    }
};

inline GainPattern make_gain_pattern(const ParabolicGainModel &model, const AngularGrid &grid)
{
    GainPattern p;
    p.gains.resize(grid.n_tilt(), grid.n_azimuth());
    for (int i = 0; i < grid.n_tilt(); ++i)
        for (int j = 0; j < grid.n_azimuth(); ++j)
            p.gains(i, j) = model.gain_linear(grid.tilt_deg[i], grid.azimuth_deg[j]);
    return p;
}

inline GainPattern make_uniform_gain(const AngularGrid &grid, double gain = 1.0)
{
    GainPattern p;
    p.gains = Eigen::MatrixXd::Constant(grid.n_tilt(), grid.n_azimuth(), gain);
    return p;
}

// Gain table file: header `tilt_deg,azimuth_deg,gain_linear`, one row per
// grid cell; must cover the full grid.
inline GainPattern load_gain_table_csv(const std::string &path, const AngularGrid &grid)
{
    csv::File f = csv::read_file(path);
    if (f.header != std::vector<std::string>{"tilt_deg", "azimuth_deg", "gain_linear"})
        throw std::runtime_error(path + ": expected header tilt_deg,azimuth_deg,gain_linear");
    GainPattern p;
    p.gains = Eigen::MatrixXd::Constant(grid.n_tilt(), grid.n_azimuth(), -1.0);
    auto find_angle = [&](const std::vector<double> &list, double v) -> int {
        for (size_t k = 0; k < list.size(); ++k)
            if (std::abs(list[k] - v) < 1e-9)
                return static_cast<int>(k);
        return -1;
    };
    for (const auto &row : f.rows)
    {
        if (row.fields.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(row.line_no) + ": expected 3 fields");
        double t = csv::parse_double(row.fields[0], path, row.line_no);
        double a = csv::parse_double(row.fields[1], path, row.line_no);
        double g = csv::parse_double(row.fields[2], path, row.line_no);
        int i = find_angle(grid.tilt_deg, t);
        int j = find_angle(grid.azimuth_deg, a);
        if (i < 0 || j < 0)
            throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                                     ": angle not on the grid");
        if (g < 0.0)
            throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                                     ": gain must be nonnegative");
        p.gains(i, j) = g;
    }
    for (int i = 0; i < grid.n_tilt(); ++i)
        for (int j = 0; j < grid.n_azimuth(); ++j)
            if (p.gains(i, j) < 0.0)
                throw std::runtime_error(path + ": gain table does not cover grid cell (" +
                                         format_double(grid.tilt_deg[i]) + ", " +
                                         format_double(grid.azimuth_deg[j]) + ")");
    return p;
}

inline void save_gain_table_csv(const std::string &path, const GainPattern &pattern,
                                const AngularGrid &grid)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << "tilt_deg,azimuth_deg,gain_linear\n";
    for (int i = 0; i < grid.n_tilt(); ++i)
        for (int j = 0; j < grid.n_azimuth(); ++j)
            out << format_double(grid.tilt_deg[i]) << ',' << format_double(grid.azimuth_deg[j])
                << ',' << format_double(pattern.gains(i, j)) << '\n';
}

// Codebook file: columns `beam,x,y,phase_rad`; beams numbered 0..M-1.
inline BeamCodebook load_codebook_csv(const std::string &path, const ArrayConfig &cfg)
{
    csv::File f = csv::read_file(path);
    if (f.header != std::vector<std::string>{"beam", "x", "y", "phase_rad"})
        throw std::runtime_error(path + ": expected header beam,x,y,phase_rad");
    std::map<long, Eigen::MatrixXd> beams;
    for (const auto &row : f.rows)
    {
        if (row.fields.size() != 4)
            throw std::runtime_error(path + ":" + std::to_string(row.line_no) + ": expected 4 fields");
        long m = csv::parse_long(row.fields[0], path, row.line_no);
        long x = csv::parse_long(row.fields[1], path, row.line_no);
        long y = csv::parse_long(row.fields[2], path, row.line_no);
        double ph = csv::parse_double(row.fields[3], path, row.line_no);
        if (x < 0 || x >= cfg.n_x || y < 0 || y >= cfg.n_y)
            throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                                     ": antenna index out of range");
        auto it = beams.find(m);
        if (it == beams.end())
            it = beams.emplace(m, Eigen::MatrixXd::Zero(cfg.n_x, cfg.n_y)).first;
        it->second(x, y) = ph;
    }
    BeamCodebook cb;
    for (auto &[m, p] : beams)
    {
        cb.phase.push_back(std::move(p));
        cb.labels.push_back("beam" + std::to_string(m));
    }
    return cb;
}

inline void save_codebook_csv(const std::string &path, const BeamCodebook &cb)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << "beam,x,y,phase_rad\n";
    for (int m = 0; m < cb.size(); ++m)
        for (int x = 0; x < cb.phase[m].rows(); ++x)
            for (int y = 0; y < cb.phase[m].cols(); ++y)
                out << m << ',' << x << ',' << y << ',' << format_double(cb.phase[m](x, y)) << '\n';
}

} // namespace lscm

#endif
