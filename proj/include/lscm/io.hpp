// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Measurement ingestion, scenario configuration (JSON), config hashing and
// the artifact writers shared by the command-line tool.

#ifndef lscm_io_hpp
#define lscm_io_hpp

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "lscm/array_model.hpp"
#include "lscm/channel_sim.hpp"
#include "lscm/coeff_matrix.hpp"
#include "lscm/evaluation.hpp"
#include "lscm/solvers.hpp"

namespace lscm
{

struct MeasurementRecord
{
    std::string grid_id;
    std::string cell_id;
    std::string beam_id;
    double rsrp_db = 0.0;
    std::string timestamp; // optional
};

// Per-grid aggregate: dB samples converted to linear and averaged in the
// linear domain; beams never seen for a grid are simply absent.
struct GridMeasurement
{
    std::string grid_id;
    std::string cell_id;
    std::vector<std::string> beam_ids; // sorted
    Eigen::VectorXd mean_linear;       // aligned with beam_ids
    std::vector<int> counts;
};

// CSV with header `grid_id,cell_id,beam_id,rsrp_db[,timestamp]`.
inline std::vector<MeasurementRecord> read_measurement_csv(const std::string &path)
{
    csv::File f = csv::read_file(path);
    bool has_ts = f.header.size() == 5 && f.header[4] == "timestamp";
    std::vector<std::string> expect = {"grid_id", "cell_id", "beam_id", "rsrp_db"};
    if (!(std::equal(expect.begin(), expect.end(), f.header.begin()) &&
          (f.header.size() == 4 || has_ts)))
        throw std::runtime_error(path + ": expected header grid_id,cell_id,beam_id,rsrp_db[,timestamp]");
    if (f.rows.empty())
        throw std::runtime_error(path + ": no measurement rows");
    std::vector<MeasurementRecord> recs;
    for (const auto &row : f.rows)
    {
        if (row.fields.size() != f.header.size())
            throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                                     ": field count does not match header");
        MeasurementRecord r;
        r.grid_id = row.fields[0];
        r.cell_id = row.fields[1];
        r.beam_id = row.fields[2];
        if (r.grid_id.empty() || r.cell_id.empty() || r.beam_id.empty())
            throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                                     ": empty identifier field");
        r.rsrp_db = csv::parse_double(row.fields[3], path, row.line_no);
        if (!std::isfinite(r.rsrp_db))
            throw std::runtime_error(path + ":" + std::to_string(row.line_no) +
                                     ": rsrp_db must be finite");
        if (has_ts)
            r.timestamp = row.fields[4];
        recs.push_back(std::move(r));
    }
    return recs;
}

inline std::vector<GridMeasurement> ingest_measurements(const std::string &path)
{
    auto recs = read_measurement_csv(path);
    // (grid, cell) -> beam -> (linear sum, count); maps keep output sorted
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::pair<double, int>>> acc;
    for (const auto &r : recs)
    {
        auto &slot = acc[{r.grid_id, r.cell_id}][r.beam_id];
        slot.first += to_linear(r.rsrp_db);
        slot.second += 1;
    }
    std::vector<GridMeasurement> out;
    for (const auto &[key, beams] : acc)
    {
        GridMeasurement g;
        g.grid_id = key.first;
        g.cell_id = key.second;
        g.mean_linear.resize(static_cast<int>(beams.size()));
        int idx = 0;
        for (const auto &[beam, sum_count] : beams)
        {
            g.beam_ids.push_back(beam);
            g.mean_linear(idx++) = sum_count.first / sum_count.second;
            g.counts.push_back(sum_count.second);
        }
        out.push_back(std::move(g));
    }
    return out;
}

// FNV-1a 64-bit over the canonical (key-sorted) JSON dump.
inline std::string config_hash(const nlohmann::json &config)
{
    std::string s = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Scenario configuration bundled from a JSON file. Section layout mirrors
// the domain types; see README for the full key reference.
struct Scenario
{
    ArrayConfig cfg;
    AngularGrid grid;
    GainPattern pattern;
    BeamCodebook codebook;
    ShadowingParams shadow;
    ValueDist truth_dist;
    SolverConfig solver_cfg;
    std::uint64_t seed = 1;
    int truth_k = 5;
    int top_n = 0; // 0: use the full grid
    nlohmann::json raw;

    std::string hash() const { return config_hash(raw); }
};

namespace detail
{

template <typename T>
T require(const nlohmann::json &j, const std::string &path, const std::string &key)
{
    if (!j.contains(key))
        throw std::runtime_error("config: missing field " + path + "." + key);
    try
    {
        return j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception &)
    {
        throw std::runtime_error("config: invalid value at " + path + "." + key);
    }
}

} // namespace detail

inline Scenario scenario_from_json(const nlohmann::json &j, const std::string &base_dir = ".")
{
    using detail::require;
    Scenario sc;
    sc.raw = j;

    const auto &arr = j.at("array");
    sc.cfg.n_x = require<int>(arr, "array", "n_x");
    sc.cfg.n_y = require<int>(arr, "array", "n_y");
    sc.cfg.d_x = require<double>(arr, "array", "d_x");
    sc.cfg.d_y = require<double>(arr, "array", "d_y");
    sc.cfg.wavelength = require<double>(arr, "array", "wavelength");
    sc.cfg.sigma = arr.value("sigma", 0.0);
    sc.cfg.power = arr.value("power", 1.0);
    sc.cfg.validate();

    const auto &grid = j.at("grid");
    if (grid.contains("tilt_angles"))
    {
        sc.grid.tilt_deg = require<std::vector<double>>(grid, "grid", "tilt_angles");
        sc.grid.azimuth_deg = require<std::vector<double>>(grid, "grid", "azimuth_angles");
        sc.grid.validate();
    }
    else
    {
        sc.grid = AngularGrid::regular(
            require<double>(grid, "grid", "tilt_min"), require<double>(grid, "grid", "tilt_max"),
            grid.value("tilt_step", 2.0), require<double>(grid, "grid", "azimuth_min"),
            require<double>(grid, "grid", "azimuth_max"), grid.value("azimuth_step", 5.0));
    }

    if (j.contains("gain") && j.at("gain").contains("table"))
    {
        sc.pattern = load_gain_table_csv(
            base_dir + "/" + j.at("gain").at("table").get<std::string>(), sc.grid);
    }
    else
    {
        ParabolicGainModel model;
        if (j.contains("gain"))
        {
            const auto &g = j.at("gain");
            model.peak_db = g.value("peak_db", model.peak_db);
            model.tilt_3db_deg = g.value("tilt_3db_deg", model.tilt_3db_deg);
            model.azimuth_3db_deg = g.value("azimuth_3db_deg", model.azimuth_3db_deg);
            model.floor_db = g.value("floor_db", model.floor_db);
            model.boresight_tilt_deg = g.value("boresight_tilt_deg", model.boresight_tilt_deg);
            model.boresight_azimuth_deg = g.value("boresight_azimuth_deg", model.boresight_azimuth_deg);
        }
        sc.pattern = make_gain_pattern(model, sc.grid);
    }

    const auto &cb = j.at("codebook");
    if (cb.contains("file"))
    {
        sc.codebook = load_codebook_csv(base_dir + "/" + cb.at("file").get<std::string>(), sc.cfg);
    }
    else if (cb.contains("directions"))
    {
        std::vector<std::pair<double, double>> dirs;
        for (const auto &d : cb.at("directions"))
            dirs.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
        sc.codebook = make_dft_codebook(sc.cfg, dirs);
    }
    else if (cb.contains("auto"))
    {
        // evenly spread steer directions over the given spans
        const auto &a = cb.at("auto");
        int nt = require<int>(a, "codebook.auto", "n_tilt");
        int na = require<int>(a, "codebook.auto", "n_azimuth");
        double t_lo = require<double>(a, "codebook.auto", "tilt_min");
        double t_hi = require<double>(a, "codebook.auto", "tilt_max");
        double a_lo = require<double>(a, "codebook.auto", "azimuth_min");
        double a_hi = require<double>(a, "codebook.auto", "azimuth_max");
        std::vector<std::pair<double, double>> dirs;
        for (int it = 0; it < nt; ++it)
            for (int ia = 0; ia < na; ++ia)
            {
                double t = nt == 1 ? 0.5 * (t_lo + t_hi) : t_lo + (t_hi - t_lo) * it / (nt - 1);
                double az = na == 1 ? 0.5 * (a_lo + a_hi) : a_lo + (a_hi - a_lo) * ia / (na - 1);
                dirs.emplace_back(t, az);
            }
        sc.codebook = make_dft_codebook(sc.cfg, dirs);
    }
    else
        throw std::runtime_error("config: codebook needs one of file/directions/auto");
    sc.codebook.validate(sc.cfg);

    if (j.contains("shadowing"))
        sc.shadow.log_std = j.at("shadowing").value("log_std", 0.0);
    if (j.contains("truth"))
    {
        const auto &t = j.at("truth");
        sc.truth_k = t.value("k", sc.truth_k);
        sc.truth_dist.min_db = t.value("value_min_db", sc.truth_dist.min_db);
        sc.truth_dist.max_db = t.value("value_max_db", sc.truth_dist.max_db);
    }
    if (j.contains("solver"))
    {
        const auto &s = j.at("solver");
        sc.solver_cfg.k_max = s.value("k_max", sc.truth_k);
        sc.solver_cfg.stop_tol = s.value("stop_tol", -1.0);
        sc.solver_cfg.max_iter = s.value("max_iter", -1);
        sc.solver_cfg.lasso_lambda = s.value("lasso_lambda", -1.0);
        sc.solver_cfg.lasso_step = s.value("lasso_step", -1.0);
        sc.solver_cfg.lasso_backtracking = s.value("lasso_backtracking", false);
        sc.solver_cfg.lasso_max_iter = s.value("lasso_max_iter", 2000);
    }
    else
        sc.solver_cfg.k_max = sc.truth_k;
    sc.seed = j.value("seed", 1ULL);
    sc.top_n = j.value("top_n", 0);
    return sc;
}

inline Scenario load_scenario(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }
    std::string dir = ".";
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos)
        dir = path.substr(0, slash);
    return scenario_from_json(j, dir);
}

inline nlohmann::json solver_result_to_json(const SolverResult &r)
{
    nlohmann::json j;
    nlohmann::json xs = nlohmann::json::object();
    for (int s : r.support)
        xs[std::to_string(s)] = r.x_hat(s);
    j["x_hat"] = xs;
    j["support"] = r.support;
    j["residual_norms"] = r.residual_norms;
    j["termination"] = to_string(r.termination);
    j["iterations"] = r.iterations;
    return j;
}

inline void write_sweep_csv(const std::string &path, const std::vector<SweepRow> &rows,
                            const std::string &hash, std::uint64_t seed)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << "# config_hash=" << hash << " seed=" << seed << '\n';
    out << "sweep_var,value,solver,mean_accuracy,std,trials\n";
    for (const auto &r : rows)
        out << r.sweep_var << ',' << r.value << ',' << r.solver << ','
            << format_double(r.mean_accuracy) << ',' << format_double(r.stddev) << ',' << r.trials
            << '\n';
}

inline void write_mae_csv(const std::string &path,
                          const std::vector<std::tuple<std::string, int, std::string, double>> &rows,
                          const std::string &hash, std::uint64_t seed)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << "# config_hash=" << hash << " seed=" << seed << '\n';
    out << "cellclass,n_grids,solver,mae_db\n";
    for (const auto &[cls, n, solver, mae] : rows)
        out << cls << ',' << n << ',' << solver << ',' << format_double(mae) << '\n';
}

inline void write_trace_csv(const std::string &path, const RsrpSampleSet &set,
                            const std::vector<std::string> &beam_labels, const std::string &hash,
                            std::uint64_t seed)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << "# config_hash=" << hash << " seed=" << seed << '\n';
    out << "t,beam,rsrp_linear,rsrp_db\n";
    for (int t = 0; t < set.t_count; ++t)
        for (int m = 0; m < set.samples.cols(); ++m)
        {
            double lin = set.samples(t, m);
            double db = lin > 0.0 ? to_db(lin) : db_floor;
            out << t << ',' << (m < static_cast<int>(beam_labels.size()) ? beam_labels[m]
                                                                          : std::to_string(m))
                << ',' << format_double(lin) << ',' << format_double(std::max(db, db_floor)) << '\n';
        }
}

} // namespace lscm

#endif
