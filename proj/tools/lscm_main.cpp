// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Command-line front end:
//   lscm build-matrix --config cfg.json [--out dir]
//   lscm simulate     --config cfg.json [--seed u64] [--out dir]
//   lscm solve        --config cfg.json [--solver nnomp|wnomp|lasso] [--out dir]
//   lscm sweep        --config cfg.json [--var N|M|K] [--values a,b,c] [--out dir]
//   lscm rotate-eval  --config cfg.json [--out dir]

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lscm/io.hpp"

namespace
{

struct CommonOpts
{
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App *cmd, CommonOpts &opts)
{
    cmd->add_option("--config", opts.config_path, "scenario config (JSON)")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "override the config seed")
        ->each([&](const std::string &) { opts.seed_set = true; });
}

lscm::Scenario load(const CommonOpts &opts)
{
    lscm::Scenario sc = lscm::load_scenario(opts.config_path);
    if (opts.seed_set)
        sc.seed = opts.seed;
    std::cerr << "config_hash=" << sc.hash() << " seed=" << sc.seed << '\n';
    return sc;
}

void write_json(const std::string &path, const nlohmann::json &j)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

lscm::CoefficientMatrix build_from_scenario(const lscm::Scenario &sc)
{
    return lscm::build_matrix(sc.cfg, sc.grid, sc.pattern, sc.codebook);
}

int cmd_build_matrix(const CommonOpts &opts)
{
    lscm::Scenario sc = load(opts);
    lscm::CoefficientMatrix cm = build_from_scenario(sc);
    std::string hash = sc.hash();

    lscm::save_matrix_csv(opts.out_dir + "/matrix.csv", cm,
                          {"config_hash=" + hash + " seed=" + std::to_string(sc.seed)});

    std::ofstream norms(opts.out_dir + "/col_norms.csv");
    if (!norms)
        throw std::runtime_error("cannot write col_norms.csv");
    norms << "# config_hash=" << hash << " seed=" << sc.seed << '\n';
    norms << "column,label,norm\n";
    for (int n = 0; n < cm.cols(); ++n)
        norms << n << ',' << cm.col_labels[n] << ',' << lscm::format_double(cm.col_norms(n))
              << '\n';

    if (static_cast<long long>(cm.rows()) * cm.cols() <= 10000)
    {
        nlohmann::json j = lscm::matrix_to_json(cm);
        j["config_hash"] = hash;
        j["seed"] = sc.seed;
        write_json(opts.out_dir + "/matrix.json", j);
    }
    if (!cm.zero_columns.empty())
        std::cerr << "warning: " << cm.zero_columns.size() << " zero-norm columns\n";
    return 0;
}

int cmd_simulate(const CommonOpts &opts)
{
    lscm::Scenario sc = load(opts);
    int t_count = sc.raw.contains("simulate") ? sc.raw.at("simulate").value("t_count", 100) : 100;
    lscm::GroundTruthAps truth =
        lscm::generate_ground_truth(sc.grid.size(), sc.truth_k, sc.seed, sc.truth_dist);
    lscm::RsrpSampleSet set = lscm::estimate_expected_rsrp(sc.cfg, sc.grid, sc.pattern, sc.codebook,
                                                           truth, sc.shadow, sc.seed, t_count);
    std::string hash = sc.hash();
    lscm::write_trace_csv(opts.out_dir + "/trace.csv", set, sc.codebook.labels, hash, sc.seed);

    nlohmann::json j;
    j["config_hash"] = hash;
    j["seed"] = sc.seed;
    j["truth_support"] = truth.support;
    nlohmann::json xs = nlohmann::json::object();
    for (int s : truth.support)
        xs[std::to_string(s)] = truth.x(s);
    j["truth_x"] = xs;
    std::vector<double> mean(set.mean.data(), set.mean.data() + set.mean.size());
    j["mean_rsrp_linear"] = mean;
    write_json(opts.out_dir + "/truth.json", j);
    return 0;
}

int cmd_solve(const CommonOpts &opts, const std::string &solver)
{
    lscm::Scenario sc = load(opts);
    lscm::CoefficientMatrix full = build_from_scenario(sc);
    std::string hash = sc.hash();

    nlohmann::json out;
    out["config_hash"] = hash;
    out["seed"] = sc.seed;
    out["solver"] = solver;

    if (sc.raw.contains("measurements"))
    {
        std::string dir = ".";
        auto slash = opts.config_path.find_last_of('/');
        if (slash != std::string::npos)
            dir = opts.config_path.substr(0, slash);
        std::string mpath = dir + "/" + sc.raw.at("measurements").get<std::string>();
        auto grids = lscm::ingest_measurements(mpath);
        nlohmann::json per_grid = nlohmann::json::object();
        for (const auto &g : grids)
        {
            // map measured beam ids to codebook rows; absent beams drop rows
            std::vector<int> rows;
            Eigen::VectorXd y(g.beam_ids.size());
            for (size_t b = 0; b < g.beam_ids.size(); ++b)
            {
                auto it = std::find(sc.codebook.labels.begin(), sc.codebook.labels.end(),
                                    g.beam_ids[b]);
                if (it == sc.codebook.labels.end())
                    throw std::runtime_error("measurements: unknown beam_id '" + g.beam_ids[b] +
                                             "' (not in codebook)");
                rows.push_back(static_cast<int>(it - sc.codebook.labels.begin()));
                y(static_cast<int>(b)) = g.mean_linear(static_cast<int>(b));
            }
            lscm::CoefficientMatrix restricted = lscm::restrict_rows(full, rows);
            if (sc.top_n > 0)
            {
                auto top = lscm::top_n_columns(restricted, sc.top_n);
                lscm::SolverResult r =
                    lscm::run_named_solver(solver, top.matrix, y, sc.solver_cfg);
                nlohmann::json rj = lscm::solver_result_to_json(r);
                // remap to original flattened indices
                nlohmann::json xs = nlohmann::json::object();
                std::vector<int> supp;
                for (int s : r.support)
                {
                    xs[std::to_string(top.index_map[s])] = r.x_hat(s);
                    supp.push_back(top.index_map[s]);
                }
                std::sort(supp.begin(), supp.end());
                rj["x_hat"] = xs;
                rj["support"] = supp;
                per_grid[g.grid_id + "/" + g.cell_id] = rj;
            }
            else
            {
                lscm::SolverResult r = lscm::run_named_solver(solver, restricted, y, sc.solver_cfg);
                per_grid[g.grid_id + "/" + g.cell_id] = lscm::solver_result_to_json(r);
            }
        }
        out["grids"] = per_grid;
    }
    else
    {
        // synthetic mode: noiseless y = A x from the seeded ground truth
        lscm::CoefficientMatrix mat = full;
        std::vector<int> index_map;
        if (sc.top_n > 0)
        {
            auto top = lscm::top_n_columns(full, sc.top_n);
            mat = top.matrix;
            index_map = top.index_map;
        }
        lscm::GroundTruthAps truth =
            lscm::generate_ground_truth(mat.cols(), sc.truth_k, sc.seed, sc.truth_dist);
        Eigen::VectorXd y = mat.a * truth.x;
        lscm::SolverResult r = lscm::run_named_solver(solver, mat, y, sc.solver_cfg);
        out["result"] = lscm::solver_result_to_json(r);
        out["truth_support"] = truth.support;
        out["accuracy"] = lscm::support_accuracy(r.support, truth.support);
    }
    write_json(opts.out_dir + "/result.json", out);
    return 0;
}

int cmd_sweep(const CommonOpts &opts, std::string var, const std::vector<int> &values)
{
    lscm::Scenario sc = load(opts);
    lscm::CoefficientMatrix full = build_from_scenario(sc);

    lscm::ExperimentSpec spec;
    spec.seed = sc.seed;
    spec.solver_cfg = sc.solver_cfg;
    spec.truth_dist = sc.truth_dist;
    if (sc.raw.contains("sweep"))
    {
        const auto &s = sc.raw.at("sweep");
        if (var.empty())
            var = s.value("var", "N");
        if (values.empty() && s.contains("values"))
            spec.values = s.at("values").get<std::vector<int>>();
        spec.n_fixed = s.value("n_fixed", spec.n_fixed);
        spec.m_fixed = s.value("m_fixed", spec.m_fixed);
        spec.k_fixed = s.value("k_fixed", spec.k_fixed);
        spec.trials = s.value("trials", spec.trials);
        if (s.contains("solvers"))
            spec.solvers = s.at("solvers").get<std::vector<std::string>>();
    }
    if (!values.empty())
        spec.values = values;
    if (var == "N")
        spec.var = lscm::ExperimentSpec::Var::N;
    else if (var == "M")
        spec.var = lscm::ExperimentSpec::Var::M;
    else if (var == "K")
        spec.var = lscm::ExperimentSpec::Var::K;
    else
        throw std::runtime_error("sweep: --var must be one of N, M, K");

    auto rows = lscm::run_accuracy_sweep(spec, full);
    lscm::write_sweep_csv(opts.out_dir + "/sweep.csv", rows, sc.hash(), sc.seed);

    nlohmann::json j = nlohmann::json::array();
    for (const auto &r : rows)
        j.push_back({{"sweep_var", r.sweep_var},
                     {"value", r.value},
                     {"solver", r.solver},
                     {"mean_accuracy", r.mean_accuracy},
                     {"std", r.stddev},
                     {"trials", r.trials}});
    write_json(opts.out_dir + "/sweep.json",
               {{"config_hash", sc.hash()}, {"seed", sc.seed}, {"rows", j}});
    return 0;
}

int cmd_rotate_eval(const CommonOpts &opts)
{
    lscm::Scenario sc = load(opts);
    double tilt_off = 0.0, az_off = 10.0;
    int trials = 20;
    std::vector<std::string> solvers = {"nnomp", "wnomp", "lasso"};
    if (sc.raw.contains("rotate"))
    {
        const auto &r = sc.raw.at("rotate");
        tilt_off = r.value("tilt_offset_deg", tilt_off);
        az_off = r.value("azimuth_offset_deg", az_off);
        trials = r.value("trials", trials);
        if (r.contains("solvers"))
            solvers = r.at("solvers").get<std::vector<std::string>>();
    }

    lscm::CoefficientMatrix a0 = build_from_scenario(sc);
    lscm::RotatedScenario rot = lscm::rotate_scenario(sc.cfg, sc.grid, sc.codebook, az_off, tilt_off);
    // gain pattern re-evaluated on the rotated grid
    lscm::GainPattern rot_pattern;
    if (sc.raw.contains("gain") && sc.raw.at("gain").contains("table"))
        throw std::runtime_error("rotate-eval: table gain patterns cannot be re-evaluated off-grid; "
                                 "use a parabolic gain model");
    {
        lscm::ParabolicGainModel model;
        if (sc.raw.contains("gain"))
        {
            const auto &g = sc.raw.at("gain");
            model.peak_db = g.value("peak_db", model.peak_db);
            model.tilt_3db_deg = g.value("tilt_3db_deg", model.tilt_3db_deg);
            model.azimuth_3db_deg = g.value("azimuth_3db_deg", model.azimuth_3db_deg);
            model.floor_db = g.value("floor_db", model.floor_db);
            model.boresight_tilt_deg = g.value("boresight_tilt_deg", model.boresight_tilt_deg);
            model.boresight_azimuth_deg =
                g.value("boresight_azimuth_deg", model.boresight_azimuth_deg);
        }
        rot_pattern = lscm::make_gain_pattern(model, rot.grid);
    }
    lscm::CoefficientMatrix a_rot = lscm::build_matrix(rot.cfg, rot.grid, rot_pattern, rot.codebook);

    std::vector<std::tuple<std::string, int, std::string, double>> rows;
    for (const auto &solver : solvers)
    {
        double mae_sum = 0.0;
        for (int trial = 0; trial < trials; ++trial)
        {
            std::uint64_t tseed = lscm::mix64(sc.seed ^ lscm::mix64(trial + 0x726f74ULL));
            lscm::GroundTruthAps truth =
                lscm::generate_ground_truth(a0.cols(), sc.truth_k, tseed, sc.truth_dist);
            Eigen::VectorXd y = a0.a * truth.x;
            lscm::SolverResult r = lscm::run_named_solver(solver, a0, y, sc.solver_cfg);
            Eigen::VectorXd pred = lscm::predict_rotated_rsrp(r.x_hat, a_rot);
            Eigen::VectorXd ref = a_rot.a * truth.x;
            mae_sum += lscm::mae_db(lscm::to_db_clipped(pred), lscm::to_db_clipped(ref));
        }
        rows.emplace_back("synthetic", trials, solver, mae_sum / trials);
    }
    lscm::write_mae_csv(opts.out_dir + "/rotate_mae.csv", rows, sc.hash(), sc.seed);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"localized statistical channel modeling toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string solver = "wnomp";
    std::string sweep_var;
    std::vector<int> sweep_values;

    auto *build = app.add_subcommand("build-matrix", "emit the coefficient matrix and column norms");
    add_common(build, opts);

    auto *sim = app.add_subcommand("simulate", "emit Monte Carlo RSRP traces");
    add_common(sim, opts);

    auto *solve = app.add_subcommand("solve", "recover the angular power spectrum");
    add_common(solve, opts);
    solve->add_option("--solver", solver, "nnomp|wnomp|lasso");

    auto *sweep = app.add_subcommand("sweep", "accuracy sweep over N, M or K");
    add_common(sweep, opts);
    sweep->add_option("--var", sweep_var, "sweep variable: N, M or K");
    sweep->add_option("--values", sweep_values, "sweep values")->delimiter(',');

    auto *rot = app.add_subcommand("rotate-eval", "array-rotation RSRP prediction MAE");
    add_common(rot, opts);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (build->parsed())
            return cmd_build_matrix(opts);
        if (sim->parsed())
            return cmd_simulate(opts);
        if (solve->parsed())
            return cmd_solve(opts, solver);
        if (sweep->parsed())
            return cmd_sweep(opts, sweep_var, sweep_values);
        if (rot->parsed())
            return cmd_rotate_eval(opts);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
