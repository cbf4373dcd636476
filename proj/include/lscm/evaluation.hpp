// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Experiment harness: support-recovery accuracy sweeps over problem size
// (N columns, M beams, K paths) and the array-rotation RSRP prediction
// protocol with its dB-domain mean absolute error.

#ifndef lscm_evaluation_hpp
#define lscm_evaluation_hpp

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lscm/array_model.hpp"
#include "lscm/channel_sim.hpp"
#include "lscm/coeff_matrix.hpp"
#include "lscm/solvers.hpp"

namespace lscm
{

// Fraction of true nonzero entries recovered: |est ∩ truth| / |truth|.
inline double support_accuracy(const std::vector<int> &est_support,
                               const std::vector<int> &truth_support)
{
    if (truth_support.empty())
        throw std::invalid_argument("support_accuracy: empty truth support");
    std::vector<int> est = est_support, truth = truth_support;
    std::sort(est.begin(), est.end());
    std::sort(truth.begin(), truth.end());
    std::vector<int> inter;
    std::set_intersection(est.begin(), est.end(), truth.begin(), truth.end(),
                          std::back_inserter(inter));
    return static_cast<double>(inter.size()) / static_cast<double>(truth.size());
}

inline double mae_db(const Eigen::VectorXd &pred_db, const Eigen::VectorXd &meas_db)
{
    if (pred_db.size() != meas_db.size() || pred_db.size() == 0)
        throw std::invalid_argument("mae_db: length mismatch");
    return (pred_db - meas_db).cwiseAbs().mean();
}

// Predicted per-beam RSRP after applying a (possibly rotated) coefficient
// matrix; linear units.
inline Eigen::VectorXd predict_rotated_rsrp(const Eigen::VectorXd &x_hat,
                                            const CoefficientMatrix &a_rotated)
{
    if (x_hat.size() != a_rotated.cols())
        throw std::invalid_argument("predict_rotated_rsrp: dimension mismatch");
    return a_rotated.a * x_hat;
}

constexpr double db_floor = -200.0; // clip for zero linear predictions

inline Eigen::VectorXd to_db_clipped(const Eigen::VectorXd &linear)
{
    Eigen::VectorXd out(linear.size());
    for (int i = 0; i < linear.size(); ++i)
        out(i) = linear(i) > 0.0 ? std::max(to_db(linear(i)), db_floor) : db_floor;
    return out;
}

// A path at (tilt, azimuth) is seen by the rotated array at
// (tilt - tilt_offset, azimuth - azimuth_offset): the returned grid carries
// the shifted angles, ready for build_matrix with a gain model evaluated on
// it. Rotated angles must stay within the modeled field of view (+-90 deg).
struct RotatedScenario
{
    ArrayConfig cfg;
    AngularGrid grid;
    BeamCodebook codebook;
};

inline RotatedScenario rotate_scenario(const ArrayConfig &cfg, const AngularGrid &grid,
                                       const BeamCodebook &codebook, double azimuth_offset_deg,
                                       double tilt_offset_deg)
{
    RotatedScenario out{cfg, grid, codebook};
    std::string clipped;
    for (auto &t : out.grid.tilt_deg)
    {
        t -= tilt_offset_deg;
        if (t < -90.0 || t > 90.0)
            clipped += " tilt=" + format_double(t);
    }
    for (auto &a : out.grid.azimuth_deg)
    {
        a -= azimuth_offset_deg;
        if (a < -90.0 || a > 90.0)
            clipped += " azimuth=" + format_double(a);
    }
    if (!clipped.empty())
        throw std::invalid_argument("rotate_scenario: rotated cells leave coverage:" + clipped);
    return out;
}

struct ExperimentSpec
{
    enum class Var
    {
        N,
        M,
        K
    };
    Var var = Var::N;
    std::vector<int> values;
    int n_fixed = 400;
    int m_fixed = 32;
    int k_fixed = 5;
    int trials = 200;
    std::uint64_t seed = 1;
    std::vector<std::string> solvers = {"nnomp", "wnomp", "lasso"};
    SolverConfig solver_cfg;
    ValueDist truth_dist;
};

inline std::string to_string(ExperimentSpec::Var v)
{
    switch (v)
    {
    case ExperimentSpec::Var::N: return "N";
    case ExperimentSpec::Var::M: return "M";
    case ExperimentSpec::Var::K: return "K";
    }
    return "?";
}

struct SweepRow
{
    std::string sweep_var;
    int value = 0;
    std::string solver;
    double mean_accuracy = 0.0;
    double stddev = 0.0;
    int trials = 0;
};

inline SolverResult run_named_solver(const std::string &name, const CoefficientMatrix &a,
                                     const Eigen::VectorXd &y, const SolverConfig &cfg)
{
    if (name == "nnomp")
        return nnomp(a, y, cfg);
    if (name == "wnomp")
        return wnomp(a, y, cfg);
    if (name == "lasso")
        return lasso_nn_auto(a, y, cfg);
    throw std::invalid_argument("unknown solver: " + name);
}

// Deterministic spread: every ceil(total/m)-th beam, starting at 0.
inline std::vector<int> spread_beam_subset(int m_total, int m)
{
    if (m < 1 || m > m_total)
        throw std::invalid_argument("spread_beam_subset: m out of range");
    std::vector<int> rows;
    for (int i = 0; i < m; ++i)
        rows.push_back(static_cast<int>(static_cast<std::int64_t>(i) * m_total / m));
    return rows;
}

// Synthetic sweep: noiseless y = A x with K-sparse ground truth on the
// restricted column set; accuracy averaged over seeded trials.
inline std::vector<SweepRow> run_accuracy_sweep(const ExperimentSpec &spec,
                                                const CoefficientMatrix &full)
{
    if (spec.values.empty())
        throw std::invalid_argument("run_accuracy_sweep: empty value list");
    if (spec.trials < 1)
        throw std::invalid_argument("run_accuracy_sweep: trials must be >= 1");

    std::vector<SweepRow> report;
    for (int value : spec.values)
    {
        int n = spec.var == ExperimentSpec::Var::N ? value : spec.n_fixed;
        int m = spec.var == ExperimentSpec::Var::M ? value : spec.m_fixed;
        int k = spec.var == ExperimentSpec::Var::K ? value : spec.k_fixed;
        if (m > full.rows())
            throw std::invalid_argument("run_accuracy_sweep: M exceeds available beams");
        if (n > full.cols())
            throw std::invalid_argument("run_accuracy_sweep: N exceeds available columns");
        if (k > n)
            throw std::invalid_argument("run_accuracy_sweep: K exceeds N");

        const bool random_beams = spec.var == ExperimentSpec::Var::M && m < full.rows();
        ColumnRestriction restricted;
        if (!random_beams)
            restricted = top_n_columns(full, n);

        SolverConfig scfg = spec.solver_cfg;
        scfg.k_max = k;

        std::vector<double> acc_sum(spec.solvers.size(), 0.0);
        std::vector<double> acc_sq(spec.solvers.size(), 0.0);
        for (int trial = 0; trial < spec.trials; ++trial)
        {
            // common random numbers across sweep points: seed by trial only
            std::uint64_t trial_seed =
                mix64(spec.seed ^ mix64(static_cast<std::uint64_t>(trial) + 0x7472ULL));
            if (random_beams)
            {
                // per-trial beam subset: the first m of a seeded permutation,
                // so subsets are nested across M values within a trial
                CounterRng subset_rng(trial_seed, {0x6265616dULL});
                std::vector<int> order(full.rows());
                for (int i = 0; i < full.rows(); ++i)
                    order[i] = i;
                for (int i = full.rows() - 1; i > 0; --i)
                    std::swap(order[i], order[subset_rng.below(static_cast<std::uint64_t>(i + 1))]);
                std::vector<int> subset(order.begin(), order.begin() + m);
                std::sort(subset.begin(), subset.end());
                restricted = top_n_columns(restrict_rows(full, subset), n);
            }
            GroundTruthAps truth = generate_ground_truth(n, k, trial_seed, spec.truth_dist);
            Eigen::VectorXd y = restricted.matrix.a * truth.x;
            for (size_t s = 0; s < spec.solvers.size(); ++s)
            {
                SolverResult r = run_named_solver(spec.solvers[s], restricted.matrix, y, scfg);
                double acc = support_accuracy(r.support, truth.support);
                acc_sum[s] += acc;
                acc_sq[s] += acc * acc;
            }
        }
        for (size_t s = 0; s < spec.solvers.size(); ++s)
        {
            SweepRow row;
            row.sweep_var = to_string(spec.var);
            row.value = value;
            row.solver = spec.solvers[s];
            row.trials = spec.trials;
            row.mean_accuracy = acc_sum[s] / spec.trials;
            double var = acc_sq[s] / spec.trials - row.mean_accuracy * row.mean_accuracy;
            row.stddev = std::sqrt(std::max(0.0, var));
            report.push_back(row);
        }
    }
    return report;
}

} // namespace lscm

#endif
