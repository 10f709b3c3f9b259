#pragma once

// File formats: model JSON, trajectory CSV, experiment config JSON and the
// bound-report / summary CSVs. Doubles are written in shortest round-trip
// form, so write -> read reproduces every value exactly.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pacrnn/bound.hpp"
#include "pacrnn/certify.hpp"
#include "pacrnn/dynsys.hpp"
#include "pacrnn/experiment.hpp"
#include "pacrnn/mixing.hpp"

namespace pacrnn {

/// {"n_s","n_v","n_y","sigma_f","sigma_g","A","B","b_s","C","D","b_y"},
/// matrices as nested row arrays.
std::string model_to_json(const RnnSystem& sys);
RnnSystem model_from_json(std::string_view text);
RnnSystem read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const RnnSystem& sys);

std::string constants_to_json(const ClassSConstants& c);
std::string data_constants_to_json(const DataConstants& d);

/// Header: t,x_0..x_{m-1},y_0..y_{p-1}.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

/// Header: t,v_0..v_{m-1} (a leading t column is optional).
std::vector<Vector> read_inputs_csv(std::istream& in);
/// Header: t,v_*,s_*,y_*.
void write_simulation_csv(std::ostream& out, std::span<const Vector> inputs,
                          const SimulationResult& sim);

/// Reads every ExperimentConfig field; missing keys keep their defaults.
/// "lambda_rule" is either "sqrt_n" or a positive number.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig read_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

inline constexpr std::string_view kReportHeader =
    "N,seed,lambda,delta,kl,psi_hat,r_N,post_emp_loss,total_bound,z_hat,n_samples";
inline constexpr std::string_view kSummaryHeader =
    "N,n_seeds,total_median,total_min,total_max,emp_median,emp_min,emp_max,vacuity_level,"
    "non_vacuous";

void write_reports_csv(std::ostream& out, std::span<const BoundReport> reports);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

std::string read_file(const std::filesystem::path& path);

}  // namespace pacrnn
