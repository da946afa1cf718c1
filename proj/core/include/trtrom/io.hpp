#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "trtrom/compare.hpp"
#include "trtrom/mlqd.hpp"
#include "trtrom/pod.hpp"

namespace trtrom {

/// Binary container shared by snapshot databases and bases:
///   "TRTROM01", int64 LE Nx, Nmu, Ng, corners, columns, stage,
///   double[columns] (step sizes or singular values),
///   double[rows * columns] column-major, uint64 LE grid fingerprint.
struct MatrixFile {
  std::int64_t cells = 0;
  std::int64_t angles = 0;
  std::int64_t groups = 0;
  std::int64_t corners = 0;
  std::int64_t stage = 0;
  Eigen::VectorXd per_column;
  Eigen::MatrixXd matrix;
  std::uint64_t fingerprint = 0;
};

void write_matrix_file(const std::filesystem::path& path, const MatrixFile& file);
/// Throws FormatError on a short, oversized or malformed file, or when
/// `expected_fingerprint` is given and differs.
MatrixFile read_matrix_file(const std::filesystem::path& path,
                            std::optional<std::uint64_t> expected_fingerprint = std::nullopt);

void write_database(const std::filesystem::path& path, const SnapshotDatabase& db);
SnapshotDatabase read_database(const std::filesystem::path& path,
                               std::optional<std::uint64_t> expected_fingerprint = std::nullopt);
void write_basis(const std::filesystem::path& path, const PodBasis& basis);
PodBasis read_basis(const std::filesystem::path& path, std::optional<std::uint64_t> expected_fingerprint = std::nullopt);

/// Long format: step,t_ns,cell,x_cm,T_keV,E_GJ_per_cm3.
void write_fields_csv(const std::filesystem::path& path, const RunRecord& record, const SpatialMesh& mesh);
FieldHistory read_fields_csv(const std::filesystem::path& path);
/// One row per time step with iteration counts and diagnostics.
void write_history_csv(const std::filesystem::path& path, const RunRecord& record);
/// index,sigma
void write_singular_values_csv(const std::filesystem::path& path, const Eigen::VectorXd& singular_values);
/// eps,stage,rank with 1-based stage numbers; one singular-value spectrum per stage.
void write_ranks_csv(const std::filesystem::path& path, const std::vector<double>& eps,
                     const std::vector<Eigen::VectorXd>& spectra);
/// t_ns,err_T,err_E
void write_errors_csv(const std::filesystem::path& path, const ErrorReport& report);
/// metric,T,E with rows max and time_integrated.
void write_error_summary_csv(const std::filesystem::path& path, const ErrorReport& report);

}  // namespace trtrom
