#include "trtrom/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "trtrom/error.hpp"

namespace trtrom {

namespace {

constexpr std::array<char, 8> kMagic{'T', 'R', 'T', 'R', 'O', 'M', '0', '1'};
constexpr std::size_t kHeaderInts = 6;

void put_u64(std::string& buf, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xffU));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_all(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  File f(std::fopen(path.string().c_str(), "w"));
  if (!f) throw Error("cannot write '" + path.string() + "'");
  return f;
}

void finish_csv(File f, const std::filesystem::path& path) {
  if (std::ferror(f.get()) != 0 || std::fclose(f.release()) != 0)
    throw Error("write to '" + path.string() + "' failed");
}

}  // namespace

void write_matrix_file(const std::filesystem::path& path, const MatrixFile& file) {
  const Eigen::Index cols = file.matrix.cols();
  if (file.per_column.size() != cols) throw LayoutError("matrix file: per-column array length mismatch");
  if (file.matrix.rows() != file.cells * file.angles * file.groups * file.corners)
    throw LayoutError("matrix file: row count does not match the grid header");
  std::string buf(kMagic.begin(), kMagic.end());
  buf.reserve(buf.size() + 8 * (kHeaderInts + 1 + static_cast<std::size_t>(cols) * (1 + file.matrix.rows())));
  for (std::int64_t v : {file.cells, file.angles, file.groups, file.corners, static_cast<std::int64_t>(cols),
                         file.stage})
    put_u64(buf, static_cast<std::uint64_t>(v));
  for (Eigen::Index j = 0; j < cols; ++j) put_u64(buf, std::bit_cast<std::uint64_t>(file.per_column[j]));
  const double* data = file.matrix.data();
  for (Eigen::Index k = 0; k < file.matrix.size(); ++k) put_u64(buf, std::bit_cast<std::uint64_t>(data[k]));
  put_u64(buf, file.fingerprint);
  write_all(path, buf);
}

MatrixFile read_matrix_file(const std::filesystem::path& path, std::optional<std::uint64_t> expected_fingerprint) {
  const std::string raw = read_all(path);
  const std::string where = "'" + path.string() + "'";
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  const std::size_t fixed = kMagic.size() + 8 * kHeaderInts;
  if (raw.size() < fixed) throw FormatError(where + " is truncated (header)");
  if (std::memcmp(raw.data(), kMagic.data(), kMagic.size()) != 0) throw FormatError(where + " has a bad magic number");
  std::int64_t h[kHeaderInts];
  for (std::size_t i = 0; i < kHeaderInts; ++i)
    h[i] = static_cast<std::int64_t>(get_u64(p + kMagic.size() + 8 * i));
  MatrixFile f;
  f.cells = h[0];
  f.angles = h[1];
  f.groups = h[2];
  f.corners = h[3];
  const std::int64_t cols = h[4];
  f.stage = h[5];
  constexpr std::int64_t kLimit = std::int64_t{1} << 40;
  for (std::int64_t v : {f.cells, f.angles, f.groups, f.corners, cols})
    if (v < 0 || v > kLimit) throw FormatError(where + " has a corrupt header");
  const std::int64_t rows = f.cells * f.angles * f.groups * f.corners;
  if (rows > kLimit || (cols > 0 && rows > kLimit / cols)) throw FormatError(where + " has a corrupt header");
  const std::size_t expected = fixed + 8 * static_cast<std::size_t>(cols + rows * cols + 1);
  if (raw.size() < expected) throw FormatError(where + " is truncated");
  if (raw.size() > expected) throw FormatError(where + " has trailing bytes");

  std::size_t off = fixed;
  f.per_column.resize(cols);
  for (std::int64_t j = 0; j < cols; ++j, off += 8) f.per_column[j] = std::bit_cast<double>(get_u64(p + off));
  f.matrix.resize(rows, cols);
  double* data = f.matrix.data();
  for (std::int64_t k = 0; k < rows * cols; ++k, off += 8) data[k] = std::bit_cast<double>(get_u64(p + off));
  f.fingerprint = get_u64(p + off);
  if (expected_fingerprint && *expected_fingerprint != f.fingerprint)
    throw FormatError(where + " was written for a different grid (fingerprint mismatch)");
  return f;
}

void write_database(const std::filesystem::path& path, const SnapshotDatabase& db) {
  write_matrix_file(path, MatrixFile{static_cast<std::int64_t>(db.cells), static_cast<std::int64_t>(db.angles),
                                     static_cast<std::int64_t>(db.groups),
                                     static_cast<std::int64_t>(PhaseSpaceLayout::kCorners),
                                     static_cast<std::int64_t>(db.stage), db.dt, db.snapshots, db.fingerprint});
}

SnapshotDatabase read_database(const std::filesystem::path& path, std::optional<std::uint64_t> expected_fingerprint) {
  MatrixFile f = read_matrix_file(path, expected_fingerprint);
  if (f.corners != static_cast<std::int64_t>(PhaseSpaceLayout::kCorners) || f.stage < 0)
    throw FormatError("'" + path.string() + "' is not a snapshot database for this discretization");
  SnapshotDatabase db;
  db.snapshots = std::move(f.matrix);
  db.dt = std::move(f.per_column);
  db.stage = static_cast<std::size_t>(f.stage);
  db.fingerprint = f.fingerprint;
  db.cells = static_cast<std::size_t>(f.cells);
  db.angles = static_cast<std::size_t>(f.angles);
  db.groups = static_cast<std::size_t>(f.groups);
  return db;
}

void write_basis(const std::filesystem::path& path, const PodBasis& basis) {
  write_matrix_file(path,
                    MatrixFile{static_cast<std::int64_t>(basis.cells), static_cast<std::int64_t>(basis.angles),
                               static_cast<std::int64_t>(basis.groups),
                               static_cast<std::int64_t>(PhaseSpaceLayout::kCorners),
                               static_cast<std::int64_t>(basis.stage), basis.singular_values, basis.vectors,
                               basis.fingerprint});
}

PodBasis read_basis(const std::filesystem::path& path, std::optional<std::uint64_t> expected_fingerprint) {
  SnapshotDatabase db = read_database(path, expected_fingerprint);
  PodBasis b;
  b.vectors = std::move(db.snapshots);
  b.singular_values = std::move(db.dt);
  b.stage = db.stage;
  b.fingerprint = db.fingerprint;
  b.cells = db.cells;
  b.angles = db.angles;
  b.groups = db.groups;
  return b;
}

void write_fields_csv(const std::filesystem::path& path, const RunRecord& record, const SpatialMesh& mesh) {
  File f = open_csv(path);
  std::fprintf(f.get(), "step,t_ns,cell,x_cm,T_keV,E_GJ_per_cm3\n");
  for (std::size_t n = 0; n < record.times.size(); ++n)
    for (std::size_t i = 0; i < mesh.cells(); ++i) {
      const auto ie = static_cast<Eigen::Index>(i);
      std::fprintf(f.get(), "%zu,%.17g,%zu,%.17g,%.17g,%.17g\n", n, record.times[n], i, mesh.center(i),
                   record.temperature[n][ie], record.energy[n][ie]);
    }
  finish_csv(std::move(f), path);
}

FieldHistory read_fields_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  const std::string where = "'" + path.string() + "'";
  std::string line;
  if (!std::getline(in, line) || line.rfind("step,t_ns,cell,x_cm,T_keV,E_GJ_per_cm3", 0) != 0)
    throw FormatError(where + " is not a fields CSV (header mismatch)");
  std::map<std::size_t, std::pair<double, std::map<std::size_t, std::pair<double, double>>>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t step = 0;
    std::size_t cell = 0;
    double t = 0.0;
    double x = 0.0;
    double temp = 0.0;
    double e = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%zu,%lf,%lf,%lf", &step, &t, &cell, &x, &temp, &e) != 6)
      throw FormatError(where + " line " + std::to_string(line_no) + " is malformed");
    auto& entry = rows[step];
    entry.first = t;
    entry.second[cell] = {temp, e};
  }
  FieldHistory h;
  std::size_t cells = 0;
  for (const auto& [step, entry] : rows) {
    if (step != h.times.size()) throw FormatError(where + " skips step " + std::to_string(h.times.size()));
    if (h.times.empty()) cells = entry.second.size();
    if (entry.second.size() != cells || (cells > 0 && entry.second.rbegin()->first + 1 != cells))
      throw FormatError(where + " has an incomplete profile at step " + std::to_string(step));
    Eigen::VectorXd temp(static_cast<Eigen::Index>(cells));
    Eigen::VectorXd energy(static_cast<Eigen::Index>(cells));
    for (const auto& [i, v] : entry.second) {
      temp[static_cast<Eigen::Index>(i)] = v.first;
      energy[static_cast<Eigen::Index>(i)] = v.second;
    }
    h.times.push_back(entry.first);
    h.temperature.push_back(std::move(temp));
    h.energy.push_back(std::move(energy));
  }
  if (h.times.empty()) throw FormatError(where + " has no data rows");
  return h;
}

void write_history_csv(const std::filesystem::path& path, const RunRecord& record) {
  File f = open_csv(path);
  std::fprintf(f.get(),
               "step,t_ns,outer_iterations,inner_iterations,energy_balance,negative_intensities,"
               "closure_violations,rank,reduced_rcond,transition_residual\n");
  for (const auto& s : record.steps)
    std::fprintf(f.get(), "%zu,%.17g,%zu,%zu,%.17g,%zu,%zu,%zu,%.17g,%.17g\n", s.step, s.time, s.outer_iterations,
                 s.inner_iterations, s.energy_balance, s.negative_intensities, s.closure_violations, s.rank,
                 s.reduced_rcond, s.transition_residual);
  finish_csv(std::move(f), path);
}

void write_singular_values_csv(const std::filesystem::path& path, const Eigen::VectorXd& singular_values) {
  File f = open_csv(path);
  std::fprintf(f.get(), "index,sigma\n");
  for (Eigen::Index l = 0; l < singular_values.size(); ++l)
    std::fprintf(f.get(), "%td,%.17g\n", static_cast<std::ptrdiff_t>(l + 1), singular_values[l]);
  finish_csv(std::move(f), path);
}

void write_ranks_csv(const std::filesystem::path& path, const std::vector<double>& eps,
                     const std::vector<Eigen::VectorXd>& spectra) {
  File f = open_csv(path);
  std::fprintf(f.get(), "eps,stage,rank\n");
  for (double e : eps)
    for (std::size_t s = 0; s < spectra.size(); ++s)
      std::fprintf(f.get(), "%.17g,%zu,%zu\n", e, s + 1, select_rank(spectra[s], e));
  finish_csv(std::move(f), path);
}

void write_errors_csv(const std::filesystem::path& path, const ErrorReport& report) {
  File f = open_csv(path);
  std::fprintf(f.get(), "t_ns,err_T,err_E\n");
  for (std::size_t n = 0; n < report.times.size(); ++n)
    std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", report.times[n], report.temperature[n], report.energy[n]);
  finish_csv(std::move(f), path);
}

void write_error_summary_csv(const std::filesystem::path& path, const ErrorReport& report) {
  File f = open_csv(path);
  std::fprintf(f.get(), "metric,T,E\n");
  std::fprintf(f.get(), "max,%.17g,%.17g\n", report.max_temperature, report.max_energy);
  std::fprintf(f.get(), "time_integrated,%.17g,%.17g\n", report.integrated_temperature, report.integrated_energy);
  finish_csv(std::move(f), path);
}

}  // namespace trtrom
