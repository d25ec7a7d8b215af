#pragma once

#include "heisencorr/correlation.hpp"

#include <filesystem>
#include <string>

namespace heisencorr {

/// Text export: `<stem>.re.csv` and `<stem>.im.csv` (row i is t2 = t_i,
/// column j is t1 = t_j, 17 significant digits) plus `<stem>.meta.json`
/// holding kind, source, time grid and the matrix meta object.
void write_matrix(const std::filesystem::path& stem, const CorrelationMatrix& c);

/// Reads a matrix written by write_matrix. Throws MissingArtifact when any of
/// the three files is absent.
CorrelationMatrix read_matrix(const std::filesystem::path& stem);

/// Whether all three files of a stem exist.
bool matrix_exists(const std::filesystem::path& stem);

/// The files making up a stem, in write order.
std::vector<std::filesystem::path> matrix_files(const std::filesystem::path& stem);

/// Writes a plain complex matrix (no correlation semantics) with the same layout.
void write_complex_csv(const std::filesystem::path& stem, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_complex_csv(const std::filesystem::path& stem);

/// Binary export: "CGRD", u32 version, u32 n_t, f64 times[n_t], then (re, im)
/// f64 pairs in row-major order, little-endian.
void write_matrix_binary(const std::filesystem::path& path, const CorrelationMatrix& c);
CorrelationMatrix read_matrix_binary(const std::filesystem::path& path);

/// Scientific notation with 17 significant digits, as written to the CSV files.
std::string format_value(double v);

}  // namespace heisencorr
