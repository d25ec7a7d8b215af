#include "heisencorr/matrix_io.hpp"

#include "heisencorr/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace heisencorr {

namespace fs = std::filesystem;

namespace {

fs::path with_suffix(const fs::path& stem, const char* suffix) { return fs::path(stem.string() + suffix); }

void write_part(const fs::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) line += ',';
      line += format_value(m(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Eigen::MatrixXd read_part(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact(path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw std::runtime_error(path.string() + ": malformed number '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const fs::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error(path.string() + ": truncated CGRD file");
  return v;
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::vector<fs::path> matrix_files(const fs::path& stem) {
  return {with_suffix(stem, ".re.csv"), with_suffix(stem, ".im.csv"), with_suffix(stem, ".meta.json")};
}

bool matrix_exists(const fs::path& stem) {
  for (const auto& p : matrix_files(stem))
    if (!fs::exists(p)) return false;
  return true;
}

void write_complex_csv(const fs::path& stem, const Eigen::MatrixXcd& m) {
  write_part(with_suffix(stem, ".re.csv"), m.real());
  write_part(with_suffix(stem, ".im.csv"), m.imag());
}

Eigen::MatrixXcd read_complex_csv(const fs::path& stem) {
  const Eigen::MatrixXd re = read_part(with_suffix(stem, ".re.csv"));
  const Eigen::MatrixXd im = read_part(with_suffix(stem, ".im.csv"));
  if (re.rows() != im.rows() || re.cols() != im.cols())
    throw std::runtime_error(stem.string() + ": real and imaginary parts differ in shape");
  Eigen::MatrixXcd m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

void write_matrix(const fs::path& stem, const CorrelationMatrix& c) {
  write_complex_csv(stem, c.values);
  nlohmann::json meta = c.meta;
  meta["kind"] = to_string(c.kind);
  meta["source"] = to_string(c.source);
  meta["n_t"] = c.grid.n_t;
  meta["t_end"] = c.grid.t_end;
  meta["layout"] = "row i is t2 = t_i, column j is t1 = t_j";
  std::ofstream out(with_suffix(stem, ".meta.json"));
  if (!out) throw std::runtime_error("cannot write " + stem.string() + ".meta.json");
  out << meta.dump(2) << "\n";
}

CorrelationMatrix read_matrix(const fs::path& stem) {
  const fs::path meta_path = with_suffix(stem, ".meta.json");
  std::ifstream in(meta_path);
  if (!in) throw MissingArtifact(meta_path.string());
  CorrelationMatrix c;
  c.meta = nlohmann::json::parse(in);
  c.kind = parse_kind(c.meta.at("kind").get<std::string>());
  c.source = parse_source(c.meta.at("source").get<std::string>());
  c.grid.n_t = c.meta.at("n_t").get<int>();
  c.grid.t_end = c.meta.at("t_end").get<double>();
  for (const char* k : {"kind", "source", "n_t", "t_end", "layout"}) c.meta.erase(k);
  c.values = read_complex_csv(stem);
  if (c.values.rows() != c.grid.n_t || c.values.cols() != c.grid.n_t)
    throw std::runtime_error(stem.string() + ": matrix shape does not match n_t in the meta file");
  return c;
}

void write_matrix_binary(const fs::path& path, const CorrelationMatrix& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write("CGRD", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.grid.n_t));
  for (int k = 0; k < c.grid.n_t; ++k) put<double>(out, c.grid.t(k));
  for (Eigen::Index i = 0; i < c.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.values.cols(); ++j) {
      put<double>(out, c.values(i, j).real());
      put<double>(out, c.values(i, j).imag());
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

CorrelationMatrix read_matrix_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact(path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CGRD", 4) != 0) throw std::runtime_error(path.string() + ": not a CGRD file");
  if (get<std::uint32_t>(in, path) != 1) throw std::runtime_error(path.string() + ": unsupported CGRD version");
  const auto n = static_cast<int>(get<std::uint32_t>(in, path));
  std::vector<double> times(n);
  for (auto& t : times) t = get<double>(in, path);
  CorrelationMatrix c;
  c.grid = {n, n > 0 ? times.back() : 0.0};
  c.values.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double re = get<double>(in, path);
      const double im = get<double>(in, path);
      c.values(i, j) = {re, im};
    }
  }
  return c;
}

}  // namespace heisencorr
