#include "heisencorr/wave_state.hpp"

#include "heisencorr/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace heisencorr {

namespace {

void require_same_grid(const WaveState& a, const WaveState& b) {
  if (!(a.grid == b.grid) || a.coeffs.rows() != b.coeffs.rows() || a.coeffs.cols() != b.coeffs.cols())
    throw std::invalid_argument("wave states live on different grids");
}

void require_coupling(const WaveState& s) {
  if (s.grid.l_max < 1) throw std::invalid_argument("dipole operators need l_max >= 1");
}

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated wave state file");
  return v;
}

}  // namespace

cdouble inner(const WaveState& a, const WaveState& b) {
  require_same_grid(a, b);
  cdouble sum = 0.0;
  for (Eigen::Index l = 0; l < a.coeffs.cols(); ++l) sum += a.coeffs.col(l).dot(b.coeffs.col(l));
  return sum * a.grid.dr;
}

double norm_squared(const WaveState& s) { return s.coeffs.squaredNorm() * s.grid.dr; }

WaveState apply_z(const WaveState& s, TruncationLoss* loss) {
  require_coupling(s);
  WaveState out(s.grid, s.time);
  const Eigen::VectorXd r = s.grid.radii();
  const int lmax = s.grid.l_max;
  for (int l = 0; l < lmax; ++l) {
    const double c = dipole_coupling(l);
    out.coeffs.col(l + 1).array() += c * r.array() * s.coeffs.col(l).array();
    out.coeffs.col(l).array() += c * r.array() * s.coeffs.col(l + 1).array();
  }
  if (loss) {
    loss->norm_squared =
        (dipole_coupling(lmax) * r.array() * s.coeffs.col(lmax).array()).abs2().sum() * s.grid.dr;
  }
  return out;
}

WaveState apply_pz(const WaveState& s, TruncationLoss* loss) {
  return apply_pz(s, radial_derivative(s.grid), loss);
}

WaveState apply_pz(const WaveState& s, const BandMatrix<double>& derivative, TruncationLoss* loss) {
  require_coupling(s);
  WaveState out(s.grid, s.time);
  const Eigen::ArrayXd inv_r = s.grid.radii().array().inverse();
  const int lmax = s.grid.l_max;
  const Eigen::Index n = s.points();
  Eigen::VectorXcd du(n);
  const cdouble minus_i(0.0, -1.0);
  for (int l = 0; l <= lmax; ++l) {
    const auto u = s.coeffs.col(l);
    band_multiply(derivative, u, du);
    // up: -i c_l (u' - (l+1) u/r) into l+1; down: -i c_{l-1} (u' + l u/r) into l-1
    if (l < lmax) {
      out.coeffs.col(l + 1).array() +=
          minus_i * dipole_coupling(l) * (du.array() - (l + 1.0) * inv_r * u.array());
    } else if (loss) {
      loss->norm_squared =
          (dipole_coupling(l) * (du.array() - (l + 1.0) * inv_r * u.array())).abs2().sum() * s.grid.dr;
    }
    if (l > 0) {
      out.coeffs.col(l - 1).array() +=
          minus_i * dipole_coupling(l - 1) * (du.array() + static_cast<double>(l) * inv_r * u.array());
    }
  }
  return out;
}

void write_wave_state(const std::filesystem::path& path, const WaveState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write("WAVS", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.channels()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.n_r));
  put<double>(out, s.grid.dr);
  for (int l = 0; l < s.channels(); ++l) {
    for (Eigen::Index i = 0; i < s.points(); ++i) {
      put<double>(out, s.coeffs(i, l).real());
      put<double>(out, s.coeffs(i, l).imag());
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

WaveState read_wave_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact(path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WAVS", 4) != 0) throw std::runtime_error(path.string() + ": not a WAVS file");
  const auto version = get<std::uint32_t>(in);
  if (version != 1) throw std::runtime_error(path.string() + ": unsupported WAVS version");
  RadialGrid grid;
  grid.l_max = static_cast<int>(get<std::uint32_t>(in)) - 1;
  grid.n_r = static_cast<int>(get<std::uint32_t>(in));
  grid.dr = get<double>(in);
  WaveState s(grid);
  for (int l = 0; l < s.channels(); ++l) {
    for (Eigen::Index i = 0; i < s.points(); ++i) {
      const double re = get<double>(in);
      const double im = get<double>(in);
      s.coeffs(i, l) = {re, im};
    }
  }
  return s;
}

}  // namespace heisencorr
