#include "czlab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace czlab {

static_assert(std::endian::native == std::endian::little, "CZF1 I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("CZF1: truncated stream");
  return v;
}

}  // namespace

void write_czf(std::ostream& os, const RawField& f) {
  const Domain& d = f.grid.space();
  os.write("CZF1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.dim()));
  for (int a = 0; a < d.dim(); ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(d.points_per_axis()));
  for (int a = 0; a < d.dim(); ++a) put<double>(os, d.lo(a));
  for (int a = 0; a < d.dim(); ++a) put<double>(os, d.hi(a));
  put<std::uint8_t>(os, f.grid.has_time() ? 1 : 0);
  if (f.grid.has_time()) {
    put<double>(os, f.grid.time().t_lo);
    put<double>(os, f.grid.time().tau);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.time().nt));
  }
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.channels));
  os.write(reinterpret_cast<const char*>(f.data.data()), static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!os) throw std::runtime_error("CZF1: write failed");
}

RawField read_czf(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "CZF1", 4) != 0) throw std::runtime_error("CZF1: bad magic");
  const int n = static_cast<int>(get<std::uint32_t>(is));
  if (n < 1 || n > kMaxDim) throw std::runtime_error("CZF1: bad dimension");
  std::vector<Index> m(n);
  for (auto& v : m) v = get<std::uint32_t>(is);
  for (int a = 1; a < n; ++a)
    if (m[a] != m[0]) throw std::runtime_error("CZF1: unequal points per axis");
  Point lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < n; ++a) lo[a] = get<double>(is);
  for (int a = 0; a < n; ++a) hi[a] = get<double>(is);
  Domain dom(n, lo, hi, m[0]);
  const bool has_time = get<std::uint8_t>(is) != 0;
  Grid grid = dom;
  if (has_time) {
    const double t_lo = get<double>(is);
    const double tau = get<double>(is);
    const Index nt = get<std::uint32_t>(is);
    grid = SpaceTimeDomain(dom, t_lo, tau, nt);
  }
  RawField f{grid, static_cast<int>(get<std::uint32_t>(is)), {}};
  f.data.resize(static_cast<std::size_t>(grid.node_count() * f.channels));
  if (!is.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(f.data.size() * sizeof(double))))
    throw std::runtime_error("CZF1: truncated payload");
  return f;
}

RawField to_raw(const ScalarField& f) {
  return {f.grid(), 1, std::vector<double>(f.values().data(), f.values().data() + f.size())};
}

RawField to_raw(const SymTensorField& f) {
  RawField r{f.grid(), f.components(), {}};
  r.data.reserve(static_cast<std::size_t>(f.values().size()));
  for (Index i = 0; i < f.values().rows(); ++i)
    for (int c = 0; c < f.components(); ++c) r.data.push_back(f.values()(i, c));
  return r;
}

RawField to_raw(const MaximalField& f) {
  RawField r{f.grid, 2, std::vector<double>(static_cast<std::size_t>(2 * f.grid.node_count()), 0.0)};
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    const auto k = static_cast<Index>(i);
    if (!f.valid[k]) continue;
    r.data[static_cast<std::size_t>(2 * f.points[i])] = f.values[k];
    r.data[static_cast<std::size_t>(2 * f.points[i] + 1)] = f.radius_argmax[k];
  }
  return r;
}

ScalarField scalar_from_raw(const RawField& f, int channel) {
  if (channel < 0 || channel >= f.channels) throw std::invalid_argument("scalar_from_raw: channel out of range");
  Eigen::VectorXd v(f.grid.node_count());
  for (Index i = 0; i < v.size(); ++i) v[i] = f.at(i, channel);
  return ScalarField(f.grid, std::move(v));
}

void save_czf(const std::string& path, const RawField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_czf(os, f);
}

RawField load_czf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_czf(is);
}

void write_csv(std::ostream& os, const RawField& f) {
  const Domain& d = f.grid.space();
  for (int a = 0; a < d.dim(); ++a) os << (a ? "," : "") << 'x' << a + 1;
  if (f.grid.has_time()) os << ",t";
  for (int c = 0; c < f.channels; ++c) os << ",c" << c;
  os << '\n' << std::setprecision(17);
  for (Index i = 0; i < f.grid.node_count(); ++i) {
    const Point x = d.position(f.grid.spatial_of(i));
    for (int a = 0; a < d.dim(); ++a) os << (a ? "," : "") << x[a];
    if (f.grid.has_time()) os << ',' << f.grid.time_of(i);
    for (int c = 0; c < f.channels; ++c) os << ',' << f.at(i, c);
    os << '\n';
  }
  if (!os) throw std::runtime_error("CSV: write failed");
}

void save_csv(const std::string& path, const RawField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(os, f);
}

}  // namespace czlab
