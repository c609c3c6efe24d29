#include "rieszlab/field_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rieszlab/errors.hpp"

namespace rieszlab {

namespace {

constexpr const char* kMagic = "RIESZLAB-FIELD";
constexpr const char* kVersion = "v1";

void write_header(std::ostream& out, const char* kind, const Grid<double>& g) {
  out << kMagic << ' ' << kVersion << ' ' << kind << ' ' << g.dim() << ' ' << g.points_per_axis() << ' '
      << format_double(g.extent()) << '\n';
}

void write_samples(std::ostream& out, const ComplexArray<double>& s) {
  for (Eigen::Index i = 0; i < s.size(); ++i)
    out << format_double(s[i].real()) << ' ' << format_double(s[i].imag()) << '\n';
}

double parse_double(const std::string& token) {
  double v = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("field file: cannot parse number '" + token + "'");
  return v;
}

struct Header {
  std::string kind;
  Grid<double> grid;
};

Header read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("field file: missing header");
  std::istringstream hs(line);
  std::string magic, version, kind, extent;
  int dim = 0, n = 0;
  if (!(hs >> magic >> version >> kind >> dim >> n >> extent) || magic != kMagic)
    throw ConfigError("field file: malformed header '" + line + "'");
  if (version != kVersion) throw ConfigError("field file: unsupported version " + version);
  if (kind != "scalar" && kind != "vector") throw ConfigError("field file: unknown kind " + kind);
  return {kind, Grid<double>(dim, n, parse_double(extent))};
}

ComplexArray<double> read_samples(std::istream& in, std::size_t count) {
  ComplexArray<double> s(count);
  std::string re, im;
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> re >> im)) throw ConfigError("field file: truncated sample list");
    s[static_cast<Eigen::Index>(i)] = {parse_double(re), parse_double(im)};
  }
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_field(std::ostream& out, const ScalarField<double>& f) {
  write_header(out, "scalar", f.grid());
  write_samples(out, f.samples());
}

void write_field(std::ostream& out, const VectorField<double>& f) {
  if (f.size() != f.grid().dim())
    throw ConfigError("vector field files hold one component per dimension");
  write_header(out, "vector", f.grid());
  for (int k = 0; k < f.size(); ++k) write_samples(out, f[k].samples());
}

void write_field(const std::string& path, const ScalarField<double>& f) {
  auto out = open_out(path);
  write_field(out, f);
}

void write_field(const std::string& path, const VectorField<double>& f) {
  auto out = open_out(path);
  write_field(out, f);
}

ScalarField<double> read_scalar_field(std::istream& in) {
  Header h = read_header(in);
  if (h.kind != "scalar") throw ConfigError("field file: expected a scalar field");
  return ScalarField<double>(h.grid, read_samples(in, h.grid.point_count()));
}

VectorField<double> read_vector_field(std::istream& in) {
  Header h = read_header(in);
  if (h.kind != "vector") throw ConfigError("field file: expected a vector field");
  std::vector<ScalarField<double>> components;
  for (int k = 0; k < h.grid.dim(); ++k)
    components.emplace_back(h.grid, read_samples(in, h.grid.point_count()));
  return VectorField<double>(std::move(components));
}

ScalarField<double> read_scalar_field(const std::string& path) {
  auto in = open_in(path);
  return read_scalar_field(in);
}

VectorField<double> read_vector_field(const std::string& path) {
  auto in = open_in(path);
  return read_vector_field(in);
}

}  // namespace rieszlab
