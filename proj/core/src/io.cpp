#include "mildns/harness.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace mildns {

namespace {

constexpr char kMagic[8] = {'M', 'N', 'S', 'T', 'R', 'A', 'J', '1'};
constexpr std::uint32_t kEndianTag = 0x01020304u;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error(std::string("trajectory file truncated reading ") + what);
  return v;
}

struct Header {
  Domain dom;
  std::uint64_t node_count = 0;
  real grading = 0.0;
};

void write_header(std::ostream& os, const Domain& dom, std::uint64_t nodes, real grading) {
  os.write(kMagic, sizeof kMagic);
  put(os, std::uint32_t(dom.d));
  put(os, dom.box_length);
  put(os, std::uint32_t(dom.grid_points));
  put(os, nodes);
  put(os, grading);
  put(os, kEndianTag);
}

Header read_header(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("not a trajectory file (bad magic)");
  const auto d = get<std::uint32_t>(is, "dimension");
  const auto L = get<real>(is, "box length");
  const auto n = get<std::uint32_t>(is, "grid points");
  Header h;
  h.node_count = get<std::uint64_t>(is, "node count");
  h.grading = get<real>(is, "grading");
  if (get<std::uint32_t>(is, "endianness tag") != kEndianTag)
    throw std::runtime_error("trajectory file written with a different byte order");
  h.dom = Domain(int(d), L, int(n));  // revalidates the geometry
  return h;
}

void write_node(std::ostream& os, real t, const VectorField& f) {
  put(os, t);
  for (const auto& c : f.comp)
    os.write(reinterpret_cast<const char*>(c.data()), std::streamsize(c.size() * sizeof(cplx)));
}

VectorField read_node(std::istream& is, const Domain& dom, real& t) {
  t = get<real>(is, "node time");
  VectorField f(dom);
  for (auto& c : f.comp) {
    is.read(reinterpret_cast<char*>(c.data()), std::streamsize(c.size() * sizeof(cplx)));
    if (!is) throw std::runtime_error("trajectory file truncated reading coefficients");
  }
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_trajectory(const std::string& path, const Trajectory& u) {
  validate_trajectory(u);
  auto os = open_out(path);
  write_header(os, u.dom(), u.states.size(), u.grid.grading);
  for (std::size_t i = 0; i < u.states.size(); ++i) write_node(os, u.grid.nodes[i], u.states[i]);
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
}

Trajectory read_trajectory(const std::string& path) {
  auto is = open_in(path);
  const Header h = read_header(is);
  if (h.node_count < 2) throw std::runtime_error("trajectory file has fewer than two nodes");
  std::vector<real> times;
  Trajectory u;
  for (std::uint64_t i = 0; i < h.node_count; ++i) {
    real t = 0.0;
    u.states.push_back(read_node(is, h.dom, t));
    times.push_back(t);
  }
  u.grid = TimeGrid::from_nodes(std::move(times), h.grading);  // enforces 0 < t_0 < ... < t_M
  validate_trajectory(u);
  return u;
}

void write_field(const std::string& path, const VectorField& a) {
  if (a.comp.empty()) throw std::invalid_argument("write_field: empty field");
  auto os = open_out(path);
  write_header(os, a.dom, 1, 0.0);
  write_node(os, 0.0, a);
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
}

VectorField read_field(const std::string& path) {
  auto is = open_in(path);
  const Header h = read_header(is);
  if (h.node_count == 0) throw std::runtime_error("field file has no nodes");
  real t = 0.0;
  return read_node(is, h.dom, t);  // first node; later nodes are ignored
}

}  // namespace mildns
