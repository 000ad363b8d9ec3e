#include "fluxnet/fvm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include "fluxnet/core/errors.hpp"

namespace fluxnet::fvm {

namespace {

double signed_area(const std::vector<Point>& nodes, const std::vector<std::size_t>& el) {
  double a = 0.0;
  for (std::size_t i = 0; i < el.size(); ++i) {
    const Point& p = nodes[el[i]];
    const Point& q = nodes[el[(i + 1) % el.size()]];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

Point polygon_centroid(const std::vector<Point>& nodes, const std::vector<std::size_t>& el, double area) {
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < el.size(); ++i) {
    const Point& p = nodes[el[i]];
    const Point& q = nodes[el[(i + 1) % el.size()]];
    const double cross = p[0] * q[1] - q[0] * p[1];
    cx += (p[0] + q[0]) * cross;
    cy += (p[1] + q[1]) * cross;
  }
  return {cx / (6.0 * area), cy / (6.0 * area)};
}

}  // namespace

double Mesh::total_measure() const {
  double s = 0.0;
  for (const Cell& c : cells) s += c.measure;
  return s;
}

double Mesh::max_closure_defect() const {
  std::vector<std::array<double, 2>> sum(cells.size(), {0.0, 0.0});
  for (const Face& f : faces) {
    for (std::size_t d = 0; d < dim; ++d) {
      sum[f.owner][d] += f.measure * f.normal[d];
      if (!f.is_boundary()) sum[static_cast<std::size_t>(f.neighbor)][d] -= f.measure * f.normal[d];
    }
  }
  double worst = 0.0;
  for (const auto& s : sum) worst = std::max(worst, std::hypot(s[0], s[1]));
  return worst;
}

void Mesh::validate() const {
  if (dim != 1 && dim != 2) throw InvalidStateError("mesh dimension must be 1 or 2");
  if (cells.empty()) throw InvalidStateError("mesh has no cells");
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!(cells[i].measure > 0.0)) throw InvalidStateError("cell " + std::to_string(i) + " has non-positive measure");
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const Face& f = faces[i];
    if (f.owner >= cells.size()) throw InvalidStateError("face " + std::to_string(i) + " owner out of range");
    if (!f.is_boundary() && (f.neighbor < 0 || static_cast<std::size_t>(f.neighbor) >= cells.size() ||
                             static_cast<std::size_t>(f.neighbor) == f.owner))
      throw InvalidStateError("face " + std::to_string(i) + " needs two distinct cells");
    if (!(f.measure > 0.0)) throw InvalidStateError("face " + std::to_string(i) + " has non-positive measure");
    if (f.normal.dim() != dim) throw InvalidStateError("face " + std::to_string(i) + " normal has wrong dimension");
  }
  if (max_closure_defect() > 1e-10) throw InvalidStateError("mesh cells are not closed");
}

std::vector<std::string> Mesh::boundary_tags() const {
  std::set<std::string> tags;
  for (const Face& f : faces)
    if (f.is_boundary()) tags.insert(f.tag);
  return {tags.begin(), tags.end()};
}

Mesh make_uniform_grid_1d(double x_lo, double x_hi, std::size_t n_cells) {
  if (n_cells < 2) throw ConfigError("a 1D grid needs at least 2 cells");
  if (!(x_hi > x_lo)) throw ConfigError("1D grid needs x_lo < x_hi");
  Mesh m;
  m.dim = 1;
  const double dx = (x_hi - x_lo) / static_cast<double>(n_cells);
  auto x_at = [&](std::size_t i) { return i == n_cells ? x_hi : x_lo + dx * static_cast<double>(i); };
  for (std::size_t i = 0; i < n_cells; ++i) m.cells.push_back({{0.5 * (x_at(i) + x_at(i + 1)), 0.0}, dx});
  m.faces.push_back({1.0, UnitNormal{-1.0}, {x_lo, 0.0}, 0, kNoNeighbor, "left"});
  for (std::size_t i = 1; i < n_cells; ++i)
    m.faces.push_back({1.0, UnitNormal{1.0}, {x_at(i), 0.0}, i - 1, static_cast<std::int64_t>(i), ""});
  m.faces.push_back({1.0, UnitNormal{1.0}, {x_hi, 0.0}, n_cells - 1, kNoNeighbor, "right"});
  return m;
}

Mesh build_mesh_2d(std::vector<Point> nodes, std::vector<std::vector<std::size_t>> elements,
                   const BoundaryTagger& tagger) {
  Mesh m;
  m.dim = 2;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_face;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    auto& el = elements[e];
    if (el.size() < 3) throw FormatError("element " + std::to_string(e) + " has fewer than 3 nodes");
    for (std::size_t v : el)
      if (v >= nodes.size()) throw FormatError("element " + std::to_string(e) + " references a missing node");
    double area = signed_area(nodes, el);
    if (area < 0.0) {
      std::reverse(el.begin(), el.end());
      area = -area;
    }
    if (!(area > 0.0)) throw InvalidStateError("element " + std::to_string(e) + " is degenerate");
    m.cells.push_back({polygon_centroid(nodes, el, area), area});
    for (std::size_t i = 0; i < el.size(); ++i) {
      const std::size_t a = el[i], b = el[(i + 1) % el.size()];
      const auto key = std::minmax(a, b);
      const auto it = edge_face.find(key);
      if (it == edge_face.end()) {
        const double dx = nodes[b][0] - nodes[a][0], dy = nodes[b][1] - nodes[a][1];
        const double len = std::hypot(dx, dy);
        Face f;
        f.measure = len;
        f.normal = UnitNormal::normalized(std::array<double, 2>{dy, -dx});
        f.centroid = {0.5 * (nodes[a][0] + nodes[b][0]), 0.5 * (nodes[a][1] + nodes[b][1])};
        f.owner = e;
        edge_face.emplace(key, m.faces.size());
        m.faces.push_back(f);
      } else {
        Face& f = m.faces[it->second];
        if (!f.is_boundary()) throw InvalidStateError("edge shared by more than two elements");
        f.neighbor = static_cast<std::int64_t>(e);
      }
    }
  }
  for (const auto& [key, idx] : edge_face) {
    Face& f = m.faces[idx];
    if (f.is_boundary()) f.tag = tagger ? tagger(nodes[key.first], nodes[key.second]) : "boundary";
  }
  m.nodes = std::move(nodes);
  m.elements = std::move(elements);
  m.validate();
  return m;
}

Mesh make_quad_mesh_rect(double x_lo, double x_hi, double y_lo, double y_hi, std::size_t nx, std::size_t ny) {
  if (nx < 1 || ny < 1) throw ConfigError("quad mesh needs nx, ny >= 1");
  if (!(x_hi > x_lo && y_hi > y_lo)) throw ConfigError("quad mesh needs lo < hi");
  std::vector<Point> nodes;
  auto coord = [](double lo, double hi, std::size_t i, std::size_t n) {
    return i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  };
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i) nodes.push_back({coord(x_lo, x_hi, i, nx), coord(y_lo, y_hi, j, ny)});
  std::vector<std::vector<std::size_t>> elements;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t a = j * (nx + 1) + i;
      elements.push_back({a, a + 1, a + nx + 2, a + nx + 1});
    }
  auto tagger = [=](const Point& p, const Point& q) -> std::string {
    if (p[0] == x_lo && q[0] == x_lo) return "left";
    if (p[0] == x_hi && q[0] == x_hi) return "right";
    if (p[1] == y_lo && q[1] == y_lo) return "bottom";
    if (p[1] == y_hi && q[1] == y_hi) return "top";
    return "boundary";
  };
  return build_mesh_2d(std::move(nodes), std::move(elements), tagger);
}

Mesh make_pentagon_tri_mesh(double circumradius, std::size_t n_rings) {
  if (n_rings < 1) throw ConfigError("pentagon mesh needs n_rings >= 1");
  if (!(circumradius > 0.0)) throw ConfigError("pentagon circumradius must be positive");
  std::array<Point, 5> corner;
  for (std::size_t j = 0; j < 5; ++j) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / 5.0;
    corner[j] = {circumradius * std::sin(t), circumradius * std::cos(t)};
  }
  std::vector<Point> nodes{{0.0, 0.0}};
  // level k holds 5k nodes starting at 1 + 5k(k-1)/2
  auto start = [](std::size_t k) { return 1 + 5 * k * (k - 1) / 2; };
  for (std::size_t k = 1; k <= n_rings; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n_rings);
    for (std::size_t j = 0; j < 5; ++j) {
      const Point& a = corner[j];
      const Point& b = corner[(j + 1) % 5];
      for (std::size_t i = 0; i < k; ++i) {
        const double w = static_cast<double>(i) / static_cast<double>(k);
        nodes.push_back({s * (a[0] + w * (b[0] - a[0])), s * (a[1] + w * (b[1] - a[1]))});
      }
    }
  }
  auto node = [&](std::size_t k, std::size_t idx) -> std::size_t {
    if (k == 0) return 0;
    return start(k) + idx % (5 * k);
  };
  std::vector<std::vector<std::size_t>> elements;
  for (std::size_t k = 1; k <= n_rings; ++k) {
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t i = 0; i < k; ++i) {
        elements.push_back({node(k, j * k + i), node(k, j * k + i + 1), node(k - 1, j * (k - 1) + i)});
        if (i + 1 < k)
          elements.push_back({node(k - 1, j * (k - 1) + i), node(k, j * k + i + 1), node(k - 1, j * (k - 1) + i + 1)});
      }
    }
  }
  return build_mesh_2d(std::move(nodes), std::move(elements), nullptr);
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  if (mesh.dim != 2 || mesh.nodes.empty()) throw ConfigError("only 2D meshes with node data can be written");
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out.precision(17);
  out << "fluxnet-mesh 1\nnodes " << mesh.nodes.size() << '\n';
  for (const Point& p : mesh.nodes) out << p[0] << ' ' << p[1] << '\n';
  out << "elements " << mesh.elements.size() << '\n';
  for (const auto& el : mesh.elements) {
    out << el.size();
    for (std::size_t v : el) out << ' ' << v;
    out << '\n';
  }
  // boundary edges in element order
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> edges;
  std::map<std::pair<std::size_t, std::size_t>, int> count;
  for (const auto& el : mesh.elements)
    for (std::size_t i = 0; i < el.size(); ++i) ++count[std::minmax(el[i], el[(i + 1) % el.size()])];
  std::map<std::pair<double, double>, std::string> tag_at;
  for (const Face& f : mesh.faces)
    if (f.is_boundary()) tag_at[{f.centroid[0], f.centroid[1]}] = f.tag;
  for (const auto& [key, c] : count) {
    if (c != 1) continue;
    const Point& a = mesh.nodes[key.first];
    const Point& b = mesh.nodes[key.second];
    const auto it = tag_at.find({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
    edges.emplace_back(key.first, key.second, it == tag_at.end() ? "boundary" : it->second);
  }
  out << "boundary " << edges.size() << '\n';
  for (const auto& [a, b, tag] : edges) out << a << ' ' << b << ' ' << tag << '\n';
  if (!out) throw FormatError("write failed for " + path.string());
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::size_t lineno = 0;
  std::string line;
  auto next = [&](const char* what) {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos && line[0] != '#') return;
    }
    throw FormatError(path.string() + ": unexpected end of file, expected " + what);
  };
  auto fail = [&](const std::string& msg) { return FormatError(path.string() + ":" + std::to_string(lineno) + ": " + msg); };
  auto section = [&](const char* name) {
    next(name);
    std::istringstream ss(line);
    std::string key;
    long long n = -1;
    if (!(ss >> key >> n) || key != name || n < 0) throw fail(std::string("expected '") + name + " <count>'");
    return static_cast<std::size_t>(n);
  };

  next("header");
  if (line.rfind("fluxnet-mesh 1", 0) != 0) throw fail("not a fluxnet-mesh 1 file");
  std::vector<Point> nodes(section("nodes"));
  for (Point& p : nodes) {
    next("node");
    std::istringstream ss(line);
    if (!(ss >> p[0] >> p[1])) throw fail("bad node line");
  }
  std::vector<std::vector<std::size_t>> elements(section("elements"));
  for (auto& el : elements) {
    next("element");
    std::istringstream ss(line);
    std::size_t k = 0;
    if (!(ss >> k) || k < 3) throw fail("bad element line");
    el.resize(k);
    for (std::size_t& v : el)
      if (!(ss >> v) || v >= nodes.size()) throw fail("bad element node index");
  }
  std::map<std::pair<std::size_t, std::size_t>, std::string> tags;
  const std::size_t nb = section("boundary");
  for (std::size_t i = 0; i < nb; ++i) {
    next("boundary edge");
    std::istringstream ss(line);
    std::size_t a = 0, b = 0;
    std::string tag;
    if (!(ss >> a >> b >> tag) || a >= nodes.size() || b >= nodes.size()) throw fail("bad boundary line");
    tags[std::minmax(a, b)] = tag;
  }
  // tag lookup by end points
  std::map<std::pair<double, double>, std::string> by_mid;
  for (const auto& [key, tag] : tags) {
    const Point& a = nodes[key.first];
    const Point& b = nodes[key.second];
    by_mid[{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}] = tag;
  }
  auto tagger = [&](const Point& a, const Point& b) -> std::string {
    const auto it = by_mid.find({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
    return it == by_mid.end() ? "boundary" : it->second;
  };
  try {
    return build_mesh_2d(std::move(nodes), std::move(elements), tagger);
  } catch (const InvalidStateError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace fluxnet::fvm
