#include "sdosm/mesh.hpp"

#include <cmath>
#include <ostream>

#include "sdosm/errors.hpp"

namespace sdosm::mesh {

namespace {

double polygon_area(const std::array<Point, 4>& p) {
  double a = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto& u = p[static_cast<std::size_t>(i)];
    const auto& w = p[static_cast<std::size_t>((i + 1) % 4)];
    a += u.x * w.y - w.x * u.y;
  }
  return 0.5 * a;
}

void check_geometry(const Rectangle& f, const Rectangle& p) {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
  if (!(f.x1 > f.x0 && f.y1 > f.y0 && p.x1 > p.x0 && p.y1 > p.y0))
    throw GeometryError("degenerate subdomain rectangle");
  if (!close(f.x0, p.x0) || !close(f.x1, p.x1) || !close(f.y0, p.y1))
    throw GeometryError("fluid rectangle must sit directly on top of the porous rectangle (shared horizontal edge)");
}

CoupledMesh build_tensor(const Rectangle& fluid, const Rectangle& porous, const std::vector<double>& xs,
                         const std::vector<double>& ys_p, const std::vector<double>& ys_f, bool periodic) {
  check_geometry(fluid, porous);
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny_p = static_cast<int>(ys_p.size()) - 1;
  const int ny_f = static_cast<int>(ys_f.size()) - 1;
  if (nx < 1 || ny_p < 1 || ny_f < 1) throw GeometryError("mesh needs at least one cell per direction");
  if (periodic && nx < 3) throw GeometryError("periodic meshes need at least three columns");

  std::vector<double> ys(ys_p);
  ys.insert(ys.end(), ys_f.begin() + 1, ys_f.end());
  const int nrows = static_cast<int>(ys.size());

  CoupledMesh m;
  m.fluid = fluid;
  m.porous = porous;
  auto id = [&](int i, int j) { return i + (nx + 1) * j; };
  m.nodes.reserve(static_cast<std::size_t>((nx + 1) * nrows));
  for (int j = 0; j < nrows; ++j)
    for (int i = 0; i <= nx; ++i) m.nodes.push_back({xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]});

  auto add_cell = [&](int i, int j, Region r) {
    m.cells.push_back(Cell{{id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}, r});
  };
  for (int j = ny_p; j < ny_p + ny_f; ++j)
    for (int i = 0; i < nx; ++i) add_cell(i, j, Region::Fluid);
  m.num_fluid_cells = static_cast<int>(m.cells.size());
  for (int j = 0; j < ny_p; ++j)
    for (int i = 0; i < nx; ++i) add_cell(i, j, Region::Porous);

  auto fluid_cell = [&](int i, int jf) { return i + nx * jf; };
  auto porous_cell = [&](int i, int jp) { return m.num_fluid_cells + i + nx * jp; };

  for (int i = 0; i < nx; ++i) m.interface_edges.push_back({fluid_cell(i, 0), porous_cell(i, ny_p - 1)});

  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back({fluid_cell(i, ny_f - 1), 2, BoundarySide::FluidTop});
    m.boundary_edges.push_back({porous_cell(i, 0), 0, BoundarySide::PorousBottom});
  }
  for (int j = 0; j < ny_f; ++j) {
    m.boundary_edges.push_back({fluid_cell(0, j), 3, BoundarySide::FluidLeft});
    m.boundary_edges.push_back({fluid_cell(nx - 1, j), 1, BoundarySide::FluidRight});
  }
  for (int j = 0; j < ny_p; ++j) {
    m.boundary_edges.push_back({porous_cell(0, j), 3, BoundarySide::PorousLeft});
    m.boundary_edges.push_back({porous_cell(nx - 1, j), 1, BoundarySide::PorousRight});
  }

  m.boundary_tags = {{BoundarySide::FluidTop, BoundaryTag::DirichletVel},
                     {BoundarySide::FluidLeft, BoundaryTag::DirichletVel},
                     {BoundarySide::FluidRight, BoundaryTag::DirichletVel},
                     {BoundarySide::PorousBottom, BoundaryTag::NeumannDarcy},
                     {BoundarySide::PorousLeft, BoundaryTag::DirichletDarcy},
                     {BoundarySide::PorousRight, BoundaryTag::DirichletDarcy}};
  if (periodic) {
    for (auto s : {BoundarySide::FluidLeft, BoundarySide::FluidRight, BoundarySide::PorousLeft,
                   BoundarySide::PorousRight})
      m.boundary_tags[s] = BoundaryTag::Periodic;
    for (int j = 0; j < nrows; ++j) m.periodic_pairs.emplace_back(id(0, j), id(nx, j));
  }
  m.h_avg = fluid.width() / nx;
  m.check_invariants();
  return m;
}

std::vector<double> uniform_coordinates(double a, double b, int n) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) c[static_cast<std::size_t>(i)] = a + (b - a) * i / n;
  c.back() = b;
  return c;
}

}  // namespace

void GradingSpec::validate() const {
  if (boundary_layers < 0) throw DomainError("boundary layer count must be nonnegative");
  if (!(ratio > 1.0 && ratio <= 4.0)) throw DomainError("grading ratio must lie in (1, 4]");
}

double CoupledMesh::interface_length() const {
  double len = 0.0;
  for (const auto& e : interface_edges) {
    const auto& c = cells[static_cast<std::size_t>(e.cell_f)];
    const auto& a = nodes[static_cast<std::size_t>(c.v[0])];
    const auto& b = nodes[static_cast<std::size_t>(c.v[1])];
    len += std::hypot(b.x - a.x, b.y - a.y);
  }
  return len;
}

double CoupledMesh::cell_area(int c) const {
  const auto& v = cells[static_cast<std::size_t>(c)].v;
  return polygon_area({nodes[static_cast<std::size_t>(v[0])], nodes[static_cast<std::size_t>(v[1])],
                       nodes[static_cast<std::size_t>(v[2])], nodes[static_cast<std::size_t>(v[3])]});
}

void CoupledMesh::set_tag(BoundarySide side, BoundaryTag t) {
  const bool lateral = side != BoundarySide::FluidTop && side != BoundarySide::PorousBottom;
  if ((t == BoundaryTag::Periodic) != (lateral && periodic()))
    throw GeometryError("periodic tags are fixed by the mesh construction");
  boundary_tags[side] = t;
}

void CoupledMesh::check_invariants() const {
  double area = 0.0;
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    const double a = cell_area(c);
    if (!(a > 0.0)) throw GeometryError("cell is not positively oriented");
    area += a;
  }
  const double expected = fluid.width() * fluid.height() + porous.width() * porous.height();
  if (std::abs(area - expected) > 1e-12 * expected) throw GeometryError("cell areas do not sum to the domain area");
  if (std::abs(interface_length() - fluid.width()) > 1e-12 * fluid.width())
    throw GeometryError("interface edges do not cover the interface");
  for (const auto& [l, r] : periodic_pairs) {
    if (l == r) throw GeometryError("periodic pair references the same node");
    if (std::abs(nodes[static_cast<std::size_t>(l)].y - nodes[static_cast<std::size_t>(r)].y) > 1e-12)
      throw GeometryError("periodic partners differ in y");
  }
}

std::vector<double> graded_coordinates(double a, double b, int n, int layers, double ratio) {
  if (n < 1) throw DomainError("need at least one cell");
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int dist = std::min(i, n - 1 - i);
    w[static_cast<std::size_t>(i)] = std::pow(ratio, -static_cast<double>(std::max(0, layers - dist)));
    total += w[static_cast<std::size_t>(i)];
  }
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  c[0] = a;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += w[static_cast<std::size_t>(i)];
    c[static_cast<std::size_t>(i) + 1] = a + (b - a) * acc / total;
  }
  c.back() = b;
  return c;
}

CoupledMesh build_uniform(const Rectangle& fluid, const Rectangle& porous, int nx, int ny_f, int ny_p,
                          bool periodic) {
  if (nx < 1 || ny_f < 1 || ny_p < 1) throw GeometryError("nx, ny_f, ny_p must be positive");
  return build_tensor(fluid, porous, uniform_coordinates(fluid.x0, fluid.x1, nx),
                      uniform_coordinates(porous.y0, porous.y1, ny_p), uniform_coordinates(fluid.y0, fluid.y1, ny_f),
                      periodic);
}

CoupledMesh build_graded(const Rectangle& fluid, const Rectangle& porous, int base_n, const GradingSpec& spec) {
  spec.validate();
  if (base_n < 2) throw GeometryError("base_n must be at least 2");
  check_geometry(fluid, porous);
  const double w = fluid.width();
  const int ny_f = std::max(1, static_cast<int>(std::lround(base_n * fluid.height() / w)));
  const int ny_p = std::max(1, static_cast<int>(std::lround(base_n * porous.height() / w)));
  const int L = spec.boundary_layers;
  return build_tensor(fluid, porous, graded_coordinates(fluid.x0, fluid.x1, base_n, L, spec.ratio),
                      graded_coordinates(porous.y0, porous.y1, ny_p, L, spec.ratio),
                      graded_coordinates(fluid.y0, fluid.y1, ny_f, L, spec.ratio), false);
}

void write_mesh(std::ostream& os, const CoupledMesh& m) {
  os.precision(12);
  os << "# nodes " << m.nodes.size() << '\n';
  for (const auto& p : m.nodes) os << p.x << ' ' << p.y << '\n';
  os << "# cells " << m.cells.size() << '\n';
  for (const auto& c : m.cells)
    os << c.v[0] << ' ' << c.v[1] << ' ' << c.v[2] << ' ' << c.v[3] << ' ' << static_cast<int>(c.region) << '\n';
}

}  // namespace sdosm::mesh
