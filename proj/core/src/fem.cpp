#include "sdosm/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#ifdef SDOSM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "sdosm/errors.hpp"

namespace sdosm::fem {

using mesh::BoundaryTag;
using mesh::Point;
using mesh::Region;
using Triplets = std::vector<Eigen::Triplet<double>>;

namespace {

constexpr std::array<std::array<int, 3>, 4> kEdgeNodes{{{0, 1, 2}, {2, 5, 8}, {6, 7, 8}, {0, 3, 6}}};

std::uint8_t tag_bit(BoundaryTag t) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t)); }

std::size_t at(int i) { return static_cast<std::size_t>(i); }

// 1D quadratic Lagrange basis at 0, 1/2, 1 and its derivative.
std::array<double, 3> lag2(double t) { return {2 * t * t - 3 * t + 1, 4 * t - 4 * t * t, 2 * t * t - t}; }
std::array<double, 3> dlag2(double t) { return {4 * t - 3, 4 - 8 * t, 4 * t - 1}; }

// Shape data of one cell at one reference point.
struct Shape {
  Point x;
  double det;
  std::array<double, 9> phi, phix, phiy;  // biquadratic
  std::array<double, 4> psi, psix, psiy;  // bilinear
};

Shape shape_at(const std::array<Point, 4>& g, double xi, double eta) {
  Shape s{};
  const double n00 = (1 - xi) * (1 - eta), n10 = xi * (1 - eta), n11 = xi * eta, n01 = (1 - xi) * eta;
  s.x = {n00 * g[0].x + n10 * g[1].x + n11 * g[2].x + n01 * g[3].x,
         n00 * g[0].y + n10 * g[1].y + n11 * g[2].y + n01 * g[3].y};
  const double x_xi = (1 - eta) * (g[1].x - g[0].x) + eta * (g[2].x - g[3].x);
  const double y_xi = (1 - eta) * (g[1].y - g[0].y) + eta * (g[2].y - g[3].y);
  const double x_eta = (1 - xi) * (g[3].x - g[0].x) + xi * (g[2].x - g[1].x);
  const double y_eta = (1 - xi) * (g[3].y - g[0].y) + xi * (g[2].y - g[1].y);
  s.det = x_xi * y_eta - x_eta * y_xi;
  if (!(s.det > 0.0)) throw GeometryError("degenerate or inverted cell");
  auto phys = [&](double d_xi, double d_eta, double& dx, double& dy) {
    dx = (y_eta * d_xi - y_xi * d_eta) / s.det;
    dy = (-x_eta * d_xi + x_xi * d_eta) / s.det;
  };
  const auto lx = lag2(xi), ly = lag2(eta), dlx = dlag2(xi), dly = dlag2(eta);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      const auto a = at(i + 3 * j);
      s.phi[a] = lx[at(i)] * ly[at(j)];
      phys(dlx[at(i)] * ly[at(j)], lx[at(i)] * dly[at(j)], s.phix[a], s.phiy[a]);
    }
  const std::array<double, 2> bx{1 - xi, xi}, by{1 - eta, eta}, dbx{-1, 1}, dby{-1, 1};
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      const auto a = at(i + 2 * j);
      s.psi[a] = bx[at(i)] * by[at(j)];
      phys(dbx[at(i)] * by[at(j)], bx[at(i)] * dby[at(j)], s.psix[a], s.psiy[a]);
    }
  return s;
}

// Values only (no derivatives), for loads and error norms.
struct ShapeValues {
  Point x;
  double det;
  std::array<double, 9> phi;
  std::array<double, 4> psi;
};

ShapeValues shape_values(const std::array<Point, 4>& g, double xi, double eta) {
  ShapeValues s{};
  const double n00 = (1 - xi) * (1 - eta), n10 = xi * (1 - eta), n11 = xi * eta, n01 = (1 - xi) * eta;
  s.x = {n00 * g[0].x + n10 * g[1].x + n11 * g[2].x + n01 * g[3].x,
         n00 * g[0].y + n10 * g[1].y + n11 * g[2].y + n01 * g[3].y};
  const double x_xi = (1 - eta) * (g[1].x - g[0].x) + eta * (g[2].x - g[3].x);
  const double y_xi = (1 - eta) * (g[1].y - g[0].y) + eta * (g[2].y - g[3].y);
  const double x_eta = (1 - xi) * (g[3].x - g[0].x) + xi * (g[2].x - g[1].x);
  const double y_eta = (1 - xi) * (g[3].y - g[0].y) + xi * (g[2].y - g[1].y);
  s.det = x_xi * y_eta - x_eta * y_xi;
  const auto lx = lag2(xi), ly = lag2(eta);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) s.phi[at(i + 3 * j)] = lx[at(i)] * ly[at(j)];
  s.psi = {(1 - xi) * (1 - eta), xi * (1 - eta), (1 - xi) * eta, xi * eta};
  return s;
}

template <class F>
void for_each_qp_values(const std::array<Point, 4>& g, int n, F&& f) {
  const auto q = gauss_legendre(n);
  for (std::size_t j = 0; j < q.points.size(); ++j)
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const ShapeValues s = shape_values(g, q.points[i], q.points[j]);
      f(s, q.weights[i] * q.weights[j] * s.det);
    }
}

template <class F>
void for_each_qp(const std::array<Point, 4>& g, int n, F&& f) {
  const auto q = gauss_legendre(n);
  for (std::size_t j = 0; j < q.points.size(); ++j)
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const Shape s = shape_at(g, q.points[i], q.points[j]);
      f(s, q.weights[i] * q.weights[j] * s.det);
    }
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

SparseMatrix selection(const std::vector<int>& idx, int n, double value = 1.0) {
  Triplets t;
  for (std::size_t r = 0; r < idx.size(); ++r) t.emplace_back(static_cast<int>(r), idx[r], value);
  return from_triplets(static_cast<int>(idx.size()), n, t);
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  std::vector<double> x, w;
  switch (n) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: x = {-1 / std::sqrt(3.0), 1 / std::sqrt(3.0)}; w = {1.0, 1.0}; break;
    case 3: x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}; w = {5.0 / 9, 8.0 / 9, 5.0 / 9}; break;
    case 4:
      x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
      w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
      break;
    case 5:
      x = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
      w = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
      break;
    default: throw DomainError("Gauss-Legendre rules are available for 1..5 points");
  }
  QuadratureRule q;
  for (std::size_t i = 0; i < x.size(); ++i) {
    q.points.push_back(0.5 * (x[i] + 1.0));
    q.weights.push_back(0.5 * w[i]);
  }
  return q;
}

bool Q2Space::has_tag(int node, BoundaryTag t) const { return (node_tags[at(node)] & tag_bit(t)) != 0; }

Q2Space build_q2_space(const mesh::CoupledMesh& m, Region region) {
  Q2Space s;
  s.region = region;
  std::vector<int> canon(m.nodes.size());
  for (std::size_t i = 0; i < canon.size(); ++i) canon[i] = static_cast<int>(i);
  for (const auto& [l, r] : m.periodic_pairs) canon[at(r)] = l;

  std::vector<int> vertex_node(m.nodes.size(), -1), vertex_q1(m.nodes.size(), -1);
  std::map<std::pair<int, int>, int> edge_node;
  auto new_node = [&](Point p) {
    s.nodes.push_back(p);
    return s.num_nodes() - 1;
  };
  auto vnode = [&](int v) {
    const int c = canon[at(v)];
    if (vertex_node[at(c)] < 0) vertex_node[at(c)] = new_node(m.nodes[at(c)]);
    return vertex_node[at(c)];
  };
  auto vq1 = [&](int v) {
    const int c = canon[at(v)];
    if (vertex_q1[at(c)] < 0) {
      vertex_q1[at(c)] = s.num_vertices();
      s.vertices.push_back(m.nodes[at(c)]);
    }
    return vertex_q1[at(c)];
  };
  auto enode = [&](int a, int b) {
    const int ca = canon[at(a)], cb = canon[at(b)];
    const auto key = std::minmax(ca, cb);
    auto it = edge_node.find(key);
    if (it != edge_node.end()) return it->second;
    const Point pa = m.nodes[at(a)], pb = m.nodes[at(b)];
    const int id = new_node({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    edge_node.emplace(key, id);
    return id;
  };

  for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
    const auto& cell = m.cells[at(c)];
    if (cell.region != region) continue;
    const auto& v = cell.v;
    std::array<Point, 4> g{m.nodes[at(v[0])], m.nodes[at(v[1])], m.nodes[at(v[2])], m.nodes[at(v[3])]};
    std::array<int, 9> n{};
    n[0] = vnode(v[0]);
    n[2] = vnode(v[1]);
    n[8] = vnode(v[2]);
    n[6] = vnode(v[3]);
    n[1] = enode(v[0], v[1]);
    n[5] = enode(v[1], v[2]);
    n[7] = enode(v[3], v[2]);
    n[3] = enode(v[0], v[3]);
    n[4] = new_node(shape_at(g, 0.5, 0.5).x);
    s.cells.push_back(c);
    s.cell_nodes.push_back(n);
    s.cell_vertices.push_back({vq1(v[0]), vq1(v[1]), vq1(v[3]), vq1(v[2])});
    s.cell_geometry.push_back(g);
  }

  std::vector<int> local(m.cells.size(), -1);
  for (std::size_t i = 0; i < s.cells.size(); ++i) local[at(s.cells[i])] = static_cast<int>(i);

  s.node_tags.assign(s.nodes.size(), 0);
  for (const auto& e : m.boundary_edges) {
    const int lc = local[at(e.cell)];
    if (lc < 0) continue;
    for (int ln : kEdgeNodes[at(e.local_edge)]) s.node_tags[at(s.cell_nodes[at(lc)][at(ln)])] |= tag_bit(m.tag(e.side));
  }

  std::vector<char> on_gamma(s.nodes.size(), 0);
  for (const auto& e : m.interface_edges) {
    const int cell = region == Region::Fluid ? e.cell_f : e.cell_p;
    const int edge = region == Region::Fluid ? e.local_edge_f : e.local_edge_p;
    for (int ln : kEdgeNodes[at(edge)]) on_gamma[at(s.cell_nodes[at(local[at(cell)])][at(ln)])] = 1;
  }
  for (int i = 0; i < s.num_nodes(); ++i)
    if (on_gamma[at(i)]) s.interface_nodes.push_back(i);
  std::stable_sort(s.interface_nodes.begin(), s.interface_nodes.end(),
                   [&](int a, int b) { return s.nodes[at(a)].x < s.nodes[at(b)].x; });
  return s;
}

DofMap build_dofmap(const mesh::CoupledMesh& m, bool no_slip_interface) {
  DofMap d;
  d.fluid = build_q2_space(m, Region::Fluid);
  d.porous = build_q2_space(m, Region::Porous);
  if (d.fluid.interface_nodes.size() != d.porous.interface_nodes.size())
    throw GeometryError("non-conforming interface");
  for (std::size_t i = 0; i < d.fluid.interface_nodes.size(); ++i) {
    const auto& a = d.fluid.nodes[at(d.fluid.interface_nodes[i])];
    const auto& b = d.porous.nodes[at(d.porous.interface_nodes[i])];
    if (std::abs(a.x - b.x) > 1e-12 || std::abs(a.y - b.y) > 1e-12) throw GeometryError("non-conforming interface");
  }

  d.stokes_constrained.assign(at(d.stokes_size()), 0);
  for (int n = 0; n < d.fluid.num_nodes(); ++n)
    if (d.fluid.has_tag(n, BoundaryTag::DirichletVel) || d.fluid.has_tag(n, BoundaryTag::Inflow))
      d.stokes_constrained[at(d.ux(n))] = d.stokes_constrained[at(d.uy(n))] = 1;
  for (int n : d.fluid.interface_nodes) {
    d.interface_normal_velocity_dofs.push_back(d.uy(n));
    d.interface_tangential_velocity_dofs.push_back(d.ux(n));
    if (no_slip_interface) d.stokes_constrained[at(d.ux(n))] = 1;
  }
  d.darcy_constrained.assign(at(d.darcy_size()), 0);
  for (int n = 0; n < d.porous.num_nodes(); ++n)
    if (d.porous.has_tag(n, BoundaryTag::DirichletDarcy)) d.darcy_constrained[at(n)] = 1;
  d.interface_darcy_dofs = d.porous.interface_nodes;
  return d;
}

SparseMatrix interface_mass(const mesh::CoupledMesh& m, const DofMap& dofs) {
  const auto& s = dofs.fluid;
  std::vector<int> gidx(s.nodes.size(), -1);
  for (std::size_t i = 0; i < s.interface_nodes.size(); ++i) gidx[at(s.interface_nodes[i])] = static_cast<int>(i);
  std::vector<int> local(m.cells.size(), -1);
  for (std::size_t i = 0; i < s.cells.size(); ++i) local[at(s.cells[i])] = static_cast<int>(i);

  const auto q = gauss_legendre(3);
  Triplets t;
  for (const auto& e : m.interface_edges) {
    const int lc = local[at(e.cell_f)];
    const auto& g = s.cell_geometry[at(lc)];
    const double len = std::hypot(g[1].x - g[0].x, g[1].y - g[0].y);
    std::array<int, 3> idx{};
    for (int k = 0; k < 3; ++k) idx[at(k)] = gidx[at(s.cell_nodes[at(lc)][at(kEdgeNodes[0][at(k)])])];
    for (std::size_t p = 0; p < q.points.size(); ++p) {
      const auto L = lag2(q.points[p]);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) t.emplace_back(idx[at(a)], idx[at(b)], q.weights[p] * len * L[at(a)] * L[at(b)]);
    }
  }
  const int n = dofs.interface_size();
  return from_triplets(n, n, t);
}

StokesOperators assemble_stokes_operators(const mesh::CoupledMesh& m, const DofMap& dofs, const PhysicalParams& p) {
  const auto& s = dofs.fluid;
  const int N = dofs.stokes_size();
  Triplets tm, tk, tg, td;
  const double mu = p.mu_f;
  for (std::size_t c = 0; c < s.cells.size(); ++c) {
    const auto& nodes = s.cell_nodes[c];
    const auto& verts = s.cell_vertices[c];
    for_each_qp(s.cell_geometry[c], 3, [&](const Shape& sh, double w) {
      for (int a = 0; a < 9; ++a) {
        const int na = nodes[at(a)];
        const double pa = sh.phi[at(a)], ax = sh.phix[at(a)], ay = sh.phiy[at(a)];
        for (int b = 0; b < 9; ++b) {
          const int nb = nodes[at(b)];
          const double pb = sh.phi[at(b)], bx = sh.phix[at(b)], by = sh.phiy[at(b)];
          const double mass = w * pa * pb;
          const double lap = ax * bx + ay * by;
          tm.emplace_back(dofs.ux(na), dofs.ux(nb), mass);
          tm.emplace_back(dofs.uy(na), dofs.uy(nb), mass);
          tk.emplace_back(dofs.ux(na), dofs.ux(nb), w * mu * (lap + ax * bx));
          tk.emplace_back(dofs.uy(na), dofs.uy(nb), w * mu * (lap + ay * by));
          tk.emplace_back(dofs.ux(na), dofs.uy(nb), w * mu * ay * bx);
          tk.emplace_back(dofs.uy(na), dofs.ux(nb), w * mu * ax * by);
        }
        for (int q = 0; q < 4; ++q) {
          const int pq = dofs.pf(verts[at(q)]);
          const double psi = sh.psi[at(q)];
          tg.emplace_back(dofs.ux(na), pq, -w * ax * psi);
          tg.emplace_back(dofs.uy(na), pq, -w * ay * psi);
          td.emplace_back(pq, dofs.ux(na), -w * ax * psi);
          td.emplace_back(pq, dofs.uy(na), -w * ay * psi);
        }
      }
    });
  }
  StokesOperators ops;
  ops.mass = from_triplets(N, N, tm);
  ops.viscous = from_triplets(N, N, tk);
  ops.grad = from_triplets(N, N, tg);
  ops.div = from_triplets(N, N, td);

  const SparseMatrix mg = interface_mass(m, dofs);
  // n = (0,-1) on the fluid side, so u.n = -u_y.
  ops.trace = selection(dofs.interface_normal_velocity_dofs, N, -1.0);
  ops.extension = SparseMatrix(ops.trace.transpose()) * mg;
  ops.normal_mass = ops.extension * ops.trace;
  if (p.no_slip_interface()) {
    ops.bjs = SparseMatrix(N, N);
  } else {
    const SparseMatrix tt = selection(dofs.interface_tangential_velocity_dofs, N);
    ops.bjs = p.xi_f * (SparseMatrix(tt.transpose()) * mg * tt);
  }
  return ops;
}

DarcyOperators assemble_darcy_operators(const mesh::CoupledMesh& m, const DofMap& dofs, const PhysicalParams& p) {
  const auto& s = dofs.porous;
  const int N = dofs.darcy_size();
  Triplets tm, tk;
  for (std::size_t c = 0; c < s.cells.size(); ++c) {
    const auto& nodes = s.cell_nodes[c];
    for_each_qp(s.cell_geometry[c], 3, [&](const Shape& sh, double w) {
      for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b) {
          tm.emplace_back(nodes[at(a)], nodes[at(b)], w * sh.phi[at(a)] * sh.phi[at(b)]);
          tk.emplace_back(nodes[at(a)], nodes[at(b)],
                          w * (p.eta1 * sh.phix[at(a)] * sh.phix[at(b)] + p.eta2 * sh.phiy[at(a)] * sh.phiy[at(b)]));
        }
    });
  }
  DarcyOperators ops;
  ops.mass = from_triplets(N, N, tm);
  ops.stiffness = from_triplets(N, N, tk);
  const SparseMatrix mg = interface_mass(m, dofs);
  ops.trace = selection(dofs.interface_darcy_dofs, N);
  ops.extension = SparseMatrix(ops.trace.transpose()) * mg;
  ops.interface = ops.extension * ops.trace;
  return ops;
}

Vector assemble_stokes_load(const DofMap& dofs, const VectorField& f, double t, int quad_points) {
  Vector r = Vector::Zero(dofs.stokes_size());
  if (!f) return r;
  const auto& s = dofs.fluid;
  for (std::size_t c = 0; c < s.cells.size(); ++c)
    for_each_qp_values(s.cell_geometry[c], quad_points, [&](const ShapeValues& sh, double w) {
      const auto v = f(sh.x.x, sh.x.y, t);
      for (int a = 0; a < 9; ++a) {
        const int n = s.cell_nodes[c][at(a)];
        r[dofs.ux(n)] += w * v[0] * sh.phi[at(a)];
        r[dofs.uy(n)] += w * v[1] * sh.phi[at(a)];
      }
    });
  return r;
}

Vector assemble_stokes_traction(const mesh::CoupledMesh& m, const DofMap& dofs, const VectorField& g, double t,
                                int quad_points) {
  Vector r = Vector::Zero(dofs.stokes_size());
  if (!g) return r;
  const auto& s = dofs.fluid;
  std::vector<int> local(m.cells.size(), -1);
  for (std::size_t i = 0; i < s.cells.size(); ++i) local[at(s.cells[i])] = static_cast<int>(i);
  // Edge end points in terms of the cell corners (bottom, right, top, left).
  constexpr std::array<std::array<int, 2>, 4> ends{{{0, 1}, {1, 2}, {3, 2}, {0, 3}}};
  const auto q = gauss_legendre(quad_points);
  for (const auto& e : m.boundary_edges) {
    if (m.tag(e.side) != BoundaryTag::Traction) continue;
    const int lc = local[at(e.cell)];
    if (lc < 0) continue;
    const auto& geo = s.cell_geometry[at(lc)];
    const Point a = geo[at(ends[at(e.local_edge)][0])], b = geo[at(ends[at(e.local_edge)][1])];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const double u = q.points[k];
      const auto v = g(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y), t);
      const auto L = lag2(u);
      for (int j = 0; j < 3; ++j) {
        const int n = s.cell_nodes[at(lc)][at(kEdgeNodes[at(e.local_edge)][at(j)])];
        r[dofs.ux(n)] += q.weights[k] * len * v[0] * L[at(j)];
        r[dofs.uy(n)] += q.weights[k] * len * v[1] * L[at(j)];
      }
    }
  }
  return r;
}

Vector assemble_darcy_load(const DofMap& dofs, const ScalarField& f, double t, int quad_points) {
  Vector r = Vector::Zero(dofs.darcy_size());
  if (!f) return r;
  const auto& s = dofs.porous;
  for (std::size_t c = 0; c < s.cells.size(); ++c)
    for_each_qp_values(s.cell_geometry[c], quad_points, [&](const ShapeValues& sh, double w) {
      const double v = f(sh.x.x, sh.x.y, t);
      for (int a = 0; a < 9; ++a) r[s.cell_nodes[c][at(a)]] += w * v * sh.phi[at(a)];
    });
  return r;
}

// ---------------------------------------------------------------------------------------------

SubdomainSystem::~SubdomainSystem() = default;

void SubdomainSystem::setup(SparseMatrix matrix, std::vector<char> constrained, SparseMatrix trace,
                            SparseMatrix extension, double interface_factor) {
  matrix_ = std::move(matrix);
  matrix_.makeCompressed();
  constrained_ = std::move(constrained);
  trace_ = std::move(trace);
  extension_ = std::move(extension);
  interface_factor_ = interface_factor;
  free_.clear();
  for (int i = 0; i < size(); ++i)
    if (!constrained_[at(i)]) free_.push_back(i);
  const SparseMatrix P = selection(free_, size());
  free_cols_ = P * matrix_;
  SparseMatrix ff = free_cols_ * SparseMatrix(P.transpose());
  ff.makeCompressed();
  factorize(ff);
}

Vector SubdomainSystem::solve(const Vector& rhs, const Vector& dirichlet, const Vector& lambda) const {
  const int n = size();
  Vector full = rhs.size() ? rhs : Vector::Zero(n);
  if (full.size() != n) throw DomainError("right-hand side has the wrong size");
  if (lambda.size()) {
    if (lambda.size() != interface_size()) throw DomainError("interface vector has the wrong size");
    full += interface_factor_ * (extension_ * lambda);
  }
  Vector xc = Vector::Zero(n);
  if (dirichlet.size()) {
    if (dirichlet.size() != n) throw DomainError("Dirichlet vector has the wrong size");
    for (int i = 0; i < n; ++i)
      if (constrained_[at(i)]) xc[i] = dirichlet[i];
  }
  Vector b(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k) b[static_cast<Eigen::Index>(k)] = full[free_[k]];
  if (dirichlet.size()) b -= free_cols_ * xc;
  const Vector xf = solve_free(b);
  Vector x = xc;
  for (std::size_t k = 0; k < free_.size(); ++k) x[free_[k]] = xf[static_cast<Eigen::Index>(k)];
  return x;
}

// ---------------------------------------------------------------------------------------------

struct StokesSystem::Solver {
#ifdef SDOSM_HAVE_UMFPACK
  SparseMatrix a;  // UmfPackLU keeps pointers into the factorized matrix
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
};

StokesSystem::StokesSystem(const StokesOperators& ops, const DofMap& dofs, const DiscretizationParams& d,
                           const RobinPair& robin)
    : solver_(std::make_unique<Solver>()), theta_(d.theta), dt_(d.dt) {
  if (!(robin.alpha_f >= 0.0) || !std::isfinite(robin.alpha_f)) throw DomainError("alpha_f must be finite and >= 0");
  const double tdt = d.theta * d.dt;
  const SparseMatrix visc = ops.viscous + ops.bjs + robin.alpha_f * ops.normal_mass;
  SparseMatrix a = ops.mass + tdt * visc + d.dt * ops.grad + ops.div;
  explicit_op_ = (1.0 - d.theta) * d.dt * visc;
  mass_ = ops.mass;
  setup(std::move(a), dofs.stokes_constrained, ops.trace, ops.extension, -tdt);
}

StokesSystem::~StokesSystem() = default;

void StokesSystem::factorize(const SparseMatrix& ff) {
#ifdef SDOSM_HAVE_UMFPACK
  solver_->a = ff;
  solver_->lu.umfpackControl()(UMFPACK_IRSTEP) = 2;  // large alpha_f: the velocity trace needs refinement
  // Row-sum scaling picks bad pivots once the Robin term dominates the interface rows.
  solver_->lu.umfpackControl()(UMFPACK_SCALE) = UMFPACK_SCALE_NONE;
  solver_->lu.compute(solver_->a);
#else
  solver_->lu.compute(ff);
#endif
  if (solver_->lu.info() != Eigen::Success)
    throw SingularAssemblyError("Stokes factorization failed (is the pressure determined?)");
}

Vector StokesSystem::solve_free(const Vector& b) const {
  Vector x = solver_->lu.solve(b);
  if (solver_->lu.info() != Eigen::Success) throw SolverError("Stokes solve failed");
  return x;
}

Vector StokesSystem::data_rhs(const Vector& previous, const Vector& lambda_previous, const Vector& load_previous,
                              const Vector& load_now) const {
  const int n = size();
  Vector r = Vector::Zero(n);
  if (load_now.size()) r += dt_ * theta_ * load_now;
  if (load_previous.size() && theta_ < 1.0) r += dt_ * (1.0 - theta_) * load_previous;
  if (previous.size()) {
    if (previous.size() != n) throw DomainError("previous Stokes state has the wrong size");
    r += mass_ * previous;
    if (theta_ < 1.0) r -= explicit_op_ * previous;
  }
  if (lambda_previous.size() && theta_ < 1.0) r -= (1.0 - theta_) * dt_ * (extension_ * lambda_previous);
  return r;
}

// ---------------------------------------------------------------------------------------------

struct DarcySystem::Solver {
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

DarcySystem::DarcySystem(const DarcyOperators& ops, const DofMap& dofs, const PhysicalParams& p,
                         const DiscretizationParams& d, const RobinPair& robin)
    : solver_(std::make_unique<Solver>()), theta_(d.theta), dt_(d.dt), alpha_p_(robin.alpha_p) {
  if (!(robin.alpha_p > 0.0)) throw DomainError("alpha_p must be positive");
  const double inv_ap = std::isinf(robin.alpha_p) ? 0.0 : 1.0 / robin.alpha_p;
  const double tdt = d.theta * d.dt;
  const SparseMatrix op = ops.stiffness + inv_ap * ops.interface;
  storage_ = p.S_p * ops.mass;
  SparseMatrix a = storage_ + tdt * op;
  explicit_op_ = (1.0 - d.theta) * d.dt * op;
  setup(std::move(a), dofs.darcy_constrained, ops.trace, ops.extension, tdt * inv_ap);
}

DarcySystem::~DarcySystem() = default;

void DarcySystem::factorize(const SparseMatrix& ff) {
  solver_->ldlt.compute(ff);
  if (solver_->ldlt.info() != Eigen::Success) throw SingularAssemblyError("Darcy factorization failed");
  const auto& D = solver_->ldlt.vectorD();
  if ((D.array() <= 0.0).any()) throw SingularAssemblyError("Darcy matrix is not positive definite");
}

Vector DarcySystem::solve_free(const Vector& b) const { return solver_->ldlt.solve(b); }

Vector DarcySystem::data_rhs(const Vector& previous, const Vector& lambda_previous, const Vector& load_previous,
                             const Vector& load_now) const {
  const int n = size();
  Vector r = Vector::Zero(n);
  if (load_now.size()) r += dt_ * theta_ * load_now;
  if (load_previous.size() && theta_ < 1.0) r += dt_ * (1.0 - theta_) * load_previous;
  if (previous.size()) {
    if (previous.size() != n) throw DomainError("previous Darcy state has the wrong size");
    r += storage_ * previous;
    if (theta_ < 1.0) r -= explicit_op_ * previous;
  }
  if (lambda_previous.size() && theta_ < 1.0 && !std::isinf(alpha_p_))
    r += (1.0 - theta_) * dt_ / alpha_p_ * (extension_ * lambda_previous);
  return r;
}

// ---------------------------------------------------------------------------------------------

std::unique_ptr<StokesSystem> assemble_stokes(const mesh::CoupledMesh& m, const DofMap& dofs,
                                              const PhysicalParams& p, const DiscretizationParams& d,
                                              const RobinPair& robin) {
  if (m.interface_edges.empty()) throw SingularAssemblyError("Stokes pressure is undetermined without an interface");
  return std::make_unique<StokesSystem>(assemble_stokes_operators(m, dofs, p), dofs, d, robin);
}

std::unique_ptr<DarcySystem> assemble_darcy(const mesh::CoupledMesh& m, const DofMap& dofs, const PhysicalParams& p,
                                            const DiscretizationParams& d, const RobinPair& robin) {
  return std::make_unique<DarcySystem>(assemble_darcy_operators(m, dofs, p), dofs, p, d, robin);
}

Vector build_step_rhs(const SubdomainSystem& sys, const Vector& previous, const Vector& lambda_previous,
                      const Vector& lambda_now, const Vector& load_previous, const Vector& load_now) {
  Vector r = sys.data_rhs(previous, lambda_previous, load_previous, load_now);
  if (lambda_now.size()) {
    if (lambda_now.size() != sys.interface_size()) throw DomainError("interface vector has the wrong size");
    r += sys.interface_factor() * sys.extend(lambda_now);
  }
  return r;
}

Vector interpolate_stokes(const DofMap& dofs, const VectorField& u, const ScalarField& p, double t) {
  Vector x = Vector::Zero(dofs.stokes_size());
  const auto& s = dofs.fluid;
  if (u)
    for (int n = 0; n < s.num_nodes(); ++n) {
      const auto v = u(s.nodes[at(n)].x, s.nodes[at(n)].y, t);
      x[dofs.ux(n)] = v[0];
      x[dofs.uy(n)] = v[1];
    }
  if (p)
    for (int v = 0; v < s.num_vertices(); ++v) x[dofs.pf(v)] = p(s.vertices[at(v)].x, s.vertices[at(v)].y, t);
  return x;
}

Vector interpolate_darcy(const DofMap& dofs, const ScalarField& p, double t) {
  Vector x = Vector::Zero(dofs.darcy_size());
  if (p)
    for (int n = 0; n < dofs.porous.num_nodes(); ++n) x[n] = p(dofs.porous.nodes[at(n)].x, dofs.porous.nodes[at(n)].y, t);
  return x;
}

Vector stokes_dirichlet(const DofMap& dofs, const VectorField& u, double t) {
  Vector x = Vector::Zero(dofs.stokes_size());
  if (!u) return x;
  const auto& s = dofs.fluid;
  for (int n = 0; n < s.num_nodes(); ++n) {
    if (!dofs.stokes_constrained[at(dofs.ux(n))] && !dofs.stokes_constrained[at(dofs.uy(n))]) continue;
    const auto v = u(s.nodes[at(n)].x, s.nodes[at(n)].y, t);
    if (dofs.stokes_constrained[at(dofs.ux(n))]) x[dofs.ux(n)] = v[0];
    if (dofs.stokes_constrained[at(dofs.uy(n))]) x[dofs.uy(n)] = v[1];
  }
  return x;
}

Vector darcy_dirichlet(const DofMap& dofs, const ScalarField& p, double t) {
  Vector x = Vector::Zero(dofs.darcy_size());
  if (!p) return x;
  for (int n = 0; n < dofs.porous.num_nodes(); ++n)
    if (dofs.darcy_constrained[at(n)]) x[n] = p(dofs.porous.nodes[at(n)].x, dofs.porous.nodes[at(n)].y, t);
  return x;
}

PointValue evaluate_q2(const Q2Space& s, const Vector& coeffs, int offset, int cell, double xi, double eta) {
  const Shape sh = shape_at(s.cell_geometry[at(cell)], xi, eta);
  PointValue r{sh.x, 0.0, 0.0, 0.0};
  for (int a = 0; a < 9; ++a) {
    const double c = coeffs[offset + s.cell_nodes[at(cell)][at(a)]];
    r.value += c * sh.phi[at(a)];
    r.dx += c * sh.phix[at(a)];
    r.dy += c * sh.phiy[at(a)];
  }
  return r;
}

PointValue evaluate_q1(const Q2Space& s, const Vector& coeffs, int offset, int cell, double xi, double eta) {
  const Shape sh = shape_at(s.cell_geometry[at(cell)], xi, eta);
  PointValue r{sh.x, 0.0, 0.0, 0.0};
  for (int a = 0; a < 4; ++a) {
    const double c = coeffs[offset + s.cell_vertices[at(cell)][at(a)]];
    r.value += c * sh.psi[at(a)];
    r.dx += c * sh.psix[at(a)];
    r.dy += c * sh.psiy[at(a)];
  }
  return r;
}

namespace {

template <class F>
double l2_over(const Q2Space& s, int n, F&& err2) {
  double acc = 0.0;
  for (int c = 0; c < static_cast<int>(s.cells.size()); ++c)
    for_each_qp_values(s.cell_geometry[at(c)], n, [&](const ShapeValues& sh, double w) { acc += w * err2(c, sh); });
  return std::sqrt(acc);
}

double q2_value(const Q2Space& s, const Vector& coeffs, int offset, int cell, const ShapeValues& sh) {
  double v = 0.0;
  for (int a = 0; a < 9; ++a) v += coeffs[offset + s.cell_nodes[at(cell)][at(a)]] * sh.phi[at(a)];
  return v;
}

}  // namespace

double l2_error_velocity(const DofMap& dofs, const Vector& stokes, const VectorField& exact, double t, int n) {
  return l2_over(dofs.fluid, n, [&](int c, const ShapeValues& sh) {
    const double ux = q2_value(dofs.fluid, stokes, 0, c, sh);
    const double uy = q2_value(dofs.fluid, stokes, dofs.num_velocity_nodes(), c, sh);
    const auto e = exact(sh.x.x, sh.x.y, t);
    return (ux - e[0]) * (ux - e[0]) + (uy - e[1]) * (uy - e[1]);
  });
}

double l2_error_fluid_pressure(const DofMap& dofs, const Vector& stokes, const ScalarField& exact, double t, int n) {
  const int off = 2 * dofs.num_velocity_nodes();
  return l2_over(dofs.fluid, n, [&](int c, const ShapeValues& sh) {
    double p = 0.0;
    for (int a = 0; a < 4; ++a) p += stokes[off + dofs.fluid.cell_vertices[at(c)][at(a)]] * sh.psi[at(a)];
    const double e = p - exact(sh.x.x, sh.x.y, t);
    return e * e;
  });
}

double l2_error_darcy(const DofMap& dofs, const Vector& darcy, const ScalarField& exact, double t, int n) {
  return l2_over(dofs.porous, n, [&](int c, const ShapeValues& sh) {
    const double e = q2_value(dofs.porous, darcy, 0, c, sh) - exact(sh.x.x, sh.x.y, t);
    return e * e;
  });
}

}  // namespace sdosm::fem
