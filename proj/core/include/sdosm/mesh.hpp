#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <vector>

namespace sdosm::mesh {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rectangle {
  double x0, x1, y0, y1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

enum class Region { Fluid = 0, Porous = 1 };

// Traction: natural Stokes condition with prescribed normal stress.
enum class BoundaryTag { DirichletVel, NeumannDarcy, DirichletDarcy, Inflow, Periodic, Traction };

// Outer boundary pieces of the two-rectangle geometry.
enum class BoundarySide { FluidTop, FluidLeft, FluidRight, PorousBottom, PorousLeft, PorousRight };

inline constexpr std::array<BoundarySide, 6> kAllSides{BoundarySide::FluidTop,    BoundarySide::FluidLeft,
                                                       BoundarySide::FluidRight,  BoundarySide::PorousBottom,
                                                       BoundarySide::PorousLeft,  BoundarySide::PorousRight};

// Local edges of a quadrilateral with counterclockwise vertices v0..v3:
// 0 = (v0,v1) bottom, 1 = (v1,v2) right, 2 = (v2,v3) top, 3 = (v3,v0) left.
struct Cell {
  std::array<int, 4> v;
  Region region;
};

struct InterfaceEdge {
  int cell_f;  // fluid cell above, its local edge 0 lies on the interface
  int cell_p;  // porous cell below, its local edge 2 lies on the interface
  int local_edge_f = 0;
  int local_edge_p = 2;
};

struct BoundaryEdge {
  int cell;
  int local_edge;
  BoundarySide side;
};

struct GradingSpec {
  int boundary_layers = 0;
  double ratio = 1.0;  // element size shrinks by this factor per layer toward walls and interface
  void validate() const;
};

class CoupledMesh {
 public:
  std::vector<Point> nodes;
  std::vector<Cell> cells;  // fluid cells first, then porous cells
  int num_fluid_cells = 0;
  std::vector<InterfaceEdge> interface_edges;  // ordered by x
  std::vector<BoundaryEdge> boundary_edges;
  std::map<BoundarySide, BoundaryTag> boundary_tags;
  std::vector<std::pair<int, int>> periodic_pairs;  // (left node, right node)
  Rectangle fluid{}, porous{};
  double h_avg = 0.0;  // mean interface edge length

  bool periodic() const { return !periodic_pairs.empty(); }
  double interface_length() const;
  double cell_area(int c) const;
  void set_tag(BoundarySide side, BoundaryTag tag);
  BoundaryTag tag(BoundarySide side) const { return boundary_tags.at(side); }
  void check_invariants() const;
};

// Structured mesh: nx columns, ny_f fluid rows above ny_p porous rows.
CoupledMesh build_uniform(const Rectangle& fluid, const Rectangle& porous, int nx, int ny_f, int ny_p,
                          bool periodic);

// Geometrically graded mesh with base_n interface edges; the row counts follow the aspect
// ratio of each subdomain. Cells shrink toward the outer walls and toward the interface.
CoupledMesh build_graded(const Rectangle& fluid, const Rectangle& porous, int base_n, const GradingSpec& spec);

// 1D node distribution on [a,b] with n cells, shrinking toward both ends over `layers` cells.
std::vector<double> graded_coordinates(double a, double b, int n, int layers, double ratio);

// Plain-text dump: "# nodes N", N lines "x y", "# cells M", M lines "n0 n1 n2 n3 region".
void write_mesh(std::ostream& os, const CoupledMesh& m);

}  // namespace sdosm::mesh
