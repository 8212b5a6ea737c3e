#pragma once

#include "dgml/common.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

namespace dgml {

using Point = Eigen::Vector2d;

inline constexpr int kBoundary = -1;

struct Edge {
  std::array<int, 2> vertices{};
  Point midpoint = Point::Zero();
  double length = 0.0;
  int plus = kBoundary;   // adjacent triangle with the smaller index
  int minus = kBoundary;  // other triangle, kBoundary on the domain boundary
  Point normal = Point::Zero();  // unit, from plus to minus (outward on boundary)

  bool on_boundary() const { return minus == kBoundary; }
};

/// Conforming triangulation of [-1,1]^2.
///
/// Triangles are counterclockwise. Local edge k of a triangle is the edge
/// opposite its local vertex k. Refined meshes carry the maps back to their
/// parent mesh; on the initial mesh those maps are empty.
struct Mesh {
  int level = 0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<bool> boundary_vertex;

  std::vector<int> parent_triangle;
  // Coarse endpoints of the entity a fine vertex came from; {v, v} when the
  // vertex already existed on the coarse mesh.
  std::vector<std::array<int, 2>> vertex_parents;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_dg_dofs() const { return 3 * num_triangles(); }

  int num_boundary_edges() const {
    int n = 0;
    for (const auto& e : edges) n += e.on_boundary() ? 1 : 0;
    return n;
  }
  int num_interior_edges() const { return num_edges() - num_boundary_edges(); }

  const Point& vertex(int t, int local) const { return vertices[triangles[t][local]]; }

  double area(int t) const {
    const Point a = vertex(t, 0), b = vertex(t, 1), c = vertex(t, 2);
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  }

  Point barycenter(int t) const {
    return (vertex(t, 0) + vertex(t, 1) + vertex(t, 2)) / 3.0;
  }

  /// Gradients of the three barycentric coordinates of triangle t.
  std::array<Point, 3> barycentric_gradients(int t) const {
    const double two_area = 2.0 * area(t);
    std::array<Point, 3> g;
    for (int k = 0; k < 3; ++k) {
      const Point& p = vertex(t, (k + 1) % 3);
      const Point& q = vertex(t, (k + 2) % 3);
      g[k] = Point(p.y() - q.y(), q.x() - p.x()) / two_area;
    }
    return g;
  }

  /// Barycentric coordinates of x with respect to triangle t.
  std::array<double, 3> barycentric(int t, const Point& x) const {
    const auto g = barycentric_gradients(t);
    std::array<double, 3> lam;
    for (int k = 0; k < 3; ++k) lam[k] = 1.0 + g[k].dot(x - vertex(t, k));
    return lam;
  }

  /// Local index (0..2) of edge e inside triangle t, or -1.
  int local_edge(int t, int e) const {
    for (int k = 0; k < 3; ++k)
      if (triangle_edges[t][k] == e) return k;
    return -1;
  }

  /// Length of the grid legs; the nominal h of the structured family.
  double mesh_size() const {
    double h = edges.empty() ? 0.0 : edges.front().length;
    for (const auto& e : edges) h = std::min(h, e.length);
    return h;
  }
};

namespace detail {

inline void build_topology(Mesh& mesh) {
  mesh.edges.clear();
  mesh.triangle_edges.assign(mesh.triangles.size(), {-1, -1, -1});
  std::map<std::pair<int, int>, int> index;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.triangles[t][(k + 1) % 3];
      const int b = mesh.triangles[t][(k + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, fresh] = index.try_emplace({key.first, key.second}, mesh.num_edges());
      if (fresh) {
        Edge e;
        e.vertices = {a, b};
        const Point pa = mesh.vertices[a], pb = mesh.vertices[b];
        e.midpoint = 0.5 * (pa + pb);
        const Point d = pb - pa;
        e.length = d.norm();
        // Outward normal of a counterclockwise triangle's edge a->b.
        e.normal = Point(d.y(), -d.x()) / e.length;
        e.plus = t;
        mesh.edges.push_back(e);
      } else {
        Edge& e = mesh.edges[it->second];
        if (e.minus != kBoundary)
          throw std::invalid_argument("mesh: edge shared by more than two triangles");
        e.minus = t;
      }
      mesh.triangle_edges[t][k] = it->second;
    }
  }
  mesh.boundary_vertex.assign(mesh.vertices.size(), false);
  for (const auto& e : mesh.edges)
    if (e.on_boundary()) mesh.boundary_vertex[e.vertices[0]] = mesh.boundary_vertex[e.vertices[1]] = true;
}

}  // namespace detail

/// 4x4 squares of side 0.5 on [-1,1]^2, each cut along its lower-left to
/// upper-right diagonal: 25 vertices, 32 triangles, 56 edges.
inline Mesh build_initial_mesh() {
  constexpr int n = 4;
  constexpr double side = 0.5;
  Mesh mesh;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(-1.0 + side * i, -1.0 + side * j);
  auto id = [](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  detail::build_topology(mesh);
  return mesh;
}

/// Red refinement: every triangle is split into four congruent children via
/// its edge midpoints. Child 4t+k, k<3, keeps local vertex k of parent t;
/// child 4t+3 is the middle triangle.
inline Mesh refine(const Mesh& coarse) {
  Mesh fine;
  fine.level = coarse.level + 1;
  const int nv = coarse.num_vertices();
  fine.vertices = coarse.vertices;
  fine.vertex_parents.reserve(nv + coarse.num_edges());
  for (int v = 0; v < nv; ++v) fine.vertex_parents.push_back({v, v});
  for (const auto& e : coarse.edges) {
    fine.vertices.push_back(e.midpoint);
    fine.vertex_parents.push_back(e.vertices);
  }
  fine.triangles.reserve(4 * coarse.triangles.size());
  fine.parent_triangle.reserve(4 * coarse.triangles.size());
  for (int t = 0; t < coarse.num_triangles(); ++t) {
    const auto& v = coarse.triangles[t];
    const auto& te = coarse.triangle_edges[t];
    const int m0 = nv + te[0], m1 = nv + te[1], m2 = nv + te[2];
    fine.triangles.push_back({v[0], m2, m1});
    fine.triangles.push_back({m2, v[1], m0});
    fine.triangles.push_back({m1, m0, v[2]});
    fine.triangles.push_back({m0, m1, m2});
    for (int k = 0; k < 4; ++k) fine.parent_triangle.push_back(t);
  }
  detail::build_topology(fine);
  return fine;
}

/// Nested meshes, levels 0..J.
struct MeshHierarchy {
  std::vector<Mesh> meshes;

  int finest_level() const { return static_cast<int>(meshes.size()) - 1; }
  const Mesh& operator[](int level) const { return meshes.at(level); }
  const Mesh& finest() const { return meshes.back(); }
};

inline MeshHierarchy build_hierarchy(int max_level) {
  if (max_level < 0) throw std::invalid_argument("build_hierarchy: negative level");
  MeshHierarchy h;
  h.meshes.push_back(build_initial_mesh());
  for (int j = 1; j <= max_level; ++j) h.meshes.push_back(refine(h.meshes.back()));
  return h;
}

/// Plain-text dump: VERTICES / TRIANGLES / EDGES sections, 0-based indices.
/// Edge lines: v0 v1 plus minus nx ny (minus = -1 on the boundary).
inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "VERTICES " << mesh.num_vertices() << '\n';
  for (const auto& p : mesh.vertices) os << p.x() << ' ' << p.y() << '\n';
  os << "TRIANGLES " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "EDGES " << mesh.num_edges() << '\n';
  for (const auto& e : mesh.edges)
    os << e.vertices[0] << ' ' << e.vertices[1] << ' ' << e.plus << ' ' << e.minus << ' '
       << e.normal.x() << ' ' << e.normal.y() << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace dgml
