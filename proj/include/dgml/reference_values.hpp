#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dgml {

/// Published reference value for one (eps, level) cell of a table.
struct ReferenceCell {
  double eps = 1.0;
  int level = 0;
  std::optional<double> K;
  std::optional<double> K1;
  std::optional<int> iterations;
  std::optional<double> norm;
  bool infeasible = false;
};

namespace reference {

inline constexpr std::array<double, 7> kEpsSweep{1e-5, 1e-3, 1e-1, 1.0, 1e1, 1e3, 1e5};
inline constexpr std::array<double, 11> kEpsSweepFine{1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4, 1e5};

namespace detail {

struct Row {
  double K;
  int it;  // -1: not reported
  double K1;  // < 0: not reported
};

inline std::vector<ReferenceCell> grid(const std::vector<std::vector<Row>>& rows_by_eps, int first_level = 0) {
  std::vector<ReferenceCell> out;
  for (std::size_t i = 0; i < rows_by_eps.size(); ++i) {
    for (std::size_t l = 0; l < rows_by_eps[i].size(); ++l) {
      const Row& r = rows_by_eps[i][l];
      ReferenceCell c;
      c.eps = kEpsSweep[i];
      c.level = first_level + static_cast<int>(l);
      if (r.K <= 0.0) {
        c.infeasible = true;
      } else {
        c.K = r.K;
        if (r.it >= 0) c.iterations = r.it;
        if (r.K1 >= 0.0) c.K1 = r.K1;
      }
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// K(D_z^{-1} A_zz) and PCG iterations, SIPG-0, levels 0..3.
inline std::vector<ReferenceCell> zz_block() {
  // rows: level; columns: eps sweep
  const double K[4][7] = {{1.73, 1.73, 1.73, 1.73, 1.72, 1.73, 1.73},
                          {1.72, 1.72, 1.72, 1.72, 1.72, 1.72, 1.72},
                          {1.72, 1.72, 1.72, 1.71, 1.70, 1.71, 1.72},
                          {1.72, 1.72, 1.71, 1.71, 1.69, 1.69, 1.69}};
  const int it[4][7] = {{14, 12, -1, 9, 10, 12, 13},
                        {15, 13, -1, 10, 10, 12, 14},
                        {15, 13, -1, 10, 10, 12, 15},
                        {15, 12, -1, 10, 10, 12, 16}};
  std::vector<ReferenceCell> out;
  for (int i = 0; i < 7; ++i)
    for (int l = 0; l < 4; ++l) {
      ReferenceCell c;
      c.eps = kEpsSweep[i];
      c.level = l;
      c.K = K[l][i];
      if (it[l][i] >= 0) c.iterations = it[l][i];
      out.push_back(c);
    }
  return out;
}

/// Two-level preconditioner on the CR block; ratio in {1, 2, 4}; levels 0..4.
inline std::vector<ReferenceCell> two_level(int ratio) {
  using detail::Row;
  constexpr Row X{-1.0, -1, -1.0};
  if (ratio == 1)
    return detail::grid({
        {{3e4, 12, 4.52}, {3.31e4, 19, 3.37}, {2.77e4, 22, 2.95}, {2.37e4, 21, 2.78}, {2.08e4, 21, 2.71}},
        {{301, 11, 4.48}, {333, 15, 3.36}, {280, 18, 2.95}, {240, 18, 2.77}, {211, 18, 2.71}},
        {{4.42, 10, 2.97}, {5.22, 13, 2.89}, {4.91, 14, 2.69}, {4.7, 14, 2.6}, {4.59, 14, 2.57}},
        {{2.16, 8, 2.06}, {2.25, 11, 2.16}, {2.29, 12, 2.21}, {2.3, 12, 2.19}, {2.33, 12, 2.18}},
        {{2.33, 9, 2.3}, {3.16, 12, 2.63}, {3.58, 13, 2.66}, {3.8, 14, 2.62}, {3.95, 14, 2.61}},
        {{2.54, 9, 2.4}, {4.12, 13, 2.82}, {5.37, 14, 2.85}, {6.56, 15, 2.8}, {7.79, 16, 2.78}},
        {{2.55, 9, 2.4}, {4.13, 13, 2.83}, {5.41, 15, 2.85}, {6.62, 16, 2.8}, {7.89, 17, 2.78}},
    });
  if (ratio == 2)
    return detail::grid({
        {X, {4.92e4, 18, 4.27}, {4.28e4, 24, 3.61}, {3.66e4, 26, 3.38}, {3.21e4, 27, 3.33}},
        {X, {494, 16, 4.26}, {431, 21, 3.61}, {370, 21, 3.38}, {325, 21, 3.34}},
        {X, {7.14, 14, 3.46}, {6.69, 16, 3.27}, {6.35, 16, 3.2}, {6.19, 16, 3.19}},
        {X, {2.63, 11, 2.32}, {2.75, 13, 2.61}, {2.91, 14, 2.63}, {2.97, 14, 2.61}},
        {X, {3.74, 13, 3.33}, {4.3, 15, 3.38}, {4.48, 16, 3.32}, {4.67, 16, 3.29}},
        {X, {4.93, 14, 3.64}, {6.59, 16, 3.65}, {8.02, 18, 3.56}, {9.55, 18, 3.49}},
        {X, {4.95, 14, 3.65}, {6.63, 16, 3.65}, {8.02, 18, 3.53}, {9.66, 19, 3.49}},
    });
  if (ratio == 4)
    return detail::grid({
        {X, X, {7.89e4, 31, 6.58}, {7.29e4, 34, 5.99}, {6.41e4, 35, 5.97}},
        {X, X, {793, 25, 6.57}, {733, 28, 5.99}, {646, 29, 5.97}},
        {X, X, {12.2, 20, 5.58}, {11.6, 22, 5.69}, {11.4, 22, 5.76}},
        {X, X, {4.73, 17, 3.99}, {5.22, 19, 4.75}, {5.32, 19, 4.8}},
        {X, X, {7.55, 19, 6.34}, {6.84, 21, 5.63}, {6.97, 22, 5.95}},
        {X, X, {11.2, 20, 6.99}, {12.2, 23, 6.11}, {14.6, 25, 6.39}},
        {X, X, {11.3, 20, 7.0}, {12.3, 23, 6.12}, {14.9, 26, 6.4}},
    });
  return {};
}

/// Additive BPX preconditioner on the CR block, levels 0..4.
inline std::vector<ReferenceCell> bpx() {
  return detail::grid({
      {{3e4, 12, 4.52}, {5.03e4, 27, 5.69}, {6.77e4, 33, 6.81}, {8.64e4, 37, 7.9}, {1.06e5, 42, 9.03}},
      {{301, 11, 4.49}, {506, 22, 5.65}, {680, 27, 6.78}, {868, 31, 7.86}, {1.06e3, 35, 8.98}},
      {{4.42, 10, 2.97}, {7.5, 16, 4.22}, {9.92, 20, 5.28}, {12.5, 24, 6.3}, {15.1, 26, 7.41}},
      {{2.16, 8, 2.07}, {3.32, 13, 3.17}, {4.45, 17, 4.25}, {5.61, 20, 5.23}, {6.67, 22, 6.24}},
      {{2.33, 9, 2.3}, {4.58, 14, 3.84}, {6.69, 19, 5.06}, {8.75, 22, 6.19}, {11, 26, 7.31}},
      {{2.54, 9, 2.4}, {5.92, 16, 4.11}, {10.1, 21, 5.42}, {15.6, 25, 6.62}, {23, 29, 7.81}},
      {{2.55, 9, 2.4}, {5.94, 16, 4.11}, {10.2, 21, 5.43}, {15.7, 25, 6.62}, {23.3, 29, 7.81}},
  });
}

/// Block-Jacobi preconditioner for SIPG-1 on the full DG space, levels 0..3.
inline std::vector<ReferenceCell> sipg1_block_jacobi() {
  return detail::grid({
      {{2.85e4, 44, 6.27}, {3.37e4, 44, 6.33}, {3.1e4, 46, 6.45}, {2.85e4, 46, 6.49}},
      {{288, 33, 6.24}, {340, 34, 6.3}, {313, 34, 6.42}, {289, 32, 6.46}},
      {{7.25, 22, 5.62}, {7.33, 22, 5.6}, {7.21, 22, 5.71}, {7.13, 22, 5.73}},
      {{5.53, 19, 5.17}, {5.76, 20, 5.45}, {5.8, 20, 5.46}, {5.83, 20, 5.46}},
      {{6.66, 22, 5.91}, {7.16, 23, 6.2}, {7.16, 23, 6.25}, {7.43, 23, 6.27}},
      {{6.38, 27, 5.51}, {8.98, 30, 6.53}, {11.1, 31, 6.59}, {13.5, 32, 6.59}},
      {{6.91, 33, 6.38}, {9.02, 36, 6.54}, {11.3, 39, 6.6}, {13.8, 40, 6.59}},
  });
}

/// ||I - A_S^{-1} A|| for IIPG-1 with alpha = 32, levels 0..3, 11-point eps sweep.
inline std::vector<ReferenceCell> iipg_propagator() {
  const double E[4][11] = {{0.20, 0.20, 0.20, 0.20, 0.20, 0.20, 0.19, 0.19, 0.19, 0.19, 0.19},
                           {0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14},
                           {0.16, 0.16, 0.16, 0.16, 0.16, 0.15, 0.15, 0.16, 0.16, 0.16, 0.16},
                           {0.16, 0.16, 0.16, 0.16, 0.16, 0.16, 0.16, 0.16, 0.16, 0.16, 0.16}};
  std::vector<ReferenceCell> out;
  for (int i = 0; i < 11; ++i)
    for (int l = 0; l < 4; ++l) {
      ReferenceCell c;
      c.eps = kEpsSweepFine[i];
      c.level = l;
      c.norm = E[l][i];
      out.push_back(c);
    }
  return out;
}

}  // namespace reference
}  // namespace dgml
