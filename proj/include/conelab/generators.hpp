#pragma once

#include "conelab/mesh.hpp"

namespace conelab {

/// Boundary of the n-simplex, a triangulated S^{n−1}. Vertices are the
/// standard basis of ℝ^{n+1}, centered and scaled to unit length.
SimplicialComplex simplex_boundary(int n);

/// Icosahedron refined `level` times, vertices projected to the unit sphere.
SimplicialComplex icosphere(int level);

/// Freudenthal triangulation of the flat torus (ℝ/2πℤ)^d on an N^d grid,
/// embedded as a Clifford torus so that every simplex is isometric to its
/// flat counterpart. Requires N ≥ 3, 1 ≤ d ≤ 4.
SimplicialComplex flat_torus(int d, int N);

/// Regular N-gon of perimeter 2π.
SimplicialComplex circle(int N);

/// Staircase triangulation of |A|×|B|. Vertex (a, b) gets id a·|B₀| + b and
/// the concatenated coordinates.
SimplicialComplex product(const SimplicialComplex& A, const SimplicialComplex& B);

/// Looks up a generator by name: "sphere:<n>" (∂Δ^{n+1}), "icosphere:<level>",
/// "torus:<d>:<N>", "circle:<N>", "s2xs1:<level>:<N>".
SimplicialComplex generate(const std::string& spec);

}  // namespace conelab
