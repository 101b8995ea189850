#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "lsurf/shooting.hpp"

namespace lsurf {

// Provenance of a mesh: which problem instance and resolution produced it.
// b0 stays 0 for meshes built from a bare polyline.
struct MeshMetadata {
    int n = 0;
    double lambda = 0.0;
    double b0 = 0.0;
    std::size_t profile_samples = 0;
    std::size_t segments = 0;
};

// Triangle mesh of the surface of revolution swept by a closed profile.
// The profile lives in the (x, z) half plane with z > 0 away from its
// endpoints; revolving about the x-axis maps (x, z) to
// (x, z cos phi, z sin phi). The two profile endpoints sit on the axis and
// become pole vertices closed by triangle fans.
struct RevolutionMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;  // zero based indices
    MeshMetadata meta;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
    std::size_t edge_count() const;
    // V - E + F; 2 for a watertight sphere-like mesh.
    long long euler_characteristic() const;
    // Every edge shared by exactly two triangles with opposite orientation.
    bool watertight() const;
};

// Revolve the resampled profile. interior_step controls the profile
// resampling pitch; segments is the angular resolution. Throws
// NonPositiveHeightError if an interior profile point has z <= 0.
RevolutionMesh revolve(const ClosedProfile& profile, std::size_t segments,
                       double interior_step = 1e-2);

// Same but from an explicit polyline (first and last point on the axis).
RevolutionMesh revolve_polyline(const std::vector<ProfilePoint>& pts, std::size_t segments);

}  // namespace lsurf
