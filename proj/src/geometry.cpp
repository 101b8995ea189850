#include "lsurf/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>

#include "lsurf/errors.hpp"

namespace lsurf {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

std::size_t RevolutionMesh::edge_count() const {
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e) {
            std::size_t a = t[e], b = t[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edges[{a, b}];
        }
    return edges.size();
}

long long RevolutionMesh::euler_characteristic() const {
    return static_cast<long long>(vertex_count()) - static_cast<long long>(edge_count()) +
           static_cast<long long>(triangle_count());
}

bool RevolutionMesh::watertight() const {
    // Each undirected edge must be used exactly once in each direction.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<int, int>> edges;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e) {
            const std::size_t a = t[e], b = t[(e + 1) % 3];
            if (a == b) return false;
            if (a < b)
                ++edges[{a, b}].first;
            else
                ++edges[{b, a}].second;
        }
    for (const auto& [k, c] : edges)
        if (c.first != 1 || c.second != 1) return false;
    return true;
}

RevolutionMesh revolve_polyline(const std::vector<ProfilePoint>& pts, std::size_t segments) {
    if (pts.size() < 3) throw Error("revolve: need at least 3 profile points");
    if (segments < 3) throw Error("revolve: need at least 3 angular segments");
    const std::size_t m = pts.size();
    for (std::size_t i = 1; i + 1 < m; ++i)
        if (!(pts[i].z > 0.0))
            throw NonPositiveHeightError("revolve: interior profile point " +
                                         std::to_string(i) + " has z = " +
                                         std::to_string(pts[i].z));

    RevolutionMesh mesh;
    mesh.vertices.reserve(2 + (m - 2) * segments);
    mesh.vertices.push_back({pts.front().x, 0.0, 0.0});
    for (std::size_t i = 1; i + 1 < m; ++i)
        for (std::size_t k = 0; k < segments; ++k) {
            const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(segments);
            mesh.vertices.push_back(
                {pts[i].x, pts[i].z * std::cos(phi), pts[i].z * std::sin(phi)});
        }
    mesh.vertices.push_back({pts.back().x, 0.0, 0.0});
    const std::size_t pole1 = mesh.vertices.size() - 1;

    auto ring = [segments](std::size_t i, std::size_t k) {
        return 1 + (i - 1) * segments + (k % segments);
    };

    mesh.triangles.reserve(2 * (m - 2) * segments);
    for (std::size_t k = 0; k < segments; ++k)
        mesh.triangles.push_back({0, ring(1, k), ring(1, k + 1)});
    for (std::size_t i = 1; i + 2 < m; ++i)
        for (std::size_t k = 0; k < segments; ++k) {
            mesh.triangles.push_back({ring(i, k), ring(i + 1, k), ring(i + 1, k + 1)});
            mesh.triangles.push_back({ring(i, k), ring(i + 1, k + 1), ring(i, k + 1)});
        }
    for (std::size_t k = 0; k < segments; ++k)
        mesh.triangles.push_back({pole1, ring(m - 2, k + 1), ring(m - 2, k)});
    mesh.meta.profile_samples = m;
    mesh.meta.segments = segments;
    return mesh;
}

RevolutionMesh revolve(const ClosedProfile& profile, std::size_t segments,
                       double interior_step) {
    RevolutionMesh mesh = revolve_polyline(resample_profile(profile, interior_step), segments);
    mesh.meta.n = profile.params.n;
    mesh.meta.lambda = profile.params.lambda;
    mesh.meta.b0 = profile.b0;
    return mesh;
}

}  // namespace lsurf
