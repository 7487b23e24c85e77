#pragma once

#include <optional>
#include <vector>

#include "reeb/reeb_graph.hpp"

namespace reeb {

/// Path-height pseudo-metric: the least width of a closed interval [a, b]
/// covering both point values such that p and q lie in one path component of
/// the preimage of [a, b].  Candidate endpoints are the vertex values plus
/// the two point values, so the minimum is attained on a finite grid and the
/// computation is exact.  Returns nullopt when p and q lie in different graph
/// components ("disconnected" rather than a sentinel value).
std::optional<Rat> path_height_distance(const ReebGraph& g, const GraphPoint& p,
                                        const GraphPoint& q);

/// All-pairs variant over a fixed point set; shares the union-find sweeps
/// across pairs.  entry [i][j] is nullopt when disconnected.
std::vector<std::vector<std::optional<Rat>>>
path_height_matrix(const ReebGraph& g, const std::vector<GraphPoint>& points);

} // namespace reeb
