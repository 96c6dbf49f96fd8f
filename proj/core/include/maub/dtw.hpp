#pragma once

#include <span>
#include <string_view>

#include "maub/matrix.hpp"

namespace maub {

enum class FrameMetric { kAngular, kCosine, kEuclidean };

std::string_view to_string(FrameMetric m);
FrameMetric parse_frame_metric(std::string_view s);

// angular = arccos(clamped cosine similarity) / pi; cosine = 1 - similarity.
// A zero vector has similarity 1 with another zero vector and 0 otherwise.
double frame_distance(std::span<const float> a, std::span<const float> b, FrameMetric metric);

// Minimum over monotone boundary-to-boundary alignment paths (diagonal,
// right and down steps) of the mean frame distance along the path. The
// minimum is exact: partial sums are tracked per path length rather than
// normalizing only the best-sum path. Throws kEmptySequence.
double dtw_distance(const FrameSlice& a, const FrameSlice& b, FrameMetric metric);

}  // namespace maub
