#pragma once

#include <optional>

#include "vectra/raster.hpp"

namespace vectra {

/// Chamfer distance to the background in (3,4) units; background pixels are 0.
using DistanceMap = Grid<int>;

inline constexpr int kChamferOrthogonal = 3;
inline constexpr int kChamferDiagonal = 4;

/// Forward/backward raster-scan (3,4) chamfer transform. Pixels outside the
/// image count as background.
DistanceMap chamfer_distance(const BinaryMask& mask);

/// Centres of maximal discs and saddle pixels of the distance map. These are
/// the pixels skeletonize never removes.
BinaryMask ridge_pixels(const DistanceMap& dist);

/// Approximate medial axis: erodes non-ridge pixels in increasing distance
/// order while they are simple points. Output is a subset of the input with
/// the same 8-connected topology; it may still be two pixels wide in places.
BinaryMask skeletonize(const BinaryMask& mask);

/// Sequential thinning with alternating north/east and south/west border
/// sub-iterations. A pixel is deleted when it has at least two foreground
/// neighbours and 8-connectivity number 1. Runs until nothing changes.
///
/// A 2x2 square none of whose pixels can be deleted (e.g. four diagonal
/// branches meeting) is broken by moving one corner to a neighbouring pixel,
/// provided adding that pixel and then deleting the corner are both simple.
/// Such moves are restricted to `allowed` when given, so the result may leave
/// the input by one pixel at those places.
BinaryMask thin(const BinaryMask& mask, const BinaryMask* allowed = nullptr);

/// Number of foreground 8-neighbours.
int neighbour_count(const BinaryMask& mask, int x, int y);

/// Yokoi 8-connectivity number of (x, y); 1 means deleting the pixel does not
/// change the topology (foreground 8-, background 4-connectivity).
int connectivity_number(const BinaryMask& mask, int x, int y);

/// Top-left corner of the first all-foreground 2x2 square, if any.
std::optional<Pixel> find_square(const BinaryMask& mask);

}  // namespace vectra
