#pragma once

#include "cardioquant/volume.hpp"

#include <filesystem>

namespace cq {

// cqvol format: `<name>.json` header
//   {"dims":[nx,ny,nz], "spacing":[sx,sy,sz], "kind":"scalar"|"label",
//    "dtype":"f32"|"f64"|"u8", "data":"<name>.raw"}
// plus a little-endian, x-fastest raw payload next to it.
//
// Label volumes are written as u8. Scalar volumes are written as f32 when
// every value survives the narrowing exactly and as f64 otherwise, so a
// write/read round trip is always bit-exact.
Volume read_volume(const std::filesystem::path& header);

// `path` may name the header (`x.json`) or the stem (`x`). Returns the header path.
std::filesystem::path write_volume(const std::filesystem::path& path, const Volume& vol);

}  // namespace cq
