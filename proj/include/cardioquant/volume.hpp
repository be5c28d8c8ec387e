#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cq {

using Dims = std::array<int, 3>;
using Spacing = std::array<double, 3>;
using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

enum class VolumeKind { scalar, label };

// Regular 3-D grid in x-fastest order. Label volumes hold non-negative
// integers stored as doubles so both kinds share one arithmetic path.
class Volume {
public:
    Volume() = default;
    Volume(Dims dims, Spacing spacing, VolumeKind kind, double fill = 0.0);
    Volume(Dims dims, Spacing spacing, VolumeKind kind, std::vector<double> data);

    static Volume scalar(Dims dims, Spacing spacing = {1.0, 1.0, 1.0}, double fill = 0.0)
    {
        return Volume(dims, spacing, VolumeKind::scalar, fill);
    }
    static Volume label(Dims dims, Spacing spacing = {1.0, 1.0, 1.0}, double fill = 0.0)
    {
        return Volume(dims, spacing, VolumeKind::label, fill);
    }

    const Dims& dims() const noexcept { return dims_; }
    const Spacing& spacing() const noexcept { return spacing_; }
    VolumeKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(int x, int y, int z) { return data_[linear(x, y, z)]; }
    double at(int x, int y, int z) const { return data_[linear(x, y, z)]; }

    std::size_t linear(int x, int y, int z) const noexcept
    {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims_[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(z));
    }
    Index3 coords(std::size_t i) const noexcept
    {
        const auto nx = static_cast<std::size_t>(dims_[0]);
        const auto ny = static_cast<std::size_t>(dims_[1]);
        return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny), static_cast<int>(i / (nx * ny))};
    }
    bool inside(int x, int y, int z) const noexcept
    {
        return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] && z < dims_[2];
    }

    // Physical position (mm) of a voxel center; voxel (0,0,0) sits at the origin.
    Vec3 position(int x, int y, int z) const noexcept
    {
        return {x * spacing_[0], y * spacing_[1], z * spacing_[2]};
    }
    Vec3 position(std::size_t i) const noexcept
    {
        const auto c = coords(i);
        return position(c[0], c[1], c[2]);
    }


    // Throws cq::Error describing the first violated invariant.
    void validate() const;

    friend bool operator==(const Volume&, const Volume&) = default;

private:
    Dims dims_{0, 0, 0};
    Spacing spacing_{1.0, 1.0, 1.0};
    VolumeKind kind_ = VolumeKind::scalar;
    std::vector<double> data_;
};

const char* to_string(VolumeKind kind) noexcept;

// Foreground count (non-zero voxels).
std::size_t count_nonzero(const Volume& v);

// Binary label volume with 1 where v == label.
Volume select_label(const Volume& v, int label);

// Dims and spacing check shared by all two-volume operations.
void require_same_grid(const Volume& a, const Volume& b, const char* what);

}  // namespace cq
