#include "cardioquant/volume.hpp"

#include "cardioquant/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cq {

namespace {

std::size_t dims_product(const Dims& d)
{
    std::size_t n = 1;
    for (int v : d) n *= static_cast<std::size_t>(std::max(v, 0));
    return n;
}

}  // namespace

Volume::Volume(Dims dims, Spacing spacing, VolumeKind kind, double fill)
    : dims_(dims), spacing_(spacing), kind_(kind), data_(dims_product(dims), fill)
{
    validate();
}

Volume::Volume(Dims dims, Spacing spacing, VolumeKind kind, std::vector<double> data)
    : dims_(dims), spacing_(spacing), kind_(kind), data_(std::move(data))
{
    validate();
}

void Volume::validate() const
{
    for (int d : dims_)
        require(d > 0, ErrorKind::format, "volume dims must be positive");
    for (double s : spacing_)
        require(std::isfinite(s) && s > 0.0, ErrorKind::format, "volume spacing must be positive");
    require(data_.size() == dims_product(dims_), ErrorKind::format,
            "volume payload has " + std::to_string(data_.size()) + " values, dims require " +
                std::to_string(dims_product(dims_)));
    if (kind_ == VolumeKind::label) {
        for (double v : data_)
            require(v >= 0.0 && std::floor(v) == v, ErrorKind::format,
                    "label volume holds a non-integer or negative value");
    }
}

const char* to_string(VolumeKind kind) noexcept
{
    return kind == VolumeKind::scalar ? "scalar" : "label";
}

std::size_t count_nonzero(const Volume& v)
{
    const auto d = v.data();
    return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](double x) { return x != 0.0; }));
}

Volume select_label(const Volume& v, int label)
{
    Volume out = Volume::label(v.dims(), v.spacing());
    const auto src = v.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] == label ? 1.0 : 0.0;
    return out;
}

void require_same_grid(const Volume& a, const Volume& b, const char* what)
{
    require(a.dims() == b.dims(), ErrorKind::shape, std::string(what) + ": volume dims differ");
    for (int k = 0; k < 3; ++k)
        require(std::abs(a.spacing()[k] - b.spacing()[k]) <= 1e-9 * std::max(a.spacing()[k], b.spacing()[k]),
                ErrorKind::shape, std::string(what) + ": voxel spacing differs");
}

}  // namespace cq
