#pragma once

#include "cardioquant/error.hpp"
#include "cardioquant/volume.hpp"

#include <doctest.h>

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include <unistd.h>

namespace cqtest {

// Fresh scratch directory per test case, removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
        : path_(std::filesystem::temp_directory_path() / ("cq_test_" + tag + "_" + std::to_string(::getpid())))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// Kind of the cq::Error thrown by fn; fails the test when nothing is thrown.
inline std::optional<cq::ErrorKind> kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const cq::Error& e) {
        return e.kind();
    }
    FAIL_CHECK("expected cq::Error");
    return std::nullopt;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline cq::Volume random_binary(std::mt19937_64& rng, cq::Dims dims, double p, cq::Spacing sp = {1.0, 1.0, 1.0})
{
    cq::Volume v = cq::Volume::label(dims, sp);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = uniform(rng, 0.0, 1.0) < p ? 1.0 : 0.0;
    return v;
}

// Solid axis-aligned box [lo, hi] (inclusive voxel indices) of `value`.
inline void paint_box(cq::Volume& v, cq::Index3 lo, cq::Index3 hi, double value = 1.0)
{
    for (int z = lo[2]; z <= hi[2]; ++z)
        for (int y = lo[1]; y <= hi[1]; ++y)
            for (int x = lo[0]; x <= hi[0]; ++x) v.at(x, y, z) = value;
}

inline cq::Volume ball(int n, double radius)
{
    cq::Volume v = cq::Volume::label({n, n, n});
    const double c = 0.5 * (n - 1);
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if ((x - c) * (x - c) + (y - c) * (y - c) + (z - c) * (z - c) <= radius * radius) v.at(x, y, z) = 1.0;
    return v;
}

}  // namespace cqtest
