#include "cardioquant/volume_io.hpp"

#include "cardioquant/error.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

namespace cq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Dtype { f32, f64, u8 };

std::size_t dtype_size(Dtype t)
{
    switch (t) {
    case Dtype::f32: return 4;
    case Dtype::f64: return 8;
    case Dtype::u8: return 1;
    }
    return 0;
}

const char* dtype_name(Dtype t)
{
    switch (t) {
    case Dtype::f32: return "f32";
    case Dtype::f64: return "f64";
    case Dtype::u8: return "u8";
    }
    return "";
}

Dtype parse_dtype(const std::string& s)
{
    if (s == "f32") return Dtype::f32;
    if (s == "f64") return Dtype::f64;
    if (s == "u8") return Dtype::u8;
    fail(ErrorKind::format, "unknown dtype '" + s + "'");
}

template <class T>
T load_le(const unsigned char* p)
{
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

template <class T>
void store_le(std::string& out, T v)
{
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

Dtype choose_dtype(const Volume& vol)
{
    if (vol.kind() == VolumeKind::label) return Dtype::u8;
    for (double v : vol.data()) {
        const float f = static_cast<float>(v);
        if (static_cast<double>(f) != v && !std::isnan(v)) return Dtype::f64;
    }
    return Dtype::f32;
}

}  // namespace

Volume read_volume(const fs::path& header)
{
    std::ifstream hin(header);
    require(static_cast<bool>(hin), ErrorKind::format, "cannot open volume header " + header.string());

    json h;
    try {
        hin >> h;
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "malformed volume header " + header.string() + ": " + e.what());
    }

    Dims dims{};
    Spacing spacing{};
    VolumeKind kind{};
    Dtype dtype{};
    std::string data_name;
    try {
        const auto& jd = h.at("dims");
        const auto& js = h.at("spacing");
        require(jd.is_array() && jd.size() == 3 && js.is_array() && js.size() == 3, ErrorKind::format,
                "dims and spacing must have three entries");
        for (int i = 0; i < 3; ++i) {
            require(jd[i].is_number_integer(), ErrorKind::format, "dims must be integers");
            dims[i] = jd[i].get<int>();
            spacing[i] = js[i].get<double>();
        }
        const auto k = h.at("kind").get<std::string>();
        if (k == "scalar")
            kind = VolumeKind::scalar;
        else if (k == "label")
            kind = VolumeKind::label;
        else
            fail(ErrorKind::format, "unknown volume kind '" + k + "'");
        dtype = parse_dtype(h.at("dtype").get<std::string>());
        data_name = h.at("data").get<std::string>();
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "volume header " + header.string() + ": " + e.what());
    }

    for (int d : dims) require(d > 0, ErrorKind::format, "volume dims must be positive");
    for (double s : spacing)
        require(std::isfinite(s) && s > 0.0, ErrorKind::format, "volume spacing must be positive");
    require(kind == VolumeKind::scalar || dtype == Dtype::u8, ErrorKind::format, "label volumes must use dtype u8");

    const fs::path raw = header.parent_path() / data_name;
    std::ifstream rin(raw, std::ios::binary);
    require(static_cast<bool>(rin), ErrorKind::format, "cannot open volume payload " + raw.string());
    const std::string bytes((std::istreambuf_iterator<char>(rin)), std::istreambuf_iterator<char>());

    const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    const std::size_t width = dtype_size(dtype);
    require(bytes.size() == n * width, ErrorKind::format,
            "payload " + raw.string() + " holds " + std::to_string(bytes.size() / width) + " values, header dims require " +
                std::to_string(n));

    std::vector<double> data(n);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    for (std::size_t i = 0; i < n; ++i) {
        switch (dtype) {
        case Dtype::f32: data[i] = static_cast<double>(load_le<float>(p + 4 * i)); break;
        case Dtype::f64: data[i] = load_le<double>(p + 8 * i); break;
        case Dtype::u8: data[i] = static_cast<double>(p[i]); break;
        }
    }
    return Volume(dims, spacing, kind, std::move(data));
}

fs::path write_volume(const fs::path& path, const Volume& vol)
{
    vol.validate();
    fs::path header = path;
    if (header.extension() != ".json") header += ".json";
    fs::path raw = header;
    raw.replace_extension(".raw");

    const Dtype dtype = choose_dtype(vol);
    std::string payload;
    payload.reserve(vol.size() * dtype_size(dtype));
    for (double v : vol.data()) {
        switch (dtype) {
        case Dtype::f32: store_le(payload, static_cast<float>(v)); break;
        case Dtype::f64: store_le(payload, v); break;
        case Dtype::u8:
            require(v <= 255.0, ErrorKind::invalid_argument, "label value exceeds u8 range");
            payload.push_back(static_cast<char>(static_cast<unsigned char>(v)));
            break;
        }
    }

    json h;
    h["dims"] = {vol.dims()[0], vol.dims()[1], vol.dims()[2]};
    h["spacing"] = {vol.spacing()[0], vol.spacing()[1], vol.spacing()[2]};
    h["kind"] = to_string(vol.kind());
    h["dtype"] = dtype_name(dtype);
    h["data"] = raw.filename().string();

    {
        std::ofstream hout(header);
        require(static_cast<bool>(hout), ErrorKind::format, "cannot write " + header.string());
        hout << h.dump(2) << '\n';
    }
    std::ofstream rout(raw, std::ios::binary);
    require(static_cast<bool>(rout), ErrorKind::format, "cannot write " + raw.string());
    rout.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    return header;
}

}  // namespace cq
