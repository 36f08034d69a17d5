#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "somrl/errors.hpp"
#include "somrl/gsom.hpp"
#include "somrl/qlearn.hpp"

namespace somrl {

static_assert(std::endian::native == std::endian::little,
              "map files are defined little-endian");

namespace io_detail {

inline void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

inline void write_doubles(std::ostream& os, const double* p, std::size_t n) {
    os.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(double)));
}

inline void read_doubles(std::istream& is, double* p, std::size_t n) {
    is.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(double)));
}

}  // namespace io_detail

inline constexpr char kMapMagic[8] = {'S', 'O', 'M', 'K', 'B', '0', '0', '1'};
inline constexpr char kWeightMagic[8] = {'S', 'O', 'M', 'W', 'V', '0', '0', '1'};

// Map file: magic, rows, cols, dim, config echo (length-prefixed text),
// row-major node weights, node errors.  Doubles are raw little-endian, so
// a round trip is bit-exact.
inline void save_map(const SomMap& map, const std::string& config_echo, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("save_map: cannot open " + path);
    os.write(kMapMagic, sizeof kMapMagic);
    io_detail::write_u64(os, map.rows());
    io_detail::write_u64(os, map.cols());
    io_detail::write_u64(os, map.dim());
    io_detail::write_u64(os, config_echo.size());
    os.write(config_echo.data(), std::streamsize(config_echo.size()));
    for (std::size_t i = 0; i < map.node_count(); ++i)
        io_detail::write_doubles(os, map.node_weights(i).data(), map.dim());
    for (std::size_t i = 0; i < map.node_count(); ++i) {
        const double e = map.node_error(i);
        io_detail::write_doubles(os, &e, 1);
    }
    if (!os) throw ConfigError("save_map: write failed for " + path);
}

struct LoadedMap {
    SomMap map;
    std::string config_echo;
};

inline LoadedMap load_map(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("load_map: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMapMagic, sizeof magic) != 0)
        throw ConfigError("load_map: bad magic in " + path);
    const std::size_t rows = io_detail::read_u64(is);
    const std::size_t cols = io_detail::read_u64(is);
    const std::size_t dim = io_detail::read_u64(is);
    const std::size_t echo_len = io_detail::read_u64(is);
    std::string echo(echo_len, '\0');
    is.read(echo.data(), std::streamsize(echo_len));

    SomMap map(rows, cols, dim);
    for (std::size_t i = 0; i < map.node_count(); ++i)
        io_detail::read_doubles(is, map.mutable_node_weights(i).data(), dim);
    for (std::size_t i = 0; i < map.node_count(); ++i) {
        double e = 0.0;
        io_detail::read_doubles(is, &e, 1);
        map.set_error(i, e);
    }
    if (!is) throw ConfigError("load_map: truncated file " + path);
    return {std::move(map), std::move(echo)};
}

inline void save_weights(const WeightVector& w, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("save_weights: cannot open " + path);
    os.write(kWeightMagic, sizeof kWeightMagic);
    io_detail::write_u64(os, w.block_len);
    io_detail::write_u64(os, w.n_actions());
    io_detail::write_doubles(os, w.values.data(), w.values.size());
    if (!os) throw ConfigError("save_weights: write failed for " + path);
}

inline WeightVector load_weights(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("load_weights: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kWeightMagic, sizeof magic) != 0)
        throw ConfigError("load_weights: bad magic in " + path);
    const std::size_t block_len = io_detail::read_u64(is);
    const std::size_t n_actions = io_detail::read_u64(is);
    WeightVector w = WeightVector::zeros(block_len, n_actions);
    io_detail::read_doubles(is, w.values.data(), w.values.size());
    if (!is) throw ConfigError("load_weights: truncated file " + path);
    return w;
}

}  // namespace somrl
