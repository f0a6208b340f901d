#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "numasig/signature.hpp"
#include "numasig/topology.hpp"

namespace numasig::testing {

/// Uniformly random valid signature for `sockets` sockets.
inline ChannelSignature random_signature(std::mt19937_64& rng, std::size_t sockets) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Break [0,1] into four pieces: static, local, per-thread, interleaved.
    double cuts[3] = {unit(rng), unit(rng), unit(rng)};
    std::sort(std::begin(cuts), std::end(cuts));
    std::uniform_int_distribution<std::size_t> socket(0, sockets - 1);
    return {socket(rng), cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1]};
}

inline ThreadPlacement random_placement(std::mt19937_64& rng, std::size_t sockets, std::size_t cores) {
    std::uniform_int_distribution<std::size_t> count(0, cores);
    std::vector<std::size_t> threads(sockets);
    do {
        for (auto& n : threads) n = count(rng);
    } while (std::all_of(threads.begin(), threads.end(), [](auto n) { return n == 0; }));
    return ThreadPlacement(MachineTopology{sockets, cores}, threads);
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() / ("numasig-test-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace numasig::testing
