#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../common/oracles.hpp"
#include "dislo/rng.hpp"

namespace testutil {

using namespace dislo;
using namespace oracles;

class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        std::string name = info ? std::string{info->test_suite_name()} + "." + info->name() : "dislo";
        for (auto& c : name)
            if (c == '/') c = '_';
        static int serial = 0;
        name += "_" + std::to_string(serial++);
        path_ = std::filesystem::temp_directory_path() / ("dislo_test_" + name);
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::uint64_t checksum(const std::string& bytes) { return fnv1a(bytes); }

}  // namespace testutil
