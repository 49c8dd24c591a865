#pragma once

#include <filesystem>
#include <string>

#include "n2c/rng.hpp"

namespace testutil {

// Fresh scratch directory per test binary run, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        base_ = std::filesystem::temp_directory_path() /
                ("n2c_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(base_);
        std::filesystem::create_directories(base_);
    }
    ~TempDir() { std::filesystem::remove_all(base_); }
    const std::filesystem::path& path() const { return base_; }

private:
    std::filesystem::path base_;
};

inline n2c::Rng test_rng(std::uint64_t salt) {
    return n2c::Rng(n2c::seed_for(0x5eed, n2c::SeedDomain::kTest, salt));
}

}  // namespace testutil
