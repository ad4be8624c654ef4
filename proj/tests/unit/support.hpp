#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "mmsarc/corpus.hpp"
#include "mmsarc/random.hpp"

namespace testing_support {

inline std::string data_path(const std::string& rel) { return std::string(MMSARC_DATA_DIR) + "/" + rel; }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("mmsarc-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline mmsarc::corpus::Post post(std::string id, std::string text, std::vector<std::string> images = {"img"},
                                 mmsarc::corpus::Label label = mmsarc::corpus::Label::Sarcastic,
                                 mmsarc::corpus::Platform platform = mmsarc::corpus::Platform::IG,
                                 std::vector<std::string> tags = {}) {
    return mmsarc::corpus::make_post(std::move(id), platform, std::move(text), tags, std::move(images), label);
}

}  // namespace testing_support
