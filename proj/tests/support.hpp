#pragma once

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sentinel/models/labeled_matrix.hpp"

namespace testing_support {

inline std::filesystem::path source_dir() { return SENTINEL_SOURCE_DIR; }
inline std::filesystem::path demo(const std::string& f) { return source_dir() / "data/demo" / f; }
inline std::filesystem::path sample(const std::string& f) { return source_dir() / "data/samples" / f; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sentinel-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& f) const { return path_ / f; }

 private:
  std::filesystem::path path_;
};

/// httplib server on an ephemeral loopback port, running on its own thread.
class LocalServer {
 public:
  LocalServer() = default;
  httplib::Server& server() { return server_; }

  int start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }
  ~LocalServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

/// Random dataset with integer-ish features so ties and duplicates occur.
inline sentinel::models::LabeledMatrix random_matrix(std::mt19937_64& g, std::size_t n, std::size_t d, int classes,
                                                     int value_range = 5) {
  std::uniform_int_distribution<int> v(0, value_range), c(0, classes - 1);
  std::vector<double> x(n * d);
  std::vector<int> y(n);
  for (auto& e : x) e = v(g);
  for (auto& e : y) e = c(g);
  return {n, d, std::move(x), std::move(y), {}, classes};
}

}  // namespace testing_support
