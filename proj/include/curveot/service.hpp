#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace curveot {

/// REST facade over the pipeline. Datasets and finished jobs are persisted
/// under data_dir, so a restarted service still answers for earlier ids.
class Service {
 public:
  struct Options {
    std::filesystem::path data_dir = "curveot-data";
    std::optional<std::filesystem::path> static_dir;
    unsigned workers = 2;
    unsigned pair_jobs = 1;
    std::size_t queue_capacity = 64;
    std::size_t max_curves = 200;
    std::size_t max_points = 5000;
  };

  explicit Service(Options options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void serve();
  void stop();
  /// Blocks until every queued and running job has finished.
  void drain();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "host:port", ":port" or "port". Throws InvalidConfig.
std::pair<std::string, int> parse_address(const std::string& text);

}  // namespace curveot
