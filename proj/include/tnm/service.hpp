#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "tnm/scenario.hpp"

namespace tnm {

// HTTP/JSON facade over one project: model editing with optimistic version
// tokens and asynchronous scenario runs on a worker pool. Routes are listed
// in docs/openapi.yaml.
class ApiService {
 public:
  struct Options {
    std::size_t workers = 2;
    // Completed run logs kept in memory; older ones answer 410.
    std::size_t retained_runs = 16;
  };

  explicit ApiService(Project project);
  ApiService(Project project, Options options);
  ~ApiService();

  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  // False when the address cannot be bound (for example, port in use).
  bool bind(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1.
  int bind_any(const std::string& host);
  // Serves on the bound socket until stop().
  void listen();
  void stop();

  Project snapshot() const;
  std::uint64_t version() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tnm
