#include "blockframe/parallel.hpp"

#include <atomic>

namespace blockframe {

namespace {

std::atomic<int>& workers() {
  static std::atomic<int> w{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
  return w;
}

}  // namespace

int worker_count() { return workers().load(); }

void set_worker_count(int n) { workers().store(std::max(1, n)); }

}  // namespace blockframe
