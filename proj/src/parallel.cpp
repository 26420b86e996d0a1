#include "chns/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace chns {

namespace {
std::atomic<int> g_override{0};

int env_threads() {
  if (const char* env = std::getenv("CHNS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}
}  // namespace

int thread_count() {
  const int o = g_override.load();
  if (o > 0) return o;
  static const int from_env = env_threads();
  return from_env;
}

void set_thread_count(int n) { g_override.store(std::max(0, n)); }

}  // namespace chns
