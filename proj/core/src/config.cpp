#include "unplab/config.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "unplab/types.hpp"

namespace unplab {

namespace {

std::size_t read_env_cap() {
  const char* raw = std::getenv("UNPLAB_MAX_DIM");
  if (raw == nullptr || *raw == '\0') return default_max_dimension;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || value == 0) return default_max_dimension;
  return static_cast<std::size_t>(value);
}

std::atomic<std::size_t>& cap_storage() {
  static std::atomic<std::size_t> cap{read_env_cap()};
  return cap;
}

}  // namespace

std::size_t product(const Dims& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

std::size_t max_dimension() { return cap_storage().load(std::memory_order_relaxed); }

void set_max_dimension(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("dimension cap must be positive");
  cap_storage().store(dim, std::memory_order_relaxed);
}

void check_dimension(std::size_t dim, const char* what) {
  const auto cap = max_dimension();
  if (dim > cap) {
    throw CapacityError(std::string(what) + ": dimension " + std::to_string(dim) +
                        " exceeds cap " + std::to_string(cap) +
                        " (raise UNPLAB_MAX_DIM to allow it)");
  }
}

}  // namespace unplab
