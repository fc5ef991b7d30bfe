#include "chipforge/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "chipforge/logging.hpp"

namespace chipforge::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend best_backend() {
#if defined(__aarch64__)
  return Backend::kNeon;
#else
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
#endif
}

Backend resolve_initial() {
  const char* env = std::getenv("CHIPFORGE_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
    if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::kAvx2))
      return Backend::kAvx2;
    if (std::strcmp(env, "neon") == 0 && backend_available(Backend::kNeon))
      return Backend::kNeon;
    CF_WARN("CHIPFORGE_KERNELS=%s not available, using default backend", env);
  }
  return best_backend();
}

// Not thread-safe; force_backend is a single-threaded testing hook.
Backend g_backend = resolve_initial();

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
      return cpu_has_avx2();
    case Backend::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("kernel backend not available on this CPU: " +
                                backend_name(b));
  switch (b) {
    case Backend::kScalar:
      return detail::kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::kAvx2:
      return detail::kAvx2Table;
#endif
#if defined(__aarch64__)
    case Backend::kNeon:
      return detail::kNeonTable;
#endif
    default:
      return detail::kScalarTable;
  }
}

const KernelTable& active() { return table_for(g_backend); }

Backend active_backend() { return g_backend; }

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "?";
}

void force_backend(Backend b) {
  (void)table_for(b);  // validates availability
  g_backend = b;
}

}  // namespace chipforge::kernels
