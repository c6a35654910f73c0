#include <atomic>
#include <cstdlib>
#include <string_view>

#include "tables.hpp"

namespace ratgraph::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(RATGRAPH_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_choice() {
  if (const char* env = std::getenv("RATGRAPH_SIMD")) {
    if (std::string_view(env) == "scalar") return &detail::scalar_kernels();
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &detail::scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return detail::scalar_kernels(); }

const KernelTable* avx2_table() {
#if defined(RATGRAPH_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  if (supported) return &detail::avx2_kernels();
#endif
  return nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) {
  const KernelTable* table = &detail::scalar_kernels();
  bool ok = true;
  if (isa == Isa::kAvx2) {
    table = avx2_table();
    if (table == nullptr) {
      table = &detail::scalar_kernels();
      ok = false;
    }
  }
  current().store(table, std::memory_order_release);
  return ok;
}

}  // namespace ratgraph::kernels
