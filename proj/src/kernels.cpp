#include "cpca/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace cpca::kern {

const Ops& avx2_ops();

namespace {

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool avx2_usable() {
  // avx2_ops() falls back to the scalar table when the TU was built
  // without AVX2 codegen; treat that as unavailable.
  return cpu_has_avx2() && std::string(avx2_ops().name) == "avx2";
}

const Ops* pick(const std::string& name) {
  if (name == "scalar") return &scalar_ops();
  if (name == "avx2") {
    if (!avx2_usable()) throw std::runtime_error("kernels: avx2 not supported on this machine");
    return &avx2_ops();
  }
  throw std::runtime_error("kernels: unknown variant '" + name + "'");
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* init_active() {
  if (const char* env = std::getenv("CPCA_KERNELS")) {
    return pick(env);
  }
  return avx2_usable() ? &avx2_ops() : &scalar_ops();
}

}  // namespace

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) {
    ops = init_active();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

void force(const std::string& name) {
  g_active.store(pick(name), std::memory_order_release);
}

std::vector<std::string> available() {
  std::vector<std::string> out = {"scalar"};
  if (avx2_usable()) out.push_back("avx2");
  return out;
}

}  // namespace cpca::kern
