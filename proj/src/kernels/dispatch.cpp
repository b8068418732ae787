#include <cstdlib>
#include <cstring>
#include <mutex>

#include "internal.hpp"
#include "mbg/util.hpp"

namespace mbg::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Variant select_variant() {
  const char* env = std::getenv("MBG_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return Variant::scalar;
  if (env && std::strcmp(env, "avx2") == 0) {
    if (!avx2_available()) fail("MBG_KERNELS=avx2 but the CPU lacks AVX2/FMA");
    return Variant::avx2;
  }
  if (env && std::strcmp(env, "auto") != 0 && *env != '\0')
    fail(std::string("unknown MBG_KERNELS value: ") + env);
  return avx2_available() ? Variant::avx2 : Variant::scalar;
}

Variant active_variant() {
  static const Variant v = select_variant();
  return v;
}

}  // namespace

template <>
const Table<float>& variant<float>(Variant v) {
  if (v == Variant::avx2) {
    if (!avx2_available()) fail("AVX2 kernels unavailable on this CPU");
    return detail::kAvx2F;
  }
  return detail::kScalarF;
}

template <>
const Table<double>& variant<double>(Variant v) {
  if (v == Variant::avx2) {
    if (!avx2_available()) fail("AVX2 kernels unavailable on this CPU");
    return detail::kAvx2D;
  }
  return detail::kScalarD;
}

template <>
const Table<float>& active<float>() {
  return variant<float>(active_variant());
}

template <>
const Table<double>& active<double>() {
  return variant<double>(active_variant());
}

const char* active_name() { return active<float>().name; }

}  // namespace mbg::kernels
