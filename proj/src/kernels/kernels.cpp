#include "actis/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace actis::kern {

const Ops& scalar_ops();
#ifdef ACTIS_HAVE_AVX2_SOURCES
const Ops& avx2_ops();
#endif

namespace {

bool cpu_has_avx2_fma() {
#if defined(ACTIS_HAVE_AVX2_SOURCES) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend resolve_initial() {
  const char* env = std::getenv("ACTIS_KERNELS");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return Backend::Scalar;
  if (choice == "avx2" && backend_available(Backend::Avx2)) return Backend::Avx2;
  // auto (and unknown values)
  return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

Backend& active() {
  static Backend b = resolve_initial();
  return b;
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return cpu_has_avx2_fma();
  }
  return false;
}

const Ops* backend_table(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &scalar_ops();
    case Backend::Avx2:
#ifdef ACTIS_HAVE_AVX2_SOURCES
      if (cpu_has_avx2_fma()) return &avx2_ops();
#endif
      return nullptr;
  }
  return nullptr;
}

const Ops& ops() { return *backend_table(active()); }

Backend active_backend() { return active(); }

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "?";
}

void force_backend(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error("kernel backend unavailable: " + backend_name(b));
  active() = b;
}

}  // namespace actis::kern
