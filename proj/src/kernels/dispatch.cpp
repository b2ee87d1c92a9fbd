#include <cstdlib>
#include <string>

#include "blockframe/log.hpp"
#include "kernels_internal.hpp"

namespace blockframe::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, detail::gram_scalar, detail::logdet_shifted_scalar,
                                 detail::abs2_scalar};
  return table;
}

namespace {

const KernelTable* avx2_table() {
#ifdef BLOCKFRAME_HAVE_AVX2
  static const KernelTable table{Isa::Avx2, detail::gram_avx2, detail::logdet_shifted_avx2,
                                 detail::abs2_avx2};
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  if (__builtin_cpu_supports("avx2")) return &table;
#endif
#endif
  return nullptr;
}

const KernelTable& select_kernels() {
  const KernelTable* avx2 = avx2_table();
  if (const char* forced = std::getenv("BLOCKFRAME_ISA")) {
    const std::string want(forced);
    if (want == "scalar") return scalar_kernels();
    if (want == "avx2") {
      if (avx2 != nullptr) return *avx2;
      warn("BLOCKFRAME_ISA=avx2 requested but AVX2 is unavailable; using scalar kernels");
      return scalar_kernels();
    }
    warn("unknown BLOCKFRAME_ISA value '" + want + "'; ignoring");
  }
  return avx2 != nullptr ? *avx2 : scalar_kernels();
}

}  // namespace

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> tables{&scalar_kernels()};
  if (const KernelTable* avx2 = avx2_table()) tables.push_back(avx2);
  return tables;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select_kernels();
  return table;
}

}  // namespace blockframe::kernels
