#include "chks/kernels.hpp"

#include "kernels_impl.hpp"

#include <atomic>

namespace chks::kernels {

namespace {

const Table kScalar{Isa::Scalar,       "scalar",          scalar::dot, scalar::axpy,
                    scalar::xpby,      scalar::laplacian, scalar::weightedLaplacian};

#ifdef CHKS_HAVE_AVX2
const Table kAvx2{Isa::Avx2,     "avx2",          avx2::dot, avx2::axpy,
                  avx2::xpby,    avx2::laplacian, avx2::weightedLaplacian};
#endif

const Table* initial() {
#ifdef CHKS_HAVE_AVX2
    if (cpuHasAvx2()) return &kAvx2;
#endif
    return &kScalar;
}

std::atomic<const Table*>& current() {
    static std::atomic<const Table*> table{initial()};
    return table;
}

} // namespace

const Table& scalarTable() { return kScalar; }

const Table* avx2Table() {
#ifdef CHKS_HAVE_AVX2
    return &kAvx2;
#else
    return nullptr;
#endif
}

bool cpuHasAvx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Table& active() { return *current().load(std::memory_order_acquire); }

Isa detect() { return initial()->isa; }

bool select(Isa isa) {
    if (isa == Isa::Scalar) {
        current().store(&kScalar, std::memory_order_release);
        return true;
    }
    const Table* t = avx2Table();
    if (!t || !cpuHasAvx2()) return false;
    current().store(t, std::memory_order_release);
    return true;
}

bool parseIsa(std::string_view name, Isa& out) {
    if (name == "scalar") {
        out = Isa::Scalar;
        return true;
    }
    if (name == "avx2") {
        out = Isa::Avx2;
        return true;
    }
    if (name == "auto") {
        out = detect();
        return true;
    }
    return false;
}

} // namespace chks::kernels
