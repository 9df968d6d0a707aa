#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace pbda::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace

const Ops* avx2_ops() {
    static const Ops* table = [] {
        const Ops* t = detail::avx2_table();
        return (t != nullptr && cpu_has_avx2()) ? t : nullptr;
    }();
    return table;
}

const Ops& active_ops() {
    static const Ops* selected = [] {
        if (const char* env = std::getenv("PBDA_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
            if (std::strcmp(env, "avx2") == 0 && avx2_ops() != nullptr)
                return avx2_ops();
        }
        return avx2_ops() != nullptr ? avx2_ops() : &scalar_ops();
    }();
    return *selected;
}

std::vector<const Ops*> available_ops() {
    std::vector<const Ops*> out{&scalar_ops()};
    if (avx2_ops() != nullptr) out.push_back(avx2_ops());
    return out;
}

}  // namespace pbda::kernels
