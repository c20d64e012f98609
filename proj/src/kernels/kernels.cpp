#include "ofdmdet/kernels.hpp"

#include <cstdlib>
#include <string>

namespace ofdmdet::kernels {

#if defined(OFDMDET_HAVE_AVX2_TU)
extern const Ops avx2_ops; // kernels_avx2.cpp

static bool cpu_has_avx2() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

namespace {

struct Selection {
    const Ops* ops;
    std::string_view name;
};

Selection pick_default() {
#if defined(OFDMDET_HAVE_AVX2_TU)
    if (cpu_has_avx2()) return {&avx2_ops, "avx2"};
#endif
    return {&scalar_ops, "scalar"};
}

Selection initial_selection() {
    if (const char* env = std::getenv("OFDMDET_KERNELS")) {
        std::string_view want(env);
        if (const Ops* ops = by_name(want)) return {ops, want == "scalar" ? "scalar" : "avx2"};
    }
    return pick_default();
}

Selection& selection() {
    static Selection sel = initial_selection();
    return sel;
}

} // namespace

const Ops* by_name(std::string_view name) {
    if (name == "scalar") return &scalar_ops;
#if defined(OFDMDET_HAVE_AVX2_TU)
    if (name == "avx2" && cpu_has_avx2()) return &avx2_ops;
#endif
    return nullptr;
}

const Ops& active() { return *selection().ops; }

std::string_view active_name() { return selection().name; }

bool force(std::string_view name) {
    const Ops* ops = by_name(name);
    if (!ops) return false;
    selection() = {ops, name == "scalar" ? "scalar" : "avx2"};
    return true;
}

} // namespace ofdmdet::kernels
