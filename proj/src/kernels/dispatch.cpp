#include "csl/kernels/dispatch.hpp"

namespace csl::kern {

#if !defined(CSL_HAVE_AVX2_BACKEND)
const Backend* avx2_backend() { return nullptr; }
#endif

namespace {
const Backend* g_active = nullptr;

const Backend& pick_automatic() {
    if (const Backend* v = avx2_backend()) return *v;
    return scalar_backend();
}
}  // namespace

const Backend& select_backend(BackendKind kind) {
    switch (kind) {
        case BackendKind::scalar:
            g_active = &scalar_backend();
            break;
        case BackendKind::avx2:
            g_active = avx2_backend() ? avx2_backend() : &scalar_backend();
            break;
        case BackendKind::automatic:
            g_active = &pick_automatic();
            break;
    }
    return *g_active;
}

const Backend& active() {
    if (!g_active) g_active = &pick_automatic();
    return *g_active;
}

}  // namespace csl::kern
