#include "regwatch/fft_engine.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace regwatch::fft {

namespace {

int g_threads = 1;
bool g_threads_initialized = false;

struct Engine {
    explicit Engine(int n) : n(n) {
        const std::size_t np = std::size_t(n) * n * n;
        const std::size_t ns = std::size_t(n) * n * (n / 2 + 1);
        double* r = fftw_alloc_real(np);
        fftw_complex* c = fftw_alloc_complex(ns);
#ifdef REGWATCH_FFTW_THREADS
        fftw_plan_with_nthreads(g_threads);
#endif
        // FFTW_ESTIMATE keeps plan selection deterministic run-to-run, which the
        // bit-reproducibility contract needs.
        fwd = fftw_plan_dft_r2c_3d(n, n, n, r, c, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_3d(n, n, n, c, r, FFTW_ESTIMATE);
        fftw_free(r);
        fftw_free(c);
        if (!fwd || !bwd) throw std::runtime_error("fftw planning failed");
    }
    ~Engine() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }

    int n;
    fftw_plan fwd;
    fftw_plan bwd;
};

std::mutex g_mutex;
std::map<int, std::unique_ptr<Engine>> g_engines;

const Engine& engine_for(int n) {
    std::lock_guard<std::mutex> lock(g_mutex);
#ifdef REGWATCH_FFTW_THREADS
    if (!g_threads_initialized) {
        fftw_init_threads();
        g_threads_initialized = true;
    }
#else
    g_threads_initialized = true;
#endif
    auto it = g_engines.find(n);
    if (it == g_engines.end())
        it = g_engines.emplace(n, std::make_unique<Engine>(n)).first;
    return *it->second;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

} // namespace

void forward(int n, const double* phys, std::complex<double>* spec) {
    const Engine& e = engine_for(n);
    const std::size_t np = std::size_t(n) * n * n;
    const std::size_t ns = std::size_t(n) * n * (n / 2 + 1);
    // r2c leaves the input untouched, but the API takes a non-const pointer.
    fftw_execute_dft_r2c(e.fwd, const_cast<double*>(phys),
                         reinterpret_cast<fftw_complex*>(spec));
    const double scale = 1.0 / double(np);
    for (std::size_t i = 0; i < ns; ++i) spec[i] *= scale;
}

void backward(int n, const std::complex<double>* spec, double* phys) {
    const Engine& e = engine_for(n);
    const std::size_t ns = std::size_t(n) * n * (n / 2 + 1);
    // Multidimensional c2r clobbers its input, so run it on a scratch copy.
    static thread_local std::unique_ptr<fftw_complex, FftwDeleter> scratch;
    static thread_local std::size_t scratch_size = 0;
    if (scratch_size < ns) {
        scratch.reset(fftw_alloc_complex(ns));
        scratch_size = ns;
    }
    std::complex<double>* s = reinterpret_cast<std::complex<double>*>(scratch.get());
    for (std::size_t i = 0; i < ns; ++i) s[i] = spec[i];
    fftw_execute_dft_c2r(e.bwd, scratch.get(), phys);
}

void set_threads(int nthreads) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (nthreads < 1) throw std::invalid_argument("fft threads must be >= 1");
#ifdef REGWATCH_FFTW_THREADS
    g_threads = nthreads;
#else
    g_threads = 1;
#endif
}

int threads() { return g_threads; }

} // namespace regwatch::fft
