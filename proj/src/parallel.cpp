#include "plab/parallel.hpp"

namespace plab {

namespace {
int g_threads = 0;  // 0: leave it to the OpenMP runtime
}

void set_thread_count(int n) { g_threads = n < 0 ? 0 : n; }

int thread_count() { return g_threads; }

}  // namespace plab
