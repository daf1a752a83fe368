#include "gcspec/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace gcspec {

namespace {

int env_thread_override()
{
    const char* raw = std::getenv("GCSPEC_THREADS");
    if (!raw) return 0;
    const int n = std::atoi(raw);
    return n > 0 ? n : 0;
}

int& thread_setting()
{
    static int value = env_thread_override();
    return value;
}

} // namespace

int max_threads()
{
    const int setting = thread_setting();
    return setting > 0 ? setting : omp_get_max_threads();
}

void set_max_threads(int n)
{
    thread_setting() = n > 0 ? n : 0;
}

void parallel_for(std::size_t n, Exec policy, const std::function<void(std::size_t)>& body)
{
    if (policy == Exec::Serial || omp_in_parallel() || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    const int threads = max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
}

} // namespace gcspec
