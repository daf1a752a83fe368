#ifndef GCSPEC_PARALLEL_HPP
#define GCSPEC_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace gcspec {

// Execution policy for replicate/trial loops. Serial is the reference
// path; Parallel runs the same work units under OpenMP. Work units must
// be independent and write only to their own index slot, so both
// policies produce identical results.
enum class Exec { Serial, Parallel };

// Worker count: GCSPEC_THREADS env var if set, else the OpenMP default.
int max_threads();

void set_max_threads(int n);

// Runs body(i) for i in [0, n). Under Exec::Parallel the iterations are
// distributed over OpenMP threads; nested calls degrade to serial.
void parallel_for(std::size_t n, Exec policy, const std::function<void(std::size_t)>& body);

} // namespace gcspec

#endif
