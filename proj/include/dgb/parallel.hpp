#pragma once

#include <cstdlib>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dgb {

/// Execution mode for the cell-wise kernels.  The OpenMP path computes each
/// item into a preallocated slot and reduces in index order afterwards, so
/// both modes produce bitwise-identical sums.
enum class Exec { Serial, OpenMP };

/// Process-wide default, settable via the DGB_THREADS environment variable
/// (0 or unset = serial) or set_default_exec().
Exec default_exec();
void set_default_exec(Exec e);

/// Evaluate f(i) for i in [0, n) and return the values in index order.
template <class F>
std::vector<double> map_indexed(int n, F&& f, Exec exec) {
    std::vector<double> out(static_cast<std::size_t>(n));
#ifdef _OPENMP
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
#endif
    (void)exec;
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
}

/// Deterministic sum-reduction of f(i) over i in [0, n): the per-item values
/// are materialised and summed in index order regardless of thread count.
template <class F>
double sum_indexed(int n, F&& f, Exec exec) {
    std::vector<double> vals = map_indexed(n, std::forward<F>(f), exec);
    double s = 0.0;
    for (double v : vals) s += v;
    return s;
}

template <class F>
double sum_indexed(int n, F&& f) {
    return sum_indexed(n, std::forward<F>(f), default_exec());
}

/// Max-reduction analogue of sum_indexed.
template <class F>
double max_indexed(int n, F&& f, Exec exec) {
    std::vector<double> vals = map_indexed(n, std::forward<F>(f), exec);
    double m = 0.0;
    for (double v : vals) m = v > m ? v : m;
    return m;
}

template <class F>
double max_indexed(int n, F&& f) {
    return max_indexed(n, std::forward<F>(f), default_exec());
}

} // namespace dgb
