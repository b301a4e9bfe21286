// Timing comparison of the serial and OpenMP execution paths of the
// cell-wise kernels (projection, norms, estimator assembly).  Both paths
// reduce in index order, so the results must agree bitwise; the benchmark
// checks that while reporting speedups.
#include "dgb/est_linear.hpp"
#include "dgb/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

using namespace dgb;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& body, int reps) {
    body(); // warm-up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i)
        body();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double omp_ms, double a, double b) {
    std::printf("%-22s serial %8.2f ms   openmp %8.2f ms   speedup %5.2fx   %s\n", name,
                serial_ms, omp_ms, serial_ms / omp_ms,
                a == b ? "bitwise-equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int n0 = argc > 1 ? std::atoi(argv[1]) : 48;
    const int p = argc > 2 ? std::atoi(argv[2]) : 2;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 5;

    ProblemData pd;
    pd.domain = Rect{0.0, 0.0, 1.0, 1.0};
    pd.eps = 0.1;
    pd.a = [](Pt, double) { return Pt{1.0, 0.5}; };
    pd.f = [](Pt x, double) { return std::sin(7.0 * x.x) * std::cos(5.0 * x.y); };

    auto mesh = std::make_shared<const Mesh>(pd.domain, n0, n0);
    auto space = std::make_shared<const DGSpace>(mesh, p);
    std::printf("mesh %dx%d, degree %d, %d dofs, %d repetitions\n\n", n0, n0, p,
                space->n_dofs(), reps);

    DGFunction u;
    double r_serial = 0.0, r_omp = 0.0;
    auto run = [&](Exec e, double& result, const std::function<double()>& body) {
        set_default_exec(e);
        return time_ms([&]() { result = body(); }, reps);
    };

    auto project = [&]() {
        u = l2_project(space, [&](Pt x) { return pd.f(x, 0.0); }, p + 3);
        return u.coef.sum();
    };
    const double p_s = run(Exec::Serial, r_serial, project);
    const double p_o = run(Exec::OpenMP, r_omp, project);
    report("l2_project", p_s, p_o, r_serial, r_omp);

    const double n_s = run(Exec::Serial, r_serial, [&]() { return energy_norm(u, pd.eps, 0.0); });
    const double n_o = run(Exec::OpenMP, r_omp, [&]() { return energy_norm(u, pd.eps, 0.0); });
    report("energy_norm", n_s, n_o, r_serial, r_omp);

    auto estimate = [&]() { return elliptic_estimator(u, pd, 0.0).total_sq; };
    const double e_s = run(Exec::Serial, r_serial, estimate);
    const double e_o = run(Exec::OpenMP, r_omp, estimate);
    report("elliptic_estimator", e_s, e_o, r_serial, r_omp);

    set_default_exec(Exec::Serial);
    return 0;
}
