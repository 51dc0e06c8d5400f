// Compares the OpenMP kernels against their serial reference on large
// inputs. The two must agree bit for bit; the table reports the speedup.
#include "cvqkd/kernels.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <span>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const std::string& name, double serial_s, double parallel_s, bool exact) {
    std::printf("%-24s %10.1f ms %10.1f ms %8.2fx   %s\n", name.c_str(), serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s, exact ? "bit-exact" : "MISMATCH");
}

} // namespace

int main() {
    const std::size_t n = std::size_t{1} << 24;
    const int repeats = 3;
#ifdef _OPENMP
    std::printf("n = %zu, OpenMP threads = %d\n\n", n, omp_get_max_threads());
#else
    std::printf("n = %zu, OpenMP disabled\n\n", n);
#endif
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    std::vector<double> par(n), ser(n);
    const double t_fill_ser =
        best_of(repeats, [&] { cvqkd::fill_gaussian_serial(ser, 1.0, 42); });
    const double t_fill_par = best_of(repeats, [&] { cvqkd::fill_gaussian(par, 1.0, 42); });
    report("fill_gaussian", t_fill_ser, t_fill_par, par == ser);

    double acc_ser = 0.0, acc_par = 0.0;
    const double t_sum_ser = best_of(repeats, [&] { acc_ser = cvqkd::blocked_sum_serial(par); });
    const double t_sum_par = best_of(repeats, [&] { acc_par = cvqkd::blocked_sum(par); });
    report("blocked_sum", t_sum_ser, t_sum_par, acc_ser == acc_par);

    const std::vector<double> other = cvqkd::sample_gaussian(4.0, n, 43);
    const double t_dot_ser =
        best_of(repeats, [&] { acc_ser = cvqkd::blocked_dot_serial(par, other); });
    const double t_dot_par = best_of(repeats, [&] { acc_par = cvqkd::blocked_dot(par, other); });
    report("blocked_dot", t_dot_ser, t_dot_par, acc_ser == acc_par);

    const std::span<const double> predictors[] = {par};
    const double coeff[] = {0.5};
    const double t_res_ser = best_of(repeats, [&] {
        acc_ser = cvqkd::blocked_residual_sumsq_serial(other, predictors, coeff);
    });
    const double t_res_par = best_of(repeats, [&] {
        acc_par = cvqkd::blocked_residual_sumsq(other, predictors, coeff);
    });
    report("blocked_residual_sumsq", t_res_ser, t_res_par, acc_ser == acc_par);
    return 0;
}
