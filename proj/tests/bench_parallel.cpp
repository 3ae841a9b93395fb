// Benchmark of the OpenMP kernels against their serial reference paths.
// Asserts bitwise-identical results, then reports timings.

#include <chrono>
#include <cstdio>
#include <vector>

#include "ineq/bootstrap.hpp"
#include "ineq/calib.hpp"
#include "ineq/parallel.hpp"
#include "ineq/scenarios.hpp"

using namespace ineq;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void check(bool ok, const char* what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what);
    if (!ok) ++failures;
}

} // namespace

int main() {
    std::printf("threads available: %d\n", max_threads());

    const model::MomentVector targets;
    const model::FixedEnv env;
    calib::CalibConfig cfg;
    cfg.de_population = 60;
    cfg.de_generations = 300;
    const calib::Objective f = [&](const std::array<double, 5>& x) {
        return calib::msm_objective(x, targets, env, cfg.bounds);
    };

    {
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = calib::differential_evolution(f, cfg.bounds, cfg.de_population,
                                                          cfg.de_generations, cfg.de_mutation,
                                                          cfg.de_crossover, cfg.seed, true);
        const double ts = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const auto parallel = calib::differential_evolution(f, cfg.bounds, cfg.de_population,
                                                            cfg.de_generations, cfg.de_mutation,
                                                            cfg.de_crossover, cfg.seed, false);
        const double tp = seconds_since(t0);

        check(serial.x == parallel.x && serial.fx == parallel.fx,
              "differential evolution: serial and OpenMP results identical");
        std::printf("  de evaluation      serial %.3fs  openmp %.3fs  speedup %.2fx\n", ts, tp,
                    ts / tp);
    }

    {
        scenarios::SweepSpec spec;
        spec.param = scenarios::SweepParam::GiniK;
        spec.base = model::StructuralParams{};
        spec.env = env;
        for (int i = 0; i < 4000; ++i) spec.grid.push_back(0.21 + 0.77 * i / 3999.0);

        set_threads(1);
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = scenarios::run_sweep(spec);
        const double ts = seconds_since(t0);

        set_threads(0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = scenarios::run_sweep(spec);
        const double tp = seconds_since(t0);

        bool same = serial.rows.size() == parallel.rows.size();
        for (std::size_t i = 0; same && i < serial.rows.size(); ++i)
            same = serial.rows[i].delta_gini == parallel.rows[i].delta_gini;
        check(same, "scenario sweep: single-thread and OpenMP results identical");
        std::printf("  sweep (4000 pts)   serial %.3fs  openmp %.3fs  speedup %.2fx\n", ts, tp,
                    ts / tp);
    }

    {
        bootstrap::BootstrapConfig bs;
        bs.b = 40;
        calib::CalibConfig cheap = cfg;
        cheap.de_population = 30;
        cheap.de_generations = 60;
        cheap.nm_starts = 4;

        set_threads(1);
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = bootstrap::bootstrap_standard(targets, env, cheap, bs);
        const double ts = seconds_since(t0);

        set_threads(0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = bootstrap::bootstrap_standard(targets, env, cheap, bs);
        const double tp = seconds_since(t0);

        check(bootstrap::replications_csv(serial) == bootstrap::replications_csv(parallel),
              "bootstrap replications: single-thread and OpenMP results identical");
        std::printf("  bootstrap (B=40)   serial %.3fs  openmp %.3fs  speedup %.2fx\n", ts, tp,
                    ts / tp);
    }

    return failures == 0 ? 0 : 1;
}
