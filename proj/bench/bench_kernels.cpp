// Serial reference loop versus the OpenMP loop for each Monte Carlo kernel.
// Both must agree bit for bit; the table reports wall time and speedup.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "secmatch/harness.hpp"
#include "secmatch/ordinal.hpp"
#include "secmatch/parallel.hpp"
#include "secmatch/vertex_secretary.hpp"

using namespace secmatch;

namespace {

struct Kernel {
    std::string name;
    std::function<double(Execution)> run;  // returns the estimate
};

double seconds(const std::function<double(Execution)>& fn, Execution exec, double& value, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        value = fn(exec);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, s);
    }
    return best;
}

ExperimentConfig config(Algorithm a, FamilyKind f, std::size_t n, std::size_t trials) {
    ExperimentConfig c;
    c.algorithm = a;
    c.family.kind = f;
    c.family.n = n;
    c.trials = trials;
    c.seed = 2024;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial versus OpenMP timing of the trial kernels"};
    double scale = 1.0;
    int reps = 3;
    app.add_option("--scale", scale, "multiplier on every trial count");
    app.add_option("--reps", reps, "repetitions; the fastest is reported");
    CLI11_PARSE(app, argc, argv);

    auto trials = [&](std::size_t base) { return std::max<std::size_t>(1, static_cast<std::size_t>(base * scale)); };

    std::vector<Kernel> kernels;
    kernels.push_back({"vertex uniform-complete n=60", [&](Execution e) {
                           auto c = config(Algorithm::vertex, FamilyKind::uniform_complete, 60, trials(400));
                           c.exec = e;
                           return run_experiment(c).row.mean_ratio;
                       }});
    kernels.push_back({"vertex triangle aux=500", [&](Execution e) {
                           auto c = config(Algorithm::vertex, FamilyKind::triangle, 3, trials(2000));
                           c.family.aux = 500;
                           c.exec = e;
                           return run_experiment(c).row.mean_ratio;
                       }});
    kernels.push_back({"edge sparse-random n=10 exact", [&](Execution e) {
                           auto c = config(Algorithm::edge, FamilyKind::sparse_random, 10, trials(20000));
                           c.family.density = 0.25;
                           c.exec = e;
                           return run_experiment(c).row.mean_ratio;
                       }});
    kernels.push_back({"edge sparse-random n=8 nested mc", [&](Execution e) {
                           auto c = config(Algorithm::edge, FamilyKind::sparse_random, 8, trials(40));
                           c.family.density = 0.3;
                           c.oracle = OracleMode::mc;
                           c.inner_trials = 40;
                           c.exec = e;
                           return run_experiment(c).row.mean_ratio;
                       }});
    kernels.push_back({"hypergraph random m=12 d=3", [&](Execution e) {
                           auto c = config(Algorithm::hypergraph, FamilyKind::hypergraph_random, 12, trials(20000));
                           c.family.d = 3;
                           c.exec = e;
                           return run_experiment(c).row.mean_ratio;
                       }});
    kernels.push_back({"ordinal threshold n=2000", [&](Execution e) {
                           return simulate_ordinal(OrdinalPolicy::threshold(2000, 1000), trials(20000), 7, e)
                               .success.mean;
                       }});
    kernels.push_back({"match probability n=20 k=10 t=15", [&](Execution e) {
                           InstanceFamily f;
                           f.n = 20;
                           const VertexInstance inst{generate_instance(f, 3).graph};
                           return estimate_match_probability(inst, 10, 15, 0, trials(5000), 11, e).mean;
                       }});

    std::printf("threads: %d\n", worker_threads());
    std::printf("%-36s %12s %12s %8s %s\n", "kernel", "serial_s", "parallel_s", "speedup", "identical");
    bool all_same = true;
    for (const auto& k : kernels) {
        double vs = 0.0, vp = 0.0;
        const double ts = seconds(k.run, Execution::serial, vs, reps);
        const double tp = seconds(k.run, Execution::parallel, vp, reps);
        const bool same = vs == vp;
        all_same = all_same && same;
        std::printf("%-36s %12.4f %12.4f %8.2f %s\n", k.name.c_str(), ts, tp, ts / tp, same ? "yes" : "NO");
    }
    return all_same ? 0 : 2;
}
