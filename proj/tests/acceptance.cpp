// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "secmatch/edge_secretary.hpp"
#include "secmatch/harness.hpp"
#include "secmatch/hypergraph_secretary.hpp"
#include "secmatch/ordinal.hpp"
#include "secmatch/vertex_secretary.hpp"

using namespace secmatch;
using boost::multiprecision::cpp_rational;

namespace {

// Tolerances.
constexpr double kIdentityTol = 1e-12;
constexpr double kTriangleSlack = 0.02;
constexpr double kUniformSigmas = 3.0;
constexpr double kMatchSigmas = 4.0;
constexpr double kWindowLo = 0.4125, kWindowHi = 0.4175;
constexpr std::size_t kLLo = 470, kLHi = 530;
constexpr double kMarginTol = -1e-12;
constexpr double kAcceptTol = 1e-12;
constexpr double kOracleAgreeTol = 1e-12;
constexpr double kFdTol = 1e-6;
constexpr double kFdStep = 1e-4;
constexpr double kMatchingTol = 1e-12;
constexpr std::uint64_t kSeed = 20240101;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;
    std::set<std::string> failures;

    void need(bool cond, const std::string& what) {
        if (!cond && failures.insert(what).second) {
            ok = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

std::string fix(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

double bound_d(std::size_t d) { return std::pow(double(d), -double(d) / double(d - 1)); }

// p(k,t) in exact arithmetic from p(k,k) = 0 and p(k,s) = 2/s + (s-3)/s p(k,s-1).
cpp_rational exact_p(std::size_t k, std::size_t t) {
    cpp_rational p(0);
    for (std::size_t s = k + 1; s <= t; ++s) {
        const cpp_rational ss(static_cast<long long>(s));
        p = cpp_rational(2) / ss + (ss - 3) / ss * p;
    }
    return p;
}

oracle::EdgeArrivalOracle reference(const EdgeInstance& inst) {
    std::vector<oracle::EdgeArrivalOracle::E> list;
    for (const auto& e : inst.edges()) list.push_back({e.edge.u, e.edge.v, e.weight});
    return oracle::EdgeArrivalOracle(list);
}

std::vector<Vertex> all_vertices(std::size_t n) {
    std::vector<Vertex> t(n);
    std::iota(t.begin(), t.end(), Vertex(0));
    return t;
}

void closed_forms(Outcome& o) {
    double p_err = 0.0;
    for (std::size_t k = 3; k <= 500; ++k)
        for (std::size_t t = k; t <= 500; ++t) p_err = std::max(p_err, std::abs(p_recursive(k, t) - p_closed(k, t)));
    double a_err = 0.0;
    for (std::size_t m = 1; m <= 10000; ++m) {
        const auto a = alpha_recursive(m);
        for (std::size_t t = m / 2 + 1; t <= m; ++t) a_err = std::max(a_err, std::abs(a.at(t) - alpha_closed(m, t)));
    }
    double h_err = 0.0;
    for (std::size_t d = 2; d <= 6; ++d)
        for (std::size_t m = 1; m <= 10000; ++m) {
            const auto a = hyper_alpha_recursive(m, d);
            for (std::size_t t = a.cutoff + 1; t <= m; ++t)
                h_err = std::max(h_err, std::abs(a.at(t) - hyper_alpha_closed(m, d, t)));
        }
    // Spot values against exact arithmetic.
    double x_err = 0.0;
    for (std::size_t k : {std::size_t{3}, std::size_t{10}, std::size_t{77}})
        for (std::size_t t : {k, k + 1, 2 * k, std::size_t{500}})
            x_err = std::max(x_err, std::abs(p_closed(k, t) - static_cast<double>(exact_p(k, t))));
    o.need(p_err <= kIdentityTol, "p");
    o.need(a_err <= kIdentityTol, "edge alpha");
    o.need(h_err <= kIdentityTol, "hyper alpha");
    o.need(x_err <= kIdentityTol, "exact p");
    o.detail << "max errors p " << sci(p_err) << ", edge alpha " << sci(a_err) << ", hyper alpha " << sci(h_err)
             << ", p vs exact " << sci(x_err);
}

void vertex_ratio(Outcome& o) {
    ExperimentConfig tri;
    tri.algorithm = Algorithm::vertex;
    tri.family.kind = FamilyKind::triangle;
    tri.family.aux = 1000;
    tri.trials = 100000;
    tri.seed = kSeed;
    const auto a = run_experiment(tri).estimate.ratio;
    o.need(a.mean >= 5.0 / 12.0 - kTriangleSlack, "triangle");

    ExperimentConfig uni;
    uni.algorithm = Algorithm::vertex;
    uni.family.kind = FamilyKind::uniform_complete;
    uni.family.n = 100;
    uni.trials = 10000;
    uni.seed = kSeed;
    const auto b = run_experiment(uni).estimate.ratio;
    o.need(b.mean >= 5.0 / 12.0 - kUniformSigmas * b.stderr, "uniform");
    o.detail << "triangle+1000 " << fix(a.mean) << " (se " << sci(a.stderr) << "), uniform n=100 " << fix(b.mean)
             << " (se " << sci(b.stderr) << "), floor 5/12=" << fix(5.0 / 12.0);
}

void match_probability(Outcome& o) {
    const double target = static_cast<double>(exact_p(10, 15));
    o.need(std::abs(p_closed(10, 15) - target) <= kIdentityTol, "closed form");
    InstanceFamily fam;
    fam.n = 20;
    const VertexInstance inst{generate_instance(fam, kSeed).graph};
    std::vector<Estimate> est;
    for (Vertex u : {Vertex{0}, Vertex{9}, Vertex{19}}) {
        est.push_back(estimate_match_probability(inst, 10, 15, u, 100000, kSeed + u));
        o.need(est.back().sigmas_from(target) <= kMatchSigmas, "vertex " + std::to_string(u));
    }
    for (std::size_t i = 0; i < est.size(); ++i)
        for (std::size_t j = i + 1; j < est.size(); ++j)
            o.need(std::abs(est[i].mean - est[j].mean) <= kMatchSigmas * std::hypot(est[i].stderr, est[j].stderr),
                   "probe independence");
    o.detail << "target " << fix(target) << "; vertices 0/9/19: " << fix(est[0].mean) << " " << fix(est[1].mean)
             << " " << fix(est[2].mean) << " (se " << sci(est[0].stderr) << ")";
}

void ordinal_ceiling(Outcome& o) {
    double excess = -1.0;
    std::size_t at = 0;
    for (std::size_t n = 10; n <= 10000; ++n) {
        const double e = optimal_threshold(n).value - (5.0 / 12.0 + 5.0 / double(n));
        if (at == 0 || e > excess) excess = e, at = n;
    }
    o.need(excess <= 0.0, "ceiling");
    const auto best = optimal_threshold(1000);
    o.need(best.value >= kWindowLo && best.value <= kWindowHi, "value window");
    o.need(best.l >= kLLo && best.l <= kLHi, "l window");
    // The threshold family's best equals the best over all 0/1 policies; the
    // latter is re-derived by permutation enumeration for n <= 7.
    std::size_t searched = 0;
    for (std::size_t n = 2; n <= 8; ++n) {
        const auto s = exhaustive_policy_search(n);
        o.need(s.threshold_maximizer, "threshold maximizer n=" + std::to_string(n));
        if (n > 7) continue;
        cpp_rational best_any(0), best_thr(0);
        for (std::uint32_t bits = 0; bits < (1u << (n - 1)); ++bits) {
            std::vector<cpp_rational> c(n + 1, cpp_rational(0));
            bool thr = true;
            for (std::size_t i = 2; i <= n; ++i) {
                c[i] = (bits >> (i - 2)) & 1u;
                if (i > 2 && c[i - 1] == 1 && c[i] == 0) thr = false;
            }
            const auto v = oracle::ordinal_success(n, c);
            best_any = std::max(best_any, v);
            if (thr) best_thr = std::max(best_thr, v);
            ++searched;
        }
        o.need(best_any == best_thr, "oracle threshold maximizer n=" + std::to_string(n));
        o.need(std::abs(static_cast<double>(best_any) - s.best_value_approx) <= kOracleAgreeTol,
               "search value n=" + std::to_string(n));
    }
    o.detail << "largest excess over 5/12+5/n " << sci(excess) << " at n=" << at << "; n=1000 l*=" << best.l
             << " value " << fix(best.value) << "; " << searched << " policies re-enumerated";
}

void edge_availability(Outcome& o) {
    double margin = 1.0, ref_margin = 1.0, acc = 0.0, ref_acc = 0.0, agree = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        const std::size_t m = 2 + i % 7;
        const auto inst = random_edge_instance(m, derive_seed(kSeed, i, Stream::instance));
        margin = std::min(margin, exact_edge_oracle(inst).availability_margin().min_margin);
        const auto ev = exact_edge_evaluation(inst);
        const auto ref = reference(inst).summarize();
        ref_margin = std::min(ref_margin, ref.min_margin);
        agree = std::max(agree, std::abs(ev.expected_value - ref.expected_value) / inst.optimum_weight());
        if (m <= 6) {
            acc = std::max(acc, ev.acceptance_error);
            ref_acc = std::max(ref_acc, ref.acceptance_error);
        }
    }
    o.need(margin >= kMarginTol, "dp margin");
    o.need(ref_margin >= kMarginTol, "enumerated margin");
    o.need(acc <= kAcceptTol && ref_acc <= kAcceptTol, "acceptance");
    o.need(agree <= kOracleAgreeTol, "value agreement");
    o.detail << "min x-alpha " << sci(margin) << " (enumeration " << sci(ref_margin) << "); acceptance error m<=6 "
             << sci(std::max(acc, ref_acc)) << "; engine vs enumeration " << sci(agree);
}

void edge_quarter(Outcome& o) {
    double ratio = 10.0;
    for (std::size_t i = 0; i < 100; ++i) {
        const std::size_t m = 4 + i % 5;
        const auto inst = random_edge_instance(m, derive_seed(kSeed, 1000 + i, Stream::instance));
        const double opt = oracle::max_matching(inst.graph(), all_vertices(inst.graph().size())).first;
        ratio = std::min(ratio, exact_edge_evaluation(inst).expected_value / opt);
    }
    o.need(ratio >= 0.25, "instances");
    double coef = 1.0;
    std::size_t at = 0;
    for (std::size_t m = 4; m <= 1000000; ++m) {
        const double c = edge_telescoping_coefficient(m);
        if (c < coef) coef = c, at = m;
    }
    o.need(coef > 0.25, "coefficient");
    o.detail << "min E[ALG]/OPT " << fix(ratio) << " over 100 instances; min coefficient " << fix(coef) << " at m=" << at;
}

void hyper_coefficient_and_embedding(Outcome& o) {
    double slack = 1.0;
    for (std::size_t d = 2; d <= 6; ++d)
        for (std::size_t m = 20; m <= 10000; ++m) slack = std::min(slack, hyper_coefficient(m, d) - bound_d(d));
    o.need(slack >= 0.0, "coefficient");
    std::size_t steps = 0;
    bool same = true;
    for (std::size_t i = 0; i < 30; ++i) {
        const auto inst = random_edge_instance(2 + i % 7, derive_seed(kSeed, 2000 + i, Stream::instance));
        const auto h = embed_edge_instance(inst);
        same = same && exact_edge_evaluation(inst).expected_value == exact_hyper_evaluation(h).expected_value;
        auto edp = exact_edge_oracle(inst);
        ContentionDP hdp(hyper_model(h));
        for (std::uint64_t k = 0; k < 10; ++k) {
            Rng ord = make_rng(kSeed + k, i, Stream::order);
            const auto order = random_permutation<std::size_t>(inst.m(), ord);
            Rng c1 = make_rng(kSeed + k, i, Stream::coins), c2 = make_rng(kSeed + k, i, Stream::coins);
            const auto a = run_edge_algorithm(inst, order, edp, c1);
            const auto b = run_hypergraph_algorithm(h, order, hdp, c2);
            same = same && a.weight == b.matching.weight && a.detail.steps.size() == b.detail.steps.size();
            for (std::size_t s = 0; same && s < a.detail.steps.size(); ++s) {
                const auto& x = a.detail.steps[s];
                const auto& y = b.detail.steps[s];
                same = x.item == y.item && x.x == y.x && x.probability == y.probability && x.accepted == y.accepted;
                ++steps;
            }
        }
    }
    o.need(same, "embedding");
    o.detail << "min slack over d^(-d/(d-1)) " << sci(slack) << "; embedding identical on 30 instances, " << steps
             << " steps";
}

std::vector<double> random_c(std::size_t n, std::uint64_t stream) {
    Rng rng = make_rng(kSeed, stream, Stream::inner);
    std::vector<double> c(n + 1, 0.0);
    for (std::size_t i = 2; i <= n; ++i) c[i] = uniform01(rng);
    return c;
}

void gradient_structure(Outcome& o) {
    double fd = 0.0;
    for (std::size_t k = 0; k < 100; ++k) {
        OrdinalPolicy p{30, random_c(30, k)};
        const auto g = gradient(p);
        for (std::size_t i = 2; i <= 30; ++i) {
            auto c = p.c;
            c[i] += kFdStep;
            const double up = objective_sum_t<double>(30, c);
            c[i] -= 2 * kFdStep;
            const double down = objective_sum_t<double>(30, c);
            fd = std::max(fd, std::abs((up - down) / (2 * kFdStep) - g[i]));
        }
    }
    o.need(fd <= kFdTol, "finite differences");
    std::size_t nonpos = 0, violations = 0;
    for (std::size_t k = 0; k < 1000; ++k) {
        const auto g = gradient(OrdinalPolicy{50, random_c(50, 1000 + k)});
        for (std::size_t i = 3; i <= 50; ++i)
            if (g[i] <= 0.0) {
                ++nonpos;
                if (!(g[i - 1] < 0.0)) ++violations;
            }
    }
    o.need(violations == 0, "sign propagation");
    o.detail << "max |fd - gradient| " << sci(fd) << "; " << violations << " violations over " << nonpos
             << " nonpositive derivatives";
}

void oracle_equivalences(Outcome& o) {
    std::size_t policies = 0;
    for (std::size_t n = 2; n <= 6; ++n)
        for (std::size_t k = 0; k < 12; ++k) {
            std::vector<cpp_rational> c(n + 1, cpp_rational(0));
            Rng rng = make_rng(kSeed, 100 * n + k, Stream::coins);
            for (std::size_t i = 2; i <= n; ++i)
                c[i] = cpp_rational(static_cast<long long>(uniform_index(rng, 0, 6)), 6);
            o.need(objective_t<cpp_rational>(n, std::span<const cpp_rational>(c)) == oracle::ordinal_success(n, c),
                   "objective n=" + std::to_string(n));
            ++policies;
        }

    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng = make_rng(kSeed, s, Stream::instance);
        const std::size_t n = 12;
        WeightedGraph g(n);
        const double density = s % 2 ? 1.0 : 0.4;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (uniform01(rng) < density) g.set_weight(u, v, s % 5 == 0 ? double(uniform_index(rng, 1, 3)) : uniform01(rng));
        const auto perm = random_permutation<Vertex>(n, rng);
        const std::vector<Vertex> t(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, 0, 10)));
        const double got = matching_weight(max_weight_matching(g, VertexSubset(t)), g);
        worst = std::max(worst, std::abs(got - oracle::max_matching(g, t).first));
    }
    o.need(worst <= kMatchingTol, "matching");

    std::size_t subsets = 0;
    for (std::size_t n = 2; n <= 6; ++n)
        for (std::uint64_t s = 0; s < 5; ++s) {
            Rng rng = make_rng(kSeed, 10 * n + s, Stream::order);
            const auto perm = random_permutation<std::uint32_t>(n, rng);
            std::vector<std::uint32_t> values(n);
            for (std::size_t i = 0; i < n; ++i) values[i] = perm[i] + 1;
            for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                std::vector<Vertex> subset;
                for (Vertex v = 0; v < n; ++v)
                    if (mask >> v & 1u) subset.push_back(v);
                if (subset.size() % 2) continue;
                std::vector<std::pair<Vertex, Vertex>> got;
                const auto mu = hard_instance_matching(values, subset);
                for (auto e : mu.edges()) got.emplace_back(e.u, e.v);
                o.need(got == oracle::hard_instance_brute_force(values, subset), "hard instance");
                ++subsets;
            }
        }
    o.detail << policies << " policies exact; matching max error " << sci(worst) << " on 100 sets; " << subsets
             << " hard-instance subsets";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"closed-form identities", closed_forms},
        {"vertex arrival ratio floors", vertex_ratio},
        {"match probability at n=20, k=10, t=15", match_probability},
        {"ordinal ceiling and threshold optimality", ordinal_ceiling},
        {"edge availability and acceptance", edge_availability},
        {"edge arrival quarter guarantee", edge_quarter},
        {"hypergraph coefficient and d=2 embedding", hyper_coefficient_and_embedding},
        {"gradient and sign structure", gradient_structure},
        {"oracle equivalences", oracle_equivalences},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %zu: %s | %s | %.1f s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
        failed += o.ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
