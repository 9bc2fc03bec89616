#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "agb/boosters.hpp"
#include "agb/harness.hpp"
#include "agb/oracles.hpp"
#include "agb/weak_learners.hpp"
#include "agb/wht.hpp"

namespace fs = std::filesystem;
using agb::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

void dump_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

/// foo.json -> foo.<tag>.json; anything else -> path.<tag>.json
std::string sidecar_path(const std::string& out, const std::string& tag) {
    fs::path p(out);
    if (p.extension() == ".json") {
        fs::path q = p;
        q.replace_extension("");
        return q.string() + "." + tag + ".json";
    }
    return out + "." + tag + ".json";
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenCli {
    std::string family, out, mask, noise, instance_path;
    uint64_t n = 0, depth = 0, terms = 0, width = 0, w = 0, seed = 0;
    double eta = 0.0;
    CLI::Option *on = nullptr, *oeta = nullptr, *onoise = nullptr, *omask = nullptr,
                *odepth = nullptr, *oterms = nullptr, *owidth = nullptr, *ow = nullptr,
                *oinstance = nullptr;
};

int run_gen(const GenCli& g) {
    json params = json::object();
    if (g.on->count()) params["n"] = g.n;
    if (g.oeta->count()) params["eta"] = g.eta;
    if (g.onoise->count()) params["noise"] = g.noise;
    if (g.omask->count()) params["mask"] = g.mask;
    if (g.odepth->count()) params["depth"] = g.depth;
    if (g.oterms->count()) params["terms"] = g.terms;
    if (g.owidth->count()) params["width"] = g.width;
    if (g.ow->count()) params["w"] = g.w;
    if (g.oinstance->count()) params["instance"] = load_json(g.instance_path);

    agb::GenOutput out = agb::gen_instance(g.family, params, g.seed);
    if (fs::path(g.out).has_parent_path()) fs::create_directories(fs::path(g.out).parent_path());
    dump_json(g.out, out.instance);
    std::printf("instance: %s\n", g.out.c_str());
    if (out.formula) {
        std::string fp = sidecar_path(g.out, "dnf");
        dump_json(fp, *out.formula);
        std::printf("formula:  %s\n", fp.c_str());
    }
    if (out.metadata) {
        std::string mp = sidecar_path(g.out, "meta");
        dump_json(mp, *out.metadata);
        std::printf("metadata: %s\n", mp.c_str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunCli {
    std::string spec_path, mode, out;
    uint64_t seed = 0;
    unsigned jobs = 1;
    CLI::Option *oseed = nullptr, *omode = nullptr, *oout = nullptr;
};

int run_run(const RunCli& rc) {
    json root = load_json(rc.spec_path);
    std::vector<json> raw = root.is_array() ? std::vector<json>(root.begin(), root.end())
                                            : std::vector<json>{root};
    if (raw.empty()) throw std::runtime_error("spec file contains no experiments");

    struct Slot {
        bool done = false;
        bool pass = false;
        std::string line;
    };
    std::vector<Slot> slots(raw.size());
    std::atomic<size_t> next{0};
    std::mutex mu;

    auto out_dir_for = [&](const agb::ExperimentSpec& s, size_t i) -> std::string {
        if (rc.oout->count()) {
            if (raw.size() == 1) return rc.out;
            return (fs::path(rc.out) / ("run-" + std::to_string(i))).string();
        }
        if (!s.out_dir.empty()) return s.out_dir;
        return (fs::path("agb-runs") / ("run-" + std::to_string(i))).string();
    };

    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= raw.size()) break;
            Slot slot;
            try {
                json j = raw[i];
                if (rc.oseed->count()) j["seed"] = rc.seed;
                if (rc.omode->count()) j["mode"] = rc.mode;
                agb::ExperimentSpec spec = agb::spec_from_json(j);
                std::string dir = out_dir_for(spec, i);
                agb::Report rep = agb::run_experiment_to_dir(spec, dir);
                char buf[512];
                std::snprintf(buf, sizeof buf,
                              "[%zu] %-9s %-7s stop=%-14s err=%.6f bound=%.6f %s out=%s "
                              "(%.0f ms)",
                              i, rep.algorithm.c_str(), rep.mode.c_str(), rep.stop.c_str(),
                              rep.final_error, rep.bound, rep.pass ? "PASS" : "FAIL",
                              dir.c_str(), rep.wall_ms);
                slot.pass = rep.pass;
                slot.line = buf;
            } catch (const std::exception& e) {
                slot.pass = false;
                slot.line = "[" + std::to_string(i) + "] ERROR " + e.what();
            }
            slot.done = true;
            std::lock_guard<std::mutex> lock(mu);
            slots[i] = std::move(slot);
        }
    };

    unsigned jobs = std::max(1u, rc.jobs);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    bool all = true;
    for (const Slot& s : slots) {
        std::printf("%s\n", s.line.c_str());
        all = all && s.pass;
    }
    std::printf("%s (%zu/%zu guarantees hold)\n", all ? "ALL PASS" : "SOME FAILED",
                static_cast<size_t>(std::count_if(slots.begin(), slots.end(),
                                                  [](const Slot& s) { return s.pass; })),
                raw.size());
    return all ? 0 : 1;
}

// ---------------------------------------------------------------------------
// opt
// ---------------------------------------------------------------------------

int run_opt(const std::string& inst_path, const std::string& cls, bool allow_large) {
    agb::ExampleDistribution a = agb::instance_from_json(load_json(inst_path));
    agb::BaselineReport b = agb::opt_baseline(a, cls, allow_large);
    json j;
    j["delta"] = b.delta;
    j["argmin"] = b.argmin;
    j["class_size"] = b.class_size;
    j["runtime_ms"] = b.wall_ms;
    std::printf("%s\n", j.dump(2).c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

int run_bench() {
    using clock = std::chrono::steady_clock;
    auto report = [](const char* name, double ms, const char* unit) {
        std::printf("%-28s %10.3f ms/%s\n", name, ms, unit);
    };

    {  // transform throughput
        const int n = 16;
        std::vector<double> v(uint64_t{1} << n);
        agb::CounterRng rng(7, 1);
        for (double& x : v) x = rng.next_pm1(0.5);
        auto t0 = clock::now();
        int reps = 20;
        for (int r = 0; r < reps; ++r) {
            std::vector<double> w = v;
            agb::wht_inplace(w);
        }
        report("wht n=16", ms_since(t0) / reps, "transform");
    }
    {  // exhaustive parity optimum
        json inst = agb::gen_instance("random-boolean", {{"n", 14}}, 3).instance;
        agb::ExampleDistribution a = agb::instance_from_json(inst);
        auto t0 = clock::now();
        int reps = 10;
        for (int r = 0; r < reps; ++r)
            agb::exact_opt(a, agb::ConceptClass::all_parities(a.n()));
        report("exact_opt parities n=14", ms_since(t0) / reps, "scan");
    }
    {  // full boosting run
        json inst =
            agb::gen_instance("noisy-parity", {{"n", 10}, {"eta", 0.1}}, 11).instance;
        agb::ExampleDistribution a = agb::instance_from_json(inst);
        agb::WeakLearnerHandle weak =
            agb::exhaustive_weak(agb::ConceptClass::all_parities(a.n()), 0.05, 0.05);
        agb::BoostParams bp;
        bp.alpha = bp.gamma = bp.epsilon = 0.05;
        auto t0 = clock::now();
        agb::BoostResult r = agb::a2boost(a, weak, bp, 1);
        char label[64];
        std::snprintf(label, sizeof label, "a2boost n=10 (%llu rounds)",
                      static_cast<unsigned long long>(r.rounds));
        report(label, ms_since(t0), "run");
    }
    {  // heavy-coefficient search
        json inst =
            agb::gen_instance("noisy-parity", {{"n", 12}, {"eta", 0.05}}, 5).instance;
        agb::ExampleDistribution a = agb::instance_from_json(inst);
        agb::KmConfig cfg;
        cfg.theta = 0.25;
        auto t0 = clock::now();
        agb::KmOutcome out = agb::km_search(a.phi(), cfg, 17);
        char label[64];
        std::snprintf(label, sizeof label, "km_search n=12 (%zu found)", out.coeffs.size());
        report(label, ms_since(t0), "search");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agnostic boosting workbench"};
    app.require_subcommand(1);

    GenCli g;
    CLI::App* gen = app.add_subcommand("gen", "generate an instance file (plus sidecars)");
    gen->add_option("--family", g.family,
                    "noisy-parity | noisy-tree | dnf | threshold-of-parities | "
                    "random-boolean | explicit")
        ->required();
    gen->add_option("--out", g.out, "output instance path")->required();
    g.on = gen->add_option("--n", g.n, "domain bits");
    g.oeta = gen->add_option("--eta", g.eta, "noise rate");
    g.onoise = gen->add_option("--noise", g.noise, "scale | flip");
    g.omask = gen->add_option("--mask", g.mask, "planted parity mask (hex)");
    g.odepth = gen->add_option("--depth", g.depth, "tree depth");
    g.oterms = gen->add_option("--terms", g.terms, "DNF term count");
    g.owidth = gen->add_option("--width", g.width, "DNF term width");
    g.ow = gen->add_option("--w", g.w, "parity count for threshold-of-parities");
    g.oinstance = gen->add_option("--instance", g.instance_path,
                                  "instance file to validate (family 'explicit')");
    gen->add_option("--seed", g.seed, "generator seed");

    RunCli rc;
    CLI::App* run = app.add_subcommand("run", "execute experiment spec(s)");
    run->add_option("--spec", rc.spec_path, "spec file (object or array)")->required();
    rc.oseed = run->add_option("--seed", rc.seed, "override every spec's seed");
    rc.omode = run->add_option("--mode", rc.mode, "override mode: exact | sampled")
                   ->check(CLI::IsMember({"exact", "sampled"}));
    rc.oout = run->add_option("--out", rc.out, "output directory (per-run subdirs for arrays)");
    run->add_option("--jobs", rc.jobs, "parallel runs");

    std::string opt_instance, opt_class = "parities";
    bool opt_allow_large = false;
    CLI::App* opt = app.add_subcommand("opt", "exact class optimum for an instance");
    opt->add_option("--instance", opt_instance, "instance file")->required();
    opt->add_option("--class", opt_class, "parities | trees:<leaves> | conjunctions:<width>");
    opt->add_flag("--allow-large", opt_allow_large, "scan past the class-size budget");

    CLI::App* bench = app.add_subcommand("bench", "built-in micro benchmarks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(gen)) return run_gen(g);
        if (app.got_subcommand(run)) return run_run(rc);
        if (app.got_subcommand(opt)) return run_opt(opt_instance, opt_class, opt_allow_large);
        if (app.got_subcommand(bench)) return run_bench();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
