#include "agb/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "agb/applications.hpp"
#include "agb/hardcore.hpp"
#include "agb/oracles.hpp"
#include "agb/rng.hpp"
#include "agb/weak_learners.hpp"

namespace agb {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

double num_param(const json& p, const char* key, const char* where) {
    if (!p.contains(key)) fail(std::string(where) + ": missing required parameter '" + key + "'");
    const json& v = p.at(key);
    if (!v.is_number()) fail(std::string(where) + ": parameter '" + key + "' must be a number");
    return v.get<double>();
}

double num_param_or(const json& p, const char* key, double def, const char* where) {
    if (!p.contains(key)) return def;
    return num_param(p, key, where);
}

uint64_t uint_param_or(const json& p, const char* key, uint64_t def, const char* where) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    // Accept signed storage too: documents built in C++ hold literals as
    // signed integers even when non-negative.
    bool ok = v.is_number_unsigned() ||
              (v.is_number_integer() && v.get<int64_t>() >= 0);
    if (!ok)
        fail(std::string(where) + ": parameter '" + key + "' must be a non-negative integer");
    return v.get<uint64_t>();
}

std::string str_param_or(const json& p, const char* key, const std::string& def,
                         const char* where) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_string()) fail(std::string(where) + ": parameter '" + key + "' must be a string");
    return v.get<std::string>();
}

void check_unit(double x, double lo, double hi, const char* key, const char* where) {
    if (!(x > lo && x <= hi)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: parameter '%s' = %g must lie in (%g, %g]", where,
                      key, x, lo, hi);
        fail(buf);
    }
}

int get_n(const json& p, const char* where) {
    if (!p.contains("n")) fail(std::string(where) + ": missing required parameter 'n'");
    const json& v = p.at("n");
    if (!v.is_number_integer()) fail(std::string(where) + ": 'n' must be an integer");
    long long n = v.get<long long>();
    if (n < 1 || n > kMaxDomainBits)
        fail(std::string(where) + ": 'n' must lie in [1, " + std::to_string(kMaxDomainBits) +
             "]");
    return static_cast<int>(n);
}

/// Seeded k-subset of [0, size) as a membership bitset.
std::vector<uint64_t> pick_subset(uint64_t size, uint64_t k, CounterRng& rng) {
    if (k > size) fail("subset larger than the domain");
    std::vector<uint64_t> words((size + 63) / 64, 0);
    uint64_t chosen = 0;
    while (chosen < k) {
        uint64_t x = rng.next_below(size);
        uint64_t& w = words[x >> 6];
        uint64_t bit = uint64_t{1} << (x & 63);
        if (w & bit) continue;
        w |= bit;
        ++chosen;
    }
    return words;
}

struct NoisyLabels {
    BoundedFn phi;
    uint64_t flipped = 0;
};

/** Applies the noise model to clean ±1 labels: "scale" multiplies the label
 *  mean by (1 - 2*eta); "flip" negates the labels on a seeded subset of
 *  round(eta * |X|) points (keeping them boolean). */
NoisyLabels apply_noise(int n, const std::vector<double>& clean, double eta,
                        const std::string& noise, CounterRng& rng, const char* where) {
    Domain dom(n);
    NoisyLabels out;
    if (noise == "scale") {
        if (eta == 0.0) {
            out.phi = BoundedFn::boolean_from_pm1(n, clean);
            return out;
        }
        std::vector<double> t(clean);
        for (double& v : t) v *= (1.0 - 2.0 * eta);
        out.phi = BoundedFn::dense(n, std::move(t));
        return out;
    }
    if (noise == "flip") {
        uint64_t k = static_cast<uint64_t>(std::llround(eta * static_cast<double>(dom.size())));
        std::vector<uint64_t> set = pick_subset(dom.size(), k, rng);
        std::vector<double> t(clean);
        for (uint64_t x = 0; x < dom.size(); ++x)
            if ((set[x >> 6] >> (x & 63)) & 1) t[x] = -t[x];
        out.phi = BoundedFn::boolean_from_pm1(n, t);
        out.flipped = k;
        return out;
    }
    fail(std::string(where) + ": unknown noise model '" + noise + "' (scale | flip)");
}

DecisionTree random_full_tree(int n, int depth, CounterRng& rng) {
    DecisionTree t;
    t.n = n;
    // Pre-order construction: a node draws its variable (or leaf sign) before
    // its children so the shape is a pure function of the draw sequence.
    std::function<int(int)> build = [&](int d) -> int {
        int idx = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        if (d == 0) {
            t.nodes[idx].leaf = rng.next_pm1(0.5);
            return idx;
        }
        t.nodes[idx].var = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        int l = build(d - 1);
        int r = build(d - 1);
        t.nodes[idx].left = l;
        t.nodes[idx].right = r;
        return idx;
    };
    t.root = build(depth);
    return t;
}

// ---------------------------------------------------------------------------
// Spec validation helpers.
// ---------------------------------------------------------------------------

const std::unordered_set<std::string> kAlgorithms = {
    "a2boost", "aboost", "aboostdi", "learn-dt", "learn-dnf", "th-pac", "hardcore"};

const std::unordered_set<std::string> kWeakKinds = {"exhaustive", "throttled", "parity-dense",
                                                    "parity-query"};

void validate_class_format(const std::string& s, const char* where) {
    if (s == "parities") return;
    for (const char* prefix : {"trees:", "conjunctions:"}) {
        if (s.rfind(prefix, 0) == 0) {
            std::string tail = s.substr(std::string(prefix).size());
            if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
                fail(std::string(where) + ": malformed class spec '" + s + "'");
            return;
        }
    }
    fail(std::string(where) + ": unknown class spec '" + s +
         "' (parities | trees:<leaves> | conjunctions:<width>)");
}

void validate_params(const ExperimentSpec& s) {
    const json& p = s.params;
    const std::string& algo = s.algorithm;
    const char* where = algo.c_str();

    if (algo == "a2boost" || algo == "aboost" || algo == "aboostdi") {
        reject_unknown_fields(
            p, {"alpha", "gamma", "epsilon", "delta", "weak", "class", "target_error"}, where);
        double alpha = num_param(p, "alpha", where);
        double gamma = num_param(p, "gamma", where);
        double eps = num_param(p, "epsilon", where);
        double delta = num_param_or(p, "delta", 0.05, where);
        check_unit(alpha, 0.0, 0.5, "alpha", where);
        check_unit(gamma, 0.0, 0.5, "gamma", where);
        check_unit(eps, 0.0, 0.5, "epsilon", where);
        if (!(delta > 0.0 && delta < 1.0)) fail(std::string(where) + ": delta must lie in (0,1)");
        if (gamma > alpha)
            fail(std::string(where) + ": gamma exceeds alpha — no learner can promise more "
                                      "advantage than its detection threshold");
        if (algo == "aboostdi" && alpha >= 0.5)
            fail("aboostdi: alpha must be < 1/2 (the guarantee divides by 1 - 2*alpha)");
        std::string weak = str_param_or(p, "weak", "exhaustive", where);
        if (!kWeakKinds.count(weak))
            fail(std::string(where) + ": unknown weak learner '" + weak + "'");
        validate_class_format(str_param_or(p, "class", "parities", where), where);
        if (p.contains("target_error")) {
            double t = num_param(p, "target_error", where);
            if (!(t >= 0.0 && t <= 1.0))
                fail(std::string(where) + ": target_error must lie in [0,1]");
        }
        return;
    }
    if (algo == "learn-dt") {
        reject_unknown_fields(p, {"s", "epsilon", "delta", "access", "query_budget", "baseline"},
                              where);
        uint64_t sz = uint_param_or(p, "s", 0, where);
        if (!p.contains("s") || sz < 1) fail("learn-dt: 's' (competing leaf count) must be >= 1");
        check_unit(num_param(p, "epsilon", where), 0.0, 0.5, "epsilon", where);
        double delta = num_param_or(p, "delta", 0.05, where);
        if (!(delta > 0.0 && delta < 1.0)) fail("learn-dt: delta must lie in (0,1)");
        std::string access = str_param_or(p, "access", "dense", where);
        if (access != "dense" && access != "query")
            fail("learn-dt: access must be 'dense' or 'query'");
        if (p.contains("baseline") && !p.at("baseline").is_number()) {
            if (!(p.at("baseline").is_string() && p.at("baseline") == "exact"))
                fail("learn-dt: baseline must be a disagreement value or \"exact\"");
        }
        return;
    }
    if (algo == "learn-dnf") {
        reject_unknown_fields(p, {"w", "epsilon", "delta", "access", "query_budget", "dnf"},
                              where);
        if (!s.instance.is_null())
            fail("learn-dnf: the formula defines the instance; leave 'instance' unset");
        if (!p.contains("dnf")) fail("learn-dnf: missing required parameter 'dnf'");
        if (!p.at("dnf").is_object() && !p.at("dnf").is_string())
            fail("learn-dnf: 'dnf' must be a formula object or a file path");
        if (p.contains("w") && uint_param_or(p, "w", 0, where) < 1)
            fail("learn-dnf: 'w' must be >= 1");
        check_unit(num_param(p, "epsilon", where), 0.0, 0.5, "epsilon", where);
        double delta = num_param_or(p, "delta", 0.05, where);
        if (!(delta > 0.0 && delta < 1.0)) fail("learn-dnf: delta must lie in (0,1)");
        std::string access = str_param_or(p, "access", "dense", where);
        if (access != "dense" && access != "query")
            fail("learn-dnf: access must be 'dense' or 'query'");
        return;
    }
    if (algo == "th-pac") {
        reject_unknown_fields(p, {"w", "epsilon", "delta", "weak", "class", "round_budget"},
                              where);
        if (uint_param_or(p, "w", 0, where) < 1 || !p.contains("w"))
            fail("th-pac: 'w' (threshold width promise) must be >= 1");
        check_unit(num_param(p, "epsilon", where), 0.0, 0.5, "epsilon", where);
        double delta = num_param_or(p, "delta", 0.05, where);
        if (!(delta > 0.0 && delta < 1.0)) fail("th-pac: delta must lie in (0,1)");
        std::string weak = str_param_or(p, "weak", "parity-dense", where);
        if (weak != "parity-dense" && weak != "exhaustive")
            fail("th-pac: weak must be 'parity-dense' or 'exhaustive'");
        validate_class_format(str_param_or(p, "class", "parities", where), where);
        return;
    }
    if (algo == "hardcore") {
        reject_unknown_fields(p, {"gamma", "epsilon", "lambda", "class", "set"}, where);
        double gamma = num_param(p, "gamma", where);
        double eps = num_param(p, "epsilon", where);
        if (!(gamma > 0.0 && gamma < 0.5)) fail("hardcore: gamma must lie in (0, 1/2)");
        check_unit(eps, 0.0, 0.5, "epsilon", where);
        if (!p.contains("lambda")) fail("hardcore: missing required parameter 'lambda'");
        const json& l = p.at("lambda");
        if (l.is_number()) {
            double v = l.get<double>();
            if (!(v >= 0.0 && v <= 0.5)) fail("hardcore: lambda must lie in [0, 1/2]");
        } else if (!(l.is_string() && l == "opt")) {
            fail("hardcore: lambda must be a number or \"opt\"");
        }
        if (p.contains("set") && !p.at("set").is_boolean())
            fail("hardcore: 'set' must be a boolean");
        validate_class_format(str_param_or(p, "class", "parities", where), where);
        if (s.mode == "sampled") fail("hardcore: the construction is exact-only");
        return;
    }
    fail("unknown algorithm '" + algo + "'");
}

// ---------------------------------------------------------------------------
// Run helpers.
// ---------------------------------------------------------------------------

ExampleDistribution resolve_instance(const ExperimentSpec& spec) {
    json inst = spec.instance;
    if (inst.is_string()) inst = read_json_file(inst.get<std::string>());
    if (!inst.is_object()) fail("instance must be a JSON object or a file path");
    if (inst.contains("generator")) {
        reject_unknown_fields(inst, {"generator"}, "instance");
        const json& g = inst.at("generator");
        reject_unknown_fields(g, {"family", "params", "seed"}, "instance generator");
        if (!g.contains("family") || !g.at("family").is_string())
            fail("instance generator: missing 'family'");
        uint64_t seed = uint_param_or(g, "seed", spec.seed, "instance generator");
        json params = g.contains("params") ? g.at("params") : json::object();
        return instance_from_json(
            gen_instance(g.at("family").get<std::string>(), params, seed).instance);
    }
    return instance_from_json(inst);
}

BoostMode resolve_mode(const std::string& requested, int n, std::string& out_name) {
    if (requested == "sampled") {
        out_name = "sampled";
        return BoostMode::Sampled;
    }
    if (requested == "exact") {
        if (n > dense_cap())
            fail("exact mode is unavailable at n = " + std::to_string(n) +
                 " (dense cap " + std::to_string(dense_cap()) +
                 "; raise AGB_DENSE_CAP to override)");
        out_name = "exact";
        return BoostMode::Exact;
    }
    if (n <= dense_cap()) {
        out_name = "exact";
        return BoostMode::Exact;
    }
    out_name = "sampled";
    return BoostMode::Sampled;
}

WeakLearnerHandle build_weak(const std::string& kind, const std::string& cls, double alpha,
                             double gamma, int n,
                             const std::shared_ptr<QueryCounter>& counter) {
    if (kind == "exhaustive") return exhaustive_weak(parse_class_spec(cls, n), alpha, gamma);
    if (kind == "throttled") return throttled_weak(parse_class_spec(cls, n), alpha, gamma);
    if (kind == "parity-dense") {
        WeakLearnerHandle h = parity_weak_dense(0.75 * gamma);
        h.alpha = alpha;
        h.gamma = gamma;
        return h;
    }
    if (kind == "parity-query") {
        KmWeakConfig kc;
        kc.gamma = gamma;
        kc.alpha = alpha;
        kc.shared_counter = counter;
        return km_parity_weak(kc);
    }
    fail("unknown weak learner '" + kind + "'");
}

double wall_ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

int dense_cap() {
    static const int cap = [] {
        const char* env = std::getenv("AGB_DENSE_CAP");
        int c = 16;
        if (env && *env) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end == env || *end != '\0')
                throw std::runtime_error("AGB_DENSE_CAP must be an integer");
            c = static_cast<int>(v);
        }
        return std::clamp(c, 1, kMaxDomainBits);
    }();
    return cap;
}

GenOutput gen_instance(const std::string& family, const json& params, uint64_t seed) {
    GenOutput out;
    json meta;
    meta["family"] = family;
    meta["seed"] = seed;

    if (family == "noisy-parity") {
        reject_unknown_fields(params, {"n", "mask", "eta", "noise"}, "noisy-parity");
        int n = get_n(params, "noisy-parity");
        double eta = num_param(params, "eta", "noisy-parity");
        if (!(eta >= 0.0 && eta <= 0.5)) fail("noisy-parity: eta must lie in [0, 1/2]");
        std::string noise = str_param_or(params, "noise", "scale", "noisy-parity");
        Domain dom(n);
        CounterRng rng(seed, derive_stream(seed, {0x9E0, 0}));
        uint64_t mask;
        if (params.contains("mask")) {
            mask = parse_mask(params.at("mask").get<std::string>());
            if (mask >= dom.size()) fail("noisy-parity: mask uses bits beyond n");
        } else {
            mask = 1 + rng.next_below(dom.size() - 1);
        }
        std::vector<double> clean(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x)
            clean[x] = (std::popcount(x & mask) & 1) ? -1.0 : +1.0;
        CounterRng noise_rng(seed, derive_stream(seed, {0x9E0, 1}));
        NoisyLabels lab = apply_noise(n, clean, eta, noise, noise_rng, "noisy-parity");
        out.instance =
            instance_to_json(ExampleDistribution(BaseDistribution::uniform(n), lab.phi));
        meta["mask"] = mask_hex(mask);
        meta["eta"] = eta;
        meta["noise"] = noise;
        if (noise == "flip") meta["flipped"] = lab.flipped;
        out.metadata = meta;
        return out;
    }

    if (family == "noisy-tree") {
        reject_unknown_fields(params, {"n", "depth", "eta", "noise"}, "noisy-tree");
        int n = get_n(params, "noisy-tree");
        uint64_t depth = uint_param_or(params, "depth", 4, "noisy-tree");
        if (depth > 12) fail("noisy-tree: depth must be <= 12");
        double eta = num_param_or(params, "eta", 0.0, "noisy-tree");
        if (!(eta >= 0.0 && eta <= 0.5)) fail("noisy-tree: eta must lie in [0, 1/2]");
        std::string noise = str_param_or(params, "noise", "flip", "noisy-tree");
        CounterRng rng(seed, derive_stream(seed, {0x9E0, 2}));
        DecisionTree t = random_full_tree(n, static_cast<int>(depth), rng);
        Domain dom(n);
        std::vector<double> clean(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x) clean[x] = t.eval(x);
        CounterRng noise_rng(seed, derive_stream(seed, {0x9E0, 1}));
        NoisyLabels lab = apply_noise(n, clean, eta, noise, noise_rng, "noisy-tree");
        out.instance =
            instance_to_json(ExampleDistribution(BaseDistribution::uniform(n), lab.phi));
        meta["depth"] = depth;
        meta["leaves"] = t.leaf_count();
        meta["eta"] = eta;
        meta["noise"] = noise;
        if (noise == "flip") meta["flipped"] = lab.flipped;
        meta["tree"] = tree_to_json(t);
        out.metadata = meta;
        return out;
    }

    if (family == "dnf") {
        reject_unknown_fields(params, {"n", "terms", "width"}, "dnf");
        int n = get_n(params, "dnf");
        uint64_t terms = uint_param_or(params, "terms", 4, "dnf");
        uint64_t width = uint_param_or(params, "width", 3, "dnf");
        if (terms < 1) fail("dnf: terms must be >= 1");
        if (width < 1 || width > static_cast<uint64_t>(n))
            fail("dnf: width must lie in [1, n]");
        CounterRng rng(seed, derive_stream(seed, {0x9E0, 3}));
        DnfFormula f;
        f.n = n;
        for (uint64_t t = 0; t < terms; ++t) {
            DnfTerm term;
            uint64_t used = 0;
            for (uint64_t j = 0; j < width; ++j) {
                uint64_t var;
                do {
                    var = rng.next_below(static_cast<uint64_t>(n));
                } while ((used >> var) & 1);
                used |= uint64_t{1} << var;
                if (rng.next_pm1(0.5) > 0)
                    term.pos_mask |= uint64_t{1} << var;
                else
                    term.neg_mask |= uint64_t{1} << var;
            }
            f.terms.push_back(term);
        }
        out.instance =
            instance_to_json(ExampleDistribution(BaseDistribution::uniform(n), f.to_fn()));
        out.formula = dnf_to_json(f);
        meta["terms"] = terms;
        meta["width"] = width;
        out.metadata = meta;
        return out;
    }

    if (family == "threshold-of-parities") {
        reject_unknown_fields(params, {"n", "w"}, "threshold-of-parities");
        int n = get_n(params, "threshold-of-parities");
        uint64_t w = uint_param_or(params, "w", 3, "threshold-of-parities");
        Domain dom(n);
        if (w < 1 || w >= dom.size()) fail("threshold-of-parities: w must lie in [1, 2^n)");
        CounterRng rng(seed, derive_stream(seed, {0x9E0, 4}));
        std::vector<uint64_t> masks;
        uint64_t guard = 0;
        while (masks.size() < w) {
            uint64_t m = 1 + rng.next_below(dom.size() - 1);
            if (std::find(masks.begin(), masks.end(), m) != masks.end()) {
                if (++guard > 64 * w) fail("threshold-of-parities: cannot draw distinct masks");
                continue;
            }
            masks.push_back(m);
        }
        ThresholdOfClass th;
        th.n = n;
        for (uint64_t m : masks) th.terms.push_back(BoundedFn::parity(n, m, +1));
        std::vector<double> t(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x) t[x] = th.eval(x);
        out.instance = instance_to_json(ExampleDistribution(
            BaseDistribution::uniform(n), BoundedFn::boolean_from_pm1(n, t)));
        json jm = json::array();
        for (uint64_t m : masks) jm.push_back(mask_hex(m));
        meta["w"] = w;
        meta["masks"] = jm;
        out.metadata = meta;
        return out;
    }

    if (family == "random-boolean") {
        reject_unknown_fields(params, {"n"}, "random-boolean");
        int n = get_n(params, "random-boolean");
        Domain dom(n);
        CounterRng rng(seed, derive_stream(seed, {0x9E0, 5}));
        std::vector<double> t(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x) t[x] = rng.next_pm1(0.5);
        out.instance = instance_to_json(ExampleDistribution(
            BaseDistribution::uniform(n), BoundedFn::boolean_from_pm1(n, t)));
        out.metadata = meta;
        return out;
    }

    if (family == "explicit") {
        reject_unknown_fields(params, {"instance"}, "explicit");
        if (!params.contains("instance")) fail("explicit: missing 'instance'");
        // Round-trip through the parser: validates, then re-emits canonically.
        out.instance = instance_to_json(instance_from_json(params.at("instance")));
        out.metadata = meta;
        return out;
    }

    fail("unknown family '" + family +
         "' (noisy-parity | noisy-tree | dnf | threshold-of-parities | random-boolean | "
         "explicit)");
}

ExperimentSpec spec_from_json(const json& j) {
    reject_unknown_fields(j, {"algorithm", "instance", "params", "seed", "mode", "out"},
                          "experiment spec");
    ExperimentSpec s;
    if (!j.contains("algorithm") || !j.at("algorithm").is_string())
        fail("experiment spec: missing 'algorithm'");
    s.algorithm = j.at("algorithm").get<std::string>();
    if (!kAlgorithms.count(s.algorithm))
        fail("experiment spec: unknown algorithm '" + s.algorithm + "'");
    s.instance = j.contains("instance") ? j.at("instance") : json(nullptr);
    if (!s.instance.is_null() && !s.instance.is_string() && !s.instance.is_object())
        fail("experiment spec: 'instance' must be an object or a file path");
    if (s.instance.is_null() && s.algorithm != "learn-dnf")
        fail("experiment spec: 'instance' is required for " + s.algorithm);
    if (j.contains("params")) {
        if (!j.at("params").is_object()) fail("experiment spec: 'params' must be an object");
        s.params = j.at("params");
    } else {
        s.params = json::object();
    }
    if (j.contains("seed")) {
        const json& sv = j.at("seed");
        bool ok = sv.is_number_unsigned() ||
                  (sv.is_number_integer() && sv.get<int64_t>() >= 0);
        if (!ok) fail("experiment spec: 'seed' must be a non-negative integer");
        s.seed = sv.get<uint64_t>();
    }
    if (j.contains("mode")) {
        if (!j.at("mode").is_string()) fail("experiment spec: 'mode' must be a string");
        s.mode = j.at("mode").get<std::string>();
        if (s.mode != "exact" && s.mode != "sampled")
            fail("experiment spec: mode must be 'exact' or 'sampled'");
    }
    if (j.contains("out")) {
        if (!j.at("out").is_string()) fail("experiment spec: 'out' must be a string");
        s.out_dir = j.at("out").get<std::string>();
    }
    validate_params(s);
    return s;
}

json spec_to_json(const ExperimentSpec& s) {
    json j;
    j["algorithm"] = s.algorithm;
    if (!s.instance.is_null()) j["instance"] = s.instance;
    j["params"] = s.params;
    j["seed"] = s.seed;
    if (!s.mode.empty()) j["mode"] = s.mode;
    if (!s.out_dir.empty()) j["out"] = s.out_dir;
    return j;
}

std::string spec_hash(const json& canonical) {
    const std::string dump = canonical.dump();
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool evaluate_pass(const Report& r) {
    if (r.algorithm == "hardcore") {
        const json& e = r.extra;
        double lambda = e.value("lambda", 0.0);
        if (e.value("refuted", false)) return r.final_error <= lambda;
        return e.value("density", 0.0) >= r.bound - 1e-12 &&
               e.value("worst_advantage", 1.0) < e.value("gamma", 0.0);
    }
    if (r.extra.is_object() && r.extra.value("contract_violation", false)) return false;
    bool budgets_ok = (r.weak_budget == 0 || r.weak_updates <= r.weak_budget) &&
                      (r.balance_budget == 0 || r.balance_updates <= r.balance_budget);
    return budgets_ok && std::isfinite(r.bound) && r.final_error <= r.bound + 1e-12;
}

json report_to_json(const Report& r) {
    json j;
    j["algorithm"] = r.algorithm;
    j["mode"] = r.mode;
    j["spec_hash"] = r.spec_digest;
    j["stop"] = r.stop;
    j["transcript"] = r.transcript_path;
    j["final_error"] = r.final_error;
    if (std::isfinite(r.baseline_delta)) j["baseline_delta"] = r.baseline_delta;
    if (std::isfinite(r.bound)) j["bound"] = r.bound;
    j["pass"] = r.pass;
    j["rounds"] = r.rounds;
    j["weak_updates"] = r.weak_updates;
    j["balance_updates"] = r.balance_updates;
    j["weak_budget"] = r.weak_budget;
    j["balance_budget"] = r.balance_budget;
    j["extra"] = r.extra.is_null() ? json::object() : r.extra;
    // Wall-clock time is deliberately absent: output files are byte-stable
    // across repeated runs of the same spec.
    return j;
}

Report report_from_json(const json& j) {
    reject_unknown_fields(j,
                          {"algorithm", "mode", "spec_hash", "stop", "transcript", "final_error",
                           "baseline_delta", "bound", "pass", "rounds", "weak_updates",
                           "balance_updates", "weak_budget", "balance_budget", "extra"},
                          "report");
    Report r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.spec_digest = j.at("spec_hash").get<std::string>();
    r.stop = j.at("stop").get<std::string>();
    r.transcript_path = j.at("transcript").get<std::string>();
    r.final_error = j.at("final_error").get<double>();
    if (j.contains("baseline_delta")) r.baseline_delta = j.at("baseline_delta").get<double>();
    if (j.contains("bound")) r.bound = j.at("bound").get<double>();
    r.rounds = j.at("rounds").get<uint64_t>();
    r.weak_updates = j.at("weak_updates").get<uint64_t>();
    r.balance_updates = j.at("balance_updates").get<uint64_t>();
    r.weak_budget = j.at("weak_budget").get<uint64_t>();
    r.balance_budget = j.at("balance_budget").get<uint64_t>();
    r.extra = j.value("extra", json::object());
    r.pass = evaluate_pass(r);  // stored verdicts are never trusted
    return r;
}

ConceptClass parse_class_spec(const std::string& s, int n) {
    validate_class_format(s, "class spec");
    if (s == "parities") return ConceptClass::all_parities(n);
    if (s.rfind("trees:", 0) == 0)
        return ConceptClass::enumerated_trees(n, std::stoi(s.substr(6)));
    return ConceptClass::conjunctions(n, std::stoi(s.substr(13)));
}

BaselineReport opt_baseline(const ExampleDistribution& a, const std::string& class_spec,
                            bool allow_large) {
    auto t0 = std::chrono::steady_clock::now();
    ConceptClass c = parse_class_spec(class_spec, a.n());
    if (c.size() > kMaxClassMembers && !allow_large)
        fail("class '" + class_spec + "' has " + std::to_string(c.size()) +
             " members, over the scan budget of " + std::to_string(kMaxClassMembers) +
             "; pass the override to scan anyway");
    OptResult opt = exact_opt(a, c);
    BaselineReport b;
    b.delta = opt.delta;
    b.argmin = opt.name;
    b.class_size = c.size();
    b.wall_ms = wall_ms_since(t0);
    return b;
}

RunArtifacts run_experiment(const ExperimentSpec& spec) {
    auto t0 = std::chrono::steady_clock::now();
    const json& p = spec.params;
    const std::string& algo = spec.algorithm;

    RunArtifacts art;
    Report& rep = art.report;
    rep.algorithm = algo;
    rep.extra = json::object();

    // --- learn-dnf: the formula defines the instance -----------------------
    if (algo == "learn-dnf") {
        json fj = p.at("dnf");
        if (fj.is_string()) fj = read_json_file(fj.get<std::string>());
        DnfFormula f = dnf_from_json(fj);
        uint64_t w = uint_param_or(p, "w", 2 * f.terms.size() + 1, "learn-dnf");
        double eps = num_param(p, "epsilon", "learn-dnf");
        double delta = num_param_or(p, "delta", 0.05, "learn-dnf");
        std::string access = str_param_or(p, "access", "dense", "learn-dnf");
        BoostMode mode = resolve_mode(spec.mode, f.n, rep.mode);

        DnfLearnParams lp;
        lp.pac.w = w;
        lp.pac.epsilon = eps;
        lp.pac.delta = delta;
        lp.pac.mode = mode;
        lp.access = access == "query" ? AccessMode::Query : AccessMode::Dense;
        lp.query_budget = uint_param_or(p, "query_budget", UINT64_MAX, "learn-dnf");
        DnfLearnResult res = pac_learn_dnf(f, lp, spec.seed);

        ExampleDistribution a(BaseDistribution::uniform(f.n), f.to_fn());
        rep.final_error = delta_gamma(a, res.pac.boost.final_sign).delta;
        rep.baseline_delta = 0.0;  // realizable by construction
        rep.bound = eps;
        rep.stop = to_string(res.pac.boost.stop);
        rep.rounds = res.pac.boost.rounds;
        rep.weak_updates = res.pac.boost.weak_updates;
        rep.balance_updates = res.pac.boost.balance_updates;
        rep.weak_budget = lp.pac.round_budget ? lp.pac.round_budget : pac_round_budget(w, eps);
        rep.balance_budget = 0;
        rep.extra["w"] = w;
        rep.extra["terms"] = f.terms.size();
        rep.extra["gamma"] = res.pac.gamma;
        rep.extra["contract_violation"] = res.pac.contract_violation;
        if (lp.access == AccessMode::Query) rep.extra["queries_used"] = res.queries_used;
        if (mode == BoostMode::Sampled)
            rep.extra["final_error_estimate"] = res.pac.boost.final_error;
        art.transcript_csv = transcript_to_csv(res.pac.boost.transcript);
        art.result = boost_result_to_json(res.pac.boost);
    } else {
        ExampleDistribution a = resolve_instance(spec);
        const int n = a.n();

        if (algo == "a2boost" || algo == "aboost" || algo == "aboostdi") {
            BoostParams bp;
            bp.alpha = num_param(p, "alpha", algo.c_str());
            bp.gamma = num_param(p, "gamma", algo.c_str());
            bp.epsilon = num_param(p, "epsilon", algo.c_str());
            bp.delta = num_param_or(p, "delta", 0.05, algo.c_str());
            bp.mode = resolve_mode(spec.mode, n, rep.mode);
            if (p.contains("target_error"))
                bp.target_error = num_param(p, "target_error", algo.c_str());

            std::string weak_kind = str_param_or(p, "weak", "exhaustive", algo.c_str());
            std::string cls = str_param_or(p, "class", "parities", algo.c_str());
            auto counter = std::make_shared<QueryCounter>();
            WeakLearnerHandle weak =
                build_weak(weak_kind, cls, bp.alpha, bp.gamma, n, counter);

            BoostResult r;
            if (algo == "a2boost")
                r = a2boost(a, weak, bp, spec.seed);
            else if (algo == "aboost")
                r = aboost(a, weak, bp, spec.seed);
            else
                r = aboostdi(a, weak, bp, spec.seed);

            BaselineReport bl = opt_baseline(a, cls);
            rep.baseline_delta = bl.delta;
            if (algo == "a2boost")
                rep.bound = bl.delta + 2.0 * bp.alpha + bp.epsilon;
            else if (algo == "aboost")
                rep.bound = bl.delta + bp.alpha + bp.epsilon;
            else
                rep.bound = bl.delta / (1.0 - 2.0 * bp.alpha) + bp.epsilon;

            rep.final_error = delta_gamma(a, r.final_sign).delta;
            rep.stop = to_string(r.stop);
            rep.rounds = r.rounds;
            rep.weak_updates = r.weak_updates;
            rep.balance_updates = r.balance_updates;
            rep.weak_budget = algo == "aboostdi" ? bp.effective_weak_cap_reweighted()
                                                 : bp.effective_weak_cap();
            rep.balance_budget = bp.effective_balance_cap();
            rep.extra["baseline_argmin"] = bl.argmin;
            rep.extra["class_size"] = bl.class_size;
            if (!r.stop_detail.empty()) rep.extra["stop_detail"] = r.stop_detail;
            if (r.lifted) rep.extra["lifted"] = true;
            if (bp.mode == BoostMode::Sampled)
                rep.extra["final_error_estimate"] = r.final_error;
            if (weak_kind == "parity-query") rep.extra["queries_used"] = counter->used;
            art.transcript_csv = transcript_to_csv(r.transcript);
            art.result = boost_result_to_json(r);
        } else if (algo == "learn-dt") {
            DtParams dp;
            dp.s = uint_param_or(p, "s", 16, "learn-dt");
            dp.epsilon = num_param(p, "epsilon", "learn-dt");
            dp.delta = num_param_or(p, "delta", 0.05, "learn-dt");
            std::string access = str_param_or(p, "access", "dense", "learn-dt");
            dp.access = access == "query" ? AccessMode::Query : AccessMode::Dense;
            dp.mode = resolve_mode(spec.mode, n, rep.mode);
            dp.query_budget = uint_param_or(p, "query_budget", UINT64_MAX, "learn-dt");
            DtResult res = learn_decision_tree_agnostic(a, dp, spec.seed);

            if (p.contains("baseline") && p.at("baseline").is_number()) {
                rep.baseline_delta = p.at("baseline").get<double>();
                rep.extra["baseline_argmin"] = "(provided)";
            } else {
                BaselineReport bl =
                    opt_baseline(a, "trees:" + std::to_string(dp.s));
                rep.baseline_delta = bl.delta;
                rep.extra["baseline_argmin"] = bl.argmin;
                rep.extra["class_size"] = bl.class_size;
            }
            rep.bound = rep.baseline_delta + dp.epsilon;
            rep.final_error = delta_gamma(a, res.boost.final_sign).delta;
            rep.stop = to_string(res.boost.stop);
            rep.rounds = res.boost.rounds;
            rep.weak_updates = res.boost.weak_updates;
            rep.balance_updates = res.boost.balance_updates;
            BoostParams mirror;
            mirror.alpha = res.tau;
            mirror.gamma = res.gamma_w;
            mirror.epsilon = res.tau;
            rep.weak_budget = mirror.effective_weak_cap();
            rep.balance_budget = mirror.effective_balance_cap();
            rep.extra["s"] = dp.s;
            rep.extra["tau"] = res.tau;
            rep.extra["gamma_w"] = res.gamma_w;
            if (dp.access == AccessMode::Query) rep.extra["queries_used"] = res.queries_used;
            if (dp.mode == BoostMode::Sampled)
                rep.extra["final_error_estimate"] = res.boost.final_error;
            art.transcript_csv = transcript_to_csv(res.boost.transcript);
            art.result = boost_result_to_json(res.boost);
        } else if (algo == "th-pac") {
            PacParams pp;
            pp.w = uint_param_or(p, "w", 1, "th-pac");
            pp.epsilon = num_param(p, "epsilon", "th-pac");
            pp.delta = num_param_or(p, "delta", 0.05, "th-pac");
            pp.mode = resolve_mode(spec.mode, n, rep.mode);
            pp.round_budget = uint_param_or(p, "round_budget", 0, "th-pac");
            double gamma = pp.epsilon / (4.0 * static_cast<double>(pp.w));

            std::string weak_kind = str_param_or(p, "weak", "parity-dense", "th-pac");
            std::string cls = str_param_or(p, "class", "parities", "th-pac");
            WeakLearnerHandle weak;
            if (weak_kind == "parity-dense") {
                weak = parity_weak_dense(0.75 * gamma);
                weak.alpha = weak.gamma = gamma;
            } else {
                weak = exhaustive_weak(parse_class_spec(cls, n), gamma, gamma);
            }
            PacResult res = pac_learn_threshold(a, weak, pp, spec.seed);

            rep.final_error = delta_gamma(a, res.boost.final_sign).delta;
            rep.bound = pp.epsilon;
            rep.stop = to_string(res.boost.stop);
            rep.rounds = res.boost.rounds;
            rep.weak_updates = res.boost.weak_updates;
            rep.balance_updates = res.boost.balance_updates;
            rep.weak_budget =
                pp.round_budget ? pp.round_budget : pac_round_budget(pp.w, pp.epsilon);
            rep.balance_budget = 0;
            rep.extra["w"] = pp.w;
            rep.extra["gamma"] = res.gamma;
            rep.extra["contract_violation"] = res.contract_violation;
            if (pp.mode == BoostMode::Sampled)
                rep.extra["final_error_estimate"] = res.boost.final_error;
            art.transcript_csv = transcript_to_csv(res.boost.transcript);
            art.result = boost_result_to_json(res.boost);
        } else {  // hardcore
            rep.mode = "exact";
            double gamma = num_param(p, "gamma", "hardcore");
            double eps = num_param(p, "epsilon", "hardcore");
            std::string cls = str_param_or(p, "class", "parities", "hardcore");
            ConceptClass c = parse_class_spec(cls, n);
            HardnessInstance hi{a, c, 0.0};
            if (p.at("lambda").is_string())
                hi.lambda = exact_opt(a, c).delta;
            else
                hi.lambda = p.at("lambda").get<double>();

            HardcoreResult hr = construct_hardcore_measure(hi, gamma, eps, spec.seed);
            std::optional<SetResult> sr;
            bool want_set = !p.contains("set") || p.at("set").get<bool>();
            if (want_set && !hr.refuted && a.dist().is_uniform() && hr.density > 0.0)
                sr = measure_to_set(hr.measure, hi, spec.seed);

            rep.final_error = hr.refuted ? hr.refuted_error : hr.achieved_error;
            rep.baseline_delta = hr.lambda_opt;
            rep.bound = 2.0 * hi.lambda - eps;
            rep.stop = hr.refuted ? "refuted" : "certificate";
            rep.rounds = hr.rounds;
            rep.weak_updates = hr.rounds;
            rep.balance_updates = hr.balance_updates;
            rep.extra["refuted"] = hr.refuted;
            rep.extra["lambda"] = hr.lambda;
            rep.extra["lambda_opt"] = hr.lambda_opt;
            if (hr.lambda_warning) rep.extra["lambda_warning"] = true;
            rep.extra["gamma"] = gamma;
            if (!hr.refuted) {
                rep.extra["density"] = hr.density;
                rep.extra["worst_advantage"] = hr.worst_advantage;
                rep.extra["worst_concept"] = hr.worst_concept;
                if (sr) {
                    rep.extra["set_fraction"] = sr->fraction;
                    rep.extra["set_size"] = sr->size;
                }
                art.certificate = certificate_to_json(make_certificate(hr, sr ? &*sr : nullptr));
            }
            art.transcript_csv = transcript_to_csv({});
            json res;
            res["refuted"] = hr.refuted;
            res["achieved_error"] = hr.refuted ? hr.refuted_error : hr.achieved_error;
            res["rounds"] = hr.rounds;
            res["balance_updates"] = hr.balance_updates;
            res["lambda"] = hr.lambda;
            res["lambda_opt"] = hr.lambda_opt;
            if (hr.refuted) res["refuting_sign"] = fn_to_json(hr.refuting_sign);
            art.result = std::move(res);
        }
    }

    json canon = spec_to_json(spec);
    canon.erase("out");
    canon["mode"] = rep.mode;  // hash the run as executed, not the request
    rep.spec_digest = spec_hash(canon);
    rep.pass = evaluate_pass(rep);
    rep.wall_ms = wall_ms_since(t0);
    return art;
}

Report run_experiment_to_dir(const ExperimentSpec& spec, const std::string& out_dir) {
    RunArtifacts art = run_experiment(spec);
    namespace fs = std::filesystem;
    fs::path dir(out_dir);
    fs::create_directories(dir);
    art.report.transcript_path = "transcript.csv";
    write_text_file(dir / "transcript.csv", art.transcript_csv);
    json wrapper;
    wrapper["spec_hash"] = art.report.spec_digest;
    wrapper["result"] = art.result;
    write_text_file(dir / "result.json", wrapper.dump(2) + "\n");
    if (art.certificate)
        write_text_file(dir / "certificate.json", art.certificate->dump(2) + "\n");
    write_text_file(dir / "report.json", report_to_json(art.report).dump(2) + "\n");
    return art.report;
}

}  // namespace agb
