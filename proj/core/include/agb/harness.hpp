#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "agb/boosters.hpp"
#include "agb/serialize.hpp"

namespace agb {

/// Widest domain run densely by default; override with the AGB_DENSE_CAP
/// environment variable (hard ceiling kMaxDomainBits).
int dense_cap();

// ---------------------------------------------------------------------------
// Instance generation.
// ---------------------------------------------------------------------------

struct GenOutput {
    json instance;                 ///< pinned instance schema, fully materialized
    std::optional<json> formula;   ///< DNF family: the formula sidecar
    std::optional<json> metadata;  ///< planted-structure notes (masks, noise, ...)
};

/** Families: noisy-parity (n, mask?, eta, noise = scale|flip), noisy-tree
 *  (n, depth, eta, noise = flip|scale), dnf (n, terms, width), threshold-of-parities
 *  (n, w), random-boolean (n), explicit (instance passthrough). Deterministic in
 *  (family, params, seed). Scale noise sets the label mean to (1-2*eta) times the
 *  concept; flip noise flips the concept on a seeded set of round(eta*2^n) points. */
GenOutput gen_instance(const std::string& family, const json& params, uint64_t seed);

// ---------------------------------------------------------------------------
// Experiment specs.
// ---------------------------------------------------------------------------

struct ExperimentSpec {
    std::string algorithm;  // a2boost|aboost|aboostdi|learn-dt|learn-dnf|th-pac|hardcore
    json instance;          // inline instance object, or a file path string
    json params;            // per-algorithm keys, schema-checked
    uint64_t seed = 0;
    std::string mode;       // "exact" | "sampled" | "" (auto by domain width)
    std::string out_dir;    // optional default output directory
};

/// Strict parse: unknown fields rejected at every level; parameter ranges and
/// cross-constraints (gamma <= alpha) are checked before any execution.
ExperimentSpec spec_from_json(const json& j);
json spec_to_json(const ExperimentSpec& s);

/// Stable content hash (FNV-1a 64 over the canonical dump), embedded in outputs.
std::string spec_hash(const json& canonical);

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

struct Report {
    std::string algorithm;
    std::string mode;
    std::string spec_digest;
    std::string stop;
    std::string transcript_path;
    double final_error = std::numeric_limits<double>::quiet_NaN();
    double baseline_delta = std::numeric_limits<double>::quiet_NaN();
    double bound = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    uint64_t rounds = 0;
    uint64_t weak_updates = 0;
    uint64_t balance_updates = 0;
    uint64_t weak_budget = 0;
    uint64_t balance_budget = 0;
    double wall_ms = 0.0;  ///< console-only; never serialized (outputs stay byte-stable)
    json extra;            ///< per-algorithm numbers consumed by the pass rule
};

/// The pass verdict recomputed from the raw numbers alone.
bool evaluate_pass(const Report& r);

json report_to_json(const Report& r);
/// Parses and RE-DERIVES pass via evaluate_pass (stored verdicts are ignored).
Report report_from_json(const json& j);

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

struct RunArtifacts {
    Report report;
    std::string transcript_csv;
    json result;             ///< boost-result body (or learner summary)
    std::optional<json> certificate;  ///< hardcore runs
};

/** Executes one spec end to end (no file IO; callers persist the artifacts).
 *  In exact mode the report carries the exact baseline and the guarantee
 *  verdict for the algorithm's bound. */
RunArtifacts run_experiment(const ExperimentSpec& spec);

/** Writes report.json, transcript.csv, result.json (and certificate.json) under
 *  out_dir, creating it; returns the report. */
Report run_experiment_to_dir(const ExperimentSpec& spec, const std::string& out_dir);

struct BaselineReport {
    double delta = 0.0;
    std::string argmin;
    uint64_t class_size = 0;
    double wall_ms = 0.0;
};

/// Exhaustive class optimum for a dense instance; enforces the enumeration
/// budget unless `allow_large`.
BaselineReport opt_baseline(const ExampleDistribution& a, const std::string& class_spec,
                            bool allow_large = false);

/// "parities" | "trees:<max_leaves>" | "conjunctions:<max_width>".
ConceptClass parse_class_spec(const std::string& s, int n);

}  // namespace agb
