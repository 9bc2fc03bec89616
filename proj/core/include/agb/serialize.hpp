#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agb/applications.hpp"
#include "agb/boosters.hpp"
#include "agb/concept_class.hpp"
#include "agb/function_space.hpp"
#include "agb/hardcore.hpp"

namespace agb {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Hex bitstrings. Bit k describes point k; bytes appear in address order, two
// lowercase digits per byte.
// ---------------------------------------------------------------------------

std::string bits_hex(const std::vector<uint64_t>& words, uint64_t nbits);
std::vector<uint64_t> hex_bits(const std::string& hex, uint64_t nbits);

/// Parse a mask produced by mask_hex (lowercase hex, no prefix).
uint64_t parse_mask(const std::string& hex);

// ---------------------------------------------------------------------------
// Functions, instances, concepts.
// ---------------------------------------------------------------------------

/// {"n", ...} with one of: {"parity": hex, "sign": ±1}, {"boolean_hex": "..."},
/// {"table": [...]}, {"constant": v}. Views are materialized as tables.
json fn_to_json(const BoundedFn& f);
BoundedFn fn_from_json(const json& j);

/// {"n", "distribution": "uniform" | {"explicit": [...]}, "phi": fn}.
/// Parsing rejects unknown fields and "generator" phi specs (those are
/// resolved by the harness before reaching this layer).
json instance_to_json(const ExampleDistribution& a);
ExampleDistribution instance_from_json(const json& j);

/// Nested {"var", "left", "right"} with ±1 numbers at the leaves.
json tree_to_json(const DecisionTree& t);
DecisionTree tree_from_json(const json& j, int n);

/// {"n", "terms": [{"pos_mask": hex, "neg_mask": hex}]}.
json dnf_to_json(const DnfFormula& f);
DnfFormula dnf_from_json(const json& j);

// ---------------------------------------------------------------------------
// Boosting artifacts.
// ---------------------------------------------------------------------------

std::string step_kind_name(StepKind k);
StepKind step_kind_from_name(const std::string& s);
StopReason stop_reason_from_name(const std::string& s);

/// {"n", "steps": [{"kind", "weight", "g": fn}]}.
json ensemble_to_json(const Ensemble& e);
Ensemble ensemble_from_json(const json& j);

/// Header "round,kind,gamma_hat,potential,n_h,error_estimate,smoothness";
/// numbers printed with %.17g; absent values are "nan".
std::string transcript_to_csv(const std::vector<TranscriptRow>& rows);
std::vector<TranscriptRow> transcript_from_csv(const std::string& csv);

/// Result body (the transcript travels separately as CSV).
json boost_result_to_json(const BoostResult& r);
BoostResult boost_result_from_json(const json& j);

// ---------------------------------------------------------------------------
// Hard-core certificates.
// ---------------------------------------------------------------------------

struct CertificateData {
    std::vector<double> measure;
    double density = 0.0;
    double gamma = 0.0;
    std::string worst_concept;
    double worst_advantage = 0.0;
    std::optional<std::string> set_hex;
    std::optional<double> set_fraction;
};

CertificateData make_certificate(const HardcoreResult& r, const SetResult* set = nullptr);
json certificate_to_json(const CertificateData& c);
CertificateData certificate_from_json(const json& j);

// ---------------------------------------------------------------------------
// Helpers shared by parsers.
// ---------------------------------------------------------------------------

/// Throws listing the offending key when j contains a key outside `allowed`.
void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& context);

}  // namespace agb
