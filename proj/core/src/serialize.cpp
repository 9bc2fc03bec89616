#include "agb/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace agb {

namespace {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("cannot parse ") + what + " value '" + s + "'");
    }
}

}  // namespace

void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& context) {
    if (!j.is_object()) throw std::runtime_error(context + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw std::runtime_error(context + ": unknown field '" + it.key() + "'");
    }
}

std::string bits_hex(const std::vector<uint64_t>& words, uint64_t nbits) {
    static const char* digits = "0123456789abcdef";
    uint64_t nbytes = (nbits + 7) / 8;
    std::string out;
    out.reserve(2 * nbytes);
    for (uint64_t j = 0; j < nbytes; ++j) {
        uint64_t word = j / 8 < words.size() ? words[j / 8] : 0;
        unsigned byte = (word >> (8 * (j % 8))) & 0xff;
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xf]);
    }
    return out;
}

std::vector<uint64_t> hex_bits(const std::string& hex, uint64_t nbits) {
    uint64_t nbytes = (nbits + 7) / 8;
    if (hex.size() != 2 * nbytes)
        throw std::runtime_error("hex bitstring has " + std::to_string(hex.size()) +
                                 " digits; expected " + std::to_string(2 * nbytes));
    auto nibble = [&](char c) -> unsigned {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw std::runtime_error(std::string("bad hex digit '") + c + "'");
    };
    std::vector<uint64_t> words((nbits + 63) / 64, 0);
    for (uint64_t j = 0; j < nbytes; ++j) {
        uint64_t byte = (nibble(hex[2 * j]) << 4) | nibble(hex[2 * j + 1]);
        words[j / 8] |= byte << (8 * (j % 8));
    }
    if (nbits % 64) {
        uint64_t pad = words.back() >> (nbits % 64);
        if (pad) throw std::runtime_error("hex bitstring sets bits beyond its length");
    }
    return words;
}

uint64_t parse_mask(const std::string& hex) {
    if (hex.empty() || hex.size() > 16)
        throw std::runtime_error("bad mask hex '" + hex + "'");
    uint64_t v = 0;
    for (char c : hex) {
        unsigned d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else
            throw std::runtime_error("bad mask hex '" + hex + "'");
        v = (v << 4) | d;
    }
    return v;
}

json fn_to_json(const BoundedFn& f) {
    json j;
    j["n"] = f.n();
    switch (f.kind()) {
        case BoundedFn::Kind::Parity:
            j["parity"] = mask_hex(f.parity_mask());
            j["sign"] = f.parity_sign();
            return j;
        case BoundedFn::Kind::Constant:
            j["constant"] = f.constant_value();
            return j;
        default:
            break;
    }
    Domain dom(f.n());
    std::vector<double> table = f.table(dom);
    if (f.is_boolean()) {
        std::vector<uint64_t> words((dom.size() + 63) / 64, 0);
        for (uint64_t x = 0; x < dom.size(); ++x)
            if (table[x] > 0.0) words[x >> 6] |= uint64_t{1} << (x & 63);
        j["boolean_hex"] = bits_hex(words, dom.size());
    } else {
        j["table"] = table;
    }
    return j;
}

BoundedFn fn_from_json(const json& j) {
    reject_unknown_fields(j, {"n", "parity", "sign", "boolean_hex", "table", "constant"},
                          "function");
    if (!j.contains("n")) throw std::runtime_error("function: missing 'n'");
    int n = j.at("n").get<int>();
    Domain width_check(n);
    if (j.contains("parity")) {
        int sign = j.value("sign", +1);
        return BoundedFn::parity(n, parse_mask(j.at("parity").get<std::string>()), sign);
    }
    if (j.contains("constant")) return BoundedFn::constant(n, j.at("constant").get<double>());
    if (j.contains("boolean_hex")) {
        Domain dom(n);
        std::vector<uint64_t> words =
            hex_bits(j.at("boolean_hex").get<std::string>(), dom.size());
        return BoundedFn::boolean(n, std::move(words));
    }
    if (j.contains("table"))
        return BoundedFn::dense(n, j.at("table").get<std::vector<double>>());
    throw std::runtime_error("function: need one of parity/boolean_hex/table/constant");
}

json instance_to_json(const ExampleDistribution& a) {
    json j;
    j["n"] = a.n();
    if (a.dist().is_uniform()) {
        j["distribution"] = "uniform";
    } else {
        j["distribution"] = json{{"explicit", a.dist().dense()}};
    }
    j["phi"] = fn_to_json(a.phi());
    return j;
}

ExampleDistribution instance_from_json(const json& j) {
    reject_unknown_fields(j, {"n", "distribution", "phi"}, "instance");
    if (!j.contains("n") || !j.contains("distribution") || !j.contains("phi"))
        throw std::runtime_error("instance: need fields n, distribution, phi");
    int n = j.at("n").get<int>();
    const json& d = j.at("distribution");
    auto make_dist = [&]() -> BaseDistribution {
        if (d.is_string()) {
            if (d.get<std::string>() != "uniform")
                throw std::runtime_error("instance: unknown distribution '" +
                                         d.get<std::string>() + "'");
            return BaseDistribution::uniform(n);
        }
        reject_unknown_fields(d, {"explicit"}, "distribution");
        if (!d.contains("explicit"))
            throw std::runtime_error("instance: distribution needs 'explicit'");
        return BaseDistribution::explicit_table(n, d.at("explicit").get<std::vector<double>>());
    };
    BaseDistribution dist = make_dist();
    const json& p = j.at("phi");
    if (p.contains("generator"))
        throw std::runtime_error(
            "instance: 'generator' entries must be materialized by the harness first");
    json pf = p;
    if (!pf.contains("n")) pf["n"] = n;
    BoundedFn phi = fn_from_json(pf);
    if (phi.n() != n) throw std::runtime_error("instance: phi width differs from n");
    return ExampleDistribution(std::move(dist), std::move(phi));
}

namespace {

json tree_node_to_json(const DecisionTree& t, int idx) {
    const DecisionTree::Node& nd = t.nodes[idx];
    if (nd.var < 0) return json(nd.leaf);
    json j;
    j["var"] = nd.var;
    j["left"] = tree_node_to_json(t, nd.left);
    j["right"] = tree_node_to_json(t, nd.right);
    return j;
}

int tree_node_from_json(const json& j, DecisionTree& t, int n) {
    if (j.is_number()) {
        double v = j.get<double>();
        if (v != 1.0 && v != -1.0)
            throw std::runtime_error("tree: leaves must be +1 or -1");
        DecisionTree::Node nd;
        nd.var = -1;
        nd.leaf = v;
        t.nodes.push_back(nd);
        return static_cast<int>(t.nodes.size()) - 1;
    }
    reject_unknown_fields(j, {"var", "left", "right"}, "tree node");
    if (!j.contains("var") || !j.contains("left") || !j.contains("right"))
        throw std::runtime_error("tree: internal nodes need var, left, right");
    int var = j.at("var").get<int>();
    if (var < 0 || var >= n) throw std::runtime_error("tree: variable out of range");
    int left = tree_node_from_json(j.at("left"), t, n);
    int right = tree_node_from_json(j.at("right"), t, n);
    DecisionTree::Node nd;
    nd.var = var;
    nd.left = left;
    nd.right = right;
    t.nodes.push_back(nd);
    return static_cast<int>(t.nodes.size()) - 1;
}

}  // namespace

json tree_to_json(const DecisionTree& t) { return tree_node_to_json(t, t.root); }

DecisionTree tree_from_json(const json& j, int n) {
    Domain check(n);
    DecisionTree t;
    t.n = n;
    t.root = tree_node_from_json(j, t, n);
    return t;
}

json dnf_to_json(const DnfFormula& f) {
    json terms = json::array();
    for (const DnfTerm& t : f.terms)
        terms.push_back(json{{"pos_mask", mask_hex(t.pos_mask)},
                             {"neg_mask", mask_hex(t.neg_mask)}});
    return json{{"n", f.n}, {"terms", std::move(terms)}};
}

DnfFormula dnf_from_json(const json& j) {
    reject_unknown_fields(j, {"n", "terms"}, "dnf");
    if (!j.contains("n") || !j.contains("terms"))
        throw std::runtime_error("dnf: need fields n and terms");
    DnfFormula f;
    f.n = j.at("n").get<int>();
    Domain check(f.n);
    for (const json& tj : j.at("terms")) {
        reject_unknown_fields(tj, {"pos_mask", "neg_mask"}, "dnf term");
        DnfTerm t;
        t.pos_mask = parse_mask(tj.at("pos_mask").get<std::string>());
        t.neg_mask = parse_mask(tj.at("neg_mask").get<std::string>());
        if (t.pos_mask & t.neg_mask)
            throw std::runtime_error("dnf: a variable appears with both polarities");
        if ((t.pos_mask | t.neg_mask) >> f.n)
            throw std::runtime_error("dnf: term touches variables outside the domain");
        f.terms.push_back(t);
    }
    return f;
}

std::string step_kind_name(StepKind k) {
    return k == StepKind::Weak ? "weak" : "balance";
}

StepKind step_kind_from_name(const std::string& s) {
    if (s == "weak") return StepKind::Weak;
    if (s == "balance") return StepKind::Balance;
    throw std::runtime_error("unknown step kind '" + s + "'");
}

StopReason stop_reason_from_name(const std::string& s) {
    if (s == "both_failed") return StopReason::BothFailed;
    if (s == "round_cap_hit") return StopReason::RoundCapHit;
    if (s == "zero_residual") return StopReason::ZeroResidual;
    if (s == "target_reached") return StopReason::TargetReached;
    throw std::runtime_error("unknown stop reason '" + s + "'");
}

json ensemble_to_json(const Ensemble& e) {
    json steps = json::array();
    for (const EnsembleStep& s : e.steps)
        steps.push_back(json{{"kind", step_kind_name(s.kind)},
                             {"weight", s.weight},
                             {"g", fn_to_json(s.g)}});
    return json{{"n", e.n}, {"steps", std::move(steps)}};
}

Ensemble ensemble_from_json(const json& j) {
    reject_unknown_fields(j, {"n", "steps"}, "ensemble");
    Ensemble e(j.at("n").get<int>());
    for (const json& sj : j.at("steps")) {
        reject_unknown_fields(sj, {"kind", "weight", "g"}, "ensemble step");
        EnsembleStep s;
        s.kind = step_kind_from_name(sj.at("kind").get<std::string>());
        s.weight = sj.at("weight").get<double>();
        s.g = fn_from_json(sj.at("g"));
        e.steps.push_back(std::move(s));
    }
    return e;
}

std::string transcript_to_csv(const std::vector<TranscriptRow>& rows) {
    std::string out = "round,kind,gamma_hat,potential,n_h,error_estimate,smoothness\n";
    for (const TranscriptRow& r : rows) {
        out += std::to_string(r.round);
        out += ',';
        out += step_kind_name(r.kind);
        for (double v : {r.gamma_hat, r.potential, r.n_h, r.error_estimate, r.smoothness}) {
            out += ',';
            out += g17(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<TranscriptRow> transcript_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) ||
        line != "round,kind,gamma_hat,potential,n_h,error_estimate,smoothness")
        throw std::runtime_error("transcript: bad or missing header");
    std::vector<TranscriptRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7)
            throw std::runtime_error("transcript: expected 7 columns, got " +
                                     std::to_string(cells.size()));
        TranscriptRow r;
        r.round = std::stoull(cells[0]);
        r.kind = step_kind_from_name(cells[1]);
        r.gamma_hat = parse_double(cells[2], "gamma_hat");
        r.potential = parse_double(cells[3], "potential");
        r.n_h = parse_double(cells[4], "n_h");
        r.error_estimate = parse_double(cells[5], "error_estimate");
        r.smoothness = parse_double(cells[6], "smoothness");
        rows.push_back(r);
    }
    return rows;
}

json boost_result_to_json(const BoostResult& r) {
    json j;
    j["stop"] = to_string(r.stop);
    j["stop_detail"] = r.stop_detail;
    j["rounds"] = r.rounds;
    j["weak_updates"] = r.weak_updates;
    j["balance_updates"] = r.balance_updates;
    j["final_error"] = r.final_error;
    j["lifted"] = r.lifted;
    j["final_sign"] = fn_to_json(r.final_sign);
    j["ensemble"] = ensemble_to_json(r.ensemble);
    return j;
}

BoostResult boost_result_from_json(const json& j) {
    reject_unknown_fields(j,
                          {"stop", "stop_detail", "rounds", "weak_updates",
                           "balance_updates", "final_error", "lifted", "final_sign",
                           "ensemble"},
                          "boost result");
    BoostResult r;
    r.stop = stop_reason_from_name(j.at("stop").get<std::string>());
    r.stop_detail = j.value("stop_detail", std::string());
    r.rounds = j.at("rounds").get<uint64_t>();
    r.weak_updates = j.at("weak_updates").get<uint64_t>();
    r.balance_updates = j.at("balance_updates").get<uint64_t>();
    r.final_error = j.at("final_error").get<double>();
    r.lifted = j.value("lifted", false);
    r.final_sign = fn_from_json(j.at("final_sign"));
    r.ensemble = ensemble_from_json(j.at("ensemble"));
    return r;
}

CertificateData make_certificate(const HardcoreResult& r, const SetResult* set) {
    CertificateData c;
    c.measure = r.measure.m;
    c.density = r.density;
    c.gamma = r.gamma;
    c.worst_concept = r.worst_concept;
    c.worst_advantage = r.worst_advantage;
    if (set) {
        c.set_hex = bits_hex(set->words, uint64_t{1} << r.measure.n);
        c.set_fraction = set->fraction;
    }
    return c;
}

json certificate_to_json(const CertificateData& c) {
    json j;
    j["measure"] = c.measure;
    j["density"] = c.density;
    j["gamma"] = c.gamma;
    j["worst_concept"] = c.worst_concept;
    j["worst_advantage"] = c.worst_advantage;
    if (c.set_hex) j["set_hex"] = *c.set_hex;
    if (c.set_fraction) j["set_fraction"] = *c.set_fraction;
    return j;
}

CertificateData certificate_from_json(const json& j) {
    reject_unknown_fields(j,
                          {"measure", "density", "gamma", "worst_concept",
                           "worst_advantage", "set_hex", "set_fraction"},
                          "certificate");
    CertificateData c;
    c.measure = j.at("measure").get<std::vector<double>>();
    c.density = j.at("density").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.worst_concept = j.value("worst_concept", std::string());
    c.worst_advantage = j.at("worst_advantage").get<double>();
    if (j.contains("set_hex")) c.set_hex = j.at("set_hex").get<std::string>();
    if (j.contains("set_fraction")) c.set_fraction = j.at("set_fraction").get<double>();
    return c;
}

}  // namespace agb
