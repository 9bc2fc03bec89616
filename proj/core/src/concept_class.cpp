#include "agb/concept_class.hpp"

#include <algorithm>
#include <unordered_set>

namespace agb {

namespace {

struct BitsHash {
    size_t operator()(const std::vector<uint64_t>& v) const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (uint64_t w : v) {
            h ^= w;
            h *= 0x100000001b3ull;
        }
        return static_cast<size_t>(h);
    }
};

}  // namespace

BoundedFn DecisionTree::to_fn() const {
    Domain dom(n);
    std::vector<uint64_t> bits((dom.size() + 63) / 64, 0);
    for (uint64_t x = 0; x < dom.size(); ++x)
        if (eval(x) > 0) bits[x >> 6] |= uint64_t{1} << (x & 63);
    return BoundedFn::boolean(n, std::move(bits));
}

ConceptClass ConceptClass::explicit_list(int n, std::vector<BoundedFn> members,
                                         bool negation_closed) {
    Domain dom(n);
    if (members.empty()) throw std::invalid_argument("empty hypothesis class");
    if (members.size() > kMaxClassMembers)
        throw std::invalid_argument("hypothesis class exceeds the enumeration budget");
    for (const BoundedFn& f : members)
        if (f.n() > n) throw std::invalid_argument("class member wider than class domain");
    ConceptClass c;
    c.kind_ = Kind::ExplicitList;
    c.n_ = n;
    c.negation_closed_ = negation_closed;
    c.members_ = std::move(members);
    return c;
}

ConceptClass ConceptClass::all_parities(int n) {
    Domain dom(n);  // enumerated lazily, so no budget applies at construction
    ConceptClass c;
    c.kind_ = Kind::AllParities;
    c.n_ = n;
    c.negation_closed_ = true;
    return c;
}

ConceptClass ConceptClass::enumerated_trees(int n, int max_leaves) {
    Domain dom(n);
    if (max_leaves < 1) throw std::invalid_argument("max_leaves must be >= 1");
    const size_t words = (dom.size() + 63) / 64;
    const uint64_t last_mask =
        dom.size() % 64 ? (uint64_t{1} << (dom.size() % 64)) - 1 : ~uint64_t{0};

    // by_leaves[k] = distinct truth tables of trees with exactly k+1 leaves.
    std::vector<std::vector<std::vector<uint64_t>>> by_leaves(max_leaves);
    std::unordered_set<std::vector<uint64_t>, BitsHash> seen;
    uint64_t total = 0;

    auto add = [&](int k, std::vector<uint64_t> bits) {
        if (seen.insert(bits).second) {
            if (++total > kMaxClassMembers)
                throw std::invalid_argument("tree class exceeds the enumeration budget");
            by_leaves[k].push_back(std::move(bits));
        }
    };

    std::vector<uint64_t> ones(words, ~uint64_t{0});
    ones.back() = last_mask;
    add(0, ones);
    add(0, std::vector<uint64_t>(words, 0));

    // Per-variable selection masks: bit x set iff coordinate v of x is 1.
    std::vector<std::vector<uint64_t>> varbit(n, std::vector<uint64_t>(words, 0));
    for (uint64_t x = 0; x < dom.size(); ++x)
        for (int v = 0; v < n; ++v)
            if ((x >> v) & 1) varbit[v][x >> 6] |= uint64_t{1} << (x & 63);

    for (int k = 2; k <= max_leaves; ++k) {
        for (int i = 1; i < k; ++i) {
            for (const auto& left : by_leaves[i - 1]) {
                for (const auto& right : by_leaves[k - i - 1]) {
                    for (int v = 0; v < n; ++v) {
                        std::vector<uint64_t> bits(words);
                        for (size_t w = 0; w < words; ++w)
                            bits[w] = (left[w] & ~varbit[v][w]) | (right[w] & varbit[v][w]);
                        add(k - 1, std::move(bits));
                    }
                }
            }
        }
    }

    std::vector<BoundedFn> members;
    members.reserve(total);
    for (auto& bucket : by_leaves)
        for (auto& bits : bucket) members.push_back(BoundedFn::boolean(n, std::move(bits)));

    ConceptClass c;
    c.kind_ = Kind::EnumeratedTrees;
    c.n_ = n;
    c.negation_closed_ = true;  // swapping all leaf signs stays in the class
    c.members_ = std::move(members);
    return c;
}

ConceptClass ConceptClass::conjunctions(int n, int max_width) {
    Domain dom(n);
    if (max_width < 0 || max_width > n)
        throw std::invalid_argument("conjunction width must be in [0, n]");
    std::vector<BoundedFn> members;

    // Subsets in increasing popcount, then numeric order; literal signs in
    // numeric order of the sign mask restricted to the subset.
    for (int width = 0; width <= max_width; ++width) {
        for (uint64_t vars = 0; vars < dom.size(); ++vars) {
            if (std::popcount(vars) != width) continue;
            uint64_t sign_count = uint64_t{1} << width;
            for (uint64_t signs = 0; signs < sign_count; ++signs) {
                // Expand the packed sign bits onto the subset's variables:
                // required[v] = 1 iff literal is "bit v == 1".
                uint64_t required = 0;
                int pos = 0;
                for (int v = 0; v < n; ++v)
                    if ((vars >> v) & 1) {
                        if ((signs >> pos) & 1) required |= uint64_t{1} << v;
                        ++pos;
                    }
                std::vector<uint64_t> bits((dom.size() + 63) / 64, 0);
                for (uint64_t x = 0; x < dom.size(); ++x)
                    if ((x & vars) == required) bits[x >> 6] |= uint64_t{1} << (x & 63);
                members.push_back(BoundedFn::boolean(n, std::move(bits)));
                if (members.size() > kMaxClassMembers)
                    throw std::invalid_argument(
                        "conjunction class exceeds the enumeration budget");
            }
        }
    }

    ConceptClass c;
    c.kind_ = Kind::Conjunctions;
    c.n_ = n;
    c.negation_closed_ = false;
    c.members_ = std::move(members);
    return c;
}

uint64_t ConceptClass::size() const {
    if (kind_ == Kind::AllParities) return uint64_t{1} << n_;
    return members_.size();
}

BoundedFn ConceptClass::member(uint64_t i) const {
    if (i >= size()) throw std::out_of_range("class member index out of range");
    if (kind_ == Kind::AllParities) return BoundedFn::parity(n_, i, +1);
    return members_[i];
}

std::string ConceptClass::member_name(uint64_t i) const {
    if (kind_ == Kind::AllParities) return "parity:" + mask_hex(i);
    return kind_name() + ":" + std::to_string(i);
}

std::string ConceptClass::kind_name() const {
    switch (kind_) {
        case Kind::ExplicitList: return "explicit";
        case Kind::AllParities: return "all-parities";
        case Kind::EnumeratedTrees: return "trees";
        case Kind::Conjunctions: return "conjunctions";
    }
    return "?";
}

std::string mask_hex(uint64_t mask) {
    if (mask == 0) return "0";
    static const char* digits = "0123456789abcdef";
    std::string out;
    while (mask) {
        out.insert(out.begin(), digits[mask & 0xF]);
        mask >>= 4;
    }
    return out;
}

}  // namespace agb
