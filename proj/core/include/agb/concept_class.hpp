#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agb/function_space.hpp"

namespace agb {

/// Enumeration budget for scans and class construction.
inline constexpr uint64_t kMaxClassMembers = uint64_t{1} << 20;

/** Binary decision tree over n input bits; bit value 0 descends left, 1 right;
 *  leaves hold ±1. */
struct DecisionTree {
    struct Node {
        int var = -1;       // -1 => leaf
        double leaf = 0.0;  // ±1 when var < 0
        int left = -1;
        int right = -1;
    };

    int n = 1;
    int root = 0;
    std::vector<Node> nodes;

    double eval(uint64_t x) const {
        int i = root;
        while (nodes[i].var >= 0)
            i = (x >> nodes[i].var) & 1 ? nodes[i].right : nodes[i].left;
        return nodes[i].leaf;
    }

    int leaf_count() const {
        int c = 0;
        for (const Node& nd : nodes) c += (nd.var < 0);
        return c;
    }

    BoundedFn to_fn() const;
};

/** A finite hypothesis class with deterministic enumeration order. When
 *  negation_closed() is set, scans consider both c and -c for each member. */
class ConceptClass {
  public:
    enum class Kind { ExplicitList, AllParities, EnumeratedTrees, Conjunctions };

    static ConceptClass explicit_list(int n, std::vector<BoundedFn> members,
                                      bool negation_closed = false);
    static ConceptClass all_parities(int n);
    /// All decision trees with at most max_leaves leaves, deduplicated by
    /// truth table. Throws if the class would exceed the enumeration budget.
    static ConceptClass enumerated_trees(int n, int max_leaves);
    /// All conjunctions of at most max_width literals (including the empty
    /// conjunction, which is the constant +1).
    static ConceptClass conjunctions(int n, int max_width);

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    uint64_t size() const;
    bool negation_closed() const { return negation_closed_; }

    BoundedFn member(uint64_t i) const;
    std::string member_name(uint64_t i) const;

    std::string kind_name() const;

  private:
    ConceptClass() = default;
    Kind kind_ = Kind::ExplicitList;
    int n_ = 1;
    bool negation_closed_ = false;
    std::vector<BoundedFn> members_;  // empty for AllParities
};

/// Hex string for a bit mask (lowercase, no 0x prefix, minimal width).
std::string mask_hex(uint64_t mask);

}  // namespace agb
