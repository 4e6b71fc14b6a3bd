#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "foodprov/canonical.hpp"
#include "foodprov/errors.hpp"
#include "foodprov/hash.hpp"

namespace foodprov {

// Domain-separated hashing: 0x00 for event leaves, 0x01 for internal nodes,
// 0x02 for per-field leaves of an event's payload tree. An odd node count at
// any level duplicates the last node.

Digest32 hash_leaf(std::string_view bytes);
Digest32 hash_node(const Digest32& left, const Digest32& right);
Digest32 hash_field_leaf(std::string_view name, std::string_view value);

struct ProofStep {
    bool sibling_on_left;
    Digest32 sibling;
};

// All levels bottom-up; levels.front() are the leaves, levels.back() has the
// single root. A one-leaf tree has one level: the leaf is the root.
class MerkleTree {
public:
    static MerkleTree build(std::vector<Digest32> leaves);

    const Digest32& root() const { return levels_.back().back(); }
    std::size_t leaf_count() const { return levels_.front().size(); }

    Outcome<std::vector<ProofStep>> prove(std::size_t leaf_index) const;

private:
    std::vector<std::vector<Digest32>> levels_;
};

// Recompute the root from a leaf digest and its sibling path.
Digest32 fold_path(Digest32 current, std::span<const ProofStep> path);

bool verify_path(const Digest32& leaf, std::span<const ProofStep> path, const Digest32& root);

// Payload commitment: Merkle root over per-field leaves in canonical (name)
// order. An empty payload commits to sha256(0x02).
Digest32 field_tree_root(const FieldMap& fields);
Outcome<std::vector<ProofStep>> field_tree_prove(const FieldMap& fields, std::string_view name);

}  // namespace foodprov
