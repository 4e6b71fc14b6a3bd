#include "foodprov/merkle.hpp"

#include <algorithm>

namespace foodprov {

namespace {

std::string_view digest_view(const Digest32& d) {
    return std::string_view{reinterpret_cast<const char*>(d.data()), d.size()};
}

}  // namespace

Digest32 hash_leaf(std::string_view bytes) {
    return Sha256{}.update_byte(0x00).update(bytes).finish();
}

Digest32 hash_node(const Digest32& left, const Digest32& right) {
    return Sha256{}.update_byte(0x01).update(digest_view(left)).update(digest_view(right)).finish();
}

Digest32 hash_field_leaf(std::string_view name, std::string_view value) {
    return Sha256{}
        .update_byte(0x02)
        .update(name)
        .update(std::string_view{&kFieldSep, 1})
        .update(value)
        .finish();
}

MerkleTree MerkleTree::build(std::vector<Digest32> leaves) {
    MerkleTree tree;
    if (leaves.empty()) {
        // Root over nothing: hash of the bare field-leaf domain byte. Keeps
        // empty payload commitments well defined.
        leaves.push_back(Sha256{}.update_byte(0x02).finish());
    }
    tree.levels_.push_back(std::move(leaves));
    while (tree.levels_.back().size() > 1) {
        const auto& prev = tree.levels_.back();
        std::vector<Digest32> next;
        next.reserve((prev.size() + 1) / 2);
        for (std::size_t i = 0; i < prev.size(); i += 2) {
            const Digest32& left = prev[i];
            const Digest32& right = (i + 1 < prev.size()) ? prev[i + 1] : prev[i];
            next.push_back(hash_node(left, right));
        }
        tree.levels_.push_back(std::move(next));
    }
    return tree;
}

Outcome<std::vector<ProofStep>> MerkleTree::prove(std::size_t leaf_index) const {
    if (leaf_index >= leaf_count()) {
        return make_error(ErrorCode::IndexOutOfRange,
                          "leaf " + std::to_string(leaf_index) + " of " +
                              std::to_string(leaf_count()));
    }
    std::vector<ProofStep> path;
    std::size_t index = leaf_index;
    for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
        const auto& nodes = levels_[level];
        const std::size_t sibling = (index % 2 == 0) ? index + 1 : index - 1;
        // duplicate-last padding: a lone rightmost node pairs with itself
        const Digest32& sib = (sibling < nodes.size()) ? nodes[sibling] : nodes[index];
        path.push_back(ProofStep{index % 2 == 1, sib});
        index /= 2;
    }
    return path;
}

Digest32 fold_path(Digest32 current, std::span<const ProofStep> path) {
    for (const ProofStep& step : path) {
        current = step.sibling_on_left ? hash_node(step.sibling, current)
                                       : hash_node(current, step.sibling);
    }
    return current;
}

bool verify_path(const Digest32& leaf, std::span<const ProofStep> path, const Digest32& root) {
    return fold_path(leaf, path) == root;
}

Digest32 field_tree_root(const FieldMap& fields) {
    FieldMap sorted = fields;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Digest32> leaves;
    leaves.reserve(sorted.size());
    for (const auto& [name, value] : sorted) {
        leaves.push_back(hash_field_leaf(name, value));
    }
    return MerkleTree::build(std::move(leaves)).root();
}

Outcome<std::vector<ProofStep>> field_tree_prove(const FieldMap& fields, std::string_view name) {
    FieldMap sorted = fields;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Digest32> leaves;
    leaves.reserve(sorted.size());
    std::size_t target = sorted.size();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        leaves.push_back(hash_field_leaf(sorted[i].first, sorted[i].second));
        if (sorted[i].first == name) {
            target = i;
        }
    }
    if (target == sorted.size()) {
        return make_error(ErrorCode::UnknownField, std::string(name));
    }
    return MerkleTree::build(std::move(leaves)).prove(target);
}

}  // namespace foodprov
