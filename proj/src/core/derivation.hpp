// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlcspace {

enum class NodeKind : std::uint8_t { NonTerminal, Group, Optional, Token, Int, Real };

// One node of a derivation tree. NonTerminal/Group nodes record the chosen alternative;
// Optional nodes record inclusion (and the alternative when included); leaves record the
// sampled value together with the range it was drawn from.
struct DerivationNode {
    NodeKind kind {NodeKind::Token};
    std::string label; // production name or token text
    int alternative {-1};
    bool included {false};
    std::int64_t int_value {0};
    double real_value {0};
    double lo {0};
    double hi {0};
    bool lo_open {false};
    bool hi_open {false};
    std::vector<DerivationNode> children;

    bool operator==(DerivationNode const&) const = default;
};

using DerivationTree = DerivationNode;

std::string print_tree(DerivationTree const& t);

// Pre-order traversal; f(node, depth)
template <typename Node, typename F>
void walk(Node& n, F&& f, int depth = 0)
{
    f(n, depth);
    for (auto& c : n.children) { walk(c, f, depth + 1); }
}

// Pointers to every node in pre-order, optionally with parent links.
std::vector<DerivationNode*> collect_nodes(DerivationNode& root);
std::vector<DerivationNode const*> collect_nodes(DerivationNode const& root);

std::size_t tree_size(DerivationNode const& root);

} // namespace mlcspace
