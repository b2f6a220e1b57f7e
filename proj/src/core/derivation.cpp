// SPDX-License-Identifier: Apache-2.0
#include "core/derivation.hpp"

#include "core/numfmt.hpp"

namespace mlcspace {

std::string print_tree(DerivationTree const& t)
{
    std::string out;
    walk(t, [&](DerivationNode const& n, int depth) {
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
        switch (n.kind) {
        case NodeKind::NonTerminal:
            out += "<" + n.label + "> #" + std::to_string(n.alternative);
            break;
        case NodeKind::Group:
            out += "( ) #" + std::to_string(n.alternative);
            break;
        case NodeKind::Optional:
            out += n.included ? "[+] #" + std::to_string(n.alternative) : std::string("[-]");
            break;
        case NodeKind::Token:
            out += n.label;
            break;
        case NodeKind::Int:
            out += std::to_string(n.int_value) + " in [" + format_real(n.lo) + ", " + format_real(n.hi) + "]";
            break;
        case NodeKind::Real:
            out += format_real(n.real_value) + " in " + (n.lo_open ? "(" : "[") + format_real(n.lo) + ", "
                + format_real(n.hi) + (n.hi_open ? ")" : "]");
            break;
        }
        out += '\n';
    });
    return out;
}

std::vector<DerivationNode*> collect_nodes(DerivationNode& root)
{
    std::vector<DerivationNode*> out;
    walk(root, [&](DerivationNode& n, int) { out.push_back(&n); });
    return out;
}

std::vector<DerivationNode const*> collect_nodes(DerivationNode const& root)
{
    std::vector<DerivationNode const*> out;
    walk(root, [&](DerivationNode const& n, int) { out.push_back(&n); });
    return out;
}

std::size_t tree_size(DerivationNode const& root)
{
    std::size_t n = 1;
    for (auto const& c : root.children) { n += tree_size(c); }
    return n;
}

} // namespace mlcspace
