// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mlcspace {

struct DatasetContext {
    std::int64_t labels {2};     // L
    std::int64_t attributes {1}; // A

    bool operator==(DatasetContext const&) const = default;
};

// throws ContextError unless L >= 2 and A >= 1
void check_context(DatasetContext const& ctx);

// Arithmetic over literals, L and n_attributes with + - * /, SQRT and min.
class BoundExpr {
public:
    enum class Op : std::uint8_t { Number, Labels, Attributes, Add, Sub, Mul, Div, Neg, Sqrt, Min };

    struct Node {
        Op op {Op::Number};
        double value {0};
        int lhs {-1};
        int rhs {-1};
        bool operator==(Node const&) const = default;
    };

    BoundExpr() : nodes_ {Node {}}, root_ {0} { }

    static BoundExpr constant(double v);
    // Column offsets in SyntaxError are 1-based within text, on line 1; callers remap.
    static BoundExpr parse(std::string_view text);

    [[nodiscard]] double evaluate(DatasetContext const& ctx) const;
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] bool references_labels() const;
    [[nodiscard]] bool references_attributes() const;

    bool operator==(BoundExpr const&) const = default;

private:
    friend class BoundParser;
    [[nodiscard]] double eval(int i, DatasetContext const& ctx) const;
    void print(int i, std::string& out) const;

    std::vector<Node> nodes_;
    int root_ {-1};
};

// Integer interval of an IntRange: lo rounded up, hi rounded down, hi clamped to >= lo.
struct IntBounds {
    std::int64_t lo;
    std::int64_t hi;
};
IntBounds int_bounds(BoundExpr const& lo, BoundExpr const& hi, DatasetContext const& ctx);

// Scaled real range p*scale, p in [lo, hi]: nearest-integer rounding, clamped to >= 1.
std::int64_t scaled_round(double p, double scale);
IntBounds scaled_bounds(BoundExpr const& lo, BoundExpr const& hi, BoundExpr const& scale, DatasetContext const& ctx);

} // namespace mlcspace
