// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "core/config_model.hpp"

namespace mlcspace {

inline constexpr int kSchemaVersion = 1;

// Canonical document: sorted keys, shortest round-trip numbers. indent < 0 gives one line.
std::string to_json(Configuration const& c, int indent = -1);

// Rejects unknown fields, unknown algorithms, misplaced algorithms, unknown parameters,
// values of the wrong kind and thresholds outside (0, 1). Throws SchemaError.
Configuration from_json(std::string_view text);

// Algorithm names used in commands. Defaults to the acronyms; a remap file holds
// "<id> = <class name>" lines, '#' starts a comment.
class NameTable {
public:
    static NameTable const& bundled();
    static NameTable with_remap(std::string_view text, TierRegistry const& reg = TierRegistry::bundled());

    [[nodiscard]] std::string const& name(std::string const& id) const;
    // nullptr when no algorithm of that level carries the name
    [[nodiscard]] std::string const* id_for(std::string const& name, Level level) const;

private:
    std::map<std::string, std::string> names_;
    std::map<std::pair<Level, std::string>, std::string> ids_;
};

// `<mlc> -threshold <t> [flags] -W <inner> -- [inner flags] ...`; throws InvalidConfiguration when
// the configuration has hard violations (checked without a dataset context).
std::string to_meka_command(Configuration const& c, NameTable const& names = NameTable::bundled());

// Inverse of to_meka_command for commands it produced. Throws SchemaError.
Configuration from_meka_command(std::string_view command, NameTable const& names = NameTable::bundled());

} // namespace mlcspace
