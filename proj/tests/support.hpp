// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

#include "core/config_model.hpp"

namespace mlcspace::testing {

inline DatasetContext const kCtx {6, 20};

inline std::string read_text(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Value I(std::int64_t v) { return Value {v}; }

inline Algorithm alg(std::string id, std::initializer_list<std::pair<char const*, Value>> params = {})
{
    Algorithm a {std::move(id), {}};
    for (auto const& [name, v] : params) { a.set(name, v); }
    return a;
}

inline Configuration pt_config(Algorithm pt, Algorithm base)
{
    Configuration c;
    c.core.algorithm = std::move(pt);
    c.core.slc = SlcChain {std::nullopt, std::nullopt, std::move(base)};
    return c;
}

inline Configuration with_meta(Configuration c, Algorithm meta)
{
    c.meta = std::move(meta);
    return c;
}

inline Configuration with_slc_meta(Configuration c, Algorithm meta)
{
    c.core.slc->meta = std::move(meta);
    return c;
}

// BR over NB: the simplest valid configuration
inline Configuration br_nb() { return pt_config(alg("BR"), alg("NB")); }

} // namespace mlcspace::testing
