#pragma once

#include <memory>

#include "docroute/embedding.hpp"

namespace docroute {

std::unique_ptr<Embedder> make_http_embedder(const ProviderSpec& spec, const HttpOptions& http);

}  // namespace docroute
